"""Quantizing functions and the exact coefficient solvers of the calculus.

A quantizing function tau is a polynomial map G -> G given by its
coordinate functions in the x-block.  This module validates the structural
condition on those coordinates (each is zero or a homogeneous weight-v_j
polynomial with nonzero linear part in x_j and lower coordinates only),
decides symmetry, builds the classical examples (Kohn-Nirenberg, right,
half-exponential, matrix-integral), computes the product-correction
polynomials and the two composition maps p1, p2, and solves for all
rational coefficient tables of the asymptotic expansions: change of
quantization, adjoint, and composition.

Every table comes from one polynomial identity of the form

    poly = sum over splits  c * qtilde_{g1}(.) * qtilde_{g2}(.)

solved exactly by duality against the canonical basis and re-verified by
reconstruction before the table is returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .group import GroupLaw, inverse, multiply, symbolic_point
from .invariant import (
    BasisDeficientError,
    CanonicalBasis,
    MultiIndex,
    zero_index,
)
from .linalg import SingularSystemError, solve_unique
from .poly import (
    NON_HOMOGENEOUS,
    Polynomial,
    ZERO_WEIGHT,
    homogeneous_weight,
    parse_poly,
    render_poly,
)


class StructureViolationError(ValueError):
    """A structural property guaranteed by the admissibility condition failed."""


class RepNotFaithfulError(ValueError):
    """Matrix representation does not determine exponential coordinates."""


class NotAutomorphismError(ValueError):
    """Claimed automorphism fails the exact homomorphism identity."""


class NotStratifiedError(ValueError):
    """Group lacks a generating first layer for the homogeneous bracket."""


# -- quantizing functions ---------------------------------------------------------


@dataclass(frozen=True)
class QuantizingFunction:
    """tau as a tuple of coordinate polynomials over the x-block."""

    law: GroupLaw
    coords: tuple[Polynomial, ...]
    name: str = "tau"

    @property
    def dim(self) -> int:
        return self.law.dim

    def at(self, point: Sequence) -> list:
        """tau evaluated at a rational or symbolic point."""
        polys = [Polynomial.coerce(c) for c in point]
        out = [c.substitute({"x": polys}) if c._uses_block("x") else c
               for c in self.coords]
        return out


@dataclass(frozen=True)
class CoordinateVerdict:
    status: str  # "zero" | "valid" | "invalid"
    leading: Fraction | None = None
    lower_part: Polynomial | None = None
    reason: str | None = None  # non-homogeneous | wrong-weight |
    #                            zero-leading-coefficient | depends-on-later-vars


@dataclass(frozen=True)
class HPReport:
    verdicts: tuple[CoordinateVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.status in ("zero", "valid") for v in self.verdicts)


def validate_hp(tau: QuantizingFunction) -> HPReport:
    """Per-coordinate admissibility verdicts for tau."""
    law = tau.law
    n = law.dim
    weights = law.weights
    verdicts: list[CoordinateVerdict] = []
    for j, c in enumerate(tau.coords):
        if c.is_zero:
            verdicts.append(CoordinateVerdict("zero"))
            continue
        w = homogeneous_weight(c, weights)
        if w is NON_HOMOGENEOUS:
            verdicts.append(CoordinateVerdict("invalid", reason="non-homogeneous"))
            continue
        if w != weights[j]:
            verdicts.append(CoordinateVerdict("invalid", reason="wrong-weight"))
            continue
        uses_later = any(
            exps[i]
            for mono in c.terms
            for tag, exps in mono
            if tag == "x"
            for i in range(j + 1, n)
        )
        if uses_later:
            verdicts.append(CoordinateVerdict("invalid", reason="depends-on-later-vars"))
            continue
        xj_mono = (("x", tuple(1 if i == j else 0 for i in range(n))),)
        leading = c.coefficient(xj_mono)
        if leading == 0:
            verdicts.append(
                CoordinateVerdict("invalid", reason="zero-leading-coefficient")
            )
            continue
        lower = c - Polynomial.var("x", j, n) * leading
        verdicts.append(CoordinateVerdict("valid", leading, lower))
    return HPReport(tuple(verdicts))


def is_symmetric(tau: QuantizingFunction) -> tuple[bool, Polynomial | None]:
    """Check tau(x) = tau(x^{-1}) x exactly; returns (flag, first residual)."""
    law = tau.law
    n = law.dim
    x = symbolic_point("x", n)
    tau_at_inv = tau.at(inverse(x))
    rhs = multiply(law, tau_at_inv, x)
    for j in range(n):
        residual = tau.coords[j] - rhs[j]
        if not residual.is_zero:
            return False, residual
    return True, None


def builtin_tau(law: GroupLaw, kind: str) -> QuantizingFunction:
    """Built-in quantizing functions: "kn", "right", "half_log".

    half_log is exp(log(x)/2), i.e. coordinates x_j/2 in first-kind
    exponential coordinates; it is admissible and symmetric on every graded
    group (checked on construction).
    """
    n = law.dim
    if kind == "kn":
        coords = tuple(Polynomial.zero() for _ in range(n))
        return QuantizingFunction(law, coords, "kn")
    if kind == "right":
        coords = tuple(Polynomial.var("x", j, n) for j in range(n))
        return QuantizingFunction(law, coords, "right")
    if kind == "half_log":
        coords = tuple(Polynomial.var("x", j, n) * Fraction(1, 2) for j in range(n))
        tau = QuantizingFunction(law, coords, "half_log")
        if not validate_hp(tau).ok or not is_symmetric(tau)[0]:
            raise StructureViolationError("half_log failed its construction checks")
        return tau
    raise ValueError(f"unknown builtin tau {kind!r}")


def tau_from_json(law: GroupLaw, data: Mapping) -> QuantizingFunction:
    """Parse {"tau": ["<poly>", ...]} in the x-variable grammar."""
    entries = data["tau"]
    if len(entries) != law.dim:
        raise ValueError(f"tau needs {law.dim} coordinates, got {len(entries)}")
    dims = {"x": law.dim}
    coords = tuple(parse_poly(s, dims) if str(s).strip() != "0" else Polynomial.zero()
                   for s in entries)
    return QuantizingFunction(law, coords, data.get("name", "tau"))


def tau_to_json(tau: QuantizingFunction) -> dict:
    return {"name": tau.name, "tau": [render_poly(c) for c in tau.coords]}


# -- matrix-representation tau -----------------------------------------------------

Matrix = list[list[Polynomial]]


@dataclass(frozen=True)
class MatrixRepresentation:
    """Faithful nilpotent matrix representation: one matrix per basis vector."""

    law: GroupLaw
    generators: tuple[tuple[tuple[Fraction, ...], ...], ...]  # dim x (m x m)

    @property
    def size(self) -> int:
        return len(self.generators[0])


def _mat_zero(m: int) -> Matrix:
    return [[Polynomial.zero() for _ in range(m)] for _ in range(m)]


def _mat_eye(m: int) -> Matrix:
    out = _mat_zero(m)
    for i in range(m):
        out[i][i] = Polynomial.const(1)
    return out


def _mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _mat_scale(a: Matrix, c: Fraction) -> Matrix:
    return [[x * c for x in row] for row in a]


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    m = len(a)
    out = _mat_zero(m)
    for i in range(m):
        for k in range(m):
            if a[i][k].is_zero:
                continue
            for j in range(m):
                if b[k][j].is_zero:
                    continue
                out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def _mat_is_zero(a: Matrix) -> bool:
    return all(x.is_zero for row in a for x in row)


def mr_tau(rep: MatrixRepresentation) -> QuantizingFunction:
    """The averaged-exponential quantizing function from a matrix picture.

    Computes B = sum_k A^k / (k+1)!  (the exact value of the integral of
    exp(s A) over [0, 1] for nilpotent A), takes the finite matrix
    logarithm of B, and reads off the exponential coordinates by solving
    log(B) = sum_j c_j(x) A_j entry-wise.  Raises RepNotFaithfulError when
    the logarithm does not decompose over the generators.
    """
    law = rep.law
    n = law.dim
    m = rep.size
    gens: list[Matrix] = [
        [[Polynomial.const(c) for c in row] for row in g] for g in rep.generators
    ]
    A = _mat_zero(m)
    for j in range(n):
        xj = Polynomial.var("x", j, n)
        A = _mat_add(A, [[e * xj for e in row] for row in gens[j]])
    # B = I + A/2! + A^2/3! + ...
    B = _mat_eye(m)
    power = _mat_eye(m)
    k = 1
    fact = 1
    while True:
        power = _mat_mul(power, A)
        if _mat_is_zero(power):
            break
        fact *= k + 1
        B = _mat_add(B, _mat_scale(power, Fraction(1, fact)))
        k += 1
        if k > m + 1:
            break
    # log(B) = sum (-1)^{k+1} N^k / k with N = B - I nilpotent.
    N = _mat_add(B, _mat_scale(_mat_eye(m), Fraction(-1)))
    log_b = _mat_zero(m)
    power = _mat_eye(m)
    k = 1
    while True:
        power = _mat_mul(power, N)
        if _mat_is_zero(power):
            break
        log_b = _mat_add(log_b, _mat_scale(power, Fraction((-1) ** (k + 1), k)))
        k += 1
        if k > m + 1:
            break
    # Solve log(B) = sum_j c_j(x) A_j: group by monomial across all entries.
    monomials: set = set()
    for row in log_b:
        for e in row:
            monomials.update(e.terms)
    coords = [Polynomial.zero() for _ in range(n)]
    for mono in sorted(monomials):
        rows = []
        rhs = []
        for i in range(m):
            for j in range(m):
                coeffs = [Fraction(g[i][j]) for g in rep.generators]
                target = log_b[i][j].coefficient(mono)
                if any(coeffs) or target:
                    rows.append(coeffs)
                    rhs.append(target)
        try:
            sol = solve_unique(rows, rhs)
        except SingularSystemError as exc:
            raise RepNotFaithfulError(
                f"coordinate extraction inconsistent at monomial {mono}"
            ) from exc
        for j, c in enumerate(sol):
            if c:
                term = Polynomial({"x": n}, {mono: c})
                coords[j] = coords[j] + term
    return QuantizingFunction(law, tuple(coords), "mr")


def heisenberg_matrix_rep(law: GroupLaw) -> MatrixRepresentation:
    """Upper-triangular unipotent representation of a Heisenberg group.

    Generators on an (n+2)-square matrix space: X_j -> E_{0,j+1},
    X_{n+j} -> E_{j+1, n+1}, X_{2n+1} -> E_{0, n+1}.
    """
    dim = law.dim
    if dim % 2 == 0:
        raise ValueError("Heisenberg group must have odd dimension")
    n = (dim - 1) // 2
    m = n + 2
    gens = []
    for j in range(dim):
        g = [[Fraction(0)] * m for _ in range(m)]
        if j < n:
            g[0][j + 1] = Fraction(1)
        elif j < 2 * n:
            g[j - n + 1][m - 1] = Fraction(1)
        else:
            g[0][m - 1] = Fraction(1)
        gens.append(tuple(tuple(row) for row in g))
    return MatrixRepresentation(law, tuple(gens))


def abelian_matrix_rep(law: GroupLaw) -> MatrixRepresentation:
    """Shift representation of the abelian group: X_j -> E_{j, n}."""
    n = law.dim
    m = n + 1
    gens = []
    for j in range(n):
        g = [[Fraction(0)] * m for _ in range(m)]
        g[j][m - 1] = Fraction(1)
        gens.append(tuple(tuple(row) for row in g))
    return MatrixRepresentation(law, tuple(gens))


# -- product correction and composition maps ----------------------------------------


def product_correction(tau: QuantizingFunction) -> tuple[Polynomial, ...]:
    """Polynomials T with tau(x) tau(y) = T(x, y) * tau(x y), exactly.

    Each T_j must consist of genuinely mixed monomials x^a y^b (a, b != 0)
    depending only on the first j coordinates; a violation signals an
    inadmissible tau upstream.
    """
    law = tau.law
    n = law.dim
    x = symbolic_point("x", n)
    y = symbolic_point("y", n)
    tx = list(tau.coords)
    ty = [c.rename_block("x", "y") for c in tau.coords]
    lhs = multiply(law, tx, ty)
    xy = multiply(law, x, y)
    t_xy = [c.substitute({"x": xy}) for c in tau.coords]
    T = multiply(law, lhs, inverse(t_xy))
    for j, tj in enumerate(T):
        for mono in tj.terms:
            by_block = dict(mono)
            xe = by_block.get("x", (0,) * n)
            ye = by_block.get("y", (0,) * n)
            if not any(xe) or not any(ye):
                raise StructureViolationError(
                    f"T_{j + 1} has unmixed monomial {mono}"
                )
            if any(xe[i] or ye[i] for i in range(j + 1, n)):
                raise StructureViolationError(
                    f"T_{j + 1} depends on coordinates beyond {j + 1}"
                )
    return tuple(T)


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map G x G -> G (or G -> G) with named argument blocks."""

    components: tuple[Polynomial, ...]
    blocks: tuple[str, ...]

    def __getitem__(self, j: int) -> Polynomial:
        return self.components[j]


def p_maps(tau: QuantizingFunction) -> tuple[PolyMap, PolyMap]:
    """The composition maps over blocks (y, z):

        p1(y, z) = tau(y) tau(z^{-1} y)^{-1}
        p2(y, z) = tau(y) y^{-1} z tau(z)^{-1}

    Each component is verified jointly homogeneous of weight v_j.
    """
    law = tau.law
    n = law.dim
    y = symbolic_point("y", n)
    z = symbolic_point("z", n)
    tau_y = [c.rename_block("x", "y") for c in tau.coords]
    tau_z = [c.rename_block("x", "z") for c in tau.coords]
    z_inv_y = multiply(law, inverse(z), y)
    tau_at_zinvy = [c.substitute({"x": z_inv_y}) for c in tau.coords]
    p1 = multiply(law, tau_y, inverse(tau_at_zinvy))
    p2 = multiply(law, multiply(law, multiply(law, tau_y, inverse(y)), z), inverse(tau_z))
    for name, comps in (("p1", p1), ("p2", p2)):
        for j, c in enumerate(comps):
            w = homogeneous_weight(c, law.weights)
            if w is not ZERO_WEIGHT and w != law.weights[j]:
                raise StructureViolationError(
                    f"{name} coordinate {j + 1} is not homogeneous of weight "
                    f"{law.weights[j]}"
                )
    return (
        PolyMap(tuple(p1), ("y", "z")),
        PolyMap(tuple(p2), ("y", "z")),
    )


# -- coefficient tables ---------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientTable:
    """Sparse rational table of one expansion-coefficient family.

    kinds and key layouts:
      change_to_kn / change_from_kn / adjoint : key (alpha_prime, alpha)
      compose_p1                              : key (alpha, alpha1, alpha2)
      compose_p2                              : key (beta, beta1, beta2)
    """

    kind: str
    max_weight: int
    entries: Mapping[tuple, Fraction]

    def get(self, key: tuple) -> Fraction:
        return self.entries.get(key, Fraction(0))

    def to_json(self) -> dict:
        rows = []
        for key in sorted(self.entries):
            alpha, parts = key[0], key[1:]
            rows.append(
                {
                    "alpha": list(alpha),
                    "split": [list(p) for p in parts],
                    "c": str(self.entries[key]),
                }
            )
        return {"kind": self.kind, "max_weight": self.max_weight, "entries": rows}

    @staticmethod
    def from_json(data: Mapping) -> "CoefficientTable":
        entries = {}
        for row in data["entries"]:
            key = (tuple(row["alpha"]),) + tuple(tuple(p) for p in row["split"])
            entries[key] = Fraction(str(row["c"]))
        return CoefficientTable(data["kind"], int(data["max_weight"]), entries)


def solve_in_qtilde_basis(
    poly: Polynomial,
    blocks: Sequence[str],
    basis: CanonicalBasis,
    weight: int | None = None,
) -> dict[tuple, Fraction]:
    """Expand a homogeneous polynomial in reflected-basis products.

    One block b: coefficients of poly = sum c_{a} qtilde_a(b).
    Two blocks (y, z): substitutes y = z w through the group law and
    expands in qtilde_{a1}(z) qtilde_{a2}(w), returning keys (a1, a2);
    the w-slot corresponds to z^{-1} y.

    The reconstruction is verified exactly; a nonzero residual raises
    BasisDeficientError.
    """
    law = basis.law
    n = law.dim
    if weight is None:
        w = homogeneous_weight(poly, law.weights)
        if w is ZERO_WEIGHT:
            return {}
        if w is NON_HOMOGENEOUS:
            raise BasisDeficientError("input polynomial is not homogeneous")
        weight = w
    if len(blocks) == 1:
        b = blocks[0]
        coeffs = basis.coeffs_in_qtilde(poly, b, weight)
        basis.verify_one_block(poly, b, coeffs)
        return {(a,): c for a, c in coeffs.items()}
    if len(blocks) != 2:
        raise ValueError("blocks must name one or two arguments")
    yb, zb = blocks
    z = symbolic_point("z", n)
    w_pt = symbolic_point("w", n)
    zw = multiply(law, z, w_pt)
    # substitute y = z*w (renaming if the caller used other block names)
    work = poly
    if yb != "y":
        work = work.rename_block(yb, "y")
    if zb != "z":
        work = work.rename_block(zb, "z")
    substituted = work.substitute({"y": zw, "z": z})
    neg = {
        "z": [-Polynomial.var("z", i, n) for i in range(n)],
        "w": [-Polynomial.var("w", i, n) for i in range(n)],
    }
    reflected = substituted.substitute(
        {
            "z": neg["z"],
            "w": neg["w"],
        }
    ) if _uses_any(substituted, ("z", "w")) else substituted
    out: dict[tuple, Fraction] = {}
    recon = Polynomial.zero()
    for m1 in range(0, weight + 1):
        m2 = weight - m1
        for a1 in basis.indices_of_weight(m1):
            partial = basis._apply_x_word(reflected, a1, "z")
            if partial.is_zero:
                continue
            at_e = (
                partial.substitute(
                    {"z": [Polynomial.const(0)] * n, "w": symbolic_point("w", n)}
                )
                if _uses_any(partial, ("z",))
                else partial
            )
            for a2 in basis.indices_of_weight(m2):
                g = basis._apply_x_word(at_e, a2, "w")
                if g.is_zero:
                    continue
                zeros = {t: [0] * d for t, d in g.blocks.items()}
                c = g.evaluate(zeros)
                if c:
                    out[(a1, a2)] = c
                    recon = recon + (
                        basis.qtilde(a1).rename_block("x", "z")
                        * basis.qtilde(a2).rename_block("x", "w")
                    ) * c
    if recon != substituted:
        raise BasisDeficientError("two-block expansion residual is nonzero")
    return out


def _uses_any(p: Polynomial, tags: Sequence[str]) -> bool:
    return any(t in tags for mono in p.terms for t, _ in mono)


def change_coeffs(
    tau: QuantizingFunction,
    direction: str,
    max_weight: int,
    basis: CanonicalBasis | None = None,
) -> CoefficientTable:
    """Change-of-quantization coefficients for all [alpha] <= max_weight.

    direction "tau_to_kn": expand q_alpha(tau(y)); "kn_to_tau": expand
    q_alpha(tau(y)^{-1}).  Keys are (alpha_prime, alpha) at equal weight.
    """
    if direction not in ("tau_to_kn", "kn_to_tau"):
        raise ValueError(f"unknown direction {direction!r}")
    law = tau.law
    if basis is None:
        basis = CanonicalBasis(law, max_weight)
    n = law.dim
    tau_y = [c.rename_block("x", "y") for c in tau.coords]
    if direction == "kn_to_tau":
        tau_y = inverse(tau_y)
    entries: dict[tuple, Fraction] = {}
    for M in range(0, max_weight + 1):
        for alpha in basis.indices_of_weight(M):
            composed = basis.q(alpha).substitute({"x": tau_y}) if M else Polynomial.const(1)
            if composed.is_zero:
                continue
            coeffs = basis.coeffs_in_qtilde(composed, "y", M) if M else {zero_index(n): Fraction(1)}
            if M:
                basis.verify_one_block(composed, "y", coeffs)
            for ap, c in coeffs.items():
                entries[(ap, alpha)] = c
    kind = "change_to_kn" if direction == "tau_to_kn" else "change_from_kn"
    return CoefficientTable(kind, max_weight, entries)


def adjoint_coeffs(
    tau: QuantizingFunction,
    max_weight: int,
    basis: CanonicalBasis | None = None,
) -> CoefficientTable:
    """Adjoint-expansion coefficients from the map y -> tau(y) y^{-1} tau(y^{-1})^{-1}.

    For symmetric tau the argument map is constantly the identity element
    and the table is supported at weight zero only.
    """
    law = tau.law
    if basis is None:
        basis = CanonicalBasis(law, max_weight)
    n = law.dim
    y = symbolic_point("y", n)
    tau_y = [c.rename_block("x", "y") if c._uses_block("x") else c for c in tau.coords]
    tau_at_inv = [c.substitute({"x": inverse(y)}) for c in tau.coords]
    arg = multiply(law, multiply(law, tau_y, inverse(y)), inverse(tau_at_inv))
    entries: dict[tuple, Fraction] = {}
    for M in range(0, max_weight + 1):
        for alpha in basis.indices_of_weight(M):
            if M == 0:
                entries[(zero_index(n), alpha)] = Fraction(1)
                continue
            composed = basis.q(alpha).substitute({"x": arg})
            if composed.is_zero:
                continue
            coeffs = basis.coeffs_in_qtilde(composed, "y", M)
            basis.verify_one_block(composed, "y", coeffs)
            for ap, c in coeffs.items():
                entries[(ap, alpha)] = c
    return CoefficientTable("adjoint", max_weight, entries)


def composition_coeffs(
    tau: QuantizingFunction,
    max_weight: int,
    basis: CanonicalBasis | None = None,
) -> tuple[CoefficientTable, CoefficientTable]:
    """Composition coefficient tables for p1 and p2 up to max_weight.

    p1 table keys (alpha, a1, a2):  q_alpha(p1) = sum c qtilde_{a1}(z) qtilde_{a2}(z^{-1}y)
    p2 table keys (beta, b1, b2):   q_beta(p2)  = sum c qtilde_{b1}(z^{-1}y) qtilde_{b2}(z)
    """
    law = tau.law
    if basis is None:
        basis = CanonicalBasis(law, max_weight)
    n = law.dim
    p1, p2 = p_maps(tau)
    e1: dict[tuple, Fraction] = {}
    e2: dict[tuple, Fraction] = {}
    for M in range(0, max_weight + 1):
        for alpha in basis.indices_of_weight(M):
            if M == 0:
                e1[(alpha, zero_index(n), zero_index(n))] = Fraction(1)
                e2[(alpha, zero_index(n), zero_index(n))] = Fraction(1)
                continue
            q_p1 = basis.q(alpha).substitute({"x": list(p1.components)})
            if not q_p1.is_zero:
                # keys from solver: (z-part, w-part); table key (alpha, a1, a2)
                for (a_z, a_w), c in solve_in_qtilde_basis(
                    q_p1, ("y", "z"), basis, M
                ).items():
                    e1[(alpha, a_z, a_w)] = c
            q_p2 = basis.q(alpha).substitute({"x": list(p2.components)})
            if not q_p2.is_zero:
                for (b_z, b_w), c in solve_in_qtilde_basis(
                    q_p2, ("y", "z"), basis, M
                ).items():
                    e2[(alpha, b_w, b_z)] = c
    return (
        CoefficientTable("compose_p1", max_weight, e1),
        CoefficientTable("compose_p2", max_weight, e2),
    )


# -- automorphisms ----------------------------------------------------------------


@dataclass(frozen=True)
class Automorphism:
    """Validated group automorphism given by coordinate polynomials."""

    law: GroupLaw
    components: tuple[Polynomial, ...]
    name: str

    def apply(self, point: Sequence) -> list:
        polys = [Polynomial.coerce(c) for c in point]
        out = []
        for c in self.components:
            blocks = {t for mono in c.terms for t, _ in mono}
            sub = {"x": polys}
            out.append(c.substitute(sub) if "x" in blocks else c)
        return out


def _validate_automorphism(law: GroupLaw, comps: Sequence[Polynomial], name: str) -> Automorphism:
    n = law.dim
    x = symbolic_point("x", n)
    y = symbolic_point("y", n)
    xy = multiply(law, x, y)
    lhs = [c.substitute({"x": xy}) for c in comps]
    phi_x = list(comps)
    phi_y = [c.rename_block("x", "y") for c in comps]
    rhs = multiply(law, phi_x, phi_y)
    for j in range(n):
        if lhs[j] != rhs[j]:
            raise NotAutomorphismError(f"{name} fails the homomorphism identity")
    return Automorphism(law, tuple(comps), name)


def automorphism(law: GroupLaw, kind: str, **params) -> Automorphism:
    """Construct and validate one of the supported automorphism kinds.

    kind "conj":   params y = rational coordinates of the conjugating point
    kind "dilation": params r = positive rational, or r = None for a
                     symbolic parameter (block "r")
    kind "theta":  Heisenberg flip (x', x'') -> (x', -x''), center negated
    kind "symplectic": params generator in {"A", "C", "J"} with matrix =
                     an invertible A (block diag(A, A^{-T})) or symmetric C
                     (lower unipotent block), acting on the horizontal
                     layer of a Heisenberg group, identity on the center
    """
    n = law.dim
    x = symbolic_point("x", n)
    if kind == "conj":
        ypt = [Fraction(v) for v in params["y"]]
        comps = multiply(law, multiply(law, ypt, x), inverse(ypt))
        comps = [Polynomial.coerce(c) for c in comps]
        return _validate_automorphism(law, comps, f"conj({params['y']})")
    if kind == "dilation":
        r = params.get("r")
        if r is None:
            rp = Polynomial.var("r", 0, 1)
            comps = [x[j] * rp ** law.weights[j] for j in range(n)]
            return _validate_automorphism(law, comps, "dilation(r)")
        rf = Fraction(r)
        if rf <= 0:
            raise ValueError("dilation parameter must be positive")
        comps = [x[j] * rf ** law.weights[j] for j in range(n)]
        return _validate_automorphism(law, comps, f"dilation({rf})")
    if kind == "theta":
        half = _heisenberg_n(law)
        comps = [x[j] for j in range(half)]
        comps += [-x[half + j] for j in range(half)]
        comps.append(-x[2 * half])
        return _validate_automorphism(law, comps, "theta")
    if kind == "symplectic":
        return _symplectic_automorphism(law, params)
    raise ValueError(f"unknown automorphism kind {kind!r}")


def _heisenberg_n(law: GroupLaw) -> int:
    dim = law.dim
    if dim % 2 == 0 or tuple(law.weights) != (1,) * (dim - 1) + (2,):
        raise NotAutomorphismError("this automorphism kind needs a Heisenberg group")
    return (dim - 1) // 2


def _symplectic_automorphism(law: GroupLaw, params) -> Automorphism:
    n = _heisenberg_n(law)
    gen = params["generator"]
    x = symbolic_point("x", law.dim)
    if gen == "J":
        comps = [x[n + j] for j in range(n)] + [-x[j] for j in range(n)]
        comps.append(x[2 * n])
        return _validate_automorphism(law, comps, "J")
    mat = params["matrix"]
    M = [[Fraction(v) for v in row] for row in mat]
    if gen == "A":
        inv_t = _inverse_transpose(M)
        comps = [
            sum((x[k] * M[j][k] for k in range(n)), Polynomial.zero())
            for j in range(n)
        ]
        comps += [
            sum((x[n + k] * inv_t[j][k] for k in range(n)), Polynomial.zero())
            for j in range(n)
        ]
        comps.append(x[2 * n])
        return _validate_automorphism(law, comps, "block_A")
    if gen == "C":
        for i in range(n):
            for j in range(n):
                if M[i][j] != M[j][i]:
                    raise NotAutomorphismError("chirp block must be symmetric")
        comps = [x[j] for j in range(n)]
        comps += [
            x[n + j] + sum((x[k] * M[j][k] for k in range(n)), Polynomial.zero())
            for j in range(n)
        ]
        comps.append(x[2 * n])
        return _validate_automorphism(law, comps, "block_C")
    raise ValueError(f"unknown symplectic generator {gen!r}")


def _inverse_transpose(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    from .linalg import solve_square

    eye = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    inv = solve_square(M, eye)
    return [[inv[j][i] for j in range(n)] for i in range(n)]


def commutes_with(tau: QuantizingFunction, phi: Automorphism) -> bool:
    """Exact identity phi(tau(x)) = tau(phi(x))."""
    n = tau.law.dim
    x = symbolic_point("x", n)
    tau_x = tau.at(x)
    lhs = phi.apply(tau_x)
    rhs = [c.substitute({"x": phi.apply(x)}) if c._uses_block("x") else c
           for c in tau.coords]
    return all(l == r for l, r in zip(lhs, rhs))


def intertwines_two_point(tau: QuantizingFunction, phi: Automorphism) -> bool:
    """Exact identity phi(tau(y^{-1} x)) = tau(phi(y)^{-1} phi(x))."""
    law = tau.law
    n = law.dim
    x = symbolic_point("x", n)
    y = symbolic_point("y", n)
    yinv_x = multiply(law, inverse(y), x)
    lhs = phi.apply([c.substitute({"x": yinv_x}) if c._uses_block("x") else c
                     for c in tau.coords])
    phi_x = phi.apply(x)
    phi_y = [c.rename_block("x", "y") for c in phi.apply(x)]
    arg = multiply(law, inverse(phi_y), phi_x)
    rhs = [c.substitute({"x": arg}) if c._uses_block("x") else c for c in tau.coords]
    return all(l == r for l, r in zip(lhs, rhs))


# -- first-stratum bracket data -----------------------------------------------------


@dataclass(frozen=True)
class PoissonSpec:
    """First-stratum index set defining the homogeneous bracket.

    The bracket of two symbols is (-i) * sum over the listed indices j of
    (X^{e_j} s1)(D^{e_j} s2) - (D^{e_j} s1)(X^{e_j} s2).
    """

    first_stratum: tuple[int, ...]
    weights: tuple[int, ...]


def poisson_bracket_spec(law: GroupLaw) -> PoissonSpec:
    """First-stratum data; requires the weight-1 layer to generate layer 2."""
    alg = law.algebra
    first = alg.basis_weight_indices(1)
    second = alg.basis_weight_indices(2)
    if not first:
        raise NotStratifiedError("no weight-1 layer")
    if second:
        from .linalg import rank

        rows = []
        for a in range(len(first)):
            for b in range(a + 1, len(first)):
                vec = alg.bracket_basis(first[a], first[b])
                rows.append([vec.get(k, Fraction(0)) for k in second])
        if not rows or rank(rows) < len(second):
            raise NotStratifiedError(
                "brackets of the weight-1 layer do not span the weight-2 layer"
            )
    return PoissonSpec(tuple(first), law.weights)
