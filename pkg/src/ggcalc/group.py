"""Graded Lie algebras and exact group laws in exponential coordinates.

A graded algebra is given by dilation weights and sparse structure
constants; the group law polynomials R_j(x, y) are produced exactly by the
Dynkin commutator form of the Baker-Campbell-Hausdorff series, which
terminates because the algebra is nilpotent.  Group elements are coordinate
tuples (first-kind exponential coordinates), so inversion is coordinate
negation and the identity is the origin.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .poly import Polynomial, Scalar

Coord = Union[Fraction, int, Polynomial]


class GroupValidationError(ValueError):
    """Structure constants violate a required algebra axiom."""

    def __init__(self, report: "ValidationReport"):
        super().__init__("; ".join(str(v) for v in report.violations))
        self.report = report


class KindUnsupportedError(ValueError):
    """Requested quasi-norm kind is not defined for this group."""


@dataclass(frozen=True)
class Violation:
    kind: str  # antisymmetry | jacobi | gradation | weights
    indices: tuple[int, ...]
    detail: str = ""

    def __str__(self) -> str:
        ids = ",".join(str(i + 1) for i in self.indices)
        return f"{self.kind}({ids}){': ' + self.detail if self.detail else ''}"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]


class GradedLieAlgebra:
    """Dilation weights plus sparse structure constants c_{ij}^k.

    Brackets are stored for i < j only; antisymmetry is implied.  The
    nilpotency step equals the largest weight, by gradation.
    """

    def __init__(
        self,
        name: str,
        weights: Sequence[int],
        brackets: Mapping[tuple[int, int], Mapping[int, Scalar]],
    ):
        self.name = name
        self.weights = tuple(int(v) for v in weights)
        self.dim = len(self.weights)
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), row in brackets.items():
            if not 0 <= i < j < self.dim:
                raise ValueError(f"bracket indices ({i}, {j}) must satisfy 0 <= i < j < dim")
            entry = {k: Fraction(c) for k, c in row.items() if Fraction(c)}
            if entry:
                table[(i, j)] = entry
        self.brackets = table

    @property
    def step(self) -> int:
        return max(self.weights)

    @property
    def homogeneous_dimension(self) -> int:
        return sum(self.weights)

    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        """[X_i, X_j] as a sparse coefficient map."""
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def bracket(self, u: Sequence[Coord], v: Sequence[Coord]) -> list[Coord]:
        """[u, v] for coefficient vectors with rational or polynomial entries."""
        out: list[Coord] = [Fraction(0)] * self.dim
        for (i, j), row in self.brackets.items():
            t = u[i] * v[j] - u[j] * v[i]
            if isinstance(t, Polynomial) and t.is_zero:
                continue
            if not isinstance(t, Polynomial) and t == 0:
                continue
            for k, c in row.items():
                out[k] = out[k] + t * c
        return out

    def basis_weight_indices(self, w: int) -> list[int]:
        return [j for j, v in enumerate(self.weights) if v == w]


def validate_algebra(alg: GradedLieAlgebra) -> ValidationReport:
    """Check weights, gradation compatibility and the Jacobi identity."""
    violations: list[Violation] = []
    ws = alg.weights
    if not ws or ws[0] != 1 or any(v <= 0 for v in ws):
        violations.append(Violation("weights", (), "weights must be positive with v_1 = 1"))
    if any(ws[i] > ws[i + 1] for i in range(len(ws) - 1)):
        violations.append(Violation("weights", (), "weights must be non-decreasing"))
    for (i, j), row in alg.brackets.items():
        for k, c in row.items():
            if c and ws[k] != ws[i] + ws[j]:
                violations.append(
                    Violation(
                        "gradation",
                        (i, j, k),
                        f"c != 0 requires v_k = v_i + v_j ({ws[k]} != {ws[i]} + {ws[j]})",
                    )
                )
    n = alg.dim
    basis = []
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        basis.append(e)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                acc = [Fraction(0)] * n
                for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                    inner = alg.bracket(basis[b], basis[c])
                    outer = alg.bracket(basis[a], inner)
                    acc = [s + t for s, t in zip(acc, outer)]
                if any(acc):
                    violations.append(Violation("jacobi", (i, j, k)))
    return ValidationReport(not violations, tuple(violations))


# -- Baker-Campbell-Hausdorff via Dynkin's commutator series -------------------


def _dynkin_sequences(max_len: int):
    """(coefficient, word) pairs of Dynkin's commutator series.

    Words are tuples over {0, 1} (0 = first argument, 1 = second), built
    from blocks of p zeros followed by q ones with (p, q) != (0, 0); the
    coefficient of a word w assembled from k blocks with factorial product
    D is (-1)^(k-1) / (k * |w| * D), and it multiplies the right-nested
    bracket [w_1, [w_2, [..., w_m]]].  Only words of length <= max_len are
    produced; longer nested brackets vanish in a nilpotent algebra whose
    step is max_len.
    """
    seqs: list[tuple[Fraction, tuple[int, ...]]] = []

    def rec(word: tuple[int, ...], denom: int, nblocks: int):
        if word:
            coeff = Fraction((-1) ** (nblocks - 1), nblocks * len(word) * denom)
            seqs.append((coeff, word))
        if len(word) >= max_len:
            return
        for p in range(0, max_len - len(word) + 1):
            for q in range(0, max_len - len(word) - p + 1):
                if (p == 0 and q == 0) or len(word) + p + q > max_len:
                    continue
                rec(
                    word + (0,) * p + (1,) * q,
                    denom * math.factorial(p) * math.factorial(q),
                    nblocks + 1,
                )

    rec((), 1, 0)
    return seqs


def _nested_bracket(alg: GradedLieAlgebra, word: Sequence[int], letters) -> list[Coord]:
    acc = list(letters[word[-1]])
    for idx in reversed(word[:-1]):
        acc = alg.bracket(letters[idx], acc)
    return acc


@dataclass(frozen=True)
class GroupLaw:
    """The n group-law polynomials R_j over blocks (x, y)."""

    algebra: GradedLieAlgebra
    R: tuple[Polynomial, ...]

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def weights(self) -> tuple[int, ...]:
        return self.algebra.weights


def bch_group_law(alg: GradedLieAlgebra) -> GroupLaw:
    """Exact group law from the truncated Dynkin series.

    Raises GroupValidationError when the structure constants fail
    validation; the series is truncated at word length equal to the
    nilpotency step, beyond which all nested brackets vanish.
    """
    report = validate_algebra(alg)
    if not report.ok:
        raise GroupValidationError(report)
    n = alg.dim
    X = [Polynomial.var("x", i, n) for i in range(n)]
    Y = [Polynomial.var("y", i, n) for i in range(n)]
    acc: list[Polynomial] = [Polynomial.zero() for _ in range(n)]
    for coeff, word in _dynkin_sequences(alg.step):
        # Words ending in a repeated letter bracket to zero for length > 1.
        if len(word) > 1 and word[-1] == word[-2]:
            continue
        vec = _nested_bracket(alg, word, (X, Y))
        for j in range(n):
            term = vec[j]
            if isinstance(term, Polynomial):
                if not term.is_zero:
                    acc[j] = acc[j] + term * coeff
            elif term:
                acc[j] = acc[j] + Polynomial.const(term * coeff)
    return GroupLaw(alg, tuple(acc))


# -- group element operations ---------------------------------------------------


def _as_poly_coords(coords: Sequence[Coord]) -> list[Polynomial]:
    return [Polynomial.coerce(c) for c in coords]


def multiply(law: GroupLaw, a: Sequence[Coord], b: Sequence[Coord]) -> list:
    """Coordinates of a * b; works for rational and symbolic points."""
    pa = _as_poly_coords(a)
    pb = _as_poly_coords(b)
    out = [R.substitute({"x": pa, "y": pb}) for R in law.R]
    if all(isinstance(c, (int, Fraction)) for c in a) and all(
        isinstance(c, (int, Fraction)) for c in b
    ):
        return [p.constant_term for p in out]
    return out


def inverse(coords: Sequence[Coord]) -> list:
    """Coordinate negation (first-kind exponential coordinates)."""
    return [-Polynomial.coerce(c) if isinstance(c, Polynomial) else -Fraction(c) for c in coords]


def identity_element(dim: int) -> list[Fraction]:
    return [Fraction(0)] * dim


def symbolic_point(tag: str, dim: int) -> list[Polynomial]:
    return [Polynomial.var(tag, i, dim) for i in range(dim)]


def dilate(weights: Sequence[int], r: Coord, coords: Sequence[Coord]) -> list:
    """D_r(x) = (r^{v_1} x_1, ..., r^{v_n} x_n); r rational or symbolic."""
    if isinstance(r, Polynomial):
        return [Polynomial.coerce(c) * r ** v for v, c in zip(weights, coords)]
    rf = Fraction(r)
    if rf <= 0:
        raise ValueError("dilation parameter must be positive")
    return [
        (c * rf ** v) if isinstance(c, Polynomial) else Fraction(c) * rf ** v
        for v, c in zip(weights, coords)
    ]


def check_law_homogeneity(law: GroupLaw) -> bool:
    """R_j(D_r x, D_r y) = r^{v_j} R_j(x, y) as an identity in (r, x, y)."""
    n = law.dim
    r = Polynomial.var("r", 0, 1)
    x = symbolic_point("x", n)
    y = symbolic_point("y", n)
    dx = dilate(law.weights, r, x)
    dy = dilate(law.weights, r, y)
    for j, R in enumerate(law.R):
        lhs = R.substitute({"x": dx, "y": dy})
        rhs = R * r ** law.weights[j]
        if lhs != rhs:
            return False
    return True


def is_associative(law: GroupLaw) -> bool:
    """R(R(x,y),z) = R(x,R(y,z)) as exact polynomial identities."""
    n = law.dim
    x = symbolic_point("x", n)
    y = symbolic_point("y", n)
    z = symbolic_point("z", n)
    xy = multiply(law, x, y)
    yz = multiply(law, y, z)
    left = multiply(law, xy, z)
    right = multiply(law, x, yz)
    return all(l == r for l, r in zip(left, right))


def quasi_norm(
    coords: Sequence[Scalar | float],
    weights: Sequence[int],
    kind: str = "inf",
    p: float = 2.0,
) -> float:
    """Homogeneous quasi-norm |x| of a numeric point.

    Kinds: "inf" (max |x_j|^{1/v_j}), "p" ((sum |x_j|^{p/v_j})^{1/p}) and
    "koranyi" (Heisenberg groups with canonical weights only).
    """
    vals = [float(c) for c in coords]
    if kind == "inf":
        return max(abs(c) ** (1.0 / v) for c, v in zip(vals, weights))
    if kind == "p":
        return sum(abs(c) ** (p / v) for c, v in zip(vals, weights)) ** (1.0 / p)
    if kind == "koranyi":
        n2 = len(vals) - 1
        if n2 < 2 or n2 % 2 or tuple(weights) != (1,) * n2 + (2,):
            raise KindUnsupportedError(
                "koranyi norm needs a Heisenberg group with canonical weights"
            )
        horiz = sum(c * c for c in vals[:-1])
        return (horiz * horiz + vals[-1] ** 2 / 16.0) ** 0.25
    raise KindUnsupportedError(f"unknown quasi-norm kind {kind!r}")


# -- built-in catalog ------------------------------------------------------------


def heisenberg(n: int) -> GradedLieAlgebra:
    """H_n: [X_j, X_{n+j}] = X_{2n+1}, weights (1,...,1,2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    brackets = {(j, n + j): {2 * n: Fraction(1)} for j in range(n)}
    return GradedLieAlgebra(f"heisenberg{n}", (1,) * (2 * n) + (2,), brackets)


def abelian(n: int) -> GradedLieAlgebra:
    if n < 1:
        raise ValueError("n must be >= 1")
    return GradedLieAlgebra(f"abelian{n}", (1,) * n, {})


def engel() -> GradedLieAlgebra:
    """[X1,X2] = X3, [X1,X3] = X4 with weights (1,1,2,3)."""
    brackets = {(0, 1): {2: Fraction(1)}, (0, 2): {3: Fraction(1)}}
    return GradedLieAlgebra("engel", (1, 1, 2, 3), brackets)


def free_nilpotent_2_3() -> GradedLieAlgebra:
    """Free nilpotent algebra on 2 generators of step 3 (dim 5)."""
    brackets = {
        (0, 1): {2: Fraction(1)},
        (0, 2): {3: Fraction(1)},
        (1, 2): {4: Fraction(1)},
    }
    return GradedLieAlgebra("free_nilpotent_2_3", (1, 1, 2, 3, 3), brackets)


_CATALOG = {
    "heisenberg1": lambda: heisenberg(1),
    "heisenberg2": lambda: heisenberg(2),
    "heisenberg3": lambda: heisenberg(3),
    "abelian1": lambda: abelian(1),
    "abelian2": lambda: abelian(2),
    "abelian3": lambda: abelian(3),
    "engel": engel,
    "free_nilpotent_2_3": free_nilpotent_2_3,
    "free23": free_nilpotent_2_3,
}


def catalog_algebra(name: str) -> GradedLieAlgebra:
    try:
        return _CATALOG[name]()
    except KeyError:
        raise KeyError(
            f"unknown group {name!r}; catalog: {', '.join(sorted(set(_CATALOG)))}"
        ) from None


# -- JSON interchange -------------------------------------------------------------


def algebra_from_json(data: Mapping) -> GradedLieAlgebra:
    """Parse {"name", "dim", "weights", "brackets": [{"i","j","k","c"}...]}.

    Indices are 1-based and only i < j entries are accepted; antisymmetry
    is implied.
    """
    name = data.get("name", "group")
    dim = int(data["dim"])
    weights = [int(v) for v in data["weights"]]
    if len(weights) != dim:
        raise ValueError("weights length must equal dim")
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for entry in data.get("brackets", []):
        i, j, k = int(entry["i"]) - 1, int(entry["j"]) - 1, int(entry["k"]) - 1
        if not (0 <= i < j < dim and 0 <= k < dim):
            raise ValueError(f"bad bracket indices in {entry}")
        c = Fraction(str(entry["c"]))
        brackets.setdefault((i, j), {})
        brackets[(i, j)][k] = brackets[(i, j)].get(k, Fraction(0)) + c
    return GradedLieAlgebra(name, weights, brackets)


def algebra_to_json(alg: GradedLieAlgebra) -> dict:
    entries = []
    for (i, j) in sorted(alg.brackets):
        for k in sorted(alg.brackets[(i, j)]):
            entries.append(
                {"i": i + 1, "j": j + 1, "k": k + 1, "c": str(alg.brackets[(i, j)][k])}
            )
    return {
        "name": alg.name,
        "dim": alg.dim,
        "weights": list(alg.weights),
        "brackets": entries,
    }


def load_algebra(path_or_name: str) -> GradedLieAlgebra:
    """Resolve a catalog name or read a group definition JSON file."""
    import os

    if os.path.exists(path_or_name):
        with open(path_or_name) as fh:
            return algebra_from_json(json.load(fh))
    return catalog_algebra(path_or_name)
