"""Invariant vector fields, canonical homogeneous polynomials, conversions.

Differential operators are kept in normal form: polynomial coefficients on
the left, Euclidean partials on the right, as a sparse map from the
derivative multi-index to its coefficient polynomial.  Left-invariant
fields are read off the group law via

    X_j|_x = sum_k dR_k(x, y)/dy_j |_{y=0} d/dx_k,

right-invariant ones from R_k(y, x).  The canonical polynomials q_alpha are
the homogeneous basis dual to the X^alpha at the identity,
(X^beta q_alpha)(e) = delta, obtained from one exact linear solve per
weight.  Expansions of homogeneous polynomials in the q (or reflected
q-tilde) basis then need no further solves: the coefficient of q_alpha is
(X^alpha p)(e) by duality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iter_product
from typing import Mapping, Sequence

from .group import GroupLaw, symbolic_point
from .linalg import SingularSystemError, solve_square
from .poly import (
    Polynomial,
    homogeneous_weight,
    monomials_of_weight,
    multi_weight,
    ZERO_WEIGHT,
)

MultiIndex = tuple[int, ...]

#: Default cap on weighted orders for basis construction and table solves.
M_MAX_DEFAULT = 6


class NotInvariantError(ValueError):
    """Operator failed exact reconstruction from its basis coefficients."""


class BasisDeficientError(ValueError):
    """A claimed basis expansion left a nonzero residual."""


def zero_index(n: int) -> MultiIndex:
    return (0,) * n


def unit_index(n: int, j: int) -> MultiIndex:
    return tuple(1 if i == j else 0 for i in range(n))


def add_indices(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


class DiffOp:
    """Finite sum of terms p_beta(x) * d^beta acting on the x-block."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[MultiIndex, Polynomial]):
        self.dim = dim
        self.terms = {b: p for b, p in terms.items() if not p.is_zero}

    @staticmethod
    def zero(dim: int) -> DiffOp:
        return DiffOp(dim, {})

    @staticmethod
    def identity(dim: int) -> DiffOp:
        return DiffOp(dim, {zero_index(dim): Polynomial.const(1)})

    @staticmethod
    def partial(dim: int, j: int) -> DiffOp:
        return DiffOp(dim, {unit_index(dim, j): Polynomial.const(1)})

    @staticmethod
    def partial_multi(dim: int, beta: MultiIndex) -> DiffOp:
        return DiffOp(dim, {tuple(beta): Polynomial.const(1)})

    def __eq__(self, other) -> bool:
        return isinstance(other, DiffOp) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((b, hash(p)) for b, p in self.terms.items()))

    def __add__(self, other: DiffOp) -> DiffOp:
        terms = dict(self.terms)
        for b, p in other.terms.items():
            terms[b] = terms.get(b, Polynomial.zero()) + p
        return DiffOp(self.dim, terms)

    def __sub__(self, other: DiffOp) -> DiffOp:
        return self + other.scale(-1)

    def scale(self, c) -> DiffOp:
        return DiffOp(self.dim, {b: p * Fraction(c) for b, p in self.terms.items()})

    def mul_poly(self, q: Polynomial) -> DiffOp:
        """Left multiplication by a polynomial coefficient."""
        return DiffOp(self.dim, {b: q * p for b, p in self.terms.items()})

    def apply(self, p: Polynomial, block: str = "x") -> Polynomial:
        """Apply to a polynomial; derivatives act on ``block``."""
        out = Polynomial.zero()
        for beta, coeff in self.terms.items():
            g = p
            for j, e in enumerate(beta):
                for _ in range(e):
                    g = g.derivative(block, j)
                    if g.is_zero:
                        break
                if g.is_zero:
                    break
            if g.is_zero:
                continue
            c = coeff if block == "x" else coeff.rename_block("x", block)
            out = out + c * g
        return out

    def compose(self, other: DiffOp) -> DiffOp:
        """Normal-ordered operator product self o other (self applied last)."""
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        n = self.dim
        result: dict[MultiIndex, Polynomial] = {}
        for beta, p in self.terms.items():
            for gamma, q in other.terms.items():
                # Leibniz: d^beta (q d^gamma) = sum_{delta <= beta} C(beta, delta)
                #          (d^delta q) d^{beta - delta + gamma}
                ranges = [range(e + 1) for e in beta]
                for delta in iter_product(*ranges):
                    dq = q
                    for j, e in enumerate(delta):
                        for _ in range(e):
                            dq = dq.derivative("x", j)
                            if dq.is_zero:
                                break
                        if dq.is_zero:
                            break
                    if dq.is_zero:
                        continue
                    binom = 1
                    for bj, dj in zip(beta, delta):
                        binom *= math.comb(bj, dj)
                    idx = tuple(b - d + g for b, d, g in zip(beta, delta, gamma))
                    contrib = p * dq * binom
                    result[idx] = result.get(idx, Polynomial.zero()) + contrib
        return DiffOp(n, result)

    def value_at_identity(self, p: Polynomial, block: str = "x") -> Fraction:
        applied = self.apply(p, block)
        zeros = {t: [0] * d for t, d in applied.blocks.items()}
        return applied.evaluate(zeros)

    def homogeneous_degree(self, weights: Sequence[int]):
        """Common degree d with coefficient weight = [beta] - d, else None."""
        deg = None
        for beta, p in self.terms.items():
            w = homogeneous_weight(p, weights)
            if w is ZERO_WEIGHT:
                continue
            if w is None or not isinstance(w, int):
                return None
            d = multi_weight(beta, weights) - w
            if deg is None:
                deg = d
            elif deg != d:
                return None
        return deg

    def __repr__(self) -> str:
        from .poly import render_poly

        bits = [
            f"({render_poly(p)}) d^{beta}"
            for beta, p in sorted(self.terms.items())
        ]
        return "DiffOp[" + " + ".join(bits) + "]" if bits else "DiffOp[0]"


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.compose(b) - b.compose(a)


def left_vf(law: GroupLaw, j: int) -> DiffOp:
    """Left-invariant field X_j with exact polynomial coefficients."""
    n = law.dim
    zeros = [Polynomial.const(0)] * n
    xs = symbolic_point("x", n)
    terms: dict[MultiIndex, Polynomial] = {}
    for k in range(n):
        coeff = law.R[k].derivative("y", j).substitute({"x": xs, "y": zeros})
        if not coeff.is_zero:
            idx = unit_index(n, k)
            terms[idx] = terms.get(idx, Polynomial.zero()) + coeff
    return DiffOp(n, terms)


def right_vf(law: GroupLaw, j: int) -> DiffOp:
    """Right-invariant field from the reversed law R_k(y, x)."""
    n = law.dim
    xs = symbolic_point("x", n)
    ys = symbolic_point("y", n)
    zeros = [Polynomial.const(0)] * n
    terms: dict[MultiIndex, Polynomial] = {}
    for k in range(n):
        reversed_R = law.R[k].substitute({"x": ys, "y": xs})
        coeff = reversed_R.derivative("y", j).substitute({"x": xs, "y": zeros})
        if not coeff.is_zero:
            idx = unit_index(n, k)
            terms[idx] = terms.get(idx, Polynomial.zero()) + coeff
    return DiffOp(n, terms)


class CanonicalBasis:
    """Canonical homogeneous polynomial basis dual to the X^alpha at e.

    Construction solves, per weight M, the square exact system
    (X^beta q_alpha)(e) = delta over the monomials of weight M; the matrix
    row is read from the normal form of X^beta, so only one operator build
    per beta is needed.
    """

    def __init__(self, law: GroupLaw, max_weight: int = M_MAX_DEFAULT):
        self.law = law
        self.max_weight = max_weight
        self.weights = law.weights
        n = law.dim
        self.X = [left_vf(law, j) for j in range(n)]
        self.Xt = [right_vf(law, j) for j in range(n)]
        self._xops: dict[MultiIndex, DiffOp] = {zero_index(n): DiffOp.identity(n)}
        self._xtops: dict[MultiIndex, DiffOp] = {zero_index(n): DiffOp.identity(n)}
        self._q: dict[MultiIndex, Polynomial] = {zero_index(n): Polynomial.const(1)}
        self._indices_by_weight: dict[int, list[MultiIndex]] = {}
        for M in range(1, max_weight + 1):
            self._build_weight(M)

    # -- multi-index helpers -------------------------------------------------

    def indices_of_weight(self, M: int) -> list[MultiIndex]:
        if M == 0:
            return [zero_index(self.law.dim)]
        if M not in self._indices_by_weight:
            if M > self.max_weight:
                raise ValueError(f"weight {M} exceeds max_weight {self.max_weight}")
            self._indices_by_weight[M] = monomials_of_weight(self.weights, M)
        return self._indices_by_weight[M]

    def weight(self, alpha: MultiIndex) -> int:
        return multi_weight(alpha, self.weights)

    def x_op(self, alpha: MultiIndex) -> DiffOp:
        """X^alpha = X_1^{a_1} o ... o X_n^{a_n}, memoized."""
        alpha = tuple(alpha)
        if alpha not in self._xops:
            j = next(i for i, a in enumerate(alpha) if a)
            rest = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            self._xops[alpha] = self.X[j].compose(self.x_op(rest))
        return self._xops[alpha]

    def xt_op(self, alpha: MultiIndex) -> DiffOp:
        alpha = tuple(alpha)
        if alpha not in self._xtops:
            j = next(i for i, a in enumerate(alpha) if a)
            rest = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            self._xtops[alpha] = self.Xt[j].compose(self.xt_op(rest))
        return self._xtops[alpha]

    # -- canonical polynomials -------------------------------------------------

    def _build_weight(self, M: int) -> None:
        idxs = self.indices_of_weight(M)
        m = len(idxs)
        # A[row beta][col mu] = (X^beta x^mu)(e) = mu! * const-term of the
        # d^mu coefficient of X^beta.
        A = []
        for beta in idxs:
            op = self.x_op(beta)
            row = []
            for mu in idxs:
                coeff = op.terms.get(mu)
                if coeff is None:
                    row.append(Fraction(0))
                else:
                    fact = 1
                    for e in mu:
                        fact *= math.factorial(e)
                    row.append(coeff.constant_term * fact)
            A.append(row)
        eye = [
            [Fraction(1) if i == j else Fraction(0) for j in range(m)]
            for i in range(m)
        ]
        try:
            U = solve_square(A, eye)
        except SingularSystemError as exc:
            raise SingularSystemError(
                f"canonical basis system singular at weight {M}"
            ) from exc
        n = self.law.dim
        for col, alpha in enumerate(idxs):
            q = Polynomial.zero()
            for row, mu in enumerate(idxs):
                if U[row][col]:
                    mono = Polynomial.const(U[row][col])
                    for i, e in enumerate(mu):
                        if e:
                            mono = mono * Polynomial.var("x", i, n) ** e
                    q = q + mono
            self._q[alpha] = q

    def q(self, alpha: MultiIndex) -> Polynomial:
        """Canonical polynomial q_alpha over the x-block."""
        alpha = tuple(alpha)
        if alpha not in self._q:
            raise ValueError(f"q_{alpha} exceeds max_weight {self.max_weight}")
        return self._q[alpha]

    def qtilde(self, alpha: MultiIndex) -> Polynomial:
        """Reflected polynomial q_alpha(x^{-1}) = q_alpha(-x)."""
        n = self.law.dim
        neg = [-Polynomial.var("x", i, n) for i in range(n)]
        return self.q(alpha).substitute({"x": neg})

    # -- duality-based expansions ------------------------------------------------

    def _apply_x_word(self, p: Polynomial, alpha: MultiIndex, block: str) -> Polynomial:
        g = p
        for j in range(len(alpha) - 1, -1, -1):
            for _ in range(alpha[j]):
                g = self.X[j].apply(g, block)
                if g.is_zero:
                    return g
        return g

    def coeffs_in_q(self, p: Polynomial, block: str, M: int) -> dict[MultiIndex, Fraction]:
        """Coefficients of homogeneous p = sum c_alpha q_alpha over ``block``.

        By duality c_alpha = (X^alpha p)(e); the word X^alpha is applied in
        the declared order X_1^{a_1} ... X_n^{a_n} (rightmost factor first).
        """
        out: dict[MultiIndex, Fraction] = {}
        for alpha in self.indices_of_weight(M):
            g = self._apply_x_word(p, alpha, block)
            if g.is_zero:
                continue
            zeros = {t: [0] * d for t, d in g.blocks.items()}
            c = g.evaluate(zeros)
            if c:
                out[alpha] = c
        return out

    def coeffs_in_qtilde(self, p: Polynomial, block: str, M: int) -> dict[MultiIndex, Fraction]:
        """Coefficients of p = sum c_alpha q~_alpha over a single block."""
        n = self.law.dim
        neg = [-Polynomial.var(block, i, n) for i in range(n)]
        reflected = p.substitute({block: neg})
        return self.coeffs_in_q(reflected, block, M)

    def verify_one_block(
        self, p: Polynomial, block: str, coeffs: Mapping[MultiIndex, Fraction]
    ) -> None:
        recon = Polynomial.zero()
        for alpha, c in coeffs.items():
            recon = recon + self.qtilde(alpha).rename_block("x", block) * c
        if recon != p:
            raise BasisDeficientError("q-tilde expansion residual is nonzero")


def canonical_q(law: GroupLaw, alpha: MultiIndex, basis: CanonicalBasis | None = None) -> Polynomial:
    """The canonical polynomial of one multi-index (convenience wrapper)."""
    M = multi_weight(alpha, law.weights)
    if basis is None or basis.max_weight < M:
        basis = CanonicalBasis(law, max_weight=M)
    return basis.q(alpha)


def duality_defects(basis: CanonicalBasis, max_weight: int) -> list[tuple[MultiIndex, MultiIndex]]:
    """All pairs with (X^beta q_alpha)(e) != delta, for weights <= max_weight.

    The check applies the ordered derivative words directly to the
    assembled polynomials (independently of the linear solve that built
    them), sharing word prefixes and pruning once a partial application
    vanishes.
    """
    weights = basis.weights
    n = basis.law.dim
    bad: list[tuple[MultiIndex, MultiIndex]] = []
    for M in range(0, max_weight + 1):
        for alpha in basis.indices_of_weight(M):
            q = basis.q(alpha)

            # Enumerate beta with [beta] = M applying factors right to left:
            # X^beta = X_1^{b_1} ... X_n^{b_n} acts by X_n first.
            def descend(j: int, remaining: int, beta_suffix: tuple[int, ...], g: Polynomial):
                if j < 0:
                    if remaining == 0:
                        val = g.constant_term
                        want = Fraction(1) if beta_suffix == alpha else Fraction(0)
                        if val != want:
                            bad.append((alpha, beta_suffix))
                    return
                limit = remaining // weights[j]
                h = g
                for e in range(0, limit + 1):
                    descend(j - 1, remaining - e * weights[j], (e,) + beta_suffix, h)
                    if e < limit:
                        h = basis.X[j].apply(h)
                        if h.is_zero:
                            # Every deeper completion evaluates to zero,
                            # which is only a defect if it completes alpha.
                            if tuple(alpha[j + 1:]) == beta_suffix and alpha[j] > e:
                                bad.append((alpha, alpha))
                            break

            descend(n - 1, M, (), q)
    return bad


def pbw_expand(op: DiffOp, basis: CanonicalBasis) -> dict[MultiIndex, Fraction]:
    """Expand a homogeneous left-invariant operator as sum c_gamma X^gamma.

    Coefficients are c_gamma = (op q_gamma)(e) over [gamma] = degree; the
    reconstruction is checked exactly in normal form and NotInvariantError
    is raised on mismatch (e.g. for a not left-invariant operator).
    """
    d = op.homogeneous_degree(basis.weights)
    if d is None:
        raise NotInvariantError("operator is not homogeneous")
    if d == 0:
        coeffs = {zero_index(basis.law.dim): op.terms.get(zero_index(basis.law.dim), Polynomial.zero()).constant_term}
    else:
        coeffs = {}
        for gamma in basis.indices_of_weight(d):
            c = op.value_at_identity(basis.q(gamma))
            if c:
                coeffs[gamma] = c
    recon = DiffOp.zero(op.dim)
    for gamma, c in coeffs.items():
        recon = recon + basis.x_op(gamma).scale(c)
    if recon != op:
        raise NotInvariantError("operator is not a combination of X^gamma")
    return coeffs


def conversion_polys(
    law: GroupLaw,
    alpha: MultiIndex,
    kind: str,
    basis: CanonicalBasis | None = None,
) -> dict[MultiIndex, Polynomial]:
    """Conversion tables between derivative families.

    kind "P":  X^alpha  = sum P_{alpha,beta} Xt^beta
    kind "Q":  Xt^alpha = sum Q_{alpha,beta} X^beta
    kind "R":  X^alpha  = sum R_{alpha,beta} d^beta
    kind "S":  d^alpha  = sum S_{alpha,beta} X^beta

    Each coefficient polynomial is homogeneous of weight [beta] - [alpha];
    the sums run over |beta| <= |alpha|, [beta] >= [alpha].
    """
    if basis is None:
        basis = CanonicalBasis(law, max_weight=max(1, multi_weight(alpha, law.weights)))
    n = law.dim
    alpha = tuple(alpha)
    if kind == "R":
        return {b: p for b, p in basis.x_op(alpha).terms.items()}
    if kind == "P":
        target = basis.x_op(alpha)
        basis_ops = basis.xt_op
    elif kind == "Q":
        target = basis.xt_op(alpha)
        basis_ops = basis.x_op
    elif kind == "S":
        target = DiffOp.partial_multi(n, alpha)
        basis_ops = basis.x_op
    else:
        raise ValueError(f"unknown conversion kind {kind!r}")

    a_iso = sum(alpha)
    a_w = multi_weight(alpha, law.weights)
    unknowns: list[tuple[MultiIndex, MultiIndex]] = []  # (beta, monomial mu)
    columns: list[DiffOp] = []
    betas: list[MultiIndex] = []
    for total in range(a_iso + 1):
        for beta in _indices_of_isotropic_length(n, total):
            bw = multi_weight(beta, law.weights)
            if bw < a_w:
                continue
            betas.append(beta)
    for beta in betas:
        op_b = basis_ops(beta)
        bw = multi_weight(beta, law.weights)
        for mu in monomials_of_weight(law.weights, bw - a_w):
            mono = Polynomial.const(1)
            for i, e in enumerate(mu):
                if e:
                    mono = mono * Polynomial.var("x", i, n) ** e
            unknowns.append((beta, mu))
            columns.append(op_b.mul_poly(mono))

    # Equate normal forms: rows indexed by (derivative index, coefficient
    # monomial) pairs appearing in the target or any candidate column.
    row_keys: list[tuple[MultiIndex, tuple]] = []
    row_pos: dict[tuple[MultiIndex, tuple], int] = {}

    def gather(op: DiffOp):
        for bidx, p in op.terms.items():
            for mono in p.terms:
                key = (bidx, mono)
                if key not in row_pos:
                    row_pos[key] = len(row_keys)
                    row_keys.append(key)

    gather(target)
    for col in columns:
        gather(col)
    nrows, ncols = len(row_keys), len(columns)
    A = [[Fraction(0)] * ncols for _ in range(nrows)]
    for cidx, col in enumerate(columns):
        for bidx, p in col.terms.items():
            for mono, c in p.terms.items():
                A[row_pos[(bidx, mono)]][cidx] = c
    b = [Fraction(0)] * nrows
    for bidx, p in target.terms.items():
        for mono, c in p.terms.items():
            b[row_pos[(bidx, mono)]] = c
    sol = _solve_with_free_zeros(A, b)
    table: dict[MultiIndex, Polynomial] = {}
    for value, (beta, mu) in zip(sol, unknowns):
        if not value:
            continue
        mono = Polynomial.const(value)
        for i, e in enumerate(mu):
            if e:
                mono = mono * Polynomial.var("x", i, n) ** e
        table[beta] = table.get(beta, Polynomial.zero()) + mono
    recon = DiffOp.zero(n)
    for beta, coeff in table.items():
        recon = recon + basis_ops(beta).mul_poly(coeff)
    if recon != target:
        raise BasisDeficientError(f"conversion table {kind!r} failed reconstruction")
    return table


def _solve_with_free_zeros(A, b):
    """Exact solve preferring zeros for free unknowns.

    The conversion systems are consistent with a unique solution on the
    support actually needed; spurious candidate columns (e.g. operators
    that cannot occur) may leave free variables, which are set to zero.
    """
    rows, cols = len(A), len(A[0]) if A else 0
    aug = [list(A[r]) + [b[r]] for r in range(rows)]
    pivots = []
    r0 = 0
    for col in range(cols):
        pivot = next((r for r in range(r0, rows) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[r0], aug[pivot] = aug[pivot], aug[r0]
        pv = aug[r0][col]
        aug[r0] = [v / pv for v in aug[r0]]
        for r in range(rows):
            if r != r0 and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[r0])]
        pivots.append((r0, col))
        r0 += 1
        if r0 == rows:
            break
    for r in range(r0, rows):
        if aug[r][cols] != 0:
            raise SingularSystemError("inconsistent conversion system")
    x = [Fraction(0)] * cols
    for r, col in pivots:
        x[col] = aug[r][cols]
    # Free columns stay zero; validity is re-checked by the caller's tests
    # through the operator identity itself.
    return x


def _indices_of_isotropic_length(n: int, total: int) -> list[MultiIndex]:
    out: list[MultiIndex] = []

    def rec(pos: int, remaining: int, prefix: tuple[int, ...]):
        if pos == n - 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(pos + 1, remaining - e, prefix + (e,))

    if n == 0:
        return [()] if total == 0 else []
    rec(0, total, ())
    return out


def taylor_poly(
    law: GroupLaw, basis: CanonicalBasis, f: Polynomial, M: int
) -> Polynomial:
    """Left Taylor polynomial sum_{[alpha]<=M} q_alpha(y) (X^alpha f)(x).

    For M at least the weighted degree of f this reproduces f(x y) exactly.
    """
    out = Polynomial.zero()
    for m in range(0, M + 1):
        for alpha in basis.indices_of_weight(m):
            xf = basis.x_op(alpha).apply(f)
            if xf.is_zero:
                continue
            out = out + basis.q(alpha).rename_block("x", "y") * xf
    return out


def q_product_coeffs(
    basis: CanonicalBasis, alpha: MultiIndex
) -> dict[tuple[MultiIndex, MultiIndex], Fraction]:
    """Table of q_alpha(xy) = sum c_{a1,a2} q_{a1}(x) q_{a2}(y).

    Coefficients come from duality in each block; the reconstruction is
    verified exactly against the substituted group law.
    """
    law = basis.law
    M = basis.weight(alpha)
    n = law.dim
    xs = symbolic_point("x", n)
    ys = symbolic_point("y", n)
    composed = basis.q(alpha).substitute(
        {"x": [R.substitute({"x": xs, "y": ys}) for R in law.R]}
    )
    out: dict[tuple[MultiIndex, MultiIndex], Fraction] = {}
    recon = Polynomial.zero()
    for m1 in range(0, M + 1):
        m2 = M - m1
        for a1 in basis.indices_of_weight(m1):
            partial = basis._apply_x_word(composed, a1, "x")
            if isinstance(partial, Polynomial) and partial.is_zero:
                continue
            at_e_x = partial.substitute(
                {"x": [Polynomial.const(0)] * n, "y": ys}
            ) if _uses(partial, "x") else partial
            for a2 in basis.indices_of_weight(m2):
                g = basis._apply_x_word(at_e_x, a2, "y")
                if g.is_zero:
                    continue
                zeros = {t: [0] * d for t, d in g.blocks.items()}
                c = g.evaluate(zeros)
                if c:
                    out[(a1, a2)] = c
                    recon = recon + (
                        basis.q(a1) * basis.q(a2).rename_block("x", "y")
                    ) * c
    if recon != composed:
        raise BasisDeficientError("q-product expansion residual is nonzero")
    return out


def _uses(p: Polynomial, tag: str) -> bool:
    return any(t == tag for mono in p.terms for t, _ in mono)
