"""Floating-point oracles on periodic grids.

Everything here is a cross-check of the exact symbolic layer by dense
linear algebra: tau-quantization of Euclidean symbols sampled on an
N-point periodic grid, truncation-exactness of the composition expansion
on polynomial symbols (which terminates), the Schrodinger representation
of the 3-dimensional Heisenberg group with its sub-Laplacian, and the
metaplectic intertwining operators.

Grid conventions: N a power of two, points x_a = -L/2 + a L/N, dual
frequencies xi_k = 2 pi (k - N/2) / L.  Quadrature weights are folded into
operator matrices, so the adjoint of a grid operator is the plain
conjugate transpose.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .expansion import Expansion, Term, compose_expansion
from .group import abelian, bch_group_law
from .invariant import CanonicalBasis
from .taucalc import QuantizingFunction, builtin_tau


class NeedsPolynomialError(ValueError):
    """Operation requires a symbol with an exact polynomial form."""


class ShiftOutOfRangeError(ValueError):
    """Requested translation exceeds the trustworthy grid range."""


class GridAdvisory(UserWarning):
    """Non-fatal notice that grid resolution may be insufficient."""


# -- exact Gaussian-rational scalars ----------------------------------------------


@dataclass(frozen=True)
class CF:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __add__(self, other: "CF") -> "CF":
        return CF(self.re + other.re, self.im + other.im)

    def __mul__(self, other) -> "CF":
        if isinstance(other, CF):
            return CF(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        f = Fraction(other)
        return CF(self.re * f, self.im * f)

    __rmul__ = __mul__

    def __neg__(self) -> "CF":
        return CF(-self.re, -self.im)

    def conj(self) -> "CF":
        return CF(self.re, -self.im)

    def times_i(self, k: int = 1) -> "CF":
        out = self
        for _ in range(k % 4):
            out = CF(-out.im, out.re)
        return out

    def __bool__(self) -> bool:
        return bool(self.re or self.im)

    def to_complex(self) -> complex:
        return float(self.re) + 1j * float(self.im)


# -- Euclidean symbols --------------------------------------------------------------

PolyForm = Mapping[tuple[int, int], CF]  # (x-degree, xi-degree) -> coefficient


@dataclass
class EuclidSymbol:
    """Symbol on R x R^, optionally with an exact polynomial form."""

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    poly: dict[tuple[int, int], CF] | None = None

    def __post_init__(self):
        if self.poly is not None:
            self.poly = {k: c for k, c in self.poly.items() if c}
            xs = np.linspace(-1.3, 1.7, 5)
            xis = np.linspace(-2.1, 1.1, 5)
            ref = _eval_poly(self.poly, xs, xis)
            got = np.asarray(self.evaluator(xs, xis), dtype=complex)
            if not np.allclose(ref, got, atol=1e-12, rtol=1e-12):
                raise ValueError("polynomial form disagrees with evaluator")

    @staticmethod
    def from_poly(poly: Mapping[tuple[int, int], CF | complex | int | Fraction]) -> "EuclidSymbol":
        exact: dict[tuple[int, int], CF] = {}
        for k, c in poly.items():
            if isinstance(c, CF):
                v = c
            elif isinstance(c, complex):
                v = CF(Fraction(c.real), Fraction(c.imag))
            else:
                v = CF(Fraction(c))
            if v:
                exact[tuple(k)] = v
        return EuclidSymbol(lambda x, xi: _eval_poly(exact, x, xi), exact)

    def conjugate(self) -> "EuclidSymbol":
        if self.poly is not None:
            return EuclidSymbol.from_poly({k: c.conj() for k, c in self.poly.items()})
        ev = self.evaluator
        return EuclidSymbol(lambda x, xi: np.conj(ev(x, xi)))

    def degrees(self) -> tuple[int, int]:
        if self.poly is None:
            raise NeedsPolynomialError("symbol lacks a polynomial form")
        if not self.poly:
            return (0, 0)
        return (
            max(k[0] for k in self.poly),
            max(k[1] for k in self.poly),
        )


def _eval_poly(poly: Mapping[tuple[int, int], CF], x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    out = np.zeros(np.broadcast(x, xi).shape, dtype=complex)
    for (a, b), c in poly.items():
        out = out + c.to_complex() * np.power(x, a) * np.power(xi, b)
    return out


def symbol_product(a: EuclidSymbol, b: EuclidSymbol) -> EuclidSymbol:
    if a.poly is None or b.poly is None:
        raise NeedsPolynomialError("product needs polynomial forms")
    out: dict[tuple[int, int], CF] = {}
    for (a1, b1), c1 in a.poly.items():
        for (a2, b2), c2 in b.poly.items():
            key = (a1 + a2, b1 + b2)
            out[key] = out.get(key, CF()) + c1 * c2
    return EuclidSymbol.from_poly(out)


def delta_x_operators(sym: EuclidSymbol, alpha: int, beta: int) -> EuclidSymbol:
    """Apply the difference and derivative operators D^alpha X^beta exactly.

    On the line the difference operator of order a acts on polynomial
    symbols as (-i)^a / a! d^a/dxi^a (the transform of multiplication of
    the kernel by the reflected canonical polynomial (-y)^a / a!), and
    X^beta acts as d^beta/dx^beta.
    """
    if sym.poly is None:
        raise NeedsPolynomialError("difference operators need a polynomial form")
    out: dict[tuple[int, int], CF] = {}
    for (a, b), c in sym.poly.items():
        if a < beta or b < alpha:
            continue
        mult = Fraction(1)
        for t in range(beta):
            mult *= a - t
        for t in range(alpha):
            mult *= b - t
        mult /= _factorial(alpha)
        key = (a - beta, b - alpha)
        contrib = (c * mult).times_i(-alpha % 4)
        out[key] = out.get(key, CF()) + contrib
    return EuclidSymbol.from_poly(out)


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


# -- grids and operators ---------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    """Periodic grid with symmetric dual frequencies."""

    n_points: int
    period: float

    def __post_init__(self):
        if self.n_points & (self.n_points - 1):
            raise ValueError("grid size must be a power of two")

    @property
    def spacing(self) -> float:
        return self.period / self.n_points

    @property
    def points(self) -> np.ndarray:
        return -self.period / 2 + self.spacing * np.arange(self.n_points)

    @property
    def frequencies(self) -> np.ndarray:
        n = self.n_points
        return 2 * np.pi / self.period * (np.arange(n) - n // 2)


@dataclass
class GridOperator:
    """Dense operator on sampled functions; quadrature folded in."""

    matrix: np.ndarray
    grid: Grid

    def __post_init__(self):
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("non-finite operator entries")

    def adjoint(self) -> "GridOperator":
        return GridOperator(self.matrix.conj().T, self.grid)

    def __matmul__(self, other: "GridOperator") -> "GridOperator":
        return GridOperator(self.matrix @ other.matrix, self.grid)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ v


def relative_distance(a: GridOperator, b: GridOperator) -> float:
    """Frobenius distance relative to the larger operand."""
    scale = max(np.linalg.norm(a.matrix), np.linalg.norm(b.matrix), 1e-300)
    return float(np.linalg.norm(a.matrix - b.matrix) / scale)


def quantize_tau_line(sym: EuclidSymbol, t: Fraction | float, grid: Grid) -> GridOperator:
    """Matrix of the t-quantization of a symbol on the periodic line.

    Kernel K(x_a, y_b) = (1/L) sum_k e^{i (x_a - y_b) xi_k}
    sigma(x_a - t (x_a - y_b), xi_k); the trapezoidal weight h is folded
    into the matrix.  t = 0 is the Kohn-Nirenberg operator, t = 1/2 the
    symmetric one.
    """
    tf = float(t)
    x = grid.points
    if sym.poly is not None:
        deg_x = sym.degrees()[0]
        if deg_x and 2 * np.pi * deg_x / grid.period > np.pi / grid.spacing / 2:
            warnings.warn(
                "symbol bandwidth may exceed half the grid Nyquist range",
                GridAdvisory,
            )
    diff = x[:, None] - x[None, :]
    base = x[:, None] - tf * diff
    out = np.zeros((grid.n_points, grid.n_points), dtype=complex)
    for xi in grid.frequencies:
        out += np.exp(1j * diff * xi) * np.asarray(sym.evaluator(base, xi), dtype=complex)
    out *= grid.spacing / grid.period
    return GridOperator(out, grid)


def adjoint_check(sym: EuclidSymbol, t: Fraction | float, grid: Grid) -> float:
    """Residual of Op^t(sigma)^* against Op^t(conj sigma)."""
    op = quantize_tau_line(sym, t, grid)
    conj_op = quantize_tau_line(sym.conjugate(), t, grid)
    return relative_distance(op.adjoint(), conj_op)


# -- composition exactness ------------------------------------------------------------


def bind_expansion(
    expansion: Expansion, s1: EuclidSymbol, s2: EuclidSymbol, max_order: int
) -> EuclidSymbol:
    """Evaluate formal expansion terms on concrete polynomial symbols."""
    if len(expansion.weights) != 1:
        raise ValueError("binding is implemented for expansions on the line")
    total: dict[tuple[int, int], CF] = {}
    for j in sorted(expansion.orders):
        if j > max_order:
            continue
        for term in expansion.orders[j]:
            bound: EuclidSymbol | None = None
            for f in term.factors:
                base = s1 if f.sym == "s1" else s2
                cur = delta_x_operators(base, sum(f.delta), sum(f.deriv))
                bound = cur if bound is None else symbol_product(bound, cur)
            assert bound is not None and bound.poly is not None
            for key, c in bound.poly.items():
                contrib = (c * term.coeff).times_i(term.i_power)
                total[key] = total.get(key, CF()) + contrib
    return EuclidSymbol.from_poly(total)


def moyal_exactness_check(
    s1: EuclidSymbol,
    s2: EuclidSymbol,
    grid: Grid,
    max_order: int,
    expansion: Expansion | None = None,
) -> float:
    """Composition-expansion residual for the symmetric quantization.

    Builds Op^{1/2}(s1) Op^{1/2}(s2) densely and compares it against
    Op^{1/2} of the expansion truncated at max_order; for polynomial
    symbols the expansion terminates, so at sufficient order the residual
    is pure discretization noise.

    Polynomial symbols are not periodic, so the raw matrices disagree near
    the period seam however large the order; the comparison is therefore
    compressed onto Gaussian states confined to the central half-period
    (the same confinement the representation checks use), where the
    periodic model represents the line faithfully:

        residual = || (A B - C) V ||_F / || A B V ||_F

    with V the matrix of test states.  Any wrong term in the expansion
    shows up at O(1) in this metric, while the seam artifact is suppressed
    to machine precision.
    """
    if expansion is None:
        expansion = line_compose_expansion(max_order)
    a = quantize_tau_line(s1, Fraction(1, 2), grid)
    b = quantize_tau_line(s2, Fraction(1, 2), grid)
    product = a.matrix @ b.matrix
    bound = bind_expansion(expansion, s1, s2, max_order)
    approx = quantize_tau_line(bound, Fraction(1, 2), grid).matrix
    states = np.stack(
        gaussian_vectors(grid, centers=(0.0, 1.0, -1.0, 2.0, -2.0, 3.0)), axis=1
    )
    num = np.linalg.norm((product - approx) @ states)
    den = max(np.linalg.norm(product @ states), 1e-300)
    return float(num / den)


_LINE_EXPANSIONS: dict[int, Expansion] = {}


def line_compose_expansion(max_order: int) -> Expansion:
    """Composition expansion for the symmetric quantization on the line."""
    if max_order not in _LINE_EXPANSIONS:
        law = bch_group_law(abelian(1))
        basis = CanonicalBasis(law, max_order)
        tau = builtin_tau(law, "half_log")
        _LINE_EXPANSIONS[max_order] = compose_expansion(tau, max_order, basis)
    return _LINE_EXPANSIONS[max_order]


def terminating_order(s1: EuclidSymbol, s2: EuclidSymbol) -> int:
    """Largest order with a non-vanishing expansion term for these symbols."""
    dx1, dxi1 = s1.degrees()
    dx2, dxi2 = s2.degrees()
    cap = dx1 + dx2 + dxi1 + dxi2
    expansion = line_compose_expansion(cap)
    last = 0
    for j in sorted(expansion.orders):
        for term in expansion.orders[j]:
            bound = None
            for f in term.factors:
                base = s1 if f.sym == "s1" else s2
                cur = delta_x_operators(base, sum(f.delta), sum(f.deriv))
                bound = cur if bound is None else symbol_product(bound, cur)
            if bound is not None and bound.poly:
                last = max(last, j)
                break
    return last


# -- Schrodinger representation of the 3-dimensional Heisenberg group -------------------


def _fourier_shift(grid: Grid, shift: float) -> np.ndarray:
    """Matrix of h(u) -> h(u + shift) via a spectral phase ramp."""
    n = grid.n_points
    f = np.fft.fft(np.eye(n), axis=0)
    freqs = 2 * np.pi * np.fft.fftfreq(n, d=grid.spacing)
    phase = np.exp(1j * freqs * shift)
    return np.fft.ifft(phase[:, None] * f, axis=0)


def schrodinger_rep(lam: float, x: Sequence[float], grid: Grid) -> GridOperator:
    """Matrix of the Schrodinger representation at a point of H_1.

    (pi_lam(x) h)(u) = e^{i lam (x3 + x1 x2 / 2)} e^{i sqrt(lam) x2 u}
    h(u + sqrt(|lam|) x1); fractional translations use Fourier phase
    ramps, so the matrix is unitary up to roundoff.  The principal square
    root is used, which pins lam > 0 for the phase factor.
    """
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    if lam < 0:
        # The square-root branch for negative parameters is not pinned by
        # the realization used here; results are unverified.
        warnings.warn("negative lambda uses the principal branch, unverified", GridAdvisory)
    x1, x2, x3 = (float(v) for v in x)
    root = np.sqrt(complex(lam))
    shift = np.sqrt(abs(lam)) * x1
    if abs(shift) > grid.period / 4:
        raise ShiftOutOfRangeError(
            f"shift {shift:.3g} exceeds a quarter period {grid.period / 4:.3g}"
        )
    u = grid.points
    phase = np.exp(1j * lam * (x3 + 0.5 * x1 * x2)) * np.exp(1j * root * x2 * u)
    return GridOperator(phase[:, None] * _fourier_shift(grid, shift), grid)


def gaussian_vectors(grid: Grid, centers: Sequence[float] = (0.0, 1.0, -2.0)) -> list[np.ndarray]:
    u = grid.points
    out = []
    for c in centers:
        v = np.exp(-((u - c) ** 2) / 2).astype(complex)
        out.append(v / np.linalg.norm(v))
    return out


def rep_homomorphism_residual(
    lam: float, grid: Grid, pairs: Sequence[tuple[Sequence[float], Sequence[float]]]
) -> float:
    """max over pairs of || pi(x) pi(y) v - pi(x y) v || on Gaussian vectors."""
    worst = 0.0
    vs = gaussian_vectors(grid)
    for x, y in pairs:
        px = schrodinger_rep(lam, x, grid)
        py = schrodinger_rep(lam, y, grid)
        xy = (
            x[0] + y[0],
            x[1] + y[1],
            x[2] + y[2] + 0.5 * (x[0] * y[1] - x[1] * y[0]),
        )
        pxy = schrodinger_rep(lam, xy, grid)
        for v in vs:
            lhs = px.apply(py.apply(v))
            rhs = pxy.apply(v)
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def central_character_residual(lam: float, t: float, grid: Grid) -> float:
    """|| pi((0,0,t)) - e^{i lam t} I || (exact central phase)."""
    op = schrodinger_rep(lam, (0.0, 0.0, t), grid)
    target = np.exp(1j * lam * t) * np.eye(grid.n_points)
    return float(np.linalg.norm(op.matrix - target) / np.linalg.norm(target))


def _rep_generator(lam: float, grid: Grid, direction: int, step: float) -> np.ndarray:
    """Fourth-order central difference of t -> pi(exp(t X_j))."""
    def at(t: float) -> np.ndarray:
        coords = [0.0, 0.0, 0.0]
        coords[direction] = t
        return schrodinger_rep(lam, coords, grid).matrix

    return (
        -at(2 * step) + 8 * at(step) - 8 * at(-step) + at(-2 * step)
    ) / (12 * step)


def sublaplacian_symbol_check(
    lam: float, grid: Grid, step: float = 1e-3
) -> float:
    """Residual of pi(X_1)^2 + pi(X_2)^2 against |lam| (D^2 - U^2).

    The generators are built by finite differencing the representation, so
    the check is truncation-limited; it is evaluated on Gaussian vectors
    concentrated in the central half-period.
    """
    g1 = _rep_generator(lam, grid, 0, step)
    g2 = _rep_generator(lam, grid, 1, step)
    lhs = g1 @ g1 + g2 @ g2
    n = grid.n_points
    freqs = 2 * np.pi * np.fft.fftfreq(n, d=grid.spacing)
    f = np.fft.fft(np.eye(n), axis=0)
    d_mat = np.fft.ifft((1j * freqs)[:, None] * f, axis=0)
    u_mat = np.diag(grid.points.astype(complex))
    rhs = abs(lam) * (d_mat @ d_mat - u_mat @ u_mat)
    worst = 0.0
    for v in gaussian_vectors(grid):
        num = np.linalg.norm(lhs @ v - rhs @ v)
        den = np.linalg.norm(rhs @ v)
        worst = max(worst, float(num / den))
    return worst


def central_generator_residual(lam: float, grid: Grid, step: float = 1e-3) -> float:
    """Residual of the differentiated central direction against i lam I."""
    g3 = _rep_generator(lam, grid, 2, step)
    target = 1j * lam * np.eye(grid.n_points)
    return float(np.linalg.norm(g3 - target) / abs(lam) / np.sqrt(grid.n_points))


# -- metaplectic operators ----------------------------------------------------------


def _resample_matrix(grid: Grid, scale: float) -> np.ndarray:
    """Trigonometric interpolation h -> h(u / scale) on the grid."""
    n = grid.n_points
    f = np.fft.fft(np.eye(n), axis=0)
    freqs = 2 * np.pi * np.fft.fftfreq(n, d=grid.spacing)
    origin = grid.points[0]
    targets = grid.points / scale - origin
    basis = np.exp(1j * np.outer(targets, freqs)) / n
    return basis @ f


def metaplectic_operator(lam: float, kind: str, grid: Grid, param: float = 1.0) -> GridOperator:
    """Unitary for one symplectic generator at parameter lam > 0.

    kind "dilation": h(u) -> a^{-1/2} h(u / a)            (S = diag(a, 1/a))
    kind "chirp":    h(u) -> e^{-i lam c u^2 / 2} h(u)    (S lower unipotent)
    kind "J":        h(u) -> (2 pi)^{-1/2} (F h)(-sqrt(lam) u)
    """
    if lam <= 0:
        raise ValueError("metaplectic oracle implemented for lam > 0")
    u = grid.points
    if kind == "dilation":
        a = float(param)
        if a == 0:
            raise ValueError("dilation parameter must be nonzero")
        if not 0.25 <= abs(a) <= 4.0:
            warnings.warn("resampling loss for dilation far from 1", GridAdvisory)
        mat = _resample_matrix(grid, a) * complex(a) ** -0.5
        return GridOperator(mat, grid)
    if kind == "chirp":
        c = float(param)
        return GridOperator(np.diag(np.exp(-0.5j * lam * c * u * u)), grid)
    if kind == "J":
        root = np.sqrt(lam)
        mat = (
            grid.spacing
            / np.sqrt(2 * np.pi)
            * np.exp(-1j * np.outer(-root * u, u))
        )
        return GridOperator(mat, grid)
    raise ValueError(f"unknown metaplectic kind {kind!r}")


def _extended_symplectic(kind: str, param: float, x: Sequence[float]) -> tuple[float, float, float]:
    x1, x2, x3 = x
    if kind == "dilation":
        return (param * x1, x2 / param, x3)
    if kind == "chirp":
        return (x1, param * x1 + x2, x3)
    if kind == "J":
        return (x2, -x1, x3)
    raise ValueError(kind)


def metaplectic_check(
    lam: float,
    kind: str,
    grid: Grid,
    param: float = 1.0,
    sample_points: Sequence[Sequence[float]] | None = None,
) -> float:
    """Intertwining residual of pi(Sx) eta = eta pi(x) on Gaussian states.

    The identity is checked in multiplicative form (both sides applied to
    test vectors, normalized by || eta v ||); inverting eta on the grid is
    ill-conditioned because resampling and quadrature transforms lose the
    aliased part of the spectrum, while the multiplicative form is exactly
    equivalent in the continuum.
    """
    eta = metaplectic_operator(lam, kind, grid, param)
    if sample_points is None:
        sample_points = [
            (0.4, 0.0, 0.0),
            (0.0, 0.7, 0.0),
            (0.3, -0.5, 0.2),
            (-0.6, 0.25, -0.1),
        ]
    # The Fourier-integral and resampling quantizations of eta are only
    # faithful below the grid Nyquist frequency and inside the fundamental
    # period; outside that window rows hold folded spectral images while
    # the true outputs on the test states vanish.  The residual is taken
    # on the trustworthy window.
    u = grid.points
    w_max = 0.75 * min(np.pi / grid.spacing, grid.period / 4)
    window = (np.abs(u) <= w_max).astype(float)
    worst = 0.0
    vs = gaussian_vectors(grid, centers=(0.0, 0.8, -1.2))
    for x in sample_points:
        lhs = schrodinger_rep(lam, _extended_symplectic(kind, param, x), grid).matrix @ eta.matrix
        rhs = eta.matrix @ schrodinger_rep(lam, x, grid).matrix
        for v in vs:
            scale = max(float(np.linalg.norm(window * (eta.matrix @ v))), 1e-300)
            worst = max(worst, float(np.linalg.norm(window * ((lhs - rhs) @ v))) / scale)
    return worst


# -- residual report --------------------------------------------------------------------


def residual_report(
    check: str, grid: Grid, params: Mapping, residual: float, tolerance: float
) -> dict:
    return {
        "check": check,
        "grid": grid.n_points,
        "params": dict(params),
        "residual": float(residual),
        "tolerance": float(tolerance),
        "pass": bool(residual <= tolerance),
    }
