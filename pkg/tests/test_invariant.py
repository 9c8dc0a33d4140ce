import math
import random
from fractions import Fraction as F

import pytest

from ggcalc.group import (
    abelian,
    bch_group_law,
    engel,
    free_nilpotent_2_3,
    heisenberg,
    multiply,
    symbolic_point,
)
from ggcalc.invariant import (
    CanonicalBasis,
    DiffOp,
    NotInvariantError,
    commutator,
    conversion_polys,
    duality_defects,
    left_vf,
    pbw_expand,
    q_product_coeffs,
    right_vf,
    taylor_poly,
)
from ggcalc.poly import Polynomial, ZERO_WEIGHT, homogeneous_weight, monomials_of_weight


@pytest.fixture(scope="module")
def h1():
    return bch_group_law(heisenberg(1))


@pytest.fixture(scope="module")
def h1_basis(h1):
    return CanonicalBasis(h1, max_weight=6)


def var(tag, i, n=3):
    return Polynomial.var(tag, i, n)


# -- vector fields ------------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2])
def test_left_vf_heisenberg_closed_form(n):
    law = bch_group_law(heisenberg(n))
    d = 2 * n + 1
    for j in range(n):
        expect = DiffOp(d, {
            tuple(1 if i == j else 0 for i in range(d)): Polynomial.const(1),
            tuple(1 if i == d - 1 else 0 for i in range(d)):
                Polynomial.var("x", n + j, d).scale(F(-1, 2)),
        })
        assert left_vf(law, j) == expect
        expect_up = DiffOp(d, {
            tuple(1 if i == n + j else 0 for i in range(d)): Polynomial.const(1),
            tuple(1 if i == d - 1 else 0 for i in range(d)):
                Polynomial.var("x", j, d).scale(F(1, 2)),
        })
        assert left_vf(law, n + j) == expect_up
    assert left_vf(law, d - 1) == DiffOp.partial(d, d - 1)


def test_left_vf_abelian():
    law = bch_group_law(abelian(3))
    for j in range(3):
        assert left_vf(law, j) == DiffOp.partial(3, j)


def test_right_vf_heisenberg(h1):
    xt1 = right_vf(h1, 0)
    expect = DiffOp(3, {
        (1, 0, 0): Polynomial.const(1),
        (0, 0, 1): var("x", 1).scale(F(1, 2)),
    })
    assert xt1 == expect


def test_vf_homogeneous_degree(h1):
    for j, v in enumerate(h1.weights):
        assert left_vf(h1, j).homogeneous_degree(h1.weights) == v


def test_left_invariance_literal():
    """X_j (p o L_a) = (X_j p) o L_a for symbolic left translation."""
    for factory in (lambda: heisenberg(1), engel):
        law = bch_group_law(factory())
        n = law.dim
        a = symbolic_point("a", n)
        x = symbolic_point("x", n)
        ax = multiply(law, a, x)
        for j in range(n):
            Xj = left_vf(law, j)
            for m in monomials_of_weight(law.weights, 3):
                p = Polynomial({"x": n}, {(("x", m),): F(1)})
                lhs = Xj.apply(p.substitute({"x": ax}))
                rhs = Xj.apply(p).substitute({"x": ax})
                assert lhs == rhs


def test_engel_vf_cross_checked_by_invariance():
    law = bch_group_law(engel())
    # the invariance identity above plus the normal form pin the fields;
    # spot-check the leading structure of X_1
    x1 = left_vf(law, 0)
    assert x1.terms[(1, 0, 0, 0)] == Polynomial.const(1)
    assert (0, 1, 0, 0) not in x1.terms


# -- operator algebra ----------------------------------------------------------------


def test_bracket_matches_structure_constant(h1):
    c = commutator(left_vf(h1, 0), left_vf(h1, 1))
    assert c.apply(var("x", 2)) == Polynomial.const(1)
    assert c == left_vf(h1, 2)


def test_partials_commute(h1):
    a = DiffOp.partial(3, 0)
    b = DiffOp.partial(3, 1)
    assert a.compose(b) == b.compose(a)


def test_ordered_word_vs_reversed(h1, h1_basis):
    x12 = h1_basis.x_op((1, 1, 0))
    rev = left_vf(h1, 1).compose(left_vf(h1, 0))
    assert x12 - rev == h1_basis.x_op((0, 0, 1))


def test_apply_leibniz(h1):
    X1 = left_vf(h1, 0)
    p = var("x", 0) * var("x", 2)
    q = var("x", 1)
    assert X1.apply(p * q) == X1.apply(p) * q + p * X1.apply(q)


# -- canonical polynomials -----------------------------------------------------------


def test_canonical_q_heisenberg_closed_forms(h1_basis):
    b = h1_basis
    assert b.q((1, 0, 0)) == var("x", 0)
    assert b.q((0, 1, 0)) == var("x", 1)
    assert b.q((1, 1, 0)) == var("x", 0) * var("x", 1)
    assert b.q((2, 0, 0)) == (var("x", 0) ** 2).scale(F(1, 2))
    assert b.q((0, 0, 1)) == var("x", 2) - (var("x", 0) * var("x", 1)).scale(F(1, 2))


def test_canonical_q_heisenberg2():
    law = bch_group_law(heisenberg(2))
    basis = CanonicalBasis(law, max_weight=2)
    d = 5
    for j in range(4):
        e = tuple(1 if i == j else 0 for i in range(d))
        assert basis.q(e) == Polynomial.var("x", j, d)
    for j in range(4):
        for k in range(j + 1, 4):
            a = tuple((1 if i == j else 0) + (1 if i == k else 0) for i in range(d))
            assert basis.q(a) == Polynomial.var("x", j, d) * Polynomial.var("x", k, d)
    center = (0, 0, 0, 0, 1)
    expect = Polynomial.var("x", 4, d)
    for j in range(2):
        expect = expect - (
            Polynomial.var("x", j, d) * Polynomial.var("x", 2 + j, d)
        ).scale(F(1, 2))
    assert basis.q(center) == expect


def test_canonical_q_abelian_closed_form():
    law = bch_group_law(abelian(2))
    basis = CanonicalBasis(law, max_weight=5)
    for m in range(6):
        for alpha in basis.indices_of_weight(m):
            fact = math.factorial(alpha[0]) * math.factorial(alpha[1])
            expect = (
                Polynomial.var("x", 0, 2) ** alpha[0]
                * Polynomial.var("x", 1, 2) ** alpha[1]
            ).scale(F(1, fact))
            assert basis.q(alpha) == expect


def test_canonical_q_engel_weight3_by_duality():
    law = bch_group_law(engel())
    basis = CanonicalBasis(law, max_weight=3)
    alpha = (0, 0, 0, 1)
    q = basis.q(alpha)
    assert homogeneous_weight(q, law.weights) == 3
    for beta in basis.indices_of_weight(3):
        val = basis.x_op(beta).value_at_identity(q)
        assert val == (1 if beta == alpha else 0)


@pytest.mark.parametrize(
    "factory,cap",
    [
        (lambda: heisenberg(1), 6),
        (lambda: abelian(2), 6),
        (engel, 6),
        (free_nilpotent_2_3, 6),
        (lambda: heisenberg(2), 6),
    ],
)
def test_duality_exhaustive(factory, cap):
    law = bch_group_law(factory())
    basis = CanonicalBasis(law, max_weight=cap)
    assert duality_defects(basis, cap) == []


def test_degree_bookkeeping(h1_basis):
    b = h1_basis
    for m in range(1, 5):
        for gamma in b.indices_of_weight(m):
            for a in range(1, m + 1):
                for alpha in b.indices_of_weight(a):
                    out = b.x_op(alpha).apply(b.q(gamma))
                    w = homogeneous_weight(out, b.weights)
                    assert w is ZERO_WEIGHT or w == m - a


# -- expansion of invariant operators -------------------------------------------------


def test_pbw_reversed_word(h1, h1_basis):
    op = left_vf(h1, 1).compose(left_vf(h1, 0))
    coeffs = pbw_expand(op, h1_basis)
    assert coeffs == {(1, 1, 0): F(1), (0, 0, 1): F(-1)}


def test_pbw_single_field(h1, h1_basis):
    for j in range(3):
        coeffs = pbw_expand(left_vf(h1, j), h1_basis)
        e = tuple(1 if i == j else 0 for i in range(3))
        assert coeffs == {e: F(1)}


def test_pbw_square(h1, h1_basis):
    op = left_vf(h1, 0).compose(left_vf(h1, 0))
    assert pbw_expand(op, h1_basis) == {(2, 0, 0): F(1)}


def test_pbw_rejects_non_invariant(h1, h1_basis):
    bad = DiffOp(3, {(1, 0, 0): Polynomial.var("x", 0, 3)})
    with pytest.raises(NotInvariantError):
        pbw_expand(bad, h1_basis)


# -- conversion tables ----------------------------------------------------------------


def test_conversion_abelian_identity():
    law = bch_group_law(abelian(2))
    basis = CanonicalBasis(law, 3)
    for kind in "PQRS":
        table = conversion_polys(law, (1, 1), kind, basis)
        assert table == {(1, 1): Polynomial.const(1)}


def test_conversion_q_first_field(h1, h1_basis):
    table = conversion_polys(h1, (1, 0, 0), "Q", h1_basis)
    assert table == {
        (1, 0, 0): Polynomial.const(1),
        (0, 0, 1): Polynomial.var("x", 1, 3),
    }


def _apply_table(law, basis, table, ops, m):
    """sum coeff * ops(beta) applied to the monomial m."""
    p = Polynomial({"x": law.dim}, {(("x", m),): F(1)})
    out = Polynomial.zero()
    for beta, coeff in table.items():
        out = out + coeff * ops(beta).apply(p)
    return out


@pytest.mark.parametrize("kind", ["P", "Q", "R", "S"])
@pytest.mark.parametrize("factory", [lambda: heisenberg(1), engel])
def test_conversion_identities_on_monomials(kind, factory):
    law = bch_group_law(factory())
    basis = CanonicalBasis(law, 6)
    n = law.dim
    alphas = [a for w in (1, 2) for a in basis.indices_of_weight(w) if sum(a) <= 2]
    target_op = {"P": basis.x_op, "Q": basis.xt_op, "R": basis.x_op,
                 "S": lambda a: DiffOp.partial_multi(n, a)}[kind]
    rhs_ops = {"P": basis.xt_op, "Q": basis.x_op,
               "R": lambda a: DiffOp.partial_multi(n, a), "S": basis.x_op}[kind]
    for alpha in alphas:
        table = conversion_polys(law, alpha, kind, basis)
        for w in range(0, 7):
            for m in monomials_of_weight(law.weights, w):
                p = Polynomial({"x": n}, {(("x", m),): F(1)})
                lhs = target_op(alpha).apply(p)
                rhs = Polynomial.zero()
                for beta, coeff in table.items():
                    rhs = rhs + coeff * rhs_ops(beta).apply(p)
                assert lhs == rhs, (kind, alpha, m)


def test_conversion_homogeneity(h1, h1_basis):
    for kind in "PQS":
        for alpha in [(1, 0, 0), (0, 0, 1)]:
            table = conversion_polys(h1, alpha, kind, h1_basis)
            aw = h1_basis.weight(alpha)
            for beta, coeff in table.items():
                w = homogeneous_weight(coeff, h1.weights)
                assert w is ZERO_WEIGHT or w == h1_basis.weight(beta) - aw
                assert sum(beta) <= sum(alpha)
                assert h1_basis.weight(beta) >= aw


# -- Taylor polynomials ----------------------------------------------------------------


def test_taylor_reproduces_group_law(h1, h1_basis):
    f = var("x", 2)
    t = taylor_poly(h1, h1_basis, f, 2)
    assert t == h1.R[2]


def test_taylor_constant(h1, h1_basis):
    f = Polynomial.const(F(5, 3))
    assert taylor_poly(h1, h1_basis, f, 4) == f


def test_taylor_exactness_beyond_degree(h1, h1_basis):
    n = 3
    xs = symbolic_point("x", n)
    ys = symbolic_point("y", n)
    xy = multiply(h1, xs, ys)
    f = var("x", 0) * var("x", 2) + var("x", 1) ** 2
    w = 3  # weighted degree of f
    t = taylor_poly(h1, h1_basis, f, w)
    assert t == f.substitute({"x": xy})


def test_taylor_duality_at_identity(h1, h1_basis):
    alpha = (0, 0, 1)
    f = h1_basis.q(alpha)
    t = taylor_poly(h1, h1_basis, f, 2)
    at_e = t.substitute({"x": [Polynomial.const(0)] * 3,
                         "y": symbolic_point("y", 3)})
    assert at_e == f.rename_block("x", "y")


# -- products of canonical polynomials ---------------------------------------------------


def test_q_product_abelian_binomial():
    law = bch_group_law(abelian(2))
    basis = CanonicalBasis(law, 4)
    alpha = (2, 1)
    table = q_product_coeffs(basis, alpha)
    expect = {}
    for a1 in range(3):
        for b1 in range(2):
            expect[((a1, b1), (2 - a1, 1 - b1))] = F(1)
    assert table == expect


def test_q_product_center(h1, h1_basis):
    table = q_product_coeffs(h1_basis, (0, 0, 1))
    assert table == {
        ((0, 0, 0), (0, 0, 1)): F(1),
        ((0, 0, 1), (0, 0, 0)): F(1),
        ((0, 1, 0), (1, 0, 0)): F(-1),
    }


def test_q_product_weight_one(h1, h1_basis):
    for alpha in [(1, 0, 0), (0, 1, 0)]:
        table = q_product_coeffs(h1_basis, alpha)
        zero = (0, 0, 0)
        assert table == {(alpha, zero): F(1), (zero, alpha): F(1)}
