import random
from fractions import Fraction as F

import pytest

from ggcalc.poly import (
    NON_HOMOGENEOUS,
    ParseError,
    Polynomial,
    UnboundVariableError,
    ZERO_WEIGHT,
    homogeneous_weight,
    monomials_of_weight,
    parse_poly,
    render_poly,
)


def x(i, dim=3):
    return Polynomial.var("x", i, dim)


def y(i, dim=3):
    return Polynomial.var("y", i, dim)


def test_product_of_conjugates():
    p = (x(0) + x(1)) * (x(0) - x(1))
    assert p == x(0) * x(0) - x(1) * x(1)


def test_scale_exact():
    p = (x(0) * x(1)).scale(F(1, 24))
    assert render_poly(p) == "1/24 x1 x2"


def test_square_expansion():
    p = (x(0) + y(0)) ** 2
    assert p == x(0) ** 2 + x(0) * y(0) * 2 + y(0) ** 2


def test_substitute_shift():
    # third coordinate of the averaged-exponential map on the 3-dim group
    p = x(2)
    target = x(2).scale(F(1, 2)) + (x(0) * x(1)).scale(F(1, 24))
    bound = p.substitute({"x": [x(0), x(1), target]})
    assert bound == target


def test_substitute_identity():
    p = x(0) * x(1) + x(2).scale(F(2, 3))
    assert p.substitute({"x": [x(0), x(1), x(2)]}) == p


def test_substitute_two_block_product():
    # abelian part of z^{-1} y on the 3-dim Heisenberg group
    z1 = Polynomial.var("z", 0, 3)
    z2 = Polynomial.var("z", 1, 3)
    y2 = Polynomial.var("y", 1, 3)
    p = x(0) * x(1)
    got = p.substitute({"x": [z1, y2 - z2, Polynomial.zero()]})
    assert got == z1 * y2 - z1 * z2


def test_substitute_unbound_raises():
    with pytest.raises(UnboundVariableError):
        x(0).substitute({"y": [y(0), y(1), y(2)]})


def test_substitute_composition_law():
    rng = random.Random(11)

    def rand_poly(tags):
        p = Polynomial.zero()
        for _ in range(4):
            term = Polynomial.const(F(rng.randint(-4, 4), rng.randint(1, 3)))
            for tag in tags:
                term = term * Polynomial.var(tag, rng.randrange(2), 2) ** rng.randrange(2)
            p = p + term
        return p

    for _ in range(10):
        p = rand_poly(["x"])
        s1 = [rand_poly(["y"]) for _ in range(2)]
        s2 = [rand_poly(["z"]) for _ in range(2)]
        via_two_steps = p.substitute({"x": s1}).substitute({"y": s2})
        composed = [q.substitute({"y": s2}) for q in s1]
        assert via_two_steps == p.substitute({"x": composed})


def test_ring_axioms_random():
    rng = random.Random(5)

    def rand_poly():
        p = Polynomial.zero()
        for _ in range(5):
            c = F(rng.randint(-5, 5), rng.randint(1, 4))
            e = tuple(rng.randrange(3) for _ in range(3))
            p = p + Polynomial({"x": 3}, {(("x", e),) if any(e) else (): c})
        return p

    for _ in range(15):
        a, b, c = rand_poly(), rand_poly(), rand_poly()
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a


def test_homogeneous_weight():
    w = (1, 1, 2)
    assert homogeneous_weight(x(2), w) == 2
    assert homogeneous_weight(x(0) * x(1), w) == 2
    assert homogeneous_weight(x(0) + x(2), w) is NON_HOMOGENEOUS
    assert homogeneous_weight(Polynomial.zero(), w) is ZERO_WEIGHT


def test_homogeneous_weight_joint_blocks():
    w = (1, 1, 2)
    p = x(0) * y(1) - x(1) * y(0)
    assert homogeneous_weight(p, w) == 2


def test_monomials_of_weight_examples():
    assert monomials_of_weight((1, 1, 2), 2) == [(2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 0, 1)]
    assert monomials_of_weight((1, 1, 2), 0) == [(0, 0, 0)]
    engel = monomials_of_weight((1, 1, 2, 3), 3)
    assert len(engel) == 7
    assert (0, 0, 0, 1) in engel


@pytest.mark.parametrize("weights,target", [((1, 1, 2), 4), ((1, 2), 5), ((1, 1, 2, 3), 6)])
def test_monomials_of_weight_matches_bruteforce(weights, target):
    brute = set()
    ranges = [range(target // v + 1) for v in weights]

    def rec(pos, acc):
        if pos == len(weights):
            if sum(v * e for v, e in zip(weights, acc)) == target:
                brute.add(tuple(acc))
            return
        for e in ranges[pos]:
            rec(pos + 1, acc + [e])

    rec(0, [])
    got = monomials_of_weight(weights, target)
    assert set(got) == brute
    assert len(got) == len(set(got))


def test_weight_multiplicativity():
    w = (1, 1, 2)
    rng = random.Random(3)
    for _ in range(10):
        m = rng.choice(monomials_of_weight(w, rng.randint(1, 4)))
        k = rng.choice(monomials_of_weight(w, rng.randint(1, 4)))
        p = Polynomial({"x": 3}, {(("x", m),): F(3)})
        q = Polynomial({"x": 3}, {(("x", k),): F(1, 2)})
        assert homogeneous_weight(p * q, w) == homogeneous_weight(p, w) + homogeneous_weight(q, w)


def test_parse_render_roundtrip():
    # left side already in canonical term order, so rendering is exact
    canonical = [
        "1/2 x3 + 1/24 x1 x2",
        "x3 + y3 + 1/2 x1 y2 - 1/2 x2 y1",
        "- 2 x2 + x1^2",
        "1 - 3/4 x1 x2^3",
    ]
    for text in canonical:
        p = parse_poly(text)
        assert render_poly(p) == text
        assert parse_poly(render_poly(p)) == p
    assert render_poly(Polynomial.zero()) == "0"
    # arbitrary input order still parses to the same polynomial
    assert parse_poly("x1^2 - 2 x2") == parse_poly("- 2 x2 + x1^2")


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_poly("x1 + ")
    with pytest.raises(ParseError):
        parse_poly("x0")
    with pytest.raises(ParseError):
        parse_poly("x1 ^ 1/2")
    with pytest.raises(ParseError):
        parse_poly("x4", dims={"x": 3})
    with pytest.raises(ParseError):
        parse_poly("q1", dims={"x": 3})


def test_derivative():
    p = x(0) ** 2 * x(1) + x(2)
    assert p.derivative("x", 0) == x(0) * x(1) * 2
    assert p.derivative("x", 2) == Polynomial.const(1)
    assert p.derivative("x", 1) == x(0) ** 2
    assert p.derivative("y", 0).is_zero


def test_evaluate():
    p = x(0) * x(1) - x(2).scale(F(1, 2))
    assert p.evaluate({"x": [F(2), F(3), F(4)]}) == F(4)
