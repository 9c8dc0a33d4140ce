import json
import math
import os
import random
from fractions import Fraction as F

import pytest

from ggcalc.group import (
    GradedLieAlgebra,
    GroupValidationError,
    KindUnsupportedError,
    abelian,
    algebra_from_json,
    algebra_to_json,
    bch_group_law,
    catalog_algebra,
    check_law_homogeneity,
    dilate,
    engel,
    free_nilpotent_2_3,
    heisenberg,
    identity_element,
    inverse,
    is_associative,
    multiply,
    quasi_norm,
    symbolic_point,
    validate_algebra,
)
from ggcalc.poly import Polynomial, homogeneous_weight, parse_poly, render_poly

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture(name):
    with open(os.path.join(FIXTURES, name)) as fh:
        return json.load(fh)


# -- validation ---------------------------------------------------------------


def test_validate_heisenberg_passes():
    assert validate_algebra(heisenberg(1)).ok
    assert validate_algebra(heisenberg(2)).ok


def test_validate_abelian_passes():
    assert validate_algebra(abelian(4)).ok


def test_validate_gradation_violation():
    alg = algebra_from_json(fixture("bad_gradation.json"))
    report = validate_algebra(alg)
    assert not report.ok
    kinds = {v.kind for v in report.violations}
    assert kinds == {"gradation"}


def test_validate_jacobi_violation():
    alg = algebra_from_json(fixture("bad_jacobi.json"))
    report = validate_algebra(alg)
    assert not report.ok
    assert any(v.kind == "jacobi" for v in report.violations)
    bad = next(v for v in report.violations if v.kind == "jacobi")
    assert bad.indices == (0, 1, 2)


def test_bch_refuses_invalid_algebra():
    alg = algebra_from_json(fixture("bad_jacobi.json"))
    with pytest.raises(GroupValidationError):
        bch_group_law(alg)


# -- group laws ----------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2])
def test_heisenberg_law_closed_form(n):
    law = bch_group_law(heisenberg(n))
    d = 2 * n + 1
    for j in range(2 * n):
        assert law.R[j] == Polynomial.var("x", j, d) + Polynomial.var("y", j, d)
    center = Polynomial.var("x", d - 1, d) + Polynomial.var("y", d - 1, d)
    for j in range(n):
        xj = Polynomial.var("x", j, d)
        xnj = Polynomial.var("x", n + j, d)
        yj = Polynomial.var("y", j, d)
        ynj = Polynomial.var("y", n + j, d)
        center = center + (xj * ynj - xnj * yj).scale(F(1, 2))
    assert law.R[d - 1] == center


def test_abelian_law():
    law = bch_group_law(abelian(3))
    for j in range(3):
        assert law.R[j] == Polynomial.var("x", j, 3) + Polynomial.var("y", j, 3)


def test_engel_law_coefficient():
    law = bch_group_law(engel())
    mono = (("x", (2, 0, 0, 0)), ("y", (0, 1, 0, 0)))
    assert law.R[3].coefficient(mono) == F(1, 12)


@pytest.mark.parametrize(
    "factory", [lambda: heisenberg(1), lambda: heisenberg(2), engel, free_nilpotent_2_3]
)
def test_associativity_exact(factory):
    assert is_associative(bch_group_law(factory()))


@pytest.mark.parametrize(
    "factory", [lambda: heisenberg(1), lambda: heisenberg(2), engel, free_nilpotent_2_3, lambda: abelian(3)]
)
def test_identity_and_inverse(factory):
    law = bch_group_law(factory())
    n = law.dim
    xs = symbolic_point("x", n)
    zeros = identity_element(n)
    assert multiply(law, xs, zeros) == xs
    assert multiply(law, zeros, [Polynomial.var("y", i, n) for i in range(n)]) == [
        Polynomial.var("y", i, n) for i in range(n)
    ]
    assert all(p.is_zero for p in multiply(law, xs, inverse(xs)))


def test_triangular_dependence():
    for factory in (lambda: heisenberg(2), engel, free_nilpotent_2_3):
        law = bch_group_law(factory())
        for j, R in enumerate(law.R):
            for mono in R.terms:
                for tag, exps in mono:
                    assert all(e == 0 for e in exps[j + 1:]), (j, mono)


def test_bi_homogeneity():
    for factory in (lambda: heisenberg(1), engel):
        law = bch_group_law(factory())
        for j, R in enumerate(law.R):
            assert homogeneous_weight(R, law.weights) == law.weights[j]


def test_law_homogeneity_check():
    law = bch_group_law(heisenberg(1))
    assert check_law_homogeneity(law)
    assert check_law_homogeneity(bch_group_law(abelian(2)))


def test_corrupted_law_negative_controls():
    from ggcalc.group import GroupLaw

    law = bch_group_law(heisenberg(1))
    x1 = Polynomial.var("x", 0, 3)
    y1 = Polynomial.var("y", 0, 3)
    y2 = Polynomial.var("y", 1, 3)
    # wrong-weight term breaks joint homogeneity
    bad_weight = GroupLaw(law.algebra, (law.R[0], law.R[1], law.R[2] + x1 * x1 * y1))
    assert not check_law_homogeneity(bad_weight)
    # dropping the 1/2 from one cross term only breaks x * x^{-1} = e
    lopsided = GroupLaw(
        law.algebra, (law.R[0], law.R[1], law.R[2] + (x1 * y2).scale(F(1, 2)))
    )
    xs = symbolic_point("x", 3)
    assert not all(p.is_zero for p in multiply(lopsided, xs, inverse(xs)))
    assert check_law_homogeneity(lopsided)


def test_group_multiply_heisenberg_point():
    law = bch_group_law(heisenberg(1))
    assert multiply(law, [1, 0, 0], [0, 1, 0]) == [F(1), F(1), F(1, 2)]


# -- dilations and quasi-norms -----------------------------------------------------


def test_dilate_numeric():
    assert dilate((1, 1, 2), F(2), [1, 1, 1]) == [F(2), F(2), F(4)]
    with pytest.raises(ValueError):
        dilate((1, 1, 2), F(-1), [1, 0, 0])


def test_quasi_norm_examples():
    assert quasi_norm([0, 0, 1], (1, 1, 2), "inf") == 1.0
    assert quasi_norm([1, 0, 0], (1, 1, 2), "koranyi") == 1.0
    assert abs(quasi_norm([0, 0, 1], (1, 1, 2), "koranyi") - 0.5) < 1e-15


def test_quasi_norm_kind_unsupported():
    with pytest.raises(KindUnsupportedError):
        quasi_norm([1, 0, 0, 0], (1, 1, 2, 3), "koranyi")
    with pytest.raises(KindUnsupportedError):
        quasi_norm([1, 0, 0], (1, 1, 2), "nope")


@pytest.mark.parametrize("kind", ["inf", "p", "koranyi"])
def test_quasi_norm_homogeneity_and_symmetry(kind):
    rng = random.Random(17)
    w = (1, 1, 2)
    for _ in range(25):
        pt = [F(rng.randint(-40, 40), rng.randint(1, 7)) for _ in range(3)]
        if all(v == 0 for v in pt):
            continue
        n0 = quasi_norm(pt, w, kind)
        assert n0 > 0
        assert abs(quasi_norm(inverse(pt), w, kind) - n0) < 1e-12 * max(n0, 1)
        scaled = dilate(w, F(2), pt)
        assert abs(quasi_norm(scaled, w, kind) - 2 * n0) < 1e-12 * max(n0, 1)


# -- serialization ------------------------------------------------------------------


def test_algebra_json_roundtrip():
    for factory in (lambda: heisenberg(2), engel, free_nilpotent_2_3):
        alg = factory()
        data = algebra_to_json(alg)
        back = algebra_from_json(data)
        assert back.weights == alg.weights
        assert back.brackets == alg.brackets


def test_fixture_heisenberg_matches_catalog():
    alg = algebra_from_json(fixture("heisenberg1.json"))
    cat = catalog_algebra("heisenberg1")
    assert alg.weights == cat.weights
    assert alg.brackets == cat.brackets


def test_bch_runtime_budget():
    import time

    start = time.monotonic()
    for factory in (lambda: heisenberg(1), lambda: heisenberg(2), engel, free_nilpotent_2_3):
        law = bch_group_law(factory())
        assert is_associative(law)
    assert time.monotonic() - start < 5.0
