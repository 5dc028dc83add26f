import math
import random
from fractions import Fraction

import pytest

from conetract.errors import InputError, ResourceError
from conetract.extensions import PExponent
from conetract.laurent import LaurentPoly
from conetract.numerics import (
    GridSpec,
    gen_binom,
    growth_gamma,
    lp_norm_estimate,
    operator_norm_lower_bound,
    plane_sup_value,
    quadratic_coefficient_check,
    shapiro_leading_coefficient,
    shapiro_leading_numeric,
    tn_growth_table,
    verify_inf_lemma,
    verify_line_lemma,
    verify_plane_lemma,
)
from conetract.polyoracle import even_norm

from oracles import binom_series, direct_power_mean

ONE_PLUS_Z = LaurentPoly(1, {(0,): 1, (1,): 1})


def test_grid_spec_validation():
    with pytest.raises(InputError):
        GridSpec(12, 1)
    with pytest.raises(InputError):
        GridSpec(4, 1)
    with pytest.raises(ResourceError):
        GridSpec(1024, 3)
    assert GridSpec(64, 2).size == 4096


def test_norm_examples():
    g = GridSpec(16, 1)
    assert abs(lp_norm_estimate(ONE_PLUS_Z, 2, g).value - math.sqrt(2)) < 1e-12
    assert abs(lp_norm_estimate(ONE_PLUS_Z, 4, g).value - 6 ** 0.25) < 1e-9
    f = LaurentPoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): -1})
    assert abs(lp_norm_estimate(f, "inf", GridSpec(512, 2)).value - 2 * math.sqrt(2)) < 1e-3


def test_dimension_mismatch():
    with pytest.raises(InputError):
        lp_norm_estimate(ONE_PLUS_Z, 2, GridSpec(16, 2))


def _rand_poly(rng, d):
    return LaurentPoly(d, {tuple(rng.randint(-3, 3) for _ in range(d)): Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                           for _ in range(6)})


def test_parseval_and_even_norms_on_random_polys():
    rng = random.Random(0)
    for _ in range(25):
        d = rng.randint(1, 2)
        f = _rand_poly(rng, d)
        if not f:
            continue
        g = GridSpec(64, d)
        l2 = math.sqrt(sum(float(c) ** 2 for _, c in f))
        assert abs(lp_norm_estimate(f, 2, g).value - l2) < 1e-12 * max(1, l2)
        for k in (2, 3):
            exact = float(even_norm(f, k)) ** (1 / (2 * k))
            assert abs(lp_norm_estimate(f, 2 * k, g).value - exact) < 1e-9 * exact


def test_non_even_p_matches_direct_sum_and_gap_shrinks():
    f = LaurentPoly(2, {(0, 0): 1, (1, 0): Fraction(1, 2), (0, 2): Fraction(-1, 3)})
    est = lp_norm_estimate(f, 3, GridSpec(32, 2))
    direct = direct_power_mean({k: float(c) for k, c in f}, 3, 64) ** (1 / 3)
    assert abs(est.refined - direct) < 1e-9
    coarse = lp_norm_estimate(f, 3, GridSpec(8, 2))
    assert est.rel_gap <= coarse.rel_gap


@pytest.mark.parametrize("p", ["1", "3/2", "3", "4", "5", "inf"])
def test_line_lemma_holds(p):
    assert verify_line_lemma(PExponent.parse(p))


@pytest.mark.parametrize("p", ["1", "3/2", "3", "4", "5"])
def test_plane_lemma_holds(p):
    assert verify_plane_lemma(PExponent.parse(p))


def test_lemmas_fail_at_two():
    assert not verify_line_lemma(2)
    assert not verify_plane_lemma(2, 0.05)


def test_plane_lemma_examples_at_larger_eps():
    assert verify_plane_lemma(4, 0.05)
    assert verify_plane_lemma(PExponent.parse("3/2"), 0.05)


def test_plane_sup_value():
    assert abs(plane_sup_value() - 2 * math.sqrt(2)) < 1e-3


def test_inf_lemma():
    assert verify_inf_lemma((2, -1), 0.01)
    assert verify_inf_lemma((1, 0), 0.01)
    assert not verify_inf_lemma((2, -1), 0.0)


def test_quadratic_coefficient_examples():
    fitted, predicted = quadratic_coefficient_check(4, 0.0)
    assert predicted == 4 and abs(fitted - 4) < 1e-3
    fitted, predicted = quadratic_coefficient_check(4, -0.5)
    assert predicted == 3 and abs(fitted - 3) < 1e-3
    assert quadratic_coefficient_check(2, 0.0)[1] == 1
    with pytest.raises(InputError):
        quadratic_coefficient_check("inf", 0.0)


@pytest.mark.parametrize("p,c", [(3, 0.2), (5, -0.3), (1.5, 0.0)])
def test_quadratic_fit_matches_prediction(p, c):
    fitted, predicted = quadratic_coefficient_check(p, c)
    assert abs(fitted - predicted) < 1e-3


def test_generalized_binomial_against_oracle():
    for a in (Fraction(1, 2), Fraction(-3, 2), Fraction(7, 3), 5):
        for k in range(-1, 7):
            assert gen_binom(Fraction(a), k) == binom_series(a, k)


def test_leading_coefficient_examples():
    assert shapiro_leading_coefficient(3, [1]) == 1.5
    with pytest.raises(InputError):
        shapiro_leading_coefficient(3, [0, 0])
    with pytest.raises(InputError):
        shapiro_leading_coefficient(4, [1])


@pytest.mark.parametrize("p,m", [(5, [2, -1]), (3, [1]), (3, [1, 1])])
def test_leading_coefficient_matches_quadrature(p, m):
    exact = shapiro_leading_coefficient(p, m)
    assert exact != 0
    assert abs(shapiro_leading_numeric(p, m) - exact) < 1e-3 * abs(exact)


def test_lower_bound_is_one_on_coset_restrictions():
    full = [(3, 0, 0), (0, 3, 0), (1, 1, 1), (0, 0, 3)]
    assert operator_norm_lower_bound(full, 4) == 1.0


def test_lower_bound_detects_growth():
    assert operator_norm_lower_bound(growth_gamma(1), 6) > 1 + 1e-6
    assert operator_norm_lower_bound(growth_gamma(2), 8) > 1


def test_growth_table_and_refusal():
    t = tn_growth_table(1, 6)
    assert t.delta_p > 0
    assert any(v > 10 for _, v in t.rows)
    for p in (2, 4, 6):
        with pytest.raises(InputError, match="if and only if"):
            tn_growth_table(2, p)
