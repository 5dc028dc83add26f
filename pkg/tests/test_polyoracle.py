import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conetract.errors import InputError, ResourceError
from conetract.extensions import extend
from conetract.laurent import TERM_LIMIT_ENV, LaurentPoly, conj, mul, power
from conetract.polyoracle import even_norm, extension_support_oracle, shapiro_pairing, witness_search_even

from oracles import direct_power_mean

EX33 = [(3, 0, 0), (0, 3, 0), (1, 1, 1)]
EX35_2 = [(2, 1, 0, 1), (3, 0, 1, 0), (0, 0, 3, 0), (0, 0, 0, 3)]


def P(d, terms):
    return LaurentPoly(d, terms)


def test_arithmetic_examples():
    one_plus = P(1, {(0,): 1, (1,): 1})
    one_minus = P(1, {(0,): 1, (1,): -1})
    assert mul(one_plus, one_minus) == P(1, {(0,): 1, (2,): -1})
    assert conj(P(2, {(1, -1): 3})) == P(2, {(-1, 1): 3})
    assert power(one_plus, 2) == P(1, {(0,): 1, (1,): 2, (2,): 1})
    assert power(one_plus, 0) == P(1, {(0,): 1})


def test_zero_coefficients_are_dropped():
    f = P(1, {(0,): 1, (1,): 0}) + P(1, {(0,): -1})
    assert f == 0 and len(f) == 0


def test_float_coefficients_rejected():
    with pytest.raises(InputError):
        P(1, {(0,): 0.5})


def test_json_round_trip():
    f = P(2, {(0, 1): Fraction(3, 7), (-2, 4): -5})
    assert LaurentPoly.from_json(2, f.to_json()) == f


def test_term_guard(monkeypatch):
    monkeypatch.setenv(TERM_LIMIT_ENV, "10")
    f = P(1, {(i,): 1 for i in range(0, 40, 4)})
    with pytest.raises(ResourceError):
        mul(f, P(1, {(i,): 1 for i in range(10)}))


def test_even_norm_examples():
    assert even_norm(P(1, {(0,): 1, (1,): 1}), 2) == 6
    assert even_norm(P(3, {(2, -1, 4): 1}), 5) == 1
    assert even_norm(P(1, {(0,): 1, (1,): Fraction(1, 10)}), 2) == Fraction(10401, 10000)


def _rand(rng, d, terms=5):
    return P(d, {tuple(rng.randint(-2, 3) for _ in range(d)): Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                 for _ in range(terms)})


def test_even_norm_parseval_and_modulation():
    rng = random.Random(1)
    for _ in range(30):
        d = rng.randint(1, 3)
        f = _rand(rng, d)
        assert even_norm(f, 1) == sum(c * c for _, c in f) if f else True
        v = tuple(rng.randint(-3, 3) for _ in range(d))
        for k in (1, 2, 3):
            assert even_norm(f.shift(v), k) == even_norm(f, k)


def test_even_norm_matches_direct_quadrature():
    rng = random.Random(4)
    for _ in range(10):
        f = _rand(rng, 2, terms=4)
        if not f:
            continue
        terms = {k: float(c) for k, c in f}
        for k in (2, 3):
            assert abs(float(even_norm(f, k)) - direct_power_mean(terms, 2 * k, 32)) < 1e-8 * max(1, float(even_norm(f, k)))


def test_shapiro_pairing_examples():
    f = LaurentPoly.indicator(EX33)
    assert shapiro_pairing(f, 1, (0, 0, 3)) == 0
    assert shapiro_pairing(f, 2, (0, 0, 3)) > 0
    assert shapiro_pairing(P(2, {(3, 1): 1}), 4, (3, 1)) == 1


def test_pairing_vanishes_off_extension_support():
    rng = random.Random(8)
    for _ in range(25):
        pts = list({tuple(rng.randint(0, 4) for _ in range(2)) for _ in range(3)})
        f = P(2, {p: Fraction(rng.randint(1, 5), rng.randint(1, 3)) for p in pts})
        for n in (1, 2):
            support = set(extend(pts, n).points)
            for lam in [(a, b) for a in range(9) for b in range(9)]:
                if lam not in support:
                    assert shapiro_pairing(f, n, lam) == 0


def test_oracle_examples():
    assert extension_support_oracle(EX33, 2).points == extend(EX33, 2).points
    assert extension_support_oracle(EX33, 0).points == tuple(sorted(EX33))
    assert extension_support_oracle(EX35_2, 2).points == tuple(sorted(EX35_2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3).flatmap(lambda d: st.lists(st.tuples(*[st.integers(0, 6)] * d), min_size=1, max_size=4)),
       st.integers(0, 2))
def test_oracle_equals_extend(points, n):
    assert extension_support_oracle(points, n) == extend(points, n)


def test_witness_example_three_points():
    w = witness_search_even(EX33, 2, (0, 0, 3))
    assert w is not None and w.ratio_p > 1 and w.p == 6
    assert w.norm_pf == even_norm(w.f, 3)
    assert w.norm_h == even_norm(w.h, 3)


def test_witness_block_example():
    w = witness_search_even(EX35_2, 3, (0, 3, 1, 0))
    assert w is not None and w.ratio_p > 1 and w.p == 8


def test_witness_precondition():
    with pytest.raises(InputError):
        witness_search_even(EX33, 2, (1, 1, 1))


def test_no_witness_when_extension_is_trivial():
    assert witness_search_even(EX33, 1, (0, 0, 3), eps_steps=4, c_steps=4) is None
