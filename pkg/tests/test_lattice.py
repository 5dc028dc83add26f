import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conetract.errors import InputError
from conetract.indices import FreqSet, as_index
from conetract.laurent import LaurentPoly
from conetract.lattice import (
    affine_lattice,
    annihilator,
    annihilator_average,
    contains,
    coordinates,
    direction_cone_trivial,
    enumerate_orthant,
    hermite_normal_form,
    lattice_from_generators,
    point_at,
    reflection_gcd,
    root_of_unity_average,
    smith_normal_form,
)

from oracles import coset_box, gcd_list, in_coset

EX33 = [(3, 0, 0), (0, 3, 0), (1, 1, 1)]


def ex35(n):
    return [(n, 1, 0, 1), (n + 1, 0, 1, 0), (0, 0, n + 1, 0), (0, 0, 0, n + 1)]


# -- multi-indices ----------------------------------------------------------

def test_as_index_rejects_empty_and_overflow():
    with pytest.raises(InputError):
        as_index([])
    with pytest.raises(OverflowError):
        as_index([2**63])
    with pytest.raises(InputError):
        as_index([1.5])


def test_freqset_is_canonical():
    s = FreqSet([(2, 0), (0, 1), (2, 0)])
    assert s.points == ((0, 1), (2, 0))
    assert s == FreqSet([(0, 1), (2, 0)])
    with pytest.raises(InputError):
        FreqSet([(1, 2), (3,)])
    with pytest.raises(InputError):
        FreqSet([])


# -- affine_lattice ---------------------------------------------------------

def test_singleton_lattice_has_rank_zero():
    lat = affine_lattice([(1, 1)])
    assert lat.base == (1, 1) and lat.rank == 0 and lat.basis == ()


def test_example_three_point_lattice_spans_the_two_directions():
    lat = affine_lattice(EX33)
    assert lat.rank == 2
    assert lat.base == (0, 3, 0)
    # same lattice as the one spanned by (2,-1,-1) and (-1,2,-1)
    other = lattice_from_generators(lat.base, [(2, -1, -1), (-1, 2, -1)])
    assert other.basis == lat.basis


def test_one_dimensional_lattice_is_gcd():
    lat = affine_lattice([(0,), (2,), (5,)])
    assert lat.base == (0,) and lat.basis == ((1,),)


def test_dimension_mismatch_is_an_input_error():
    with pytest.raises(InputError):
        affine_lattice([(1, 2), (3,)])


def test_hnf_pivots_positive_and_reduced():
    rows = hermite_normal_form([(4, 6, 2), (2, 3, 9), (6, 9, 11)], 3)
    for i, r in enumerate(rows):
        piv = next(j for j, x in enumerate(r) if x)
        assert r[piv] > 0
        for other in rows[:i]:
            assert 0 <= other[piv] < r[piv]


def test_smith_normal_form_divisibility():
    diag, _ = smith_normal_form([(2, 4, 4), (-6, 6, 12), (10, -4, -16)], 3)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert math.prod(nz) == 2 * 6 * 12


# -- contains ---------------------------------------------------------------

def test_contains_examples():
    lat = affine_lattice(EX33)
    assert contains(lat, (0, 0, 3))
    assert contains(lat, lat.base)
    assert not contains(lat, (1, 0, 0))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=3, max_size=3), min_size=1, max_size=4),
       st.lists(st.integers(-4, 8), min_size=3, max_size=3))
def test_contains_matches_sympy_oracle(points, lam):
    pts = [tuple(p) for p in points]
    assert contains(affine_lattice(pts), lam) == in_coset(pts, lam)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 6), min_size=2, max_size=4), min_size=1, max_size=5).filter(
    lambda ps: len({len(p) for p in ps}) == 1))
def test_generators_belong_and_canonicalization(points):
    pts = [tuple(p) for p in points]
    lat = affine_lattice(pts)
    assert all(contains(lat, p) for p in pts)
    # adding a certified lattice point leaves the lattice unchanged
    extra = point_at(lat, [1] * lat.rank) if lat.rank else lat.base
    lat2 = affine_lattice(pts + [extra])
    assert contains(lat, extra)
    assert lat2.basis == lat.basis and lat2.rank == lat.rank


def test_coordinates_round_trip():
    lat = affine_lattice(ex35(3))
    for q in [(0, 4, 1, 0), (4, 0, 1, 0)]:
        c = coordinates(lat, q)
        assert c is not None and point_at(lat, c) == q
    assert coordinates(lat, (1, 0, 0, 0)) is None


# -- cone triviality and enumeration -----------------------------------------

def test_direction_cone_examples():
    assert direction_cone_trivial(affine_lattice(EX33))
    assert not direction_cone_trivial(lattice_from_generators((0, 0), [(1, 1)]))
    assert direction_cone_trivial(affine_lattice([(2, 5)]))


def test_enumerate_example_three_points():
    res = enumerate_orthant(affine_lattice(EX33))
    assert res.tag == "Finite"
    assert set(res.points) == set(EX33) | {(0, 0, 3)}


def test_enumerate_infinite_gives_witness():
    res = enumerate_orthant(lattice_from_generators((0, 0), [(1, 1)]))
    assert res.tag == "Infinite" and res.witness == (1, 1)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_enumerate_block_example_matches_box_scan(n):
    res = enumerate_orthant(affine_lattice(ex35(n)))
    expected = sorted(ex35(n) + [(0, n + 1, 1, 0)])
    assert res.tag == "Finite" and list(res.points) == expected
    assert coset_box(ex35(n), n + 1) == expected


def test_rank_zero_outside_orthant():
    res = enumerate_orthant(lattice_from_generators((-1, 2), []))
    assert res.tag == "Finite" and res.points == ()


def test_cap_truncates_finite_sets():
    res = enumerate_orthant(affine_lattice(EX33), cap=2)
    assert res.tag == "Truncated"
    assert set(res.points) == {(1, 1, 1)}


def _random_lattices(count, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        d = rng.randint(1, 4)
        pts = [tuple(rng.randint(0, 6) for _ in range(d)) for _ in range(rng.randint(1, 4))]
        out.append(pts)
    return out


def test_finite_iff_cone_trivial_and_box_scan_complete():
    for pts in _random_lattices(120):
        lat = affine_lattice(pts)
        res = enumerate_orthant(lat)
        assert res.finite == direction_cone_trivial(lat)
        if res.finite:
            assert all(contains(lat, q) and min(q) >= 0 for q in res.points)
            bound = max(res.bounds) if res.bounds else 0
            if len(pts[0]) <= 3 and bound <= 12:
                assert list(res.points) == coset_box(pts, bound)
        else:
            w = res.witness
            assert any(w) and min(w) >= 0
            assert contains(lat, tuple(b + x for b, x in zip(lat.base, w)))


# -- annihilators ------------------------------------------------------------

def test_annihilator_of_kz():
    dec = annihilator(lattice_from_generators((0,), [(6,)]))
    assert dec.finite_part == ((6, (1,)),) and dec.torus_rank == 0


def test_annihilator_of_sum_zero_lattice():
    dec = annihilator(lattice_from_generators((0, 0, 0), [(1, -1, 0), (0, 1, -1)]))
    assert dec.finite_part == () and dec.torus_rank == 1


def test_annihilator_of_full_lattice_is_trivial():
    dec = annihilator(lattice_from_generators((0, 0), [(1, 0), (0, 1)]))
    assert dec.finite_part == () and dec.torus_rank == 0


def test_orders_multiply_to_index():
    dec = annihilator(affine_lattice(EX33))
    assert dec.orders == (3,) and dec.torus_rank == 1


def test_root_of_unity_average():
    assert root_of_unity_average(4, 8) == 1
    assert root_of_unity_average(4, 3) == 0
    assert root_of_unity_average(1, 5) == 1


def test_wiener_projection():
    dec = annihilator(lattice_from_generators((0,), [(2,)]))
    f = LaurentPoly(1, {(0,): 1, (1,): 1, (2,): 1})
    assert annihilator_average(dec, (0,), f) == LaurentPoly(1, {(0,): 1, (2,): 1})


def test_homogeneous_projection():
    dec = annihilator(lattice_from_generators((0, 0), [(1, -1)]))
    f = LaurentPoly(2, {(0, 0): 1, (1, 0): 1, (1, 1): 1})
    assert annihilator_average(dec, (1, 0), f) == LaurentPoly(2, {(1, 0): 1})


def test_average_of_zero():
    dec = annihilator(affine_lattice(EX33))
    assert annihilator_average(dec, (0, 0, 0), LaurentPoly.zero(3)) == 0


def _rand_poly(rng, d, terms=20, lo=-4, hi=6):
    return LaurentPoly(d, {tuple(rng.randint(lo, hi) for _ in range(d)): Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                           for _ in range(terms)})


def test_average_equals_coefficient_filtering():
    rng = random.Random(3)
    for _ in range(60):
        d = rng.randint(1, 3)
        gens = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(rng.randint(0, 3))]
        lat = lattice_from_generators((0,) * d, gens)
        t = tuple(rng.randint(-2, 2) for _ in range(d))
        f = _rand_poly(rng, d)
        got = annihilator_average(annihilator(lat), t, f)
        shifted = lattice_from_generators(t, gens)
        assert got == f.filter(lambda k: contains(shifted, k))


def test_translation_equivariance():
    rng = random.Random(11)
    for _ in range(40):
        d = rng.randint(1, 3)
        gens = [tuple(rng.randint(-3, 3) for _ in range(d)) for _ in range(rng.randint(1, 3))]
        dec = annihilator(lattice_from_generators((0,) * d, gens))
        lam = tuple(rng.randint(-3, 3) for _ in range(d))
        f = _rand_poly(rng, d, terms=12)
        left = annihilator_average(dec, (0,) * d, f).shift(lam)
        right = annihilator_average(dec, lam, f.shift(lam))
        assert left == right


# -- reflection gcd ----------------------------------------------------------

def test_reflection_gcd_examples():
    assert reflection_gcd(4, 6)[0] == 2
    g, trace = reflection_gcd(3, 5)
    assert g == 1 and trace[0] == (1, 3)
    assert reflection_gcd(7, 7) == (7, [])


def test_reflection_gcd_matches_gcd_on_grid():
    for a in range(1, 201):
        for b in range(1, 201):
            g, trace = reflection_gcd(a, b)
            assert g == gcd_list([a, b])
            for x, y in trace:
                assert gcd_list([x, y]) == g


def test_reflection_gcd_rejects_nonpositive():
    with pytest.raises(InputError):
        reflection_gcd(0, 3)


def test_lattice_equality_ignores_choice_of_base():
    a = affine_lattice([(0, 2), (0, 5)])
    b = lattice_from_generators((0, 8), [(0, -3)])
    assert a == b and hash(a) == hash(b)
    assert a != affine_lattice([(1, 0), (1, 1)])
