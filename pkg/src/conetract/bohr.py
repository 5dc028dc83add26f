"""Dirichlet-series frequencies via prime factorization.

A positive rational ``q = prod p_j^a_j`` is identified with the multi-index
``(a_1, a_2, ...)`` indexed by the primes in increasing order.  Under this
identification sets of positive integers become subsets of ``N_0^d`` and the
torus machinery applies unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import InputError
from .extensions import Verdict, is_contractive_projection_set
from .indices import MultiIndex
from .laurent import LaurentPoly
from .lattice import annihilator, annihilator_average, lattice_from_generators

__all__ = [
    "DirichletPoly",
    "nth_prime",
    "factorize",
    "bohr_lift",
    "inverse_lift",
    "omega",
    "omega_projection",
    "omega_projection_integral",
    "lift_set",
    "classify_dirichlet_set",
]


@lru_cache(maxsize=None)
def _primes_upto(limit: int) -> Tuple[int, ...]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(limit**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return tuple(i for i, v in enumerate(sieve) if v)


def nth_prime(j: int) -> int:
    """The ``j``-th prime, starting from ``nth_prime(0) == 2``."""
    limit = 64
    while True:
        ps = _primes_upto(limit)
        if len(ps) > j:
            return ps[j]
        limit *= 2


def prime_index(p: int) -> int:
    limit = max(64, p)
    ps = _primes_upto(limit)
    lo, hi = 0, len(ps)
    while lo < hi:
        mid = (lo + hi) // 2
        if ps[mid] < p:
            lo = mid + 1
        else:
            hi = mid
    if lo == len(ps) or ps[lo] != p:
        raise InputError(f"{p} is not prime")
    return lo


def factorize(n: int) -> Dict[int, int]:
    """Prime factorization ``{prime: exponent}`` by trial division."""
    if n < 1:
        raise InputError(f"expected a positive integer, got {n}")
    out: Dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def bohr_lift(q, dim: int | None = None) -> MultiIndex:
    """Exponent vector of ``q`` over the primes ``2, 3, 5, ...``.

    The result has one entry per prime up to the largest prime factor, so
    ``bohr_lift(1) == ()``; pass ``dim`` to pad with zeros.
    """
    q = Fraction(q)
    if q <= 0:
        raise InputError(f"expected a positive rational, got {q}")
    exps: Dict[int, int] = {}
    for p, e in factorize(q.numerator).items():
        exps[prime_index(p)] = e
    for p, e in factorize(q.denominator).items():
        exps[prime_index(p)] = exps.get(prime_index(p), 0) - e
    length = max(exps, default=-1) + 1
    if dim is not None:
        if dim < length:
            raise InputError(f"{q} needs at least {length} coordinates")
        length = dim
    return tuple(exps.get(j, 0) for j in range(length))


def inverse_lift(alpha: Sequence[int]) -> Fraction:
    """``prod p_j^alpha_j``; an ``int`` when every entry is nonnegative."""
    out = Fraction(1)
    for j, e in enumerate(alpha):
        if e:
            out *= Fraction(nth_prime(j)) ** e
    return int(out) if out.denominator == 1 else out


def omega(n: int) -> int:
    """Number of prime factors of ``n`` counted with multiplicity."""
    return sum(factorize(n).values())


class DirichletPoly:
    """``sum a_n n^{-s}`` with exact rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean: Dict[int, Fraction] = {}
        for n, c in (terms or {}).items():
            if int(n) != n or n < 1:
                raise InputError(f"Dirichlet frequencies must be positive integers, got {n}")
            c = Fraction(c)
            if c:
                clean[int(n)] = clean.get(int(n), Fraction(0)) + c
                if not clean[int(n)]:
                    del clean[int(n)]
        self.terms = clean

    def __eq__(self, other) -> bool:
        if isinstance(other, DirichletPoly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "DirichletPoly(0)"
        return "DirichletPoly(" + " + ".join(f"{c}*{n}^-s" for n, c in sorted(self.terms.items())) + ")"

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def dim(self) -> int:
        return max((len(bohr_lift(n)) for n in self.terms), default=0)

    def lift(self, dim: int | None = None) -> LaurentPoly:
        d = max(1, self.dim() if dim is None else dim)
        return LaurentPoly(d, {bohr_lift(n, d): c for n, c in self.terms.items()})

    @classmethod
    def from_laurent(cls, f: LaurentPoly) -> "DirichletPoly":
        return cls({inverse_lift(k): c for k, c in f.terms.items()})

    def to_json(self) -> list:
        return [[n, str(c)] for n, c in self]


def omega_projection(f: DirichletPoly, m: int) -> DirichletPoly:
    """Keep the terms with ``Omega(n) = m``."""
    if m < 0:
        raise InputError("m must be nonnegative")
    return DirichletPoly({n: c for n, c in f.terms.items() if omega(n) == m})


def omega_projection_integral(f: DirichletPoly, m: int) -> DirichletPoly:
    """The same projection computed as an average over the circle ``w -> (w, ..., w)``.

    On the lifted polynomial this is the averaging projection onto the coset
    ``{alpha : sum alpha = m}``, done through the annihilator.
    """
    if m < 0:
        raise InputError("m must be nonnegative")
    d = max(1, f.dim())
    g = f.lift(d)
    # primes that divide no frequency carry no information; drop those coordinates
    active = [i for i in range(d) if any(k[i] for k in g.terms)] or [0]
    r = len(active)
    small = LaurentPoly(r, {tuple(k[i] for i in active): c for k, c in g.terms.items()})
    dirs = [tuple(1 if i == 0 else (-1 if i == j else 0) for i in range(r)) for j in range(1, r)]
    lat = lattice_from_generators((0,) * r, dirs)
    shift = tuple(m if i == 0 else 0 for i in range(r))
    kept = annihilator_average(annihilator(lat), shift, small).terms
    primes = [nth_prime(i) for i in active]
    return DirichletPoly({math.prod(q**e for q, e in zip(primes, k)): c for k, c in kept.items()})


def lift_set(gamma: Iterable[int]) -> Tuple[Tuple[MultiIndex, ...], int]:
    """Lift positive integers to a common dimension (at least 1)."""
    nums = sorted(set(int(x) for x in gamma))
    if not nums:
        raise InputError("need a nonempty set")
    if any(n < 1 for n in nums):
        raise InputError("Dirichlet frequencies must be positive integers")
    d = max(1, max(len(bohr_lift(n)) for n in nums))
    return tuple(bohr_lift(n, d) for n in nums), d


def classify_dirichlet_set(gamma: Iterable[int], p) -> Verdict:
    """Contractivity of ``P_G`` on the Dirichlet Hardy space, via the lift."""
    pts, _ = lift_set(gamma)
    v = is_contractive_projection_set(pts, p)
    if v.evidence is None:
        return v
    return Verdict(v.contractive, v.reason, inverse_lift(v.evidence))
