"""Independent reference implementations used only by the tests.

None of these share code with the package: membership uses sympy's Hermite
normal form, sums are built with itertools, norms are evaluated by direct
exponential sums instead of FFTs.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form


def _hnf_cols(vectors, dim):
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return None
    return hermite_normal_form(Matrix(vecs).T)


def in_coset(points, lam):
    """``lam`` in the coset generated by ``points`` (sympy HNF comparison)."""
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    v = [a - b for a, b in zip(lam, base)]
    if not any(v):
        return True
    before = _hnf_cols(diffs, len(base))
    after = _hnf_cols(diffs + [v], len(base))
    return before is not None and before == after


def coset_box(points, bound):
    """All points of the coset inside ``[0, bound]^d`` by exhaustive scan."""
    dim = len(points[0])
    return sorted(
        q for q in itertools.product(range(bound + 1), repeat=dim) if in_coset(points, q)
    )


def brute_extend(points, n):
    """Orthant points ``sum(n+1) - sum(n)``, enumerating ordered tuples with itertools."""
    dim = len(points[0])
    plus = {tuple(map(sum, zip(*c))) for c in itertools.product(points, repeat=n + 1)}
    minus = {tuple(map(sum, zip(*c))) if c else (0,) * dim for c in itertools.product(points, repeat=n)}
    out = set()
    for a in plus:
        for b in minus:
            q = tuple(x - y for x, y in zip(a, b))
            if min(q) >= 0:
                out.add(q)
    return sorted(out)


def direct_power_mean(terms, p, n):
    """``mean |f|^p`` on the ``n``-point grid by summing exponentials directly."""
    dim = len(next(iter(terms)))
    axes = np.meshgrid(*[2 * np.pi * np.arange(n) / n] * dim, indexing="ij")
    vals = np.zeros(axes[0].shape, dtype=complex)
    for k, c in terms.items():
        phase = sum(e * t for e, t in zip(k, axes))
        vals += complex(c) * np.exp(1j * phase)
    return float(np.mean(np.abs(vals) ** p))


def binom_series(a, k):
    """Generalized binomial by the gamma-free product formula over Fractions."""
    out = Fraction(1)
    for i in range(k):
        out *= Fraction(a) - i
        out /= i + 1
    return out if k >= 0 else Fraction(0)


def trial_factor(n):
    out = {}
    p = 2
    while n > 1:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    return out


def primes(count):
    out, k = [], 2
    while len(out) < count:
        if all(k % q for q in out if q * q <= k):
            out.append(k)
        k += 1
    return out


def gcd_list(xs):
    g = 0
    for x in xs:
        g = math.gcd(g, x)
    return g
