"""n-extensions, completions and contractivity verdicts.

``extend(G, n)`` is the set of orthant points that can be written as a sum of
``n + 1`` elements of ``G`` minus a sum of ``n`` elements (repetition
allowed).  ``G`` is a contractive projection set for ``H^{2(n+1)}`` exactly
when this adds nothing.  For exponents that are not even integers the test
is whether ``G`` is the full orthant part of the coset it generates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import InputError
from .indices import FreqSet, MultiIndex, as_index, freqset, in_orthant
from .lattice import (
    AffineLattice,
    EnumerationResult,
    affine_lattice,
    contains,
    enumerate_box,
    enumerate_orthant,
    hermite_normal_form,
    nonneg_direction,
    orthant_bounds,
)


# ---------------------------------------------------------------------------
# Exponents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PExponent:
    """An exponent ``1 <= p <= inf`` with even integers kept apart.

    ``kind`` is ``"even"`` (``p = 2 * k``), ``"real"`` (rational ``p`` that is
    not an even integer) or ``"inf"``.
    """

    kind: str
    k: int = 0
    p: Fraction = Fraction(0)

    def __post_init__(self):
        if self.kind == "even":
            if self.k < 1:
                raise InputError("even exponent needs k >= 1")
        elif self.kind == "real":
            if self.p < 1:
                raise InputError("p must be at least 1")
            if self.p.denominator == 1 and self.p.numerator % 2 == 0:
                raise InputError(f"p={self.p} is an even integer; use PExponent.even")
        elif self.kind != "inf":
            raise InputError(f"unknown exponent kind {self.kind!r}")

    @classmethod
    def even(cls, k: int) -> "PExponent":
        return cls("even", k=k)

    @classmethod
    def real(cls, p) -> "PExponent":
        return cls("real", p=Fraction(p))

    @classmethod
    def infinity(cls) -> "PExponent":
        return cls("inf")

    @classmethod
    def of(cls, p) -> "PExponent":
        """Classify a number: even integers become ``even``."""
        if isinstance(p, PExponent):
            return p
        if isinstance(p, str):
            return cls.parse(p)
        if isinstance(p, float):
            if math.isinf(p) and p > 0:
                return cls.infinity()
            if not p.is_integer():
                return cls.real(Fraction(p).limit_denominator(10**6))
            p = int(p)
        p = Fraction(p)
        if p.denominator == 1 and p.numerator % 2 == 0 and p >= 2:
            return cls.even(p.numerator // 2)
        return cls.real(p)

    @classmethod
    def parse(cls, text: str) -> "PExponent":
        """Parse ``"4"``, ``"3/2"`` or ``"inf"``; decimal points are rejected."""
        s = text.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return cls.infinity()
        if "." in s or "e" in s:
            raise InputError(f"ambiguous exponent {text!r}: write integers, fractions or 'inf'")
        try:
            value = Fraction(s)
        except ValueError:
            raise InputError(f"cannot parse exponent {text!r}") from None
        return cls.of(value)

    @property
    def is_even(self) -> bool:
        return self.kind == "even"

    @property
    def is_inf(self) -> bool:
        return self.kind == "inf"

    @property
    def value(self) -> float:
        if self.kind == "even":
            return float(2 * self.k)
        if self.kind == "inf":
            return math.inf
        return float(self.p)

    @property
    def exact(self) -> Optional[Fraction]:
        if self.kind == "even":
            return Fraction(2 * self.k)
        if self.kind == "inf":
            return None
        return self.p

    def __str__(self) -> str:
        if self.kind == "even":
            return str(2 * self.k)
        if self.kind == "inf":
            return "inf"
        return str(self.p)


# ---------------------------------------------------------------------------
# Sum sets and n-extensions
# ---------------------------------------------------------------------------

def _as_array(points: Iterable[Sequence[int]], dim: int) -> np.ndarray:
    pts = [tuple(p) for p in points]
    big = max((abs(x) for p in pts for x in p), default=0)
    dtype = np.int64 if big < 2**40 else object
    return np.array(pts, dtype=dtype).reshape(len(pts), dim)


def sumset(points: np.ndarray, k: int) -> np.ndarray:
    """Distinct sums of ``k`` rows of ``points`` (rows may repeat)."""
    d = points.shape[1]
    out = np.zeros((1, d), dtype=points.dtype)
    for _ in range(k):
        out = (out[:, None, :] + points[None, :, :]).reshape(-1, d)
        out = np.unique(out, axis=0)
    return out


def _differences(plus: np.ndarray, minus: np.ndarray, orthant: bool, chunk: int = 1 << 22) -> Set[MultiIndex]:
    found: Set[MultiIndex] = set()
    d = plus.shape[1]
    step = max(1, chunk // max(1, len(minus) * d))
    for i in range(0, len(plus), step):
        diff = (plus[i:i + step, None, :] - minus[None, :, :]).reshape(-1, d)
        if orthant:
            diff = diff[np.all(diff >= 0, axis=1)]
        found.update(map(tuple, np.unique(diff, axis=0).tolist()))
    return found


def extend(gamma, n: int) -> FreqSet:
    """The ``n``-extension: orthant points ``sum(n+1 of G) - sum(n of G)``."""
    gamma = freqset(gamma).require_orthant()
    if n < 0:
        raise InputError("n must be nonnegative")
    if n == 0:
        return gamma
    arr = _as_array(gamma.points, gamma.dim)
    pts = _differences(sumset(arr, n + 1), sumset(arr, n), orthant=True)
    return FreqSet((tuple(int(x) for x in p) for p in pts), gamma.dim)


@dataclass(frozen=True)
class ExtensionCertificate:
    """``lam = sum(plus) - sum(minus)`` with ``len(plus) = len(minus) + 1``."""

    lam: MultiIndex
    plus: Tuple[MultiIndex, ...]
    minus: Tuple[MultiIndex, ...]

    def check(self) -> bool:
        d = len(self.lam)
        tot = [0] * d
        for p in self.plus:
            tot = [a + b for a, b in zip(tot, p)]
        for m in self.minus:
            tot = [a - b for a, b in zip(tot, m)]
        return tuple(tot) == tuple(self.lam) and len(self.plus) == len(self.minus) + 1

    def to_json(self) -> dict:
        return {
            "lam": list(self.lam),
            "plus": [list(p) for p in self.plus],
            "minus": [list(p) for p in self.minus],
        }


def _multiset_sums(points: Sequence[MultiIndex], k: int) -> Dict[MultiIndex, Tuple[MultiIndex, ...]]:
    out: Dict[MultiIndex, Tuple[MultiIndex, ...]] = {}
    d = len(points[0])
    for combo in combinations_with_replacement(points, k):
        s = tuple(sum(p[i] for p in combo) for i in range(d))
        out.setdefault(s, combo)
    return out


def extension_certificate(gamma, n: int, lam: Sequence[int]) -> Optional[ExtensionCertificate]:
    """Explicit multisets witnessing ``lam`` at level ``n`` (no orthant filter)."""
    gamma = freqset(gamma)
    lam = as_index(lam)
    plus = _multiset_sums(gamma.points, n + 1)
    minus = _multiset_sums(gamma.points, n)
    for s, combo in sorted(minus.items()):
        target = tuple(a + b for a, b in zip(lam, s))
        if target in plus:
            return ExtensionCertificate(lam, plus[target], combo)
    return None


def distance(gamma, lam: Sequence[int], max_n: int = 64) -> Optional[int]:
    """Smallest ``n`` with ``lam = sum(n+1 of G) - sum(n of G)``; ``None`` off the coset."""
    gamma = freqset(gamma)
    lam = as_index(lam)
    if len(lam) != gamma.dim:
        raise InputError(f"dimension mismatch: {len(lam)} vs {gamma.dim}")
    if not contains(affine_lattice(gamma), lam):
        return None
    pts = gamma.points
    lower: Set[MultiIndex] = {(0,) * gamma.dim}
    upper: Set[MultiIndex] = set(pts)
    for n in range(max_n + 1):
        for s in lower:
            if tuple(a + b for a, b in zip(lam, s)) in upper:
                return n
        lower = {tuple(a + b for a, b in zip(s, p)) for s in lower for p in pts}
        upper = {tuple(a + b for a, b in zip(s, p)) for s in upper for p in pts}
    raise InputError(f"distance exceeds max_n={max_n}")


def distance_by_representation(gamma, lam: Sequence[int], max_n: int = 4) -> Optional[int]:
    """Distance from integer representations ``lam = g + sum m_a (a - g)``.

    Brute force over the base point ``g`` and all coefficient vectors with
    positive part and negative part at most ``n``.  Exponential; meant for
    cross-checking :func:`distance` on small inputs.
    """
    gamma = freqset(gamma)
    lam = as_index(lam)
    for n in range(max_n + 1):
        for g in gamma.points:
            others = [p for p in gamma.points if p != g]
            for m in product(range(-n, n + 1), repeat=len(others)):
                if sum(x for x in m if x > 0) > n or -sum(x for x in m if x < 0) > n:
                    continue
                pt = list(g)
                for c, a in zip(m, others):
                    if c:
                        for i in range(gamma.dim):
                            pt[i] += c * (a[i] - g[i])
                if tuple(pt) == lam:
                    return n
    return None


# ---------------------------------------------------------------------------
# Completions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosureResult:
    """Outcome of iterating ``extend`` on a starting set.

    ``FixedPoint``: ``set`` is the completion.  ``FullCoset``: the completion
    is the whole orthant part of the coset, certified either by ``pair``
    (two members whose difference is positive on every non-constant
    coordinate) or by ``periods`` (nonnegative differences of members such
    that every reduced coset point is already in ``set``).  ``Exhausted``:
    budget ran out; ``set`` is what was reached.
    """

    tag: str
    set: FreqSet
    rounds: int
    pair: Optional[Tuple[MultiIndex, MultiIndex]] = None
    periods: Tuple[MultiIndex, ...] = ()
    coset: Optional[EnumerationResult] = None
    truncated: bool = False

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "set": self.set.to_list(),
            "rounds": self.rounds,
            "pair": None if self.pair is None else [list(p) for p in self.pair],
            "periods": [list(v) for v in self.periods],
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class Budget:
    max_rounds: int = 16
    max_coord: int = 128
    max_points: int = 20_000

    def __post_init__(self):
        if self.max_rounds <= 0 or self.max_coord <= 0 or self.max_points <= 0:
            raise InputError("budget values must be positive")


def _free_coords(lat: AffineLattice) -> List[int]:
    return [i for i in range(lat.dim) if any(b[i] for b in lat.basis)]


def _positive_pair(arr: np.ndarray, free: Sequence[int]) -> Optional[Tuple[MultiIndex, MultiIndex]]:
    """Pair ``(a, b)`` with ``b - a >= 1`` on ``free``, smallest difference first."""
    if not free or len(arr) < 2:
        return None
    sub = arr[:, free].astype(np.int64)
    best = None
    for i in range(len(arr)):
        diff = sub - sub[i]
        ok = np.all(diff >= 1, axis=1)
        if ok.any():
            js = np.nonzero(ok)[0]
            sums = diff[js].sum(axis=1)
            for j, s in zip(js, sums):
                key = (int(s), tuple(arr[i].tolist()), tuple(arr[j].tolist()))
                if best is None or key < best:
                    best = key
    if best is None:
        return None
    return best[1], best[2]


def _candidate_periods(arr: np.ndarray, limit: int = 4) -> List[MultiIndex]:
    """Nonzero nonnegative differences of members, one of least sum per support."""
    reps: Dict[Tuple[int, ...], MultiIndex] = {}
    for i in range(len(arr)):
        diff = arr - arr[i]
        ok = np.all(diff >= 0, axis=1) & np.any(diff > 0, axis=1)
        for v in diff[ok]:
            v = tuple(int(x) for x in v)
            supp = tuple(j for j, x in enumerate(v) if x)
            cur = reps.get(supp)
            if cur is None or (sum(v), v) < (sum(cur), cur):
                reps[supp] = v
    ordered = sorted(reps.values(), key=lambda v: (sum(1 for x in v if x), sum(v), v))
    return ordered[:limit]


def _periodic_certificate(lat: AffineLattice, members: Set[MultiIndex], arr: np.ndarray) -> Tuple[MultiIndex, ...]:
    """Periods certifying that ``members`` reach the whole orthant coset, or ``()``.

    If ``v`` is a difference of two members and ``x`` is in the completion,
    ``x + v`` is a one-step extension, and so is ``x - v`` when it stays in
    the orthant.  Hence it suffices that every coset point from which no
    period can be subtracted is already a member, and that this set of
    reduced points is finite.
    """
    periods = _candidate_periods(arr)
    if not periods:
        return ()
    supports = [[j for j, x in enumerate(v) if x] for v in periods]
    seen = set()
    for choice in product(*supports):
        upper: Dict[int, int] = {}
        for v, j in zip(periods, choice):
            upper[j] = min(upper.get(j, v[j] - 1), v[j] - 1)
        key = tuple(sorted(upper.items()))
        if key in seen:
            continue
        seen.add(key)
        if nonneg_direction(lat, zero_coords=upper.keys()) is not None:
            return ()
        bounds = orthant_bounds(lat, upper)
        if bounds is None:
            continue
        box = [math.floor(b) for b in bounds]
        for x in enumerate_box(lat, box):
            if x not in members:
                return ()
    return tuple(periods)


def complete(tee, n: int, budget: Budget | None = None) -> ClosureResult:
    """Iterate ``extend(., n)`` from ``tee`` until it stabilizes or is certified full.

    Points beyond ``budget.max_coord`` are dropped.  Dropping keeps every
    certificate sound (members are still in the completion) but voids a
    fixed point, which is then reported as ``Exhausted``.
    """
    budget = budget or Budget()
    tee = freqset(tee).require_orthant()
    if n < 1:
        raise InputError("complete needs n >= 1")
    lat = affine_lattice(tee)
    coset = enumerate_orthant(lat)
    free = _free_coords(lat)
    current = tee
    truncated = False
    for rnd in range(1, budget.max_rounds + 1):
        grown = extend(current, n)
        kept = [p for p in grown if max(p) <= budget.max_coord]
        if len(kept) < len(grown):
            truncated = True
            grown = FreqSet(kept, tee.dim)
        if grown == current:
            tag = "Exhausted" if truncated else "FixedPoint"
            return ClosureResult(tag, current, rnd, coset=coset, truncated=truncated)
        current = grown
        if len(current) > budget.max_points:
            return ClosureResult("Exhausted", current, rnd, coset=coset, truncated=truncated)
        arr = _as_array(current.points, tee.dim)
        pair = _positive_pair(arr, free)
        if pair is not None:
            final = FreqSet(coset.points, tee.dim) if coset.finite and coset.points else current
            return ClosureResult("FullCoset", final, rnd, pair=pair, coset=coset, truncated=truncated)
        if not coset.finite:
            periods = _periodic_certificate(lat, set(current.points), arr)
            if periods:
                return ClosureResult("FullCoset", current, rnd, periods=periods, coset=coset,
                                     truncated=truncated)
    return ClosureResult("Exhausted", current, budget.max_rounds, coset=coset, truncated=truncated)


def find_positive_direction(tee, alpha: Sequence[int], n: int, budget: Budget | None = None) -> Optional[MultiIndex]:
    """A completion member ``b`` with ``b - alpha`` strictly positive, or ``None``.

    Searches the growing completion round by round (points past
    ``max_coord`` are dropped, which only narrows the search).
    """
    budget = budget or Budget()
    tee = freqset(tee).require_orthant()
    alpha = as_index(alpha)
    if alpha not in tee:
        raise InputError(f"{list(alpha)} is not in the starting set")
    current = tee
    for _ in range(budget.max_rounds + 1):
        hits = [b for b in current if all(x > a for x, a in zip(b, alpha))]
        if hits:
            return hits[0]
        grown = extend(current, n)
        grown = FreqSet([p for p in grown if max(p) <= budget.max_coord], tee.dim)
        if grown == current or len(grown) > budget.max_points:
            return None
        current = grown
    return None


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """``evidence`` is a multi-index, or an integer for Dirichlet sets."""

    contractive: bool
    reason: str
    evidence: Optional[MultiIndex] = None

    def to_json(self) -> dict:
        return {
            "contractive": self.contractive,
            "reason": self.reason,
            "evidence": self.evidence if not isinstance(self.evidence, tuple) else list(self.evidence),
        }


def is_coset_restriction(gamma) -> Tuple[bool, Optional[MultiIndex]]:
    """Whether ``G`` is all of its coset inside the orthant; else a missing point."""
    gamma = freqset(gamma).require_orthant()
    lat = affine_lattice(gamma)
    res = enumerate_orthant(lat)
    if res.finite:
        missing = [p for p in res.points if p not in gamma]
        return (not missing), (missing[0] if missing else None)
    w = res.witness
    k = 1
    while True:
        pt = tuple(b + k * x for b, x in zip(lat.base, w))
        if pt not in gamma:
            return False, pt
        k += 1


def is_contractive_projection_set(gamma, p) -> Verdict:
    """Decide whether ``P_G`` is a contraction on ``H^p``."""
    gamma = freqset(gamma).require_orthant()
    p = PExponent.of(p)
    if p.is_even:
        if p.k == 1:
            return Verdict(True, "Always2")
        grown = extend(gamma, p.k - 1)
        new = grown.difference(gamma)
        if new:
            return Verdict(False, "ExtensionGrew", new[0])
        return Verdict(True, "ExtensionFixed")
    ok, evidence = is_coset_restriction(gamma)
    if ok:
        return Verdict(True, "CosetRestriction")
    return Verdict(False, "NotCosetRestriction", evidence)


def restriction_property(d: int, k: int, p) -> bool:
    """Whether every ``k``-dimensional contractive projection set in ``N_0^d`` is a coset restriction."""
    if not 1 <= k <= d:
        raise InputError(f"need 1 <= k <= d, got k={k}, d={d}")
    p = PExponent.of(p)
    if p.is_inf:
        return True
    if d == 2 or k == 1:
        return not (p.is_even and p.k == 1)
    if (d == 3 and k == 3) or k == 2:
        return not (p.is_even and p.k <= 2)
    return not p.is_even


def linear_reflection(alpha: Sequence[int], beta: Sequence[int]) -> MultiIndex:
    """Reflect ``alpha`` through ``beta``: ``2 beta - alpha``."""
    if len(alpha) != len(beta):
        raise InputError("dimension mismatch")
    return as_index(2 * b - a for a, b in zip(alpha, beta))


def triangular_reflection(alpha: Sequence[int], beta: Sequence[int], gamma: Sequence[int]) -> MultiIndex:
    """Reflect ``alpha`` through ``beta`` and ``gamma``: ``beta + gamma - alpha``."""
    if not len(alpha) == len(beta) == len(gamma):
        raise InputError("dimension mismatch")
    return as_index(b + c - a for a, b, c in zip(alpha, beta, gamma))


def negativity_index(vectors: Sequence[Sequence[int]], require_independent: bool = True) -> int:
    """``sum_j min(0, min_u u_j)`` over ``d`` vectors in ``Z^d``.

    The vectors must be linearly independent unless ``require_independent``
    is switched off.
    """
    vecs = [as_index(v) for v in vectors]
    if not vecs:
        raise InputError("need at least one vector")
    d = len(vecs[0])
    if len(vecs) != d or any(len(v) != d for v in vecs):
        raise InputError("need exactly d vectors of dimension d")
    if require_independent and len(hermite_normal_form(vecs, d)) != d:
        raise InputError("vectors are linearly dependent")
    return sum(min(0, min(v[j] for v in vecs)) for j in range(d))


def distance_layers(gamma, max_n: int) -> Dict[MultiIndex, int]:
    """``{lam: d(G, lam)}`` for every lattice point at distance at most ``max_n``.

    Points outside the orthant are included.
    """
    gamma = freqset(gamma)
    if max_n < 0:
        raise InputError("max_n must be nonnegative")
    arr = _as_array(gamma.points, gamma.dim)
    out: Dict[MultiIndex, int] = {p: 0 for p in gamma.points}
    for n in range(1, max_n + 1):
        for p in _differences(sumset(arr, n + 1), sumset(arr, n), orthant=False):
            out.setdefault(tuple(int(x) for x in p), n)
    return out


def reflections(gamma, kind: str) -> Tuple[MultiIndex, ...]:
    """All linear (``2b - a``) or triangular (``b + c - a``) reflections of distinct members, minus ``G``."""
    gamma = freqset(gamma)
    pts = gamma.points
    found: Set[MultiIndex] = set()
    if kind == "linear":
        for a in pts:
            for b in pts:
                if a != b:
                    found.add(linear_reflection(a, b))
    elif kind == "triangular":
        for a in pts:
            others = [q for q in pts if q != a]
            for i, b in enumerate(others):
                for c in others[i + 1:]:
                    found.add(triangular_reflection(a, b, c))
    else:
        raise InputError(f"unknown reflection kind {kind!r}")
    return tuple(sorted(found - set(pts)))
