"""Affine integer lattices generated by frequency sets.

The coset generated by a finite set ``G`` is ``g0 + L`` where ``L`` is the
subgroup spanned by the differences ``g - g0``.  ``L`` is stored through its
Hermite normal form, so equal cosets have equal field values.

Nonnegativity questions (is the coset's intersection with the orthant
finite, how far does it extend) are answered exactly with Fourier-Motzkin
elimination over the rationals, in the coordinates of the HNF basis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import InputError, ResourceError
from .indices import FreqSet, MultiIndex, as_index, freqset, in_orthant
from .laurent import LaurentPoly

DEFAULT_MAX_POINTS = 1_000_000


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms
# ---------------------------------------------------------------------------

def hermite_normal_form(rows: Iterable[Sequence[int]], ncols: int | None = None) -> List[List[int]]:
    """Row-echelon Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows only.  Pivots are positive and strictly move
    right; entries above a pivot lie in ``[0, pivot)``.
    """
    A = [list(map(int, r)) for r in rows]
    if ncols is None:
        if not A:
            return []
        ncols = len(A[0])
    m = len(A)
    r = 0
    for col in range(ncols):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if A[i][col] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(A[i][col]))
            A[r], A[piv] = A[piv], A[r]
            clean = True
            for i in range(r + 1, m):
                if A[i][col]:
                    q = A[i][col] // A[r][col]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    if A[i][col]:
                        clean = False
            if clean:
                break
        if A[r][col] == 0:
            continue
        if A[r][col] < 0:
            A[r] = [-a for a in A[r]]
        p = A[r][col]
        for i in range(r):
            q = A[i][col] // p
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    return A[:r]


def _pivot(row: Sequence[int]) -> int:
    return next(i for i, a in enumerate(row) if a)


def smith_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> Tuple[List[int], List[List[int]]]:
    """Diagonal of the Smith form of ``rows`` and the column transform ``V``.

    ``U @ A @ V = diag`` for some unimodular ``U``.  Only ``V`` is tracked;
    it is what turns membership in the row lattice into congruences.
    """
    A = [list(map(int, r)) for r in rows]
    m = len(A)
    V = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def col_op(j: int, t: int, q: int) -> None:  # col_j -= q * col_t
        for M in (A, V):
            for row in M:
                row[j] -= q * row[t]

    def col_swap(a: int, b: int) -> None:
        for M in (A, V):
            for row in M:
                row[a], row[b] = row[b], row[a]

    diag: List[int] = []
    t = 0
    while t < min(m, ncols):
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, ncols) if A[i][j]]
        if not entries:
            break
        _, i0, j0 = min(entries)
        A[t], A[i0] = A[i0], A[t]
        col_swap(t, j0)
        while True:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    dirty = dirty or A[i][t] != 0
            for j in range(t + 1, ncols):
                if A[t][j]:
                    col_op(j, t, A[t][j] // A[t][t])
                    dirty = dirty or A[t][j] != 0
            if dirty:
                cands = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cands += [(abs(A[t][j]), t, j) for j in range(t + 1, ncols) if A[t][j]]
                _, i1, j1 = min(cands)
                if j1 == t:
                    A[t], A[i1] = A[i1], A[t]
                else:
                    col_swap(t, j1)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, ncols) if A[i][j] % A[t][t]),
                None,
            )
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad])]
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
        diag.append(A[t][t])
        t += 1
    return diag, V


# ---------------------------------------------------------------------------
# Affine lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineLattice:
    """The coset ``base + span_Z(basis)``; ``basis`` is in Hermite normal form.

    Equality compares cosets: the basis is canonical already, and the base is
    compared through :attr:`canonical_base`, its reduction modulo the basis.
    """

    dim: int
    base: MultiIndex
    basis: Tuple[MultiIndex, ...]

    @property
    def canonical_base(self) -> MultiIndex:
        """Coset representative with pivot entries reduced into ``[0, pivot)``."""
        x = list(self.base)
        for b in self.basis:
            j = _pivot(b)
            q = x[j] // b[j]
            if q:
                x = [xi - q * bi for xi, bi in zip(x, b)]
        return tuple(x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AffineLattice):
            return NotImplemented
        return (self.dim, self.basis, self.canonical_base) == (other.dim, other.basis, other.canonical_base)

    def __hash__(self) -> int:
        return hash((self.dim, self.basis, self.canonical_base))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> Tuple[int, ...]:
        return tuple(_pivot(b) for b in self.basis)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "base": list(self.base),
            "basis": [list(b) for b in self.basis],
            "rank": self.rank,
        }


def lattice_from_generators(base: Sequence[int], directions: Iterable[Sequence[int]]) -> AffineLattice:
    base = as_index(base)
    dirs = [tuple(v) for v in directions]
    for v in dirs:
        if len(v) != len(base):
            raise InputError("direction has wrong dimension")
    basis = hermite_normal_form(dirs, len(base))
    return AffineLattice(len(base), base, tuple(tuple(b) for b in basis))


def affine_lattice(gamma) -> AffineLattice:
    """Coset generated by a finite frequency set, based at its smallest point."""
    gamma = freqset(gamma)
    base = gamma.points[0]
    diffs = [tuple(a - b for a, b in zip(p, base)) for p in gamma.points[1:]]
    return lattice_from_generators(base, diffs)


def coordinates(lat: AffineLattice, lam: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """Integer coefficients of ``lam - base`` in the HNF basis, or ``None``."""
    if len(lam) != lat.dim:
        raise InputError(f"dimension mismatch: {len(lam)} vs {lat.dim}")
    resid = [a - b for a, b in zip(lam, lat.base)]
    coefs = []
    for b in lat.basis:
        p = _pivot(b)
        if any(resid[:p]):
            return None
        q, rem = divmod(resid[p], b[p])
        if rem:
            return None
        coefs.append(q)
        if q:
            resid = [x - q * y for x, y in zip(resid, b)]
    if any(resid):
        return None
    return tuple(coefs)


def contains(lat: AffineLattice, lam: Sequence[int]) -> bool:
    return coordinates(lat, lam) is not None


def point_at(lat: AffineLattice, coefs: Sequence[int]) -> MultiIndex:
    x = list(lat.base)
    for c, b in zip(coefs, lat.basis):
        for i in range(lat.dim):
            x[i] += c * b[i]
    return tuple(x)


# ---------------------------------------------------------------------------
# Fourier-Motzkin elimination
# ---------------------------------------------------------------------------
# A constraint (a, r) with integer entries means  sum(a[i] * t[i]) >= r.

Constraint = Tuple[Tuple[int, ...], int]


def _normalize(a: Sequence[int], r: int) -> Optional[Constraint]:
    g = 0
    for x in a:
        g = math.gcd(g, x)
    if g == 0:
        if r > 0:
            raise _Infeasible
        return None
    # Divide through only when the right-hand side stays integral.
    if r % g == 0:
        return tuple(x // g for x in a), r // g
    return tuple(a), r


class _Infeasible(Exception):
    pass


def _eliminate(cons: Iterable[Constraint], var: int) -> List[Constraint]:
    pos, neg, keep = [], [], set()
    for a, r in cons:
        if a[var] > 0:
            pos.append((a, r))
        elif a[var] < 0:
            neg.append((a, r))
        else:
            keep.add((a, r))
    for ap, rp in pos:
        for an, rn in neg:
            u, v = -an[var], ap[var]
            c = _normalize([u * x + v * y for x, y in zip(ap, an)], u * rp + v * rn)
            if c is not None:
                keep.add(c)
    return sorted(keep)


def _fm_solve(cons: Iterable[Constraint], nvars: int) -> Optional[List[Fraction]]:
    """A rational point satisfying all constraints, or ``None`` if infeasible."""
    try:
        cur = []
        for a, r in cons:
            c = _normalize(a, r)
            if c is not None:
                cur.append(c)
        stages = []
        for var in reversed(range(nvars)):
            stages.append((var, cur))
            cur = _eliminate(cur, var)
    except _Infeasible:
        return None
    values = [Fraction(0)] * nvars
    for var, system in reversed(stages):
        lo = hi = None
        for a, r in system:
            if a[var] == 0:
                continue
            rest = sum(a[i] * values[i] for i in range(nvars) if i != var)
            bound = Fraction(r - rest) / a[var]
            if a[var] > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None:
            values[var] = lo
        elif hi is not None:
            values[var] = hi
    return values


def _project_upper(cons: Iterable[Constraint], nvars: int, target: int) -> Tuple[bool, Optional[Fraction]]:
    """Eliminate every variable except ``target``; return (feasible, sup of target)."""
    try:
        cur = [c for c in (_normalize(a, r) for a, r in cons) if c is not None]
        for var in range(nvars):
            if var != target:
                cur = _eliminate(cur, var)
    except _Infeasible:
        return False, None
    hi = None
    lo = None
    for a, r in cur:
        if a[target] < 0:
            b = Fraction(r, a[target])
            hi = b if hi is None else min(hi, b)
        elif a[target] > 0:
            b = Fraction(r, a[target])
            lo = b if lo is None else max(lo, b)
    if lo is not None and hi is not None and lo > hi:
        return False, None
    return True, hi


def _orthant_constraints(lat: AffineLattice, nvars: int, homogeneous: bool) -> List[Constraint]:
    cons = []
    for k in range(lat.dim):
        a = tuple(b[k] for b in lat.basis) + (0,) * (nvars - lat.rank)
        cons.append((a, 0 if homogeneous else -lat.base[k]))
    return cons


def nonneg_direction(lat: AffineLattice, zero_coords: Iterable[int] = ()) -> Optional[MultiIndex]:
    """A nonzero lattice direction with all entries >= 0, or ``None``.

    Entries listed in ``zero_coords`` are additionally forced to vanish.
    The direction is primitive in HNF coordinates.
    """
    r = lat.rank
    if r == 0:
        return None
    cons = _orthant_constraints(lat, r, homogeneous=True)
    for k in zero_coords:
        cons.append((tuple(-b[k] for b in lat.basis), 0))
    cons.append((tuple(sum(b) for b in lat.basis), 1))
    sol = _fm_solve(cons, r)
    if sol is None:
        return None
    den = 1
    for x in sol:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in sol]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints]
    w = [0] * lat.dim
    for c, b in zip(ints, lat.basis):
        for i in range(lat.dim):
            w[i] += c * b[i]
    return tuple(w)


def direction_cone_trivial(lat: AffineLattice) -> bool:
    """True iff no nonzero lattice direction is componentwise nonnegative."""
    return nonneg_direction(lat) is None


def orthant_bounds(lat: AffineLattice, upper: Dict[int, int] | None = None) -> Optional[List[Optional[Fraction]]]:
    """Exact per-coordinate maxima over ``{x in affine hull : 0 <= x, x_k <= upper[k]}``.

    ``None`` if that region is empty; an entry is ``None`` when unbounded.
    """
    r = lat.rank
    upper = upper or {}
    if r == 0:
        x = lat.base
        if not in_orthant(x) or any(x[k] > u for k, u in upper.items()):
            return None
        return [Fraction(v) for v in x]
    base_cons = _orthant_constraints(lat, r + 1, homogeneous=False)
    for k, u in upper.items():
        base_cons.append((tuple(-b[k] for b in lat.basis) + (0,), lat.base[k] - u))
    out: List[Optional[Fraction]] = []
    for j in range(lat.dim):
        obj = (tuple(b[j] for b in lat.basis) + (-1,), -lat.base[j])
        feasible, hi = _project_upper(base_cons + [obj], r + 1, r)
        if not feasible:
            return None
        out.append(hi)
    return out


def enumerate_box(lat: AffineLattice, upper: Sequence[int], max_points: int = DEFAULT_MAX_POINTS) -> List[MultiIndex]:
    """All lattice points ``x`` with ``0 <= x <= upper`` componentwise."""
    if lat.rank == 0:
        x = lat.base
        return [x] if in_orthant(x) and all(a <= u for a, u in zip(x, upper)) else []
    pivots = lat.pivots
    d = lat.dim
    # Columns that are final once the i-th coefficient is fixed.
    settled = [range(pivots[i], pivots[i + 1] if i + 1 < len(pivots) else d) for i in range(len(pivots))]
    found: List[MultiIndex] = []

    def ok(x, cols) -> bool:
        return all(0 <= x[k] <= upper[k] for k in cols)

    if not ok(lat.base, range(pivots[0])):
        return []

    def rec(i: int, x: List[int]) -> None:
        b = lat.basis[i]
        p = pivots[i]
        piv = b[p]
        lo = -(x[p] // piv)  # ceil(-x[p] / piv)
        hi = (upper[p] - x[p]) // piv
        for c in range(lo, hi + 1):
            y = [xi + c * bi for xi, bi in zip(x, b)]
            if not ok(y, settled[i]):
                continue
            if i + 1 == len(pivots):
                found.append(tuple(y))
                if len(found) > max_points:
                    raise ResourceError(f"more than {max_points} lattice points in the box")
            else:
                rec(i + 1, y)

    rec(0, list(lat.base))
    return sorted(found)


@dataclass(frozen=True)
class EnumerationResult:
    """Outcome of listing ``Lambda intersect N_0^d``.

    ``tag`` is ``"Finite"`` (``points`` is complete), ``"Infinite"`` (with a
    nonnegative ``witness`` direction; ``points`` is whatever lies within the
    cap, if one was given) or ``"Truncated"`` (finite, but the bounding box
    exceeded the cap, so only points within the cap are listed).
    """

    tag: str
    points: Tuple[MultiIndex, ...]
    witness: Optional[MultiIndex] = None
    bounds: Optional[Tuple[int, ...]] = None

    @property
    def finite(self) -> bool:
        return self.tag == "Finite"

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "points": [list(p) for p in self.points],
            "witness": None if self.witness is None else list(self.witness),
            "bounds": None if self.bounds is None else list(self.bounds),
        }


def enumerate_orthant(lat: AffineLattice, cap: int | None = None, max_points: int = DEFAULT_MAX_POINTS) -> EnumerationResult:
    """List the coset's points in the nonnegative orthant."""
    if cap is not None and cap < 0:
        raise InputError("cap must be nonnegative")
    w = nonneg_direction(lat)
    if w is not None:
        pts: Tuple[MultiIndex, ...] = ()
        if cap is not None:
            pts = tuple(enumerate_box(lat, [cap] * lat.dim, max_points))
        return EnumerationResult("Infinite", pts, witness=w)
    bounds = orthant_bounds(lat)
    if bounds is None:
        return EnumerationResult("Finite", (), bounds=None)
    ub = tuple(math.floor(b) for b in bounds)
    if cap is not None and any(u > cap for u in ub):
        box = [min(u, cap) for u in ub]
        return EnumerationResult("Truncated", tuple(enumerate_box(lat, box, max_points)), bounds=ub)
    return EnumerationResult("Finite", tuple(enumerate_box(lat, ub, max_points)), bounds=ub)


# ---------------------------------------------------------------------------
# Annihilators and averaging projections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnnihilatorDecomposition:
    """Smith decomposition of ``Z^d / L``.

    ``finite_part`` lists ``(k, g)``: the annihilator contains the points
    ``exp(2 pi i j g / k)``.  ``torus_generators`` span the connected part,
    ``w -> w**g``.  A frequency ``a`` lies in ``L`` iff ``a.g = 0 mod k`` for
    every finite factor and ``a.g = 0`` for every torus generator.
    """

    dim: int
    finite_part: Tuple[Tuple[int, MultiIndex], ...]
    torus_generators: Tuple[MultiIndex, ...] = field(default=())

    @property
    def torus_rank(self) -> int:
        return len(self.torus_generators)

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self.finite_part)


def annihilator(lat: AffineLattice) -> AnnihilatorDecomposition:
    """Decompose the annihilator of the direction lattice (the base is ignored)."""
    diag, V = smith_normal_form(lat.basis, lat.dim)
    cols = [tuple(V[i][j] for i in range(lat.dim)) for j in range(lat.dim)]
    finite = tuple((k, cols[j]) for j, k in enumerate(diag) if k > 1)
    torus = tuple(cols[len(diag):])
    return AnnihilatorDecomposition(lat.dim, finite, torus)


def root_of_unity_average(k: int, m: int) -> Fraction:
    """``(1/k) * sum_j omega_k**(j*m)``, summed in closed form.

    The geometric series collapses to 1 when ``k`` divides ``m`` and to 0
    otherwise.
    """
    if k < 1:
        raise InputError("order must be positive")
    return Fraction(1) if m % k == 0 else Fraction(0)


def character_weight(dec: AnnihilatorDecomposition, alpha: Sequence[int]) -> Fraction:
    """Haar average of ``zeta**alpha`` over the annihilator."""
    w = Fraction(1)
    for k, g in dec.finite_part:
        w *= root_of_unity_average(k, sum(a * b for a, b in zip(alpha, g)))
        if not w:
            return w
    for g in dec.torus_generators:
        if sum(a * b for a, b in zip(alpha, g)):
            return Fraction(0)
    return w


def annihilator_average(dec: AnnihilatorDecomposition, translate: Sequence[int], f: LaurentPoly) -> LaurentPoly:
    """Project ``f`` onto the frequencies ``translate + L`` by averaging over the annihilator."""
    if len(translate) != dec.dim or f.dim != dec.dim:
        raise InputError("dimension mismatch")
    out = {}
    for alpha, c in f.terms.items():
        w = character_weight(dec, [a - t for a, t in zip(alpha, translate)])
        if w:
            out[alpha] = c * w
    return LaurentPoly(f.dim, out)


# ---------------------------------------------------------------------------
# Reflection Euclid
# ---------------------------------------------------------------------------

def reflection_gcd(a: int, b: int) -> Tuple[int, List[Tuple[int, int]]]:
    """gcd by repeated linear reflection ``(a, b) -> (a, |2a - b|)``.

    Each step replaces the larger value; every new value is reachable from the
    previous pair through one reflection.  The trace lists the sorted pair
    after each step.  Stops once the smaller value divides the larger.
    """
    if a < 1 or b < 1:
        raise InputError("reflection_gcd needs positive integers")
    a, b = sorted((a, b))
    trace: List[Tuple[int, int]] = []
    while b % a:
        c = abs(2 * a - b)
        a, b = sorted((a, c))
        trace.append((a, b))
    return a, trace
