"""Floating-point norms on the torus and the perturbation-inequality verifiers.

Trigonometric polynomials are evaluated on the uniform ``N^d`` grid with one
inverse FFT: exponents are reduced mod ``N`` (a modulation, so norms are
unchanged and grid values stay exact) and ``f(grid) = N^d * ifftn(coeffs)``.
Everything here is an estimate.  Callers get the refinement gap and decide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from .errors import InputError, ResourceError
from .extensions import PExponent, extend, is_coset_restriction
from .indices import MultiIndex, as_index, freqset
from .laurent import LaurentPoly
from .lattice import affine_lattice, coordinates, enumerate_orthant
from .polyoracle import even_norm, witness_search_even

DEFAULT_GRID_BUDGET = 1 << 24

Terms = Mapping[Tuple[int, ...], complex]
PolyLike = Union[LaurentPoly, Terms]


@dataclass(frozen=True)
class GridSpec:
    """``N`` points per axis on ``T^dims``; total capped by ``budget``."""

    points_per_dim: int
    dims: int
    budget: int = DEFAULT_GRID_BUDGET

    def __post_init__(self):
        n = self.points_per_dim
        if n < 8 or n & (n - 1):
            raise InputError(f"points_per_dim must be a power of two >= 8, got {n}")
        if self.dims < 1:
            raise InputError("dims must be positive")
        if n**self.dims > self.budget:
            raise ResourceError(f"grid {n}^{self.dims} exceeds the budget of {self.budget} points")

    @property
    def size(self) -> int:
        return self.points_per_dim**self.dims

    def doubled(self) -> "GridSpec":
        return GridSpec(2 * self.points_per_dim, self.dims, self.budget)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    refined: float
    rel_gap: float


def _as_terms(f: PolyLike) -> Tuple[int, Dict[Tuple[int, ...], complex]]:
    if isinstance(f, LaurentPoly):
        return f.dim, {k: float(c) for k, c in f.terms.items()}
    terms = {tuple(k): complex(v) for k, v in f.items()}
    if not terms:
        raise InputError("empty coefficient map needs an explicit dimension; use LaurentPoly")
    return len(next(iter(terms))), terms


def grid_values(f: PolyLike, n: int) -> np.ndarray:
    """Values of ``f`` at the ``n``-th roots of unity grid (complex array of shape ``(n,)*d``)."""
    dim, terms = _as_terms(f)
    coeffs = np.zeros((n,) * dim, dtype=complex)
    for k, c in terms.items():
        coeffs[tuple(x % n for x in k)] += c
    return np.fft.ifftn(coeffs) * (n**dim)


def _p_value(p) -> float:
    if isinstance(p, PExponent):
        return p.value
    if isinstance(p, str):
        return PExponent.parse(p).value
    v = float(p)
    if v < 1:
        raise InputError("p must be at least 1")
    return v


def _mean_power(vals: np.ndarray, p: float) -> float:
    return float(np.mean(np.abs(vals) ** p))


def _sup_refine(f_terms: Dict[Tuple[int, ...], complex], theta: np.ndarray, step: float, sweeps: int = 6) -> float:
    """Coordinate-wise ternary search for a local maximum of ``|f|`` near ``theta``."""
    keys = np.array(list(f_terms.keys()), dtype=float)
    coefs = np.array(list(f_terms.values()), dtype=complex)

    def mag(t):
        return float(abs(np.sum(coefs * np.exp(1j * (keys @ t)))))

    theta = theta.astype(float).copy()
    for _ in range(sweeps):
        for i in range(len(theta)):
            lo, hi = theta[i] - step, theta[i] + step
            for _ in range(40):
                m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
                t1, t2 = theta.copy(), theta.copy()
                t1[i], t2[i] = m1, m2
                if mag(t1) < mag(t2):
                    lo = m1
                else:
                    hi = m2
            cand = theta.copy()
            cand[i] = (lo + hi) / 2
            if mag(cand) >= mag(theta):
                theta = cand
        step /= 2
    return mag(theta)


def sup_norm(f: PolyLike, n: int, starts: int = 4) -> float:
    """Grid maximum of ``|f|`` polished by local ternary search (heuristic, not rigorous)."""
    dim, terms = _as_terms(f)
    vals = np.abs(grid_values(terms, n))
    flat = vals.ravel()
    best = float(flat.max())
    order = np.argsort(flat)[::-1][:starts]
    for idx in order:
        pos = np.array(np.unravel_index(idx, vals.shape), dtype=float)
        best = max(best, _sup_refine(terms, 2 * np.pi * pos / n, 2 * np.pi / n))
    return best


def lp_norm_estimate(f: PolyLike, p, grid: GridSpec) -> NormEstimate:
    """``||f||_p`` on the grid and on the grid doubled in every direction."""
    pv = _p_value(p)
    dim, terms = _as_terms(f)
    if dim != grid.dims:
        raise InputError(f"grid has {grid.dims} dims but f has {dim}")
    fine = grid.doubled()
    if math.isinf(pv):
        value = sup_norm(terms, grid.points_per_dim)
        refined = sup_norm(terms, fine.points_per_dim)
    else:
        value = _mean_power(grid_values(terms, grid.points_per_dim), pv) ** (1 / pv)
        refined = _mean_power(grid_values(terms, fine.points_per_dim), pv) ** (1 / pv)
    gap = abs(value - refined) / max(refined, 1e-300)
    return NormEstimate(value, refined, gap)


def _power_mean(terms, p: float, n: int) -> Tuple[float, float]:
    """``mean |f|^p`` at ``n`` and ``2n`` points per axis."""
    return _mean_power(grid_values(terms, n), p), _mean_power(grid_values(terms, 2 * n), p)


def _beats(left, right, p: float, n: int) -> bool:
    """``||left||_p < ||right||_p`` with a margin above the refinement gap."""
    if math.isinf(p):
        a, b = sup_norm(left, n), sup_norm(right, n)
        a2, b2 = sup_norm(left, 2 * n), sup_norm(right, 2 * n)
        margin = abs(a - a2) + abs(b - b2) + 1e-12 * b
        return max(a, a2) < min(b, b2) - margin
    a, a2 = _power_mean(left, p, n)
    b, b2 = _power_mean(right, p, n)
    margin = 4 * (abs(a - a2) + abs(b - b2)) + 1e-14 * b
    return a2 < b2 - margin


# ---------------------------------------------------------------------------
# Lemma verifiers
# ---------------------------------------------------------------------------

def _line_pair(c: float, eps: float):
    left = {(-1,): c * eps, (0,): 1.0, (1,): eps}
    right = {(0,): 1.0, (1,): eps}
    return left, right


def verify_line_lemma(p, eps: float = 1e-2, halvings: int = 6, n: int = 64) -> bool:
    """Check ``||c eps conj(z) + 1 + eps z||_p < ||1 + eps z||_p`` with ``c = 2/p - 1``."""
    pv = _p_value(p)
    if pv == 2:
        return False
    c = -1.0 if math.isinf(pv) else 2 / pv - 1
    for _ in range(halvings + 1):
        if _beats(*_line_pair(c, eps), pv, n):
            return True
        eps /= 2
    return False


def _plane_pair(c: float, eps: float):
    left = {(0, 0): 1.0, (1, 0): eps, (0, 1): eps, (1, 1): c * eps * eps}
    right = {(0, 0): 1.0, (1, 0): eps, (0, 1): eps}
    return left, right


def verify_plane_lemma(p, eps: float = 1e-2, halvings: int = 6, n: int = 32) -> bool:
    """Check the two-variable perturbation inequality with ``c = 1 - p/2``.

    At ``p = inf`` this compares ``1 + z1 + z2 - z1 z2`` against ``1 + z1 + z2``.
    """
    pv = _p_value(p)
    if pv == 2:
        return False
    if math.isinf(pv):
        left = {(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0, (1, 1): -1.0}
        right = {(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0}
        return _beats(left, right, pv, 256)
    c = 1 - pv / 2
    for _ in range(halvings + 1):
        if _beats(*_plane_pair(c, eps), pv, n):
            return True
        eps /= 2
    return False


def plane_sup_value(n: int = 512) -> float:
    """Estimated ``||1 + z1 + z2 - z1 z2||_inf`` (exactly ``2 sqrt 2``)."""
    return sup_norm({(0, 0): 1.0, (1, 0): 1.0, (0, 1): 1.0, (1, 1): -1.0}, n)


def verify_inf_lemma(alpha: Sequence[int], eps: float = 1e-2, n: Optional[int] = None) -> bool:
    """Check ``||d + sum z_j - eps z^alpha||_inf < 2d``."""
    alpha = as_index(alpha)
    d = len(alpha)
    if eps <= 0:
        return False
    if n is None:
        n = {1: 1024, 2: 256, 3: 64}.get(d, 32)
    GridSpec(n, d)
    terms: Dict[Tuple[int, ...], complex] = {(0,) * d: float(d)}
    for j in range(d):
        e = [0] * d
        e[j] = 1
        terms[tuple(e)] = terms.get(tuple(e), 0) + 1.0
    terms[alpha] = terms.get(alpha, 0) - eps
    left = sup_norm(terms, n, starts=8)
    return left < 2 * d - 1e-9


def quadratic_coefficient_check(p, c: float, n: int = 64) -> Tuple[float, float]:
    """Extrapolated ``eps^2`` coefficient of ``||c eps conj(z) + 1 + eps z||_p^p - 1``.

    Returns ``(fitted, predicted)``.  The expansion is even in ``eps`` so
    Richardson steps use the factor 4.
    """
    pv = _p_value(p)
    if math.isinf(pv):
        raise InputError("the quadratic coefficient is defined for finite p only")
    qs = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        left, _ = _line_pair(c, eps)
        qs.append((_mean_power(grid_values(left, n), pv) - 1) / eps**2)
    r1 = [(4 * qs[i + 1] - qs[i]) / 3 for i in range(2)]
    fitted = (16 * r1[1] - r1[0]) / 15
    predicted = (pv**2 / 4) * (c + 1 - 2 / pv) ** 2 + pv - 1
    return fitted, predicted


# ---------------------------------------------------------------------------
# Leading coefficient of the pairing series
# ---------------------------------------------------------------------------

def gen_binom(a, k: int):
    """``binom(a, k)`` for any rational or real ``a`` and integer ``k`` (zero when ``k < 0``)."""
    if k < 0:
        return a * 0
    out = a * 0 + 1
    for i in range(k):
        out = out * (a - i) / (i + 1)
    return out


def _multinomial(parts: Sequence[int]) -> int:
    out, total = 1, 0
    for x in parts:
        total += x
        out *= math.comb(total, x)
    return out


def shapiro_leading_coefficient(p, m: Sequence[int]) -> float:
    """Lowest-order coefficient of the pairing series for non-even ``p``."""
    pe = PExponent.of(p)
    if pe.is_even or pe.is_inf:
        raise InputError("leading coefficient is defined for finite p that is not an even integer")
    m = [int(x) for x in m]
    if not any(x > 0 for x in m):
        raise InputError("need at least one positive entry in m")
    a = pe.exact / 2 - 1
    pos = [x for x in m if x > 0]
    neg = [-x for x in m if x < 0]
    mp, mm = sum(pos), sum(neg)
    val = gen_binom(a, mm) * _multinomial(pos) * _multinomial(neg) * (gen_binom(a, mp) + gen_binom(a, mp - 1))
    return float(val)


def shapiro_series_ratio(p, m: Sequence[int], eps: float, n: int = 32) -> float:
    """``F(eps) / eps^M`` by quadrature, ``f = 1 + eps * sum z_j`` on ``T^len(m)``."""
    pv = _p_value(p)
    d = len(m)
    M = sum(abs(x) for x in m)
    terms: Dict[Tuple[int, ...], complex] = {(0,) * d: 1.0}
    for j in range(d):
        e = [0] * d
        e[j] = 1
        terms[tuple(e)] = eps
    vals = grid_values(terms, n)
    integrand = np.abs(vals) ** (pv - 2) * vals
    coeffs = np.fft.fftn(integrand) / n**d
    return float(coeffs[tuple(x % n for x in m)].real) / eps**M


def shapiro_leading_numeric(p, m: Sequence[int], eps: Tuple[float, float] = (1e-2, 5e-3)) -> float:
    """Richardson-extrapolated limit of :func:`shapiro_series_ratio` (series in ``eps^2``)."""
    a, b = (shapiro_series_ratio(p, m, e) for e in eps)
    return (4 * b - a) / 3


# ---------------------------------------------------------------------------
# Operator norm lower bounds
# ---------------------------------------------------------------------------

def _pow2_at_least(x: int) -> int:
    n = 8
    while n < x:
        n *= 2
    return n


class _Reduced:
    """Frequencies rewritten in HNF coordinates of their coset (an isometric reindexing)."""

    def __init__(self, gamma, extra: Sequence[MultiIndex]):
        self.lat = affine_lattice(list(gamma) + list(extra))
        self.rank = self.lat.rank

    def __call__(self, pt) -> Tuple[int, ...]:
        t = coordinates(self.lat, pt)
        if t is None:
            raise InputError(f"{list(pt)} is not in the coset")
        return t if t else (0,)


def _ratio_objective(pts, lam, p: float, n: int):
    keys = list(pts) + [lam]

    def ratio(x):
        f = {k: v for k, v in zip(pts, x[:-1])}
        h = dict(f)
        h[lam] = h.get(lam, 0) + x[-1]
        if math.isinf(p):
            num = np.abs(grid_values(f, n)).max()
            den = np.abs(grid_values(h, n)).max()
        else:
            num = _mean_power(grid_values(f, n), p) ** (1 / p)
            den = _mean_power(grid_values(h, n), p) ** (1 / p)
        return float(num / den) if den > 0 else 1.0

    return ratio


def _grid_for(points, p: float, rank: int) -> int:
    span = max(max(c) - min(c) for c in zip(*points)) + 1
    mult = int(p) // 2 + 1 if not math.isinf(p) and p == int(p) else 4
    n = _pow2_at_least(mult * span + 1)
    while n**rank > (1 << 18) and n > 8:
        n //= 2
    return n


def _polish(pts, lam, p: float, x0: np.ndarray, n: int, iters: int) -> Tuple[float, np.ndarray]:
    obj = _ratio_objective(pts, lam, p, n)
    res = minimize(lambda x: -obj(x), x0, method="Nelder-Mead",
                   options={"maxiter": iters, "xatol": 1e-9, "fatol": 1e-13})
    x = res.x if -res.fun >= obj(x0) else x0
    return obj(x), x


def _exact_even_ratio(gamma, lam, x, k: int) -> Optional[float]:
    """Re-evaluate a float candidate exactly after rounding its coefficients."""
    coefs = [Fraction(float(v)).limit_denominator(10**6) for v in x]
    f = LaurentPoly(len(lam), {g: c for g, c in zip(gamma, coefs[:-1])})
    if not f:
        return None
    h = f + LaurentPoly.monomial(lam, coefs[-1])
    if not h:
        return None
    r = even_norm(f, k) / even_norm(h, k)
    return float(r) ** (1 / (2 * k))


def _lemma_inf_start(gamma_r, lam_r, rank: int) -> Optional[np.ndarray]:
    """Start from ``n + sum z^(g_j - g_0) - eps z^lam`` over an integral affine frame."""
    for frame in combinations(range(len(gamma_r)), rank + 1):
        g0 = gamma_r[frame[0]]
        rows = [tuple(a - b for a, b in zip(gamma_r[j], g0)) for j in frame[1:]]
        det = round(np.linalg.det(np.array(rows, dtype=float))) if rows else 1
        if abs(det) != 1:
            continue
        x = np.zeros(len(gamma_r) + 1)
        x[frame[0]] = rank
        for j in frame[1:]:
            x[j] = 1.0
        x[-1] = -0.05
        return x
    return None


def operator_norm_lower_bound(gamma, p, max_candidates: int = 6, polish_iters: int = 1500) -> float:
    """A lower bound for ``||P_G||`` on ``H^p`` from explicit test functions.

    Even ``p``: exact witnesses at every grown point, polished numerically
    and re-verified exactly.  Other ``p``: small perturbations at coset
    points outside ``G``, counted only when the gain clears the quadrature
    gap.  Never below 1.
    """
    gamma = freqset(gamma).require_orthant()
    pe = PExponent.of(p)
    pv = pe.value
    if pe.is_even and pe.k == 1:
        return 1.0
    if pe.is_even:
        cands = list(extend(gamma, pe.k - 1).difference(gamma))
    else:
        ok, _ = is_coset_restriction(gamma)
        if ok:
            return 1.0
        lat = affine_lattice(gamma)
        cap = max(max(pt) for pt in gamma.points) + 2
        cands = [q for q in enumerate_orthant(lat, cap=cap).points if q not in gamma]
    best = 1.0
    for lam in cands[:max_candidates]:
        red = _Reduced(gamma.points, [lam])
        g_r = [red(g) for g in gamma.points]
        l_r = red(lam)
        n = _grid_for(g_r + [l_r], pv, len(l_r))
        starts: List[np.ndarray] = []
        if pe.is_even:
            w = witness_search_even(gamma, pe.k - 1, lam)
            if w is not None:
                best = max(best, float(w.ratio_p) ** (1 / pv))
                starts.append(np.array([float(w.f.coeff(g)) for g in gamma.points] + [float(w.c)]))
        else:
            for eps in (0.5, 0.25):
                for sign in (1, -1):
                    starts.append(np.array([1.0] + [eps] * (len(g_r) - 1) + [sign * eps**2]))
            if pe.is_inf:
                s = _lemma_inf_start(g_r, l_r, red.rank)
                if s is not None:
                    starts.append(s)
        for x0 in starts:
            val, x = _polish(g_r, l_r, pv, x0, n, polish_iters)
            if val <= 1:
                continue
            if pe.is_even:
                exact = _exact_even_ratio(g_r, l_r, x, pe.k)
                if exact is not None:
                    best = max(best, exact)
            else:
                f = {k: v for k, v in zip(g_r, x[:-1])}
                h = dict(f)
                h[l_r] = h.get(l_r, 0) + x[-1]
                if _beats(h, f, pv, n):
                    if pe.is_inf:
                        num, den = sup_norm(f, 2 * n), sup_norm(h, 2 * n)
                    else:
                        num = _mean_power(grid_values(f, 2 * n), pv) ** (1 / pv)
                        den = _mean_power(grid_values(h, 2 * n), pv) ** (1 / pv)
                    best = max(best, num / den)
    return best


# ---------------------------------------------------------------------------
# Growth table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthTable:
    """Lower bounds ``(1 + delta)^m / m^2`` for the ``m``-th block norm."""

    n: int
    p: str
    delta_p: float
    rows: Tuple[Tuple[int, float], ...]

    def to_json(self, every: int = 1) -> dict:
        rows = [r for r in self.rows if r[0] % every == 0 or r[0] == len(self.rows)]
        return {"n": self.n, "p": self.p, "delta_p": self.delta_p, "kind": "lower bounds",
                "rows": [[m, v] for m, v in rows]}


def growth_gamma(n: int):
    if n == 1:
        return [(3, 0, 0), (0, 3, 0), (1, 1, 1)]
    return [(n, 1, 0, 1), (n + 1, 0, 1, 0), (0, 0, n + 1, 0), (0, 0, 0, n + 1)]


def _row(m: int, delta: float) -> float:
    return math.exp(m * math.log1p(delta) - 2 * math.log(m))


def tn_growth_table(n: int, p, m_max: Optional[int] = None, target: float = 10.0,
                    limit: int = 10**7) -> GrowthTable:
    """Rows ``(m, (1 + delta_p)^m / m^2)`` with ``delta_p`` measured on the block set for ``n``."""
    if n < 1:
        raise InputError("n must be at least 1")
    pe = PExponent.of(p)
    if pe.is_even and pe.k <= n + 1:
        raise InputError(
            f"p={pe} gives a bounded operator: T_n is bounded on H^p if and only if "
            f"p=2,4,...,{2 * (n + 1)}"
        )
    delta = operator_norm_lower_bound(growth_gamma(n), pe) - 1
    if m_max is None:
        m_max = 10
        if delta > 0:
            m = 1
            while _row(m, delta) <= target and m < limit:
                m += 1
            m_max = max(m, 10)
    rows = tuple((m, _row(m, delta)) for m in range(1, m_max + 1))
    return GrowthTable(n, str(pe), delta, rows)
