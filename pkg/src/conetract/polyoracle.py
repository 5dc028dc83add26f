"""Exact even-exponent norms, Shapiro pairings and non-contractivity witnesses.

For ``p = 2k`` the integral of ``|f|^p`` is the sum of squared coefficients
of ``f**k``, so everything here is exact rational arithmetic on
:class:`~conetract.laurent.LaurentPoly`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import InputError
from .indices import FreqSet, MultiIndex, as_index, freqset
from .laurent import LaurentPoly, conj, mul, power

__all__ = [
    "WitnessReport",
    "even_norm",
    "shapiro_pairing",
    "extension_support_oracle",
    "witness_search_even",
]


def even_norm(f: LaurentPoly, k: int) -> Fraction:
    """``||f||_{2k}^{2k}`` computed exactly by Parseval applied to ``f**k``."""
    if k < 1:
        raise InputError("k must be at least 1")
    return sum((c * c for _, c in power(f, k)), Fraction(0))


def shapiro_pairing(f: LaurentPoly, n: int, lam: Sequence[int]) -> Fraction:
    """Coefficient of ``z**lam`` in ``f**(n+1) * conj(f)**n``.

    For real coefficients this equals the integral of
    ``|f|^(p-2) f conj(z^lam)`` with ``p = 2(n+1)``.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    lam = as_index(lam)
    if len(lam) != f.dim:
        raise InputError("lam has the wrong dimension")
    return mul(power(f, n + 1), power(conj(f), n)).coeff(lam)


def extension_support_oracle(gamma, n: int) -> FreqSet:
    """Orthant support of ``f**(n+1) * conj(f)**n`` for the all-ones ``f`` on ``gamma``."""
    gamma = freqset(gamma).require_orthant()
    f = LaurentPoly.indicator(gamma.points, gamma.dim)
    prod = mul(power(f, n + 1), power(conj(f), n))
    return FreqSet((k for k in prod.support() if all(x >= 0 for x in k)), gamma.dim)


@dataclass(frozen=True)
class WitnessReport:
    """An ``h = f + c z^lam`` with ``||P_G h||_p > ||h||_p`` at ``p = 2(n+1)``.

    ``norm_h`` and ``norm_pf`` are the ``p``-th powers of the norms.
    """

    f: LaurentPoly
    lam: MultiIndex
    c: Fraction
    p: int
    eps: Fraction
    norm_h: Fraction
    norm_pf: Fraction

    @property
    def ratio_p(self) -> Fraction:
        return self.norm_pf / self.norm_h

    @property
    def h(self) -> LaurentPoly:
        return self.f + LaurentPoly.monomial(self.lam, self.c)

    def to_json(self) -> dict:
        return {
            "f": self.f.to_json(),
            "lam": list(self.lam),
            "c": _fs(self.c),
            "p": self.p,
            "eps": _fs(self.eps),
            "norm_h": _fs(self.norm_h),
            "norm_pf": _fs(self.norm_pf),
            "ratio_p": _fs(self.ratio_p),
            "ratio_p_float": float(self.ratio_p),
        }


def _fs(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _halvings(start: Fraction, count: int) -> Iterable[Fraction]:
    x = start
    for _ in range(count):
        yield x
        x /= 2


def witness_search_even(
    gamma,
    n: int,
    lam: Sequence[int],
    eps_steps: int = 10,
    c_steps: int = 12,
    base: Optional[Sequence[int]] = None,
) -> Optional[WitnessReport]:
    """Search ``f = z^g0 + eps * sum z^g`` and ``c`` so that adding ``c z^lam`` shrinks the ``2(n+1)`` norm.

    ``eps`` runs through ``1, 1/2, 1/4, ...`` and ``|c|`` through
    ``eps**n, eps**n / 2, ...`` with the sign opposite to the pairing.
    ``g0`` defaults to the first point of ``gamma``; each base point is
    tried in turn when none is given.  Returns ``None`` if the grid runs out.
    """
    gamma = freqset(gamma).require_orthant()
    lam = as_index(lam)
    if lam in gamma:
        raise InputError(f"{list(lam)} is already in the set; no witness exists")
    if n < 1:
        raise InputError("n must be at least 1 (p = 2 is always contractive)")
    k = n + 1
    bases = [as_index(base)] if base is not None else list(gamma.points)
    for g0 in bases:
        if g0 not in gamma:
            raise InputError("base point must belong to the set")
        rest = [g for g in gamma.points if g != g0]
        for eps in _halvings(Fraction(1), eps_steps):
            terms = {g0: Fraction(1)}
            terms.update({g: eps for g in rest})
            f = LaurentPoly(gamma.dim, terms)
            s = shapiro_pairing(f, n, lam)
            if s == 0:
                continue
            sign = -1 if s > 0 else 1
            norm_f = even_norm(f, k)
            for mag in _halvings(eps**n, c_steps):
                c = sign * mag
                norm_h = even_norm(f + LaurentPoly.monomial(lam, c), k)
                if norm_h < norm_f:
                    return WitnessReport(f, lam, c, 2 * k, eps, norm_h, norm_f)
    return None
