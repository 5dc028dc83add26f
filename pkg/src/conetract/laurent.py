"""Sparse Laurent polynomials in ``d`` variables with exact rational coefficients."""
from __future__ import annotations

import os
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import InputError, ResourceError
from .indices import MultiIndex, as_index

DEFAULT_TERM_LIMIT = 5_000_000
TERM_LIMIT_ENV = "CONETRACT_BUDGET_TERMS"


def term_limit() -> int:
    """Largest number of terms a product may hold before aborting."""
    raw = os.environ.get(TERM_LIMIT_ENV)
    if raw is None:
        return DEFAULT_TERM_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{TERM_LIMIT_ENV} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise InputError(f"{TERM_LIMIT_ENV} must be positive")
    return value


def _coef(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise InputError(f"coefficients must be exact rationals, got {type(c).__name__}")


class LaurentPoly:
    """Finite sum ``sum(c * z**alpha)`` keyed by multi-index.

    Zero coefficients are never stored.  Iteration follows lexicographic
    order of the exponents so that printed and serialized forms are stable.
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], object] | None = None):
        if dim < 1:
            raise InputError("dimension must be positive")
        self.dim = dim
        clean: Dict[MultiIndex, Fraction] = {}
        for k, c in (terms or {}).items():
            key = as_index(k)
            if len(key) != dim:
                raise InputError(f"exponent {key} does not have dimension {dim}")
            c = _coef(c)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
                if not clean[key]:
                    del clean[key]
        self.terms: Dict[MultiIndex, Fraction] = clean

    @classmethod
    def monomial(cls, alpha: Sequence[int], coef=1) -> "LaurentPoly":
        return cls(len(alpha), {tuple(alpha): coef})

    @classmethod
    def indicator(cls, points: Iterable[Sequence[int]], dim: int | None = None) -> "LaurentPoly":
        """All-ones polynomial supported on ``points``."""
        pts = [tuple(p) for p in points]
        if dim is None:
            dim = len(pts[0])
        return cls(dim, {p: 1 for p in pts})

    @classmethod
    def zero(cls, dim: int) -> "LaurentPoly":
        return cls(dim)

    def _raw(self, terms: Dict[MultiIndex, Fraction]) -> "LaurentPoly":
        out = object.__new__(LaurentPoly)
        out.dim = self.dim
        out.terms = terms
        return out

    # -- inspection -----------------------------------------------------
    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.dim == other.dim and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.dim, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "LaurentPoly(0)"
        parts = [f"{c}*z^{list(k)}" for k, c in self]
        return "LaurentPoly(" + " + ".join(parts) + ")"

    def coeff(self, alpha: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(alpha), Fraction(0))

    def support(self) -> Tuple[MultiIndex, ...]:
        return tuple(sorted(self.terms))

    def degree_bounds(self) -> Tuple[MultiIndex, MultiIndex]:
        """Componentwise minimum and maximum exponent."""
        if not self.terms:
            z = (0,) * self.dim
            return z, z
        keys = list(self.terms)
        lo = tuple(min(k[i] for k in keys) for i in range(self.dim))
        hi = tuple(max(k[i] for k in keys) for i in range(self.dim))
        return lo, hi

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "LaurentPoly") -> None:
        if self.dim != other.dim:
            raise InputError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return self._raw(out)

    def __neg__(self) -> "LaurentPoly":
        return self._raw({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def scale(self, c) -> "LaurentPoly":
        c = _coef(c)
        if not c:
            return self._raw({})
        return self._raw({k: c * v for k, v in self.terms.items()})

    def shift(self, v: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``z**v``."""
        if len(v) != self.dim:
            raise InputError("shift has wrong dimension")
        return self._raw({tuple(a + b for a, b in zip(k, v)): c for k, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return self.scale(other)
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        return power(self, k)

    def conj(self) -> "LaurentPoly":
        return conj(self)

    def filter(self, keep) -> "LaurentPoly":
        """Keep the terms whose exponent satisfies ``keep``."""
        return self._raw({k: c for k, c in self.terms.items() if keep(k)})

    def evaluate(self, z: Sequence[complex]) -> complex:
        total = 0j
        for k, c in self.terms.items():
            m = complex(float(c))
            for zi, e in zip(z, k):
                m *= zi**e
            total += m
        return total

    def to_json(self) -> list:
        return [[list(k), _frac_str(c)] for k, c in self]

    @classmethod
    def from_json(cls, dim: int, data: Iterable) -> "LaurentPoly":
        return cls(dim, {tuple(k): Fraction(c) for k, c in data})


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Exact product.  Raises :class:`ResourceError` past the term guard."""
    f._check(g)
    if len(f.terms) > len(g.terms):
        f, g = g, f
    limit = term_limit()
    if len(f.terms) * len(g.terms) > limit * 4:
        raise ResourceError(
            f"product of {len(f.terms)} x {len(g.terms)} terms exceeds the term guard ({limit})"
        )
    out: Dict[MultiIndex, Fraction] = {}
    g_items = list(g.terms.items())
    for ka, ca in f.terms.items():
        for kb, cb in g_items:
            key = tuple(x + y for x, y in zip(ka, kb))
            out[key] = out.get(key, 0) + ca * cb
        if len(out) > limit:
            raise ResourceError(f"product exceeds the term guard ({limit} terms)")
    return f._raw({k: c for k, c in out.items() if c})


def power(f: LaurentPoly, k: int) -> LaurentPoly:
    """``f**k`` by repeated squaring."""
    if k < 0:
        raise InputError("negative powers are not supported")
    result = LaurentPoly.monomial((0,) * f.dim)
    base = f
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def conj(f: LaurentPoly) -> LaurentPoly:
    """Complex conjugate on the torus; coefficients are real so only exponents flip."""
    return f._raw({tuple(-e for e in k): c for k, c in f.terms.items()})
