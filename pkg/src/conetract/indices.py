"""Multi-indices and finite frequency sets.

A multi-index is a plain ``tuple`` of Python ints.  Entries are kept inside
the signed 64-bit range so that results can be handed to numpy and to other
tools without silent wrap-around.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Sequence, Tuple

from .errors import InputError

MultiIndex = Tuple[int, ...]

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


def as_index(values: Iterable[int]) -> MultiIndex:
    """Coerce ``values`` to a multi-index, checking the 64-bit range."""
    out = []
    for v in values:
        if isinstance(v, bool) or int(v) != v:
            raise InputError(f"multi-index entries must be integers, got {v!r}")
        v = int(v)
        if not INT64_MIN <= v <= INT64_MAX:
            raise OverflowError(f"multi-index entry {v} outside 64-bit range")
        out.append(v)
    if not out:
        raise InputError("multi-index must have at least one entry")
    return tuple(out)


def add(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    _check_same_dim(a, b)
    return as_index(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> MultiIndex:
    _check_same_dim(a, b)
    return as_index(x - y for x, y in zip(a, b))


def scale(k: int, a: Sequence[int]) -> MultiIndex:
    return as_index(k * x for x in a)


def in_orthant(a: Sequence[int]) -> bool:
    return all(x >= 0 for x in a)


def _check_same_dim(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise InputError(f"dimension mismatch: {len(a)} vs {len(b)}")


class FreqSet:
    """A finite, nonempty set of multi-indices of a common dimension.

    Points are stored deduplicated and in lexicographic order, so two sets
    with the same elements compare (and hash) equal.
    """

    __slots__ = ("dim", "points", "_members")

    def __init__(self, points: Iterable[Sequence[int]], dim: int | None = None):
        pts = sorted({as_index(p) for p in points})
        if not pts:
            raise InputError("frequency set must be nonempty")
        if dim is None:
            dim = len(pts[0])
        for p in pts:
            if len(p) != dim:
                raise InputError(f"point {p} has dimension {len(p)}, expected {dim}")
        self.dim: int = dim
        self.points: Tuple[MultiIndex, ...] = tuple(pts)
        self._members = frozenset(pts)

    @property
    def orthant_only(self) -> bool:
        return all(in_orthant(p) for p in self.points)

    def require_orthant(self) -> "FreqSet":
        if not self.orthant_only:
            raise InputError("frequency set must lie in the nonnegative orthant")
        return self

    def __contains__(self, lam) -> bool:
        return tuple(lam) in self._members

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        if isinstance(other, FreqSet):
            return self.dim == other.dim and self.points == other.points
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.dim, self.points))

    def __le__(self, other: "FreqSet") -> bool:
        return self._members <= other._members

    def __repr__(self) -> str:
        return f"FreqSet({[list(p) for p in self.points]})"

    def union(self, other: Iterable[Sequence[int]]) -> "FreqSet":
        return FreqSet(list(self.points) + [tuple(p) for p in other], self.dim)

    def difference(self, other) -> Tuple[MultiIndex, ...]:
        return tuple(p for p in self.points if p not in other)

    def translate(self, v: Sequence[int]) -> "FreqSet":
        return FreqSet((add(p, v) for p in self.points), self.dim)

    def permute(self, perm: Sequence[int]) -> "FreqSet":
        """Reorder coordinates: entry ``i`` of each new point is entry ``perm[i]``."""
        return FreqSet((tuple(p[j] for j in perm) for p in self.points), self.dim)

    def to_list(self) -> list:
        return [list(p) for p in self.points]


def freqset(points: Iterable[Sequence[int]]) -> FreqSet:
    return points if isinstance(points, FreqSet) else FreqSet(points)
