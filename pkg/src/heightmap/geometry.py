"""Observation boxes, endpoint ordering and the canonical rank transform.

An observation box is a product of real intervals whose endpoints may be open
or closed and may be infinite.  :func:`canonicalize` replaces every endpoint
by its rank among the 2n endpoints of its axis, breaking ties so that the
integer boxes ``(lo, hi]`` have exactly the same intersection structure as
the real boxes.  :func:`map_back` inverts the transform for any canonical box.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import EmptyBoxError, InvalidBoxError, NonCanonicalError

__all__ = [
    "Side",
    "EndpointDescriptor",
    "ObservationBox",
    "CanonicalBox",
    "CanonicalBoxes",
    "CanonicalMap",
    "compare_endpoints",
    "endpoint_sort_key",
    "canonicalize",
    "map_back",
]


class Side(enum.IntEnum):
    LEFT = 1
    RIGHT = 2


@dataclass(frozen=True, slots=True)
class EndpointDescriptor:
    """One endpoint of one axis of one observation box."""

    value: object
    closed: bool
    side: Side
    axis: int = 0
    box_index: int = 0
    # source text of ``value``, kept so files can echo the user's literal
    literal: str | None = field(default=None, compare=False)

    @property
    def is_right(self) -> bool:
        return self.side == Side.RIGHT


def compare_endpoints(a: EndpointDescriptor, b: EndpointDescriptor) -> bool:
    """Return True iff endpoint ``a`` sorts strictly before endpoint ``b``.

    Distinct coordinates order by value.  At a shared coordinate identical
    endpoint kinds order by box index, opposite kinds (differing in both side
    and closure) put the right endpoint first, and otherwise a closed left or
    open right endpoint comes first.
    """
    c_a, c_b = bool(a.closed), bool(b.closed)
    r_a, r_b = a.is_right, b.is_right
    if a.value != b.value:
        return a.value < b.value
    if r_a == r_b and c_a == c_b:
        return a.box_index < b.box_index
    if r_a != r_b and c_a != c_b:
        return r_a
    return r_a != c_a


# Rank of an endpoint kind among endpoints sharing one coordinate; the order
# open-right < closed-left < closed-right < open-left is the total order that
# compare_endpoints induces on kinds.
_OPEN_RIGHT, _CLOSED_LEFT, _CLOSED_RIGHT, _OPEN_LEFT = 0, 1, 2, 3


def _kind_rank(is_right: bool, closed: bool) -> int:
    if is_right:
        return _CLOSED_RIGHT if closed else _OPEN_RIGHT
    return _CLOSED_LEFT if closed else _OPEN_LEFT


def endpoint_sort_key(e: EndpointDescriptor) -> tuple:
    """Sort key equivalent to :func:`compare_endpoints`."""
    return (e.value, _kind_rank(e.is_right, bool(e.closed)), e.box_index)


def _is_nan(v) -> bool:
    try:
        return v != v
    except TypeError:
        return False


def _fmt(v, literal=None) -> str:
    if literal is not None:
        return literal
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return str(v)


@dataclass(frozen=True, slots=True)
class ObservationBox:
    """A d-dimensional box given by one lower and one upper endpoint per axis."""

    lower: tuple[EndpointDescriptor, ...]
    upper: tuple[EndpointDescriptor, ...]

    @classmethod
    def from_bounds(
        cls,
        bounds: Sequence[tuple],
        closed: Sequence[tuple[bool, bool]] | None = None,
        index: int = 0,
        literals: Sequence[tuple] | None = None,
        validate: bool = True,
    ) -> "ObservationBox":
        """Build a box from ``[(lo, hi), ...]``.

        ``closed`` gives ``(lower_closed, upper_closed)`` per axis and defaults
        to left-open/right-closed on every axis.
        """
        d = len(bounds)
        if closed is None:
            closed = [(False, True)] * d
        if literals is None:
            literals = [(None, None)] * d
        if len(closed) != d or len(literals) != d:
            raise InvalidBoxError("bounds, closures and literals must have one entry per axis")
        lower = tuple(
            EndpointDescriptor(lo, bool(cl[0]), Side.LEFT, a, index, lit[0])
            for a, ((lo, _), cl, lit) in enumerate(zip(bounds, closed, literals))
        )
        upper = tuple(
            EndpointDescriptor(hi, bool(cl[1]), Side.RIGHT, a, index, lit[1])
            for a, ((_, hi), cl, lit) in enumerate(zip(bounds, closed, literals))
        )
        box = cls(lower, upper)
        if validate:
            box.validate()
        return box

    @property
    def d(self) -> int:
        return len(self.lower)

    @property
    def index(self) -> int:
        return self.lower[0].box_index if self.lower else 0

    def with_index(self, index: int) -> "ObservationBox":
        return ObservationBox(
            tuple(EndpointDescriptor(e.value, e.closed, e.side, e.axis, index, e.literal) for e in self.lower),
            tuple(EndpointDescriptor(e.value, e.closed, e.side, e.axis, index, e.literal) for e in self.upper),
        )

    def intervals(self) -> list[tuple]:
        """Per axis ``(lo, lo_closed, hi, hi_closed)``."""
        return [(lo.value, lo.closed, hi.value, hi.closed) for lo, hi in zip(self.lower, self.upper)]

    def point_set(self) -> tuple:
        """Normalised per-axis intervals; equal iff the point sets are equal.

        Closure flags are meaningless at infinite endpoints and are reported
        open there.
        """
        out = []
        for lo, lc, hi, hc in self.intervals():
            lc = bool(lc) and not _is_infinite(lo)
            hc = bool(hc) and not _is_infinite(hi)
            out.append((lo, lc, hi, hc))
        return tuple(out)

    def empty_axis(self) -> int | None:
        """First axis on which the box is empty, or None."""
        for a, (lo, lc, hi, hc) in enumerate(self.intervals()):
            if lo < hi or (lo == hi and lc and hc):
                continue
            return a
        return None

    def validate(self) -> None:
        if len(self.lower) != len(self.upper) or not self.lower:
            raise InvalidBoxError(f"box {self.index}: need matching lower/upper endpoints on d >= 1 axes")
        for a, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if lo.side != Side.LEFT or hi.side != Side.RIGHT:
                raise InvalidBoxError(f"box {self.index}, axis {a}: endpoint sides swapped")
            if _is_nan(lo.value) or _is_nan(hi.value):
                raise InvalidBoxError(f"box {self.index}, axis {a}: NaN coordinate")
            if lo.value == math.inf:
                raise InvalidBoxError(f"box {self.index}, axis {a}: +inf used as a lower endpoint")
            if hi.value == -math.inf:
                raise InvalidBoxError(f"box {self.index}, axis {a}: -inf used as an upper endpoint")
        a = self.empty_axis()
        if a is not None:
            raise EmptyBoxError(self.index, a)

    def __str__(self) -> str:
        parts = []
        for lo, hi in zip(self.lower, self.upper):
            left = "[" if lo.closed and not _is_infinite(lo.value) else "("
            right = "]" if hi.closed and not _is_infinite(hi.value) else ")"
            parts.append(f"{left}{_fmt(lo.value, lo.literal)}, {_fmt(hi.value, hi.literal)}{right}")
        return " x ".join(parts)


def _is_infinite(v) -> bool:
    try:
        return v == math.inf or v == -math.inf
    except TypeError:
        return False


class CanonicalBox(tuple):
    """``(lo, hi, index)`` with per-axis integer tuples; interval ``(lo, hi]``."""

    __slots__ = ()

    def __new__(cls, lo, hi, index=0):
        return tuple.__new__(cls, (tuple(int(v) for v in lo), tuple(int(v) for v in hi), int(index)))

    lo = property(lambda self: self[0])
    hi = property(lambda self: self[1])
    index = property(lambda self: self[2])

    @property
    def d(self) -> int:
        return len(self[0])

    def __repr__(self) -> str:
        return f"CanonicalBox(lo={self.lo}, hi={self.hi}, index={self.index})"


class CanonicalBoxes:
    """A canonical dataset stored as two ``(n, d)`` integer arrays.

    Behaves as a read-only sequence of :class:`CanonicalBox`; box ``i`` (0-based
    position) has observation index ``i + 1``.
    """

    def __init__(self, lo, hi, check: bool = True):
        self.lo = np.ascontiguousarray(lo, dtype=np.int64)
        self.hi = np.ascontiguousarray(hi, dtype=np.int64)
        if self.lo.ndim != 2 or self.lo.shape != self.hi.shape:
            raise NonCanonicalError("lo and hi must be (n, d) arrays of equal shape")
        if check:
            self.validate()

    @classmethod
    def from_boxes(cls, boxes) -> "CanonicalBoxes":
        """Coerce a sequence of ``CanonicalBox`` (or ``(lo, hi)`` pairs)."""
        if isinstance(boxes, cls):
            return boxes
        boxes = list(boxes)
        if not boxes:
            raise NonCanonicalError("empty dataset")
        lo = np.array([b[0] for b in boxes], dtype=np.int64)
        hi = np.array([b[1] for b in boxes], dtype=np.int64)
        if lo.ndim == 1:
            lo, hi = lo[:, None], hi[:, None]
        return cls(lo, hi)

    @property
    def n(self) -> int:
        return self.lo.shape[0]

    @property
    def d(self) -> int:
        return self.lo.shape[1]

    def validate(self) -> None:
        n, d = self.lo.shape
        if n == 0:
            raise NonCanonicalError("empty dataset")
        expected = np.arange(1, 2 * n + 1)
        for a in range(d):
            coords = np.sort(np.concatenate([self.lo[:, a], self.hi[:, a]]))
            if not np.array_equal(coords, expected):
                raise NonCanonicalError(
                    f"axis {a}: coordinates are not a permutation of 1..{2 * n}"
                )
        bad = np.argwhere(self.lo >= self.hi)
        if len(bad):
            i, a = bad[0]
            raise NonCanonicalError(f"box {i + 1}, axis {a}: lo >= hi")

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i) -> CanonicalBox:
        if isinstance(i, slice):
            return [self[k] for k in range(*i.indices(self.n))]
        if i < 0:
            i += self.n
        return CanonicalBox(self.lo[i], self.hi[i], i + 1)

    def __iter__(self) -> Iterator[CanonicalBox]:
        for i in range(self.n):
            yield self[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, CanonicalBoxes):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __repr__(self) -> str:
        return f"CanonicalBoxes(n={self.n}, d={self.d})"


@dataclass(frozen=True)
class CanonicalMap:
    """Inverse of the rank transform.

    ``endpoints[a][k - 1]`` is the original endpoint that received canonical
    coordinate ``k`` on axis ``a``.  ``inclusion[a][k - 1]`` tells whether that
    endpoint's value belongs to canonical cell ``k`` (True) or to cell ``k + 1``.
    """

    endpoints: tuple[tuple[EndpointDescriptor, ...], ...]
    inclusion: tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return len(self.endpoints)

    @property
    def n(self) -> int:
        return len(self.endpoints[0]) // 2

    def values(self, axis: int) -> list:
        return [e.value for e in self.endpoints[axis]]


def _validate_vectorized(lo_v, lo_c, hi_v, hi_c, axis, boxes):
    bad = (
        np.isnan(lo_v)
        | np.isnan(hi_v)
        | (lo_v == np.inf)
        | (hi_v == -np.inf)
        | (lo_v > hi_v)
        | ((lo_v == hi_v) & ~(lo_c & hi_c))
    )
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        boxes[i].with_index(i + 1).validate()
        raise EmptyBoxError(i + 1, axis)


def _axis_ranks(boxes: Sequence[ObservationBox], axis: int) -> tuple[np.ndarray, list, np.ndarray]:
    """Canonical rank (1-based) of each of the 2n endpoints of one axis.

    Endpoints are laid out as ``[lower_1..lower_n, upper_1..upper_n]``; returns
    ``(ranks, endpoints, order)`` where ``order`` lists endpoint positions in
    sorted order.
    """
    n = len(boxes)
    lows = [b.lower[axis] for b in boxes]
    ups = [b.upper[axis] for b in boxes]
    descs = lows + ups
    idx = np.tile(np.arange(1, n + 1, dtype=np.int64), 2)
    closed = np.fromiter((e.closed for e in descs), dtype=bool, count=2 * n)
    kind = np.empty(2 * n, dtype=np.int64)
    kind[:n] = np.where(closed[:n], _CLOSED_LEFT, _OPEN_LEFT)
    kind[n:] = np.where(closed[n:], _CLOSED_RIGHT, _OPEN_RIGHT)
    values = [e.value for e in descs]
    if all(type(v) is float for v in values):
        vals = np.array(values, dtype=np.float64)
        _validate_vectorized(vals[:n], closed[:n], vals[n:], closed[n:], axis, boxes)
        order = np.lexsort((idx, kind, vals))
    else:
        for i, b in enumerate(boxes):
            lo, hi = b.lower[axis], b.upper[axis]
            if _is_nan(lo.value) or _is_nan(hi.value) or lo.value == math.inf or hi.value == -math.inf:
                b.with_index(i + 1).validate()
            if not (lo.value < hi.value or (lo.value == hi.value and lo.closed and hi.closed)):
                raise EmptyBoxError(i + 1, axis)
        kinds = kind.tolist()
        order = np.array(
            sorted(range(2 * n), key=lambda p: (values[p], kinds[p], p % n)), dtype=np.int64
        )
    ranks = np.empty(2 * n, dtype=np.int64)
    ranks[order] = np.arange(1, 2 * n + 1)
    return ranks, descs, order


def canonicalize(boxes: Sequence[ObservationBox]) -> tuple[CanonicalBoxes, CanonicalMap]:
    """Rank-transform observation boxes into canonical boxes.

    Box ``i`` of the input (0-based position) becomes canonical box ``i + 1``;
    the position, not any stored index, breaks ties between identical
    endpoints.  Raises :class:`EmptyBoxError` naming the first empty box.
    """
    boxes = list(boxes)
    if not boxes:
        raise InvalidBoxError("canonicalize needs at least one box")
    d = boxes[0].d
    if d < 1:
        raise InvalidBoxError("boxes must have at least one axis")
    for i, b in enumerate(boxes):
        if b.d != d or len(b.upper) != d:
            raise InvalidBoxError(f"box {i + 1} has dimension {b.d}, expected {d}")
    n = len(boxes)
    lo = np.empty((n, d), dtype=np.int64)
    hi = np.empty((n, d), dtype=np.int64)
    endpoints, inclusion = [], []
    for a in range(d):
        ranks, descs, order = _axis_ranks(boxes, a)
        lo[:, a] = ranks[:n]
        hi[:, a] = ranks[n:]
        sorted_descs = tuple(descs[p] for p in order)
        endpoints.append(sorted_descs)
        # value belongs to its own cell for closed-right / open-left endpoints
        inclusion.append(
            np.fromiter((e.is_right == bool(e.closed) for e in sorted_descs), dtype=bool, count=2 * n)
        )
    return CanonicalBoxes(lo, hi, check=False), CanonicalMap(tuple(endpoints), tuple(inclusion))


def map_back(box, cmap: CanonicalMap) -> ObservationBox:
    """Real-coordinate box covered by the canonical box ``(lo, hi]``.

    ``box`` is anything with per-axis ``lo`` and ``hi`` sequences (a
    :class:`CanonicalBox`, a maximal intersection, ...).  Infinite endpoints
    are reported open.
    """
    lo, hi = box[0], box[1]
    if len(lo) != cmap.d or len(hi) != cmap.d:
        raise InvalidBoxError(f"box has {len(lo)} axes, map has {cmap.d}")
    two_n = 2 * cmap.n
    lower, upper = [], []
    for a, (p, q) in enumerate(zip(lo, hi)):
        p, q = int(p), int(q)
        if not (1 <= p <= two_n and 1 <= q <= two_n):
            raise InvalidBoxError(f"axis {a}: canonical coordinates ({p}, {q}] outside 1..{two_n}")
        if p >= q:
            raise InvalidBoxError(f"axis {a}: canonical interval ({p}, {q}] is empty")
        e_lo = cmap.endpoints[a][p - 1]
        e_hi = cmap.endpoints[a][q - 1]
        lo_closed = not cmap.inclusion[a][p - 1] and not _is_infinite(e_lo.value)
        hi_closed = bool(cmap.inclusion[a][q - 1]) and not _is_infinite(e_hi.value)
        lower.append(EndpointDescriptor(e_lo.value, lo_closed, Side.LEFT, a, 0, e_lo.literal))
        upper.append(EndpointDescriptor(e_hi.value, hi_closed, Side.RIGHT, a, 0, e_hi.literal))
    return ObservationBox(tuple(lower), tuple(upper))
