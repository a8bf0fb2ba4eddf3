"""HeightMap sweep for canonical rectangles.

The plane is swept column by column.  One column of the height map (``h``)
and the index of the rectangle last entered in each row (``e``) are kept;
local maxima of ``h`` are looked for inside a rectangle's rows just before it
is left.  A zero in ``e`` marks a row already claimed by an emitted maximal
intersection and suppresses leftovers of it in later columns.

Arrays are 0-based internally: row ``k`` of the height map lives at index
``k - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np
from numba import njit

from .geometry import CanonicalBoxes, NonCanonicalError, ObservationBox

__all__ = [
    "SweepState",
    "MaximalIntersection",
    "scan_emit",
    "reduce2d",
    "sweep2d_boxes",
    "iter_sweep2d",
    "cliques_of",
]


@dataclass
class SweepState:
    """Live state of a 2-D sweep: one height-map column and the last-entered rows."""

    h: np.ndarray
    e: np.ndarray
    column: int = 0

    @classmethod
    def empty(cls, n: int) -> "SweepState":
        return cls(np.zeros(2 * n, dtype=np.int64), np.zeros(2 * n, dtype=np.int64))

    @property
    def nbytes(self) -> int:
        return self.h.nbytes + self.e.nbytes


@dataclass(frozen=True)
class MaximalIntersection:
    """A maximal intersection in canonical coordinates with its clique.

    ``lo``/``hi`` give the canonical box ``(lo, hi]`` per axis; ``clique`` is
    the sorted tuple of 1-based observation indices containing it; ``real``
    is filled in when the box has been mapped back to data coordinates.
    """

    lo: tuple[int, ...]
    hi: tuple[int, ...]
    clique: tuple[int, ...] = ()
    real: ObservationBox | None = None

    def __getitem__(self, i):
        return (self.lo, self.hi)[i]

    def key(self) -> tuple:
        return (self.lo, self.hi, self.clique)


@njit(cache=True)
def _scan(h, e, y1, y2, j, x_left, out, m):
    """Scan rows y1+1..y2 of the current column; append emissions to ``out``.

    Returns ``(out, m)``; ``out`` is reallocated when full.
    """
    b = y1
    for k in range(y1 + 1, y2):
        # h[k] is row k+1, h[k-1] is row k
        if h[k] < h[k - 1] and b > 0:
            ok = True
            for r in range(b, k):
                if e[r] <= 0:
                    ok = False
                    break
            if ok:
                if m == out.shape[0]:
                    out = _grow(out)
                out[m, 0] = x_left[e[k - 1]]
                out[m, 1] = j
                out[m, 2] = b
                out[m, 3] = k
                m += 1
                e[b] = 0
            b = 0
        if h[k] > h[k - 1]:
            b = k
    k = y2
    if b > 0:
        ok = True
        for r in range(b, k):
            if e[r] <= 0:
                ok = False
                break
        if ok:
            if m == out.shape[0]:
                out = _grow(out)
            out[m, 0] = x_left[e[k - 1]]
            out[m, 1] = j
            out[m, 2] = b
            out[m, 3] = k
            m += 1
            e[b] = 0
    return out, m


@njit(cache=True)
def _grow(out):
    new = np.empty((2 * out.shape[0] + 4, out.shape[1]), dtype=out.dtype)
    new[: out.shape[0]] = out
    return new


@njit(cache=True)
def _sweep(owner, entering, x_left, y_lo, y_hi, h, e, out):
    m = 0
    for j in range(1, owner.shape[0]):
        i = owner[j]
        y1 = y_lo[i]
        y2 = y_hi[i]
        if entering[j]:
            for r in range(y1, y2):
                h[r] += 1
                e[r] = i
        else:
            out, m = _scan(h, e, y1, y2, j, x_left, out, m)
            for r in range(y1, y2):
                h[r] -= 1
    return out[:m]


def _events(x_lo: np.ndarray, x_hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Owner box (1-based) and enter flag for each sweep step 1..2n (index 0 unused)."""
    n = x_lo.shape[0]
    owner = np.zeros(2 * n + 1, dtype=np.int64)
    entering = np.zeros(2 * n + 1, dtype=np.bool_)
    idx = np.arange(1, n + 1, dtype=np.int64)
    owner[x_lo] = idx
    owner[x_hi] = idx
    entering[x_lo] = True
    return owner, entering


def _padded(col: np.ndarray) -> np.ndarray:
    # lookup table indexed by 1-based box index
    return np.concatenate([np.zeros(1, dtype=np.int64), col.astype(np.int64)])


def sweep2d_boxes(boxes, state: SweepState | None = None) -> np.ndarray:
    """Type-1 sweep: maximal intersections as an ``(m, 4)`` array of ``x1, x2, y1, y2``.

    Rows are in emission order.  No cliques are computed.
    """
    cb = CanonicalBoxes.from_boxes(boxes)
    if cb.d != 2:
        raise NonCanonicalError(f"reduce2d needs d=2 boxes, got d={cb.d}")
    n = cb.n
    owner, entering = _events(cb.lo[:, 0], cb.hi[:, 0])
    if state is None:
        state = SweepState.empty(n)
    elif state.h.shape != (2 * n,) or state.e.shape != (2 * n,):
        raise ValueError("sweep state does not match the dataset size")
    out = np.empty((max(4, n), 4), dtype=np.int64)
    res = _sweep(owner, entering, _padded(cb.lo[:, 0]), _padded(cb.lo[:, 1]),
                 _padded(cb.hi[:, 1]), state.h, state.e, out)
    state.column = 2 * n
    return res


def cliques_of(lo: np.ndarray, hi: np.ndarray, box_lo: np.ndarray, box_hi: np.ndarray,
               chunk: int = 1 << 22) -> list[tuple[int, ...]]:
    """Clique of each query box ``(box_lo[j], box_hi[j]]`` by canonical containment."""
    m = box_lo.shape[0]
    n, d = lo.shape
    res: list[tuple[int, ...]] = []
    step = max(1, chunk // max(1, n * d))
    for s in range(0, m, step):
        ql, qh = box_lo[s:s + step, None, :], box_hi[s:s + step, None, :]
        inside = ((lo[None] <= ql) & (qh <= hi[None])).all(axis=2)
        for row in inside:
            res.append(tuple((np.flatnonzero(row) + 1).tolist()))
    return res


def reduce2d(boxes, cliques: bool = True) -> list[MaximalIntersection]:
    """Maximal intersections of a canonical 2-D dataset, in emission order.

    Emission order is ascending right x-boundary, then ascending row.
    """
    cb = CanonicalBoxes.from_boxes(boxes)
    res = sweep2d_boxes(cb)
    lo = res[:, [0, 2]]
    hi = res[:, [1, 3]]
    cl = cliques_of(cb.lo, cb.hi, lo, hi) if cliques else [()] * len(res)
    return [
        MaximalIntersection(tuple(a.tolist()), tuple(b.tolist()), c)
        for a, b, c in zip(lo, hi, cl)
    ]


def scan_emit(state: SweepState, rows: tuple[int, int], j: int,
              left_lookup: Mapping[int, int]) -> list[tuple[int, int, int, int]]:
    """Emit the maximal intersections found while leaving a rectangle.

    ``rows`` is the leaving rectangle's row interval ``(y1, y2]``; ``j`` the
    current column.  Must be called before ``h`` is decremented.  Mutates
    ``state.e`` and returns canonical boxes ``(x1, x2, y1, y2)``.
    """
    y1, y2 = rows
    if not (0 <= y1 < y2 <= state.h.shape[0]):
        raise ValueError(f"row interval ({y1}, {y2}] outside the height map")
    size = max(int(state.e.max(initial=0)), max(left_lookup, default=0)) + 1
    lookup = np.zeros(size, dtype=np.int64)
    for i, x1 in left_lookup.items():
        lookup[i] = x1
    out = np.empty((4, 4), dtype=np.int64)
    out, m = _scan(state.h, state.e, y1, y2, j, lookup, out, 0)
    state.column = j
    return [tuple(int(v) for v in row) for row in out[:m]]


@dataclass(frozen=True)
class SweepStep:
    """One step of :func:`iter_sweep2d`; ``state`` is live, copy it to keep it."""

    column: int
    box: int
    entering: bool
    emitted: list
    state: SweepState


def iter_sweep2d(boxes) -> Iterator[SweepStep]:
    """Step-by-step sweep for inspection and tracing.

    Yields after every event; for leave events the step carries the boxes
    emitted and the state just after the scan, before ``h`` is decremented.
    """
    cb = CanonicalBoxes.from_boxes(boxes)
    if cb.d != 2:
        raise NonCanonicalError(f"reduce2d needs d=2 boxes, got d={cb.d}")
    n = cb.n
    owner, entering = _events(cb.lo[:, 0], cb.hi[:, 0])
    left = {i + 1: int(cb.lo[i, 0]) for i in range(n)}
    state = SweepState.empty(n)
    for j in range(1, 2 * n + 1):
        i = int(owner[j])
        y1, y2 = int(cb.lo[i - 1, 1]), int(cb.hi[i - 1, 1])
        state.column = j
        if entering[j]:
            state.h[y1:y2] += 1
            state.e[y1:y2] = i
            yield SweepStep(j, i, True, [], state)
        else:
            emitted = scan_emit(state, (y1, y2), j, left)
            yield SweepStep(j, i, False, emitted, state)
            state.h[y1:y2] -= 1
