"""HeightMap sweep for canonical boxes in d >= 2 dimensions.

Sweeps along the last axis and keeps one (d-1)-dimensional slice of the
height map and of the last-entered array.  When a box is left, the cells of
its footprint in the current slice are searched for plateaus that no
neighbouring cell dominates.

Neighbouring cells in a canonical grid differ by at most one box (the one
whose boundary separates them), so between neighbours a larger height means
a strict superset of covering boxes.  A plateau of the footprint with no
higher neighbour therefore carries a covering set that is maximal within
the slice; cells outside the footprint miss the box being left and can never
dominate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .geometry import CanonicalBoxes, NonCanonicalError
from .sweep2d import MaximalIntersection, cliques_of

__all__ = ["SliceState", "slice_scan", "reduce_nd", "sweepnd_boxes"]


@dataclass
class SliceState:
    """One slice of ``h`` and ``e`` over the first d-1 axes."""

    h: np.ndarray
    e: np.ndarray
    position: int = 0

    @classmethod
    def empty(cls, n: int, d: int) -> "SliceState":
        shape = (2 * n,) * (d - 1)
        return cls(np.zeros(shape, dtype=np.int64), np.zeros(shape, dtype=np.int64))

    @property
    def nbytes(self) -> int:
        return self.h.nbytes + self.e.nbytes


def _shift_compare(sub: np.ndarray, axis: int):
    """Pairs (lower-side view, upper-side view) of neighbours along ``axis``."""
    lo = [slice(None)] * sub.ndim
    hi = [slice(None)] * sub.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return tuple(lo), tuple(hi)


def slice_scan(state: SliceState, footprint, j: int, left_lookup) -> list[tuple]:
    """Emit the maximal intersections found in ``footprint`` when leaving a box.

    ``footprint`` is the leaving box's cross-section as per-axis ``(lo, hi)``
    canonical intervals; ``j`` is the current sweep position.  Must be called
    before ``h`` is decremented.  For every emitted region ``e`` is zeroed at
    the region's lexicographically smallest cell.  Returns ``(lo, hi)`` pairs
    of canonical boxes (d axes, sweep axis last).

    ``left_lookup`` maps a box index to its lower boundary on the sweep axis
    (a mapping or an indexable array).
    """
    region = tuple(slice(int(a), int(b)) for a, b in footprint)
    h = state.h[region]
    e = state.e[region]
    if h.size == 0:
        return []
    dominated = np.zeros(h.shape, dtype=bool)
    for ax in range(h.ndim):
        lo, hi = _shift_compare(h, ax)
        dominated[lo] |= h[hi] > h[lo]
        dominated[hi] |= h[lo] > h[hi]
    peak = ~dominated
    # adjacent non-dominated cells always share one height, so plain
    # connectivity labels whole candidate plateaus
    labels, count = ndimage.label(peak)
    if count == 0:
        return []
    tainted = np.zeros(h.shape, dtype=bool)
    for ax in range(h.ndim):
        lo, hi = _shift_compare(h, ax)
        same = h[lo] == h[hi]
        tainted[lo] |= same & dominated[hi]
        tainted[hi] |= same & dominated[lo]
    bad = np.zeros(count + 1, dtype=bool)
    bad[np.unique(labels[tainted & peak])] = True
    blocked = np.zeros(count + 1, dtype=bool)
    blocked[np.unique(labels[peak & (e <= 0)])] = True

    offsets = [int(a) for a, _ in footprint]
    emitted = []
    for lab, box in enumerate(ndimage.find_objects(labels), start=1):
        if box is None or bad[lab] or blocked[lab]:
            continue
        lo_cell = tuple(s.start for s in box)
        hi_cell = tuple(s.stop - 1 for s in box)
        top = int(e[hi_cell])
        lo = tuple(o + s.start for o, s in zip(offsets, box)) + (int(left_lookup[top]),)
        hi = tuple(o + s.stop for o, s in zip(offsets, box)) + (int(j),)
        e[lo_cell] = 0
        emitted.append((lo, hi))
    state.position = j
    return emitted


def sweepnd_boxes(boxes, state: SliceState | None = None) -> list[tuple]:
    """Type-1 d-dimensional sweep; ``(lo, hi)`` canonical boxes in emission order."""
    cb = CanonicalBoxes.from_boxes(boxes)
    n, d = cb.n, cb.d
    if d < 2:
        raise NonCanonicalError(f"reduce_nd needs d >= 2, got d={d}")
    if state is None:
        state = SliceState.empty(n, d)
    sweep_lo = cb.lo[:, -1]
    sweep_hi = cb.hi[:, -1]
    owner = np.zeros(2 * n + 1, dtype=np.int64)
    owner[sweep_lo] = np.arange(1, n + 1)
    owner[sweep_hi] = np.arange(1, n + 1)
    left = np.concatenate([[0], sweep_lo])
    out: list[tuple] = []
    for j in range(1, 2 * n + 1):
        i = int(owner[j])
        fp = tuple(zip(cb.lo[i - 1, :-1].tolist(), cb.hi[i - 1, :-1].tolist()))
        region = tuple(slice(a, b) for a, b in fp)
        state.position = j
        if sweep_lo[i - 1] == j:
            state.h[region] += 1
            state.e[region] = i
        else:
            out.extend(slice_scan(state, fp, j, left))
            state.h[region] -= 1
    return out


def reduce_nd(boxes, d: int | None = None, cliques: bool = True) -> list[MaximalIntersection]:
    """Maximal intersections of a canonical d-dimensional dataset, in emission order.

    Emission order is ascending upper boundary on the last axis, then the
    lexicographic order of the region's first cell.
    """
    cb = CanonicalBoxes.from_boxes(boxes)
    if d is not None and d != cb.d:
        raise NonCanonicalError(f"boxes have dimension {cb.d}, not {d}")
    res = sweepnd_boxes(cb)
    if not res:
        return []
    lo = np.array([r[0] for r in res], dtype=np.int64)
    hi = np.array([r[1] for r in res], dtype=np.int64)
    cl = cliques_of(cb.lo, cb.hi, lo, hi) if cliques else [()] * len(res)
    return [MaximalIntersection(a, b, c) for (a, b), c in zip(res, cl)]
