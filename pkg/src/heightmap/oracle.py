"""Brute-force maximal intersections by enumerating every canonical grid cell.

Slow by design and independent of the sweeps: the covering set of each of the
(2n)^d cells is computed directly, and the inclusion-maximal distinct sets are
kept.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import OracleSizeError
from .geometry import CanonicalBoxes
from .sweep2d import MaximalIntersection

__all__ = ["DEFAULT_MAX_CELLS", "oracle_max_cells", "oracle_reduce", "clique_of", "covering_sets"]

# admits d=2 up to n=316, d=3 up to n=36, d=4 up to n=12
DEFAULT_MAX_CELLS = 400_000
MAX_CELLS_ENV = "HEIGHTMAP_ORACLE_MAX_CELLS"


def oracle_max_cells() -> int:
    raw = os.environ.get(MAX_CELLS_ENV)
    if raw:
        return int(raw)
    return DEFAULT_MAX_CELLS


def check_size(n: int, d: int) -> None:
    cells = (2 * n) ** d
    limit = oracle_max_cells()
    if cells > limit:
        raise OracleSizeError(n, d, cells, limit)


def clique_of(box, boxes) -> set[int]:
    """Indices (1-based) of the canonical boxes containing ``box``."""
    cb = CanonicalBoxes.from_boxes(boxes)
    lo = np.asarray(box[0])
    hi = np.asarray(box[1])
    inside = ((cb.lo <= lo) & (hi <= cb.hi)).all(axis=1)
    return set((np.flatnonzero(inside) + 1).tolist())


def covering_sets(boxes) -> tuple[np.ndarray, tuple[int, ...]]:
    """Bit-packed covering set of every cell.

    Returns ``(packed, shape)`` where ``packed[c]`` holds the membership bits
    (box ``i`` at bit ``i - 1``, ``np.packbits`` order) of the cell with flat
    index ``c`` in a grid of ``shape = (2n,) * d``.  Cell ``k`` on an axis is
    the unit interval ``(k - 1, k]``.
    """
    cb = CanonicalBoxes.from_boxes(boxes)
    n, d = cb.n, cb.d
    shape = (2 * n,) * d
    cells = int(np.prod(shape))
    packed = np.zeros((cells, (n + 7) // 8), dtype=np.uint8)
    centers = np.arange(1, 2 * n + 1)
    for i in range(n):
        mask = np.ones(shape, dtype=bool)
        for a in range(d):
            axis_mask = (cb.lo[i, a] < centers) & (centers <= cb.hi[i, a])
            view = [1] * d
            view[a] = 2 * n
            mask = mask & axis_mask.reshape(view)
        byte, bit = divmod(i, 8)
        packed[mask.ravel(), byte] |= np.uint8(0x80 >> bit)
    return packed, shape


def _maximal_rows(sets: np.ndarray, block: int = 2048) -> np.ndarray:
    """Boolean mask of the rows of ``sets`` (distinct 0/1 rows) not strictly contained in another."""
    k = sets.shape[0]
    f = sets.astype(np.float32)
    sizes = f.sum(axis=1)
    keep = np.ones(k, dtype=bool)
    for s in range(0, k, block):
        overlap = f[s:s + block] @ f.T
        contained = (overlap == sizes[s:s + block, None]) & (sizes[None, :] > sizes[s:s + block, None])
        keep[s:s + block] = ~contained.any(axis=1)
    keep &= sizes > 0
    return keep


def oracle_reduce(boxes, d: int | None = None) -> list[MaximalIntersection]:
    """Maximal intersections with cliques, sorted by ``(lo, hi)``.

    Raises :class:`OracleSizeError` when (2n)^d exceeds the cell bound
    (``HEIGHTMAP_ORACLE_MAX_CELLS`` overrides the default).
    """
    cb = CanonicalBoxes.from_boxes(boxes)
    n = cb.n
    if d is None:
        d = cb.d
    elif d != cb.d:
        raise ValueError(f"boxes have dimension {cb.d}, not {d}")
    check_size(n, d)
    packed, shape = covering_sets(cb)
    rows = np.ascontiguousarray(packed).view(np.dtype((np.void, packed.shape[1]))).ravel()
    uniq, inverse = np.unique(rows, return_inverse=True)
    inverse = inverse.ravel()
    members = np.unpackbits(uniq.view(np.uint8).reshape(len(uniq), -1), axis=1)[:, :n].astype(bool)
    keep = _maximal_rows(members)

    # group flat cell indices by covering set
    order = np.argsort(inverse, kind="stable")
    starts = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
    out = []
    for s in np.flatnonzero(keep):
        clique = np.flatnonzero(members[s])
        box_lo = cb.lo[clique].max(axis=0)
        box_hi = cb.hi[clique].min(axis=0)
        cells = np.unravel_index(order[starts[s]:starts[s + 1]], shape)
        # 0-based cell index c is the unit interval (c, c + 1]
        cell_lo = np.array([c.min() for c in cells])
        cell_hi = np.array([c.max() + 1 for c in cells])
        if not (np.array_equal(box_lo, cell_lo) and np.array_equal(box_hi, cell_hi)):
            raise AssertionError(f"oracle inconsistency for clique {clique + 1}")
        if len(cells[0]) != int(np.prod(box_hi - box_lo)):
            raise AssertionError(f"clique {clique + 1} covers a non-box cell region")
        out.append(MaximalIntersection(tuple(box_lo.tolist()), tuple(box_hi.tolist()),
                                       tuple((clique + 1).tolist())))
    out.sort(key=lambda a: (a.lo, a.hi))
    return out
