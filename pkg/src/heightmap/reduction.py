"""One-call reduction of raw observation boxes."""

from __future__ import annotations

from typing import Sequence

from .geometry import CanonicalBoxes, CanonicalMap, ObservationBox, canonicalize, map_back
from .sweep2d import MaximalIntersection, reduce2d
from .sweepnd import reduce_nd

__all__ = ["reduce_boxes", "reduce_canonical", "attach_real"]


def reduce_canonical(cb: CanonicalBoxes, cliques: bool = True) -> list[MaximalIntersection]:
    """Dispatch to the 2-D sweep or the d-dimensional one."""
    if cb.d == 2:
        return reduce2d(cb, cliques=cliques)
    return reduce_nd(cb, cliques=cliques)


def attach_real(intersections, cmap: CanonicalMap) -> list[MaximalIntersection]:
    return [MaximalIntersection(a.lo, a.hi, a.clique, map_back(a, cmap)) for a in intersections]


def reduce_boxes(
    boxes: Sequence[ObservationBox], cliques: bool = True
) -> tuple[list[MaximalIntersection], CanonicalBoxes, CanonicalMap]:
    """Canonicalize, sweep and map back.

    Returns the maximal intersections (with ``real`` filled in), the
    canonical dataset and the map used.
    """
    cb, cmap = canonicalize(boxes)
    found = reduce_canonical(cb, cliques=cliques)
    return attach_real(found, cmap), cb, cmap
