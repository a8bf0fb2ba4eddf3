import math
from pathlib import Path

import numpy as np
import pytest

from heightmap.geometry import CanonicalBoxes, ObservationBox

DATA = Path(__file__).parent / "data"

# Six canonical rectangles (x1, x2, y1, y2) for the worked sweep example.  Only
# R1, R2, R3's y range and the left edges of R3 and R4 are pinned down by the
# worked example; the rest is filled in consistently with it.
WALKTHROUGH = [
    (1, 6, 7, 12),
    (2, 5, 5, 11),
    (3, 9, 8, 10),
    (4, 7, 3, 6),
    (8, 11, 4, 9),
    (10, 12, 1, 2),
]


def canonical2d(rects):
    lo = np.array([(r[0], r[2]) for r in rects])
    hi = np.array([(r[1], r[3]) for r in rects])
    return CanonicalBoxes(lo, hi)


def random_canonical(rng, n, d):
    lo = np.empty((n, d), dtype=np.int64)
    hi = np.empty((n, d), dtype=np.int64)
    for a in range(d):
        p = rng.permutation(np.arange(1, 2 * n + 1)).reshape(n, 2)
        p.sort(axis=1)
        lo[:, a], hi[:, a] = p[:, 0], p[:, 1]
    return CanonicalBoxes(lo, hi)


def random_interval(rng, grid=6):
    """One nonempty real interval drawn from a small grid so that ties are common."""
    kind = rng.integers(0, 5)
    if kind == 0:
        # current-status style quadrant edge
        t = float(rng.integers(1, grid))
        return ((0.0, t, False, True) if rng.random() < 0.5 else (t, math.inf, False, True))
    if kind == 1:
        v = float(rng.integers(0, grid + 1))
        return (v, v, True, True)
    if kind == 2:
        hi = float(rng.integers(0, grid + 1))
        return (-math.inf, hi, False, bool(rng.integers(0, 2)))
    a, b = sorted(rng.integers(0, grid + 1, size=2).tolist())
    if a == b:
        return (float(a), float(b), True, True)
    return (float(a), float(b), bool(rng.integers(0, 2)), bool(rng.integers(0, 2)))


def random_boxes(rng, n, d, grid=6):
    boxes = []
    for i in range(n):
        ivs = [random_interval(rng, grid) for _ in range(d)]
        boxes.append(ObservationBox.from_bounds(
            [(lo, hi) for lo, hi, _, _ in ivs],
            [(lc, hc) for _, _, lc, hc in ivs],
            index=i + 1,
        ))
    return boxes


def real_intersection(boxes):
    """Point-set intersection of real boxes, computed on the intervals themselves.

    Returns the normalised per-axis tuple (see ObservationBox.point_set) or
    None when the intersection is empty.
    """
    out = []
    for a in range(boxes[0].d):
        lo, lc = -math.inf, False
        hi, hc = math.inf, False
        for b in boxes:
            v, c = b.lower[a].value, b.lower[a].closed
            if v > lo:
                lo, lc = v, c
            elif v == lo:
                lc = lc and c
            v, c = b.upper[a].value, b.upper[a].closed
            if v < hi:
                hi, hc = v, c
            elif v == hi:
                hc = hc and c
        lc = lc and not math.isinf(lo)
        hc = hc and not math.isinf(hi)
        if not (lo < hi or (lo == hi and lc and hc)):
            return None
        out.append((lo, lc, hi, hc))
    return tuple(out)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def equivalent_masses(rng, max_n=8):
    """A random clique matrix with two distinct mass vectors giving equal C^T alpha.

    The second vector steps from the first along the null space of
    ``[C^T; 1^T]`` and is kept nonnegative.
    """
    from scipy.linalg import null_space

    while True:
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(n + 2, n + 6))
        c = rng.random((m, n)) < 0.5
        c[np.arange(m), rng.integers(0, n, size=m)] = True
        ns = null_space(np.vstack([c.T.astype(float), np.ones((1, m))]))
        if ns.shape[1]:
            break
    a1 = rng.dirichlet(np.ones(m))
    v = ns @ rng.standard_normal(ns.shape[1])
    neg = v < 0
    t = 0.9 * np.min(a1[neg] / -v[neg]) if neg.any() else 1.0
    a2 = np.clip(a1 + t * v, 0.0, None)
    a2 /= a2.sum()
    return c, a1, a2
