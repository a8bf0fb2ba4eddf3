"""Clique matrix and likelihood evaluation for the reduced NPMLE problem.

After reduction the likelihood depends on the data only through the clique
matrix ``C`` (``C[j, i] = 1`` iff maximal intersection ``j`` lies in box
``i``) and on the masses ``alpha`` placed on the maximal intersections.
"""

from __future__ import annotations

import math

import numpy as np

from .geometry import CanonicalBoxes

__all__ = [
    "DENSE_LIMIT",
    "CliqueMatrix",
    "mass_vector",
    "clique_matrix",
    "prob_masses",
    "log_likelihood",
    "same_equivalence_class",
]

DENSE_LIMIT = 10**8
SUM_TOL = 1e-12
CLASS_TOL = 1e-12


class CliqueMatrix:
    """m x n binary incidence of maximal intersections in observation boxes.

    Stored either dense (``m x n`` bool array) or as per-row supports (sorted
    0-based column indices); both forms answer the same queries.
    """

    def __init__(self, m: int, n: int, dense: np.ndarray | None = None,
                 supports: list[np.ndarray] | None = None):
        if (dense is None) == (supports is None):
            raise ValueError("give exactly one of dense or supports")
        self.m, self.n = int(m), int(n)
        if dense is not None:
            dense = np.asarray(dense, dtype=bool)
            if dense.shape != (self.m, self.n):
                raise ValueError(f"dense matrix has shape {dense.shape}, expected {(self.m, self.n)}")
        else:
            supports = [np.asarray(s, dtype=np.int64) for s in supports]
            if len(supports) != self.m:
                raise ValueError(f"{len(supports)} row supports for m={self.m}")
            for s in supports:
                if s.size and (s.min() < 0 or s.max() >= self.n):
                    raise ValueError("support index out of range")
        self._dense = dense
        self._supports = supports

    @classmethod
    def from_dense(cls, rows) -> "CliqueMatrix":
        a = np.atleast_2d(np.asarray(rows, dtype=bool))
        return cls(a.shape[0], a.shape[1], dense=a)

    @classmethod
    def from_supports(cls, supports, n: int) -> "CliqueMatrix":
        return cls(len(supports), n, supports=[np.sort(np.asarray(s, dtype=np.int64)) for s in supports])

    @property
    def is_sparse(self) -> bool:
        return self._dense is None

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        a = np.zeros((self.m, self.n), dtype=bool)
        for j, s in enumerate(self._supports):
            a[j, s] = True
        return a

    def supports(self) -> list[np.ndarray]:
        if self._supports is not None:
            return self._supports
        return [np.flatnonzero(row) for row in self._dense]

    def t_dot(self, alpha: np.ndarray) -> np.ndarray:
        """``C^T alpha``."""
        if self._dense is not None:
            return alpha @ self._dense.astype(np.float64)
        counts = np.fromiter((len(s) for s in self._supports), dtype=np.int64, count=self.m)
        if counts.sum() == 0:
            return np.zeros(self.n)
        cols = np.concatenate(self._supports)
        return np.bincount(cols, weights=np.repeat(alpha, counts), minlength=self.n)

    def check_invariants(self, strict_rows: bool = True) -> None:
        """Raise ``AssertionError`` unless rows and columns are all nonempty.

        With ``strict_rows`` also requires that no row's support is contained
        in another row's (rows of a reduction are distinct maximal cliques).
        """
        a = self.dense()
        if self.m and not a.any(axis=1).all():
            raise AssertionError(f"row {int(np.flatnonzero(~a.any(axis=1))[0]) + 1} is empty")
        if self.n and not a.any(axis=0).all():
            raise AssertionError(f"column {int(np.flatnonzero(~a.any(axis=0))[0]) + 1} is empty")
        if strict_rows and self.m > 1:
            f = a.astype(np.float32)
            overlap = f @ f.T
            sizes = np.diag(overlap)
            contained = overlap == sizes[:, None]
            np.fill_diagonal(contained, False)
            if contained.any():
                j, k = np.argwhere(contained)[0]
                raise AssertionError(f"row {j + 1} is contained in row {k + 1}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliqueMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.dense(), other.dense())

    def __repr__(self) -> str:
        kind = "sparse" if self.is_sparse else "dense"
        return f"CliqueMatrix(m={self.m}, n={self.n}, {kind})"


def mass_vector(alpha, m: int | None = None) -> np.ndarray:
    """Validate masses: nonnegative, summing to one within 1e-12."""
    a = np.asarray(alpha, dtype=np.float64).ravel()
    if m is not None and a.shape[0] != m:
        raise ValueError(f"alpha has length {a.shape[0]}, expected m={m}")
    if not np.all(np.isfinite(a)) or np.any(a < 0):
        raise ValueError("alpha must be finite and nonnegative")
    if abs(math.fsum(a.tolist()) - 1.0) > SUM_TOL:
        raise ValueError(f"alpha sums to {math.fsum(a.tolist())!r}, not 1")
    return a


def clique_matrix(intersections, boxes, dense_limit: int = DENSE_LIMIT,
                  check: bool = True) -> CliqueMatrix:
    """Clique matrix of maximal intersections against their canonical dataset.

    Uses row supports instead of a dense array when ``m * n`` exceeds
    ``dense_limit``.
    """
    cb = CanonicalBoxes.from_boxes(boxes)
    intersections = list(intersections)
    m, n = len(intersections), cb.n
    for a in intersections:
        if len(a[0]) != cb.d or len(a[1]) != cb.d:
            raise ValueError(f"intersection {a!r} does not have the dataset's dimension {cb.d}")
        if any(c < 1 or c > 2 * n for c in (*a[0], *a[1])):
            raise ValueError(f"intersection {a!r} lies outside the dataset's canonical grid")
    if m == 0:
        return CliqueMatrix(0, n, dense=np.zeros((0, n), dtype=bool))
    lo = np.array([a[0] for a in intersections], dtype=np.int64)
    hi = np.array([a[1] for a in intersections], dtype=np.int64)
    if m * n <= dense_limit:
        dense = ((cb.lo[None] <= lo[:, None]) & (hi[:, None] <= cb.hi[None])).all(axis=2)
        cm = CliqueMatrix(m, n, dense=dense)
    else:
        supports = []
        for a_lo, a_hi in zip(lo, hi):
            inside = ((cb.lo <= a_lo) & (a_hi <= cb.hi)).all(axis=1)
            supports.append(np.flatnonzero(inside))
        cm = CliqueMatrix(m, n, supports=supports)
    if check:
        cm.check_invariants(strict_rows=not cm.is_sparse)
    return cm


def _check_dims(c: CliqueMatrix, alpha) -> np.ndarray:
    a = np.asarray(alpha, dtype=np.float64).ravel()
    if a.shape[0] != c.m:
        raise ValueError(f"alpha has length {a.shape[0]}, clique matrix has m={c.m} rows")
    return a


def prob_masses(c: CliqueMatrix, alpha) -> np.ndarray:
    """Probability of each observation box, ``C^T alpha``."""
    a = mass_vector(_check_dims(c, alpha))
    return np.clip(c.t_dot(a), 0.0, 1.0)


def log_likelihood(c: CliqueMatrix, alpha) -> float:
    """``sum_i log((C^T alpha)_i)``; ``-inf`` when some box gets zero mass."""
    p = c.t_dot(_check_dims(c, alpha))
    if np.any(p == 0):
        return -math.inf
    with np.errstate(invalid="ignore"):
        return float(np.sum(np.log(p)))


def same_equivalence_class(c: CliqueMatrix, alpha1, alpha2, tol: float = CLASS_TOL) -> bool:
    """True iff both mass vectors give every box the same probability."""
    a1 = mass_vector(_check_dims(c, alpha1))
    a2 = mass_vector(_check_dims(c, alpha2))
    return bool(np.all(np.abs(c.t_dot(a1) - c.t_dot(a2)) <= tol))
