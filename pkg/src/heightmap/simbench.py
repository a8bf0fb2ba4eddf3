"""Simulated bivariate current-status data and timing of the reductions."""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .errors import OracleSizeError
from .geometry import ObservationBox, canonicalize
from .oracle import check_size, oracle_reduce
from .sweep2d import sweep2d_boxes
from .sweepnd import sweepnd_boxes

log = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_SIZES",
    "TimingRecord",
    "current_status_box",
    "gen_current_status",
    "gen_random_boxes",
    "replicate_seed",
    "run_benchmark",
    "fit_loglog_slope",
    "summarize",
    "write_records_csv",
    "write_summary_csv",
]

DEFAULT_SIZES = (50, 100, 250, 500, 1000, 2500, 5000, 10000)
DEFAULT_BUDGET = 1000.0
ALGORITHMS = ("heightmap", "nd", "oracle")


@dataclass(frozen=True)
class TimingRecord:
    algorithm: str
    n: int
    replicate: int
    seed: int
    elapsed: float
    m: int
    status: str = "ok"

    def same_run(self, other: "TimingRecord") -> bool:
        """Equal in everything but the measured time."""
        a, b = asdict(self), asdict(other)
        a.pop("elapsed"), b.pop("elapsed")
        return a == b


def current_status_box(x: float, y: float, u: float, v: float, index: int = 0) -> ObservationBox:
    """Quadrant box for one current-status observation.

    ``x, y`` are the variables of interest and ``u, v`` their inspection
    times; each axis is ``(0, t]`` if the event happened by time ``t`` and
    ``(t, inf)`` otherwise.
    """
    bx = (0.0, u) if x <= u else (u, math.inf)
    by = (0.0, v) if y <= v else (v, math.inf)
    return ObservationBox.from_bounds([bx, by], index=index, validate=False)


def gen_current_status(n: int, seed: int) -> list[ObservationBox]:
    """n boxes from the model with X, Y, U, V i.i.d. standard exponential."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    x, y, u, v = rng.standard_exponential(size=(4, n)).tolist()
    return [current_status_box(x[i], y[i], u[i], v[i], i + 1) for i in range(n)]


def gen_random_boxes(n: int, d: int, seed: int, scale: float = 1.0) -> list[ObservationBox]:
    """n boxes with uniform random corners in ``[0, scale]^d`` (for sweeps beyond d=2)."""
    rng = np.random.default_rng(seed)
    pts = np.sort(rng.uniform(0.0, scale, size=(n, d, 2)), axis=2).tolist()
    return [ObservationBox.from_bounds([tuple(p) for p in pts[i]], index=i + 1, validate=False)
            for i in range(n)]


def replicate_seed(base_seed: int, n: int, replicate: int) -> int:
    """Seed of the dataset for one (size, replicate) cell of a benchmark."""
    return int(np.random.SeedSequence([base_seed, n, replicate]).generate_state(1)[0])


def _timed_reduction(boxes, algorithm: str) -> tuple[float, int]:
    t0 = time.perf_counter()
    cb, _ = canonicalize(boxes)
    if algorithm == "heightmap":
        m = len(sweep2d_boxes(cb))
    elif algorithm == "nd":
        m = len(sweepnd_boxes(cb))
    elif algorithm == "oracle":
        m = len(oracle_reduce(cb))
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    return time.perf_counter() - t0, m


def run_benchmark(
    sizes: Sequence[int],
    replicates: int,
    algorithm: str = "heightmap",
    seed: int = 0,
    budget: float = DEFAULT_BUDGET,
    d: int = 2,
    warmup: bool = True,
) -> list[TimingRecord]:
    """Time the reduction (canonicalization plus sweep) on simulated data.

    d=2 uses current-status data, higher d uses uniform random boxes.  Once
    the mean time of a size exceeds ``budget`` seconds, every larger size is
    recorded as ``"skipped"``; sizes beyond the oracle's bound are skipped for
    the oracle.
    """
    sizes = list(sizes)
    if not sizes or sizes != sorted(sizes):
        raise ValueError("sizes must be a nonempty ascending sequence")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")
    if algorithm == "heightmap" and d != 2:
        raise ValueError("the heightmap algorithm is the d=2 sweep; use 'nd' for d > 2")

    def generate(n, s):
        return gen_current_status(n, s) if d == 2 else gen_random_boxes(n, d, s)

    if warmup:
        # compile kernels outside the measured region
        _timed_reduction(generate(4, 0), algorithm)

    records: list[TimingRecord] = []
    over_budget = False
    for n in sizes:
        skip = over_budget
        if algorithm == "oracle" and not skip:
            try:
                check_size(n, d)
            except OracleSizeError:
                skip = True
        times = []
        for r in range(replicates):
            s = replicate_seed(seed, n, r)
            if skip:
                records.append(TimingRecord(algorithm, n, r, s, math.nan, 0, "skipped"))
                continue
            boxes = generate(n, s)
            elapsed, m = _timed_reduction(boxes, algorithm)
            times.append(elapsed)
            records.append(TimingRecord(algorithm, n, r, s, elapsed, m))
        if times:
            mean = float(np.mean(times))
            log.info("%s n=%d mean=%.4gs", algorithm, n, mean)
            if mean > budget:
                over_budget = True
    return records


def summarize(records: Iterable[TimingRecord]) -> list[dict]:
    """Mean and standard deviation of elapsed time per (algorithm, n)."""
    groups: dict[tuple[str, int], list[float]] = {}
    for r in records:
        if r.status == "ok":
            groups.setdefault((r.algorithm, r.n), []).append(r.elapsed)
    rows = []
    for (alg, n), t in sorted(groups.items()):
        sd = float(np.std(t, ddof=1)) if len(t) > 1 else 0.0
        rows.append({"algorithm": alg, "n": n, "reps": len(t), "mean": float(np.mean(t)), "sd": sd})
    return rows


def fit_loglog_slope(records: Iterable[TimingRecord], k_last: int = 4) -> float:
    """Least-squares slope of log(mean time) against log(n) over the k_last largest sizes."""
    if k_last < 2:
        raise ValueError("k_last must be >= 2")
    rows = summarize(records)
    if len({r["algorithm"] for r in rows}) > 1:
        raise ValueError("records mix several algorithms")
    if len(rows) < k_last:
        raise ValueError(f"need at least {k_last} sizes with timings, got {len(rows)}")
    rows = rows[-k_last:]
    x = np.log([r["n"] for r in rows])
    y = np.log([r["mean"] for r in rows])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def write_records_csv(records: Iterable[TimingRecord], fh) -> None:
    w = csv.writer(fh)
    names = [f.name for f in fields(TimingRecord)]
    w.writerow(names)
    for r in records:
        row = asdict(r)
        row["elapsed"] = "" if math.isnan(r.elapsed) else repr(r.elapsed)
        w.writerow([row[k] for k in names])


def write_summary_csv(records: Iterable[TimingRecord], fh) -> None:
    w = csv.writer(fh)
    w.writerow(["algorithm", "n", "reps", "mean", "sd"])
    for row in summarize(records):
        w.writerow([row["algorithm"], row["n"], row["reps"], repr(row["mean"]), repr(row["sd"])])
