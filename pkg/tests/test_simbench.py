import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heightmap.geometry import canonicalize
from heightmap.simbench import (
    TimingRecord,
    current_status_box,
    fit_loglog_slope,
    gen_current_status,
    gen_random_boxes,
    replicate_seed,
    run_benchmark,
    summarize,
    write_records_csv,
    write_summary_csv,
)

INF = math.inf


@pytest.mark.parametrize("x,y,expected", [
    (0.2, 0.9, ((0, False, 0.5, True), (0.3, False, INF, False))),
    (0.7, 0.9, ((0.5, False, INF, False), (0.3, False, INF, False))),
    (0.2, 0.1, ((0, False, 0.5, True), (0, False, 0.3, True))),
    (0.7, 0.1, ((0.5, False, INF, False), (0, False, 0.3, True))),
])
def test_case_table(x, y, expected):
    assert current_status_box(x, y, 0.5, 0.3).point_set() == expected


def test_event_at_inspection_time_counts_as_before():
    box = current_status_box(0.5, 0.3, 0.5, 0.3)
    assert box.point_set() == ((0, False, 0.5, True), (0, False, 0.3, True))


def test_generator_is_deterministic():
    a = [b.point_set() for b in gen_current_status(200, 11)]
    b = [b.point_set() for b in gen_current_status(200, 11)]
    c = [b.point_set() for b in gen_current_status(200, 12)]
    assert a == b and a != c


def test_generated_boxes_are_valid_and_indexed():
    boxes = gen_current_status(300, 3)
    for i, b in enumerate(boxes, start=1):
        b.validate()
        assert b.index == i
    canonicalize(boxes)[0].validate()
    for b in gen_random_boxes(50, 3, 5):
        b.validate()


def test_generator_marginals():
    rng = np.random.default_rng(99)
    x, _, u, _ = rng.standard_exponential(size=(4, 100_000))
    boxes = gen_current_status(100_000, 99)
    first = np.array([b.upper[0].value != INF for b in boxes])
    assert np.array_equal(first, x <= u)
    assert abs(first.mean() - 0.5) <= 0.01


def test_replicate_seeds_differ():
    seeds = {replicate_seed(0, n, r) for n in (50, 100) for r in range(10)}
    assert len(seeds) == 20
    assert replicate_seed(0, 50, 3) == replicate_seed(0, 50, 3)


def test_record_count_and_reproducible_datasets():
    recs = run_benchmark([50, 100], 2, seed=4)
    assert [(r.n, r.replicate) for r in recs] == [(50, 0), (50, 1), (100, 0), (100, 1)]
    again = run_benchmark([50, 100], 2, seed=4)
    assert all(a.same_run(b) for a, b in zip(recs, again))
    assert all(r.m >= 1 and r.elapsed >= 0 for r in recs)
    assert len(run_benchmark([30, 40, 60], 1)) == 3


def test_warmup_and_measured_runs_differ_only_in_time():
    cold = run_benchmark([64], 3, seed=8, warmup=False)
    warm = run_benchmark([64], 3, seed=8, warmup=True)
    assert all(a.same_run(b) for a, b in zip(cold, warm))


def test_mean_time_grows_with_n():
    recs = run_benchmark([50, 400], 10, seed=1)
    means = {row["n"]: row["mean"] for row in summarize(recs)}
    assert means[400] >= means[50]


def test_oracle_beyond_bound_is_skipped():
    recs = run_benchmark([10, 1000], 2, algorithm="oracle")
    assert [r.status for r in recs] == ["ok", "ok", "skipped", "skipped"]
    assert all(math.isnan(r.elapsed) and r.m == 0 for r in recs[2:])


def test_budget_skips_larger_sizes():
    recs = run_benchmark([20, 40, 80], 1, budget=0.0)
    assert [r.status for r in recs] == ["ok", "skipped", "skipped"]


def test_nd_benchmark_runs():
    recs = run_benchmark([5, 10], 1, algorithm="nd", d=3)
    assert all(r.status == "ok" and r.m >= 1 for r in recs)


@pytest.mark.parametrize("kwargs", [
    dict(sizes=[], replicates=1),
    dict(sizes=[100, 50], replicates=1),
    dict(sizes=[50], replicates=0),
    dict(sizes=[50], replicates=1, algorithm="nope"),
    dict(sizes=[50], replicates=1, d=3),
])
def test_bad_arguments(kwargs):
    with pytest.raises(ValueError):
        run_benchmark(**kwargs)


def _synthetic(power, sizes=(50, 100, 250, 500, 1000, 2500, 5000, 10000), c=3e-9):
    return [TimingRecord("x", n, r, 0, c * n ** power, 1) for n in sizes for r in range(3)]


@pytest.mark.parametrize("power", [2, 3])
def test_exact_power_law_slopes(power):
    assert abs(fit_loglog_slope(_synthetic(power)) - power) <= 1e-9


def test_slope_uses_only_the_largest_sizes():
    recs = _synthetic(2)
    recs = [TimingRecord("x", r.n, r.replicate, 0, r.elapsed * (50 if r.n < 1000 else 1), 1) for r in recs]
    assert abs(fit_loglog_slope(recs, 4) - 2) <= 1e-9


def test_slope_needs_enough_sizes():
    with pytest.raises(ValueError):
        fit_loglog_slope(_synthetic(2, sizes=(10, 20, 30)), 4)
    with pytest.raises(ValueError):
        fit_loglog_slope(_synthetic(2), 1)


@given(st.text(min_size=1, max_size=5), st.integers(1, 10**6), st.integers(0, 100),
       st.integers(0, 2**32 - 1), st.floats(0, 100), st.floats(0, 100), st.integers(1, 10**6))
@settings(max_examples=100, deadline=None)
def test_same_run_ignores_only_elapsed(alg, n, r, seed, t1, t2, m):
    a = TimingRecord(alg, n, r, seed, t1, m)
    assert a.same_run(TimingRecord(alg, n, r, seed, t2, m))
    assert not a.same_run(TimingRecord(alg, n, r, seed, t2, m + 1))
    assert not a.same_run(TimingRecord(alg, n + 1, r, seed, t1, m))


def test_csv_outputs():
    recs = run_benchmark([30], 2, algorithm="oracle") + run_benchmark([10**4], 1, algorithm="oracle", warmup=False)
    fh = io.StringIO()
    write_records_csv(recs, fh)
    lines = fh.getvalue().splitlines()
    assert lines[0] == "algorithm,n,replicate,seed,elapsed,m,status"
    assert len(lines) == 4
    assert lines[-1].split(",")[4] == "" and lines[-1].endswith("skipped")
    fh = io.StringIO()
    write_summary_csv(recs, fh)
    rows = fh.getvalue().splitlines()
    assert rows[0] == "algorithm,n,reps,mean,sd" and rows[1].startswith("oracle,30,2,")
