import numpy as np
import pytest

from heightmap.errors import OracleSizeError
from heightmap.geometry import CanonicalBoxes, canonicalize
from heightmap.oracle import DEFAULT_MAX_CELLS, clique_of, covering_sets, oracle_max_cells, oracle_reduce
from heightmap.simbench import gen_current_status
from heightmap.sweep2d import reduce2d

from conftest import canonical2d, random_canonical

TWO_SQUARES = canonical2d([(1, 3, 1, 3), (2, 4, 2, 4)])


def test_two_squares():
    assert [a.key() for a in oracle_reduce(TWO_SQUARES)] == [((2, 2), (3, 3), (1, 2))]


def test_single_box():
    cb = CanonicalBoxes([(1, 1, 1)], [(2, 2, 2)])
    assert [a.key() for a in oracle_reduce(cb)] == [((1, 1, 1), (2, 2, 2), (1,))]


def test_current_status_sample_matches_sweep():
    cb, _ = canonicalize(gen_current_status(50, seed=7))
    ref = oracle_reduce(cb)
    found = reduce2d(cb)
    assert len(ref) == len(found)
    assert {a.key() for a in ref} == {a.key() for a in found}


def test_clique_of():
    assert clique_of(((2, 2), (3, 3)), TWO_SQUARES) == {1, 2}
    assert clique_of(((1, 1), (3, 3)), TWO_SQUARES) == {1}
    assert clique_of(((3, 3), (4, 4)), TWO_SQUARES) == {2}
    far = canonical2d([(1, 2, 1, 2), (3, 4, 3, 4)])
    assert clique_of(((1, 3), (2, 4)), far) == set()


def test_covering_sets_count_heights(rng):
    for _ in range(20):
        n, d = int(rng.integers(1, 8)), int(rng.integers(1, 4))
        cb = random_canonical(rng, n, d)
        packed, shape = covering_sets(cb)
        members = np.unpackbits(packed, axis=1)[:, :n].astype(bool)
        cells = np.array(np.unravel_index(np.arange(len(members)), shape)).T + 1
        for c, row in zip(cells, members):
            want = (cb.lo < c).all(axis=1) & (c <= cb.hi).all(axis=1)
            assert np.array_equal(row, want)


def test_results_are_sorted_and_have_nonempty_cliques(rng):
    for _ in range(50):
        cb = random_canonical(rng, int(rng.integers(1, 20)), 2)
        res = oracle_reduce(cb)
        assert [(a.lo, a.hi) for a in res] == sorted((a.lo, a.hi) for a in res)
        for a in res:
            idx = np.array(a.clique) - 1
            # common intersection of the clique is nonempty and is the reported box
            assert (cb.lo[idx].max(axis=0) < cb.hi[idx].min(axis=0)).all()
            assert clique_of(a, cb) == set(a.clique)


def test_permutation_invariance(rng):
    for _ in range(30):
        n, d = int(rng.integers(2, 15)), int(rng.integers(2, 4))
        cb = random_canonical(rng, n, d)
        perm = rng.permutation(n)
        pb = CanonicalBoxes(cb.lo[perm], cb.hi[perm])
        relabel = {int(p) + 1: k + 1 for k, p in enumerate(perm)}
        base = {(a.lo, a.hi, a.clique) for a in oracle_reduce(cb)}
        moved = {(a.lo, a.hi, tuple(sorted(relabel[i] for i in a.clique))) for a in oracle_reduce(cb)}
        got = {(a.lo, a.hi, tuple(sorted(a.clique))) for a in oracle_reduce(pb)}
        assert {(lo, hi) for lo, hi, _ in base} == {(lo, hi) for lo, hi, _ in got}
        assert moved == got


def test_refuses_oversize(monkeypatch, rng):
    monkeypatch.delenv("HEIGHTMAP_ORACLE_MAX_CELLS", raising=False)
    assert oracle_max_cells() == DEFAULT_MAX_CELLS
    cb = random_canonical(rng, 13, 4)  # 26^4 cells
    with pytest.raises(OracleSizeError) as info:
        oracle_reduce(cb)
    assert str(DEFAULT_MAX_CELLS) in str(info.value)


def test_env_override(monkeypatch, rng):
    monkeypatch.setenv("HEIGHTMAP_ORACLE_MAX_CELLS", "100")
    with pytest.raises(OracleSizeError):
        oracle_reduce(random_canonical(rng, 6, 2))
    assert len(oracle_reduce(random_canonical(rng, 5, 2))) >= 1
