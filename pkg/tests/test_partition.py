import numpy as np
import pytest

from oracles import brute_strong_k
from tourpart import bipartite_subdigraph, is_strongly_k_connected, subtournament
from tourpart.generators import random_tournament, transitive_tournament
from tourpart.partition import (
    PartitionResult,
    format_partition,
    partition,
    search_partition,
    verify_partition,
)
from tourpart.pipeline import PipelineError, PipelineParams
from tourpart.safety import ALPHA


def test_verify_rejects_non_partitions(c3):
    with pytest.raises(ValueError):
        verify_partition(c3, [0, 1, 2], [], 1)
    with pytest.raises(ValueError):
        verify_partition(c3, [0, 1], [1, 2], 1)
    with pytest.raises(ValueError):
        verify_partition(c3, [0], [1], 1)


def test_verify_small_cycle_fails_any_split(c3):
    for v in range(3):
        rest = [u for u in range(3) if u != v]
        assert not verify_partition(c3, [v], rest, 1).verified


def test_verify_agrees_with_brute_force(rand):
    rng = np.random.default_rng(0)
    for seed in range(12):
        T = rand(9, seed)
        v1 = sorted(int(v) for v in rng.choice(9, 4, replace=False))
        v2 = sorted(set(range(9)) - set(v1))
        for k in (1, 2):
            res = verify_partition(T, v1, v2, k)
            t1, _ = subtournament(T, v1)
            t2, _ = subtournament(T, v2)
            cross, _ = bipartite_subdigraph(T, v1, v2)
            want = all(brute_strong_k(g, k) for g in (t1, t2, cross))
            assert res.verified == want


def test_verify_reports_exact_connectivity(rand):
    T = rand(24, 3)
    res = verify_partition(T, range(12), range(12, 24), 1)
    assert res.connectivity_exact
    t1, _ = subtournament(T, range(12))
    from tourpart import vertex_connectivity

    assert res.connectivity[0] == vertex_connectivity(t1)


def test_search_small(rand):
    res = search_partition(rand(30, 2), 1, seed=0)
    assert res is not None and res.verified and res.mode == "search"


def test_search_k2(rand):
    got = 0
    for seed in range(6):
        res = search_partition(rand(40, 100 + seed), 2, seed=seed)
        if res is not None:
            assert res.verified
            got += 1
    assert got >= 5


def test_search_negative_control():
    # transitive tournaments admit no strongly connected side at all
    for seed in range(3):
        res = search_partition(transitive_tournament(40), 1, seed=seed, budget=120)
        assert res is None


def test_search_size_precondition():
    with pytest.raises(ValueError):
        search_partition(transitive_tournament(5), 2, seed=0)


def test_partition_entry_modes(rand):
    T = rand(40, 7)
    res = partition(T, 2, mode="search", seed=1)
    assert res is not None and res.verified
    # auto with guaranteed constants falls through to search on desk instances
    res2 = partition(T, 2, mode="auto", seed=1)
    assert res2 is not None and res2.verified and res2.mode == "search"
    with pytest.raises(PipelineError):
        partition(T, 2, mode="pipeline", seed=1)
    with pytest.raises(ValueError):
        partition(T, 0, seed=1)
    with pytest.raises(ValueError):
        partition(T, 1, mode="bogus", seed=1)


def test_pipeline_mode_end_to_end():
    T = random_tournament(1500, 3)
    params = PipelineParams.relaxed(1, chain_cap=6)
    res = partition(T, 1, mode="pipeline", params=params, seed=0)
    assert res.verified and res.mode == "pipeline"
    assert res.audits and all(a.passed for a in res.audits)
    assert sorted(res.v1 + res.v2) == list(range(1500))


def test_finished_pipeline_state_witnesses_partition():
    # the verifier must agree with what a finished run's audits promised
    from tourpart.pipeline import run_pipeline

    T = random_tournament(1500, 4)
    params = PipelineParams.relaxed(1, chain_cap=6)
    state = run_pipeline(T, 1, params, seed=0)
    assert all(a.passed for a in state.audits)
    v1, v2 = state.partition_sets()
    res = verify_partition(T, v1, v2, 1)
    assert res.verified
    # the six connector paths really join the chain tips and stay monochrome
    # or alternating per their class
    col = state.coloring
    for i in range(state.total):
        p = state.connectors[i]
        b, a = state.tips(i)
        assert p[0] == b and p[-1] == a


def test_result_serialization(rand):
    res = search_partition(rand(30, 5), 1, seed=3)
    text = format_partition(res)
    lines = text.splitlines()
    assert lines[0].startswith("V1: ") and lines[1].startswith("V2: ")
    assert any(line.startswith("verified: true") for line in lines)
    assert any(line.startswith("connectivity: ") for line in lines)
    assert any(line.startswith("mode: search") for line in lines)
    ids = sorted(int(t) for line in lines[:2] for t in line.split()[1:])
    assert ids == list(range(30))
