import numpy as np
import pytest

from tourpart import (
    NoPath,
    SubdivisionSpec,
    digraph_from_edges,
    is_backwards_transitive,
    is_strongly_k_connected,
    nonseparating_subdivision,
    remove_nonseparating_path,
    shortest_path_avoiding,
    spanning_linkage,
)
from tourpart.generators import random_tournament, transitive_tournament
from tourpart.surgery import check_spanning_linkage


def test_shortest_path_examples(c3, t4):
    assert shortest_path_avoiding(c3, 0, 2) == [0, 1, 2]
    assert shortest_path_avoiding(t4, 0, 3) == [0, 3]
    assert shortest_path_avoiding(c3, 0, 2, {1}) is None
    with pytest.raises(ValueError):
        shortest_path_avoiding(c3, 0, 2, {0})
    with pytest.raises(ValueError):
        shortest_path_avoiding(c3, 1, 1)


def test_carve_keep_semantics(t4):
    res = remove_nonseparating_path(t4, 0, 3, keep=(0, 3))
    assert res.path == [0, 3]
    assert res.remainder.n == 4  # direct edge, endpoints kept: nothing removed
    res = remove_nonseparating_path(t4, 0, 3, keep=())
    assert res.remainder.n == 2 and res.index_map == [1, 2]
    with pytest.raises(ValueError):
        remove_nonseparating_path(t4, 0, 3, keep=(1,))


def test_carve_no_path_is_an_error(c3):
    with pytest.raises(NoPath):
        remove_nonseparating_path(c3, 0, 2, avoid=(1,))


def test_carve_short_path_guarantee(rand):
    # a path of length <= 2 with endpoints kept removes at most one vertex
    for seed in range(5):
        T = rand(30, seed)
        res = remove_nonseparating_path(T, 0, 1, k=1, keep=(0, 1))
        assert len(res.path) - 1 <= 2
        assert T.n - res.remainder.n <= 1


def test_carve_theorem_backed_trials(rand):
    k, d = 2, 2
    done = 0
    for seed in range(12):
        T = rand(60, seed)
        if not is_strongly_k_connected(T, k + d + 4):
            continue
        res = remove_nonseparating_path(T, 0, 1, avoid=(2, 3), k=k)
        assert res.theorem_backed and res.remainder_ok
        assert is_backwards_transitive(T, res.path)
        done += 1
    assert done >= 8


def test_carve_best_effort_flagging():
    T = transitive_tournament(12)
    res = remove_nonseparating_path(T, 0, 11, k=1, keep=(0, 11))
    assert not res.theorem_backed
    assert not res.remainder_ok  # transitive remainders are never strongly connected


def test_subdivision_single_edge_reduces_to_carve(rand):
    T = rand(60, 3)
    H = digraph_from_edges(2, [(0, 1)])
    spec = SubdivisionSpec(H, [5, 9])
    sub = nonseparating_subdivision(T, spec, 2)
    carve = remove_nonseparating_path(T, 5, 9, avoid=(), k=2, keep=(5, 9))
    assert sub.edge_paths[(0, 1)] == carve.path
    assert sub.remainder_ok


def test_subdivision_triangle(rand):
    H = digraph_from_edges(3, [(0, 1), (1, 2), (2, 0)])
    done = 0
    for seed in range(6):
        T = rand(80, seed)
        if not is_strongly_k_connected(T, 1 + 3 * 5):
            continue
        spec = SubdivisionSpec(H, [10, 20, 30])
        sub = nonseparating_subdivision(T, spec, 1)  # invariant scan runs inside
        assert sub.theorem_backed and sub.remainder_ok
        interiors = [set(p[1:-1]) for p in sub.edge_paths.values()]
        for i in range(3):
            for j in range(i + 1, 3):
                assert not interiors[i] & interiors[j]
        done += 1
    assert done >= 4


def test_subdivision_validation(rand):
    T = rand(20, 0)
    H = digraph_from_edges(2, [(0, 1)])
    with pytest.raises(ValueError):
        SubdivisionSpec(H, [3, 3]).validate(T.n)
    with pytest.raises(ValueError):
        SubdivisionSpec(H, [3]).validate(T.n)
    with pytest.raises(ValueError):
        SubdivisionSpec(H, [3, 99]).validate(T.n)


def test_spanning_single_pair_transitive(t4):
    res = spanning_linkage(t4, [(0, 3)])
    assert res.status == "found"
    assert res.paths == [[0, 1, 2, 3]]


def test_spanning_single_pair_random_trials(rand):
    found = 0
    for seed in range(10):
        T = rand(20, seed)
        if not is_strongly_k_connected(T, 4):
            continue
        rng = np.random.default_rng(seed)
        x, y = rng.choice(20, 2, replace=False)
        res = spanning_linkage(T, [(int(x), int(y))], seed=seed)
        if res.status == "found":
            check_spanning_linkage(T, [(int(x), int(y))], res.paths)
            found += 1
    assert found >= 8


def test_spanning_two_pairs(rand):
    done = 0
    for seed in range(8):
        T = rand(40, seed)
        if not is_strongly_k_connected(T, 10):
            continue
        pairs = [(0, 1), (2, 3)]
        res = spanning_linkage(T, pairs, seed=seed)
        assert res.status == "found" and res.theorem_backed
        covered = set(v for p in res.paths for v in p)
        assert covered == set(range(40))
        done += 1
    assert done >= 5


def test_spanning_shared_terminals(rand):
    # the same vertex may serve two pairs as an endpoint
    for seed in range(6):
        T = rand(30, seed)
        if not is_strongly_k_connected(T, 10):
            continue
        pairs = [(0, 1), (1, 2)]
        res = spanning_linkage(T, pairs, seed=seed)
        if res.status == "found":
            check_spanning_linkage(T, pairs, res.paths)
            return
    pytest.skip("no qualifying instance in the sample")


def test_spanning_infeasible_on_transitive():
    T = transitive_tournament(10)
    res = spanning_linkage(T, [(3, 0)])
    assert res.status == "infeasible"


def test_spanning_validation(t4):
    with pytest.raises(ValueError):
        spanning_linkage(t4, [(0, 0)])
    with pytest.raises(ValueError):
        spanning_linkage(t4, [(0, 1), (0, 1)])
