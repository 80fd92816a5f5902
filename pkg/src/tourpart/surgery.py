"""Non-separating removals: path deletion, prescribed subdivisions and
spanning linkages.

Each operation measures whether the connectivity hypothesis backing its
guarantee actually holds on the given instance.  When it does, the promised
property of the remainder is asserted outright; when it does not, the
operation still runs, verifies what it produced, and flags the result as
best-effort.  Shortest paths drive everything: a BFS-shortest path can have
no forward long-range chord, so it is automatically backwards-transitive,
and that fact is asserted on every path returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .connectivity import is_strongly_k_connected
from .core import Digraph, bfs_shortest_path, is_backwards_transitive
from .hamilton import FOUND, NONE, UNKNOWN, hamiltonian_path


class NoPath(Exception):
    """No directed path exists under the requested avoidance constraints."""


def shortest_path_avoiding(T, x, y, forbidden=()):
    """BFS-shortest x->y path in T minus ``forbidden``, or None.

    Deterministic lowest-id tie-breaks; any returned path is checked to be
    backwards-transitive.
    """
    if x == y:
        raise ValueError("endpoints must differ")
    blocked = {int(u) for u in forbidden}
    if x in blocked or y in blocked:
        raise ValueError("endpoints may not be forbidden")
    allowed = np.ones(T.n, dtype=bool)
    for u in blocked:
        allowed[u] = False
    path = bfs_shortest_path(T.adj, x, y, allowed)
    if path is not None:
        assert is_backwards_transitive(T, path), "shortest path has a forward chord"
    return path


@dataclass
class CarveResult:
    path: list
    remainder: object  # Tournament
    index_map: list
    theorem_backed: bool
    remainder_ok: bool
    level: int


def remove_nonseparating_path(T, x, y, avoid=(), k=1, keep=(), assume_hypothesis=None):
    """Delete a shortest x->y path (minus ``keep``) without destroying
    strong k-connectivity.

    The guarantee holds whenever T is strongly (k + |avoid| + 4)-connected;
    that hypothesis is measured unless ``assume_hypothesis`` pins it, and
    the remainder's strong k-connectivity is verified either way.
    """
    avoid = sorted({int(u) for u in avoid})
    keep = {int(u) for u in keep}
    if not keep <= {x, y}:
        raise ValueError("keep must be a subset of the endpoints")
    if x in avoid or y in avoid:
        raise ValueError("endpoints may not be avoided")
    path = shortest_path_avoiding(T, x, y, avoid)
    if path is None:
        raise NoPath(f"no {x}->{y} path avoiding {avoid}")
    level = k + len(avoid) + 4
    if assume_hypothesis is None:
        backed = is_strongly_k_connected(T, level)
    else:
        backed = bool(assume_hypothesis)
    survivors = [v for v in range(T.n) if v not in set(path) - keep]
    remainder, index_map = T.subtournament(survivors)
    ok = is_strongly_k_connected(remainder, k)
    if backed:
        assert ok, "guaranteed remainder failed its connectivity check"
    return CarveResult(path, remainder, index_map, backed, ok, level)


@dataclass
class SubdivisionSpec:
    """A pattern digraph together with the tournament vertices that must
    play its branch vertices (``branches[h]`` hosts pattern vertex h)."""

    pattern: Digraph
    branches: list

    def validate(self, n):
        if len(self.branches) != self.pattern.n:
            raise ValueError("one branch vertex required per pattern vertex")
        if len(set(self.branches)) != len(self.branches):
            raise ValueError("branch vertices must be distinct")
        for v in self.branches:
            if not 0 <= v < n:
                raise ValueError("branch vertex out of range")


@dataclass
class Subdivision:
    branches: list
    edge_paths: dict
    remainder: object
    index_map: list
    theorem_backed: bool
    remainder_ok: bool
    level: int


def nonseparating_subdivision(T, spec, k):
    """Embed a subdivision of the pattern on prescribed branch vertices so
    that deleting it leaves a strongly k-connected tournament.

    Edges are carved one at a time as shortest paths avoiding the other
    branch vertices and all earlier interiors; the guarantee needs T to be
    strongly (k + m(d+2))-connected, which is measured.
    """
    spec.validate(T.n)
    d = spec.pattern.n
    edges = sorted(spec.pattern.edges())
    m = len(edges)
    level = k + m * (d + 2)
    backed = m >= 1 and is_strongly_k_connected(T, level)
    branch_set = set(spec.branches)
    alive = np.ones(T.n, dtype=bool)
    edge_paths = {}
    for hu, hv in edges:
        x, y = spec.branches[hu], spec.branches[hv]
        allowed = alive.copy()
        for b in branch_set - {x, y}:
            allowed[b] = False
        path = bfs_shortest_path(T.adj, x, y, allowed)
        if path is None:
            raise NoPath(f"no path for pattern edge {hu}->{hv} ({x}->{y})")
        assert is_backwards_transitive(T, path)
        edge_paths[(hu, hv)] = path
        for v in path[1:-1]:
            alive[v] = False
    survivors = [v for v in range(T.n) if alive[v] and v not in branch_set]
    remainder, index_map = T.subtournament(survivors)
    ok = is_strongly_k_connected(remainder, k)
    if backed:
        assert ok, "guaranteed remainder failed its connectivity check"
    sub = Subdivision(list(spec.branches), edge_paths, remainder, index_map, backed, ok, level)
    check_subdivision(T, spec, sub)
    return sub


def check_subdivision(T, spec, sub):
    """Invariant scan: endpoint placement, interior disjointness,
    backwards-transitivity."""
    branch_set = set(spec.branches)
    seen_interiors = set()
    for (hu, hv), path in sub.edge_paths.items():
        assert path[0] == spec.branches[hu] and path[-1] == spec.branches[hv]
        inner = set(path[1:-1])
        assert not inner & branch_set, "interior touches a branch vertex"
        assert not inner & seen_interiors, "interiors overlap"
        seen_interiors |= inner
        assert is_backwards_transitive(T, path)


@dataclass
class SpanningLinkage:
    status: str  # found | infeasible | unknown
    paths: list | None
    theorem_backed: bool
    detail: str = ""

    def __bool__(self):
        return self.status == FOUND


def spanning_linkage(T, pairs, seed=0, ham_budget=300_000):
    """Internally disjoint x_i -> y_i paths whose vertex sets cover V(T).

    Pairs are processed last to first: carve a shortest path for the final
    pair avoiding the earlier terminals, recurse on what is left, and close
    with a Hamiltonian path for the first pair.  Guaranteed when T is
    strongly (k^2+3k)-connected (measured).  "infeasible" is only reported
    when proven on the untouched tournament; construction dead-ends and
    Hamiltonian budget exhaustion surface as "unknown".
    """
    pairs = [(int(x), int(y)) for x, y in pairs]
    k = len(pairs)
    if k == 0:
        raise ValueError("at least one pair required")
    for x, y in pairs:
        if x == y:
            raise ValueError("pair endpoints must differ")
    if len(set(pairs)) != len(pairs):
        raise ValueError("pairs must be distinct")
    backed = is_strongly_k_connected(T, k * k + 3 * k)
    alive = np.ones(T.n, dtype=bool)
    paths = [None] * k
    for idx in range(k - 1, 0, -1):
        x, y = pairs[idx]
        earlier = {v for p in pairs[:idx] for v in p}
        shared = earlier & {x, y}
        allowed = alive.copy()
        for v in earlier - shared:
            allowed[v] = False
        path = bfs_shortest_path(T.adj, x, y, allowed)
        if path is None:
            if alive.all():
                return SpanningLinkage("infeasible", None, backed,
                                       f"pair {idx}: no admissible {x}->{y} path exists")
            return SpanningLinkage("unknown", None, backed,
                                   f"pair {idx}: carve order dead-ended")
        assert is_backwards_transitive(T, path)
        paths[idx] = path
        for v in set(path) - shared:
            alive[v] = False

    x, y = pairs[0]
    ids = sorted(np.flatnonzero(alive).tolist())
    sub, index_map = T.subtournament(ids)
    back = {g: i for i, g in enumerate(index_map)}
    res = hamiltonian_path(sub, back[x], back[y], budget=ham_budget, seed=seed)
    if res.status == UNKNOWN:
        return SpanningLinkage("unknown", None, backed, "pair 0: Hamiltonian budget exhausted")
    if res.status == NONE:
        if len(ids) == T.n:
            return SpanningLinkage("infeasible", None, backed,
                                   "pair 0: no spanning path exists")
        return SpanningLinkage("unknown", None, backed,
                               "pair 0: no Hamiltonian close for this carve order")
    paths[0] = [index_map[v] for v in res.path]
    check_spanning_linkage(T, pairs, paths)
    return SpanningLinkage(FOUND, paths, backed)


def check_spanning_linkage(T, pairs, paths):
    """Exact cover and disjointness scan for a spanning linkage."""
    from .core import is_path

    terminals = {v for p in pairs for v in p}
    covered = []
    for i, path in enumerate(paths):
        x, y = pairs[i]
        assert is_path(T, path) and path[0] == x and path[-1] == y
        assert set(path) & terminals == {x, y}, "path meets a foreign terminal"
        covered.extend(path)
    assert set(covered) == set(range(T.n)), "paths do not cover the tournament"
    from collections import Counter

    counts = Counter(covered)
    for v, c in counts.items():
        if c > 1:
            assert v in terminals, "non-terminal vertex on two paths"
