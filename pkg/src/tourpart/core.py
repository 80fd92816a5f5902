"""Tournaments, digraphs, directed paths and their basic structure queries.

A tournament on n vertices is stored as a dense boolean orientation matrix
``adj`` with ``adj[u, v]`` true iff the edge u->v is present.  Vertices are
the integers 0..n-1 throughout; every named vertex set is a plain Python
set over that id space.  Graphs are immutable after construction so they
can be shared freely between concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Path = list  # a directed simple path, as a list of vertex ids


class Digraph:
    """A loopless digraph on vertices 0..n-1 with at most one copy of each arc."""

    def __init__(self, adj):
        adj = np.asarray(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if adj.shape[0] and adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        adj = adj.copy()
        adj.setflags(write=False)
        self.adj = adj
        self.n = adj.shape[0]

    def has_edge(self, u, v):
        return bool(self.adj[u, v])

    def out_degrees(self):
        return self.adj.sum(axis=1)

    def in_degrees(self):
        return self.adj.sum(axis=0)

    def out_neighbors(self, v):
        return np.flatnonzero(self.adj[v])

    def in_neighbors(self, v):
        return np.flatnonzero(self.adj[:, v])

    def edges(self):
        us, vs = np.nonzero(self.adj)
        return list(zip(us.tolist(), vs.tolist()))

    def edge_count(self):
        return int(self.adj.sum())

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, m={self.edge_count()})"


class Tournament(Digraph):
    """A complete oriented graph: exactly one direction per vertex pair."""

    def __init__(self, adj):
        super().__init__(adj)
        n = self.n
        if n > 1:
            both = self.adj ^ self.adj.T
            both[np.diag_indices(n)] = True
            if not both.all():
                raise ValueError("not a tournament: some pair is unoriented or doubly oriented")

    def out_degree(self, v):
        return int(self.adj[v].sum())

    def in_degree(self, v):
        return int(self.adj[:, v].sum())

    def reverse(self):
        """The tournament with every edge orientation flipped (an involution)."""
        return Tournament(self.adj.T)

    def subtournament(self, vertices):
        """Restriction to ``vertices``; returns (sub, index_map) with
        ``index_map[new_id] = old_id`` in ascending old-id order."""
        ids = sorted(set(int(v) for v in vertices))
        if not ids:
            raise ValueError("subtournament needs at least one vertex")
        if ids[0] < 0 or ids[-1] >= self.n:
            raise ValueError("vertex id out of range")
        sub = Tournament(self.adj[np.ix_(ids, ids)])
        return sub, ids


def tournament_from_edges(n, edges):
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        adj[u, v] = True
    return Tournament(adj)


def digraph_from_edges(n, edges):
    adj = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop {u}->{v}")
        adj[u, v] = True
    return Digraph(adj)


def reverse(T):
    return T.reverse()


def subtournament(T, vertices):
    return T.subtournament(vertices)


def bipartite_subdigraph(T, side_a, side_b):
    """Digraph keeping only the T-edges that cross between ``side_a`` and
    ``side_b``.  Vertices are relabelled to 0..m-1 over sorted(A | B); the
    second return value maps new ids back to T ids (identity when A | B
    covers all of T)."""
    A = set(int(v) for v in side_a)
    B = set(int(v) for v in side_b)
    if not A or not B:
        raise ValueError("both sides must be nonempty")
    if A & B:
        raise ValueError("sides overlap")
    ids = sorted(A | B)
    if ids[0] < 0 or ids[-1] >= T.n:
        raise ValueError("vertex id out of range")
    sub = T.adj[np.ix_(ids, ids)].copy()
    in_a = np.array([v in A for v in ids])
    same_side = in_a[:, None] == in_a[None, :]
    sub[same_side] = False
    return Digraph(sub), ids


def is_path(G, vertices):
    """True iff ``vertices`` is a nonempty directed simple path in G."""
    if len(vertices) == 0:
        return False
    if len(set(vertices)) != len(vertices):
        return False
    return all(G.has_edge(u, v) for u, v in zip(vertices, vertices[1:]))


def path_length(path):
    return len(path) - 1


def is_backwards_transitive(T, path):
    """True iff every long-range pair on the path (positions >= 2 apart) is
    joined by an edge running from the later vertex back to the earlier one."""
    if not is_path(T, path):
        raise ValueError("not a path in the host graph")
    m = len(path)
    for j in range(m):
        for i in range(j + 2, m):
            if not T.has_edge(path[i], path[j]):
                return False
    return True


def transitive_order(T, vertices):
    """Source-to-sink order of T[vertices] when transitive, else None.

    A tournament is transitive exactly when its out-degree sequence is a
    permutation of 0..m-1; the order is then unique.
    """
    ids = sorted(set(int(v) for v in vertices))
    if not ids:
        raise ValueError("empty vertex set")
    sub = T.adj[np.ix_(ids, ids)]
    degs = sub.sum(axis=1)
    m = len(ids)
    if sorted(degs.tolist()) != list(range(m)):
        return None
    order = [ids[i] for i in np.argsort(-degs, kind="stable")]
    return order


# ---------------------------------------------------------------------------
# breadth-first search helpers (shared by the surgery and partition layers)

def reachable_mask(adj, sources, allowed=None):
    """Boolean mask of vertices reachable from ``sources`` inside ``allowed``.

    ``sources`` may be a vertex id or an iterable; sources outside ``allowed``
    are ignored.  Reachability includes the sources themselves.
    """
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    if np.isscalar(sources):
        seen[int(sources)] = True
    else:
        for s in sources:
            seen[int(s)] = True
    if allowed is not None:
        seen &= allowed
    frontier = seen.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0)
        if allowed is not None:
            nxt &= allowed
        nxt &= ~seen
        seen |= nxt
        frontier = nxt
    return seen


def bfs_shortest_path(adj, x, y, allowed=None, min_length=1):
    """Lexicographically smallest BFS-shortest x->y path, or None.

    Ties between candidate parents are broken toward the lowest vertex id,
    which keeps every caller deterministic.  ``allowed`` restricts the
    vertices the path may use; x and y are always permitted.  With
    ``min_length=2`` the direct edge x->y is not taken (paths must have a
    nonempty interior).
    """
    n = adj.shape[0]
    ok = np.ones(n, dtype=bool) if allowed is None else allowed.copy()
    ok[x] = ok[y] = True
    if x == y:
        raise ValueError("endpoints must differ")
    parent = np.full(n, -1, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[x] = True
    frontier = [x]
    depth = 0
    while frontier and not seen[y]:
        reach = adj[frontier].any(axis=0) & ok & ~seen
        if depth == 0 and min_length >= 2:
            reach[y] = False
        depth += 1
        new = np.flatnonzero(reach)
        if new.size == 0:
            return None
        sub = adj[np.ix_(frontier, new)]
        first = sub.argmax(axis=0)  # frontier is id-sorted, so argmax is lowest id
        parent[new] = np.asarray(frontier)[first]
        seen[new] = True
        frontier = new.tolist()
    if not seen[y]:
        return None
    path = [y]
    while path[-1] != x:
        path.append(int(parent[path[-1]]))
    path.reverse()
    return path


def _parity_walk(adj, x, y, parity, ok, max_length):
    """Shortest x->y walk of the given length parity in the doubled graph.

    The walk visits distinct (vertex, parity) states but may repeat a vertex
    at opposite parities, so it is not guaranteed simple.
    """
    n = adj.shape[0]
    seen = np.zeros((n, 2), dtype=bool)
    parent = np.full((n, 2), -1, dtype=np.int64)
    seen[x, 0] = True
    frontier = [x]
    depth = 0
    want = parity % 2
    while frontier and not (seen[y, want] and depth % 2 == want):
        if max_length is not None and depth >= max_length:
            return None
        q = 1 - depth % 2
        reach = adj[frontier].any(axis=0) & ok & ~seen[:, q]
        new = np.flatnonzero(reach)
        if new.size == 0:
            return None
        sub = adj[np.ix_(frontier, new)]
        first = sub.argmax(axis=0)  # frontier is id-sorted, so argmax is lowest id
        parent[new, q] = np.asarray(frontier)[first]
        seen[new, q] = True
        depth += 1
        frontier = new.tolist()
    if not seen[y, want]:
        return None
    walk = [y]
    pp = want
    while walk[-1] != x or pp != 0:
        walk.append(int(parent[walk[-1], pp]))
        pp = 1 - pp
    walk.reverse()
    return walk


def bfs_parity_path(adj, x, y, parity, allowed=None, max_length=None, retries=8):
    """Short simple x->y path whose edge count has the requested parity.

    BFS on the parity-doubled graph with deterministic lowest-id parents.
    A shortest parity walk can revisit a vertex at opposite parities; such
    vertices are banned and the search retried, so a None result does not
    prove absence.  Callers audit what they build from this.
    """
    if x == y:
        raise ValueError("endpoints must differ")
    n = adj.shape[0]
    ok = np.ones(n, dtype=bool) if allowed is None else allowed.copy()
    ok[x] = ok[y] = True
    for _ in range(retries):
        walk = _parity_walk(adj, x, y, parity, ok, max_length)
        if walk is None:
            return None
        if len(set(walk)) == len(walk):
            return walk
        counts = {}
        for v in walk:
            counts[v] = counts.get(v, 0) + 1
        dup = min(v for v, c in counts.items() if c > 1)
        ok[dup] = False
    return None
