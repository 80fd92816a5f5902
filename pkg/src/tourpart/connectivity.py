"""Strong connectivity certification, minimum separators and disjoint paths.

Vertex cuts are computed by unit-vertex-capacity max-flow after the usual
vertex-splitting reduction (v_in -> v_out with capacity 1, original arcs
uncapped).  A pair (x, y) joined by the direct edge x->y can never be
separated by deleting other vertices, so such pairs impose no constraint on
strong connectivity and are skipped everywhere.

Whole-graph checks do not inspect all n^2 ordered pairs: if some set F with
|F| < k separates some pair, then any fixed k-element vertex set U contains
a vertex u outside F, and F also separates a pair with u as one endpoint.
Sweeping the pairs incident to U is therefore sound, and the same argument
with a growing U computes the exact connectivity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .core import Digraph, is_path, reachable_mask

FOUND = "found"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"


class BudgetExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# vertex-split flow network


class VertexFlow:
    """Reusable split network for one graph; queries differ only in (x, y).

    Node 2v is the entry copy of v, node 2v+1 the exit copy.  Split arcs have
    capacity 1, original arcs are effectively uncapped, so every minimum cut
    consists of split arcs and reads off directly as a vertex set.
    """

    def __init__(self, adj):
        self.n = n = adj.shape[0]
        us, vs = np.nonzero(adj)
        big = n + 1
        rows = np.concatenate([np.arange(0, 2 * n, 2), 2 * us + 1])
        cols = np.concatenate([np.arange(1, 2 * n, 2), 2 * vs])
        caps = np.concatenate([np.ones(n, dtype=np.int32),
                               np.full(us.size, big, dtype=np.int32)])
        self.graph = csr_matrix((caps, (rows, cols)), shape=(2 * n, 2 * n), dtype=np.int32)
        self.adj = adj

    def flow_value(self, x, y):
        """Number of internally disjoint x->y paths (edge x->y must be absent)."""
        return int(maximum_flow(self.graph, 2 * x + 1, 2 * y).flow_value)

    def flow_result(self, x, y):
        return maximum_flow(self.graph, 2 * x + 1, 2 * y)

    def paths_and_cut(self, x, y):
        """Decompose a maximum flow into paths and read the residual cut."""
        res = self.flow_result(x, y)
        flow = res.flow.tocsr()
        paths = self._decompose(flow, x, y, res.flow_value)
        cut = self._residual_cut(flow, x)
        return res.flow_value, paths, cut

    def _decompose(self, flow, x, y, value):
        data = flow.data.copy()
        indptr, indices = flow.indptr, flow.indices
        source, sink = 2 * x + 1, 2 * y
        paths = []
        for _ in range(value):
            path = [x]
            node = source
            while node != sink:
                lo, hi = indptr[node], indptr[node + 1]
                nxt = -1
                for pos in range(lo, hi):
                    if data[pos] > 0:
                        nxt = pos
                        break
                assert nxt >= 0, "flow conservation violated during decomposition"
                data[nxt] -= 1
                node = int(indices[nxt])
                if node % 2 == 0 and node != sink:
                    path.append(node // 2)
                    # step through the split arc
                    lo, hi = indptr[node], indptr[node + 1]
                    for pos in range(lo, hi):
                        if indices[pos] == node + 1 and data[pos] > 0:
                            data[pos] -= 1
                            break
                    node += 1
            path.append(y)
            paths.append(path)
        return paths

    def _residual_cut(self, flow, x):
        g = self.graph
        n2 = 2 * self.n
        seen = np.zeros(n2, dtype=bool)
        seen[2 * x + 1] = True
        stack = [2 * x + 1]
        fT = flow.T.tocsr()
        gi, gp, gd = g.indices, g.indptr, g.data
        fi, fp, fd = flow.indices, flow.indptr, flow.data
        ri, rp, rd = fT.indices, fT.indptr, fT.data
        while stack:
            u = stack.pop()
            lo, hi = gp[u], gp[u + 1]
            fl, fhh = fp[u], fp[u + 1]
            fmap = {int(fi[p]): int(fd[p]) for p in range(fl, fhh)}
            for pos in range(lo, hi):
                w = int(gi[pos])
                if not seen[w] and gd[pos] - fmap.get(w, 0) > 0:
                    seen[w] = True
                    stack.append(w)
            lo, hi = rp[u], rp[u + 1]
            for pos in range(lo, hi):
                w = int(ri[pos])
                if not seen[w] and rd[pos] > 0:
                    seen[w] = True
                    stack.append(w)
        cut = [v for v in range(self.n) if seen[2 * v] and not seen[2 * v + 1]]
        return frozenset(cut)


def _strongly_connected(G):
    n = G.n
    if n == 0:
        return False
    if n == 1:
        return True
    fwd = reachable_mask(G.adj, 0)
    if not fwd.all():
        return False
    bwd = reachable_mask(G.adj.T, 0)
    return bool(bwd.all())


def is_strongly_k_connected(G, k):
    """Exact strong k-connectivity test per the |G| > k definition."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    n = G.n
    if k == 0:
        return n >= 1
    if n <= k:
        return False
    degs_out = G.out_degrees()
    degs_in = G.in_degrees()
    if degs_out.min() < k or degs_in.min() < k:
        return False
    if not _strongly_connected(G):
        return False
    if k == 1:
        return True
    net = VertexFlow(G.adj)
    adj = G.adj
    for u in range(k):
        for v in range(n):
            if v == u:
                continue
            if not adj[u, v] and net.flow_value(u, v) < k:
                return False
            if not adj[v, u] and net.flow_value(v, u) < k:
                return False
    return True


def vertex_connectivity(G):
    """Largest k for which G is strongly k-connected (0 when not strong)."""
    n = G.n
    if n <= 1:
        return 0
    if not _strongly_connected(G):
        return 0
    best = int(min(G.out_degrees().min(), G.in_degrees().min()))
    best = min(best, n - 1)
    net = VertexFlow(G.adj)
    adj = G.adj
    for u in range(n):
        for v in range(n):
            if v == u:
                continue
            if not adj[u, v]:
                best = min(best, net.flow_value(u, v))
            if not adj[v, u]:
                best = min(best, net.flow_value(v, u))
        if u + 1 > best:
            break
    return best


@dataclass
class SeparatorCertificate:
    """A minimum vertex cut for an ordered pair plus a matching maximum
    family of internally disjoint paths (Menger equality checked on every
    construction)."""

    pair: tuple
    separator: frozenset
    paths: list

    def size(self):
        return len(self.separator)


def min_separator(G, x, y):
    if x == y:
        raise ValueError("endpoints must differ")
    if G.has_edge(x, y):
        raise ValueError("pair joined by a direct edge has no vertex cut")
    net = VertexFlow(G.adj)
    value, paths, cut = net.paths_and_cut(x, y)
    cert = SeparatorCertificate((x, y), cut, paths)
    _assert_menger(G, x, y, cert, value)
    return cert


def _assert_menger(G, x, y, cert, value):
    assert len(cert.separator) == len(cert.paths) == value, \
        f"Menger equality violated for {(x, y)}: cut {len(cert.separator)}, paths {len(cert.paths)}"
    assert x not in cert.separator and y not in cert.separator
    interiors = set()
    for p in cert.paths:
        assert is_path(G, p) and p[0] == x and p[-1] == y
        inner = set(p[1:-1])
        assert not inner & interiors, "paths share an interior vertex"
        interiors |= inner
    allowed = np.ones(G.n, dtype=bool)
    for v in cert.separator:
        allowed[v] = False
    assert not reachable_mask(G.adj, x, allowed)[y], "claimed separator does not cut"


# ---------------------------------------------------------------------------
# safety flow: can at most k-1 deletions cut v off from a target set?


def safe_flow(G, v, targets, k, direction="forward", restrict=None):
    """True iff no set F (|F| <= k-1, v not in F) destroys every directed
    path from v to targets\\F (forward) or from targets\\F to v (backward)
    inside G[restrict].  F may intersect the target set."""
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be forward or backward")
    n = G.n
    if restrict is None:
        ok = np.ones(n, dtype=bool)
    else:
        ok = np.zeros(n, dtype=bool)
        for u in restrict:
            ok[u] = True
    if not ok[v]:
        raise ValueError("v must belong to the restriction set")
    W = sorted({int(w) for w in targets} & set(np.flatnonzero(ok).tolist()))
    if v in W:
        return True
    if not W:
        return False
    adj = G.adj if direction == "forward" else G.adj.T
    ids = np.flatnonzero(ok)
    pos = {int(u): i for i, u in enumerate(ids)}
    m = len(ids)
    sub = adj[np.ix_(ids, ids)]
    us, vs = np.nonzero(sub)
    big = m + 1
    sink = 2 * m
    rows = [2 * i for i in range(m)]
    cols = [2 * i + 1 for i in range(m)]
    caps = [1] * m
    rows += (2 * us + 1).tolist()
    cols += (2 * vs).tolist()
    caps += [big] * len(us)
    for w in W:
        rows.append(2 * pos[w] + 1)
        cols.append(sink)
        caps.append(1)
    g = csr_matrix((caps, (rows, cols)), shape=(sink + 1, sink + 1), dtype=np.int32)
    value = int(maximum_flow(g, 2 * pos[v] + 1, sink).flow_value)
    return value >= k


# ---------------------------------------------------------------------------
# disjoint path systems


@dataclass
class LinkageRequest:
    """k terminal pairs plus the side conditions a linkage must satisfy.

    parity: per-pair edge-count parity (None, 0 even, 1 odd).
    max_length: per-pair cap on edge count.
    Repeated pairs are allowed with internally-disjoint semantics and ask
    for that many distinct paths between the same terminals.
    """

    pairs: list
    disjointness: str = "internal"  # internal | full
    forbidden: frozenset = field(default_factory=frozenset)
    parity: tuple | None = None
    max_length: tuple | None = None

    def validate(self, n):
        if not self.pairs:
            raise ValueError("request has no pairs")
        if self.disjointness not in ("internal", "full"):
            raise ValueError("disjointness must be internal or full")
        for x, y in self.pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError("terminal out of range")
            if x == y:
                raise ValueError("terminal pair with equal endpoints")
        ends = [u for p in self.pairs for u in p]
        if self.disjointness == "full":
            if len(set(ends)) != len(ends):
                raise ValueError("full disjointness needs 2k distinct terminals")
        if set(ends) & set(self.forbidden):
            raise ValueError("terminals may not be forbidden")
        for name in ("parity", "max_length"):
            val = getattr(self, name)
            if val is not None and len(val) != len(self.pairs):
                raise ValueError(f"{name} must list one entry per pair")

    def pair_parity(self, i):
        return None if self.parity is None else self.parity[i]

    def pair_cap(self, i):
        return None if self.max_length is None else self.max_length[i]


@dataclass
class LinkageResult:
    status: str  # found | infeasible | unknown
    paths: list | None = None

    def __bool__(self):
        return self.status == FOUND


def _uniform_bundle(req):
    return (len(set(req.pairs)) == 1 and req.disjointness == "internal"
            and req.parity is None and req.max_length is None)


def _bundle_by_flow(T, req):
    x, y = req.pairs[0]
    want = len(req.pairs)
    allowed = np.ones(T.n, dtype=bool)
    for u in req.forbidden:
        allowed[u] = False
    allowed[x] = allowed[y] = True
    adj = T.adj & allowed[:, None] & allowed[None, :]
    if adj[x, y]:
        # the direct edge is one internally disjoint path; cap it at one unit
        adj = adj.copy()
        adj[x, y] = False
        direct = 1
    else:
        direct = 0
    net = VertexFlow(adj)
    value, paths, _ = net.paths_and_cut(x, y)
    total = value + direct
    if total < want:
        return LinkageResult(INFEASIBLE)
    chosen = ([[x, y]] if direct else []) + sorted(paths, key=len)
    return LinkageResult(FOUND, chosen[:want])


def find_disjoint_paths(T, req, budget=500_000):
    """Exact linkage solver.

    Identical-pair requests without side conditions reduce to max-flow and
    are solved exactly that way.  Everything else runs a backtracking search
    over simple paths with reachability pruning; exhausting ``budget`` is
    reported as "unknown", exhausting the search space as "infeasible".
    """
    req.validate(T.n)
    if _uniform_bundle(req):
        return _bundle_by_flow(T, req)

    n = T.n
    adj = T.adj
    terminals = {u for p in req.pairs for u in p}
    base_allowed = np.ones(n, dtype=bool)
    for u in req.forbidden:
        base_allowed[u] = False
    for u in terminals:
        base_allowed[u] = False

    out_nbrs = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    counter = [budget]
    paths: list = []
    used = np.zeros(n, dtype=bool)  # vertices unusable as interiors

    def target_reachable(i, extra_blocked):
        x, y = req.pairs[i]
        ok = base_allowed & ~used
        for u in extra_blocked:
            ok[u] = False
        ok[x] = ok[y] = True
        return reachable_mask(adj, x, ok)[y]

    def feasible_rest(i):
        return all(target_reachable(j, ()) for j in range(i, len(req.pairs)))

    def dfs_pair(i):
        if i == len(req.pairs):
            return True
        x, y = req.pairs[i]
        parity = req.pair_parity(i)
        cap = req.pair_cap(i)

        def extend(v, visited, acc):
            counter[0] -= 1
            if counter[0] <= 0:
                raise BudgetExceeded
            if cap is not None and len(acc) - 1 > cap:
                return False
            for w in out_nbrs[v]:
                if w == y:
                    length = len(acc)
                    if cap is not None and length > cap:
                        continue
                    if parity is not None and length % 2 != parity:
                        continue
                    cand = acc + [y]
                    if req.disjointness == "internal" and length == 1:
                        # one bare edge per repeated terminal pair
                        if any(p == cand for p in paths):
                            continue
                    paths.append(cand)
                    if req.disjointness == "full":
                        marked = cand
                    else:
                        marked = cand[1:-1]
                    for u in marked:
                        used[u] = True
                    if feasible_rest(i + 1) and dfs_pair(i + 1):
                        return True
                    for u in marked:
                        used[u] = False
                    paths.pop()
            for w in out_nbrs[v]:
                if w == y or w in visited or used[w] or not base_allowed[w]:
                    continue
                if cap is not None and len(acc) + 1 - 1 >= cap:
                    continue
                ok = base_allowed & ~used
                for u in visited:
                    ok[u] = False
                ok[w] = ok[y] = True
                if not reachable_mask(adj, w, ok)[y]:
                    continue
                visited.add(w)
                if extend(w, visited, acc + [w]):
                    return True
                visited.discard(w)
            return False

        return extend(x, {x}, [x])

    if req.disjointness == "full":
        # terminals of other pairs are off limits entirely
        pass
    try:
        if not feasible_rest(0):
            return LinkageResult(INFEASIBLE)
        if dfs_pair(0):
            result = [list(p) for p in paths]
            _check_linkage(T, req, result)
            return LinkageResult(FOUND, result)
        return LinkageResult(INFEASIBLE)
    except BudgetExceeded:
        return LinkageResult(UNKNOWN)


def _check_linkage(T, req, paths):
    assert len(paths) == len(req.pairs)
    terminals = {u for p in req.pairs for u in p}
    seen_interiors = set()
    for i, p in enumerate(paths):
        x, y = req.pairs[i]
        assert is_path(T, p) and p[0] == x and p[-1] == y
        inner = set(p[1:-1])
        assert not inner & set(req.forbidden)
        assert not inner & terminals
        assert not inner & seen_interiors
        seen_interiors |= inner
        parity = req.pair_parity(i)
        if parity is not None:
            assert (len(p) - 1) % 2 == parity
        cap = req.pair_cap(i)
        if cap is not None:
            assert len(p) - 1 <= cap
    if req.disjointness == "full":
        allv = [v for p in paths for v in p]
        assert len(set(allv)) == len(allv)
    else:
        assert len(set(map(tuple, paths))) == len(paths), "paths must be distinct"


def is_k_linked(T, k, budget=500_000):
    """Exhaustive linkedness check for small tournaments.

    Returns True/False, or None when some endpoint tuple exhausted the
    search budget (never treated as success by callers).
    """
    if k < 1:
        raise ValueError("k must be positive")
    n = T.n
    if n < 2 * k:
        return False
    hit_unknown = False
    for combo in itertools.permutations(range(n), 2 * k):
        pairs = [(combo[2 * i], combo[2 * i + 1]) for i in range(k)]
        if any(pairs[i] >= pairs[i + 1] for i in range(k - 1)):
            continue  # unordered between pairs: keep one representative
        res = find_disjoint_paths(T, LinkageRequest(pairs, "full"), budget=budget)
        if res.status == INFEASIBLE:
            return False
        if res.status == UNKNOWN:
            hit_unknown = True
    return None if hit_unknown else True
