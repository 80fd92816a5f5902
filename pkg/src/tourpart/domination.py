"""Greedy domination machinery.

Every tournament has an in-dominating set of at most ceil(log2 n) vertices:
repeatedly take a minimum out-degree vertex of the shrinking common
out-neighbourhood.  Building on the same halving idea, ``out_dominating_structure``
grows a short transitive chain ending at a prescribed vertex whose tail
out-dominates everything outside a small exception set.  All selections
break ties toward the lowest vertex id so runs are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import transitive_order


@dataclass(frozen=True)
class DominatingStructure:
    """A transitive chain A with one free end whose remainder dominates
    everything outside ``exceptions``.

    mode "out": chain runs source ``tip`` -> ... -> sink ``anchor`` and
    A \\ {tip} out-dominates V \\ (A | exceptions).  mode "in" is the mirror
    image: source ``anchor``, sink ``tip``, in-domination.
    """

    mode: str
    anchor: int
    order: tuple
    tip: int
    exceptions: frozenset
    cap: int
    shrink_trace: tuple

    @property
    def members(self):
        return frozenset(self.order)

    @property
    def cover(self):
        """The chain minus its free end: the part that actually dominates."""
        return frozenset(self.order) - {self.tip}


def greedy_in_dominating_set(T):
    """In-dominating set of size at most ceil(log2 n) (at least one vertex)."""
    n = T.n
    adj = T.adj
    alive = np.ones(n, dtype=bool)
    chosen = []
    while alive.any():
        sub = adj & alive[:, None] & alive[None, :]
        degs = sub.sum(axis=1)
        degs[~alive] = n + 1
        x = int(degs.argmin())
        chosen.append(x)
        alive &= adj[x]
    S = set(chosen)
    assert len(S) <= max(1, math.ceil(math.log2(n))) if n > 1 else True
    outside = [u for u in range(n) if u not in S]
    for u in outside:
        assert adj[u, sorted(S)].any(), f"vertex {u} does not reach the dominating set"
    return S


def greedy_out_dominating_set(T):
    """Out-dominating mirror of ``greedy_in_dominating_set``."""
    return greedy_in_dominating_set(T.reverse())


def out_dominating_structure(T, v, c):
    """Chain A with sink ``v`` such that A minus its source out-dominates
    all but an exception set E with |E| * 2^(c-2) <= d^-(v).

    Follows the halving construction: keep intersecting in-neighbourhoods
    of chain vertices, always descending to a low in-degree vertex of the
    current exception pool, with a one-vertex waiting slot for the case
    where the pool has a dominant source.
    """
    if c < 2:
        raise ValueError("chain cap c must be at least 2")
    n = T.n
    adj = T.adj
    d_in = T.in_degree(v)
    if d_in < 2 ** (c - 1):
        raise ValueError(f"in-degree {d_in} of vertex {v} is below 2^(c-1) = {2 ** (c - 1)}")

    chain = [v]
    waiting = None
    pool = adj[:, v].copy()  # common in-neighbourhood of the chain, minus waiting
    trace = [int(pool.sum())]

    while True:
        size = int(pool.sum())
        assert size * (1 << (len(chain) - 1)) <= d_in, "halving invariant broken"
        if size << (c - 2) <= d_in:
            if waiting is None:
                assert size > 0
                tip = int(np.flatnonzero(pool)[0])
                pool[tip] = False
            else:
                tip = waiting
            order = tuple([tip] + chain[::-1])
            struct = DominatingStructure(
                mode="out", anchor=v, order=order, tip=tip,
                exceptions=frozenset(np.flatnonzero(pool).tolist()),
                cap=c, shrink_trace=tuple(trace))
            check_structure(T, struct)
            return struct

        assert size >= 2
        ids = np.flatnonzero(pool)
        sub = adj[np.ix_(ids, ids)]
        indeg = sub.sum(axis=0)
        x = int(ids[indeg.argmin()])
        if indeg.min() > 0 or waiting is not None:
            nxt = x
        else:
            rest = [int(i) for i in ids if i != x]
            sub2 = adj[np.ix_(rest, rest)]
            nxt = int(rest[int(sub2.sum(axis=0).argmin())])
            waiting = x
            pool[x] = False
        chain.append(nxt)
        pool &= adj[:, nxt]
        pool[nxt] = False
        trace.append(int(pool.sum()))
        if len(chain) >= c:
            raise AssertionError("construction failed to exit within the chain cap")


def in_dominating_structure(T, v, c):
    """Mirror structure: chain with source ``v`` whose tail in-dominates."""
    s = out_dominating_structure(T.reverse(), v, c)
    struct = DominatingStructure(
        mode="in", anchor=v, order=tuple(reversed(s.order)), tip=s.tip,
        exceptions=s.exceptions, cap=c, shrink_trace=s.shrink_trace)
    check_structure(T, struct)
    return struct


def check_structure(T, s):
    """Full invariant scan; raises AssertionError on any violation."""
    A = s.members
    assert 2 <= len(A) <= s.cap
    assert s.anchor in A and s.tip in A
    assert not A & s.exceptions
    order = transitive_order(T, A)
    assert order is not None, "chain is not transitive"
    assert tuple(order) == s.order
    if s.mode == "out":
        assert s.order[0] == s.tip and s.order[-1] == s.anchor
        degree = T.in_degree(s.anchor)
    else:
        assert s.order[0] == s.anchor and s.order[-1] == s.tip
        degree = T.out_degree(s.anchor)
    assert len(s.exceptions) << (s.cap - 2) <= degree, "exception set too large"
    outside = np.ones(T.n, dtype=bool)
    for u in A | s.exceptions:
        outside[u] = False
    out_ids = np.flatnonzero(outside)
    cover = sorted(s.cover)
    if out_ids.size:
        if s.mode == "out":
            hit = T.adj[np.ix_(cover, out_ids)].any(axis=0)
        else:
            hit = T.adj[np.ix_(out_ids, cover)].any(axis=1)
        assert hit.all(), "domination fails outside the exception set"
    d0 = degree
    for i, size in enumerate(s.shrink_trace):
        assert size * (1 << i) <= d0, "recorded pool sizes violate halving"


@dataclass(frozen=True)
class CoreSet:
    """A small set Z giving every outside vertex k out- and k in-neighbours
    inside Z.  ``degenerate`` marks the small-n fallback Z = V."""

    vertices: frozenset
    k: int
    degenerate: bool

    def __len__(self):
        return len(self.vertices)


def core_set(T, k):
    """Union of k in-dominating and k out-dominating sets, peeled greedily."""
    n = T.n
    if n < 4:
        raise ValueError("core_set needs at least 4 vertices")
    if k < 1:
        raise ValueError("k must be positive")
    if n < 3 * k * math.log2(n):
        return CoreSet(frozenset(range(n)), k, True)

    def peel(source, kind):
        taken = []
        remaining = set(range(n))
        for _ in range(k):
            if not remaining:
                break
            sub, ids = source.subtournament(remaining)
            local = (greedy_in_dominating_set(sub) if kind == "in"
                     else greedy_out_dominating_set(sub))
            chosen = {ids[i] for i in local}
            taken.append(chosen)
            remaining -= chosen
        return taken

    in_sets = peel(T, "in")
    out_sets = peel(T, "out")
    Z = frozenset().union(*in_sets, *out_sets)
    result = CoreSet(Z, k, False)
    assert len(Z) <= 3 * k * math.log2(n) + 1e-9
    _check_core(T, result)
    return result


def _check_core(T, cs):
    Z = sorted(cs.vertices)
    outside = [v for v in range(T.n) if v not in cs.vertices]
    if not outside:
        return
    out_ok = T.adj[np.ix_(outside, Z)].sum(axis=1) >= cs.k
    in_ok = T.adj[np.ix_(Z, outside)].sum(axis=0) >= cs.k
    assert out_ok.all() and in_ok.all(), "core-set degree clause violated"
