"""Greedy domination: logarithmic dominating sets, chains, core sets.

Every tournament on n vertices has an in-dominating set of at most
ceil(log2 n) vertices: keep picking the minimum out-degree vertex of the
shrinking common out-neighbourhood and the pool halves each round.  The
same halving idea yields, for any vertex v of decent in-degree, a short
transitive chain ending at v whose tail out-dominates all but a small
exception pool; stacking 2k greedy rounds gives a small core set that feeds
every outside vertex k neighbours in both directions.
"""

import math

from tourpart import (
    core_set,
    greedy_in_dominating_set,
    greedy_out_dominating_set,
    out_dominating_structure,
)
from tourpart.generators import random_tournament, transitive_tournament

T = random_tournament(200, seed=7)
S = greedy_in_dominating_set(T)
print(f"n=200: in-dominating set of size {len(S)} <= ceil(log2 200) = "
      f"{math.ceil(math.log2(200))}: {sorted(S)}")
print("out-dominating set:", sorted(greedy_out_dominating_set(T)))

# In a transitive tournament a single vertex suffices at either end.
tt = transitive_tournament(50)
print("transitive: in-dominating =", greedy_in_dominating_set(tt),
      " out-dominating =", greedy_out_dominating_set(tt))

# The chain structure around a prescribed vertex. Smaller caps allow larger
# exception pools: |exceptions| * 2^(c-2) stays below the anchor's in-degree.
v = 11
for c in (3, 5, 7):
    s = out_dominating_structure(T, v, c)
    print(f"cap c={c}: chain {s.order} with {len(s.exceptions)} exceptions "
          f"(pool sizes per round: {s.shrink_trace})")

# The chain is transitive with the anchor at the sink; everything outside
# chain + exceptions receives an edge from the chain's tail.
s = out_dominating_structure(T, v, 5)
outside = set(range(T.n)) - s.members - s.exceptions
covered = sum(1 for u in outside if any(T.has_edge(w, u) for w in s.cover))
print(f"tail of the chain dominates {covered}/{len(outside)} outside vertices")

# Core sets: 3k log2(n) vertices so that everyone outside sees k in- and k
# out-neighbours inside.
for k in (1, 2, 3):
    cs = core_set(T, k)
    print(f"k={k}: core set of {len(cs)} vertices "
          f"(cap {3 * k * math.log2(T.n):.1f})")
