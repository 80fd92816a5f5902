"""Tournament instance generators for tests and experiments.

Random generation uses numpy's PCG64 stream, which is stable across
platforms, so compact-format fixtures written from a (n, seed) pair are
reproducible byte for byte.
"""

from __future__ import annotations

import numpy as np

from .core import Tournament


def random_tournament(n, seed):
    """Uniformly random orientation of each pair, deterministic per (n, seed)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    adj = np.zeros((n, n), dtype=bool)
    iu, jv = np.triu_indices(n, 1)
    bits = rng.integers(0, 2, size=iu.size, dtype=np.uint8).astype(bool)
    adj[iu, jv] = bits
    adj[jv, iu] = ~bits
    return Tournament(adj)


def transitive_tournament(n):
    """i -> j exactly when i < j; source 0, sink n-1."""
    if n < 1:
        raise ValueError("n must be at least 1")
    adj = np.zeros((n, n), dtype=bool)
    iu, jv = np.triu_indices(n, 1)
    adj[iu, jv] = True
    return Tournament(adj)


def _is_prime(q):
    if q < 2:
        return False
    d = 2
    while d * d <= q:
        if q % d == 0:
            return False
        d += 1
    return True


def paley_tournament(q):
    """Quadratic-residue tournament on Z_q: i -> j iff j - i is a nonzero
    square mod q.  Needs q prime with q = 3 (mod 4), which makes exactly one
    of +-d a residue for every d != 0."""
    if not _is_prime(q) or q % 4 != 3:
        raise ValueError("q must be a prime congruent to 3 mod 4")
    residues = {(x * x) % q for x in range(1, q)}
    adj = np.zeros((q, q), dtype=bool)
    for i in range(q):
        for j in range(q):
            if i != j and (j - i) % q in residues:
                adj[i, j] = True
    return Tournament(adj)
