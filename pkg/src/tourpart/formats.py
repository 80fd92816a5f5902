"""On-disk formats for tournaments and digraphs.

Edge-list format: a header line ``<n> <edge_count>`` followed by one
``<u> <v>`` line per directed edge u->v.  The tournament loader rejects
files that are not complete orientations.

Compact format: a single line ``<n> <pair_count> <bitstring>`` where the
bit for the pair (i, j), i < j, taken in lexicographic order, is 1 iff the
edge runs i->j.  Round-trips are bit-exact.

DOT output is provided for eyeballing only; there is no DOT reader.
"""

from __future__ import annotations

import numpy as np

from .core import Digraph, Tournament


class FormatError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def write_edge_list(G, fh):
    us, vs = np.nonzero(G.adj)
    fh.write(f"{G.n} {len(us)}\n")
    for u, v in zip(us.tolist(), vs.tolist()):
        fh.write(f"{u} {v}\n")


def _pair_bits(T):
    iu, jv = np.triu_indices(T.n, 1)
    return T.adj[iu, jv]


def write_compact(T, fh):
    bits = _pair_bits(T)
    s = "".join("1" if b else "0" for b in bits.tolist())
    fh.write(f"{T.n} {len(s)} {s}\n")


def tournament_from_bits(n, bitstring):
    expected = n * (n - 1) // 2
    if len(bitstring) != expected:
        raise FormatError(f"expected {expected} orientation bits, got {len(bitstring)}")
    adj = np.zeros((n, n), dtype=bool)
    iu, jv = np.triu_indices(n, 1)
    vals = np.frombuffer(bitstring.encode(), dtype=np.uint8) == ord("1")
    adj[iu, jv] = vals
    adj[jv, iu] = ~vals
    return Tournament(adj)


def _parse_edge_lines(lines, start_line, n, m):
    adj = np.zeros((n, n), dtype=bool)
    count = 0
    for offset, raw in enumerate(lines):
        lineno = start_line + offset
        text = raw.strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise FormatError(f"expected 'u v', got {text!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"non-integer vertex in {text!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"vertex out of range in {text!r}", lineno)
        if u == v:
            raise FormatError(f"self-loop {u}->{v}", lineno)
        if adj[u, v]:
            raise FormatError(f"duplicate edge {u}->{v}", lineno)
        adj[u, v] = True
        count += 1
    if count != m:
        raise FormatError(f"header announced {m} edges, found {count}")
    return adj


def _load_lines(fh):
    lines = fh.read().splitlines()
    for i, raw in enumerate(lines):
        if raw.strip():
            return lines[i:], i + 1
    raise FormatError("empty input")


def read_tournament(fh):
    """Load a tournament from either on-disk format (auto-detected)."""
    lines, first = _load_lines(fh)
    head = lines[0].split()
    if len(head) == 3:
        try:
            n, m = int(head[0]), int(head[1])
        except ValueError:
            raise FormatError(f"bad header {lines[0]!r}", first) from None
        if set(head[2]) - {"0", "1"}:
            raise FormatError("orientation bits must be 0/1", first)
        if m != len(head[2]):
            raise FormatError(f"header announced {m} bits, got {len(head[2])}", first)
        try:
            return tournament_from_bits(n, head[2])
        except FormatError as exc:
            raise FormatError(str(exc), first) from None
    if len(head) != 2:
        raise FormatError(f"bad header {lines[0]!r}", first)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError(f"bad header {lines[0]!r}", first) from None
    adj = _parse_edge_lines(lines[1:], first + 1, n, m)
    if m != n * (n - 1) // 2:
        raise FormatError(f"{m} edges cannot be a complete orientation of {n} vertices")
    try:
        return Tournament(adj)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_digraph(fh):
    """Load a general digraph in edge-list format (no completeness check)."""
    lines, first = _load_lines(fh)
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f"bad header {lines[0]!r}", first)
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError(f"bad header {lines[0]!r}", first) from None
    adj = _parse_edge_lines(lines[1:], first + 1, n, m)
    return Digraph(adj)


def to_dot(G, name="G"):
    lines = [f"digraph {name} {{"]
    for v in range(G.n):
        lines.append(f"  {v};")
    us, vs = np.nonzero(G.adj)
    for u, v in zip(us.tolist(), vs.tolist()):
        lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
