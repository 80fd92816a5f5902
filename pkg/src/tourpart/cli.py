"""Command-line surface.

Exit codes are a scripting contract:
  0  verified success
  1  infeasible / none found
  2  search budget exhausted (verdict unknown)
  3  input error (bad arguments, unparsable files)

Every randomized command takes an explicit --seed; there is no ambient
entropy anywhere, so runs and experiment tables reproduce exactly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .connectivity import is_k_linked, is_strongly_k_connected, vertex_connectivity
from .formats import FormatError, read_digraph, read_tournament, to_dot, write_compact, write_edge_list
from .generators import paley_tournament, random_tournament, transitive_tournament
from .hamilton import FOUND, NONE, UNKNOWN
from .partition import format_partition, partition
from .pipeline import PipelineError, PipelineParams
from .surgery import NoPath, SubdivisionSpec, nonseparating_subdivision, remove_nonseparating_path, spanning_linkage
from .connectivity import LinkageRequest, find_disjoint_paths

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_UNKNOWN = 2
EXIT_INPUT = 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _load_tournament(path):
    try:
        with open(path) as fh:
            return read_tournament(fh)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------


def cmd_gen(args):
    if args.kind == "random":
        if args.n is None or args.seed is None:
            raise InputError("random generation needs --n and --seed")
        T = random_tournament(args.n, args.seed)
        name = f"random-n{args.n}-s{args.seed}"
    elif args.kind == "paley":
        if args.q is None:
            raise InputError("paley generation needs --q")
        try:
            T = paley_tournament(args.q)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        name = f"paley-{args.q}"
    else:
        if args.n is None:
            raise InputError("transitive generation needs --n")
        T = transitive_tournament(args.n)
        name = f"transitive-{args.n}"
    buf = io.StringIO()
    if args.format == "compact":
        write_compact(T, buf)
    elif args.format == "dot":
        buf.write(to_dot(T, name.replace("-", "_")))
    else:
        write_edge_list(T, buf)
    _write_text(args.out, buf.getvalue())
    return EXIT_OK


def cmd_analyze(args):
    T = _load_tournament(args.path)
    din, dout = T.in_degrees(), T.out_degrees()
    kappa = vertex_connectivity(T)
    print(f"n: {T.n}")
    print(f"out-degree: min {int(dout.min())} max {int(dout.max())}")
    print(f"in-degree: min {int(din.min())} max {int(din.max())}")
    print(f"vertex connectivity: {kappa}")
    for k in range(1, kappa + 1):
        print(f"strongly {k}-connected: {is_strongly_k_connected(T, k)}")
    if args.linked is not None:
        if T.n > 10:
            raise InputError("exhaustive linkedness checking is limited to n <= 10")
        verdict = is_k_linked(T, args.linked)
        label = {True: "true", False: "false", None: "unknown (budget)"}[verdict]
        print(f"{args.linked}-linked: {label}")
        if verdict is None:
            return EXIT_UNKNOWN
    return EXIT_OK


def cmd_carve(args):
    T = _load_tournament(args.path)
    avoid = _parse_ids(args.avoid)
    keep = {"both": (args.x, args.y), "none": (), "start": (args.x,), "end": (args.y,)}[args.keep]
    try:
        res = remove_nonseparating_path(T, args.x, args.y, avoid, args.k, keep)
    except NoPath as exc:
        print(f"no path: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print("path: " + " ".join(map(str, res.path)))
    print(f"status: {'theorem-backed' if res.theorem_backed else 'best-effort'} "
          f"(hypothesis: strongly {res.level}-connected)")
    print(f"remainder strongly {args.k}-connected: {str(res.remainder_ok).lower()}")
    if args.out:
        buf = io.StringIO()
        write_edge_list(res.remainder, buf)
        _write_text(args.out, buf.getvalue())
        print(f"remainder written to {args.out} "
              f"(ids remapped; original ids: {' '.join(map(str, res.index_map))})")
    return EXIT_OK if res.remainder_ok else EXIT_INFEASIBLE


def cmd_link(args):
    T = _load_tournament(args.path)
    pairs = _parse_pairs(args.pairs)
    if args.spanning:
        if args.seed is None:
            raise InputError("--spanning uses randomized search and needs --seed")
        res = spanning_linkage(T, pairs, seed=args.seed)
        if res.status == "infeasible":
            print(f"proven infeasible: {res.detail}", file=sys.stderr)
            return EXIT_INFEASIBLE
        if res.status == "unknown":
            print(f"unknown: {res.detail}", file=sys.stderr)
            return EXIT_UNKNOWN
        covered = set()
        for (x, y), p in zip(pairs, res.paths):
            print(f"{x}->{y}: " + " ".join(map(str, p)))
            covered.update(p)
        print(f"coverage: {len(covered)}/{T.n} vertices")
        print(f"status: {'theorem-backed' if res.theorem_backed else 'best-effort'}")
        return EXIT_OK
    req = LinkageRequest(pairs)
    res = find_disjoint_paths(T, req)
    if res.status == "infeasible":
        print("proven infeasible", file=sys.stderr)
        return EXIT_INFEASIBLE
    if res.status == "unknown":
        print("unknown: search budget exhausted", file=sys.stderr)
        return EXIT_UNKNOWN
    for (x, y), p in zip(pairs, res.paths):
        print(f"{x}->{y}: " + " ".join(map(str, p)))
    return EXIT_OK


def cmd_subdivide(args):
    T = _load_tournament(args.path)
    try:
        with open(args.pattern) as fh:
            H = read_digraph(fh)
    except OSError as exc:
        raise InputError(f"{args.pattern}: {exc.strerror}") from None
    except FormatError as exc:
        raise InputError(f"{args.pattern}: {exc}") from None
    mapping = _parse_pairs(args.map, sep=":")
    branches = [-1] * H.n
    for h, v in mapping:
        if not 0 <= h < H.n:
            raise InputError(f"pattern vertex {h} out of range")
        if branches[h] != -1:
            raise InputError(f"pattern vertex {h} mapped twice")
        branches[h] = v
    if -1 in branches:
        raise InputError("every pattern vertex needs a branch image")
    spec = SubdivisionSpec(H, branches)
    try:
        spec.validate(T.n)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        sub = nonseparating_subdivision(T, spec, args.k)
    except NoPath as exc:
        print(f"no path: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    for (hu, hv), p in sorted(sub.edge_paths.items()):
        print(f"{hu}->{hv}: " + " ".join(map(str, p)))
    print(f"status: {'theorem-backed' if sub.theorem_backed else 'best-effort'} "
          f"(hypothesis: strongly {sub.level}-connected)")
    print(f"remainder strongly {args.k}-connected: {str(sub.remainder_ok).lower()}")
    return EXIT_OK if sub.remainder_ok else EXIT_INFEASIBLE


def _params_from_file(path, k):
    fields = {f.name: f for f in dataclasses.fields(PipelineParams)}
    values = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                text = raw.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise InputError(f"{path}:{lineno}: expected key=value")
                key, _, val = text.partition("=")
                key, val = key.strip(), val.strip()
                if key not in fields:
                    raise InputError(f"{path}:{lineno}: unknown parameter {key!r}")
                if key == "strict":
                    values[key] = val.lower() in ("1", "true", "yes")
                elif key == "budget" and val.lower() == "none":
                    values[key] = None
                else:
                    try:
                        values[key] = int(val)
                    except ValueError:
                        raise InputError(f"{path}:{lineno}: bad value for {key}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if "k" in values and values["k"] != k:
        raise InputError(f"params file pins k={values['k']} but --k is {k}")
    base = PipelineParams.relaxed(k)
    values.pop("k", None)
    return dataclasses.replace(base, **values)


def cmd_partition(args):
    T = _load_tournament(args.path)
    params = None
    if args.params_file:
        params = _params_from_file(args.params_file, args.k)
    try:
        res = partition(T, args.k, mode=args.mode, params=params, seed=args.seed,
                        search_budget=args.budget)
    except PipelineError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN if exc.kind == "budget" else EXIT_INFEASIBLE
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if res is None:
        print("none found within budget", file=sys.stderr)
        return EXIT_INFEASIBLE
    text = format_partition(res)
    _write_text(args.out, text)
    if args.out != "-":
        sys.stdout.write(text)
    return EXIT_OK if res.verified else EXIT_INFEASIBLE


# ---------------------------------------------------------------------------
# experiment harness

CSV_COLUMNS = ["instance", "n", "k", "mode", "success", "kappa_v1", "kappa_v2",
               "kappa_cross", "wall_time_s", "seed", "params_fingerprint"]


def _parse_ids(text):
    if not text:
        return []
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise InputError(f"bad id list {text!r}") from None


def _parse_pairs(text, sep=":"):
    pairs = []
    if not text:
        return pairs
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        bits = part.split(sep)
        if len(bits) != 2:
            raise InputError(f"bad pair {part!r} (expected x{sep}y)")
        try:
            pairs.append((int(bits[0]), int(bits[1])))
        except ValueError:
            raise InputError(f"bad pair {part!r}") from None
    if not pairs:
        raise InputError("no pairs given")
    return pairs


def _parse_int_list(val):
    return [int(t) for t in val.replace(",", " ").split()]


def _parse_seeds(val):
    if ":" in val:
        lo, _, hi = val.partition(":")
        return list(range(int(lo), int(hi)))
    return list(range(int(val)))


def _read_experiment_config(path):
    cfg = {"kind": ["random"], "n": [], "k": [], "mode": "search",
           "seeds": [], "budget": 400}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                text = raw.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise InputError(f"{path}:{lineno}: expected key=value")
                key, _, val = text.partition("=")
                key, val = key.strip(), val.strip()
                if key == "kind":
                    kinds = [t.strip() for t in val.split(",") if t.strip()]
                    for t in kinds:
                        if t not in ("random", "transitive", "paley"):
                            raise InputError(f"{path}:{lineno}: unknown kind {t!r}")
                    cfg["kind"] = kinds
                elif key in ("n", "k"):
                    cfg[key] = _parse_int_list(val)
                elif key == "seeds":
                    cfg["seeds"] = _parse_seeds(val)
                elif key == "mode":
                    if val not in ("auto", "pipeline", "search"):
                        raise InputError(f"{path}:{lineno}: unknown mode {val!r}")
                    cfg["mode"] = val
                elif key == "budget":
                    cfg["budget"] = int(val)
                else:
                    raise InputError(f"{path}:{lineno}: unknown key {key!r}")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return cfg


def _one_trial(kind, n, k, mode, seed, budget):
    if kind == "random":
        T = random_tournament(n, seed)
    elif kind == "transitive":
        T = transitive_tournament(n)
    else:
        T = paley_tournament(n)
    label = f"{kind}-n{n}-s{seed}"
    t0 = time.perf_counter()
    try:
        res = partition(T, k, mode=mode, seed=seed, search_budget=budget)
    except PipelineError:
        res = None
    wall = time.perf_counter() - t0
    if res is not None and res.verified:
        kappas = tuple(str(c) for c in res.connectivity)
        fp = res.params_fingerprint
        success = 1
    else:
        kappas = ("", "", "")
        fp = f"search-{budget}" if mode == "search" else "-"
        success = 0
    return [label, n, k, mode, success, *kappas, f"{wall:.3f}", seed, fp]


def cmd_experiment(args):
    cfg = _read_experiment_config(args.config)
    trials = [(kind, n, k, cfg["mode"], seed, cfg["budget"])
              for kind in cfg["kind"] for n in cfg["n"] for k in cfg["k"]
              for seed in cfg["seeds"]]
    if args.jobs > 1 and trials:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(lambda t: _one_trial(*t), trials))
    else:
        rows = [_one_trial(*t) for t in trials]
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    _write_text(args.out, buf.getvalue())
    if rows:
        good = sum(r[4] for r in rows)
        print(f"success rate: {good}/{len(rows)} ({100.0 * good / len(rows):.1f}%)")
    else:
        print("success rate: 0/0")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="tourpart", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"tourpart {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a tournament file")
    g.add_argument("--kind", choices=("random", "paley", "transitive"), required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--q", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--format", choices=("edges", "compact", "dot"), default="edges")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="degree and connectivity report")
    a.add_argument("path")
    a.add_argument("--linked", type=int, default=None,
                   help="exhaustive k-linkedness check (small n only)")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("carve", help="delete a non-separating path")
    c.add_argument("path")
    c.add_argument("x", type=int)
    c.add_argument("y", type=int)
    c.add_argument("--avoid", default="", help="comma-separated vertex ids to avoid")
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--keep", choices=("both", "none", "start", "end"), default="both")
    c.add_argument("--out", default=None, help="write the remainder tournament here")
    c.set_defaults(func=cmd_carve)

    l = sub.add_parser("link", help="disjoint path linkages")
    l.add_argument("path")
    l.add_argument("--pairs", required=True, help="x:y,x:y,...")
    l.add_argument("--spanning", action="store_true",
                   help="require the paths to cover every vertex")
    l.add_argument("--seed", type=int, default=None)
    l.set_defaults(func=cmd_link)

    s = sub.add_parser("subdivide", help="non-separating prescribed subdivision")
    s.add_argument("path")
    s.add_argument("--pattern", required=True, help="digraph edge-list file")
    s.add_argument("--map", required=True, help="h:v,... branch placement")
    s.add_argument("--k", type=int, default=1)
    s.set_defaults(func=cmd_subdivide)

    q = sub.add_parser("partition", help="strongly k-connected two-partition")
    q.add_argument("path")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--mode", choices=("auto", "pipeline", "search"), default="auto")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--params-file", default=None)
    q.add_argument("--budget", type=int, default=400)
    q.add_argument("--out", default="-")
    q.set_defaults(func=cmd_partition)

    e = sub.add_parser("experiment", help="seeded sweep, one CSV row per trial")
    e.add_argument("config")
    e.add_argument("--out", default="-")
    e.add_argument("--jobs", type=int, default=1)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
