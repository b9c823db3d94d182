"""Command line front end.

Subcommands: gen (write family graphs), width (brute-force width
measures), roots (saturated root sets), wl (refinement compare),
reduce (block and degree reductions), iso (isomorphism solvers), and
selftest.  Machine output is JSON lines with fixed key order; exit
codes are 0 Accept, 1 Reject, 2 Infeasible or error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import blocks as _blocks
from . import families as _families
from . import solvers as _solvers
from .connectivity import kcon_closure
from .decomposition import tdw_of_root
from .errors import BagwlError, Verdict
from .formats import (
    parse_bag_family,
    parse_graph,
    serialize_bag_family,
    serialize_graph,
)
from .graphs import Graph, restrict_partition, induced_subgraph
from .root_enum import ctdw_iso, enumerate_root_sets
from .wl import DEFAULT_TUPLE_CAP, bag_family, compare_graphs

# methods whose Accept leans on a width precondition the tool cannot
# check; bags additionally leans on the caller's family being a capture
_CONDITIONAL_ON_ACCEPT = {"wl", "ctdw", "cstw", "geodesic"}


def _read_graph(path: str) -> tuple[Graph, object, object]:
    return parse_graph(Path(path).read_text())


def _read_bags(path: str, n: int):
    return bag_family(parse_bag_family(Path(path).read_text(), n))


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _parse_vertices(raw: str) -> list[int]:
    try:
        vals = [int(tok) for tok in raw.replace(",", " ").split()]
    except ValueError:
        raise BagwlError(f"bad vertex list: {raw!r}")
    if any(v < 1 for v in vals):
        raise BagwlError("vertex lists on the command line are 1-indexed")
    return [v - 1 for v in vals]


def _require(args, *names) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise BagwlError(f"gen {args.family} needs {' '.join(missing)}")


def _cmd_gen(args) -> int:
    kind = args.family
    if kind == "kp-path":
        _require(args, "k", "p")
        g = _families.kp_path(args.k, args.p).graph
    elif kind == "kp-comb":
        _require(args, "k", "p")
        g = _families.kp_comb(args.k, args.p).graph
    elif kind == "cycle":
        _require(args, "n")
        g = _families.cycle(args.n)
    elif kind == "path":
        _require(args, "n")
        g = _families.path(args.n)
    elif kind == "complete":
        _require(args, "n")
        g = _families.complete(args.n)
    else:
        # no wall-clock entropy: random generation demands a seed
        _require(args, "n", "m", "seed")
        g = _families.random_graph(args.n, args.m, args.seed)
    _emit(serialize_graph(g), args.out)
    return 0


def _cmd_width(args) -> int:
    g, _, _ = _read_graph(args.graph)
    cap = args.cap_brute
    roots: list[frozenset[int]] = []
    if args.measure == "stw":
        value = _families.brute_stw(g, cap=cap or 10)
    elif args.measure == "cstw":
        value = _families.brute_cstw(g, cap=cap or 10)
    elif args.measure == "tdw":
        if args.root is None:
            raise BagwlError("width tdw needs --root")
        value = tdw_of_root(g, set(_parse_vertices(args.root)))
    elif args.measure == "ctdw":
        value, roots = _families.brute_ctdw(g, cap=cap or 48)
    else:
        value = _families.brute_rtdw(g, cap=cap or 4096)
    if value is None or value is math.inf:
        print("inf")
    else:
        print(int(value))
    if args.roots and roots:
        sys.stdout.write(serialize_bag_family(roots))
    return 0


def _cmd_roots(args) -> int:
    g, _, _ = _read_graph(args.graph)
    family = enumerate_root_sets(g, args.k)
    sys.stdout.write(serialize_bag_family(list(family)))
    return 0


def _verdict_line(method: str, params: dict, verdict: Verdict, vouch: bool,
                  elapsed: float | None, pretty: bool) -> str:
    if vouch or method in ("brute", "degree-reduce"):
        conditional = False
    elif method == "bags":
        conditional = True
    else:
        conditional = method in _CONDITIONAL_ON_ACCEPT and verdict is Verdict.ACCEPT
    timing = None if elapsed is None else round(elapsed, 3)
    if pretty:
        lines = [f"method      {method}"]
        for key, val in params.items():
            lines.append(f"{key:<12}{val}")
        lines.append(f"verdict     {verdict.value}" + (" (conditional)" if conditional else ""))
        if timing is not None:
            lines.append(f"seconds     {timing}")
        return "\n".join(lines) + "\n"
    obj = {
        "method": method,
        "parameters": params,
        "verdict": verdict.value,
        "conditional": conditional,
        "timing": timing,
    }
    return json.dumps(obj) + "\n"


def _cmd_wl(args) -> int:
    g1, r1, tc1 = _read_graph(args.graph1)
    g2, r2, tc2 = _read_graph(args.graph2)
    cap = args.cap_tuples or DEFAULT_TUPLE_CAP
    t0 = time.perf_counter()
    if args.bags1 or args.bags2:
        if not (args.bags1 and args.bags2):
            raise BagwlError("wl needs --bags1 and --bags2 together")
        f1 = _read_bags(args.bags1, g1.n)
        f2 = _read_bags(args.bags2, g2.n)
        verdict = _solvers.iso_with_supplied_bags(g1, f1, g2, f2, cap=cap)
        method = "bags"
        params = {"dims": None, "cap_tuples": cap}
    else:
        f1 = bag_family([{v} for v in range(g1.n)])
        f2 = bag_family([{v} for v in range(g2.n)])
        verdict = compare_graphs(
            g1, f1, g2, f2, extra_dims=args.dims, cap=cap,
            partition1=r1, coloring1=tc1, partition2=r2, coloring2=tc2,
        )
        method = "wl"
        params = {"dims": args.dims, "cap_tuples": cap}
    elapsed = time.perf_counter() - t0 if args.timing else None
    sys.stdout.write(_verdict_line(method, params, verdict, args.vouch, elapsed, args.pretty))
    return verdict.exit_code


def _cmd_reduce_blocks(args) -> int:
    g, _, _ = _read_graph(args.graph)
    r = kcon_closure(g, 2 * args.k)
    forest = _blocks.blocks_relative(g, r)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    for i, block in enumerate(forest.blocks):
        order = sorted(block)
        h, _ = induced_subgraph(g, order)
        part = restrict_partition(r, order)
        name = outdir / f"block_{i:03d}.gi"
        name.write_text(serialize_graph(h, part))
        row = {
            "block": i,
            "file": str(name),
            "vertices": [v + 1 for v in order],
        }
        print(json.dumps(row))
    return 0


def _cmd_reduce_degree(args) -> int:
    g1, _, _ = _read_graph(args.graph1)
    g2, _, _ = _read_graph(args.graph2)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    cap = args.cap_brute or 400
    calls = 0

    def degree_oracle(a: Graph, b: Graph) -> bool:
        nonlocal calls
        (outdir / f"instance_{calls:03d}_a.gi").write_text(serialize_graph(a))
        (outdir / f"instance_{calls:03d}_b.gi").write_text(serialize_graph(b))
        calls += 1
        return _solvers.brute_force_iso(a, b, cap=cap)[0] is Verdict.ACCEPT

    trace = _blocks.ReductionTrace()
    t0 = time.perf_counter()
    verdict = _blocks.stw_to_degree_iso(g1, g2, args.k, degree_oracle, trace)
    elapsed = time.perf_counter() - t0 if args.timing else None
    for row in trace.rows():
        print(json.dumps(row))
    params = {"k": args.k, "cap_brute": cap}
    sys.stdout.write(
        _verdict_line("degree-reduce", params, verdict, args.vouch, elapsed, args.pretty)
    )
    return verdict.exit_code


def _cmd_iso(args) -> int:
    g1, r1, tc1 = _read_graph(args.graph1)
    g2, r2, tc2 = _read_graph(args.graph2)
    method = args.method
    cap = args.cap_tuples or DEFAULT_TUPLE_CAP
    params: dict = {}
    t0 = time.perf_counter()
    if method == "brute":
        verdict, _ = _solvers.brute_force_iso(g1, g2, cap=args.cap_brute or 10)
        params = {"cap_brute": args.cap_brute or 10}
    elif method == "wl":
        f1 = bag_family([{v} for v in range(g1.n)])
        f2 = bag_family([{v} for v in range(g2.n)])
        verdict = compare_graphs(
            g1, f1, g2, f2, extra_dims=args.dims, cap=cap,
            partition1=r1, coloring1=tc1, partition2=r2, coloring2=tc2,
        )
        params = {"dims": args.dims, "cap_tuples": cap}
    elif method == "ctdw":
        verdict = ctdw_iso(g1, g2, _need_k(args), cap=cap)
        params = {"k": args.k, "cap_tuples": cap}
    elif method == "cstw":
        verdict = _solvers.cstw_iso(g1, g2, _need_k(args), cap=cap)
        params = {"k": args.k, "cap_tuples": cap}
    elif method == "geodesic":
        c = args.c
        if c is None:
            c = max(_solvers.chordality(g1), _solvers.chordality(g2), 1)
        verdict = _solvers.geodesic_stw_iso(g1, g2, _need_k(args), c, cap=cap)
        params = {"k": args.k, "c": c, "cap_tuples": cap}
    elif method == "bags":
        if not (args.bags1 and args.bags2):
            raise BagwlError("iso --method bags needs --bags1 and --bags2")
        f1 = _read_bags(args.bags1, g1.n)
        f2 = _read_bags(args.bags2, g2.n)
        verdict = _solvers.iso_with_supplied_bags(g1, f1, g2, f2, cap=cap)
        params = {"cap_tuples": cap}
    else:
        cap_brute = args.cap_brute or 400

        def degree_oracle(a: Graph, b: Graph) -> bool:
            return _solvers.brute_force_iso(a, b, cap=cap_brute)[0] is Verdict.ACCEPT

        verdict = _blocks.stw_to_degree_iso(g1, g2, _need_k(args), degree_oracle)
        params = {"k": args.k, "cap_brute": cap_brute}
    elapsed = time.perf_counter() - t0 if args.timing else None
    sys.stdout.write(_verdict_line(method, params, verdict, args.vouch, elapsed, args.pretty))
    return verdict.exit_code


def _need_k(args) -> int:
    if args.k is None:
        raise BagwlError(f"--k is required for method {args.method}")
    return args.k


def _selftest_corpus():
    from .graphs import build_graph

    tadpole = build_graph(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6)])
    tree = build_graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)])
    return [
        _families.path(5),
        _families.cycle(4),
        _families.cycle(5),
        tree,
        tadpole,
        _families.kp_path(2, 4).graph,
    ]


def _forest_partitions(g: Graph, k: int):
    # all strong tree decompositions, as bag partitions whose
    # cross-edge structure is a forest
    def parts(rest):
        if not rest:
            yield []
            return
        head = rest[0]
        pool = rest[1:]
        from itertools import combinations

        for size in range(0, k):
            for extra in combinations(pool, size):
                bag = frozenset((head,) + extra)
                remain = [v for v in pool if v not in extra]
                for tail in parts(remain):
                    yield [bag] + tail

    for bags in parts(list(range(g.n))):
        index = {}
        for i, bag in enumerate(bags):
            for v in bag:
                index[v] = i
        cross = set()
        for u, v in g.edges:
            if index[u] != index[v]:
                cross.add((min(index[u], index[v]), max(index[u], index[v])))
        parent = list(range(len(bags)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        acyclic = True
        for a, b in sorted(cross):
            ra, rb = find(a), find(b)
            if ra == rb:
                acyclic = False
                break
            parent[ra] = rb
        if acyclic:
            yield bags


def _run_selftest(fast: bool) -> list[tuple[str, bool]]:
    import random

    from .connectivity import kcon_pairs
    from .decomposition import validate_connected_strong_td
    from .graphs import build_graph, relabel
    from .wl import (
        ColorTable,
        initial_coloring,
        naive_stable_refinement,
        stable_refinement,
        tuple_universe,
    )

    results = []

    def check(name, fn):
        try:
            results.append((name, bool(fn())))
        except Exception:
            results.append((name, False))

    def c1():
        width, roots = _families.brute_ctdw(_families.kp_path(3, 4).graph)
        return width == 4 and len(roots) == 183

    def c2():
        return (
            _families.brute_ctdw(_families.cycle(6))[0] == 2
            and _families.brute_cstw(_families.cycle(6)) == 3
        )

    def c3():
        comb = _families.kp_comb(3, 3)
        dec = _families.comb_decomposition(comb)
        ok = validate_connected_strong_td(comb.graph, dec)
        ok = ok and max(len(b) for b in dec.bags) == 3
        width, _ = _families.brute_ctdw(comb.graph, max_width=2)
        return ok and width is None

    def c4():
        g = _families.kp_path(3, 3).graph
        width, _ = _families.brute_ctdw(g)
        return width is not None and width <= 5 and _families.brute_rtdw(g) >= 3

    def c5():
        for g in _selftest_corpus():
            if g.n > 6:
                continue
            for k in (1, 2):
                pairs = kcon_pairs(g, 2 * k)
                if not pairs:
                    continue
                for bags in _forest_partitions(g, k):
                    index = {}
                    for i, bag in enumerate(bags):
                        for v in bag:
                            index[v] = i
                    for u, v in pairs:
                        if index[u] != index[v]:
                            return False
        return True

    def groups(values):
        seen: dict = {}
        return [seen.setdefault(x, len(seen)) for x in values.tolist()]

    def c6():
        rng = random.Random(4)
        for _ in range(30 if fast else 100):
            n = rng.randint(3, 6)
            m = rng.randint(n - 1, min(n + 2, n * (n - 1) // 2))
            g = _families.random_graph(n, m, seed=rng.randint(0, 9999))
            fam = bag_family([{v} for v in range(n)])
            uni = tuple_universe(g, fam, 3)
            quick = stable_refinement(g, uni, initial_coloring(g, uni, ColorTable()))
            slow = naive_stable_refinement(g, uni, ColorTable())
            if groups(quick.values) != groups(slow.values):
                return False
        return True

    def c7():
        rng = random.Random(8)
        corpus = _selftest_corpus()
        for g in corpus:
            perm = list(range(g.n))
            rng.shuffle(perm)
            h = relabel(g, perm)
            want = _solvers.brute_force_iso(g, h)[0]
            if want is not Verdict.ACCEPT:
                return False
            if _solvers.cstw_iso(g, h, 2) is not want:
                return False
            if _blocks.stw_to_degree_iso(
                g, h, 2, lambda a, b: _solvers.brute_force_iso(a, b, cap=400)[0] is Verdict.ACCEPT
            ) is not want:
                return False
        return True

    def c8():
        trace = _blocks.ReductionTrace()
        g = _families.kp_path(3, 3).graph
        _blocks.stw_to_degree_iso(
            g, g, 3,
            lambda a, b: _solvers.brute_force_iso(a, b, cap=400)[0] is Verdict.ACCEPT,
            trace,
        )
        bound = 2 * 9 * 2 + 2
        return trace.calls and all(c.max_degree <= bound for c in trace.calls)

    def c9():
        rng = random.Random(15)
        g = _selftest_corpus()[4]
        for _ in range(10):
            perm = list(range(g.n))
            rng.shuffle(perm)
            h = relabel(g, perm)
            base = {
                frozenset(perm[v] for v in s)
                for s in _solvers.capture_bags_connected_quotient(g, 2)
            }
            if set(_solvers.capture_bags_connected_quotient(h, 2)) != base:
                return False
        return True

    def c10():
        rng = random.Random(20)
        from itertools import combinations

        corpus = [_families.cycle(3), _families.path(3)]
        if not fast:
            corpus += [_families.cycle(4), _families.path(4)]
        for g in corpus:
            subs = [
                frozenset(c)
                for size in (1, 2, 3)
                for c in combinations(range(g.n), size)
            ]
            perm = list(range(g.n))
            rng.shuffle(perm)
            h = relabel(g, perm)
            if _solvers.iso_with_supplied_bags(g, subs, h, subs) is not Verdict.ACCEPT:
                return False
        return (
            _solvers.iso_with_supplied_bags(
                _families.cycle(6),
                [frozenset(c) for c in combinations(range(6), 2)],
                build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]),
                [frozenset(c) for c in combinations(range(6), 2)],
            )
            is Verdict.REJECT
        )

    check("root enumeration width and count", c1)
    check("cycle width separation", c2)
    check("comb width separation", c3)
    check("thick path widths", c4)
    check("linked pairs share bags", c5)
    check("refinement engines agree", c6)
    check("solvers match brute force", c7)
    check("degree bound before gadgets", c8)
    check("families invariant under relabeling", c9)
    check("supplied bags match brute force", c10)
    return results


def _cmd_selftest(args) -> int:
    results = _run_selftest(fast=not args.full)
    width = max(len(name) for name, _ in results)
    ok = True
    for name, passed in results:
        ok = ok and passed
        print(f"{name:<{width}}  {'PASS' if passed else 'FAIL'}")
    print(f"{'overall':<{width}}  {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 2


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="bagwl")
    top.add_argument("--jobs", type=int, default=1, help="parallelism cap (reserved)")
    sub = top.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a family graph as .gi")
    gen.add_argument("family", choices=["kp-path", "kp-comb", "cycle", "path", "complete", "random"])
    gen.add_argument("--k", type=int)
    gen.add_argument("--p", type=int)
    gen.add_argument("--n", type=int)
    gen.add_argument("--m", type=int)
    gen.add_argument("--seed", type=int)
    gen.add_argument("-o", "--out")
    gen.set_defaults(run=_cmd_gen)

    width = sub.add_parser("width", help="brute-force width measures")
    width.add_argument("measure", choices=["stw", "cstw", "tdw", "ctdw", "rtdw"])
    width.add_argument("graph")
    width.add_argument("--root", help="1-indexed root vertices for tdw")
    width.add_argument("--roots", action="store_true", help="also print optimal root sets")
    width.add_argument("--cap-brute", type=int)
    width.set_defaults(run=_cmd_width)

    roots = sub.add_parser("roots", help="saturated root sets")
    roots.add_argument("graph")
    roots.add_argument("--k", type=int, required=True)
    roots.set_defaults(run=_cmd_roots)

    wl = sub.add_parser("wl", help="refinement compare of two graphs")
    wl.add_argument("graph1")
    wl.add_argument("graph2")
    wl.add_argument("--bags1")
    wl.add_argument("--bags2")
    wl.add_argument("--dims", type=int, default=3)
    wl.add_argument("--cap-tuples", type=int)
    wl.add_argument("--vouch", action="store_true")
    wl.add_argument("--timing", action="store_true")
    wl.add_argument("--pretty", action="store_true")
    wl.set_defaults(run=_cmd_wl)

    reduce_ = sub.add_parser("reduce", help="block and degree reductions")
    rsub = reduce_.add_subparsers(dest="reduction", required=True)
    rb = rsub.add_parser("blocks", help="emit blocks relative to the closure")
    rb.add_argument("graph")
    rb.add_argument("--k", type=int, required=True)
    rb.add_argument("-o", "--out", required=True)
    rb.set_defaults(run=_cmd_reduce_blocks)
    rd = rsub.add_parser("degree", help="run the degree reduction pipeline")
    rd.add_argument("graph1")
    rd.add_argument("graph2")
    rd.add_argument("--k", type=int, required=True)
    rd.add_argument("-o", "--out", required=True)
    rd.add_argument("--cap-brute", type=int)
    rd.add_argument("--vouch", action="store_true")
    rd.add_argument("--timing", action="store_true")
    rd.add_argument("--pretty", action="store_true")
    rd.set_defaults(run=_cmd_reduce_degree)

    iso = sub.add_parser("iso", help="isomorphism solvers")
    iso.add_argument("graph1")
    iso.add_argument("graph2")
    iso.add_argument(
        "--method",
        required=True,
        choices=["brute", "wl", "ctdw", "cstw", "geodesic", "bags", "degree-reduce"],
    )
    iso.add_argument("--k", type=int)
    iso.add_argument("--c", type=int)
    iso.add_argument("--dims", type=int, default=3)
    iso.add_argument("--bags1")
    iso.add_argument("--bags2")
    iso.add_argument("--cap-tuples", type=int)
    iso.add_argument("--cap-brute", type=int)
    iso.add_argument("--vouch", action="store_true")
    iso.add_argument("--timing", action="store_true")
    iso.add_argument("--pretty", action="store_true")
    iso.set_defaults(run=_cmd_iso)

    selftest = sub.add_parser("selftest", help="scaled-down acceptance checks")
    selftest.add_argument("--full", action="store_true")
    selftest.set_defaults(run=_cmd_selftest)
    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize others
        return 2 if exc.code else 0
    if args.jobs is not None and args.jobs < 1:
        print("--jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except BagwlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
