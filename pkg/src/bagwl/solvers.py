"""Isomorphism solvers and capture-family generators.

The brute-force solvers are the reference oracles everything else is
tested against.  The width-parameterized solvers share one shape:
compute the disjoint-paths closure, peel blocks, and answer each block
query by refinement over a capture family generated from the block.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations
from typing import Iterable

from .blocks import OracleInstance, fold_marked, iso_via_blocks
from .connectivity import kcon_closure
from .errors import FamilyTooLarge, TooLarge, Verdict
from .families import connected_subsets
from .graphs import (
    EquivalencePartition,
    Graph,
    TupleColoring,
    bfs_distances,
    quotient_graph,
)
from .wl import DEFAULT_TUPLE_CAP, BagFamily, bag_family, compare_with_strong_capture

__all__ = [
    "brute_block_oracle",
    "brute_force_iso",
    "brute_force_iso_colored",
    "capture_bags_connected_quotient",
    "capture_bags_geodesic",
    "chordality",
    "cstw_iso",
    "geodesic_cycle_length",
    "geodesic_stw_iso",
    "iso_with_supplied_bags",
]

DEFAULT_FAMILY_CAP = 50_000
# backtracking node budget before giving up with TooLarge
SEARCH_CAP = 2_000_000


def _search_order(g: Graph) -> list[int]:
    # breadth-first from high-degree vertices, so every later vertex
    # has a mapped neighbor anchoring its candidate set
    order: list[int] = []
    seen = [False] * g.n
    for s in sorted(range(g.n), key=lambda v: (-g.degree(v), v)):
        if seen[s]:
            continue
        seen[s] = True
        queue = deque([s])
        while queue:
            u = queue.popleft()
            order.append(u)
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return order


def _backtrack(
    g1: Graph,
    g2: Graph,
    consistent,
    accept,
) -> list[int] | None:
    n = g1.n
    order = _search_order(g1)
    img = [-1] * n
    used = [False] * n
    nodes = 0

    def place(i: int) -> bool:
        nonlocal nodes
        if i == n:
            return accept(img)
        u = order[i]
        anchors = [w for w in g1.neighbors(u) if img[w] != -1]
        if anchors:
            cands = set(g2.neighbors(img[anchors[0]]))
            for w in anchors[1:]:
                cands &= set(g2.neighbors(img[w]))
        else:
            cands = set(range(n))
        for x in sorted(cands):
            if used[x] or g1.degree(u) != g2.degree(x):
                continue
            nodes += 1
            if nodes > SEARCH_CAP:
                raise TooLarge(f"isomorphism search passed {SEARCH_CAP} nodes")
            if any(
                g1.has_edge(u, w) != g2.has_edge(x, img[w])
                for w in order[:i]
            ):
                continue
            if not consistent(u, x, img):
                continue
            img[u] = x
            used[x] = True
            if place(i + 1):
                return True
            img[u] = -1
            used[x] = False
        return False

    return list(img) if place(0) else None


def brute_force_iso(
    g1: Graph, g2: Graph, cap: int = 10
) -> tuple[Verdict, list[int] | None]:
    """Exhaustive isomorphism test with a witness.

    Accept comes with a mapping (image of each vertex of g1), Reject
    with None.  Graphs larger than cap raise TooLarge instead of
    burning time."""
    if g1.n != g2.n or g1.m != g2.m:
        return Verdict.REJECT, None
    if sorted(g1.degree(v) for v in g1.vertices()) != sorted(
        g2.degree(v) for v in g2.vertices()
    ):
        return Verdict.REJECT, None
    if g1.n > cap:
        raise TooLarge(f"brute force capped at {cap} vertices, got {g1.n}")
    witness = _backtrack(g1, g2, lambda u, x, img: True, lambda img: True)
    if witness is None:
        return Verdict.REJECT, None
    return Verdict.ACCEPT, witness


def brute_force_iso_colored(
    g1: Graph,
    r1: EquivalencePartition,
    tc1: TupleColoring | None,
    g2: Graph,
    r2: EquivalencePartition,
    tc2: TupleColoring | None,
    cap: int = 10,
) -> Verdict:
    """Exhaustive isomorphism of tuple-colored graphs with relations.

    A mapping counts only if it sends classes to classes and every
    colored ordering to an ordering of the same color, position by
    position."""
    e1 = tc1.entries if tc1 else {}
    e2 = tc2.entries if tc2 else {}
    if g1.n != g2.n or g1.m != g2.m or len(e1) != len(e2):
        return Verdict.REJECT
    if sorted(len(c) for c in r1.classes) != sorted(len(c) for c in r2.classes):
        return Verdict.REJECT
    if g1.n > cap:
        raise TooLarge(f"brute force capped at {cap} vertices, got {g1.n}")

    def consistent(u: int, x: int, img: list[int]) -> bool:
        cu = r1.class_of[u]
        cx = r2.class_of[x]
        if len(r1.classes[cu]) != len(r2.classes[cx]):
            return False
        for w in r1.classes[cu]:
            if img[w] != -1 and r2.class_of[img[w]] != cx:
                return False
        # and u must not land in the class of some unrelated vertex
        for w, y in enumerate(img):
            if y != -1 and r2.class_of[y] == cx and r1.class_of[w] != cu:
                return False
        return True

    def accept(img: list[int]) -> bool:
        for (ci, sigma), color in e1.items():
            image = tuple(img[v] for v in sigma)
            ci2 = r2.class_of[image[0]]
            if e2.get((ci2, image), 0) != color:
                return False
        return True

    witness = _backtrack(g1, g2, consistent, accept)
    return Verdict.ACCEPT if witness is not None else Verdict.REJECT


def brute_block_oracle(i1: OracleInstance, i2: OracleInstance, cap: int = 12) -> bool:
    """Reference block oracle: fold the marked orderings, then brute."""
    verdict = brute_force_iso_colored(
        i1.graph,
        i1.partition,
        fold_marked(i1),
        i2.graph,
        i2.partition,
        fold_marked(i2),
        cap=cap,
    )
    return verdict is Verdict.ACCEPT


def _class_mixes(classes: list[tuple[int, ...]], budget: int) -> Iterable[tuple[int, ...]]:
    # one nonempty subset per class, total size within budget
    if not classes:
        yield ()
        return
    head = classes[0]
    rest = classes[1:]
    room = budget - len(rest)
    for size in range(1, min(len(head), room) + 1):
        for chosen in combinations(head, size):
            for tail in _class_mixes(rest, budget - size):
                yield chosen + tail


def _connected_quotient_sets(
    g: Graph, r: EquivalencePartition, k: int, cap: int
) -> BagFamily:
    q = quotient_graph(g, r)
    sets = []
    for t in connected_subsets(q.graph, k):
        classes = [tuple(sorted(r.classes[ci])) for ci in sorted(t)]
        for mix in _class_mixes(classes, k):
            sets.append(frozenset(mix))
            if len(sets) > cap:
                raise FamilyTooLarge(f"capture family passed {cap} sets")
    return bag_family(sets)


def capture_bags_connected_quotient(
    g: Graph, k: int, cap: int = DEFAULT_FAMILY_CAP
) -> BagFamily:
    """Sets of at most k vertices projecting to connected class sets.

    The relation is the threshold-2k disjoint-paths closure, so the
    family is invariant under relabeling.  On P3 with k=2 this is the
    three singletons plus both edges, five sets in all."""
    r = kcon_closure(g, 2 * k)
    return _connected_quotient_sets(g, r, k, cap)


def _geodesic_sets(
    g: Graph, r: EquivalencePartition, k: int, c: int, cap: int
) -> BagFamily:
    # auxiliary graph joins vertices that share a class or sit within
    # distance c; the family is its connected sets of size at most k
    dist = [bfs_distances(g, [v]) for v in range(g.n)]
    aux_edges = []
    for u in range(g.n):
        for v in range(u + 1, g.n):
            close = 0 <= dist[u][v] <= c
            if close or r.class_of[u] == r.class_of[v]:
                aux_edges.append((u, v))
    aux = Graph(g.n, aux_edges)
    sets = []
    for s in connected_subsets(aux, k):
        sets.append(s)
        if len(sets) > cap:
            raise FamilyTooLarge(f"capture family passed {cap} sets")
    return bag_family(sets)


def capture_bags_geodesic(
    g: Graph, k: int, c: int, cap: int = DEFAULT_FAMILY_CAP
) -> BagFamily:
    """Sets of at most k vertices chained by classes or c-short hops.

    In every such set, each proper subset has a member within distance
    c of, or equivalent to, a vertex of the rest; on P4 with k=2 and
    c=1 that means singletons plus the three edges."""
    r = kcon_closure(g, 2 * k)
    return _geodesic_sets(g, r, k, c, cap)


def _capture_oracle(bags_fn, cap: int):
    def oracle(i1: OracleInstance, i2: OracleInstance) -> bool:
        f1 = bags_fn(i1.graph, i1.partition)
        f2 = bags_fn(i2.graph, i2.partition)
        verdict = compare_with_strong_capture(
            i1.graph,
            f1,
            i2.graph,
            f2,
            cap=cap,
            partition1=i1.partition,
            coloring1=fold_marked(i1),
            partition2=i2.partition,
            coloring2=fold_marked(i2),
        )
        return verdict is Verdict.ACCEPT

    return oracle


def _closure_pipeline(
    g1: Graph, g2: Graph, k: int, bags_fn, cap: int
) -> Verdict:
    r1 = kcon_closure(g1, 2 * k)
    r2 = kcon_closure(g2, 2 * k)
    big = max(
        max((len(c) for c in r1.classes), default=0),
        max((len(c) for c in r2.classes), default=0),
    )
    if big > k:
        return Verdict.INFEASIBLE
    return iso_via_blocks(
        g1, r1, None, g2, r2, None, _capture_oracle(bags_fn, cap)
    )


def cstw_iso(
    g1: Graph,
    g2: Graph,
    k: int,
    cap: int = DEFAULT_TUPLE_CAP,
    family_cap: int = DEFAULT_FAMILY_CAP,
) -> Verdict:
    """Isomorphism solver for connected strong tree width at most k.

    Accept and Reject are exact whenever both graphs have connected
    strong tree decompositions of width at most k relative to the
    closure; Infeasible reports a closure class larger than k."""

    def bags(h: Graph, r: EquivalencePartition) -> BagFamily:
        return _connected_quotient_sets(h, r, k, family_cap)

    return _closure_pipeline(g1, g2, k, bags, cap)


def geodesic_stw_iso(
    g1: Graph,
    g2: Graph,
    k: int,
    c: int,
    cap: int = DEFAULT_TUPLE_CAP,
    family_cap: int = DEFAULT_FAMILY_CAP,
) -> Verdict:
    """Like cstw_iso with bags chained by distance-c hops instead.

    Exact for graphs whose width-k decompositions use geodesically
    chained bags, which covers bounded chordality classes."""

    def bags(h: Graph, r: EquivalencePartition) -> BagFamily:
        return _geodesic_sets(h, r, k, c, family_cap)

    return _closure_pipeline(g1, g2, k, bags, cap)


def iso_with_supplied_bags(
    g1: Graph,
    bags1: Iterable[frozenset[int]],
    g2: Graph,
    bags2: Iterable[frozenset[int]],
    cap: int = DEFAULT_TUPLE_CAP,
) -> Verdict:
    """Refinement verdict from caller-supplied capture families.

    Sound for any families; complete when each family captures the
    bags of some width-bounded strong decomposition of its graph.
    Empty families reject nonempty graphs outright."""
    f1 = bag_family(bags1)
    f2 = bag_family(bags2)
    if g1.n != g2.n or g1.m != g2.m:
        return Verdict.REJECT
    if g1.n == 0:
        return Verdict.ACCEPT
    if len(f1) == 0 or len(f2) == 0:
        return Verdict.REJECT
    return compare_with_strong_capture(g1, f1, g2, f2, cap=cap)


def _cycles(g: Graph, cap: int) -> Iterable[list[int]]:
    # canonical cycle enumeration: smallest vertex first, orientation
    # fixed by the second vertex, step counter against blowup
    steps = 0

    def extend(start: int, path: list[int], onpath: set[int]):
        nonlocal steps
        u = path[-1]
        for w in g.neighbors(u):
            steps += 1
            if steps > cap:
                raise TooLarge(f"cycle enumeration passed {cap} steps")
            if w == start and len(path) >= 3 and path[1] < path[-1]:
                yield list(path)
            elif w > start and w not in onpath:
                onpath.add(w)
                path.append(w)
                yield from extend(start, path, onpath)
                path.pop()
                onpath.remove(w)

    for s in range(g.n):
        yield from extend(s, [s], {s})


def geodesic_cycle_length(g: Graph, cap: int = 10**6) -> int:
    """Length of the longest cycle realizing all its own distances.

    A cycle is geodesic when the distance in g between any two of its
    vertices equals their distance along the cycle.  Returns 0 for
    forests; C6 gives 6 and K4 gives 3."""
    dist = [bfs_distances(g, [v]) for v in range(g.n)]
    best = 0
    for cyc in _cycles(g, cap):
        length = len(cyc)
        if length <= best:
            continue
        if all(
            dist[cyc[i]][cyc[j]] == min(j - i, length - (j - i))
            for i in range(length)
            for j in range(i + 1, length)
        ):
            best = length
    return best


def chordality(g: Graph, cap: int = 10**6) -> int:
    """Length of the longest induced cycle, 0 for forests."""
    best = 0
    for cyc in _cycles(g, cap):
        length = len(cyc)
        if length <= best:
            continue
        chorded = any(
            g.has_edge(cyc[i], cyc[j])
            for i in range(length)
            for j in range(i + 1, length)
            if min(j - i, length - (j - i)) >= 2
        )
        if not chorded:
            best = length
    return best
