"""Biconnected-component reduction over a vertex equivalence relation.

blocks_relative lifts the biconnected components of the quotient graph
back to the input graph.  iso_via_blocks peels leaf blocks of the
rooted block-cut trees round by round, replacing every peeled leaf by
fresh colors on the orderings of its attachment class, until a single
oracle call on the surviving root blocks decides isomorphism.
stw_to_degree_iso composes that peeling with the disjoint-paths
closure and an ordering-gadget encoding, turning width-bounded
isomorphism into plain uncolored bounded-degree isomorphism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable

from .connectivity import kcon_closure
from .errors import BadParams, ClassTooLarge, Verdict
from .graphs import (
    EquivalencePartition,
    Graph,
    TupleColoring,
    connected_components,
    induced_subgraph,
    quotient_graph,
)

__all__ = [
    "BlockForest",
    "OracleCall",
    "OracleInstance",
    "ReductionTrace",
    "blocks_relative",
    "fold_marked",
    "gadget_encode",
    "iso_via_blocks",
    "stw_to_degree_iso",
]

# gadget_encode attaches one gadget per ordering of a class, so class
# sizes beyond this make the output explode factorially
MAX_GADGET_CLASS = 7


@dataclass(frozen=True)
class BlockForest:
    """Biconnected structure of a graph relative to an equivalence.

    blocks holds the vertex pre-images of the biconnected components
    of the quotient graph; cut_classes the class indices that are cut
    vertices there; tree the bipartite incidences (block index, class
    index) linking each block to the cut classes it contains.
    """

    partition: EquivalencePartition
    blocks: tuple[frozenset[int], ...]
    cut_classes: tuple[int, ...]
    tree: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.blocks)

    def cut_sets(self, block_index: int) -> list[frozenset[int]]:
        """Vertex sets of the cut classes inside one block."""
        return [
            self.partition.classes[ci]
            for bi, ci in self.tree
            if bi == block_index
        ]


def _graph_blocks(g: Graph) -> tuple[list[tuple[int, ...]], list[int]]:
    # iterative lowpoint search; every edge lands in exactly one block,
    # isolated vertices become singleton blocks
    disc = [-1] * g.n
    low = [0] * g.n
    parent = [-1] * g.n
    it = [0] * g.n
    estack: list[tuple[int, int]] = []
    blocks: list[tuple[int, ...]] = []
    cuts: set[int] = set()
    timer = 0
    for root in range(g.n):
        if disc[root] != -1:
            continue
        if g.degree(root) == 0:
            blocks.append((root,))
            continue
        disc[root] = low[root] = timer
        timer += 1
        kids = 0
        stack = [root]
        while stack:
            u = stack[-1]
            nbrs = g.neighbors(u)
            if it[u] < len(nbrs):
                v = nbrs[it[u]]
                it[u] += 1
                if v == parent[u]:
                    continue
                if disc[v] == -1:
                    parent[v] = u
                    disc[v] = low[v] = timer
                    timer += 1
                    estack.append((u, v))
                    stack.append(v)
                    if u == root:
                        kids += 1
                elif disc[v] < disc[u]:
                    estack.append((u, v))
                    if disc[v] < low[u]:
                        low[u] = disc[v]
            else:
                stack.pop()
                p = parent[u]
                if p == -1:
                    continue
                if low[u] < low[p]:
                    low[p] = low[u]
                if low[u] >= disc[p]:
                    grab: set[int] = set()
                    while True:
                        a, b = estack.pop()
                        grab.add(a)
                        grab.add(b)
                        if (a, b) == (p, u):
                            break
                    blocks.append(tuple(sorted(grab)))
                    if p != root:
                        cuts.add(p)
        if kids >= 2:
            cuts.add(root)
    return blocks, sorted(cuts)


def blocks_relative(g: Graph, r: EquivalencePartition) -> BlockForest:
    """Biconnected components of g relative to r.

    Blocks are computed on the quotient graph and lifted back through
    the projection, so each block is a union of whole classes.  Blocks
    come out in canonical order (size, then members)."""
    q = quotient_graph(g, r)
    qblocks, qcuts = _graph_blocks(q.graph)
    cutset = set(qcuts)
    lifted = []
    for qb in qblocks:
        verts: set[int] = set()
        for ci in qb:
            verts |= r.classes[ci]
        lifted.append((frozenset(verts), qb))
    lifted.sort(key=lambda t: (len(t[0]), sorted(t[0])))
    tree = [
        (bi, ci)
        for bi, (_, qb) in enumerate(lifted)
        for ci in sorted(qb)
        if ci in cutset
    ]
    return BlockForest(
        partition=r,
        blocks=tuple(b for b, _ in lifted),
        cut_classes=tuple(qcuts),
        tree=tuple(tree),
    )


@dataclass(frozen=True)
class OracleInstance:
    """One tuple-colored block handed to an isomorphism oracle.

    marked, when set, is an ordering of the distinguished cut class;
    the oracle must decide existence of an isomorphism preserving
    classes and colors and mapping marked orderings position by
    position."""

    graph: Graph
    partition: EquivalencePartition
    coloring: TupleColoring
    marked: tuple[int, ...] | None = None

    def max_degree(self) -> int:
        return max((self.graph.degree(v) for v in self.graph.vertices()), default=0)

    def profile(self) -> tuple:
        """Cheap isomorphism invariant used to skip hopeless oracle calls."""
        sizes = tuple(sorted(len(c) for c in self.partition.classes))
        colors = tuple(
            sorted((len(o), c) for (_, o), c in self.coloring.entries.items())
        )
        mk = -1 if self.marked is None else len(self.marked)
        return (self.graph.n, self.graph.m, sizes, colors, mk)


def fold_marked(inst: OracleInstance) -> TupleColoring:
    """Tuple coloring with the distinguished ordering folded in.

    Real colors are doubled and the marked ordering gets the odd color
    2c+1 on top of its old color c, so plain tuple-colored isomorphism
    of the folded instances is exactly marked isomorphism."""
    entries = {key: 2 * c for key, c in inst.coloring.entries.items()}
    if inst.marked is not None:
        ci = inst.partition.class_of[inst.marked[0]]
        old = inst.coloring.color_of(ci, inst.marked)
        entries[(ci, inst.marked)] = 2 * old + 1
    return TupleColoring(inst.partition, entries)


@dataclass(frozen=True)
class OracleCall:
    round: int
    block_sizes: tuple[int, int]
    max_degree: int
    verdict: bool


@dataclass
class ReductionTrace:
    """Ordered log of the oracle calls a reduction issued."""

    calls: list[OracleCall] = field(default_factory=list)

    def record(self, rnd: int, a: OracleInstance, b: OracleInstance, ok: bool) -> None:
        self.calls.append(
            OracleCall(
                round=rnd,
                block_sizes=(a.graph.n, b.graph.n),
                max_degree=max(a.max_degree(), b.max_degree()),
                verdict=ok,
            )
        )

    def rows(self) -> list[dict]:
        """JSON-ready rows, one per oracle call, in call order."""
        return [
            {
                "round": c.round,
                "block_sizes": list(c.block_sizes),
                "max_degree": c.max_degree,
                "verdict": c.verdict,
            }
            for c in self.calls
        ]


Oracle = Callable[[OracleInstance, OracleInstance], bool]


class _Side:
    """Mutable per-graph state while peeling one quotient component."""

    __slots__ = ("graph", "live", "classes", "colors", "root")

    def __init__(
        self,
        graph: Graph,
        classes: list[frozenset[int]],
        colors: dict[tuple[int, ...], int],
    ):
        self.graph = graph
        self.live: set[int] = set(range(graph.n))
        self.classes = classes
        self.colors = colors
        self.root: frozenset[int] = frozenset()

    def copy(self) -> "_Side":
        dup = _Side(self.graph, list(self.classes), dict(self.colors))
        dup.live = set(self.live)
        dup.root = self.root
        return dup

    def forest(self) -> tuple[list[frozenset[int]], list[list[frozenset[int]]]]:
        """Blocks of the live part and the cut-class sets of each."""
        order = sorted(self.live)
        h, _ = induced_subgraph(self.graph, order)
        pos = {v: i for i, v in enumerate(order)}
        part = EquivalencePartition(
            h.n, [[pos[v] for v in c] for c in self.classes]
        )
        bf = blocks_relative(h, part)
        blocks = [frozenset(order[x] for x in b) for b in bf.blocks]
        cuts: list[list[frozenset[int]]] = [[] for _ in blocks]
        for bi, ci in bf.tree:
            cuts[bi].append(frozenset(order[x] for x in part.classes[ci]))
        return blocks, cuts

    def instance(
        self, verts: frozenset[int], marked: tuple[int, ...] | None
    ) -> OracleInstance:
        order = sorted(verts)
        h, _ = induced_subgraph(self.graph, order)
        pos = {v: i for i, v in enumerate(order)}
        # blocks are unions of whole classes, so the restriction covers h
        part = EquivalencePartition(
            h.n, [[pos[v] for v in c] for c in self.classes if c <= verts]
        )
        entries = {}
        for sigma, color in self.colors.items():
            if set(sigma) <= verts:
                local = tuple(pos[v] for v in sigma)
                entries[(part.class_of[local[0]], local)] = color
        mk = None if marked is None else tuple(pos[v] for v in marked)
        return OracleInstance(h, part, TupleColoring(part, entries), mk)

    def drop(self, interior: set[int]) -> None:
        self.live -= interior
        self.classes = [c for c in self.classes if not c & interior]
        self.colors = {
            s: c for s, c in self.colors.items() if not set(s) & interior
        }


class _Intern:
    # fresh color ids, starting above everything already in use
    def __init__(self, start: int):
        self.next = start
        self.items: dict[tuple, int] = {}

    def get(self, key: tuple) -> int:
        if key not in self.items:
            self.items[key] = self.next
            self.next += 1
        return self.items[key]


def _ask(
    oracle: Oracle,
    a: OracleInstance,
    b: OracleInstance,
    memo: dict,
    trace: ReductionTrace | None,
    rnd: int,
) -> bool:
    if a.profile() != b.profile():
        return False
    ka = (
        a.graph.n,
        a.graph.edges,
        tuple(sorted(tuple(sorted(c)) for c in a.partition.classes)),
        tuple(sorted(a.coloring.entries.items())),
        a.marked,
    )
    kb = (
        b.graph.n,
        b.graph.edges,
        tuple(sorted(tuple(sorted(c)) for c in b.partition.classes)),
        tuple(sorted(b.coloring.entries.items())),
        b.marked,
    )
    key = (ka, kb) if ka <= kb else (kb, ka)
    if key in memo:
        return memo[key]
    ok = oracle(a, b)
    memo[key] = ok
    if trace is not None:
        trace.record(rnd, a, b, ok)
    return ok


def _isored(
    a: _Side,
    b: _Side,
    oracle: Oracle,
    memo: dict,
    trace: ReductionTrace | None,
) -> bool:
    """Decide isomorphism mapping a.root to b.root by leaf peeling."""
    top = max(
        max(a.colors.values(), default=0), max(b.colors.values(), default=0)
    )
    fresh = _Intern(top + 1)
    rnd = 0
    while True:
        fa_blocks, fa_cuts = a.forest()
        fb_blocks, fb_cuts = b.forest()
        if len(fa_blocks) == 1 or len(fb_blocks) == 1:
            if (len(fa_blocks) == 1) != (len(fb_blocks) == 1):
                return False
            ia = a.instance(frozenset(a.live), None)
            ib = b.instance(frozenset(b.live), None)
            return _ask(oracle, ia, ib, memo, trace, rnd)

        # leaves of the rooted block-cut tree: every non-root block
        # with a single cut class (its parent)
        sides = []
        for side, blocks, cuts in ((a, fa_blocks, fa_cuts), (b, fb_blocks, fb_cuts)):
            leaves = [
                (blocks[i], cuts[i][0])
                for i in range(len(blocks))
                if blocks[i] != side.root and len(cuts[i]) == 1
            ]
            leaves.sort(key=lambda t: sorted(t[0]))
            sides.append(leaves)

        # pool every (leaf, attachment ordering) of both graphs and
        # classify them up to oracle isomorphism
        items: list[tuple[_Side, frozenset[int], tuple[int, ...]]] = []
        for side, leaves in zip((a, b), sides):
            for block, cut in leaves:
                for sigma in permutations(sorted(cut)):
                    items.append((side, block, sigma))
        chi: dict[tuple[int, tuple[int, ...]], int] = {}
        reps: list[OracleInstance] = []
        for side, block, sigma in items:
            inst = side.instance(block, sigma)
            for gi, rep in enumerate(reps):
                if _ask(oracle, rep, inst, memo, trace, rnd):
                    group = gi
                    break
            else:
                group = len(reps)
                reps.append(inst)
            chi[(id(side), min(block), sigma)] = group

        # recolor the attachment orderings: the new color is a fresh
        # integer determined by the old color and the leaf multiset
        pending = []
        for side, leaves in zip((a, b), sides):
            by_cut: dict[frozenset[int], list[frozenset[int]]] = {}
            for block, cut in leaves:
                by_cut.setdefault(cut, []).append(block)
            for cut, blocks in sorted(by_cut.items(), key=lambda t: sorted(t[0])):
                for sigma in permutations(sorted(cut)):
                    ms = tuple(
                        sorted(chi[(id(side), min(bl), sigma)] for bl in blocks)
                    )
                    key = (rnd, side.colors.get(sigma, 0), ms)
                    pending.append((side, sigma, key))
        for key in sorted({key for _, _, key in pending}):
            fresh.get(key)
        for side, sigma, key in pending:
            side.colors[sigma] = fresh.get(key)

        for side, leaves in zip((a, b), sides):
            interior: set[int] = set()
            for block, cut in leaves:
                interior |= block - cut
            side.drop(interior)
        rnd += 1


def _prepare(
    g: Graph, r: EquivalencePartition, tc: TupleColoring | None
) -> list[_Side]:
    """Split one input into per-quotient-component peeling states."""
    q = quotient_graph(g, r)
    out = []
    for comp in connected_components(q.graph):
        verts = sorted(v for ci in comp for v in r.classes[ci])
        h, _ = induced_subgraph(g, verts)
        pos = {v: i for i, v in enumerate(verts)}
        classes = [frozenset(pos[v] for v in r.classes[ci]) for ci in comp]
        colors: dict[tuple[int, ...], int] = {}
        if tc is not None:
            for (ci, sigma), color in tc.entries.items():
                if ci in set(comp):
                    colors[tuple(pos[v] for v in sigma)] = color
        out.append(_Side(h, classes, colors))
    return out


def _component_iso(
    a: _Side, b: _Side, oracle: Oracle, memo: dict, trace: ReductionTrace | None
) -> bool:
    """Fix the least block of a, try every distinguished block of b."""
    if (a.graph.n, a.graph.m) != (b.graph.n, b.graph.m):
        return False
    a_blocks, _ = a.forest()
    b_blocks, _ = b.forest()
    if len(a_blocks) != len(b_blocks):
        return False
    root_a = min(a_blocks, key=lambda s: (len(s), sorted(s)))
    for root_b in b_blocks:
        if len(root_b) != len(root_a):
            continue
        run_a = a.copy()
        run_b = b.copy()
        run_a.root = root_a
        run_b.root = root_b
        if _isored(run_a, run_b, oracle, memo, trace):
            return True
    return False


def iso_via_blocks(
    g1: Graph,
    r1: EquivalencePartition,
    tc1: TupleColoring | None,
    g2: Graph,
    r2: EquivalencePartition,
    tc2: TupleColoring | None,
    oracle: Oracle,
    trace: ReductionTrace | None = None,
) -> Verdict:
    """Reduce tuple-colored isomorphism to oracle calls on blocks.

    The verdict is Accept iff the inputs are isomorphic as tuple-colored
    graphs with equivalence relations, assuming the supplied oracle
    answers block queries exactly.  Oracle errors propagate."""
    if g1.n != g2.n or g1.m != g2.m:
        return Verdict.REJECT
    sides1 = _prepare(g1, r1, tc1)
    sides2 = _prepare(g2, r2, tc2)
    if len(sides1) != len(sides2):
        return Verdict.REJECT
    memo: dict = {}
    # classify all components of both inputs up to isomorphism, then
    # the verdict is equality of the two type multisets
    types: list[tuple[_Side, int]] = []
    reps: list[_Side] = []
    for side in sides1 + sides2:
        for tid, rep in enumerate(reps):
            if _component_iso(rep, side, oracle, memo, trace):
                types.append((side, tid))
                break
        else:
            types.append((side, len(reps)))
            reps.append(side)
    count1 = sorted(tid for s, tid in types if any(s is x for x in sides1))
    count2 = sorted(tid for s, tid in types if any(s is x for x in sides2))
    return Verdict.ACCEPT if count1 == count2 else Verdict.REJECT


def gadget_encode(
    g: Graph,
    r: EquivalencePartition,
    tc: TupleColoring,
    d: int,
    palette: tuple[int, ...] | None = None,
) -> Graph:
    """Rewrite ordering colors as uncolored graph structure.

    Every colored ordering of a class grows a fresh path whose i-th
    vertex joins the i-th member of the ordering; the path end carries
    a caterpillar whose leaf pattern spells the color's index in the
    palette.  All caterpillars share one spine height, so the encoding
    preserves and reflects isomorphism.  Each original vertex gains at
    most one edge per colored ordering of its class, keeping the output
    degree within d plus a factorial term.

    palette defaults to the colors used here; callers encoding a pair
    of graphs must pass the shared sorted union of both palettes."""
    if r.n != g.n:
        raise BadParams(f"partition on {r.n} vertices, graph on {g.n}")
    for c in r.classes:
        if len(c) > MAX_GADGET_CLASS:
            raise ClassTooLarge(
                f"class of size {len(c)} exceeds gadget bound {MAX_GADGET_CLASS}"
            )
    top = max((g.degree(v) for v in g.vertices()), default=0)
    if top > d:
        raise BadParams(f"input degree {top} already exceeds the bound {d}")
    if palette is None:
        palette = tuple(sorted(set(tc.entries.values())))
    index = {color: i + 1 for i, color in enumerate(palette)}
    height = max(1, math.ceil(math.log2(len(palette) + 1))) + 1
    edges = list(g.edges)
    nxt = g.n
    for ci, cls in enumerate(r.classes):
        for sigma in permutations(sorted(cls)):
            color = tc.color_of(ci, sigma)
            if color == 0:
                continue
            if color not in index:
                raise BadParams(f"color {color} missing from the palette")
            path = list(range(nxt, nxt + len(sigma) + 1))
            nxt += len(sigma) + 1
            for u, v in zip(path, path[1:]):
                edges.append((u, v))
            for i, v in enumerate(sigma):
                edges.append((path[i + 1], v))
            spine = list(range(nxt, nxt + height))
            nxt += height
            edges.append((path[0], spine[0]))
            for u, v in zip(spine, spine[1:]):
                edges.append((u, v))
            bits = index[color]
            for j in range(height):
                if (bits >> j) & 1:
                    edges.append((spine[j], nxt))
                    nxt += 1
    return Graph(nxt, edges)


def stw_to_degree_iso(
    g1: Graph,
    g2: Graph,
    k: int,
    degree_oracle: Callable[[Graph, Graph], bool],
    trace: ReductionTrace | None = None,
) -> Verdict:
    """Decide isomorphism through an uncolored bounded-degree oracle.

    Computes the threshold-2k disjoint-paths closure of both graphs,
    reports Infeasible when a class outgrows k, and otherwise peels
    blocks, encoding every oracle query with gadget_encode before
    handing it to degree_oracle.  Block degrees are asserted against
    the width-k bound before gadgeting."""
    if k < 1:
        raise BadParams(f"need k >= 1, got {k}")
    r1 = kcon_closure(g1, 2 * k)
    r2 = kcon_closure(g2, 2 * k)
    big = max(
        max((len(c) for c in r1.classes), default=0),
        max((len(c) for c in r2.classes), default=0),
    )
    if big > k:
        return Verdict.INFEASIBLE
    bound = 2 * k * k * (k - 1) + k - 1

    def adapter(ia: OracleInstance, ib: OracleInstance) -> bool:
        for inst in (ia, ib):
            assert inst.max_degree() <= bound, (
                f"block degree {inst.max_degree()} above bound {bound}"
            )
        totals = []
        for inst in (ia, ib):
            folded = fold_marked(inst)
            entries = {}
            for ci, cls in enumerate(inst.partition.classes):
                for sigma in permutations(sorted(cls)):
                    # shift by one so uncolored orderings still get a
                    # gadget; the relation itself must survive encoding
                    entries[(ci, sigma)] = folded.color_of(ci, sigma) + 1
            totals.append(TupleColoring(inst.partition, entries))
        shared = tuple(
            sorted(set(totals[0].entries.values()) | set(totals[1].entries.values()))
        )
        e1 = gadget_encode(ia.graph, ia.partition, totals[0], bound, shared)
        e2 = gadget_encode(ib.graph, ib.partition, totals[1], bound, shared)
        return degree_oracle(e1, e2)

    return iso_via_blocks(g1, r1, None, g2, r2, None, adapter, trace)
