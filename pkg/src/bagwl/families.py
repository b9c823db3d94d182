"""Witness-family generators and exhaustive width oracles.

The generators build the two parameterized families used throughout
the tests (bundled paths and combs) plus standard small graphs.  The
brute_* functions are exact by exhaustive search and intentionally
slow; they anchor every derived expected value in the test suite.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterator

from .decomposition import StrongTreeDecomposition, minimal_tdd
from .errors import BadParams, TooLarge
from .graphs import Graph, is_connected
from . import decomposition as _dec


@dataclass(frozen=True)
class KpPath:
    """P_k with every path edge replaced by p disjoint length-2 paths.

    blacks: the k original path vertices (pairwise non-adjacent).
    bundles: bundles[i] lists the p white vertices between black i and
    black i+1; every white is adjacent to exactly those two blacks.
    """

    graph: Graph
    blacks: tuple[int, ...]
    bundles: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class KpComb:
    """P_k with a K_{2,p} tooth attached to every path vertex.

    spine: the k path vertices.  partners[i] is the second black side
    of tooth i (not adjacent to the spine); whites[i] are its p white
    vertices, each adjacent to spine[i] and partners[i].
    """

    graph: Graph
    spine: tuple[int, ...]
    partners: tuple[int, ...]
    whites: tuple[tuple[int, ...], ...]


def kp_path(k: int, p: int) -> KpPath:
    if k < 2 or p < 1:
        raise BadParams(f"need k >= 2 and p >= 1, got k={k} p={p}")
    blacks = tuple(range(k))
    bundles = []
    edges = []
    nxt = k
    for i in range(k - 1):
        bundle = tuple(range(nxt, nxt + p))
        nxt += p
        for w in bundle:
            edges.append((i, w))
            edges.append((i + 1, w))
        bundles.append(bundle)
    return KpPath(Graph(nxt, edges), blacks, tuple(bundles))


def kp_comb(k: int, p: int) -> KpComb:
    if k < 1 or p < 1:
        raise BadParams(f"need k >= 1 and p >= 1, got k={k} p={p}")
    spine = tuple(range(k))
    partners = tuple(range(k, 2 * k))
    edges = [(i, i + 1) for i in range(k - 1)]
    whites = []
    nxt = 2 * k
    for i in range(k):
        tooth = tuple(range(nxt, nxt + p))
        nxt += p
        for w in tooth:
            edges.append((spine[i], w))
            edges.append((partners[i], w))
        whites.append(tooth)
    return KpComb(Graph(nxt, edges), spine, partners, tuple(whites))


def comb_decomposition(comb: KpComb) -> StrongTreeDecomposition:
    """Connected strong tree decomposition of a comb with width 3:
    one bag {spine, partner, first white} per tooth, chained along the
    spine, plus singleton bags for the remaining whites."""
    bags: list[frozenset[int]] = []
    edges: list[tuple[int, int]] = []
    for i in range(len(comb.spine)):
        bags.append(frozenset({comb.spine[i], comb.partners[i], comb.whites[i][0]}))
        if i > 0:
            edges.append((i - 1, i))
    unit_count = len(comb.spine)
    for i in range(unit_count):
        for w in comb.whites[i][1:]:
            bags.append(frozenset({w}))
            edges.append((i, len(bags) - 1))
    return StrongTreeDecomposition(bags=tuple(bags), tree_edges=tuple(edges))


def cycle(n: int) -> Graph:
    if n < 3:
        raise BadParams(f"cycle needs n >= 3, got {n}")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise BadParams(f"path needs n >= 1, got {n}")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    if n < 1:
        raise BadParams(f"complete graph needs n >= 1, got {n}")
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_graph(n: int, m: int, seed: int) -> Graph:
    """Uniform random m-edge simple graph, deterministic per seed."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if m < 0 or m > len(pairs):
        raise BadParams(f"m={m} out of range for n={n}")
    return Graph(n, random.Random(seed).sample(pairs, m))


def _partitions_bounded(
    items: list[int], limit: int
) -> Iterator[list[list[int]]]:
    """All set partitions with every part of size <= limit."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _partitions_bounded(rest, limit):
        for i, part in enumerate(sub):
            if len(part) < limit:
                yield sub[:i] + [part + [first]] + sub[i + 1 :]
        yield [[first]] + sub


def _bag_graph_is_forest(g: Graph, parts: list[list[int]]) -> bool:
    """Cross-edge relation between parts must be acyclic; any forest
    extends to a tree on the bags, so this characterizes validity."""
    where = {}
    for i, part in enumerate(parts):
        for v in part:
            where[v] = i
    parent = list(range(len(parts)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    linked: set[tuple[int, int]] = set()
    for u, v in g.edges:
        a, b = where[u], where[v]
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        if key in linked:
            continue
        linked.add(key)
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def _parts_connected(g: Graph, parts: list[list[int]]) -> bool:
    for part in parts:
        members = set(part)
        seen = {part[0]}
        stack = [part[0]]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w in members and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(members):
            return False
    return True


def brute_stw(g: Graph, cap: int = 10) -> int:
    """Exact strong tree width by exhaustive partition search."""
    if g.n > cap:
        raise TooLarge(f"n={g.n} exceeds brute-force cap {cap}")
    if g.n == 0:
        return 0
    for width in range(1, g.n + 1):
        for parts in _partitions_bounded(list(range(g.n)), width):
            if _bag_graph_is_forest(g, parts):
                return width
    raise AssertionError("single-bag partition is always valid")


def brute_cstw(g: Graph, cap: int = 10) -> int:
    """Exact connected strong tree width by exhaustive search."""
    if g.n > cap:
        raise TooLarge(f"n={g.n} exceeds brute-force cap {cap}")
    if g.n == 0:
        return 0
    for width in range(1, g.n + 1):
        for parts in _partitions_bounded(list(range(g.n)), width):
            if _parts_connected(g, parts) and _bag_graph_is_forest(g, parts):
                return width
    raise AssertionError("unreachable for connected inputs")


def connected_subsets(g: Graph, max_size: int) -> Iterator[frozenset[int]]:
    """Every connected vertex set of size 1..max_size exactly once."""

    def grow(
        root: int, cur: set[int], ext: list[int], banned: set[int]
    ) -> Iterator[frozenset[int]]:
        yield frozenset(cur)
        if len(cur) == max_size:
            return
        local_ban: set[int] = set()
        for idx, u in enumerate(ext):
            fresh = [
                w
                for w in g.neighbors(u)
                if w > root
                and w not in cur
                and w not in banned
                and w not in local_ban
                and w not in ext
            ]
            cur.add(u)
            yield from grow(
                root,
                cur,
                [x for x in ext[idx + 1 :] if x not in local_ban] + sorted(fresh),
                banned | local_ban,
            )
            cur.remove(u)
            local_ban.add(u)

    for v in range(g.n):
        yield from grow(v, {v}, sorted(u for u in g.neighbors(v) if u > v), set())


def brute_ctdw(
    g: Graph, max_width: int | None = None, cap: int = 48
) -> tuple[int | None, list[frozenset[int]]]:
    """Minimum root-distance width over connected root sets, with every
    optimal root set.

    Searches root sets by increasing size; a root of size s always has
    width >= s, so the search stops once the size exceeds the best
    width found.  With max_width the search is confined to widths
    <= max_width and (None, []) means no connected root achieves it.
    """
    if g.n > cap:
        raise TooLarge(f"n={g.n} exceeds brute-force cap {cap}")
    if g.n == 0:
        return None, []
    best: int | None = None
    found: dict[int, list[frozenset[int]]] = {}
    size = 1
    while True:
        bound = max_width if max_width is not None else (best or g.n)
        if size > bound:
            break
        for s in connected_subsets(g, size):
            if len(s) != size:
                continue
            w = minimal_tdd(g, s)[1]
            if w is math.inf or (max_width is not None and w > max_width):
                continue
            w = int(w)
            if best is None or w <= best:
                best = w if best is None else min(best, w)
                found.setdefault(w, []).append(s)
        size += 1
    if best is None:
        return None, []
    roots = sorted(found[best], key=sorted)
    return best, roots


def brute_rtdw(g: Graph, cap: int = 4096) -> int | None:
    """Minimum root-distance width over single-vertex roots; None when
    the graph is disconnected."""
    if g.n > cap:
        raise TooLarge(f"n={g.n} exceeds brute-force cap {cap}")
    if g.n == 0 or not is_connected(g):
        return None
    return min(int(_dec.tdw_of_root(g, {v})) for v in range(g.n))
