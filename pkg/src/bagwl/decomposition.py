"""Tree-structured decompositions over bag partitions.

Three kinds of structure live here:

* StrongTreeDecomposition: bags partition the vertex set, bags form a
  tree, and every edge is inside a bag or between tree-adjacent bags.
  Width is the largest bag size.
* TreeDistanceDecomposition: a strong tree decomposition with a root
  bag such that every vertex outside the root has a neighbor in its
  parent bag.  minimal_tdd builds the unique finest one for a root set.
* TreeDecomposition: ordinary (overlapping-bag) tree decomposition,
  used as the target of the semi-smooth interpolation.  Width is again
  reported as the largest bag size for consistency with bag families.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import EmptyRoot, NotConnected, OutOfRange
from .graphs import Graph, bfs_distances


@dataclass(frozen=True)
class StrongTreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0)


@dataclass(frozen=True)
class TreeDistanceDecomposition(StrongTreeDecomposition):
    root: int = 0


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0)


def _tree_ok(count: int, edges: Iterable[tuple[int, int]]) -> bool:
    """Acyclic + connected on vertices 0..count-1 (count 0 is fine)."""
    if count == 0:
        return not list(edges)
    parent = list(range(count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    used = 0
    for a, b in edges:
        if not (0 <= a < count and 0 <= b < count) or a == b:
            return False
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
        used += 1
    return used == count - 1


def _bag_index(d: StrongTreeDecomposition, n: int) -> list[int] | None:
    """Map vertex -> bag id if bags partition 0..n-1, else None."""
    where = [-1] * n
    for i, bag in enumerate(d.bags):
        for v in bag:
            if not 0 <= v < n or where[v] != -1:
                return None
            where[v] = i
    if any(w == -1 for w in where):
        return None
    return where


def validate_strong_td(g: Graph, d: StrongTreeDecomposition) -> bool:
    """True iff bags partition V, the tree is a tree, and every edge is
    inside one bag or between two tree-adjacent bags."""
    if any(not bag for bag in d.bags):
        return False
    where = _bag_index(d, g.n)
    if where is None:
        return False
    if not _tree_ok(len(d.bags), d.tree_edges):
        return False
    adj = set()
    for a, b in d.tree_edges:
        adj.add((a, b))
        adj.add((b, a))
    for u, v in g.edges:
        bu, bv = where[u], where[v]
        if bu != bv and (bu, bv) not in adj:
            return False
    return True


def _depths_from_root(d: StrongTreeDecomposition, root: int) -> list[int] | None:
    nbags = len(d.bags)
    if not 0 <= root < nbags:
        return None
    nbr: list[list[int]] = [[] for _ in range(nbags)]
    for a, b in d.tree_edges:
        nbr[a].append(b)
        nbr[b].append(a)
    depth = [-1] * nbags
    depth[root] = 0
    queue = deque([root])
    while queue:
        i = queue.popleft()
        for j in nbr[i]:
            if depth[j] == -1:
                depth[j] = depth[i] + 1
                queue.append(j)
    return depth


def validate_tdd(g: Graph, d: TreeDistanceDecomposition) -> bool:
    """validate_strong_td plus: every vertex outside the root bag has a
    neighbor in its parent bag."""
    if not validate_strong_td(g, d):
        return False
    depth = _depths_from_root(d, d.root)
    if depth is None:
        return False
    where = _bag_index(d, g.n)
    assert where is not None
    # parent bag of bag i = its unique tree neighbor one level up
    parent = [-1] * len(d.bags)
    for a, b in d.tree_edges:
        if depth[a] == depth[b] + 1:
            parent[a] = b
        elif depth[b] == depth[a] + 1:
            parent[b] = a
    for i, bag in enumerate(d.bags):
        if i == d.root:
            continue
        if parent[i] == -1:
            return False
        pbag = d.bags[parent[i]]
        for v in bag:
            if not any(u in pbag for u in g.neighbors(v)):
                return False
    return True


def validate_connected_strong_td(g: Graph, d: StrongTreeDecomposition) -> bool:
    """validate_strong_td plus: each bag induces a connected subgraph."""
    if not validate_strong_td(g, d):
        return False
    for bag in d.bags:
        members = set(bag)
        start = next(iter(members))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w in members and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != members:
            return False
    return True


def validate_tree_decomposition(g: Graph, d: TreeDecomposition) -> bool:
    """Ordinary tree-decomposition validity: every vertex covered, every
    edge inside some bag, and each vertex's bags form a subtree."""
    if not _tree_ok(len(d.bags), d.tree_edges):
        return False
    holding: list[list[int]] = [[] for _ in range(g.n)]
    for i, bag in enumerate(d.bags):
        for v in bag:
            if not 0 <= v < g.n:
                return False
            holding[v].append(i)
    if any(not h for h in holding):
        return False
    for u, v in g.edges:
        if not any(u in d.bags[i] and v in d.bags[i] for i in holding[u]):
            return False
    nbr: list[list[int]] = [[] for _ in range(len(d.bags))]
    for a, b in d.tree_edges:
        nbr[a].append(b)
        nbr[b].append(a)
    for v in range(g.n):
        nodes = set(holding[v])
        start = holding[v][0]
        seen = {start}
        stack = [start]
        while stack:
            i = stack.pop()
            for j in nbr[i]:
                if j in nodes and j not in seen:
                    seen.add(j)
                    stack.append(j)
        if seen != nodes:
            return False
    return True


def validate_semi_smooth(d: TreeDecomposition) -> bool:
    """True iff the tree is a tree and along every tree edge the two bags
    intersect in all but at most one vertex of the larger bag."""
    if not _tree_ok(len(d.bags), d.tree_edges):
        return False
    for a, b in d.tree_edges:
        big = max(len(d.bags[a]), len(d.bags[b]))
        if len(d.bags[a] & d.bags[b]) < big - 1:
            return False
    return True


def minimal_tdd(
    g: Graph, s: Iterable[int]
) -> tuple[TreeDistanceDecomposition | None, int | float]:
    """Finest tree distance decomposition rooted at the bag s.

    Level d holds the vertices at distance d from s.  Within a level,
    two vertices must share a bag when they are adjacent, or when they
    have a common neighbor one level down, and bag merges propagate to
    the parent bags; the returned decomposition is the closure of those
    rules, which refines every other tree distance decomposition with
    root bag s.

    Returns (decomposition, width), or (None, inf) when some vertex is
    unreachable from s.  Runs in near-linear time in edges.
    """
    roots = sorted(set(s))
    if not roots:
        raise EmptyRoot("root set is empty")
    for v in roots:
        if not 0 <= v < g.n:
            raise OutOfRange(f"root vertex {v} not in 0..{g.n - 1}")
    dist = bfs_distances(g, roots)
    if min(dist, default=0) < 0:
        return None, math.inf

    n = g.n
    parent = list(range(n))
    size = [1] * n
    # up[rep] = some vertex of the parent-level group; -1 only at level 0
    up = [-1] * n
    for v in range(n):
        if dist[v] > 0:
            up[v] = min(u for u in g.neighbors(v) if dist[u] == dist[v] - 1)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pending: deque[tuple[int, int]] = deque()
    for i in range(1, len(roots)):
        pending.append((roots[0], roots[i]))
    for v in range(n):
        same = []
        below = []
        for u in g.neighbors(v):
            if dist[u] == dist[v] and u > v:
                same.append(u)
            elif dist[u] == dist[v] - 1:
                below.append(u)
        for u in same:
            pending.append((v, u))
        for a, b in zip(below, below[1:]):
            pending.append((a, b))

    while pending:
        x, y = pending.popleft()
        rx, ry = find(x), find(y)
        if rx == ry:
            continue
        if size[rx] < size[ry]:
            rx, ry = ry, rx
        ux, uy = up[rx], up[ry]
        parent[ry] = rx
        size[rx] += size[ry]
        if ux == -1:
            up[rx] = uy
        elif uy != -1:
            pending.append((ux, uy))  # merged children force merged parents

    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    ordered = sorted(groups.values(), key=lambda vs: (dist[vs[0]], vs[0]))
    index = {find(vs[0]): i for i, vs in enumerate(ordered)}
    edges = []
    for vs in ordered:
        rep = find(vs[0])
        if up[rep] != -1:
            a, b = index[find(up[rep])], index[rep]
            edges.append((min(a, b), max(a, b)))
    tdd = TreeDistanceDecomposition(
        bags=tuple(frozenset(vs) for vs in ordered),
        tree_edges=tuple(sorted(edges)),
        root=0,
    )
    return tdd, tdd.width


def tdw_of_root(g: Graph, s: Iterable[int]) -> int | float:
    """Width of the minimal tree distance decomposition rooted at s;
    inf when s does not reach every vertex."""
    return minimal_tdd(g, s)[1]


def pairwise_union_family(
    sets: Iterable[frozenset[int]],
) -> tuple[frozenset[int], ...]:
    """All unions of two (not necessarily distinct) members, deduplicated
    and canonically sorted.  Singletons of the family persist via B∪B."""
    base = [frozenset(b) for b in sets]
    out = {a | b for a in base for b in base}
    return tuple(sorted(out, key=lambda b: (len(b), sorted(b))))


def family_captures(
    family: Iterable[frozenset[int]], bags: Iterable[frozenset[int]]
) -> bool:
    """True iff every given bag is a subset of some family member."""
    fam = [frozenset(b) for b in family]
    return all(any(bag <= member for member in fam) for bag in (frozenset(b) for b in bags))


def strong_td_to_semismooth(d: StrongTreeDecomposition) -> TreeDecomposition:
    """Interpolate each tree edge of a strong tree decomposition into a
    path of bags morphing one endpoint bag into the other, one vertex at
    a time (all additions first, then removals, in sorted vertex order).

    Every produced bag is contained in the union of the two endpoint
    bags, so a family holding all pairwise bag unions captures the
    result; the output is semi-smooth and a valid tree decomposition of
    any graph the input was valid for.
    """
    bags = [set(b) for b in d.bags]
    edges: list[tuple[int, int]] = []
    for a, b in sorted(d.tree_edges):
        cur = set(d.bags[a])
        prev = a
        steps: list[set[int]] = []
        for v in sorted(d.bags[b]):
            cur = cur | {v}
            steps.append(set(cur))
        for v in sorted(d.bags[a]):
            cur = cur - {v}
            steps.append(set(cur))
        # the last step equals bag b itself; link to the existing node
        for step in steps[:-1]:
            bags.append(step)
            edges.append((prev, len(bags) - 1))
            prev = len(bags) - 1
        edges.append((prev, b))
    return TreeDecomposition(
        bags=tuple(frozenset(b) for b in bags),
        tree_edges=tuple((min(a, b), max(a, b)) for a, b in edges),
    )
