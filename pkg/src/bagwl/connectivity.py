"""Internally vertex-disjoint path counts and the derived equivalence.

Counts are exact, computed as unit-capacity max-flow on the
vertex-split graph.  A direct edge between the two endpoints counts as
one path.  The relation "at least t internally disjoint paths" taken
over all pairs, transitively closed, yields the partition used by the
block-reduction pipeline.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .errors import BadParams, OutOfRange, SameVertex
from .graphs import EquivalencePartition, Graph


class _Dinic:
    def __init__(self, nodes: int):
        self.head: list[list[int]] = [[] for _ in range(nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, a: int, b: int, c: int) -> None:
        self.head[a].append(len(self.to))
        self.to.append(b)
        self.cap.append(c)
        self.head[b].append(len(self.to))
        self.to.append(a)
        self.cap.append(0)

    def max_flow(self, s: int, t: int, limit: int | None = None) -> int:
        flow = 0
        bound = 10**18 if limit is None else limit
        while flow < bound:
            level = [-1] * len(self.head)
            level[s] = 0
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for e in self.head[x]:
                    if self.cap[e] > 0 and level[self.to[e]] == -1:
                        level[self.to[e]] = level[x] + 1
                        queue.append(self.to[e])
            if level[t] == -1:
                break
            it = [0] * len(self.head)

            def dfs(x: int, pushed: int) -> int:
                if x == t:
                    return pushed
                while it[x] < len(self.head[x]):
                    e = self.head[x][it[x]]
                    y = self.to[e]
                    if self.cap[e] > 0 and level[y] == level[x] + 1:
                        got = dfs(y, min(pushed, self.cap[e]))
                        if got:
                            self.cap[e] -= got
                            self.cap[e ^ 1] += got
                            return got
                    it[x] += 1
                return 0

            while flow < bound:
                got = dfs(s, int(bound - flow))
                if not got:
                    break
                flow += got
        return flow


def max_disjoint_paths(g: Graph, u: int, v: int) -> int:
    """Maximum number of internally vertex-disjoint u-v paths."""
    if u == v:
        raise SameVertex(f"both endpoints are {u}")
    for x in (u, v):
        if not 0 <= x < g.n:
            raise OutOfRange(f"vertex {x} not in 0..{g.n - 1}")
    # split x into in=2x, out=2x+1; source u_out, sink v_in
    net = _Dinic(2 * g.n)
    for x in range(g.n):
        if x != u and x != v:
            net.add(2 * x, 2 * x + 1, 1)
    for a, b in g.edges:
        net.add(2 * a + 1, 2 * b, 1)
        net.add(2 * b + 1, 2 * a, 1)
    return net.max_flow(2 * u + 1, 2 * v)


def disjoint_paths_to_set(g: Graph, v: int, s: Iterable[int]) -> int:
    """Internally vertex-disjoint paths from v into the set s.

    Each path ends at the first member of s it reaches, and outside s
    the paths share no vertex besides v; shared endpoints are fine, so
    for a single-member set the count equals max_disjoint_paths.  In
    K5, vertex 4 has four paths into {0, 1, 2, 3}.  Counted as
    unit-capacity max-flow into a super-sink behind s; the count never
    decreases when s grows, so repeated single-vertex additions
    commute."""
    s = set(s)
    if not s:
        raise BadParams("target set is empty")
    if v in s:
        raise BadParams(f"vertex {v} is inside the target set")
    if not 0 <= v < g.n:
        raise OutOfRange(f"vertex {v} not in 0..{g.n - 1}")
    for x in s:
        if not 0 <= x < g.n:
            raise OutOfRange(f"vertex {x} not in 0..{g.n - 1}")
    # split x into in=2x, out=2x+1; members of s feed the sink straight
    # from their in-node, so no path continues past a member; several
    # paths may end at the same member, hence the uncapped sink arc
    sink = 2 * g.n
    net = _Dinic(2 * g.n + 1)
    for x in range(g.n):
        if x != v and x not in s:
            net.add(2 * x, 2 * x + 1, 1)
    for x in s:
        net.add(2 * x, sink, g.n)
    for a, b in g.edges:
        if a in s and b in s:
            continue
        if a not in s:
            net.add(2 * a + 1, 2 * b, 1)
        if b not in s:
            net.add(2 * b + 1, 2 * a, 1)
    return net.max_flow(2 * v + 1, sink)


def kcon_pairs(g: Graph, threshold: int) -> set[tuple[int, int]]:
    """All unordered pairs joined by at least `threshold` internally
    vertex-disjoint paths."""
    if threshold < 1:
        raise BadParams(f"threshold must be >= 1, got {threshold}")
    out: set[tuple[int, int]] = set()
    for u in range(g.n):
        if g.degree(u) < threshold:
            continue  # path count never exceeds the smaller degree
        for v in range(u + 1, g.n):
            if g.degree(v) < threshold:
                continue
            if max_disjoint_paths(g, u, v) >= threshold:
                out.add((u, v))
    return out


def kcon_closure(g: Graph, threshold: int) -> EquivalencePartition:
    """Transitive closure of kcon_pairs as an equivalence partition;
    vertices in no pair are singleton classes.  Never merges across
    connected components (zero paths)."""
    parent = list(range(g.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in kcon_pairs(g, threshold):
        parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(find(v), []).append(v)
    return EquivalencePartition(g.n, list(groups.values()))
