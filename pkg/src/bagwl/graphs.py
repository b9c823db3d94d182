"""Core graph types: simple graphs, vertex partitions, ordering colors.

All types are immutable once built.  Vertices are 0-based ints; the
1-based convention of the on-disk formats is confined to formats.py.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .errors import (
    DuplicateClassMember,
    InvalidPartition,
    OutOfRange,
    PermutationMismatch,
    SelfLoop,
)


def _check_vertex(v: int, n: int) -> None:
    if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
        raise OutOfRange(f"vertex {v!r} not in 0..{n - 1}")


class Graph:
    """Undirected simple graph on vertices 0..n-1.

    Adjacency is kept both as sorted tuples (stable iteration) and as
    frozensets (membership tests); neither is part of the public
    constructor contract, use neighbors()/has_edge().
    """

    __slots__ = ("n", "edges", "_nbr", "_nbr_set")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise OutOfRange(f"vertex count {n} is negative")
        seen: set[tuple[int, int]] = set()
        for u, v in edges:
            _check_vertex(u, n)
            _check_vertex(v, n)
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}")
            seen.add((u, v) if u < v else (v, u))
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        nbr: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            nbr[u].append(v)
            nbr[v].append(u)
        self._nbr = tuple(tuple(sorted(a)) for a in nbr)
        self._nbr_set = tuple(frozenset(a) for a in nbr)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        _check_vertex(v, self.n)
        return self._nbr[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        _check_vertex(u, self.n)
        _check_vertex(v, self.n)
        return v in self._nbr_set[u]

    def vertices(self) -> range:
        return range(self.n)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def build_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Construct a deduplicated simple graph, validating every endpoint."""
    return Graph(n, edges)


def relabel(g: Graph, perm: Mapping[int, int] | list[int]) -> Graph:
    """Image of g under the vertex permutation perm (old id -> new id)."""
    if isinstance(perm, Mapping):
        lookup = dict(perm)
    else:
        lookup = {i: p for i, p in enumerate(perm)}
    if sorted(lookup) != list(range(g.n)) or sorted(lookup.values()) != list(range(g.n)):
        raise PermutationMismatch(f"not a permutation of 0..{g.n - 1}")
    return Graph(g.n, [(lookup[u], lookup[v]) for u, v in g.edges])


class EquivalencePartition:
    """Partition of 0..n-1 into classes, canonically ordered by minimum."""

    __slots__ = ("n", "classes", "class_of")

    def __init__(self, n: int, classes: Iterable[Iterable[int]]):
        cls = [frozenset(c) for c in classes]
        for c in cls:
            if not c:
                raise InvalidPartition("empty class")
            for v in c:
                _check_vertex(v, n)
        covered: set[int] = set()
        for c in cls:
            if covered & c:
                raise InvalidPartition("classes overlap")
            covered |= c
        if covered != set(range(n)):
            raise InvalidPartition("classes do not cover the vertex set")
        self.n = n
        self.classes: tuple[frozenset[int], ...] = tuple(
            sorted(cls, key=min)
        )
        class_of = [0] * n
        for i, c in enumerate(self.classes):
            for v in c:
                class_of[v] = i
        self.class_of: tuple[int, ...] = tuple(class_of)

    @classmethod
    def identity(cls, n: int) -> EquivalencePartition:
        return cls(n, [[v] for v in range(n)])

    def is_identity(self) -> bool:
        return all(len(c) == 1 for c in self.classes)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, EquivalencePartition)
            and self.n == other.n
            and self.classes == other.classes
        )

    def __hash__(self) -> int:
        return hash((self.n, self.classes))

    def __repr__(self) -> str:
        return f"EquivalencePartition(n={self.n}, classes={len(self.classes)})"


class TupleColoring:
    """Colors attached to linear orderings of equivalence classes.

    Keys are (class index, ordering) where the ordering is a permutation
    of that class.  Color 0 is reserved for "uncolored" and never stored;
    color_of() returns it for absent keys.
    """

    __slots__ = ("partition", "entries")

    def __init__(
        self,
        partition: EquivalencePartition,
        entries: Mapping[tuple[int, tuple[int, ...]], int] | None = None,
    ):
        checked: dict[tuple[int, tuple[int, ...]], int] = {}
        for (ci, order), color in (entries or {}).items():
            if not 0 <= ci < len(partition.classes):
                raise PermutationMismatch(f"no class with index {ci}")
            order = tuple(order)
            if sorted(order) != sorted(partition.classes[ci]):
                raise PermutationMismatch(
                    f"{order} is not an ordering of class {ci}"
                )
            if not isinstance(color, int) or color < 0:
                raise PermutationMismatch(f"bad color {color!r}")
            if color == 0:
                continue
            checked[(ci, order)] = color
        self.partition = partition
        self.entries: dict[tuple[int, tuple[int, ...]], int] = checked

    def color_of(self, class_index: int, order: tuple[int, ...]) -> int:
        return self.entries.get((class_index, tuple(order)), 0)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TupleColoring)
            and self.partition == other.partition
            and self.entries == other.entries
        )

    def __repr__(self) -> str:
        return f"TupleColoring(entries={len(self.entries)})"


@dataclass(frozen=True)
class QuotientGraph:
    """Graph on class indices; classes are adjacent iff some edge crosses."""

    graph: Graph
    partition: EquivalencePartition

    def project(self, v: int) -> int:
        return self.partition.class_of[v]

    def lift(self, class_index: int) -> frozenset[int]:
        return self.partition.classes[class_index]


def quotient_graph(g: Graph, r: EquivalencePartition) -> QuotientGraph:
    """Collapse each class of r to one vertex; drop inner edges and loops."""
    if r.n != g.n:
        raise InvalidPartition(
            f"partition on {r.n} vertices does not match graph on {g.n}"
        )
    edges = set()
    for u, v in g.edges:
        cu, cv = r.class_of[u], r.class_of[v]
        if cu != cv:
            edges.add((min(cu, cv), max(cu, cv)))
    return QuotientGraph(Graph(len(r.classes), edges), r)


def connected_components(g: Graph) -> list[list[int]]:
    """Vertex sets of the components, each sorted, ordered by minimum."""
    seen = [False] * g.n
    out: list[list[int]] = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    stack.append(w)
        out.append(sorted(comp))
    return out


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def neighborhood_of_set(g: Graph, s: Iterable[int]) -> set[int]:
    """Vertices outside s adjacent to at least one member of s."""
    s = set(s)
    for v in s:
        _check_vertex(v, g.n)
    out: set[int] = set()
    for v in s:
        out.update(g.neighbors(v))
    return out - s


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, list[int]]:
    """Subgraph induced by s plus the new-index -> old-vertex map."""
    order = sorted(set(s))
    for v in order:
        _check_vertex(v, g.n)
    idx = {v: i for i, v in enumerate(order)}
    edges = [
        (idx[u], idx[v])
        for u, v in g.edges
        if u in idx and v in idx
    ]
    return Graph(len(order), edges), order


def restrict_partition(
    r: EquivalencePartition, order: list[int]
) -> EquivalencePartition:
    """Restriction of r to the vertices in order, relabeled by position.

    Only valid when every class of r is either fully inside or fully
    outside the vertex set; callers that slice along class boundaries
    (quotient blocks) satisfy this by construction.
    """
    idx = {v: i for i, v in enumerate(order)}
    keep = set(order)
    classes = []
    for c in r.classes:
        inside = c & keep
        if not inside:
            continue
        if inside != c:
            raise InvalidPartition("vertex set cuts through a class")
        classes.append([idx[v] for v in c])
    return EquivalencePartition(len(order), classes)


def bfs_distances(g: Graph, sources: Iterable[int]) -> list[int]:
    """Distance from the source set to every vertex; -1 if unreachable."""
    dist = [-1] * g.n
    queue: list[int] = []
    for s in set(sources):
        _check_vertex(s, g.n)
        dist[s] = 0
        queue.append(s)
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        for w in g.neighbors(u):
            if dist[w] == -1:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist
