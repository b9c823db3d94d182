"""Text formats: the `.gi` graph format, bag-family files, and
decomposition dumps.

All three formats are 1-indexed on disk and 0-based in memory.  Parsers
are strict: anything unrecognized raises ParseError with the offending
line number instead of being skipped.

`.gi` format::

    c free-form comment
    p gi <n> <m>
    e <u> <v>            one line per edge, m lines total
    q <v...>             one equivalence class (omitted vertices are
                         singleton classes); optional
    t <q-index> <v...> <color>
                         color for one ordering of the class declared
                         by the <q-index>-th q line (1-based); optional

Bag-family format: one bag per line as space-separated vertices;
`#` starts a comment.

Decomposition dump: `b <id> <v...>` per bag, `d <id> <id>` per tree
edge, optional `r <id>` root line; `#` comments allowed.
"""

from __future__ import annotations

from .decomposition import StrongTreeDecomposition, TreeDistanceDecomposition
from .errors import (
    DuplicateClassMember,
    ParseError,
    PermutationMismatch,
)
from .graphs import EquivalencePartition, Graph, TupleColoring


def _ints(tokens: list[str], line_no: int) -> list[int]:
    out = []
    for tok in tokens:
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(line_no, f"expected integer, got {tok!r}") from None
    return out


def parse_graph(
    text: str,
) -> tuple[Graph, EquivalencePartition | None, TupleColoring | None]:
    """Parse a `.gi` document.

    Returns the graph plus the declared partition and tuple-coloring,
    either of which is None when the document declares no q/t lines.

    Raises ParseError (with line number) on malformed structure,
    DuplicateClassMember when a vertex appears in two class lines, and
    PermutationMismatch when a t line does not spell a permutation of
    its class.
    """
    n = m = -1
    edges: list[tuple[int, int]] = []
    q_lines: list[tuple[int, list[int]]] = []
    t_lines: list[tuple[int, list[int]]] = []
    claimed: dict[int, int] = {}

    line_no = 0
    for raw in text.splitlines():
        line_no += 1
        line = raw.strip()
        if not line or line.startswith("c ") or line == "c":
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "p":
            if n != -1:
                raise ParseError(line_no, "duplicate header")
            if len(tokens) != 4 or tokens[1] != "gi":
                raise ParseError(line_no, "header must be 'p gi <n> <m>'")
            n, m = _ints(tokens[2:], line_no)
            if n < 0 or m < 0:
                raise ParseError(line_no, "negative count in header")
            continue
        if n == -1:
            raise ParseError(line_no, "missing 'p gi' header")
        if kind == "e":
            if len(tokens) != 3:
                raise ParseError(line_no, "edge line must be 'e <u> <v>'")
            u, v = _ints(tokens[1:], line_no)
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(line_no, f"edge endpoint out of range 1..{n}")
            if u == v:
                raise ParseError(line_no, f"self-loop at vertex {u}")
            edges.append((u - 1, v - 1))
        elif kind == "q":
            if len(tokens) < 2:
                raise ParseError(line_no, "empty class line")
            vs = _ints(tokens[1:], line_no)
            for v in vs:
                if not 1 <= v <= n:
                    raise ParseError(line_no, f"class vertex out of range 1..{n}")
                if v in claimed:
                    raise DuplicateClassMember(
                        f"vertex {v} in class lines {claimed[v]} and {line_no}"
                    )
                claimed[v] = line_no
            q_lines.append((line_no, [v - 1 for v in vs]))
        elif kind == "t":
            if len(tokens) < 4:
                raise ParseError(
                    line_no, "tuple-color line must be 't <class> <v...> <color>'"
                )
            t_lines.append((line_no, _ints(tokens[1:], line_no)))
        else:
            raise ParseError(line_no, f"unknown line type {kind!r}")

    if n == -1:
        raise ParseError(line_no, "missing 'p gi' header")
    if len(edges) != m:
        raise ParseError(line_no, f"header says {m} edges, found {len(edges)}")
    graph = Graph(n, edges)

    partition: EquivalencePartition | None = None
    coloring: TupleColoring | None = None
    if q_lines:
        classes = [vs for _, vs in q_lines]
        rest = set(range(n)) - {v for vs in classes for v in vs}
        partition = EquivalencePartition(n, classes + [[v] for v in sorted(rest)])
    if t_lines:
        if partition is None:
            raise ParseError(t_lines[0][0], "tuple color without any class line")
        entries: dict[tuple[int, tuple[int, ...]], int] = {}
        for line_no, vals in t_lines:
            q_index, *mid = vals
            if not 1 <= q_index <= len(q_lines):
                raise ParseError(line_no, f"no class line numbered {q_index}")
            perm, color = mid[:-1], mid[-1]
            if color == 0:
                raise ParseError(line_no, "color 0 is reserved for uncolored")
            if color < 0:
                raise ParseError(line_no, f"negative color {color}")
            for v in perm:
                if not 1 <= v <= n:
                    raise ParseError(line_no, f"vertex out of range 1..{n}")
            declared = q_lines[q_index - 1][1]
            order = tuple(v - 1 for v in perm)
            if sorted(order) != sorted(declared):
                raise PermutationMismatch(
                    f"line {line_no}: {list(perm)} is not an ordering of "
                    f"class line {q_index}"
                )
            class_index = partition.class_of[declared[0]]
            if (class_index, order) in entries:
                raise ParseError(line_no, "duplicate tuple-color entry")
            entries[(class_index, order)] = color
        coloring = TupleColoring(partition, entries)
    return graph, partition, coloring


def serialize_graph(
    g: Graph,
    partition: EquivalencePartition | None = None,
    coloring: TupleColoring | None = None,
) -> str:
    """Render a `.gi` document; inverse of parse_graph.

    When a partition is given, every class (singletons included) gets a
    q line in canonical order, so t-line indices coincide with class
    indices and serialize/parse round-trips are exact.
    """
    lines = [f"p gi {g.n} {g.m}"]
    for u, v in g.edges:
        lines.append(f"e {u + 1} {v + 1}")
    if partition is not None:
        for cls in partition.classes:
            lines.append("q " + " ".join(str(v + 1) for v in sorted(cls)))
        if coloring is not None:
            for (ci, order), color in sorted(coloring.entries.items()):
                mid = " ".join(str(v + 1) for v in order)
                lines.append(f"t {ci + 1} {mid} {color}")
    elif coloring is not None:
        raise ValueError("coloring requires its partition to be serialized")
    return "\n".join(lines) + "\n"


def parse_bag_family(text: str, n: int) -> tuple[frozenset[int], ...]:
    """Parse a bag-family file over a graph with n vertices.

    Returns the deduplicated family in canonical order (by size, then
    sorted members).
    """
    bags: set[frozenset[int]] = set()
    line_no = 0
    for raw in text.splitlines():
        line_no += 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        vs = _ints(line.split(), line_no)
        seen: set[int] = set()
        for v in vs:
            if not 1 <= v <= n:
                raise ParseError(line_no, f"bag vertex out of range 1..{n}")
            if v in seen:
                raise ParseError(line_no, f"vertex {v} repeated in bag")
            seen.add(v)
        bags.add(frozenset(v - 1 for v in vs))
    return tuple(sorted(bags, key=lambda b: (len(b), sorted(b))))


def serialize_bag_family(sets) -> str:
    """One bag per line, sorted canonically; inverse of parse_bag_family."""
    fam = sorted({frozenset(b) for b in sets}, key=lambda b: (len(b), sorted(b)))
    return "\n".join(" ".join(str(v + 1) for v in sorted(b)) for b in fam) + "\n"


def parse_decomposition(text: str) -> StrongTreeDecomposition:
    """Parse a decomposition dump.

    Returns a TreeDistanceDecomposition when an `r` line is present,
    otherwise a StrongTreeDecomposition.  Bag ids on disk may be any
    distinct positive integers; they are renumbered densely by
    ascending id.  Structural validity against a graph is the job of
    the validate_* functions, not the parser.
    """
    raw_bags: dict[int, list[int]] = {}
    raw_edges: list[tuple[int, int, int]] = []
    root_id: int | None = None
    line_no = 0
    for raw in text.splitlines():
        line_no += 1
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        kind = tokens[0]
        if kind == "b":
            if len(tokens) < 3:
                raise ParseError(line_no, "bag line must be 'b <id> <v...>'")
            vals = _ints(tokens[1:], line_no)
            bag_id, vs = vals[0], vals[1:]
            if bag_id in raw_bags:
                raise ParseError(line_no, f"duplicate bag id {bag_id}")
            if any(v < 1 for v in vs):
                raise ParseError(line_no, "vertices are 1-indexed")
            raw_bags[bag_id] = [v - 1 for v in vs]
        elif kind == "d":
            if len(tokens) != 3:
                raise ParseError(line_no, "tree edge must be 'd <id> <id>'")
            a, b = _ints(tokens[1:], line_no)
            raw_edges.append((line_no, a, b))
        elif kind == "r":
            if len(tokens) != 2:
                raise ParseError(line_no, "root line must be 'r <id>'")
            if root_id is not None:
                raise ParseError(line_no, "duplicate root line")
            root_id = _ints(tokens[1:], line_no)[0]
        else:
            raise ParseError(line_no, f"unknown line type {kind!r}")
    if not raw_bags:
        raise ParseError(line_no, "no bags declared")
    index = {bag_id: i for i, bag_id in enumerate(sorted(raw_bags))}
    bags = tuple(
        frozenset(raw_bags[bag_id]) for bag_id in sorted(raw_bags)
    )
    edges = []
    for line_no, a, b in raw_edges:
        if a not in index or b not in index:
            raise ParseError(line_no, f"tree edge references unknown bag")
        edges.append((min(index[a], index[b]), max(index[a], index[b])))
    if root_id is not None:
        if root_id not in index:
            raise ParseError(line_no, f"root references unknown bag {root_id}")
        return TreeDistanceDecomposition(
            bags=bags, tree_edges=tuple(sorted(edges)), root=index[root_id]
        )
    return StrongTreeDecomposition(bags=bags, tree_edges=tuple(sorted(edges)))


def serialize_decomposition(d: StrongTreeDecomposition) -> str:
    """Render a decomposition dump; inverse of parse_decomposition."""
    lines = []
    for i, bag in enumerate(d.bags):
        lines.append(f"b {i + 1} " + " ".join(str(v + 1) for v in sorted(bag)))
    for a, b in sorted(d.tree_edges):
        lines.append(f"d {a + 1} {b + 1}")
    if isinstance(d, TreeDistanceDecomposition):
        lines.append(f"r {d.root + 1}")
    return "\n".join(lines) + "\n"
