import random
from itertools import combinations

import pytest

from bagwl.connectivity import (
    disjoint_paths_to_set,
    kcon_closure,
    kcon_pairs,
    max_disjoint_paths,
)
from bagwl.errors import BadParams, SameVertex
from bagwl.families import complete, cycle, kp_path, path, random_graph
from bagwl.graphs import build_graph


def _brute_paths(g, u, v):
    # enumerate every simple u-v path by its internal vertex set, then
    # pack a maximum collection of pairwise disjoint ones
    paths = set()

    def walk(x, used):
        for y in g.neighbors(x):
            if y == v:
                paths.add(frozenset(used))
            elif y != u and y not in used:
                walk(y, used | {y})

    walk(u, set())
    uniq = sorted(paths, key=len)
    best = 0

    def pack(i, blocked, count):
        nonlocal best
        best = max(best, count)
        for j in range(i, len(uniq)):
            p = uniq[j]
            if not (p & blocked):
                pack(j + 1, blocked | p, count + 1)

    pack(0, frozenset(), 0)
    return best


def test_k5_every_pair_four():
    g = complete(5)
    for u, v in combinations(range(5), 2):
        assert max_disjoint_paths(g, u, v) == 4


def test_cycle_pairs_two():
    g = cycle(6)
    for u, v in combinations(range(6), 2):
        assert max_disjoint_paths(g, u, v) == 2


def test_path_endpoints_one():
    g = path(5)
    assert max_disjoint_paths(g, 0, 4) == 1
    assert max_disjoint_paths(g, 1, 3) == 1


def test_disconnected_pair_zero():
    g = build_graph(4, [(0, 1), (2, 3)])
    assert max_disjoint_paths(g, 0, 2) == 0


def test_same_vertex_rejected():
    g = cycle(4)
    with pytest.raises(SameVertex):
        max_disjoint_paths(g, 2, 2)


def test_flow_matches_brute_on_random_graphs():
    rng = random.Random(17)
    for _ in range(30):
        n = rng.randint(2, 7)
        g = random_graph(n, rng.randint(0, n * (n - 1) // 2), seed=rng.randint(0, 9999))
        u, v = rng.sample(range(n), 2)
        assert max_disjoint_paths(g, u, v) == _brute_paths(g, u, v)


def test_flow_symmetry():
    rng = random.Random(29)
    for _ in range(20):
        n = rng.randint(2, 9)
        cap = min(2 * n, n * (n - 1) // 2)
        g = random_graph(n, rng.randint(0, cap), seed=rng.randint(0, 9999))
        u, v = rng.sample(range(n), 2)
        assert max_disjoint_paths(g, u, v) == max_disjoint_paths(g, v, u)


def test_paths_to_set_basics():
    g = cycle(6)
    assert disjoint_paths_to_set(g, 0, {3}) == 2
    assert disjoint_paths_to_set(g, 0, {2, 4}) == 2
    assert disjoint_paths_to_set(g, 0, {1}) == 2  # direct edge plus the long way
    with pytest.raises(BadParams):
        disjoint_paths_to_set(g, 0, {0, 3})
    with pytest.raises(BadParams):
        disjoint_paths_to_set(g, 0, set())


def test_paths_to_set_members_are_separate_endpoints():
    star = build_graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert disjoint_paths_to_set(star, 0, {1, 2, 3, 4}) == 4
    # from a leaf every path runs through the center, so one path total
    assert disjoint_paths_to_set(star, 1, {2, 3, 4}) == 1
    assert disjoint_paths_to_set(cycle(4), 0, {1, 3}) == 2
    assert disjoint_paths_to_set(complete(5), 0, {1, 2, 3, 4}) == 4
    # two more paths besides the direct edges: 0-3-1 and 0-4-2
    assert disjoint_paths_to_set(complete(5), 0, {1, 2}) == 4


def test_paths_to_set_never_crosses_a_member():
    # reaching 2 would mean passing through 1, which only ends paths
    assert disjoint_paths_to_set(path(3), 0, {1, 2}) == 1
    assert disjoint_paths_to_set(path(4), 0, {1, 3}) == 1


def test_paths_to_set_monotone_in_the_target():
    rng = random.Random(41)
    for _ in range(40):
        n = rng.randint(3, 7)
        g = random_graph(n, rng.randint(n, n * (n - 1) // 2), seed=rng.randint(0, 9999))
        v = rng.randrange(n)
        rest = [x for x in range(n) if x != v]
        small = rng.sample(rest, rng.randint(1, len(rest) - 1))
        extra = rng.sample([x for x in rest if x not in small], 1)
        assert disjoint_paths_to_set(g, v, set(small) | set(extra)) >= disjoint_paths_to_set(
            g, v, set(small)
        )


def test_paths_to_set_adjacent_blacks():
    # consecutive heavy vertices of a thick path are joined by all bundle paths
    for k, p in [(2, 3), (3, 4), (3, 10)]:
        kp = kp_path(k, p)
        for i in range(k - 1):
            a, b = kp.blacks[i], kp.blacks[i + 1]
            assert disjoint_paths_to_set(kp.graph, a, {b}) == p


def test_kcon_pairs_thresholds():
    g = cycle(6)
    assert len(kcon_pairs(g, 2)) == 15
    assert kcon_pairs(g, 3) == set()
    with pytest.raises(BadParams):
        kcon_pairs(g, 0)


def test_kcon_closure_thick_path():
    kp = kp_path(3, 10)
    part = kcon_closure(kp.graph, 4)
    classes = {frozenset(c) for c in part.classes}
    assert frozenset(kp.blacks) in classes
    for c in classes:
        assert c == frozenset(kp.blacks) or len(c) == 1


def test_kcon_closure_complete():
    part = kcon_closure(complete(5), 4)
    assert len(part.classes) == 1
    part = kcon_closure(complete(5), 5)
    assert part.is_identity()


def test_kcon_closure_transitive_merge():
    # two K4 blocks sharing three vertices: 3-connectivity chains across
    edges = []
    for quad in ([0, 1, 2, 3], [1, 2, 3, 4]):
        for a, b in combinations(quad, 2):
            edges.append((a, b))
    g = build_graph(5, edges)
    part = kcon_closure(g, 3)
    assert len(part.classes) == 1
