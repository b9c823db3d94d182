"""Tests for root set enumeration and the distance-width solver."""

import random

import pytest

from bagwl.connectivity import disjoint_paths_to_set
from bagwl.decomposition import tdw_of_root
from bagwl.errors import BadParams, NotConnected, Verdict
from bagwl.families import complete, connected_subsets, cycle, kp_path, path
from bagwl.graphs import Graph, relabel
from bagwl.root_enum import (
    RootSetFamily,
    bags_from_roots,
    ctdw_iso,
    enumerate_root_sets,
    saturate_root,
)


def rand_tree(n, seed):
    rng = random.Random(seed)
    return Graph(n, [(v, rng.randrange(v)) for v in range(1, n)])


def rand_connected(n, extra, seed):
    rng = random.Random(seed)
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    while len(edges) < n - 1 + extra:
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add((min(a, b), max(a, b)))
    return Graph(n, sorted(edges))


def shuffled_closure(g, k, seed, order_seed):
    # reference saturation that scans candidates in random order
    rng = random.Random(order_seed)
    s = set(seed)
    while True:
        outside = [v for v in range(g.n) if v not in s]
        rng.shuffle(outside)
        for v in outside:
            if disjoint_paths_to_set(g, v, s) >= 2 * k:
                s.add(v)
                break
        else:
            return frozenset(s)


class TestSaturation:
    def test_complete_graph_floods_from_any_seed(self):
        g = complete(5)
        assert saturate_root(g, 1, frozenset({0})) == frozenset(range(5))

    def test_sparse_graphs_stay_put(self):
        assert saturate_root(cycle(6), 2, frozenset({0})) == frozenset({0})
        assert saturate_root(path(5), 2, frozenset({2})) == frozenset({2})

    def test_scan_order_never_changes_the_closure(self):
        for gseed in range(6):
            g = rand_connected(7, 4, gseed)
            for v in (0, 3):
                for k in (1, 2):
                    want = saturate_root(g, k, frozenset({v}))
                    for oseed in range(4):
                        got = shuffled_closure(g, k, {v}, oseed)
                        assert got == want


class TestEnumerateRootSets:
    def test_single_vertex_graph(self):
        fam = enumerate_root_sets(Graph(1, []), 1)
        assert fam.sets == (frozenset({0}),)
        assert len(fam) == 1

    def test_disconnected_is_refused(self):
        g = Graph(4, [(0, 1)])
        with pytest.raises(NotConnected):
            enumerate_root_sets(g, 2)

    def test_nonpositive_k_is_refused(self):
        with pytest.raises(BadParams):
            enumerate_root_sets(cycle(3), 0)

    def test_c6_all_singletons_work(self):
        c6 = cycle(6)
        fam = enumerate_root_sets(c6, 2)
        got = set(fam.sets)
        for v in range(6):
            assert frozenset({v}) in got
        for s in fam:
            assert tdw_of_root(c6, s) <= 2

    def test_c6_infeasible_at_one(self):
        assert enumerate_root_sets(cycle(6), 1).sets == ()

    def test_branching_discovers_chord_pair(self):
        # C6 with chord 0-3: no single vertex stays within width two,
        # branching over the blamed component neighborhood finds {0, 3}
        g = Graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3)])
        fam = enumerate_root_sets(g, 2)
        assert frozenset({0, 3}) in set(fam.sets)
        for s in fam:
            assert tdw_of_root(g, s) <= 2

    def test_emitted_sets_are_sound(self):
        for seed in range(8):
            g = rand_connected(4 + seed % 4, seed % 3, seed)
            for k in (1, 2, 3):
                for s in enumerate_root_sets(g, k):
                    assert tdw_of_root(g, s) <= k

    def test_completeness_at_desk_scale(self):
        graphs = [
            path(7),
            cycle(7),
            cycle(8),
            complete(5),
            Graph(7, [(0, i) for i in range(1, 7)]),
            kp_path(2, 3).graph,
            rand_tree(8, 1),
            rand_tree(8, 2),
            rand_connected(6, 3, 5),
            rand_connected(7, 3, 6),
            rand_connected(8, 2, 7),
        ]
        for g in graphs:
            for k in (1, 2, 3):
                exists = any(
                    tdw_of_root(g, s) <= k
                    for s in connected_subsets(g, g.n)
                )
                fam = enumerate_root_sets(g, k)
                if exists:
                    assert len(fam) > 0, (g, k)
                for s in fam:
                    assert tdw_of_root(g, s) <= k

    def test_family_is_relabeling_invariant(self):
        cases = [(cycle(6), 2), (path(5), 1), (kp_path(2, 3).graph, 3)]
        rng = random.Random(12)
        for g, k in cases:
            base = set(enumerate_root_sets(g, k).sets)
            for _ in range(100):
                perm = list(range(g.n))
                rng.shuffle(perm)
                h = relabel(g, perm)
                want = {frozenset(perm[v] for v in s) for s in base}
                got = set(enumerate_root_sets(h, k).sets)
                assert got == want

    def test_thick_path_has_roots_at_five(self):
        g = kp_path(3, 10).graph
        fam = enumerate_root_sets(g, 5)
        assert len(fam) > 0
        for s in fam:
            assert tdw_of_root(g, s) <= 5


class TestBagsFromRoots:
    def test_c6_single_root_bags(self):
        roots = RootSetFamily((frozenset({0}),), 2)
        got = bags_from_roots(cycle(6), roots, 2)
        assert got.sets == (
            frozenset({0}),
            frozenset({3}),
            frozenset({1, 5}),
            frozenset({2, 4}),
        )

    def test_star_center_root(self):
        star = Graph(5, [(0, i) for i in range(1, 5)])
        roots = RootSetFamily((frozenset({0}),), 2)
        got = bags_from_roots(star, roots, 2)
        assert got.sets == tuple(frozenset({v}) for v in range(5))

    def test_empty_family_gives_no_bags(self):
        assert len(bags_from_roots(cycle(6), RootSetFamily((), 2), 2)) == 0

    def test_too_wide_decompositions_are_dropped(self):
        roots = RootSetFamily((frozenset({0}),), 1)
        assert len(bags_from_roots(cycle(6), roots, 1)) == 0


class TestCtdwIso:
    def test_accepts_relabeled_path(self):
        g = path(5)
        h = relabel(g, [3, 0, 4, 1, 2])
        assert ctdw_iso(g, h, 2) is Verdict.ACCEPT

    def test_accepts_relabeled_tree(self):
        g = rand_tree(7, 5)
        perm = list(range(7))
        random.Random(41).shuffle(perm)
        assert ctdw_iso(g, relabel(g, perm), 2) is Verdict.ACCEPT

    def test_rejects_cycle_against_path(self):
        assert ctdw_iso(cycle(6), path(6), 2) is Verdict.REJECT

    def test_rejects_different_trees(self):
        g = Graph(7, [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)])
        h = Graph(7, [(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (5, 6)])
        assert ctdw_iso(g, h, 2) is Verdict.REJECT

    def test_one_sided_family_rejects(self):
        tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
        assert ctdw_iso(path(3), tri, 1) is Verdict.REJECT

    def test_both_empty_is_infeasible(self):
        assert ctdw_iso(cycle(6), cycle(6), 1) is Verdict.INFEASIBLE

    def test_disconnected_input_is_refused(self):
        with pytest.raises(NotConnected):
            ctdw_iso(Graph(4, [(0, 1)]), path(4), 2)
