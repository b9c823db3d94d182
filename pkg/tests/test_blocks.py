import random

import pytest

from bagwl.blocks import (
    OracleInstance,
    ReductionTrace,
    blocks_relative,
    fold_marked,
    gadget_encode,
    iso_via_blocks,
    stw_to_degree_iso,
)
from bagwl.connectivity import kcon_closure
from bagwl.errors import BadParams, ClassTooLarge, Verdict
from bagwl.families import complete, cycle, kp_path, path, random_graph
from bagwl.graphs import (
    EquivalencePartition,
    Graph,
    TupleColoring,
    build_graph,
    relabel,
)
from bagwl.solvers import brute_block_oracle, brute_force_iso, brute_force_iso_colored

ident = EquivalencePartition.identity


def two_triangles():
    return build_graph(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)])


def test_blocks_of_biconnected_graph():
    bf = blocks_relative(complete(4), ident(4))
    assert [sorted(b) for b in bf.blocks] == [[0, 1, 2, 3]]
    assert bf.cut_classes == ()
    assert bf.tree == ()


def test_blocks_of_two_triangles():
    bf = blocks_relative(two_triangles(), ident(5))
    assert [sorted(b) for b in bf.blocks] == [[0, 1, 2], [0, 3, 4]]
    assert bf.cut_classes == (0,)
    assert bf.tree == ((0, 0), (1, 0))
    assert bf.cut_sets(0) == [frozenset({0})]


def test_blocks_of_path_are_edges():
    bf = blocks_relative(path(4), ident(4))
    assert [sorted(b) for b in bf.blocks] == [[0, 1], [1, 2], [2, 3]]
    assert bf.cut_classes == (1, 2)


def test_isolated_vertices_become_singleton_blocks():
    g = build_graph(4, [(1, 2)])
    bf = blocks_relative(g, ident(4))
    assert [sorted(b) for b in bf.blocks] == [[0], [3], [1, 2]]


def test_blocks_relative_to_closure_on_thick_path():
    g = kp_path(3, 10).graph
    r = kcon_closure(g, 6)
    assert sorted(len(c) for c in r.classes) == [1] * 20 + [3]
    bf = blocks_relative(g, r)
    # one block per white: the three merged blacks plus that white
    assert len(bf.blocks) == 20
    blacks = frozenset({0, 1, 2})
    assert all(blacks < b and len(b) == 4 for b in bf.blocks)
    assert len(bf.cut_classes) == 1
    assert r.classes[bf.cut_classes[0]] == blacks


def test_fold_marked_doubles_and_marks():
    g = path(3)
    r = EquivalencePartition(3, [[0, 2], [1]])
    tc = TupleColoring(r, {(0, (0, 2)): 3})
    inst = OracleInstance(g, r, tc, marked=(2, 0))
    folded = fold_marked(inst)
    assert folded.color_of(0, (0, 2)) == 6
    assert folded.color_of(0, (2, 0)) == 1
    plain = fold_marked(OracleInstance(g, r, tc, marked=None))
    assert plain.color_of(0, (0, 2)) == 6
    assert plain.color_of(0, (2, 0)) == 0


def test_gadget_encode_single_ordering_shape():
    g = build_graph(2, [(0, 1)])
    r = EquivalencePartition(2, [[0, 1]])
    tc = TupleColoring(r, {(0, (0, 1)): 1})
    enc = gadget_encode(g, r, tc, d=5)
    # palette {1}: spine height 2, one pendant leaf, ordering path of 3
    assert enc.n == 2 + 3 + 2 + 1
    assert enc.degree(0) == 2 and enc.degree(1) == 2
    assert enc.m == g.m + 2 + 2 + 1 + 1 + 1


def test_gadget_encode_guards():
    big = EquivalencePartition(8, [range(8)])
    with pytest.raises(ClassTooLarge):
        gadget_encode(Graph(8, ()), big, TupleColoring(big, {}), d=3)
    with pytest.raises(BadParams):
        # K5 vertices already have degree 4
        gadget_encode(complete(5), ident(5), TupleColoring(ident(5), {}), d=3)


def test_gadget_encode_distinguishes_colors():
    g = path(3)
    r = EquivalencePartition(3, [[0, 2], [1]])
    tc1 = TupleColoring(r, {(0, (0, 2)): 1})
    tc2 = TupleColoring(r, {(0, (0, 2)): 2})
    palette = (1, 2)
    e1 = gadget_encode(g, r, tc1, d=4, palette=palette)
    e2 = gadget_encode(g, r, tc2, d=4, palette=palette)
    assert brute_force_iso(e1, e2, cap=30)[0] is Verdict.REJECT


def test_gadget_encode_preserves_and_reflects():
    # encoding two colored graphs with a shared palette must agree
    # with colored brute force on the originals
    rng = random.Random(23)
    for _ in range(20):
        n = rng.randint(2, 5)
        g1 = random_graph(n, rng.randint(1, n * (n - 1) // 2), seed=rng.randint(0, 9999))
        perm = list(range(n))
        rng.shuffle(perm)
        if rng.random() < 0.5:
            g2 = relabel(g1, perm)
        else:
            g2 = random_graph(n, g1.m, seed=rng.randint(0, 9999))
        verts = list(range(n))
        rng.shuffle(verts)
        cut = rng.randint(1, n)
        classes1 = [verts[:cut], verts[cut:]] if cut < n else [verts]
        r1 = EquivalencePartition(n, classes1)
        r2 = EquivalencePartition(
            n, [[perm[v] for v in c] for c in classes1]
        )
        entries1 = {}
        for ci, cls in enumerate(r1.classes):
            if len(cls) <= 3 and rng.random() < 0.7:
                sigma = tuple(rng.sample(sorted(cls), len(cls)))
                entries1[(ci, sigma)] = rng.randint(1, 2)
        tc1 = TupleColoring(r1, entries1)
        entries2 = {}
        for (ci, sigma), col in entries1.items():
            image = tuple(perm[v] for v in sigma)
            entries2[(r2.class_of[image[0]], image)] = col
        tc2 = TupleColoring(r2, entries2)
        want = brute_force_iso_colored(g1, r1, tc1, g2, r2, tc2)
        palette = tuple(sorted(set(entries1.values()) | set(entries2.values())))
        e1 = gadget_encode(g1, r1, tc1, d=n, palette=palette)
        e2 = gadget_encode(g2, r2, tc2, d=n, palette=palette)
        got, _ = brute_force_iso(e1, e2, cap=80)
        assert got == want


def via_brute(g1, g2):
    return iso_via_blocks(
        g1, ident(g1.n), None, g2, ident(g2.n), None, brute_block_oracle
    )


def test_peeling_accepts_shuffled_tree():
    tree = build_graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)])
    assert via_brute(tree, relabel(tree, [3, 0, 5, 1, 6, 2, 4])) is Verdict.ACCEPT


def test_peeling_rejects_spider_against_path():
    spider = build_graph(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)])
    assert via_brute(spider, path(7)) is Verdict.REJECT


def test_peeling_mixed_blocks():
    tri_tail = build_graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])
    assert via_brute(two_triangles(), tri_tail) is Verdict.REJECT
    assert via_brute(two_triangles(), relabel(two_triangles(), [4, 2, 0, 1, 3])) is Verdict.ACCEPT
    cactus = build_graph(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])
    assert via_brute(cactus, relabel(cactus, [5, 3, 1, 0, 2, 4])) is Verdict.ACCEPT


def test_peeling_rejects_cycle_against_two_triangles():
    two_tri = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert via_brute(cycle(6), two_tri) is Verdict.REJECT


def test_peeling_matches_brute_force_on_random_pairs():
    rng = random.Random(11)
    for trial in range(50):
        n = rng.randint(2, 7)
        m = rng.randint(n - 1, min(n + 2, n * (n - 1) // 2))
        a = random_graph(n, m, seed=rng.randint(0, 10**6))
        if trial % 2 == 0:
            perm = list(range(n))
            rng.shuffle(perm)
            b = relabel(a, perm)
        else:
            b = random_graph(n, m, seed=rng.randint(0, 10**6))
        want = brute_force_iso(a, b)[0]
        assert via_brute(a, b) == want, (a.edges, b.edges)


def test_peeling_respects_ordering_colors():
    g = path(4)
    r = EquivalencePartition(4, [[0, 3], [1], [2]])
    tc1 = TupleColoring(r, {(0, (0, 3)): 1})
    tc2 = TupleColoring(r, {(0, (3, 0)): 1})
    tc3 = TupleColoring(r, {(0, (0, 3)): 2})
    # the mirror map sends the ordering (0, 3) onto (3, 0)
    assert iso_via_blocks(g, r, tc1, g, r, tc2, brute_block_oracle) is Verdict.ACCEPT
    assert iso_via_blocks(g, r, tc1, g, r, tc3, brute_block_oracle) is Verdict.REJECT


def test_peeling_records_a_trace():
    tree = build_graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)])
    trace = ReductionTrace()
    v = iso_via_blocks(
        tree, ident(7), None, tree, ident(7), None, brute_block_oracle, trace
    )
    assert v is Verdict.ACCEPT
    assert trace.calls
    rows = trace.rows()
    assert all(set(r) == {"round", "block_sizes", "max_degree", "verdict"} for r in rows)
    assert any(r["verdict"] for r in rows)


def degree_oracle(a, b):
    return brute_force_iso(a, b, cap=200)[0] is Verdict.ACCEPT


def test_degree_reduction_accepts_relabeled_thick_path():
    g1 = kp_path(3, 4).graph
    perm = list(range(g1.n))
    random.Random(5).shuffle(perm)
    trace = ReductionTrace()
    v = stw_to_degree_iso(g1, relabel(g1, perm), 3, degree_oracle, trace)
    assert v is Verdict.ACCEPT
    bound = 2 * 9 * 2 + 2
    assert all(c.max_degree <= bound for c in trace.calls)


def test_degree_reduction_on_cycles():
    assert stw_to_degree_iso(
        cycle(6), relabel(cycle(6), [3, 1, 5, 0, 2, 4]), 2, degree_oracle
    ) is Verdict.ACCEPT
    two_tri = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert stw_to_degree_iso(cycle(6), two_tri, 2, degree_oracle) is Verdict.REJECT


def test_degree_reduction_reports_infeasible_parameters():
    # threshold 2 merges all of K4 into one class of size 4
    assert stw_to_degree_iso(complete(4), complete(4), 1, degree_oracle) is Verdict.INFEASIBLE
    # threshold 4 merges the three blacks, and 3 > k = 2
    g = kp_path(3, 4).graph
    assert stw_to_degree_iso(g, g, 2, degree_oracle) is Verdict.INFEASIBLE


def test_degree_reduction_rejects_different_trees():
    spider = build_graph(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)])
    assert stw_to_degree_iso(spider, path(7), 2, degree_oracle) is Verdict.REJECT
