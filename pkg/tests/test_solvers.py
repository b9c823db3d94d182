import random

import pytest

from bagwl.errors import FamilyTooLarge, TooLarge, Verdict
from bagwl.families import complete, cycle, kp_path, path, random_graph
from bagwl.graphs import (
    EquivalencePartition,
    TupleColoring,
    build_graph,
    relabel,
)
from bagwl.solvers import (
    brute_force_iso,
    brute_force_iso_colored,
    capture_bags_connected_quotient,
    capture_bags_geodesic,
    chordality,
    cstw_iso,
    geodesic_cycle_length,
    geodesic_stw_iso,
    iso_with_supplied_bags,
)

ident = EquivalencePartition.identity


def two_c3():
    return build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])


def test_brute_force_accepts_with_valid_witness():
    g = cycle(6)
    h = relabel(g, [2, 4, 0, 5, 1, 3])
    verdict, witness = brute_force_iso(g, h)
    assert verdict is Verdict.ACCEPT
    assert sorted(witness) == list(range(6))
    for a, b in g.edges:
        assert h.has_edge(witness[a], witness[b])


def test_brute_force_rejects():
    assert brute_force_iso(cycle(6), two_c3()) == (Verdict.REJECT, None)
    assert brute_force_iso(cycle(3), path(3)) == (Verdict.REJECT, None)
    spider = build_graph(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)])
    assert brute_force_iso(spider, path(7))[0] is Verdict.REJECT


def test_brute_force_cap():
    with pytest.raises(TooLarge):
        brute_force_iso(cycle(11), cycle(11))
    assert brute_force_iso(cycle(11), cycle(11), cap=11)[0] is Verdict.ACCEPT


def test_colored_brute_force_mirror():
    g = path(3)
    r = EquivalencePartition(3, [[0, 2], [1]])
    tc_fwd = TupleColoring(r, {(0, (0, 2)): 1})
    tc_rev = TupleColoring(r, {(0, (2, 0)): 1})
    tc_other = TupleColoring(r, {(0, (0, 2)): 2})
    assert brute_force_iso_colored(g, r, tc_fwd, g, r, tc_rev) is Verdict.ACCEPT
    assert brute_force_iso_colored(g, r, tc_fwd, g, r, tc_other) is Verdict.REJECT


def test_colored_brute_force_checks_classes():
    g = path(3)
    r1 = EquivalencePartition(3, [[0, 2], [1]])
    r2 = EquivalencePartition(3, [[0, 1], [2]])
    r3 = EquivalencePartition(3, [[0], [1], [2]])
    assert brute_force_iso_colored(g, r1, None, g, r3, None) is Verdict.REJECT
    # {0,1} puts adjacent vertices together, {0,2} does not
    assert brute_force_iso_colored(g, r1, None, g, r2, None) is Verdict.REJECT
    assert brute_force_iso_colored(g, r1, None, g, r1, None) is Verdict.ACCEPT


def test_colored_brute_force_respects_marked_positions():
    g = build_graph(2, [(0, 1)])
    r = EquivalencePartition(2, [[0, 1]])
    swap = TupleColoring(r, {(0, (0, 1)): 1})
    same = TupleColoring(r, {(0, (1, 0)): 1})
    assert brute_force_iso_colored(g, r, swap, g, r, same) is Verdict.ACCEPT
    both = TupleColoring(r, {(0, (0, 1)): 1, (0, (1, 0)): 2})
    rev = TupleColoring(r, {(0, (0, 1)): 2, (0, (1, 0)): 1})
    assert brute_force_iso_colored(g, r, both, g, r, rev) is Verdict.ACCEPT
    clash = TupleColoring(r, {(0, (0, 1)): 1, (0, (1, 0)): 1})
    assert brute_force_iso_colored(g, r, both, g, r, clash) is Verdict.REJECT


def test_capture_family_on_p3():
    f = capture_bags_connected_quotient(path(3), 2)
    assert sorted(tuple(sorted(s)) for s in f) == [
        (0,),
        (0, 1),
        (1,),
        (1, 2),
        (2,),
    ]


def test_capture_family_on_c6():
    f = capture_bags_connected_quotient(cycle(6), 2)
    assert len(f) == 12
    assert f.width == 2


def test_capture_family_crosses_merged_classes():
    # threshold 4 merges the two blacks of the (2,4)-path
    g = kp_path(2, 4).graph
    f = capture_bags_connected_quotient(g, 2)
    sets = {tuple(sorted(s)) for s in f}
    assert (0, 1) in sets
    assert len(sets) == 15


def test_capture_family_cap():
    with pytest.raises(FamilyTooLarge):
        capture_bags_connected_quotient(cycle(6), 2, cap=5)


def test_capture_family_is_invariant_under_relabeling():
    rng = random.Random(17)
    g = build_graph(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6)])
    base = {tuple(sorted(s)) for s in capture_bags_connected_quotient(g, 2)}
    for _ in range(10):
        perm = list(range(7))
        rng.shuffle(perm)
        h = relabel(g, perm)
        image = {
            tuple(sorted(perm[v] for v in s))
            for s in capture_bags_connected_quotient(g, 2)
        }
        fresh = {tuple(sorted(s)) for s in capture_bags_connected_quotient(h, 2)}
        assert fresh == image
        assert {tuple(sorted(s)) for s in capture_bags_connected_quotient(g, 2)} == base


def test_geodesic_family_on_p4():
    near = capture_bags_geodesic(path(4), 2, 1)
    assert sorted(tuple(sorted(s)) for s in near) == [
        (0,),
        (0, 1),
        (1,),
        (1, 2),
        (2,),
        (2, 3),
        (3,),
    ]
    far = capture_bags_geodesic(path(4), 2, 3)
    # every pair sits within distance three on P4
    assert len(far) == 10


def test_geodesic_family_links_equivalent_vertices():
    g = kp_path(2, 4).graph
    f = capture_bags_geodesic(g, 2, 1)
    # the blacks sit at distance 2 but share a class
    assert frozenset({0, 1}) in set(f)


def test_cstw_iso_on_trees_and_cycles():
    tree = build_graph(9, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6), (6, 7), (6, 8)])
    assert cstw_iso(tree, relabel(tree, [4, 7, 1, 0, 8, 2, 5, 3, 6]), 2) is Verdict.ACCEPT
    assert cstw_iso(cycle(5), relabel(cycle(5), [3, 0, 2, 4, 1]), 2) is Verdict.ACCEPT
    tadpole = build_graph(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6)])
    assert cstw_iso(tadpole, relabel(tadpole, [6, 4, 2, 0, 5, 1, 3]), 2) is Verdict.ACCEPT
    assert cstw_iso(tadpole, path(7), 2) is Verdict.REJECT
    assert cstw_iso(cycle(6), two_c3(), 2) is Verdict.REJECT


def test_cstw_iso_on_merged_classes():
    g = kp_path(2, 4).graph
    perm = [5, 3, 0, 4, 1, 2]
    assert cstw_iso(g, relabel(g, perm), 2) is Verdict.ACCEPT
    # same degree sequence, different wiring: swap one white over
    other = build_graph(6, [(0, 2), (1, 2), (0, 3), (1, 3), (0, 4), (1, 4), (0, 5), (2, 5)])
    assert cstw_iso(g, other, 2) is Verdict.REJECT


def test_cstw_iso_infeasible_when_classes_outgrow_k():
    g = kp_path(3, 4).graph
    assert cstw_iso(g, g, 2) is Verdict.INFEASIBLE


def test_geodesic_iso_small():
    tree = build_graph(9, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6), (6, 7), (6, 8)])
    assert geodesic_stw_iso(tree, relabel(tree, [4, 7, 1, 0, 8, 2, 5, 3, 6]), 2, 2) is Verdict.ACCEPT
    assert geodesic_stw_iso(cycle(5), relabel(cycle(5), [2, 0, 3, 1, 4]), 2, 5) is Verdict.ACCEPT
    tadpole = build_graph(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6)])
    assert geodesic_stw_iso(tadpole, path(7), 2, 2) is Verdict.REJECT
    assert geodesic_stw_iso(cycle(6), two_c3(), 2, 6) is Verdict.REJECT


def test_geodesic_cycle_length_frozen_values():
    assert geodesic_cycle_length(cycle(6)) == 6
    assert geodesic_cycle_length(complete(4)) == 3
    assert geodesic_cycle_length(path(5)) == 0
    chorded = build_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    assert geodesic_cycle_length(chorded) == 4


def test_chordality_frozen_values():
    assert chordality(cycle(6)) == 6
    assert chordality(complete(4)) == 3
    assert chordality(path(5)) == 0
    chorded = build_graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    assert chordality(chorded) == 4


def test_supplied_bags_on_trees():
    tree = build_graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6)])
    singletons = [frozenset({v}) for v in range(7)]
    shuffled = relabel(tree, [3, 0, 5, 1, 6, 2, 4])
    assert iso_with_supplied_bags(tree, singletons, shuffled, singletons) is Verdict.ACCEPT
    spider = build_graph(7, [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6)])
    assert iso_with_supplied_bags(spider, singletons, path(7), singletons) is Verdict.REJECT


def test_supplied_bags_distinguish_cycle_from_triangles():
    bags = [frozenset({v}) for v in range(6)]
    bags += [frozenset(e) for e in cycle(6).edges]
    bags2 = [frozenset({v}) for v in range(6)]
    bags2 += [frozenset(e) for e in two_c3().edges]
    assert iso_with_supplied_bags(cycle(6), bags, two_c3(), bags2) is Verdict.REJECT


def test_supplied_bags_edge_cases():
    g = path(3)
    assert iso_with_supplied_bags(g, [], g, []) is Verdict.REJECT
    assert iso_with_supplied_bags(g, [frozenset({0})], g, []) is Verdict.REJECT
    empty = build_graph(0, [])
    assert iso_with_supplied_bags(empty, [], empty, []) is Verdict.ACCEPT
    assert iso_with_supplied_bags(g, [frozenset({0})], path(4), [frozenset({0})]) is Verdict.REJECT


def test_solvers_are_deterministic():
    tadpole = build_graph(7, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 6)])
    h = relabel(tadpole, [6, 4, 2, 0, 5, 1, 3])
    assert cstw_iso(tadpole, h, 2) == cstw_iso(tadpole, h, 2)
    f = capture_bags_connected_quotient(tadpole, 2)
    assert tuple(f) == tuple(capture_bags_connected_quotient(tadpole, 2))


def test_brute_force_agrees_with_itself_reversed():
    rng = random.Random(31)
    for _ in range(30):
        n = rng.randint(2, 7)
        m = rng.randint(0, n * (n - 1) // 2)
        a = random_graph(n, m, seed=rng.randint(0, 10**6))
        b = random_graph(n, m, seed=rng.randint(0, 10**6))
        assert brute_force_iso(a, b)[0] == brute_force_iso(b, a)[0]
