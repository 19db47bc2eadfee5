"""Graph realisation and the brute-force statistics it provides."""

import json
import random

import pytest

from ransdist import trees
from ransdist.graph import (
    DegreeStats,
    PairClass,
    bfs_distances,
    build_rans,
    classify_pair,
    corner_distance_labels,
    corner_distance_sum,
    degree_stats,
    distance_profile,
    equidistant_count,
    exhaustive_census,
    total_distance_census,
    total_pair_distance,
)
from ransdist.trees import decode_tree, enumerate_trees, sample_tree

K3 = build_rans(trees.LEAF)
K4 = build_rans(decode_tree("NLLL"))
ORDER2_FIRST = build_rans(decode_tree("NNLLLLL"))  # second insertion opposite corner 0


def sampled_graphs(count, order, seed):
    rng = random.Random(seed)
    for _ in range(count):
        yield build_rans(sample_tree(order, rng, strategy="ballot"))


def test_empty_structure_is_triangle():
    assert K3.order == 0
    assert K3.n_edges == 3
    assert K3.center() is None
    assert bfs_distances(K3, 0) == [0, 1, 1]


def test_single_insertion_is_k4():
    assert K4.order == 1
    assert K4.n_edges == 6
    assert bfs_distances(K4, 0) == [0, 1, 1, 1]
    assert degree_stats(K4).center_degree == 3


def test_edge_count_and_connectivity():
    for n in range(6):
        for t in enumerate_trees(n):
            g = build_rans(t)
            assert g.n_edges == 3 + 3 * n
            assert all(d >= 0 for d in bfs_distances(g, 0))
    for g in sampled_graphs(5, 500, seed=1):
        assert g.n_edges == 3 + 3 * 500
        assert all(d >= 0 for d in bfs_distances(g, 0))


def test_outermost_vertices_mutually_adjacent():
    for t in enumerate_trees(4):
        d = bfs_distances(build_rans(t), 0)
        assert d[1] == 1 and d[2] == 1


def test_order2_hand_distances():
    # insertion into the sub-triangle opposite corner 0: new vertex at distance 2
    d = bfs_distances(ORDER2_FIRST, 0)
    assert d == [0, 1, 1, 1, 2]
    assert corner_distance_sum(ORDER2_FIRST, 1) == 3


def test_labels_equal_bfs_distances_exhaustive():
    for n in range(6):
        for t in enumerate_trees(n):
            g = build_rans(t)
            for k, sources in ((1, (0,)), (2, (0, 1)), (3, (0, 1, 2))):
                assert corner_distance_labels(g, k) == bfs_distances(g, sources)


def test_labels_equal_bfs_distances_sampled():
    for g in sampled_graphs(100, 1000, seed=2):
        for k, sources in ((1, (0,)), (2, (0, 1)), (3, (0, 1, 2))):
            assert corner_distance_labels(g, k) == bfs_distances(g, sources)


def test_label_variant_validation():
    with pytest.raises(ValueError):
        corner_distance_labels(K4, 4)


def test_corner_clique_bound():
    # distances from any vertex to two outermost corners differ by at most 1
    graphs = [build_rans(t) for t in enumerate_trees(5)]
    graphs.extend(sampled_graphs(10, 300, seed=3))
    for g in graphs:
        dists = [bfs_distances(g, c) for c in (0, 1, 2)]
        for x in range(g.n_vertices):
            for i in range(3):
                for j in range(i + 1, 3):
                    assert abs(dists[i][x] - dists[j][x]) <= 1


def test_corner_sums_order2_hand_values():
    totals = {1: 0, 2: 0, 3: 0}
    for t in enumerate_trees(2):
        g = build_rans(t)
        for k in totals:
            totals[k] += corner_distance_sum(g, k)
    assert totals == {1: 7, 2: 6, 3: 6}


def test_distance_profile():
    prof = distance_profile(K4, 0)
    assert prof.counts == (0, 1)
    assert sum(prof.counts) == K4.order
    # arbitrary (internal) source: profile over the other internal vertices
    g = ORDER2_FIRST
    prof_internal = distance_profile(g, 4)
    assert sum(prof_internal.counts) == g.order - 1
    for t in enumerate_trees(4):
        g = build_rans(t)
        assert sum(distance_profile(g, 0).counts) == 4


def test_degree_stats():
    stats = degree_stats(K4)
    assert stats.histogram == {3: 4}
    assert degree_stats(K3) == DegreeStats({2: 3}, None)
    for t in enumerate_trees(2):
        assert degree_stats(build_rans(t)).center_degree == 4


def test_equidistant_hand_values():
    assert equidistant_count(K4) == 1
    assert sum(equidistant_count(build_rans(t)) for t in enumerate_trees(2)) == 4


def test_classify_pair_examples():
    assert classify_pair(K4, 0, 1).kind is PairClass.OUTERMOST_PAIR
    assert classify_pair(K4, 0, 3).kind is PairClass.INTRA
    # order 2, insertion opposite corner 0: (first centre, new vertex) is
    # intra because the centre is a corner of the sub-structure holding it
    assert classify_pair(ORDER2_FIRST, 3, 4).kind is PairClass.INTRA
    with pytest.raises(ValueError):
        classify_pair(K4, 2, 2)
    with pytest.raises(ValueError):
        classify_pair(K4, 0, 9)


def test_inter_pair_has_two_frontier_vertices():
    # order 3: two insertions in different sub-triangles of the root
    g = build_rans(decode_tree("NNLLLNLLLL"))
    info = classify_pair(g, 4, 5)
    assert info.kind in (PairClass.INTER_NO_FEDGE, PairClass.INTER_FEDGE)
    assert info.frontier is not None and len(info.frontier) == 2


def test_pair_count_identity():
    for n in range(7):
        for t in enumerate_trees(n):
            census = total_distance_census(build_rans(t))
            assert census.pair_count == n * (n - 1) // 2 + 3 * n


def test_census_k4_and_order2():
    assert total_distance_census(K4).grand_total == 3
    assert sum(total_distance_census(build_rans(t)).grand_total
               for t in enumerate_trees(2)) == 24


def test_census_consistency_small_orders():
    # the frontier decomposition is exact on every structure of order <= 6
    for n in range(7):
        for t in enumerate_trees(n):
            c = total_distance_census(build_rans(t))
            assert c.inter_total == c.inter_lower_bound + c.fedge_count
            assert c.grand_total == c.intra_total + c.inter_total


def test_census_consistency_large_orders_is_one_sided():
    # beyond order 6 the decomposition only bounds the true interdistance
    for g in list(sampled_graphs(20, 60, seed=4)) + list(sampled_graphs(2, 300, seed=5)):
        c = total_distance_census(g)
        assert c.inter_total <= c.inter_lower_bound + c.fedge_count
        assert c.grand_total == c.intra_total + c.inter_total


def test_frontier_decomposition_first_breaks_at_order_7():
    # Shortest paths may skip the frontier along the parent-triangle edge
    # between the siblings' third corners; the smallest such structures
    # have order 7 (three vertices on each side plus the parent centre),
    # and exactly 12 of the 7752 order-7 structures contain one, each
    # saving a single step.
    gap = 0
    violating = 0
    for t in enumerate_trees(7):
        c = total_distance_census(build_rans(t))
        d = c.inter_lower_bound + c.fedge_count - c.inter_total
        assert d >= 0
        gap += d
        violating += d > 0
    assert (violating, gap) == (12, 12)


def test_exhaustive_census_order3_values():
    cen = exhaustive_census(3)
    assert cen.tree_count == {0: 1, 1: 1, 2: 3, 3: 12}
    assert cen.corner_sums[1][3] == 46
    assert cen.dist_counts[1][3] == 26 and cen.dist_counts[2][3] == 10
    assert cen.grand == {0: 0, 1: 3, 2: 24, 3: 180}


def test_vectorised_pair_distance_matches_census():
    for n in range(5):
        for t in enumerate_trees(n):
            g = build_rans(t)
            assert total_pair_distance(g) == total_distance_census(g).grand_total
    for g in sampled_graphs(3, 80, seed=6):
        assert total_pair_distance(g) == total_distance_census(g).grand_total


def test_json_export_schema():
    payload = json.loads(K4.to_json())
    assert payload["order"] == 1
    assert payload["outermost"] == [0, 1, 2]
    assert payload["center"] == 3
    assert sorted(payload["edges"]) == [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]
