import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fanwidth import (
    Graph,
    InputError,
    bandwidth_of_ordering,
    bfs_distances,
    bfs_layering,
    build_blowup,
    build_fan,
    graph_local_density,
    grid_graph,
    path_graph,
    product_distance,
    strong_product,
    validate_decomposition,
)
from fanwidth.treedec import TreeDecomposition

from conftest import random_connected_graph, random_graph

INF = math.inf


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n - 1)] + [(0, n - 1)])


def complete(n):
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


class TestBfs:
    def test_line_graph(self):
        g = path_graph(3)
        assert bfs_distances(g, 0) == {0: 0, 1: 1, 2: 2}

    def test_disconnected(self):
        g = Graph(4, [(0, 1), (2, 3)])
        d = bfs_distances(g, 0)
        assert d[1] == 1 and d[2] == INF and d[3] == INF

    def test_grid_corner_to_corner(self):
        g, idx = grid_graph(4, 4)
        assert bfs_distances(g, idx[(0, 0)])[idx[(3, 3)]] == 6

    def test_invalid_source(self):
        with pytest.raises(InputError):
            bfs_distances(path_graph(3), 5)


class TestProductDistance:
    def test_max_rule(self):
        assert product_distance(2, 3) == 3

    def test_identity(self):
        assert product_distance(0, 0) == 0

    def test_infinity_absorbs(self):
        assert product_distance(INF, 1) == INF

    def test_matches_materialized_product(self):
        a = random_connected_graph(6, 0.3, seed=1)
        b = path_graph(5)
        prod, idx = strong_product(a, b)
        da = {v: bfs_distances(a, v) for v in range(a.n)}
        db = {v: bfs_distances(b, v) for v in range(b.n)}
        for (va, vb), i in idx.items():
            dp = bfs_distances(prod, i)
            for (wa, wb), j in idx.items():
                assert dp[j] == product_distance(da[va][wa], db[vb][wb])


class TestFanAndBlowup:
    def test_fan_six_vertices(self):
        fan = build_fan(5)
        assert fan.n == 6
        assert fan.num_edges == 9  # 4 path edges + 5 spokes

    def test_fan_single_edge(self):
        fan = build_fan(1)
        assert fan.n == 2 and fan.num_edges == 1

    def test_fan_rejects_zero(self):
        with pytest.raises(InputError):
            build_fan(0)

    def test_blowup_sizes(self):
        fan = build_fan(5)
        bl, slot_of = build_blowup(fan, 5)
        assert bl.n == 30
        assert bl.num_edges == 285  # 6*C(5,2) clique edges + 9*25 cross edges
        assert len(slot_of) == 30

    def test_blowup_identity(self):
        g = cycle(5)
        bl, slot_of = build_blowup(g, 1)
        assert bl.n == g.n and sorted(bl.edges()) == sorted(g.edges())

    def test_blowup_rejects_zero(self):
        with pytest.raises(InputError):
            build_blowup(path_graph(2), 0)

    def test_blowup_cliques_and_joins(self):
        g = path_graph(2)
        bl, slot_of = build_blowup(g, 3)
        for v in range(2):
            members = [slot_of[(v, s)] for s in range(3)]
            for a in members:
                for b in members:
                    if a != b:
                        assert bl.has_edge(a, b)
        for s in range(3):
            for t in range(3):
                assert bl.has_edge(slot_of[(0, s)], slot_of[(1, t)])

    def test_blowup_treewidth_witness(self):
        # blowing up each bag of a width-t decomposition gives a valid
        # decomposition of the blowup with bags of size b(t+1)
        g = cycle(6)
        from fanwidth import minfill_decomposition

        td = minfill_decomposition(g)
        b = 3
        bl, slot_of = build_blowup(g, b)
        big_bags = {
            x: frozenset(slot_of[(v, s)] for v in bag for s in range(b))
            for x, bag in td.bags.items()
        }
        big = TreeDecomposition(big_bags, td.tree_edges)
        assert validate_decomposition(bl, big) == []
        assert big.width + 1 <= b * (td.width + 1)


class TestLayering:
    def test_path_layers(self):
        g = path_graph(4)
        lay = bfs_layering(g, 0)
        assert lay.layer_of == {0: 0, 1: 1, 2: 2, 3: 3}

    def test_star_layers(self):
        g = Graph(4, [(0, 1), (0, 2), (0, 3)])
        lay = bfs_layering(g, 0)
        assert lay.layer_of[0] == 0
        assert all(lay.layer_of[v] == 1 for v in (1, 2, 3))

    def test_grid_layer_sizes(self):
        g, idx = grid_graph(4, 4)
        lay = bfs_layering(g, idx[(0, 0)])
        sizes = {}
        for v, s in lay.layer_of.items():
            sizes[s] = sizes.get(s, 0) + 1
        assert [sizes[s] for s in range(7)] == [1, 2, 3, 4, 3, 2, 1]

    @given(st.integers(0, 400))
    @settings(max_examples=25, deadline=None)
    def test_layering_invariant_random(self, seed):
        g = random_connected_graph(10, 0.25, seed)
        lay = bfs_layering(g, 0)
        lay.validate(g)  # raises on violation


class TestBandwidth:
    def test_path_order(self):
        g = path_graph(5)
        assert bandwidth_of_ordering(g, [0, 1, 2, 3, 4]) == 1

    def test_triangle_any_order(self):
        assert bandwidth_of_ordering(complete(3), [1, 2, 0]) == 2

    def test_c4_cycle_order(self):
        g = cycle(4)
        assert bandwidth_of_ordering(g, [0, 1, 2, 3]) == 3
        # optimum is 2, witnessed by interleaving the antipodal pair
        assert bandwidth_of_ordering(g, [0, 1, 3, 2]) == 2

    def test_rejects_non_permutation(self):
        with pytest.raises(InputError):
            bandwidth_of_ordering(path_graph(3), [0, 1, 1])

    def test_edgeless(self):
        assert bandwidth_of_ordering(Graph(3, []), [2, 0, 1]) == 0


class TestLocalDensity:
    def test_odd_cycle_is_two(self):
        for k in (1, 2, 3, 5):
            assert graph_local_density(cycle(2 * k + 1)) == 2

    def test_complete_graph(self):
        assert graph_local_density(complete(6)) == 5

    def test_grid_4x4(self):
        g, _ = grid_graph(4, 4)
        # radius-2 balls at the four center vertices hold 11 vertices
        assert graph_local_density(g) == Fraction(5)

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            graph_local_density(Graph(0, []))

    def test_agrees_with_ball_enumeration(self):
        g = random_connected_graph(12, 0.3, seed=3)
        best = Fraction(0)
        for v in g.vertices():
            dist = bfs_distances(g, v)
            for r in range(1, 13):
                ball = sum(1 for d in dist.values() if d <= r)
                best = max(best, Fraction(ball - 1, r))
        assert graph_local_density(g) == best

    @given(st.integers(0, 500))
    @settings(max_examples=30, deadline=None)
    def test_density_at_most_twice_bandwidth(self, seed):
        g = random_graph(7, 0.35, seed)
        if g.num_edges == 0:
            return
        rng_order = sorted(g.vertices(), key=lambda v: (v * 2654435761) % 97)
        bw = bandwidth_of_ordering(g, rng_order)
        assert graph_local_density(g) <= 2 * bw


class TestMaskedViews:
    def test_delete_preserves_ids(self):
        g = path_graph(5)
        gp = g.delete({2})
        assert gp.vertices() == [0, 1, 3, 4]
        assert gp.neighbors(1) == (0,)
        assert not gp.has_edge(1, 2)
        assert gp.num_edges == 2

    def test_delete_is_stackable(self):
        g = path_graph(5).delete({0}).delete({4})
        assert g.vertices() == [1, 2, 3]
