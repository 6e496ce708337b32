import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dupsparse.comm import (AdversarialOverlap, CostMeter, DistributedGraph, Model,
                            PartitionPolicy, UniformIID, distribute, edge_bits, meter_for)
from dupsparse.graph import (Graph, components, gen_sbm, gen_unit_random, gen_weighted_random,
                             girth, hop_distances)
from dupsparse.spanner import (bfs_blackboard, cycle_hops, plus2_sample_size, plus2_spanner,
                               plus2_spanner_run, project_spanner, spanner_dup,
                               split_duplication, t_bundle, weight_bucket)
from dupsparse.verify import check_stretch
from helpers import complete, cycle, greedy_oracle, path, star


def single_site(g, s=1):
    keys = g.edge_keys()
    return DistributedGraph(g, s, [keys] + [[] for _ in range(s - 1)],
                            dict.fromkeys(keys, 1.0), duplication=False)


def c5_two_sites():
    g = cycle(5)
    sites = [[(0, 4), (2, 3), (3, 4)], [(0, 1), (1, 2)]]
    return DistributedGraph(g, 2, sites, dict.fromkeys(g.edge_keys(), 1.0), duplication=False)


policies = st.sampled_from([PartitionPolicy(), UniformIID(0.5), UniformIID(1.0),
                            AdversarialOverlap(1), AdversarialOverlap(2)])


def fit(policy, s):
    if isinstance(policy, AdversarialOverlap):
        return AdversarialOverlap(min(policy.d, s))
    return policy


class TestHelpers:
    def test_cycle_hops(self):
        assert [cycle_hops(k) for k in (1.5, 1.75, 2, 2.25, 3)] == [2, 3, 3, 4, 5]

    def test_weight_bucket(self):
        assert [weight_bucket(w) for w in (1, 1.9, 2, 3.5, 4, 7, 8)] == [1, 1, 2, 2, 3, 3, 4]
        with pytest.raises(ValueError):
            weight_bucket(0.5)


class TestSpannerDup:
    def test_triangle(self, triangle):
        h = spanner_dup(single_site(triangle), 2, "bb")
        assert h.m == 2 and check_stretch(triangle, h, 3).passed

    def test_c5_keeps_everything(self):
        assert spanner_dup(c5_two_sites(), 2, "bb") == cycle(5)

    def test_single_edge(self):
        g = Graph(2, [(0, 1)])
        assert spanner_dup(single_site(g), 2, "mp") == g

    def test_k_must_exceed_one(self, triangle):
        with pytest.raises(ValueError):
            spanner_dup(single_site(triangle), 1, "bb")

    def test_c5_costs(self):
        eb = edge_bits(5, 1)
        bb = meter_for(c5_two_sites(), "bb")
        spanner_dup(c5_two_sites(), 2, "bb", bb)
        assert (bb.bits_total, bb.edge_messages, bb.marker_messages) == (5 * eb + 2, 5, 2)
        mp = meter_for(c5_two_sites(), "mp")
        spanner_dup(c5_two_sites(), 2, "mp", mp)
        # site 0 relays its 3 edges (2 hops each); site 1 ships all 5 to the coordinator
        assert mp.bits_total == 3 * 2 * eb + 5 * eb

    def test_mp_delta_relays_less(self):
        # delta relaying only pays off from the second weight bucket on
        g = gen_weighted_random(30, 120, 16, 1)
        dg = distribute(g, 4, UniformIID(0.6), 1)
        full, delta = meter_for(dg, "mp"), meter_for(dg, "mp")
        a = spanner_dup(dg, 2, "mp", full)
        b = spanner_dup(dg, 2, "mp", delta, mp_delta=True)
        assert a == b and delta.bits_total < full.bits_total

    def test_weighted_rounds_cover_all_buckets(self):
        g = gen_weighted_random(20, 60, 50, 3)
        meter = meter_for(single_site(g), "bb")
        spanner_dup(single_site(g), 2, "bb", meter)
        assert meter.rounds == math.ceil(math.log2(20 * g.w_max))

    @given(st.integers(4, 30), st.integers(0, 10 ** 6), policies, st.integers(1, 4),
           st.sampled_from([1.5, 1.75, 2, 2.5, 3]), st.booleans())
    def test_girth_and_stretch(self, n, seed, policy, s, k, weighted):
        m = min(n * (n - 1) // 2, 3 * n)
        g = gen_weighted_random(n, m, 20, seed) if weighted else gen_unit_random(n, m, seed)
        dg = distribute(g, s, fit(policy, s), seed)
        h = spanner_dup(dg, k, "bb")
        hops = cycle_hops(k)
        assert girth(h) > hops + 1
        assert check_stretch(g, h, 2 * hops if weighted else hops).passed

    @given(st.integers(4, 25), st.integers(0, 10 ** 6), policies, st.integers(1, 4))
    def test_models_agree(self, n, seed, policy, s):
        g = gen_weighted_random(n, min(n * (n - 1) // 2, 2 * n), 9, seed)
        dg = distribute(g, s, fit(policy, s), seed)
        assert spanner_dup(dg, 2, "bb") == spanner_dup(dg, 2, "mp")

    def test_unit_matches_greedy_oracle(self):
        for seed in range(10):
            g = gen_unit_random(25, 80, seed)
            dg = distribute(g, 3, UniformIID(0.5), seed)
            order = [e for lst in dg.site_edges for e in lst]
            assert set(spanner_dup(dg, 2, "bb").edge_keys()) == set(greedy_oracle(order, 3))


class TestBFS:
    def test_single_vertex(self):
        dg = DistributedGraph(Graph(1), 3, [[], [], []], {})
        meter = meter_for(dg, "bb")
        tree = bfs_blackboard(dg, 0, meter)
        assert tree.m == 0 and meter.edge_messages == 0 and meter.marker_messages == 3

    def test_star_trace(self):
        g = star(4)
        dg = DistributedGraph(g, 2, [g.edge_keys(), []], dict.fromkeys(g.edge_keys(), 1.0))
        meter = meter_for(dg, "bb")
        assert bfs_blackboard(dg, 0, meter) == g
        # round 1: site 0 posts 4 edges, site 1 a marker; round 2: both sites mark
        assert (meter.edge_messages, meter.marker_messages, meter.rounds) == (4, 3, 2)

    def test_path(self):
        tree = bfs_blackboard(single_site(path(3)), 0)
        assert tree == path(3) and hop_distances(tree, 0)[2] == 2

    def test_needs_blackboard(self, triangle):
        dg = single_site(triangle)
        with pytest.raises(ValueError):
            bfs_blackboard(dg, 0, meter_for(dg, "mp"))
        with pytest.raises(ValueError):
            bfs_blackboard(dg, 5)

    @given(st.integers(2, 40), st.integers(0, 10 ** 6), policies, st.integers(1, 5))
    def test_is_bfs_tree(self, n, seed, policy, s):
        g = gen_unit_random(n, min(n * (n - 1) // 2, 2 * n), seed)
        dg = distribute(g, s, fit(policy, s), seed)
        meter = meter_for(dg, "bb")
        tree = bfs_blackboard(dg, 0, meter)
        dist_g, dist_t = hop_distances(g, 0), hop_distances(tree, 0)
        assert (dist_g == dist_t).all()
        reached = int((dist_g >= 0).sum())
        assert tree.m == reached - 1 == meter.edge_messages


class TestPlus2:
    def test_sample_size(self):
        assert plus2_sample_size(64, 0, 0.5) == math.ceil(8 * math.log(128))

    def test_path_kept_whole(self):
        g = path(10)
        dg = distribute(g, 2, PartitionPolicy(), 0)
        res = plus2_spanner_run(dg, 0.1)
        assert res.spanner == g and res.phase1 == set(g.edge_keys())

    def test_star(self):
        g = star(60)
        dg = distribute(g, 3, PartitionPolicy(), 4)
        res = plus2_spanner_run(dg, 0.1, seed=4)
        assert res.threshold == 8.0
        assert res.phase1 == set(g.edge_keys())
        assert check_stretch(g, res.spanner, 1, 2).passed

    def test_empty(self):
        dg = DistributedGraph(Graph(5), 2, [[], []], {})
        meter = meter_for(dg, "bb")
        h = plus2_spanner(dg, 0.2, meter)
        assert h.m == 0 and meter.edge_messages == 0 and meter.bits_total == meter.marker_messages

    def test_preconditions(self, triangle):
        dg = single_site(triangle)
        with pytest.raises(ValueError):
            plus2_spanner(dg, 1.0)
        with pytest.raises(ValueError):
            plus2_spanner(single_site(Graph(2, [(0, 1, 2)])), 0.1)
        with pytest.raises(ValueError):
            plus2_spanner(dg, 0.1, meter_for(dg, "mp"))

    def test_sbm_surplus(self):
        g, _ = gen_sbm([20, 20], 0.5, 0.05, 2)
        dg = distribute(g, 4, UniformIID(0.5), 2)
        h = plus2_spanner(dg, 1 / 40, seed=2)
        assert check_stretch(g, h, 1, 2).passed and h.m < g.m


class TestBundle:
    def test_t1_is_spanner(self):
        g = gen_unit_random(20, 60, 0)
        dg = distribute(g, 2, UniformIID(0.5), 0)
        bundle, residual = t_bundle(dg, 1, 2, "bb")
        assert bundle.levels[0] == spanner_dup(dg, 2, "bb") == bundle.union
        assert residual.base.m == g.m - bundle.union.m

    def test_k4(self):
        dg = single_site(complete(4), 2)
        bundle, residual = t_bundle(dg, 3, 2, "bb")
        assert bundle.union == complete(4) and residual.base.m == 0 and bundle.t == 3

    def test_tree(self):
        g = path(8)
        bundle, residual = t_bundle(single_site(g), 4, 2, "mp")
        assert bundle.levels[0] == g and all(lv.m == 0 for lv in bundle.levels[1:])

    def test_empty_levels_are_free(self):
        g = path(8)
        m1, m4 = meter_for(single_site(g), "bb"), meter_for(single_site(g), "bb")
        t_bundle(single_site(g), 2, 2, "bb", m1)
        t_bundle(single_site(g), 6, 2, "bb", m4)
        assert m1.bits_total == m4.bits_total

    @given(st.integers(4, 20), st.integers(0, 10 ** 6), st.integers(1, 5), policies)
    def test_levels_disjoint_spanners(self, n, seed, t, policy):
        g = gen_unit_random(n, min(n * (n - 1) // 2, 4 * n), seed)
        dg = distribute(g, 3, policy, seed)
        bundle, residual = t_bundle(dg, t, 2, "bb")
        seen = set()
        remaining = g
        for level in bundle.levels:
            keys = set(level.edge_keys())
            assert not keys & seen
            seen |= keys
            assert check_stretch(remaining, level, 3).passed
            remaining = remaining.without(keys)
        assert set(residual.base.edge_keys()) == set(g.edge_keys()) - seen
        assert all(not set(lst) & seen for lst in residual.site_edges)

    def test_preconditions(self, triangle):
        with pytest.raises(ValueError):
            t_bundle(single_site(triangle), 0, 2, "bb")


class TestSplit:
    def test_identity_for_one_site(self, triangle):
        split, mapping = split_duplication(single_site(triangle))
        assert mapping.factor == 1 and split.base == triangle

    def test_one_edge_four_sites(self):
        g = Graph(2, [(0, 1)])
        dg = DistributedGraph(g, 4, [[(0, 1)]] * 4, {(0, 1): 1.0})
        split, mapping = split_duplication(dg)
        assert mapping.factor == 2 and split.base.n == 4
        assert split.base.m == 4 and all(len(lst) == 1 for lst in split.site_edges)
        assert {(mapping.backward(a), mapping.backward(b)) for a, b in split.base.edge_keys()} \
            == {(0, 1)}
        assert not split.duplication

    def test_non_duplicated_input(self):
        g = gen_unit_random(10, 20, 1)
        dg = distribute(g, 3, PartitionPolicy(), 1)
        split, mapping = split_duplication(dg)
        assert mapping.factor == 2
        assert {(a // 2, b // 2) for a, b in split.base.edge_keys()} == set(g.edge_keys())
        assert all(a % 2 == 0 and b % 2 == 0 for a, b in split.base.edge_keys())

    def test_forward_backward(self):
        _, mapping = split_duplication(DistributedGraph(Graph(3), 9, [[]] * 9, {}))
        assert mapping.factor == 3
        for v in range(3):
            assert [mapping.backward(x) for x in mapping.forward(v)] == [v] * 3

    def test_project(self):
        g = gen_unit_random(10, 25, 2)
        dg = distribute(g, 4, UniformIID(0.6), 2)
        split, mapping = split_duplication(dg)
        assert project_spanner(Graph(split.base.n), mapping, g).m == 0
        assert project_spanner(split.base, mapping, g) == g
        h = project_spanner(spanner_dup(split, 2, "bb"), mapping, g)
        assert check_stretch(g, h, 3).passed

    def test_split_preserves_components(self):
        g = gen_unit_random(12, 15, 5)
        dg = distribute(g, 4, AdversarialOverlap(4), 5)
        split, mapping = split_duplication(dg)
        h = project_spanner(split.base, mapping, g)
        assert (components(h) == components(g)).all()


def test_unit_bb_meter_formula():
    """BB spanner bits = |H| * edge_bits + one marker per site (unit weights)."""
    g = gen_unit_random(50, 200, 7)
    dg = distribute(g, 5, UniformIID(0.3), 7)
    meter = CostMeter(Model.BLACKBOARD, g.n, 5)
    h = spanner_dup(dg, 2, Model.BLACKBOARD, meter)
    assert meter.bits_total == h.m * edge_bits(50, 1) + 5
