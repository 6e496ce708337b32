import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dupsparse.comm import (AdversarialOverlap, DistributedGraph, PartitionPolicy, UniformIID,
                            distribute, meter_for)
from dupsparse.errors import Infeasible
from dupsparse.graph import Graph, gen_sbm, gen_unit_random
from dupsparse.sparsifier import (SAMPLE_RATE, SparsifierState, bundle_size, light_ss,
                                  solve_site_prob, sparsify_iterations, sparsify_run,
                                  spectral_sparsify)
from helpers import complete, path

TINY = 1e-9  # t_scale that yields a single bundle level


class TestSolver:
    def test_examples(self):
        assert solve_site_prob(1.0, 1) == pytest.approx(0.25, abs=1e-15)
        assert solve_site_prob(1.0, 2) == pytest.approx(1 - 0.75 ** 0.5, abs=1e-15)
        assert math.isclose(solve_site_prob(1.0, 2), 0.1339746, rel_tol=1e-6)
        with pytest.raises(Infeasible):
            solve_site_prob(0.05, 2)

    @given(st.floats(0.3, 1.0), st.integers(1, 64), st.floats(0.01, 0.9))
    def test_identity(self, r, s, target):
        if 1 - (1 - r) ** s < target:
            with pytest.raises(Infeasible):
                solve_site_prob(r, s, target)
            return
        p = solve_site_prob(r, s, target)
        assert 0 < p <= 1
        assert abs(1 - (1 - p * r) ** s - target) <= 1e-12

    def test_boundary_feasible(self):
        r = 1 - 0.75 ** 0.5
        assert solve_site_prob(r, 2) == pytest.approx(1.0)

    @pytest.mark.parametrize("args", [(0.0, 2), (1.5, 2), (0.5, 0)])
    def test_preconditions(self, args):
        with pytest.raises(ValueError):
            solve_site_prob(*args)
        with pytest.raises(ValueError):
            solve_site_prob(0.5, 2, 1.0)


class TestParameters:
    def test_bundle_size(self):
        assert bundle_size(32, 0.5) == math.ceil(24 * 25 / 0.25)
        assert bundle_size(32, 0.5, TINY) == 1
        assert bundle_size(1, 0.5) == 1

    def test_iterations(self):
        assert [sparsify_iterations(r) for r in (1.5, 2, 3, 4, 8, 9)] == [1, 1, 2, 2, 3, 4]
        with pytest.raises(ValueError):
            sparsify_iterations(1.0)


class TestLightSS:
    def test_edgeless(self):
        dg = DistributedGraph(Graph(6), 3, [[], [], []], {})
        meter = meter_for(dg, "bb")
        out = light_ss(SparsifierState.start(dg), 0.5, "bb", meter, is_last=True)
        assert out.graph.m == 0
        assert meter.edge_messages == 0 and meter.bits_total == meter.marker_messages == 3

    def test_tree_is_kept(self):
        g = path(12)
        dg = distribute(g, 2, UniformIID(0.7), 0)
        out = light_ss(SparsifierState.start(dg), 0.5, "mp", is_last=True, t_scale=TINY)
        assert out.graph == g and out.history[0]["sampled_edges"] == 0

    def test_k20_sample_rate(self):
        g = complete(20)
        sampled = residual = 0
        for seed in range(100):
            dg = distribute(g, 2, UniformIID(1.0), seed)
            out = light_ss(SparsifierState.start(dg), 0.5, "bb", seed=seed, t_scale=TINY)
            sampled += out.history[0]["sampled_edges"]
            residual += out.history[0]["residual_edges"]
        sd = math.sqrt(residual * 0.25 * 0.75)
        assert abs(sampled - 0.25 * residual) <= 4 * sd

    def test_reweighting_and_residence(self):
        g = gen_unit_random(30, 200, 3)
        dg = distribute(g, 3, UniformIID(0.6), 3)
        out = light_ss(SparsifierState.start(dg), 0.5, "bb", seed=3, t_scale=TINY)
        assert out.history[0]["sampled_edges"] > 0
        for e, w in out.graph.weights().items():
            assert w in (1.0, 4.0)
            assert 0 < out.r_prime[e] <= 1
        # each copy lives where it was (bundle) or where it was sampled
        held = dg.sites_of()
        for site, lst in enumerate(out.dg.site_edges):
            assert all(site in held[e] for e in lst)

    def test_conditional_update_keeps_rate(self):
        g = complete(16)
        dg = distribute(g, 2, UniformIID(0.8), 1)
        out = light_ss(SparsifierState.start(dg), 0.5, "bb", seed=1, t_scale=TINY)
        survivors = [e for e, w in out.graph.weights().items() if w == 4.0]
        assert survivors
        for e in survivors:
            assert solve_site_prob(out.r_prime[e], 2) == pytest.approx(SAMPLE_RATE)

    def test_product_update_forces_certain_resampling(self):
        """With r' = p * r, every survivor is resampled with probability one."""
        g = complete(16)
        dg = distribute(g, 2, UniformIID(0.8), 1)
        out = light_ss(SparsifierState.start(dg), 0.5, "bb", seed=1, t_scale=TINY,
                       residence_update="product")
        survivors = [e for e, w in out.graph.weights().items() if w == 4.0]
        assert survivors
        for e in survivors:
            assert solve_site_prob(out.r_prime[e], 2) == pytest.approx(1.0)

    def test_infeasible_propagates(self):
        g = complete(8)
        dg = distribute(g, 2, UniformIID(0.05), 0)
        with pytest.raises(Infeasible):
            light_ss(SparsifierState.start(dg), 0.5, "bb", t_scale=TINY)

    def test_bad_arguments(self):
        dg = distribute(path(4), 1, PartitionPolicy(), 0)
        with pytest.raises(ValueError):
            light_ss(SparsifierState.start(dg), 1.0, "bb")
        with pytest.raises(ValueError):
            light_ss(SparsifierState.start(dg), 0.5, "bb", residence_update="other")

    def test_size_decay(self):
        g, _ = gen_sbm([40, 40], 0.7, 0.2, 0)
        dg = distribute(g, 2, UniformIID(0.9), 0)
        state = sparsify_run(dg, 0.9, 8, "bb", seed=0, t_scale=TINY)
        checked = 0
        for h in state.history:
            if h["residual_edges"] >= 500:
                assert h["sampled_edges"] <= 0.30 * h["residual_edges"]
                checked += 1
        assert checked >= 1


class TestUniformity:
    """Survive counts against the exact per-edge law 1 - (1 - p_e)^(copies of e)."""

    def _rates(self, policy, s, seeds, n=10):
        g = complete(n)
        survived, expected, var = 0, 0.0, 0.0
        for seed in range(seeds):
            dg = distribute(g, s, policy, seed)
            copies = dg.sites_of()
            out = light_ss(SparsifierState.start(dg), 0.5, "bb", seed=seed, t_scale=TINY)
            survived += out.history[0]["sampled_edges"]
            bundle = {e for e, w in out.graph.weights().items() if w == 1.0}
            for e in g.edge_keys():
                if e in bundle:
                    continue
                q = 1 - (1 - solve_site_prob(dg.residence_prob[e], dg.sampling_sites)) \
                    ** len(copies[e])
                expected += q
                var += q * (1 - q)
        return survived, expected, var

    @pytest.mark.parametrize("policy,s", [(UniformIID(0.5), 2), (UniformIID(0.8), 3),
                                          (UniformIID(1.0), 4), (AdversarialOverlap(1), 4),
                                          (AdversarialOverlap(2), 4), (PartitionPolicy(), 3)])
    def test_per_edge_law(self, policy, s):
        survived, expected, var = self._rates(policy, s, 200)
        assert abs(survived - expected) <= 4 * math.sqrt(var)

    @pytest.mark.parametrize("s", [2, 4])
    def test_full_overlap_is_exactly_a_quarter(self, s):
        survived, expected, var = self._rates(AdversarialOverlap(s), s, 200)
        total = expected / SAMPLE_RATE
        assert expected == pytest.approx(SAMPLE_RATE * round(total))
        assert abs(survived - expected) <= 4 * math.sqrt(var)


class TestSpectralSparsify:
    def test_single_pass(self):
        g = gen_unit_random(20, 80, 0)
        dg = distribute(g, 2, UniformIID(0.8), 0)
        state = sparsify_run(dg, 0.5, 2, "bb", seed=0, t_scale=TINY)
        assert len(state.history) == 1 and state.history[0]["is_last"]

    @pytest.mark.parametrize("rho", [2, 4, 16])
    def test_tree_unchanged(self, rho):
        g = path(20)
        dg = distribute(g, 3, UniformIID(0.5), 1)
        assert spectral_sparsify(dg, 0.3, rho, "mp", t_scale=TINY) == g

    @pytest.mark.parametrize("model", ["mp", "bb"])
    def test_only_last_pass_sends_samples(self, model):
        g, _ = gen_sbm([30, 30], 0.6, 0.1, 2)
        dg = distribute(g, 3, UniformIID(0.7), 2)
        meter = meter_for(dg, model)
        state = sparsify_run(dg, 0.5, 8, model, meter, seed=2, t_scale=TINY)
        assert len(state.history) == 3
        assert [h["sample_bits"] for h in state.history[:-1]] == [0, 0]
        assert sum(h["sampled_edges"] for h in state.history[:-1]) > 0
        bits = sum(h["bundle_bits"] + h["sample_bits"] for h in state.history)
        assert bits == meter.bits_total

    def test_weights_are_powers_of_four(self):
        g = complete(24)
        dg = distribute(g, 2, UniformIID(0.9), 5)
        state = sparsify_run(dg, 0.5, 8, "bb", seed=5, t_scale=TINY)
        powers = {round(math.log(w, 4), 9) for w in state.graph.weights().values()}
        assert powers <= {0, 1, 2, 3}

    def test_deterministic(self):
        g = gen_unit_random(25, 120, 4)
        dg = distribute(g, 2, UniformIID(0.8), 4)
        a = spectral_sparsify(dg, 0.5, 4, "bb", seed=9, t_scale=TINY)
        b = spectral_sparsify(dg, 0.5, 4, "bb", seed=9, t_scale=TINY)
        assert a == b

    def test_expectation_small(self):
        """Mean Laplacian over seeds tracks the input (one pass, small graph)."""
        from dupsparse.graph import laplacian
        g = complete(8)
        dg = distribute(g, 2, UniformIID(1.0), 0)
        acc = np.zeros((8, 8))
        runs = 600
        for seed in range(runs):
            out = light_ss(SparsifierState.start(dg), 0.5, "bb", seed=seed, t_scale=TINY)
            acc += laplacian(out.graph)
        lap = laplacian(g)
        assert np.linalg.norm(acc / runs - lap) / np.linalg.norm(lap) < 0.08
