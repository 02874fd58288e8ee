import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clinr.errors import DegenerateRegimeError, DivergentRestartError, RegimeError
from clinr.markov import (
    ErrorParams,
    check_rates,
    error_params,
    estimate_tree,
    expected_gates,
    idle_exposure,
    injection_rate,
    leaf_prep_rate,
    logical_rate,
    restart_expectations,
    rsp_vector,
    step_check,
    step_injection,
    upper_prep_rate,
)
from clinr.noise import NoiseModel
from clinr.tree import two_vertex_tree, uniform_tree

NO_IDLE = NoiseModel.standard(1e-3, idle=False)


class TestVectorSteps:
    def test_rsp_vector(self):
        assert list(rsp_vector(0.0, 2)) == [1.0, 0.0, 0.0, 0.0]
        assert list(rsp_vector(0.1, 1)) == [0.9, 0.1, 0.0]

    def test_hand_worked_check(self):
        vec = step_check(rsp_vector(0.1, 1), 0, p_de=0.02, p_ue=0.01)
        assert vec == pytest.approx([0.873, 0.059, 0.068], abs=1e-12)

    def test_zero_rates_identity_on_clean_vector(self):
        vec = rsp_vector(0.0, 3)
        out = step_check(vec, 0, 0.0, 0.0)
        assert np.array_equal(out, vec)

    def test_undetected_mass_halves(self):
        vec = step_check(rsp_vector(0.5, 1), 0, 0.0, 0.0)
        assert vec[1] == 0.25
        assert vec[2] == 0.25

    @settings(max_examples=100, deadline=None)
    @given(
        p_p=st.floats(0, 1),
        p_de=st.floats(0, 0.5),
        p_ue=st.floats(0, 0.5),
        p_i=st.floats(0, 1),
        r=st.integers(1, 10),
    )
    def test_steps_preserve_probability(self, p_p, p_de, p_ue, p_i, r):
        vec = rsp_vector(p_p, r)
        for k in range(r):
            vec = step_check(vec, k, p_de, p_ue)
        vec = step_injection(vec, p_i)
        assert vec.sum() == pytest.approx(1.0, abs=1e-12)
        assert (vec >= -1e-15).all()

    def test_injection_step(self):
        vec = step_injection(rsp_vector(0.0, 1), 0.05)
        assert vec == pytest.approx([0.95, 0.05, 0.0], abs=1e-15)
        clean = rsp_vector(0.2, 1)
        assert np.array_equal(step_injection(clean, 0.0), clean)

    def test_logical_rate(self):
        assert logical_rate(np.array([0.873, 0.059, 0.068])) == pytest.approx(
            0.0633, abs=1e-4
        )
        assert logical_rate(np.array([0.5, 0.0, 0.5])) == 0.0
        assert logical_rate(np.array([0.0, 0.3, 0.7])) == 1.0
        with pytest.raises(DegenerateRegimeError):
            logical_rate(np.array([0.0, 0.0, 1.0]))

    def test_monotone_in_p_ue(self):
        rates = []
        for p_ue in (0.0, 0.01, 0.05, 0.2):
            vec = step_check(rsp_vector(0.1, 1), 0, 0.0, p_ue)
            rates.append(logical_rate(vec))
        assert rates == sorted(rates)
        assert rates[1] > rates[0]


class TestExpectedGates:
    def test_no_detection(self):
        vec = np.array([0.9, 0.1, 0.0])
        assert expected_gates(vec, 100, 10, 20, 1) == 130.0

    def test_hand_worked_total(self):
        vec = np.array([0.873, 0.059, 0.068])
        got = expected_gates(vec, 100, 10, 20, 1)
        assert got == pytest.approx(137.30, abs=1e-2)

    def test_restart_expectations_telescope(self):
        vec = np.array([0.5, 0.1, 0.25, 0.15])
        p_res = 0.4
        total = sum(restart_expectations(vec))
        assert total == pytest.approx(1 / (1 - p_res) - 1, rel=1e-12)

    def test_literal_reading_flag(self):
        vec = np.array([0.6, 0.0, 0.1, 0.3])
        spec_reading = expected_gates(vec, 100, 10, 20, 2)
        literal = expected_gates(vec, 100, 10, 20, 2, literal_restart_cost=True)
        assert literal > spec_reading  # k * g_P outweighs k * g_C

    def test_divergent_restart(self):
        with pytest.raises(DivergentRestartError):
            expected_gates(np.array([0.0, 0.0, 1.0]), 10, 1, 1, 1)


class TestErrorParameterFormulas:
    def test_all_zero_at_p_zero(self):
        quiet = NoiseModel.noiseless()
        assert leaf_prep_rate(quiet, 8, 100) == 0.0
        assert upper_prep_rate(quiet, 8, 0.0, 500.0) == 0.0
        assert check_rates(quiet, 8) == (0.0, 0.0)
        assert injection_rate(quiet, 8, 0.0, 1000.0) == 0.0
        # upper-level prep collapses to the incoming chain error
        assert upper_prep_rate(quiet, 8, 0.37, 500.0) == pytest.approx(0.37)

    def test_idle_factor_drops_when_disabled(self):
        n, s = 8, 200
        with_idle = NoiseModel(p2=1e-3, p1=1e-4, p_meas=1e-4, p_idle=1e-6)
        without = NoiseModel(p2=1e-3, p1=1e-4, p_meas=1e-4, p_idle=0.0)
        gate_only = 1 - (1 - 1e-3) ** (s / 2 + n) * (1 - 1e-4) ** (s / 2 + 2 * n)
        assert leaf_prep_rate(without, n, s) == pytest.approx(gate_only, rel=1e-12)
        assert leaf_prep_rate(with_idle, n, s) > leaf_prep_rate(without, n, s)

    def test_formulas_match_independent_evaluation(self):
        """Second implementation via direct exponentiation at n=70, p=1e-3."""
        n, p, s, r = 70, 1e-3, 613, 5
        noise = NoiseModel.standard(p, idle=True)
        expect_pp = 1 - (1 - p) ** (s / 2 + n) * (1 - p / 10) ** (s / 2 + 2 * n) * (
            1 - p / 1000
        ) ** (s * n / 3)
        assert leaf_prep_rate(noise, n, s) == pytest.approx(expect_pp, rel=1e-12)
        p_de, p_ue = check_rates(noise, n)
        expect_de = 1 - (1 - 8 * p / 15) ** (2 * n / 3) * (1 - 2 * p / 30) ** 2 * (
            1 - p / 10
        )
        expect_ue = 1 - (1 - 6 * p / 15) ** (2 * n / 3)
        assert p_de == pytest.approx(expect_de, rel=1e-12)
        assert p_ue == pytest.approx(expect_ue, rel=1e-12)
        vec = rsp_vector(leaf_prep_rate(noise, n, s), r)
        for k in range(r):
            vec = step_check(vec, k, p_de, p_ue)
        g_idle = idle_exposure(n, s, r, vec)
        expect_base = s * n / 3 + r * (4.5 * n * n - 3 * n)
        assert g_idle >= expect_base  # restart terms only add
        p_i = injection_rate(noise, n, 0.0, g_idle)
        expect_pi = 1 - (1 - p) ** n * (1 - p / 10) ** (4 * n) * (
            1 - p / 1000
        ) ** g_idle
        assert p_i == pytest.approx(expect_pi, rel=1e-12)

    def test_error_params_bundle(self):
        params = error_params("leaf", NO_IDLE, 8, 64, 2)
        assert isinstance(params, ErrorParams)
        assert params.g_p == 3 * 8 + 64
        assert params.g_c == 1.5 * 8 + 3
        assert params.g_i == 5 * 8
        with pytest.raises(RegimeError):
            error_params("nope", NO_IDLE, 8, 64, 2)
        with pytest.raises(RegimeError):
            leaf_prep_rate(NO_IDLE, 8, -5)


class TestEstimateTree:
    def test_noiseless(self):
        tree = uniform_tree(100, 2, 2, 2, 3)
        res = estimate_tree(tree, 8, NoiseModel.noiseless())
        assert res.p_log == 0.0
        n = 8
        # census: per leaf g_P = 3n + s_leaf, checks, injection; per mid vertex
        # g_P = 3n + children total
        leaf_total = sum(
            (3 * n + v.s) + 3 * (1.5 * n + 3) + 5 * n for v in tree.levels[2]
        )
        mid_total = 2 * (3 * n + leaf_total / 2 + 3 * (1.5 * n + 3) + 5 * n)
        assert res.omega_time == pytest.approx(mid_total / 100, rel=1e-12)
        assert res.provenance == "markov"

    def test_single_block_matches_hand_chain(self):
        """Depth-1 single vertex equals the hand-evaluated vector chain."""
        n, s, r = 8, 64, 2
        noise = NO_IDLE
        tree = two_vertex_tree(s, r)
        res = estimate_tree(tree, n, noise)
        p_p = leaf_prep_rate(noise, n, s)
        p_de, p_ue = check_rates(noise, n)
        vec = rsp_vector(p_p, r)
        for k in range(r):
            vec = step_check(vec, k, p_de, p_ue)
        vec = step_injection(vec, injection_rate(noise, n, 0.0, None))
        assert res.p_log == pytest.approx(logical_rate(vec), rel=1e-12)
        g_tot = expected_gates(vec, 3 * n + s, 1.5 * n + 3, 5 * n, r)
        assert res.omega_time == pytest.approx(g_tot / s, rel=1e-12)

    def test_sibling_chain_error_accumulates(self):
        one = estimate_tree(uniform_tree(128, 1, 1, 0, 3), 8, NO_IDLE)
        four = estimate_tree(uniform_tree(128, 1, 4, 0, 3), 8, NO_IDLE)
        assert four.p_log > one.p_log * 2  # more injections, more floor

    def test_omega_space(self):
        res = estimate_tree(uniform_tree(100, 2, 2, 2, 1), 8, NO_IDLE)
        assert res.omega_space == pytest.approx((5 * 8 + 1) / 8)

    def test_deterministic(self):
        tree = uniform_tree(256, 2, 2, 3, 4)
        a = estimate_tree(tree, 16, NO_IDLE)
        b = estimate_tree(tree, 16, NO_IDLE)
        assert a == b


class TestSimulatorStructureCrossCheck:
    def test_forced_detection_gate_accounting(self):
        """Synthetic detection rates: simulator matches the g_tot structure.

        The analytic total prices a restart at check k as g_P + k g_C; the
        engine also executes the firing check, so it sits one g_C higher per
        restart.  Compare against that corrected expectation.
        """
        import random as _random

        from clinr.compiler import compile_program
        from clinr.simulator import run_shot
        from test_circuit import _random_circuit

        rng = _random.Random(5)
        n, s, r, q = 3, 30, 2, 0.3
        circ = _random_circuit(rng, n, s)
        tree = uniform_tree(s, 1, 1, 0, r)
        program = compile_program(circ, tree, seed=1, resample_stabilizers=False)
        noise = NoiseModel.noiseless()

        def override(vertex, k, rng_):
            return rng_.random() < q

        shots = 4000
        total = 0.0
        for i in range(shots):
            shot = run_shot(
                program, noise, _random.Random(i), detector_override=override
            )
            total += shot.executed_gates
        mean = total / shots

        g_p = 3 * n + s
        g_c = program.blocks[1].fixed_stabilizer.weight + 3
        g_c2 = program.blocks[2].fixed_stabilizer.weight + 3
        g_i = 5 * n
        # exact expectation for geometric restarts at per-check rate q,
        # counting the firing check as executed
        p_res = 1 - (1 - q) ** r
        m_restarts = 1 / (1 - p_res) - 1
        # detection at check 0 costs g_p + g_c, at check 1 costs g_p + g_c + g_c2
        w0 = q / p_res
        cost = w0 * (g_p + g_c) + (1 - w0) * (g_p + g_c + g_c2)
        expect = g_p + g_c + g_c2 + g_i + m_restarts * cost
        assert mean == pytest.approx(expect, rel=0.02)

        # the package's analytic reading (restart re-runs k completed checks)
        vec = np.zeros(r + 2)
        vec[0] = (1 - q) ** r
        vec[2] = q
        vec[3] = (1 - q) * q
        analytic = expected_gates(vec, g_p, (g_c + g_c2) / 2, g_i, r)
        # same structure, within one average check per restart
        assert abs(mean - analytic) <= m_restarts * max(g_c, g_c2) + 3.0
