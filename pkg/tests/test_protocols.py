"""Tests for dense coding, classification, baselines, teleportation, swapping."""

import numpy as np
import pytest

from gptlab import (
    EXACT_TOL,
    OPT_TOL,
    GptError,
    ProtocolLabel,
    TheoryConfig,
    bipartite_contract,
    bipartite_unit,
    classify,
    dense_coding,
    entangled_effect,
    entangled_state,
    entanglement_swap,
    hadamard_vector,
    local_transformation,
    mutual_information,
    no_signalling_spread,
    product_decoding_baseline,
    product_state,
    separable_baseline,
    teleport,
)
from gptlab.capacity import blahut_arimoto
from gptlab.hst import make_extremal_effect, make_state, random_pure_state, random_state


def teleport_joint_oracle(e_x, e_y, omega, phi_corrected) -> float:
    """Brute-force triple-index contraction (E_x (x) e_y).(omega (x) phi)."""
    return float(
        np.einsum("ij,k,i,jk->", e_x.matrix, e_y.entries, omega.entries, phi_corrected)
    )


def swap_joint_oracle(e_x, e_y, phi_ac, phi_corrected) -> float:
    """Brute-force four-index contraction (E_x (x) E'_y).(phi_ac (x) phi)."""
    return float(
        np.einsum(
            "ij,kc,ic,jk->", e_x.matrix, e_y.matrix, phi_ac.matrix, phi_corrected
        )
    )


class TestDenseCoding:
    def test_identity_channel_exact(self):
        for n_bits in (1, 2, 5):
            run = dense_coding(n_bits)
            size = 2**n_bits
            assert np.array_equal(run.channel.conditional, np.eye(size))
            assert run.info_bits == float(n_bits)

    def test_initial_state_is_identity_matrix(self):
        run = dense_coding(2)
        assert np.array_equal(run.initial_state.matrix, np.eye(4))

    def test_theory_mismatch_rejected(self):
        with pytest.raises(GptError):
            dense_coding(3, theory=TheoryConfig.base(2))


class TestClassify:
    def test_examples(self):
        assert classify(3.0, 1.0).label is ProtocolLabel.HYPERDENSE
        assert classify(2.0, 1.0).label is ProtocolLabel.SUPERDENSE
        assert classify(1.0, 1.0).label is ProtocolLabel.ORDINARY

    def test_strictness_near_thresholds(self):
        assert classify(1.0 + OPT_TOL / 2, 1.0).label is ProtocolLabel.ORDINARY
        assert classify(2.0 + OPT_TOL / 2, 1.0).label is ProtocolLabel.SUPERDENSE

    def test_monotone_in_rate(self):
        ranks = {
            ProtocolLabel.ORDINARY: 0,
            ProtocolLabel.SUPERDENSE: 1,
            ProtocolLabel.HYPERDENSE: 2,
        }
        previous = 0
        for rate in np.linspace(0.0, 3.0, 61):
            rank = ranks[classify(float(rate), 1.0).label]
            assert rank >= previous
            previous = rank

    def test_rejects_negative_inputs(self):
        with pytest.raises(GptError):
            classify(-0.1, 1.0)


class TestSeparableBaseline:
    def test_never_beats_one_bit(self):
        best = separable_baseline(3, trials=300, seed=0)
        assert best <= 1.0 + OPT_TOL

    def test_product_decoding_never_beats_one_bit(self):
        best = product_decoding_baseline(2, trials=150, seed=1)
        assert best <= 1.0 + OPT_TOL

    def test_bell_decoding_on_product_state_formula(self):
        # p(y|x) = (1 + a_x . T_hat_y b) / 2^N, never informative beyond 1 bit
        rng = np.random.default_rng(2)
        n_bits = 2
        a = random_pure_state(3, rng)
        b = random_pure_state(3, rng)
        phi = product_state(a, b)
        conditional = np.zeros((4, 4))
        for x in range(4):
            encoded = local_transformation(x, n_bits).apply_left(phi)
            a_x = hadamard_vector(x, n_bits)[1:] * a.r
            for y in range(4):
                p = bipartite_contract(entangled_effect(y, n_bits), encoded)
                hat_y = hadamard_vector(y, n_bits)[1:]
                expected = 0.25 * (1.0 + a_x @ (hat_y * b.r))
                assert abs(p - expected) < EXACT_TOL
                conditional[x, y] = p
        assert blahut_arimoto(conditional).capacity_bits <= 1.0 + OPT_TOL

    def test_trivial_decoding_carries_nothing(self):
        rng = np.random.default_rng(3)
        phi = product_state(random_state(3, rng), random_state(3, rng))
        unit = bipartite_unit(3, 3)
        conditional = np.array(
            [
                [bipartite_contract(unit, local_transformation(x, 2).apply_left(phi))]
                for x in range(4)
            ]
        )
        from gptlab import Channel

        ch = Channel(np.full(4, 0.25), conditional)
        assert mutual_information(ch) == 0.0

    def test_rejects_bad_dimension(self):
        with pytest.raises(GptError):
            separable_baseline(4, trials=1, seed=0)

    def test_no_signalling_marginal(self):
        for n_bits in (2, 3):
            assert no_signalling_spread(n_bits, trials=10, seed=0) <= EXACT_TOL


class TestTeleport:
    def test_mixed_state_gives_uniform_conditional(self):
        n_bits = 2
        run = teleport(make_state(np.zeros(3)), n_bits, seed=0)
        assert run.passed
        # canonical pair on the mixed state: both outcomes carry 1/2
        assert np.abs(run.joint - 2.0**-n_bits * 0.5).max() < EXACT_TOL

    def test_axis_state_against_brute_force(self):
        n_bits = 2
        omega = make_state([1.0, 0.0, 0.0])
        e_y = make_extremal_effect([1.0, 0.0, 0.0])
        phi0 = entangled_state(0, n_bits)
        for x in range(4):
            t_x = local_transformation(x, n_bits)
            corrected = phi0.matrix @ t_x.matrix.T
            value = teleport_joint_oracle(
                entangled_effect(x, n_bits), e_y, omega, corrected
            )
            assert abs(value - 2.0**-n_bits * 1.0) < EXACT_TOL

    def test_joint_rows_sum_to_outcome_prior(self):
        rng = np.random.default_rng(4)
        for n_bits in (1, 2, 3):
            state = random_pure_state(2**n_bits - 1, rng)
            run = teleport(state, n_bits, seed=5)
            assert np.all(run.outcome_priors == 2.0**-n_bits)
            assert np.abs(run.joint.sum(axis=1) - run.outcome_priors).max() < EXACT_TOL

    def test_residuals_small_for_random_states(self):
        rng = np.random.default_rng(6)
        for n_bits in (2, 3):
            for i in range(100):
                state = random_pure_state(2**n_bits - 1, rng)
                run = teleport(state, n_bits, seed=i, n_effects=20)
                assert run.passed
                assert run.max_residual < 1e-12

    def test_rejects_wrong_dimension(self):
        with pytest.raises(GptError):
            teleport(make_state(np.zeros(4)), 2)


class TestEntanglementSwap:
    def test_conditional_reproduces_swapped_state(self):
        for n_bits in (2, 3):
            size = 2**n_bits
            for label in range(size):
                run = entanglement_swap(n_bits, label=label)
                assert run.passed
                assert run.max_residual < 1e-12
                expected = np.zeros(size)
                expected[label] = 1.0
                assert np.array_equal(run.expected, expected)
                for x in range(size):
                    assert np.array_equal(run.conditional[x], expected)

    def test_outcome_priors_uniform(self):
        run = entanglement_swap(2, label=1)
        assert np.all(run.outcome_priors == 0.25)
        assert np.abs(run.joint.sum(axis=1) - run.outcome_priors).max() < EXACT_TOL

    def test_degenerate_classical_case(self):
        run = entanglement_swap(1, label=1)
        assert run.passed
        assert np.array_equal(run.conditional, np.tile([0.0, 1.0], (2, 1)))

    def test_against_brute_force_contraction(self):
        n_bits = 2
        label = 1
        phi_ac = entangled_state(label, n_bits)
        phi0 = entangled_state(0, n_bits)
        run = entanglement_swap(n_bits, label=label)
        for x in range(4):
            corrected = phi0.matrix @ local_transformation(x, n_bits).matrix.T
            for y in range(4):
                value = swap_joint_oracle(
                    entangled_effect(x, n_bits),
                    entangled_effect(y, n_bits),
                    phi_ac,
                    corrected,
                )
                assert abs(value - run.joint[x, y]) < EXACT_TOL

    def test_label_out_of_range(self):
        with pytest.raises(GptError):
            entanglement_swap(2, label=7)
