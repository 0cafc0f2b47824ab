"""Tests for the single-system ball model and its one-bit capacity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gptlab import (
    EXACT_TOL,
    OPT_TOL,
    DomainError,
    TheoryConfig,
    capacity_search,
    capacity_upper_bound,
    contract,
    mutual_information,
    one_bit_protocol,
    validate_measurement,
)
from gptlab.hst import (
    canonical_measurement,
    make_effect,
    make_extremal_effect,
    make_state,
    random_direction,
    random_measurement,
    random_pure_state,
    random_state,
)


class TestConstructors:
    def test_mixed_state(self):
        state = make_state(np.zeros(5))
        assert np.array_equal(state.entries, np.concatenate(([1.0], np.zeros(5))))

    def test_bloch_axis_state(self):
        state = make_state([0.0, 0.0, 1.0])
        assert state.dim == 3
        assert np.linalg.norm(state.r) == 1.0

    def test_rejects_long_state(self):
        with pytest.raises(DomainError, match="norm"):
            make_state([1.1, 0.0])

    def test_rejects_unaddressable_dimension(self):
        with pytest.raises(DomainError, match="dimension"):
            make_state(np.zeros(2**20 + 1))

    def test_rejects_non_unit_effect_direction(self):
        with pytest.raises(DomainError, match="norm"):
            make_extremal_effect([1.1, 0.0])

    def test_make_effect_validates_range(self):
        make_effect(0.5, [0.9, 0.0])
        with pytest.raises(DomainError):
            make_effect(0.9, [0.9, 0.0])


class TestCanonicalMeasurement:
    def test_aligned_state_is_deterministic(self):
        m = np.array([1.0, 0.0, 0.0])
        meas = canonical_measurement(m)
        state = make_state(m)
        probs = [contract(e, state) for e in meas.effects]
        assert probs == [1.0, 0.0]

    def test_mixed_state_is_uniform(self):
        meas = canonical_measurement([0.0, 1.0])
        state = make_state(np.zeros(2))
        assert [contract(e, state) for e in meas.effects] == [0.5, 0.5]

    def test_outcome_formula(self):
        # probabilities are (1 +- m . r) / 2
        rng = np.random.default_rng(5)
        for _ in range(50):
            m = random_direction(4, rng)
            state = random_state(4, rng)
            meas = canonical_measurement(m)
            overlap = float(m @ state.r)
            probs = [contract(e, state) for e in meas.effects]
            assert abs(probs[0] - 0.5 * (1 + overlap)) < EXACT_TOL
            assert abs(probs[1] - 0.5 * (1 - overlap)) < EXACT_TOL

    def test_probabilities_valid_across_dimensions(self):
        rng = np.random.default_rng(11)
        for dim in range(1, 9):
            directions = rng.standard_normal((1000, dim))
            directions /= np.linalg.norm(directions, axis=1, keepdims=True)
            points = rng.standard_normal((1000, dim))
            points /= np.linalg.norm(points, axis=1, keepdims=True)
            points *= rng.random((1000, 1)) ** (1.0 / dim)
            overlaps = np.einsum("ij,ij->i", directions, points)
            plus = 0.5 * (1 + overlaps)
            minus = 0.5 * (1 - overlaps)
            assert plus.min() >= -EXACT_TOL and plus.max() <= 1 + EXACT_TOL
            assert np.abs(plus + minus - 1).max() < EXACT_TOL


class TestCapacityUpperBound:
    def test_unit_radii_give_one_bit(self):
        assert capacity_upper_bound(1.0, 1.0) == 1.0

    def test_zero_effect_norm_gives_zero(self):
        assert capacity_upper_bound(0.0, 1.0) == 0.0

    @settings(max_examples=50, deadline=None)
    @given(
        m1=st.floats(0.0, 5.0),
        m2=st.floats(0.0, 5.0),
        r=st.floats(0.0, 5.0),
    )
    def test_monotone(self, m1, m2, r):
        lo, hi = sorted((m1, m2))
        assert capacity_upper_bound(lo, r) <= capacity_upper_bound(hi, r) + 1e-12
        assert capacity_upper_bound(r, lo) <= capacity_upper_bound(r, hi) + 1e-12


class TestOneBitProtocol:
    def test_identity_channel_any_dimension(self):
        for dim in (1, 3, 7):
            ch = one_bit_protocol(dim)
            assert np.array_equal(ch.conditional, np.eye(2))
            assert mutual_information(ch) == 1.0

    def test_orthogonal_decoding_carries_nothing(self):
        encode = np.array([1.0, 0.0, 0.0])
        decode = np.array([0.0, 1.0, 0.0])
        ch = one_bit_protocol(3, encode_direction=encode, decode_direction=decode)
        assert np.array_equal(ch.conditional, np.full((2, 2), 0.5))
        assert mutual_information(ch) == 0.0


class TestRandomFamilies:
    def test_random_pure_state_is_pure(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            state = random_pure_state(5, rng)
            assert abs(np.linalg.norm(state.r) - 1.0) < EXACT_TOL

    def test_random_measurements_are_valid(self):
        rng = np.random.default_rng(1)
        theory = TheoryConfig.base(2)
        for _ in range(30):
            meas = random_measurement(3, rng)
            assert validate_measurement(meas, theory).passed

    def test_capacity_search_never_beats_one_bit(self):
        best = capacity_search(3, trials=150, seed=0)
        assert 1.0 <= best <= 1.0 + OPT_TOL
        assert best <= capacity_upper_bound(1.0, 1.0) + OPT_TOL
