"""Single-system hypersphere models.

The normalised states of an n-dimensional hypersphere system form the unit
ball: ``omega_r = (1, r)`` with ``||r|| <= 1``, pure iff ``||r|| = 1``.  The
extremal effects are ``e_m = (1, m)/2`` with ``||m|| = 1``; every physical
effect is a convex combination of extremals, the zero effect and the unit.
Each unit vector m defines the canonical two-outcome measurement
``{e_m, e_-m}``.  A single such system can carry at most one bit, which the
antipodal protocol attains.
"""

from __future__ import annotations

import numpy as np

from .core import (
    EXACT_TOL,
    Channel,
    DomainError,
    Effect,
    GptError,
    Measurement,
    State,
    contract,
    mutual_information,
    unit_effect,
)

MAX_DIM = 2**20


def _check_dim(dim: int) -> None:
    if dim < 1 or dim > MAX_DIM:
        raise DomainError(f"ball dimension must be in [1, {MAX_DIM}], got {dim}")


def make_state(r) -> State:
    """State ``(1, r)``; requires ``||r|| <= 1``."""
    r = np.asarray(r, dtype=float)
    _check_dim(r.size)
    norm = np.linalg.norm(r)
    if norm > 1.0 + EXACT_TOL:
        raise DomainError(f"state coordinates have norm {norm!r} > 1")
    return State(np.concatenate(([1.0], r)))


def make_extremal_effect(direction) -> Effect:
    """Extremal effect ``(1, m)/2``; requires ``||m|| = 1``."""
    direction = np.asarray(direction, dtype=float)
    _check_dim(direction.size)
    norm = np.linalg.norm(direction)
    if abs(norm - 1.0) > EXACT_TOL:
        raise DomainError(f"effect direction has norm {norm!r}, expected 1")
    return Effect(0.5 * np.concatenate(([1.0], direction)))


def make_effect(weight: float, direction) -> Effect:
    """General effect ``weight * (1, direction)``, validated on the ball.

    Validity over the unit ball is exactly ``weight*(1+||direction||) <= 1``
    and ``weight*(1-||direction||) >= 0``.
    """
    direction = np.asarray(direction, dtype=float)
    _check_dim(direction.size)
    e = Effect(weight * np.concatenate(([1.0], direction)))
    lo, hi = effect_probability_range(e)
    if lo < -EXACT_TOL or hi > 1.0 + EXACT_TOL:
        raise DomainError(
            f"effect takes probabilities in [{lo!r}, {hi!r}] on the ball"
        )
    return e


def effect_probability_range(effect: Effect) -> tuple:
    """Exact min/max of ``e . omega`` over the unit ball of states."""
    base = float(effect.entries[0])
    span = float(np.linalg.norm(effect.entries[1:]))
    return base - span, base + span


def validate_effect(effect: Effect) -> bool:
    lo, hi = effect_probability_range(effect)
    return lo >= -EXACT_TOL and hi <= 1.0 + EXACT_TOL


def canonical_measurement(direction) -> Measurement:
    """The two-outcome measurement ``{e_m, e_-m}`` along a unit vector."""
    direction = np.asarray(direction, dtype=float)
    return Measurement((make_extremal_effect(direction), make_extremal_effect(-direction)))


def capacity_upper_bound(effect_norm: float, state_norm: float) -> float:
    """Classical-capacity bound ``log2(1 + M R)`` from the two norm radii."""
    if effect_norm < 0 or state_norm < 0:
        raise GptError("norm bounds must be non-negative")
    return float(np.log2(1.0 + effect_norm * state_norm))


def one_bit_protocol(dim: int, encode_direction=None, decode_direction=None) -> Channel:
    """Antipodal encoding read out by a canonical measurement.

    Messages 0 and 1 are encoded in ``omega_r`` and ``omega_-r`` with a
    uniform prior and decoded along ``decode_direction`` (default: the
    encoding direction, which yields the exact 2x2 identity channel and
    mutual information 1).
    """
    _check_dim(dim)
    if encode_direction is None:
        encode_direction = np.zeros(dim)
        encode_direction[0] = 1.0
    encode_direction = np.asarray(encode_direction, dtype=float)
    if decode_direction is None:
        decode_direction = encode_direction
    states = (make_state(encode_direction), make_state(-encode_direction))
    meas = canonical_measurement(decode_direction)
    conditional = np.array(
        [[contract(e, s) for e in meas.effects] for s in states]
    )
    return Channel(prior=np.array([0.5, 0.5]), conditional=conditional)


def random_direction(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point on the unit sphere (normalised Gaussian vector)."""
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_pure_state(dim: int, rng: np.random.Generator) -> State:
    return make_state(random_direction(dim, rng))


def random_state(dim: int, rng: np.random.Generator) -> State:
    """State drawn uniformly from the unit ball."""
    radius = rng.random() ** (1.0 / dim)
    return make_state(radius * random_direction(dim, rng))


def random_measurement(
    dim: int,
    rng: np.random.Generator,
    max_outcomes: int = 8,
    max_components: int = 8,
    n_outcomes: int | None = None,
) -> Measurement:
    """Random measurement built from physical effects only.

    Mixes canonical two-outcome measurements (and occasionally the trivial
    unit measurement) with flat-simplex weights, scattering their effects
    over a shared outcome set.  Every resulting effect is a convex
    combination of extremal effects, the zero effect and the unit, and the
    effects sum to the unit by construction.
    """
    if n_outcomes is None:
        n_outcomes = int(rng.integers(2, max_outcomes + 1))
    n_components = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(n_components))
    table = np.zeros((n_outcomes, dim + 1))
    for w in weights:
        if rng.random() < 0.15:
            slot = rng.integers(n_outcomes)
            table[slot] += w * unit_effect(dim).entries
        else:
            pair = canonical_measurement(random_direction(dim, rng))
            slots = rng.choice(n_outcomes, size=2, replace=False)
            for slot, e in zip(slots, pair.effects):
                table[slot] += w * e.entries
    return Measurement(tuple(Effect(row) for row in table))


def capacity_search(
    dim: int,
    trials: int,
    seed: int,
    max_states: int = 8,
    max_outcomes: int = 8,
    ba_tol: float = 1e-6,
    ba_max_iter: int = 60,
) -> float:
    """Best information rate found over random single-system protocols.

    Each trial draws up to ``max_states`` encoding states and a random
    measurement, then optimises the input prior.  The antipodal protocol is
    always included, so the result is at least 1 bit; the returned maximum
    must never exceed 1 by more than optimizer slack.  The per-trial prior
    optimisation reports an achieved rate (a lower bound), so looser
    optimizer settings never inflate the maximum.
    """
    from .capacity import blahut_arimoto

    rng = np.random.default_rng(seed)
    best = mutual_information(one_bit_protocol(dim))
    for _ in range(trials):
        n_states = int(rng.integers(2, max_states + 1))
        states = []
        for _ in range(n_states):
            if rng.random() < 0.5:
                states.append(random_pure_state(dim, rng))
            else:
                states.append(random_state(dim, rng))
        meas = random_measurement(dim, rng, max_outcomes=max_outcomes)
        effect_rows = np.stack([e.entries for e in meas.effects])
        conditional = np.stack([effect_rows @ s.entries for s in states])
        result = blahut_arimoto(conditional, tol=ba_tol, max_iter=ba_max_iter)
        best = max(best, result.capacity_bits)
    return best
