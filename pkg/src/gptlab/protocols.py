"""End-to-end protocol simulations on the bipartite hypersphere models.

Dense coding: the parties share the entangled state ``phi_0 = I``; the
sender encodes an N-bit message x by the local rotation ``T_x``, turning
the shared state into ``phi_x``; the receiver's Bell-type measurement then
returns ``y = x`` with certainty, for N bits per transmitted system.  A
local system carries at most 1 bit, so the protocol is superdense for
``N = 2`` and hyperdense for ``N > 2``.

Teleportation: the sender measures ``{E_x}`` on the input system together
with her half of ``phi_0`` and announces x; after the receiver's correction
``T_x`` his system reproduces the input state's statistics exactly, each
outcome occurring with probability ``2^-N``.  Feeding an entangled input
through the same circuit swaps entanglement onto the receiver's side.

The separable baselines re-run dense coding with product resources and
check that nothing beats the single-system rate of 1 bit.

The converse statement that teleportation needs a classical channel of N
bits is an impossibility argument, not an algorithm, and is out of scope
here; only the forward protocols are simulated.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import variants
from .capacity import blahut_arimoto
from .core import (
    EXACT_TOL,
    OPT_TOL,
    BipartiteEffect,
    BipartiteState,
    Channel,
    DomainError,
    Effect,
    GptError,
    State,
    TheoryConfig,
    mutual_information,
    product_state,
    unit_effect,
)
from .hadamard import (
    bell_measurement,
    entangled_effect,
    entangled_state,
    local_transformation,
)
from .hst import (
    make_extremal_effect,
    random_direction,
    random_measurement,
    random_state,
)


class ProtocolLabel(Enum):
    ORDINARY = "ORDINARY"
    SUPERDENSE = "SUPERDENSE"
    HYPERDENSE = "HYPERDENSE"


@dataclass(frozen=True)
class Classification:
    """Protocol class together with the capacities that decided it."""

    label: ProtocolLabel
    dc_info_bits: float
    local_capacity_bits: float


@dataclass(frozen=True)
class DenseCodingRun:
    n_bits: int
    theory: TheoryConfig
    initial_state: BipartiteState
    channel: Channel
    info_bits: float


@dataclass(frozen=True, eq=False)
class TeleportationRun:
    n_bits: int
    input_state: State
    joint: np.ndarray
    outcome_priors: np.ndarray
    corrections: tuple
    max_residual: float
    passed: bool
    witness: tuple | None


@dataclass(frozen=True, eq=False)
class SwapRun:
    n_bits: int
    label: int
    joint: np.ndarray
    outcome_priors: np.ndarray
    conditional: np.ndarray
    expected: np.ndarray
    max_residual: float
    passed: bool


def _bell_channel(states, n_bits: int) -> np.ndarray:
    effects = np.stack([e.matrix for e in bell_measurement(n_bits).effects])
    stacked = np.stack([phi.matrix for phi in states])
    return np.einsum("ymn,xmn->xy", effects, stacked)


def dense_coding(n_bits: int, theory: TheoryConfig | None = None, seed: int = 0) -> DenseCodingRun:
    """Run the dense-coding protocol of the selected theory.

    The base model gives the exact ``2^N`` identity channel and ``N`` bits.
    Deformed models dispatch to their own encode/decode families; ``seed``
    only matters for the embedded model's random rotations.
    """
    if theory is None:
        theory = TheoryConfig.base(n_bits)
    if theory.n_bits != n_bits:
        raise GptError(
            f"theory is configured for {theory.n_bits} bits, asked for {n_bits}"
        )
    if theory.kind == "base":
        phi0 = entangled_state(0, n_bits)
        states = [
            local_transformation(x, n_bits).apply_left(phi0)
            for x in range(2**n_bits)
        ]
        conditional = _bell_channel(states, n_bits)
        prior = np.full(2**n_bits, 2.0**-n_bits)
        channel = Channel(prior=prior, conditional=conditional)
        initial = phi0
    elif theory.kind == "lambda-tau":
        channel = variants.lt_channel(theory)
        initial = variants.lt_state(0, theory)
    elif theory.kind == "weak":
        channel = variants.weak_dense_coding(theory)
        initial = variants.weak_state(0, theory)
    elif theory.kind == "embedded":
        channel = variants.embedded_dense_coding(theory, rotation_seed=seed)
        initial = variants.embedded_state(0, theory)
    else:  # pragma: no cover - TheoryConfig already rejects unknown kinds
        raise GptError(f"unsupported theory kind {theory.kind!r}")
    return DenseCodingRun(
        n_bits=n_bits,
        theory=theory,
        initial_state=initial,
        channel=channel,
        info_bits=mutual_information(channel),
    )


def classify(dc_info_bits: float, local_capacity_bits: float) -> Classification:
    """Grade a dense-coding rate against the local classical capacity.

    Optimizer slack is subtracted from the rate before the strict
    comparisons, so iterative estimates never over-classify.
    """
    if dc_info_bits < 0 or local_capacity_bits < 0:
        raise GptError("capacities must be non-negative")
    adjusted = dc_info_bits - OPT_TOL
    if adjusted > 2.0 * local_capacity_bits:
        label = ProtocolLabel.HYPERDENSE
    elif adjusted > local_capacity_bits:
        label = ProtocolLabel.SUPERDENSE
    else:
        label = ProtocolLabel.ORDINARY
    return Classification(
        label=label,
        dc_info_bits=dc_info_bits,
        local_capacity_bits=local_capacity_bits,
    )


def _n_bits_for_dim(dim: int) -> int:
    n_bits = (dim + 1).bit_length() - 1
    if 2**n_bits != dim + 1:
        raise GptError(f"ball dimension {dim} is not of the form 2^N - 1")
    return n_bits


def random_product_measurement(
    dim_a: int,
    dim_b: int,
    rng: np.random.Generator,
    max_components: int = 8,
    max_outcomes_side: int = 4,
) -> list:
    """Convex combination of product measurements, flattened over outcomes.

    Components share one (y1, y2) outcome grid; each contributes the
    product of two single-system measurements, mixed with flat-simplex
    weights.  The result sums to the bipartite unit by construction.
    """
    n_a = int(rng.integers(2, max_outcomes_side + 1))
    n_b = int(rng.integers(2, max_outcomes_side + 1))
    n_components = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(n_components))
    table = np.zeros((n_a * n_b, dim_a + 1, dim_b + 1))
    for w in weights:
        side_a = random_measurement(dim_a, rng, n_outcomes=n_a)
        side_b = random_measurement(dim_b, rng, n_outcomes=n_b)
        for y1, ea in enumerate(side_a.effects):
            for y2, eb in enumerate(side_b.effects):
                table[y1 * n_b + y2] += w * np.outer(ea.entries, eb.entries)
    return [BipartiteEffect(mat) for mat in table]


def _max_rate(conditional: np.ndarray) -> float:
    result = blahut_arimoto(conditional, tol=1e-8, max_iter=400)
    return result.capacity_bits


def separable_baseline(
    dim: int,
    trials: int,
    seed: int,
    bell_fraction: float = 0.3,
) -> float:
    """Best dense-coding rate over random product-state protocols.

    Each trial shares a random product state, encodes with a random subset
    of the discrete rotations, and decodes either with the Bell-type
    measurement or with a random convex-product measurement; the input
    prior is then optimised.  Product resources cannot beat one bit, so the
    returned maximum must stay below ``1 + OPT_TOL``.
    """
    if trials < 1:
        raise GptError("trials must be >= 1")
    n_bits = _n_bits_for_dim(dim)
    rng = np.random.default_rng(seed)
    bell_effects = np.stack([e.matrix for e in bell_measurement(n_bits).effects])
    best = 0.0
    for _ in range(trials):
        phi = product_state(random_state(dim, rng), random_state(dim, rng))
        n_messages = int(rng.integers(2, 2**n_bits + 1))
        labels = rng.choice(2**n_bits, size=n_messages, replace=False)
        encoded = np.stack(
            [
                local_transformation(int(x), n_bits).apply_left(phi).matrix
                for x in labels
            ]
        )
        if rng.random() < bell_fraction:
            effect_stack = bell_effects
        else:
            effect_stack = np.stack(
                [e.matrix for e in random_product_measurement(dim, dim, rng)]
            )
        conditional = np.einsum("ymn,xmn->xy", effect_stack, encoded)
        best = max(best, _max_rate(conditional))
    return best


def product_decoding_baseline(n_bits: int, trials: int, seed: int) -> float:
    """Best rate with convex-product decodings on arbitrary shared states.

    The shared state may be entangled here; only the decoding is separable,
    and one bit remains the ceiling.
    """
    if trials < 1:
        raise GptError("trials must be >= 1")
    dim = 2**n_bits - 1
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(trials):
        if rng.random() < 0.5:
            phi = entangled_state(int(rng.integers(2**n_bits)), n_bits)
        else:
            phi = product_state(random_state(dim, rng), random_state(dim, rng))
        encoded = np.stack(
            [
                local_transformation(x, n_bits).apply_left(phi).matrix
                for x in range(2**n_bits)
            ]
        )
        effect_stack = np.stack(
            [e.matrix for e in random_product_measurement(dim, dim, rng)]
        )
        conditional = np.einsum("ymn,xmn->xy", effect_stack, encoded)
        best = max(best, _max_rate(conditional))
    return best


def no_signalling_spread(n_bits: int, trials: int, seed: int) -> float:
    """Largest x-dependence of the receiver-side marginal under product decodings.

    For effects ``e_(y1) (x) f_(y2)`` measured on the encoded states
    ``T_x phi_0``, the marginal ``p(y2|x)`` may not depend on x; returns the
    maximum spread observed (should vanish to rounding).
    """
    dim = 2**n_bits - 1
    rng = np.random.default_rng(seed)
    phi0 = entangled_state(0, n_bits)
    encoded = np.stack(
        [
            local_transformation(x, n_bits).apply_left(phi0).matrix
            for x in range(2**n_bits)
        ]
    )
    worst = 0.0
    for _ in range(trials):
        rows_a = np.stack([e.entries for e in random_measurement(dim, rng).effects])
        rows_b = np.stack([e.entries for e in random_measurement(dim, rng).effects])
        # p(y1, y2 | x) = e_(y1) . (phi_x f_(y2)); marginalise the sender side.
        joint = np.einsum("am,xmn,bn->xab", rows_a, encoded, rows_b)
        marginal = joint.sum(axis=1)
        worst = max(worst, float((marginal.max(axis=0) - marginal.min(axis=0)).max()))
    return worst


def teleport(
    input_state: State,
    n_bits: int,
    seed: int = 0,
    n_effects: int = 100,
) -> TeleportationRun:
    """Teleport ``input_state`` through the shared ``phi_0`` channel.

    For every sender outcome x the three-system contraction
    ``(E_x (x) e_y) . (omega (x) phi_0 T_x^t)`` is evaluated and compared
    with ``2^-N e_y . omega`` for ``n_effects`` random canonical receiver
    effects plus the unit; the largest conditional deviation is reported.
    The joint table uses a canonical two-outcome receiver measurement, so
    its rows sum to the outcome prior ``p_x = 2^-N``.
    """
    dim = 2**n_bits - 1
    if input_state.dim != dim:
        raise GptError(
            f"input state has dimension {input_state.dim}, expected {dim}"
        )
    if np.linalg.norm(input_state.r) > 1.0 + EXACT_TOL:
        raise DomainError("input state lies outside the unit ball")
    rng = np.random.default_rng(seed)

    probe_effects = [make_extremal_effect(random_direction(dim, rng)) for _ in range(n_effects)]
    probe_effects.append(unit_effect(dim))
    probe_rows = np.stack([e.entries for e in probe_effects])
    pair = [
        make_extremal_effect(random_direction(dim, rng)),
    ]
    pair.append(Effect(unit_effect(dim).entries - pair[0].entries))
    pair_rows = np.stack([e.entries for e in pair])

    omega = input_state.entries
    expected = probe_rows @ omega  # e_y . omega per probe effect
    phi0 = entangled_state(0, n_bits)
    n_outcomes = 2**n_bits

    joint = np.zeros((n_outcomes, 2))
    priors = np.zeros(n_outcomes)
    corrections = []
    max_residual = 0.0
    witness = None
    for x in range(n_outcomes):
        t_x = local_transformation(x, n_bits)
        corrections.append(t_x)
        corrected = t_x.apply_right(phi0).matrix
        e_x = entangled_effect(x, n_bits)
        # (E_x (x) e_y) . (omega (x) corrected) = e_y . (corrected^t E_x^t omega)
        v_x = corrected.T @ (e_x.matrix.T @ omega)
        priors[x] = v_x[0]
        joint[x] = pair_rows @ v_x
        conditional = (probe_rows @ v_x) / priors[x]
        residuals = np.abs(conditional - expected)
        worst = int(np.argmax(residuals))
        if residuals[worst] > max_residual:
            max_residual = float(residuals[worst])
            witness = (x, worst)
    passed = max_residual <= EXACT_TOL
    return TeleportationRun(
        n_bits=n_bits,
        input_state=input_state,
        joint=joint,
        outcome_priors=priors,
        corrections=tuple(corrections),
        max_residual=max_residual,
        passed=passed,
        witness=None if passed else witness,
    )


def entanglement_swap(n_bits: int, label: int | None = 0, seed: int = 0) -> SwapRun:
    """Swap the entangled state ``phi_label`` onto the receiver's side.

    The sender holds ``phi_label`` with a bystander and shares ``phi_0``
    with the receiver.  After her Bell-type measurement (outcome x) and the
    receiver's correction, the joint statistics of every Bell-type effect
    on the far pair must reproduce ``phi_label``:
    ``p(y|x) = E'_y . phi_label = delta_(y,label)``.
    """
    if label is None:
        label = int(np.random.default_rng(seed).integers(2**n_bits))
    n_outcomes = 2**n_bits
    if not 0 <= label < n_outcomes:
        raise GptError(f"label {label} out of range for {n_bits} bits")
    phi_ac = entangled_state(label, n_bits)
    phi0 = entangled_state(0, n_bits)
    decode = [e.matrix for e in bell_measurement(n_bits).effects]
    expected = np.array([float(np.sum(e * phi_ac.matrix)) for e in decode])

    unit_bc = np.zeros((n_outcomes, n_outcomes))
    unit_bc[0, 0] = 1.0
    joint = np.zeros((n_outcomes, n_outcomes))
    priors = np.zeros(n_outcomes)
    for x in range(n_outcomes):
        t_x = local_transformation(x, n_bits)
        corrected = t_x.apply_right(phi0).matrix
        e_x = entangled_effect(x, n_bits)
        # (E_x (x) E'_y) . (phi_ac (x) corrected) contracted over all four
        # indices; the A'C state couples the sender and bystander sides.
        core = e_x.matrix @ corrected
        for y in range(n_outcomes):
            joint[x, y] = float(np.sum((core @ decode[y]) * phi_ac.matrix))
        priors[x] = float(np.sum((core @ unit_bc) * phi_ac.matrix))
    conditional = joint / priors[:, None]
    max_residual = float(np.abs(conditional - expected[None, :]).max())
    return SwapRun(
        n_bits=n_bits,
        label=label,
        joint=joint,
        outcome_priors=priors,
        conditional=conditional,
        expected=expected,
        max_residual=max_residual,
        passed=max_residual <= EXACT_TOL,
    )
