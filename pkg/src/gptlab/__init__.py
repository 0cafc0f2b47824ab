"""Hypersphere operational models: states, protocols and capacity bounds.

The package simulates communication protocols on models whose local
systems are Euclidean balls of dimension ``2^N - 1`` with a discrete
entangled sector indexed by N-bit strings: hyperdense coding,
teleportation and entanglement swapping, plus channel-capacity numerics
and the deformed models that trade the effect away.
"""

from .capacity import (
    CapacityResult,
    blahut_arimoto,
    channel_capacity,
    dc_capacity_lower_bound,
    dimension_upper_bound,
    weak_entanglement_bound,
    weak_thresholds,
)
from .core import (
    EXACT_TOL,
    OPT_TOL,
    BipartiteEffect,
    BipartiteState,
    Channel,
    DomainError,
    Effect,
    GptError,
    Measurement,
    ProtocolFalsified,
    State,
    TheoryConfig,
    Transformation,
    ValidationReport,
    bipartite_contract,
    bipartite_unit,
    contract,
    entropy_bits,
    mix_bipartite,
    mix_states,
    mutual_information,
    product_effect,
    product_state,
    reduced_states,
    unit_effect,
    validate_measurement,
    zero_effect,
)
from .hadamard import (
    LocalTransformation,
    bell_measurement,
    compose,
    elementwise_product,
    entangled_effect,
    entangled_state,
    hadamard_basis,
    hadamard_vector,
    local_tomography,
    local_transformation,
    verify_max_tensor_membership,
)
from .hst import (
    canonical_measurement,
    capacity_search,
    capacity_upper_bound,
    make_effect,
    make_extremal_effect,
    make_state,
    one_bit_protocol,
    random_pure_state,
    random_state,
)
from .protocols import (
    Classification,
    DenseCodingRun,
    ProtocolLabel,
    SwapRun,
    TeleportationRun,
    classify,
    dense_coding,
    entanglement_swap,
    no_signalling_spread,
    product_decoding_baseline,
    separable_baseline,
    teleport,
)
from .variants import (
    TlWitnessReport,
    embedded_dense_coding,
    embedded_effect,
    embedded_state,
    embedded_transformation,
    lemma_effect_check,
    lemma_state_check,
    lt_admissibility_witness,
    lt_channel,
    lt_optimal_info,
    lt_optimal_product,
    lt_peak_probability,
    tl_violation_witness,
    weak_dense_coding,
    weak_state,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
