"""Deformed bipartite models and the norm-bound validators.

Three families sit next to the base construction:

* ``lambda-tau``: entangled states ``diag(1, lambda T_hat_mu)`` decoded by
  effects ``2^-N diag(1, tau T_hat_mu)``.  Requiring valid probabilities on
  the rotated witness state forces
  ``-1/(2^N - 1) <= lambda tau <= 1/(2^N - 3)``; the channel is the
  symmetric table ``p(y|x) = lambda tau delta_(y,x) + 2^-N (1 - lambda tau)``
  and the best rate inside this family is ``N - H(Q_N)``.  Local rotations
  here form the full continuous group, so the model keeps local continuous
  reversibility and pays with a rate that collapses for ``N > 2``.
* ``embedded``: each local system is an m-sphere embedded after a frozen
  ``2^N - 1`` block.  The entangled states occupy only the frozen corner,
  so every local transformation ``block-diag(T_mu, R)`` with ``R in SO(m)``
  leaves them untouched: dense coding stays perfect at N bits while local
  statistics cannot tell the entangled states apart (the model trades away
  tomographic locality).
* ``weak``: entangled states ``diag(1, lambda T_hat_mu)`` decoded with the
  undeformed Bell-type effects.  Correlations of size ``lambda`` cap the
  dense-coding rate at ``log2(1 + |lambda| (2^N - 1))``.

``lemma_state_check`` and ``lemma_effect_check`` enforce the matrix-norm
constraints that every bipartite state and effect of two ball systems must
satisfy: unit-bounded marginal and correlation columns for states, and
``min(gamma, 1 - gamma)``-bounded blocks for effects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EXACT_TOL,
    BipartiteEffect,
    BipartiteState,
    Channel,
    DomainError,
    Effect,
    GptError,
    ProtocolFalsified,
    TheoryConfig,
    Transformation,
    ValidationReport,
    bipartite_contract,
    product_effect,
    product_state,
)
from .hadamard import (
    bell_measurement,
    entangled_effect,
    entangled_state,
    hadamard_vector,
    local_transformation,
)

# --------------------------------------------------------------------------
# lambda-tau deformation


def _require_kind(theory: TheoryConfig, kind: str) -> None:
    if theory.kind != kind:
        raise GptError(f"expected a {kind!r} theory, got {theory.kind!r}")


def _scaled_diagonal(label: int, n_bits: int, scale: float) -> np.ndarray:
    d = hadamard_vector(label, n_bits).astype(float)
    d[1:] *= scale
    return np.diag(d)


def lt_state(label: int, theory: TheoryConfig) -> BipartiteState:
    """Deformed entangled state ``diag(1, lambda T_hat_label)``."""
    _require_kind(theory, "lambda-tau")
    return BipartiteState(_scaled_diagonal(label, theory.n_bits, theory.lam))


def lt_effect(label: int, theory: TheoryConfig) -> BipartiteEffect:
    """Deformed decoding effect ``2^-N diag(1, tau T_hat_label)``."""
    _require_kind(theory, "lambda-tau")
    scale = 2.0**-theory.n_bits
    return BipartiteEffect(scale * _scaled_diagonal(label, theory.n_bits, theory.tau))


def lt_rotated_witness(lam: float, n_bits: int) -> BipartiteState:
    """The state ``phi_0^(lambda) T'`` with ``T' = diag(1, 1, -1, ..., -1)``.

    This rotated companion of the aligned state is the one that caps
    ``lambda tau`` from above; probing both against the aligned effect
    yields the admissibility window.
    """
    diag = np.full(2**n_bits, -lam)
    diag[0] = 1.0
    diag[1] = lam
    return BipartiteState(np.diag(diag))


def lt_admissibility_witness(n_bits: int, lam: float, tau: float) -> tuple:
    """Probabilities of the aligned effect on the aligned and rotated states.

    Returns ``(2^-N (1 + (2^N - 1) lambda tau), 2^-N (1 - (2^N - 3) lambda tau))``
    computed by direct contraction; either leaving ``[0, 1]`` certifies the
    parameters as inadmissible.
    """
    if n_bits < 2:
        raise GptError("the lambda-tau model needs n_bits >= 2")
    effect = BipartiteEffect(
        2.0**-n_bits * _scaled_diagonal(0, n_bits, tau)
    )
    aligned = BipartiteState(_scaled_diagonal(0, n_bits, lam))
    rotated = lt_rotated_witness(lam, n_bits)
    return (
        bipartite_contract(effect, aligned),
        bipartite_contract(effect, rotated),
    )


def lt_channel(theory: TheoryConfig) -> Channel:
    """Dense-coding channel of the lambda-tau model, uniform prior.

    Builds every encoded state by matrix product, contracts against every
    decoding effect, and cross-checks the closed form
    ``p(y|x) = lambda tau delta_(y,x) + 2^-N (1 - lambda tau)`` entrywise.
    """
    _require_kind(theory, "lambda-tau")
    n = theory.n_bits
    size = 2**n
    phi0 = lt_state(0, theory)
    effects = np.stack([lt_effect(y, theory).matrix for y in range(size)])
    states = np.stack(
        [
            (local_transformation(x, n).matrix @ phi0.matrix)
            for x in range(size)
        ]
    )
    conditional = np.einsum("ymn,xmn->xy", effects, states)
    prod = theory.lam * theory.tau
    closed = np.full((size, size), 2.0**-n * (1.0 - prod))
    closed[np.diag_indices(size)] += prod
    gap = float(np.abs(conditional - closed).max())
    if gap > EXACT_TOL:
        raise ProtocolFalsified(
            f"deformed channel deviates from its closed form by {gap!r}"
        )
    return Channel(prior=np.full(size, 1.0 / size), conditional=conditional)


def lt_optimal_product(n_bits: int) -> float:
    """The admissible ``lambda tau`` value maximising the rate."""
    if n_bits < 2:
        raise GptError("the lambda-tau model needs n_bits >= 2")
    return 1.0 / (2**n_bits - 3)


def lt_peak_probability(n_bits: int) -> float:
    """Largest achievable correct-decoding probability ``Q_N``."""
    if n_bits < 2:
        raise GptError("the lambda-tau model needs n_bits >= 2")
    size = 2**n_bits
    return 2.0 ** (-n_bits + 1) * (size - 2) / (size - 3)


def _symmetric_output_entropy(p: float, n_bits: int) -> float:
    """Entropy of an output hitting one symbol with probability p.

    The remaining mass spreads evenly over the other ``2^N - 1`` symbols:
    ``H(p) = h(p) + (1 - p) log2(2^N - 1)``.
    """
    h = 0.0
    if 0.0 < p < 1.0:
        h = -p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p)
    return float(h + (1.0 - p) * np.log2(2**n_bits - 1))


def lt_optimal_info(n_bits: int) -> float:
    """Best rate ``N - H(Q_N)`` inside the deformed protocol family."""
    if n_bits < 2:
        raise DomainError(
            "n_bits must be >= 2; a single bit has no continuous rotations"
        )
    return n_bits - _symmetric_output_entropy(lt_peak_probability(n_bits), n_bits)


# --------------------------------------------------------------------------
# embedded (tomographic-locality violating) model


def embedded_state(label: int, theory: TheoryConfig) -> BipartiteState:
    """Entangled state occupying only the frozen ``2^N x 2^N`` corner."""
    _require_kind(theory, "embedded")
    size = 1 + theory.local_dim
    block = 2**theory.n_bits
    matrix = np.zeros((size, size))
    matrix[:block, :block] = np.diag(hadamard_vector(label, theory.n_bits))
    return BipartiteState(matrix)


def embedded_effect(label: int, theory: TheoryConfig) -> BipartiteEffect:
    """Decoding effect ``2^-N`` times the corresponding entangled state."""
    _require_kind(theory, "embedded")
    return BipartiteEffect(2.0**-theory.n_bits * embedded_state(label, theory).matrix)


def embedded_extremal_effect(direction, theory: TheoryConfig) -> Effect:
    """Local extremal effect ``(1, 0_n, r)/2`` on the embedded sphere."""
    _require_kind(theory, "embedded")
    direction = np.asarray(direction, dtype=float)
    if direction.size != theory.m:
        raise GptError(f"direction must have {theory.m} components")
    norm = np.linalg.norm(direction)
    if abs(norm - 1.0) > EXACT_TOL:
        raise DomainError(f"effect direction has norm {norm!r}, expected 1")
    return Effect(0.5 * theory.state_from_direction(direction).entries)


def random_rotation(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish rotation from SO(m): QR of a Gaussian matrix, signs fixed."""
    if m < 1:
        raise GptError("rotation dimension must be >= 1")
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    q = q * np.sign(np.diagonal(r))
    if np.linalg.det(q) < 0:
        q[:, -1] = -q[:, -1]
    return q


def embedded_transformation(
    label: int, theory: TheoryConfig, rotation: np.ndarray
) -> Transformation:
    """Local map ``block-diag(T_label, R)`` for a rotation R of the sphere."""
    _require_kind(theory, "embedded")
    rotation = np.asarray(rotation, dtype=float)
    if rotation.shape != (theory.m, theory.m):
        raise GptError(f"rotation must be {theory.m} x {theory.m}")
    size = 1 + theory.local_dim
    block = 2**theory.n_bits
    matrix = np.zeros((size, size))
    matrix[:block, :block] = local_transformation(label, theory.n_bits).matrix
    matrix[block:, block:] = rotation
    return Transformation(matrix)


def embedded_dense_coding(theory: TheoryConfig, rotation_seed: int = 0) -> Channel:
    """Dense coding in the embedded model; perfect for every rotation.

    Each message applies ``block-diag(T_x, R_x)`` with an independently
    drawn rotation; the decoding statistics must be the exact identity
    regardless, because the entangled corner never sees the sphere block.
    """
    _require_kind(theory, "embedded")
    n = theory.n_bits
    size = 2**n
    rng = np.random.default_rng(rotation_seed)
    phi0 = embedded_state(0, theory)
    effects = np.stack([embedded_effect(y, theory).matrix for y in range(size)])
    states = np.stack(
        [
            embedded_transformation(x, theory, random_rotation(theory.m, rng)).matrix
            @ phi0.matrix
            for x in range(size)
        ]
    )
    conditional = np.einsum("ymn,xmn->xy", effects, states)
    gap = float(np.abs(conditional - np.eye(size)).max())
    if gap > EXACT_TOL:
        raise ProtocolFalsified(
            f"embedded dense coding deviates from the identity by {gap!r}"
        )
    return Channel(prior=np.full(size, 1.0 / size), conditional=conditional)


@dataclass(frozen=True)
class TlWitnessReport:
    """Constructive witness that local statistics miss global structure."""

    passed: bool
    max_probability_spread: float
    state_distances: tuple
    violations: tuple


def tl_violation_witness(
    theory: TheoryConfig, trials: int, seed: int
) -> TlWitnessReport:
    """Show the entangled states are locally indistinguishable yet distinct.

    Samples random pairs of local effects and checks the joint probability
    on every entangled state is the same constant (the product of the two
    normalisation components), while the states themselves differ by an
    entrywise L1 distance of ``2^N`` from the reference state.
    """
    _require_kind(theory, "embedded")
    if trials < 1:
        raise GptError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    size = 2**theory.n_bits
    states = [embedded_state(mu, theory) for mu in range(size)]
    distances = tuple(
        float(np.abs(states[0].matrix - s.matrix).sum()) for s in states
    )

    violations = []
    max_spread = 0.0
    unit = Effect(np.concatenate(([1.0], np.zeros(theory.local_dim))))
    for _ in range(trials):
        effects = []
        for _side in range(2):
            w = rng.standard_normal(theory.m)
            extremal = embedded_extremal_effect(w / np.linalg.norm(w), theory)
            mix = rng.dirichlet(np.ones(3))  # extremal, unit, zero
            entries = mix[0] * extremal.entries + mix[1] * unit.entries
            effects.append(Effect(entries))
        joint = product_effect(effects[0], effects[1])
        probs = np.array([bipartite_contract(joint, s) for s in states])
        spread = float(probs.max() - probs.min())
        max_spread = max(max_spread, spread)
        expected = float(effects[0].entries[0] * effects[1].entries[0])
        if spread > EXACT_TOL or abs(probs[0] - expected) > EXACT_TOL:
            violations.append(
                {
                    "check": "local_statistics",
                    "spread": spread,
                    "value": float(probs[0]),
                    "expected": expected,
                }
            )
    state_gap_ok = all(d > 0 for d in distances[1:])
    if not state_gap_ok:
        violations.append({"check": "states_differ", "distances": distances})
    return TlWitnessReport(
        passed=not violations,
        max_probability_spread=max_spread,
        state_distances=distances,
        violations=tuple(violations),
    )


# --------------------------------------------------------------------------
# weakly entangled model


def weak_state(label: int, theory: TheoryConfig) -> BipartiteState:
    """Weakly entangled state ``diag(1, lambda T_hat_label)``."""
    _require_kind(theory, "weak")
    return BipartiteState(_scaled_diagonal(label, theory.n_bits, theory.lam))


def weak_dense_coding(theory: TheoryConfig) -> Channel:
    """Dense coding with weakened states and the undeformed Bell decoding.

    The channel is ``p(y|x) = lambda delta_(y,x) + 2^-N (1 - lambda)``,
    checked against the direct contraction.  Probabilities stay valid only
    for ``lambda >= -1/(2^N - 1)``; below that the Bell effects are no
    longer effects of the weakened model.
    """
    _require_kind(theory, "weak")
    n = theory.n_bits
    size = 2**n
    if theory.lam < -1.0 / (size - 1) - EXACT_TOL:
        raise DomainError(
            "the Bell-type decoding takes negative probabilities for "
            f"lambda={theory.lam!r} < -1/(2^N-1)"
        )
    phi0 = weak_state(0, theory)
    effects = np.stack([entangled_effect(y, n).matrix for y in range(size)])
    states = np.stack(
        [local_transformation(x, n).matrix @ phi0.matrix for x in range(size)]
    )
    conditional = np.einsum("ymn,xmn->xy", effects, states)
    closed = np.full((size, size), 2.0**-n * (1.0 - theory.lam))
    closed[np.diag_indices(size)] += theory.lam
    gap = float(np.abs(conditional - closed).max())
    if gap > EXACT_TOL:
        raise ProtocolFalsified(
            f"weak dense coding deviates from its closed form by {gap!r}"
        )
    conditional = np.clip(conditional, 0.0, 1.0)
    return Channel(prior=np.full(size, 1.0 / size), conditional=conditional)


# --------------------------------------------------------------------------
# matrix-norm validators for bipartite states and effects


def lemma_state_check(phi: BipartiteState) -> ValidationReport:
    """Norm bounds every bipartite state of two ball systems satisfies.

    The marginals obey ``||a|| <= 1`` and ``||b|| <= 1`` and every column
    of the correlation block obeys ``||c_k|| <= 1``.
    """
    violations = []
    for name, vec in (("a_norm", phi.a), ("b_norm", phi.b)):
        norm = float(np.linalg.norm(vec))
        if norm > 1.0 + EXACT_TOL:
            violations.append({"check": name, "value": norm, "bound": 1.0})
    col_norms = np.linalg.norm(phi.correlations, axis=0)
    for k in np.flatnonzero(col_norms > 1.0 + EXACT_TOL):
        violations.append(
            {
                "check": "correlation_column_norm",
                "column": int(k),
                "value": float(col_norms[k]),
                "bound": 1.0,
            }
        )
    return ValidationReport(passed=not violations, violations=tuple(violations))


def lemma_effect_check(effect: BipartiteEffect) -> ValidationReport:
    """Norm bounds every bipartite effect of two ball systems satisfies.

    With ``gamma`` the normalisation entry, all of ``||alpha||``,
    ``||beta||`` and the columns of the core block are bounded by
    ``min(gamma, 1 - gamma)``; equivalently the gamma-factored form has
    unit-bounded blocks.
    """
    violations = []
    gamma = effect.gamma
    if gamma < -EXACT_TOL or gamma > 1.0 + EXACT_TOL:
        violations.append({"check": "gamma_range", "value": gamma, "bound": (0.0, 1.0)})
    cap = min(gamma, 1.0 - gamma)
    for name, vec in (("alpha_norm", effect.alpha), ("beta_norm", effect.beta)):
        norm = float(np.linalg.norm(vec))
        if norm > cap + EXACT_TOL:
            violations.append({"check": name, "value": norm, "bound": cap})
    col_norms = np.linalg.norm(effect.block, axis=0)
    for k in np.flatnonzero(col_norms > cap + EXACT_TOL):
        violations.append(
            {
                "check": "core_column_norm",
                "column": int(k),
                "value": float(col_norms[k]),
                "bound": cap,
            }
        )
    return ValidationReport(passed=not violations, violations=tuple(violations))


def constructed_family(theory: TheoryConfig, seed: int = 0, n_random: int = 20) -> tuple:
    """States and effects the given theory actually constructs.

    Used by the validator sweeps: every element must pass the lemma
    checks.  Returns ``(states, effects)`` lists.
    """
    rng = np.random.default_rng(seed)
    n = theory.n_bits
    size = 2**n
    states: list = []
    effects: list = []
    if theory.kind == "base":
        states = [entangled_state(mu, n) for mu in range(size)]
        effects = list(bell_measurement(n).effects)
    elif theory.kind == "lambda-tau":
        states = [lt_state(mu, theory) for mu in range(size)]
        states.append(lt_rotated_witness(theory.lam, n))
        effects = [lt_effect(mu, theory) for mu in range(size)]
    elif theory.kind == "weak":
        states = [weak_state(mu, theory) for mu in range(size)]
        effects = [entangled_effect(mu, n) for mu in range(size)]
    elif theory.kind == "embedded":
        states = [embedded_state(mu, theory) for mu in range(size)]
        effects = [embedded_effect(mu, theory) for mu in range(size)]
    for _ in range(n_random):
        sa = theory.random_pure_state(rng)
        sb = theory.random_pure_state(rng)
        states.append(product_state(sa, sb))
        ea = Effect(0.5 * sa.entries)
        eb = Effect(0.5 * sb.entries)
        effects.append(product_effect(ea, eb))
    return states, effects
