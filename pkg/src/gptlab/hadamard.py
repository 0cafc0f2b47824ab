"""Sign-vector algebra behind the entangled sector of the bipartite model.

For ``N`` bits there are ``2**N`` vectors ``d_mu`` with components
``(d_mu)_nu = (-1)^(mu . nu)``, where ``mu . nu`` is the parity of the
bitwise AND of the two labels (rows of the Sylvester-ordered Hadamard
matrix).  They satisfy, exactly over the integers,

* ``d_mu o d_mu' = d_(mu XOR mu')`` (closure under elementwise product),
* ``sum_mu (d_mu)_nu = 2^N delta_(nu,0)``,
* ``d_mu . d_mu' = 2^N delta_(mu,mu')``.

These vectors yield the diagonal entangled states ``phi_mu = diag(d_mu)``
on two ball systems of dimension ``2^N - 1``, the Bell-type measurement
``E_mu = 2^-N phi_mu`` that distinguishes them perfectly, and the discrete
group of local transformations ``T_mu = diag(d_mu)`` (the XOR group).

Labels are machine integers with bit ``l`` holding the l-th bit of the
string, so the group laws are exact bit operations.  Sign vectors are kept
as integer arrays; conversion to floats happens at the state/effect
boundary (where all values are dyadic, so float arithmetic stays exact).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    EXACT_TOL,
    BipartiteEffect,
    BipartiteState,
    GptError,
    Measurement,
    Transformation,
    ValidationReport,
    bipartite_contract,
    bipartite_unit,
    product_effect,
)
from .hst import make_extremal_effect, random_direction


def _check_label(label: int, n_bits: int) -> None:
    if n_bits < 1:
        raise GptError("n_bits must be >= 1")
    if not 0 <= label < 2**n_bits:
        raise GptError(f"label {label} out of range for {n_bits} bits")


def hadamard_vector(label: int, n_bits: int) -> np.ndarray:
    """Sign vector with components ``(-1)^parity(label AND nu)``."""
    _check_label(label, n_bits)
    nu = np.arange(2**n_bits, dtype=np.uint64)
    parity = np.bitwise_count(nu & np.uint64(label)) & 1
    return 1 - 2 * parity.astype(np.int64)


def hadamard_basis(n_bits: int) -> np.ndarray:
    """All ``2^N`` sign vectors, stacked as rows (a Hadamard matrix)."""
    return np.stack([hadamard_vector(mu, n_bits) for mu in range(2**n_bits)])


def elementwise_product(d1: np.ndarray, d2: np.ndarray) -> np.ndarray:
    """Componentwise product; equals the vector of the XORed labels."""
    if d1.shape != d2.shape:
        raise GptError("sign vectors must have equal length")
    return d1 * d2


def entangled_state(label: int, n_bits: int) -> BipartiteState:
    """Entangled state ``diag(d_label)`` on two ``2^N - 1`` ball systems."""
    return BipartiteState(np.diag(hadamard_vector(label, n_bits)).astype(float))


def entangled_effect(label: int, n_bits: int) -> BipartiteEffect:
    """Bell-type effect ``2^-N diag(d_label)``."""
    scale = 2.0 ** (-n_bits)
    return BipartiteEffect(scale * np.diag(hadamard_vector(label, n_bits)))


def bell_measurement(n_bits: int) -> Measurement:
    """The ``2^N``-outcome measurement that distinguishes the entangled set."""
    return Measurement(tuple(entangled_effect(mu, n_bits) for mu in range(2**n_bits)))


@dataclass(frozen=True, eq=False)
class LocalTransformation(Transformation):
    """Member ``diag(d_label)`` of the discrete XOR group of rotations."""

    label: int
    n_bits: int


def local_transformation(label: int, n_bits: int) -> LocalTransformation:
    matrix = np.diag(hadamard_vector(label, n_bits)).astype(float)
    return LocalTransformation(matrix=matrix, label=label, n_bits=n_bits)


def compose(t1: LocalTransformation, t2: LocalTransformation) -> LocalTransformation:
    """Group composition; labels combine by XOR."""
    if t1.n_bits != t2.n_bits:
        raise GptError("cannot compose transformations of different sizes")
    return local_transformation(t1.label ^ t2.label, t1.n_bits)


def match_entangled_label(phi: BipartiteState, n_bits: int) -> int | None:
    """Label mu if ``phi`` equals ``diag(d_mu)`` within tolerance, else None."""
    diag = np.diagonal(phi.matrix)
    off = phi.matrix - np.diag(diag)
    if np.abs(off).max() > EXACT_TOL:
        return None
    for mu in range(2**n_bits):
        if np.abs(diag - hadamard_vector(mu, n_bits)).max() <= EXACT_TOL:
            return mu
    return None


def verify_max_tensor_membership(
    phi: BipartiteState,
    n_bits: int,
    trials: int = 200,
    seed: int = 0,
) -> ValidationReport:
    """Probe membership of ``phi`` in the maximal tensor product.

    Samples random extremal product effects ``e_alpha (x) e_beta`` and
    checks ``0 <= (e_alpha (x) e_beta) . phi <= 1`` plus unit normalisation.
    When ``phi`` is one of the pure entangled states the probability must
    also equal ``(1 + alpha . T_hat beta)/4 <= 1/2`` for its rotation block.
    """
    dim = 2**n_bits - 1
    rng = np.random.default_rng(seed)
    violations = []

    total = bipartite_contract(bipartite_unit(dim, dim), phi)
    if abs(total - 1.0) > EXACT_TOL:
        violations.append({"check": "unit_normalisation", "value": total})

    label = match_entangled_label(phi, n_bits)
    hat = local_transformation(label, n_bits).hat if label is not None else None

    for _ in range(trials):
        alpha = random_direction(dim, rng)
        beta = random_direction(dim, rng)
        effect = product_effect(make_extremal_effect(alpha), make_extremal_effect(beta))
        p = bipartite_contract(effect, phi)
        if p < -EXACT_TOL or p > 1.0 + EXACT_TOL:
            violations.append(
                {
                    "check": "probability_range",
                    "alpha": alpha.tolist(),
                    "beta": beta.tolist(),
                    "value": p,
                }
            )
        if hat is not None:
            expected = 0.25 * (1.0 + alpha @ (hat @ beta))
            if abs(p - expected) > EXACT_TOL or p > 0.5 + EXACT_TOL:
                violations.append(
                    {
                        "check": "pure_state_form",
                        "alpha": alpha.tolist(),
                        "beta": beta.tolist(),
                        "value": p,
                        "expected": expected,
                    }
                )
    return ValidationReport(passed=not violations, violations=tuple(violations))


def local_tomography_from_oracle(oracle, dim_a: int, dim_b: int) -> BipartiteState:
    """Reconstruct a bipartite state from product-effect statistics alone.

    ``oracle(E)`` must return the outcome probability of the product effect
    ``E`` on the unknown state.  Probing with ``(1, +-v_k)/2 (x) (1, +-v_l)/2``
    for coordinate vectors ``v`` and inverting the four sign combinations
    recovers every matrix entry:

        C_kl  = sum_(s,t) s t P(s,t),
        a_k   = sum_(s,t) s   P(s,t),
        b_l   = sum_(s,t)   t P(s,t).
    """
    matrix = np.zeros((dim_a + 1, dim_b + 1))

    def coordinate_effect(k: int, sign: int, dim: int) -> np.ndarray:
        v = np.zeros(dim)
        v[k] = sign
        return 0.5 * np.concatenate(([1.0], v))

    matrix[0, 0] = oracle(
        BipartiteEffect(np.outer(np.eye(dim_a + 1)[0], np.eye(dim_b + 1)[0]))
    )
    for k in range(dim_a):
        for l in range(dim_b):
            probs = {
                (s, t): oracle(
                    BipartiteEffect(
                        np.outer(
                            coordinate_effect(k, s, dim_a),
                            coordinate_effect(l, t, dim_b),
                        )
                    )
                )
                for s in (1, -1)
                for t in (1, -1)
            }
            matrix[k + 1, l + 1] = sum(s * t * p for (s, t), p in probs.items())
            if l == 0:
                matrix[k + 1, 0] = sum(s * p for (s, _), p in probs.items())
            if k == 0:
                matrix[0, l + 1] = sum(t * p for (_, t), p in probs.items())
    return BipartiteState(matrix)


def local_tomography(phi: BipartiteState) -> BipartiteState:
    """Reconstruct ``phi`` from local statistics; exact for this model."""
    dim_a, dim_b = phi.dims
    return local_tomography_from_oracle(
        lambda effect: bipartite_contract(effect, phi), dim_a, dim_b
    )
