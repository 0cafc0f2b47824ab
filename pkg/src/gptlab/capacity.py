"""Channel-capacity numerics and analytic capacity bounds.

``blahut_arimoto`` maximises mutual information over input priors for a
fixed conditional table.  The remaining functions expose the closed-form
bounds used to sandwich the dense-coding rates: the protocol-derived lower
bound, the ``2N`` state-space dimension bound, and the weak-entanglement
bound ``log2(1 + |lambda| (2^N - 1))`` with its two thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Channel, DomainError, GptError, mutual_information

BA_DEFAULT_TOL = 1e-10
BA_DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class CapacityResult:
    """Capacity estimate with the maximising prior and convergence data."""

    capacity_bits: float
    optimal_prior: np.ndarray
    iterations: int
    converged: bool


def blahut_arimoto(
    conditional,
    tol: float = BA_DEFAULT_TOL,
    max_iter: int = BA_DEFAULT_MAX_ITER,
) -> CapacityResult:
    """Capacity of a fixed discrete memoryless channel, in bits.

    Alternating maximisation over the input prior, starting uniform.  Each
    iteration computes the per-input divergences ``c_x = D(p(.|x) || p_y)``;
    ``sum_x r_x c_x`` and ``max_x c_x`` bound the capacity from below and
    above, and the loop stops when the bracket is narrower than ``tol``.
    The reported capacity is the achieved lower bound, so it never exceeds
    the true capacity.  Deterministic: no randomness, fixed iteration order.
    """
    p = np.asarray(conditional, dtype=float)
    if p.ndim != 2 or p.shape[0] < 1:
        raise GptError("conditional must be a 2-d row-stochastic array")
    if p.min() < -1e-12 or np.abs(p.sum(axis=1) - 1.0).max() > 1e-9:
        raise DomainError("conditional rows must be probability vectors")
    if tol <= 0:
        raise GptError("tol must be positive")
    p = np.clip(p, 0.0, None)
    n_in = p.shape[0]
    mask = p > 0
    log_p = np.zeros_like(p)
    np.log2(p, out=log_p, where=mask)
    # Row entropy term of c_x = sum_y p(y|x) log2(p(y|x)/p_y); the prior
    # stays strictly positive, so any output with p_y = 0 has an all-zero
    # conditional column and drops out of the mat-vec below.
    row_term = np.sum(p * log_p, axis=1)

    prior = np.full(n_in, 1.0 / n_in)
    lower = 0.0
    converged = False
    iterations = 0
    for iterations in range(1, int(max_iter) + 1):
        p_y = prior @ p
        log_py = np.zeros_like(p_y)
        np.log2(p_y, out=log_py, where=p_y > 0)
        c = row_term - p @ log_py
        lower = float(prior @ c)
        upper = float(c.max())
        if upper - lower < tol:
            converged = True
            break
        prior = prior * np.exp2(c - upper)
        prior /= prior.sum()

    prior = prior / prior.sum()
    prior.setflags(write=False)
    return CapacityResult(
        capacity_bits=max(lower, 0.0),
        optimal_prior=prior,
        iterations=iterations,
        converged=converged,
    )


def channel_capacity(channel: Channel, tol: float = BA_DEFAULT_TOL) -> CapacityResult:
    """Capacity of a Channel value (prior ignored, kept for the caller)."""
    return blahut_arimoto(channel.conditional, tol=tol)


def dc_capacity_lower_bound(theory, seed: int = 0) -> float:
    """Certified dense-coding rate of the theory's explicit protocol.

    Running the protocol and measuring its mutual information yields a
    lower bound on both the dense-coding capacity and the two-system
    classical capacity (the encoded states can simply be prepared).
    """
    from .protocols import dense_coding

    run = dense_coding(theory.n_bits, theory=theory, seed=seed)
    return run.info_bits


def dimension_upper_bound(n_bits: int) -> float:
    """Classical capacity bound ``2N`` from the state-space dimension.

    The capacity of any model is at most ``log2`` of its state-space
    dimension, and a pair of ``2^N - 1`` ball systems lives in the
    ``(2^N)^2 = 2^(2N)``-dimensional matrix space.
    """
    if n_bits < 1:
        raise GptError("n_bits must be >= 1")
    return float(2 * n_bits)


def weak_entanglement_bound(lam: float, n_bits: int) -> float:
    """Dense-coding bound ``log2(1 + |lambda| (2^N - 1))`` for weak models."""
    if n_bits < 2:
        raise GptError("the weak-entanglement bound needs n_bits >= 2")
    if abs(lam) > 1.0:
        raise DomainError("lambda must lie in [-1, 1]")
    return float(np.log2(1.0 + abs(lam) * (2**n_bits - 1)))


def weak_thresholds(n_bits: int) -> tuple:
    """Correlation levels ``(1 + 2j)/(2^N - 1)`` for ``j = 0, 1``.

    At the first threshold the bound equals 1 bit (no superdense coding
    below it); at the second it equals 2 bits (no hyperdense coding).
    """
    if n_bits < 2:
        raise GptError("thresholds need n_bits >= 2")
    denom = 2**n_bits - 1
    return (1.0 / denom, 3.0 / denom)


def uniform_prior_information(conditional) -> float:
    """Mutual information of the conditional table under a uniform prior."""
    p = np.asarray(conditional, dtype=float)
    prior = np.full(p.shape[0], 1.0 / p.shape[0])
    return mutual_information(Channel(prior=prior, conditional=p))
