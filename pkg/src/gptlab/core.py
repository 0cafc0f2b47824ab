"""Core algebra for convex operational (generalized probabilistic) models.

Conventions used throughout the package:

* A normalised single-system state is a real vector ``(1, r)`` whose first
  entry is the normalisation component.  The unit effect is ``u = (1, 0)``
  and outcome probabilities are Euclidean inner products ``e . omega``.
* A bipartite state is a real ``(n_A+1) x (n_B+1)`` matrix with block form
  ``[[1, b^t], [a, C]]``; row index 0 and column index 0 carry the
  normalisation components of the A and B sides.  Bipartite probabilities
  are Frobenius inner products ``E . phi = Tr(E^t phi)``.
* Entropies and capacities are in bits (base-2 logs, ``0 log 0 = 0``).

Everything here is an immutable value; operations are pure functions and
safe to call concurrently.  Randomised routines elsewhere in the package
take explicit seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Tolerance for identities built from +-1 / 2^-N (dyadic) arithmetic.
EXACT_TOL = 1e-12
# Tolerance for iterative-optimizer outputs.
OPT_TOL = 1e-6

THEORY_KINDS = ("base", "lambda-tau", "embedded", "weak")


class GptError(ValueError):
    """Base class for errors raised by this package."""


class DomainError(GptError):
    """A constructed object violates a state/effect/parameter constraint."""


class ProtocolFalsified(GptError):
    """A protocol identity that should hold exactly failed numerically."""


def _frozen(array, dtype=float) -> np.ndarray:
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class State:
    """Normalised state ``(1, r)``; ``entries[0]`` must equal 1."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        if self.entries.ndim != 1 or self.entries.size < 1:
            raise GptError("state entries must be a non-empty vector")
        if abs(self.entries[0] - 1.0) > EXACT_TOL:
            raise DomainError(
                f"state normalisation component is {self.entries[0]!r}, expected 1"
            )

    @property
    def r(self) -> np.ndarray:
        """Coordinates of the state inside the local convex body."""
        return self.entries[1:]

    @property
    def dim(self) -> int:
        return self.entries.size - 1


@dataclass(frozen=True, eq=False)
class Effect:
    """Effect vector; validity is relative to the hosting theory."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))
        if self.entries.ndim != 1 or self.entries.size < 1:
            raise GptError("effect entries must be a non-empty vector")

    @property
    def dim(self) -> int:
        return self.entries.size - 1


@dataclass(frozen=True)
class Measurement:
    """Ordered collection of effects that sum to the unit effect."""

    effects: tuple

    def __post_init__(self):
        object.__setattr__(self, "effects", tuple(self.effects))
        if not self.effects:
            raise GptError("measurement needs at least one effect")


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Bipartite state matrix ``[[1, b^t], [a, C]]``."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        if self.matrix.ndim != 2:
            raise GptError("bipartite state must be a matrix")
        if abs(self.matrix[0, 0] - 1.0) > EXACT_TOL:
            raise DomainError(
                f"bipartite normalisation entry is {self.matrix[0, 0]!r}, expected 1"
            )

    @property
    def a(self) -> np.ndarray:
        return self.matrix[1:, 0]

    @property
    def b(self) -> np.ndarray:
        return self.matrix[0, 1:]

    @property
    def correlations(self) -> np.ndarray:
        """The core block C of joint correlations."""
        return self.matrix[1:, 1:]

    @property
    def dims(self) -> tuple:
        return (self.matrix.shape[0] - 1, self.matrix.shape[1] - 1)


@dataclass(frozen=True, eq=False)
class BipartiteEffect:
    """Bipartite effect matrix ``[[gamma, beta^t], [alpha, Gamma]]``."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        if self.matrix.ndim != 2:
            raise GptError("bipartite effect must be a matrix")

    @property
    def gamma(self) -> float:
        return float(self.matrix[0, 0])

    @property
    def alpha(self) -> np.ndarray:
        return self.matrix[1:, 0]

    @property
    def beta(self) -> np.ndarray:
        return self.matrix[0, 1:]

    @property
    def block(self) -> np.ndarray:
        """The core block Gamma."""
        return self.matrix[1:, 1:]

    @property
    def dims(self) -> tuple:
        return (self.matrix.shape[0] - 1, self.matrix.shape[1] - 1)


@dataclass(frozen=True, eq=False)
class Transformation:
    """Normalisation-preserving linear map ``block-diag(1, T_hat)``."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GptError("transformation must be a square matrix")
        if (
            abs(m[0, 0] - 1.0) > EXACT_TOL
            or np.abs(m[0, 1:]).max(initial=0.0) > EXACT_TOL
            or np.abs(m[1:, 0]).max(initial=0.0) > EXACT_TOL
        ):
            raise DomainError("transformation is not block-diag(1, T_hat)")

    @property
    def hat(self) -> np.ndarray:
        """The rotation block acting on state coordinates."""
        return self.matrix[1:, 1:]

    def apply(self, state: State) -> State:
        return State(self.matrix @ state.entries)

    def apply_left(self, phi: BipartiteState) -> BipartiteState:
        """Act on the A side of a bipartite state."""
        return BipartiteState(self.matrix @ phi.matrix)

    def apply_right(self, phi: BipartiteState) -> BipartiteState:
        """Act on the B side of a bipartite state."""
        return BipartiteState(phi.matrix @ self.matrix.T)


@dataclass(frozen=True, eq=False)
class Channel:
    """Discrete memoryless channel: prior p(x) and row-stochastic p(y|x)."""

    prior: np.ndarray
    conditional: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "prior", _frozen(self.prior))
        object.__setattr__(self, "conditional", _frozen(self.conditional))
        p, c = self.prior, self.conditional
        if c.ndim != 2 or p.ndim != 1 or p.size != c.shape[0]:
            raise GptError("prior length must match the conditional's row count")
        if abs(p.sum() - 1.0) > EXACT_TOL or p.min() < -EXACT_TOL:
            raise DomainError("prior is not a probability vector")
        if c.min() < -EXACT_TOL or c.max() > 1.0 + EXACT_TOL:
            raise DomainError("conditional entries fall outside [0, 1]")
        rows = c.sum(axis=1)
        if np.abs(rows - 1.0).max() > EXACT_TOL:
            raise DomainError("conditional rows must each sum to 1")

    @property
    def n_inputs(self) -> int:
        return self.conditional.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.conditional.shape[1]


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validity check, with one entry per violation found."""

    passed: bool
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class TheoryConfig:
    """Selects the base hypersphere model or one of its deformations.

    ``kind`` is one of ``base``, ``lambda-tau``, ``embedded`` or ``weak``.
    ``n_bits`` fixes the local ball dimension ``2**n_bits - 1``.  ``lam``
    scales entangled-state correlations, ``tau`` scales entangled-effect
    correlations, and ``m`` is the sphere dimension of the embedded model.
    """

    kind: str
    n_bits: int
    lam: float | None = None
    tau: float | None = None
    m: int | None = None

    def __post_init__(self):
        if self.kind not in THEORY_KINDS:
            raise DomainError(f"unknown theory kind {self.kind!r}")
        if self.n_bits < 1 or self.n_bits > 20:
            raise DomainError("n_bits must be between 1 and 20")
        if self.kind != "base" and self.n_bits < 2:
            raise DomainError(f"the {self.kind} model needs n_bits >= 2")
        if self.kind == "lambda-tau":
            if self.lam is None or self.tau is None:
                raise DomainError("the lambda-tau model needs both lambda and tau")
            if abs(self.lam) > 1.0 or abs(self.tau) > 1.0:
                raise DomainError("lambda and tau must lie in [-1, 1]")
            d = 2**self.n_bits
            prod = self.lam * self.tau
            if prod < -1.0 / (d - 1) - EXACT_TOL or prod > 1.0 / (d - 3) + EXACT_TOL:
                raise DomainError(
                    "inadmissible parameters: need "
                    f"-1/(2^N-1) <= lambda*tau <= 1/(2^N-3), got lambda*tau="
                    f"{prod!r} for N={self.n_bits}"
                )
        elif self.kind == "embedded":
            if self.m is None or self.m < 1:
                raise DomainError("embedding sphere dimension m must be >= 1")
        elif self.kind == "weak":
            if self.lam is None:
                raise DomainError("the weakly entangled model needs lambda")
            if abs(self.lam) > 1.0:
                raise DomainError("lambda must lie in [-1, 1]")

    @classmethod
    def base(cls, n_bits: int) -> "TheoryConfig":
        return cls("base", n_bits)

    @classmethod
    def lambda_tau(cls, n_bits: int, lam: float, tau: float) -> "TheoryConfig":
        return cls("lambda-tau", n_bits, lam=lam, tau=tau)

    @classmethod
    def embedded(cls, n_bits: int, m: int) -> "TheoryConfig":
        return cls("embedded", n_bits, m=m)

    @classmethod
    def weak(cls, n_bits: int, lam: float) -> "TheoryConfig":
        return cls("weak", n_bits, lam=lam)

    @property
    def hadamard_dim(self) -> int:
        """Size of the sign-vector block, 2**n_bits."""
        return 2**self.n_bits

    @property
    def ball_dim(self) -> int:
        """Dimension of the correlated ball block, 2**n_bits - 1."""
        return 2**self.n_bits - 1

    @property
    def local_dim(self) -> int:
        """Number of coordinates of a local state (without normalisation)."""
        if self.kind == "embedded":
            return self.ball_dim + self.m
        return self.ball_dim

    @property
    def local_capacity_bits(self) -> float:
        """Classical capacity of one local system; 1 bit for every kind."""
        return 1.0

    def state_from_direction(self, direction) -> State:
        """Pure local state pointing along ``direction`` in the active block.

        For the embedded model the active block is the trailing ``m``
        coordinates; the leading ball block is frozen at zero.
        """
        direction = np.asarray(direction, dtype=float)
        active = self.m if self.kind == "embedded" else self.ball_dim
        if direction.size != active:
            raise GptError(
                f"direction has {direction.size} components, expected {active}"
            )
        entries = np.zeros(self.local_dim + 1)
        entries[0] = 1.0
        entries[self.local_dim + 1 - active :] = direction
        return State(entries)

    def mixed_state(self) -> State:
        entries = np.zeros(self.local_dim + 1)
        entries[0] = 1.0
        return State(entries)

    def generating_states(self) -> list:
        """Finite family spanning the local state space's extreme directions."""
        active = self.m if self.kind == "embedded" else self.ball_dim
        states = [self.mixed_state()]
        for k in range(active):
            axis = np.zeros(active)
            axis[k] = 1.0
            states.append(self.state_from_direction(axis))
            states.append(self.state_from_direction(-axis))
        return states

    def random_pure_state(self, rng: np.random.Generator) -> State:
        active = self.m if self.kind == "embedded" else self.ball_dim
        v = rng.standard_normal(active)
        return self.state_from_direction(v / np.linalg.norm(v))


def unit_effect(dim: int) -> Effect:
    """The effect assigning probability 1 to every normalised state."""
    entries = np.zeros(dim + 1)
    entries[0] = 1.0
    return Effect(entries)


def zero_effect(dim: int) -> Effect:
    return Effect(np.zeros(dim + 1))


def bipartite_unit(dim_a: int, dim_b: int) -> BipartiteEffect:
    matrix = np.zeros((dim_a + 1, dim_b + 1))
    matrix[0, 0] = 1.0
    return BipartiteEffect(matrix)


def contract(effect: Effect, state: State) -> float:
    """Outcome probability ``e . omega`` (Euclidean inner product)."""
    if effect.entries.size != state.entries.size:
        raise GptError(
            f"effect has {effect.entries.size} entries, state has "
            f"{state.entries.size}"
        )
    return float(effect.entries @ state.entries)


def bipartite_contract(effect: BipartiteEffect, phi: BipartiteState) -> float:
    """Outcome probability ``Tr(E^t phi)``, the entrywise matrix product sum."""
    if effect.matrix.shape != phi.matrix.shape:
        raise GptError(
            f"effect shape {effect.matrix.shape} does not match state shape "
            f"{phi.matrix.shape}"
        )
    return float(np.sum(effect.matrix * phi.matrix))


def product_state(state_a: State, state_b: State) -> BipartiteState:
    """Outer product realising the tensor product of local states."""
    return BipartiteState(np.outer(state_a.entries, state_b.entries))


def product_effect(effect_a: Effect, effect_b: Effect) -> BipartiteEffect:
    return BipartiteEffect(np.outer(effect_a.entries, effect_b.entries))


def reduced_states(phi: BipartiteState) -> tuple:
    """Local marginals ``(phi u_B, phi^t u_A)``: first column and first row."""
    return State(phi.matrix[:, 0]), State(phi.matrix[0, :])


def mix_states(states, weights) -> State:
    weights = np.asarray(weights, dtype=float)
    stacked = np.stack([s.entries for s in states])
    return State(weights @ stacked)


def mix_bipartite(phis, weights) -> BipartiteState:
    weights = np.asarray(weights, dtype=float)
    stacked = np.stack([p.matrix for p in phis])
    return BipartiteState(np.tensordot(weights, stacked, axes=1))


def entropy_bits(p) -> float:
    """Shannon entropy in bits with the 0 log 0 = 0 convention."""
    p = np.asarray(p, dtype=float)
    mask = p > 0
    return float(-np.sum(p[mask] * np.log2(p[mask])))


def mutual_information(channel: Channel) -> float:
    """I(X:Y) in bits for the given prior and conditional table.

    Zero-probability outcomes are retained and contribute nothing.
    """
    joint = channel.prior[:, None] * channel.conditional
    p_y = joint.sum(axis=0)
    mask = joint > 0
    ratio = np.ones_like(joint)
    np.divide(channel.conditional, p_y[None, :], out=ratio, where=mask)
    return float(np.sum(joint[mask] * np.log2(ratio[mask])))


def validate_measurement(measurement: Measurement, theory: TheoryConfig) -> ValidationReport:
    """Check completeness and probability bounds against ``theory``.

    The probe family is the theory's generating states plus, for every
    effect, the pure states aligned with that effect's active block, which
    witness its extreme probabilities on the ball.
    """
    violations = []
    size = measurement.effects[0].entries.size
    for e in measurement.effects:
        if e.entries.size != size:
            raise GptError("measurement effects have mismatched lengths")
    if size != theory.local_dim + 1:
        raise GptError(
            f"effects have {size} entries but the theory's states have "
            f"{theory.local_dim + 1}"
        )

    total = np.sum([e.entries for e in measurement.effects], axis=0)
    expected = unit_effect(theory.local_dim).entries
    for k in np.flatnonzero(np.abs(total - expected) > EXACT_TOL):
        violations.append(
            {
                "check": "completeness",
                "component": int(k),
                "value": float(total[k]),
                "expected": float(expected[k]),
            }
        )

    active = theory.m if theory.kind == "embedded" else theory.ball_dim
    probes = theory.generating_states()
    for i, e in enumerate(measurement.effects):
        aligned = e.entries[size - active :]
        norm = np.linalg.norm(aligned)
        effect_probes = list(probes)
        if norm > EXACT_TOL:
            effect_probes.append(theory.state_from_direction(aligned / norm))
            effect_probes.append(theory.state_from_direction(-aligned / norm))
        for s in effect_probes:
            p = contract(e, s)
            if p < -EXACT_TOL or p > 1.0 + EXACT_TOL:
                violations.append(
                    {
                        "check": "probability_range",
                        "effect_index": i,
                        "state_r": [float(v) for v in s.r],
                        "value": p,
                    }
                )
    return ValidationReport(passed=not violations, violations=tuple(violations))
