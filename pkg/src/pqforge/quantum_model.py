"""Decoherence-limited adversary model.

Costs and probabilities are carried as base-2 logarithms (:class:`Log2Quantity`)
because realistic sieving times push ``exp(-T * tau_g / tau_d)`` far below the
smallest positive double. Exponential decoherence factors use natural
exponents; every ``log`` appearing in a query count or dimension is base 2
unless an operation says otherwise.

Asymptotic constants (Omega, Theta, soft-O) are fixed to 1. Operations that
wrap such a constant accept an optional ``constant`` multiplier.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from typing import Iterable, Union

from .errors import DomainError, ValidationError

LN2 = math.log(2.0)
LOG2_E = 1.0 / LN2

# Largest finite magnitude a log2 value may take; results beyond are saturated.
LOG2_SATURATION = sys.float_info.max

DEFAULT_TAU_G = 1e-8
DEFAULT_LAMBDA_D = 1e6
DEFAULT_EPSILON = 2.0 ** -128


@dataclass(frozen=True)
class QuantumEnvironment:
    """Physical constants of the adversary's machine.

    ``tau_d = inf`` models an ideal, decoherence-free device; formulas whose
    decoherence contribution is then absent drop that contribution.
    """

    tau_g: float = DEFAULT_TAU_G
    tau_d: float = DEFAULT_TAU_G * DEFAULT_LAMBDA_D
    k: int = 1
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        if not (self.tau_g > 0 and math.isfinite(self.tau_g)):
            raise ValidationError(f"tau_g must be a positive finite time, got {self.tau_g}")
        if not self.tau_d > 0:
            raise ValidationError(f"tau_d must be positive, got {self.tau_d}")
        if self.tau_d < self.tau_g:
            raise ValidationError("tau_d must be >= tau_g (a gate has to finish within coherence)")
        if int(self.k) != self.k or self.k < 1:
            raise ValidationError(f"k must be an integer >= 1, got {self.k}")
        if not 0 < self.epsilon < 1:
            raise ValidationError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        object.__setattr__(self, "k", int(self.k))

    @classmethod
    def from_ratio(cls, lambda_d: float, *, tau_g: float = DEFAULT_TAU_G, k: int = 1,
                   epsilon: float = DEFAULT_EPSILON) -> "QuantumEnvironment":
        return cls(tau_g=tau_g, tau_d=tau_g * lambda_d, k=k, epsilon=epsilon)

    @classmethod
    def ideal(cls, *, k: int = 1, epsilon: float = DEFAULT_EPSILON) -> "QuantumEnvironment":
        return cls(tau_g=DEFAULT_TAU_G, tau_d=math.inf, k=k, epsilon=epsilon)

    @property
    def lambda_d(self) -> float:
        """Decoherence length tau_d / tau_g (recomputed on every access)."""
        return self.tau_d / self.tau_g

    @property
    def gate_ratio(self) -> float:
        """tau_g / tau_d; zero for an ideal device."""
        return self.tau_g / self.tau_d

    @property
    def coherent(self) -> bool:
        return math.isinf(self.tau_d)


class QuantityKind(enum.Enum):
    COST = "cost"
    PROBABILITY = "probability"


@dataclass(frozen=True)
class Log2Quantity:
    """A non-negative quantity stored as its base-2 logarithm."""

    log2_value: float
    kind: QuantityKind = QuantityKind.COST

    def __post_init__(self) -> None:
        if math.isnan(self.log2_value):
            raise ValidationError("log2 value is NaN")
        if self.kind is QuantityKind.PROBABILITY and self.log2_value > 0:
            raise ValidationError(f"probability must have log2 <= 0, got {self.log2_value}")

    @classmethod
    def cost(cls, log2_value: float) -> "Log2Quantity":
        return cls(log2_value, QuantityKind.COST)

    @classmethod
    def probability(cls, log2_value: float) -> "Log2Quantity":
        return cls(log2_value, QuantityKind.PROBABILITY)

    @classmethod
    def from_value(cls, value: float, kind: QuantityKind = QuantityKind.COST) -> "Log2Quantity":
        if value < 0:
            raise DomainError("Log2Quantity holds non-negative values only")
        return cls(math.log2(value) if value > 0 else -math.inf, kind)

    @property
    def value(self) -> float:
        """Linear value; ``inf`` when it exceeds the double range."""
        if self.log2_value >= 1024:
            return math.inf
        return 2.0 ** self.log2_value

    def plus(self, other: "Log2Quantity") -> "Log2Quantity":
        """Sum of the underlying quantities, via log-sum-exp."""
        return Log2Quantity(logsumexp2([self.log2_value, other.log2_value]), self.kind)

    def times(self, other: "Log2Quantity") -> "Log2Quantity":
        total = _saturate(self.log2_value + other.log2_value)
        if self.kind is QuantityKind.PROBABILITY:
            total = min(total, 0.0)
        return Log2Quantity(total, self.kind)

    def __float__(self) -> float:
        return float(self.log2_value)


QueryCount = Union[int, float, Log2Quantity]


def logsumexp2(xs: Iterable[float]) -> float:
    """``log2(sum(2**x))`` without leaving the log domain."""
    xs = list(xs)
    if not xs:
        return -math.inf
    top = max(xs)
    if math.isinf(top):
        return top
    total = math.fsum(2.0 ** (x - top) for x in xs)
    return top + math.log2(total)


def _saturate(x: float) -> float:
    if x > LOG2_SATURATION:
        return LOG2_SATURATION
    if x < -LOG2_SATURATION:
        return -LOG2_SATURATION
    return x


def _log2_count(queries: QueryCount) -> float:
    """log2 of a non-negative query count given linearly or as a Log2Quantity."""
    if isinstance(queries, Log2Quantity):
        return queries.log2_value
    if queries < 0 or (isinstance(queries, float) and math.isnan(queries)):
        raise DomainError(f"query count must be >= 0, got {queries}")
    if queries == 0:
        return -math.inf
    return math.log2(queries)


def decoherence_log2_factor(queries: QueryCount, env: QuantumEnvironment) -> Log2Quantity:
    """log2 of ``exp(-T * tau_g / tau_d)``: a probability multiplier.

    Evaluated as ``-2^(log2 T + log2(tau_g/tau_d) - log2 ln 2)`` so that T may
    be as large as 2^1024 (pass a :class:`Log2Quantity`). Magnitudes past the
    double range saturate at ``-LOG2_SATURATION``.
    """
    log2_t = _log2_count(queries)
    if math.isinf(log2_t) or env.coherent:
        return Log2Quantity.probability(0.0)
    magnitude_log2 = log2_t + math.log2(env.gate_ratio) - math.log2(LN2)
    if magnitude_log2 >= 1024:
        return Log2Quantity.probability(-LOG2_SATURATION)
    return Log2Quantity.probability(-(2.0 ** magnitude_log2))


def min_queries_for_error(target_epsilon: float, env: QuantumEnvironment) -> float:
    """Decoherence floor ``(tau_d/tau_g) * ln(1/eps)`` on sequential queries."""
    if not 0 < target_epsilon < 1:
        raise DomainError(f"target epsilon must lie in (0, 1), got {target_epsilon}")
    return env.lambda_d * -math.log(target_epsilon)


@dataclass(frozen=True)
class QueryComplexityInput:
    deg_eps: float
    sparsity: float
    domain_size_log2: float
    epsilon: float

    def __post_init__(self) -> None:
        if not self.deg_eps >= 1:
            raise ValidationError("approximate degree must be >= 1")
        if not self.sparsity >= 1:
            raise ValidationError("Fourier sparsity must be >= 1")
        if not 0 < self.epsilon < 0.5:
            raise ValidationError("error must lie in (0, 0.5)")
        if self.domain_size_log2 < 0:
            raise ValidationError("domain size must be >= 1")


def algebraic_query_term(inp: QueryComplexityInput, constant: float = 1.0) -> float:
    """Polynomial-method term ``c * (1-2 eps)^2 / deg * log2(|X| / spar)`` in queries."""
    spar_log2 = math.log2(inp.sparsity)
    if spar_log2 > inp.domain_size_log2:
        raise DomainError("sparsity cannot exceed the domain size")
    return constant * (1.0 - 2.0 * inp.epsilon) ** 2 / inp.deg_eps * (inp.domain_size_log2 - spar_log2)


def quantum_lower_bound(inp: QueryComplexityInput, env: QuantumEnvironment,
                        constant: float = 1.0) -> Log2Quantity:
    """Query lower bound under decoherence: max(algebraic term, decoherence floor).

    Both terms are query counts. The decoherence floor uses ``ln(1/eps)``, the
    same e-folding count as :func:`min_queries_for_error`; the algebraic term
    takes the log of ``|X| / spar`` in base 2. An ideal device
    (``tau_d = inf``) has no decoherence floor, so only the algebraic term is
    returned. The Omega constant of the algebraic term defaults to 1.
    """
    algebraic = algebraic_query_term(inp, constant)
    if env.coherent:
        best = algebraic
    else:
        best = max(algebraic, min_queries_for_error(inp.epsilon, env))
    return Log2Quantity.from_value(best, QuantityKind.COST)


def parallelization_log2_penalty(k: int) -> Log2Quantity:
    """The ``1/sqrt(k)`` parallel-processor factor, in log2."""
    if int(k) != k or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k}")
    return Log2Quantity.probability(-0.5 * math.log2(k))


def compose_attack_success(base_log2_prob: Log2Quantity, queries: QueryCount,
                           env: QuantumEnvironment) -> Log2Quantity:
    """Attack success after decoherence and parallelization penalties."""
    if base_log2_prob.kind is not QuantityKind.PROBABILITY:
        raise DomainError("base must be a PROBABILITY quantity")
    total = (base_log2_prob.log2_value
             + decoherence_log2_factor(queries, env).log2_value
             + parallelization_log2_penalty(env.k).log2_value)
    return Log2Quantity.probability(min(_saturate(total), 0.0))


def entropy_loss_bound(k: int, env: QuantumEnvironment, domain_size_log2: float) -> float:
    """Leading term ``(k tau_g / tau_d) * log2|X|`` of the entropy lost to k parallel queries.

    The O(sqrt(k)) residual has no published constant and is omitted.
    """
    if int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    if domain_size_log2 < 0:
        raise DomainError("domain size must be >= 1")
    return k * env.gate_ratio * domain_size_log2


def grover_log2_cost(n: int, constant: float = 1.0) -> Log2Quantity:
    """Unstructured search over 2^n: sqrt(2^n) queries."""
    if n < 1:
        raise DomainError("n must be >= 1")
    return Log2Quantity.cost(n / 2.0 + math.log2(constant))


def collision_search_log2_cost(m: int, constant: float = 1.0) -> Log2Quantity:
    """Quantum collision search on an m-bit range: Theta(2^(m/3)), constant 1."""
    if m < 1:
        raise DomainError("m must be >= 1")
    return Log2Quantity.cost(m / 3.0 + math.log2(constant))


def quantum_walk_cost(setup: float, update: float, check: float, delta: float, eps: float) -> float:
    """Quantum-walk search cost ``S + (U / sqrt(delta) + C) / sqrt(eps)``."""
    if not (0 < delta <= 1 and 0 < eps <= 1):
        raise DomainError("delta and eps must lie in (0, 1]")
    if min(setup, update, check) < 0:
        raise DomainError("costs must be non-negative")
    return setup + (update / math.sqrt(delta) + check) / math.sqrt(eps)


def quantum_advantage_bound(t_quant: QueryCount, env: QuantumEnvironment, dim: int) -> float:
    """log2 of ``exp((T tau_g/tau_d) * log2(dim)/dim)``, the bound on the quantum speed-up."""
    if dim < 2:
        raise DomainError("lattice dimension must be >= 2")
    log2_t = _log2_count(t_quant)
    if math.isinf(log2_t) or env.coherent:
        return 0.0
    shape = math.log2(dim) / dim
    magnitude = log2_t + math.log2(env.gate_ratio) + math.log2(shape) - math.log2(LN2)
    if magnitude >= 1024:
        return LOG2_SATURATION
    return 2.0 ** magnitude


def lattice_success_decay(p0: float, time_seconds: float, env: QuantumEnvironment, dim: int) -> float:
    """``p0 * exp(-(t / tau_d) * dim / log2(dim))``."""
    if not 0 < p0 <= 1:
        raise DomainError("p0 must lie in (0, 1]")
    if time_seconds < 0:
        raise DomainError("time must be >= 0")
    if dim < 3:
        raise DomainError("dimension must be >= 3 so that log2(dim) > 1")
    if env.coherent:
        return p0
    return p0 * math.exp(-(time_seconds / env.tau_d) * dim / math.log2(dim))


def max_feasible_dimension(env: QuantumEnvironment, lam: int, p0: float) -> int:
    """``floor(lambda_d * (log2 lam / lam) * log2(1/p0))``; both logs base 2."""
    if lam < 2:
        raise DomainError("lambda must be >= 2")
    if not 0 < p0 < 1:
        raise DomainError("p0 must lie in (0, 1)")
    if env.coherent:
        raise DomainError("an ideal device has no finite maximum dimension")
    return math.floor(env.lambda_d * (math.log2(lam) / lam) * math.log2(1.0 / p0))
