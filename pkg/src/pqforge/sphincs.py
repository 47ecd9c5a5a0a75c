"""SPHINCS+ collision bounds, entropy concentration and the hypertree optimizer.

Entropy model
-------------
The optimizer needs a collision entropy that responds to the tree height. We
use the leaf-index entropy of a hypertree of height ``h`` addressed by an
``n``-bit ideal hash::

    H2(h; n, lam) = min(h, effective_h2(n, lam))

where :func:`effective_h2` is the conservative entropy of the hash that holds
except with probability ``2^-lam`` under the concentration tail.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Any

from .errors import DomainError, NonTerminationError, ValidationError
from .quantum_model import LN2, Log2Quantity, QuantumEnvironment, logsumexp2

IMPROVED_CONSTANT = 3.0
CLASSICAL_CONSTANT = 2.0

BYTES_PER_KB = 1024

# Hypertree shape used to pin the signature-size proxy to the 8.0 KB,
# 256-bit-hash reference row (an h=63, d=7 "small" parameter shape).
REFERENCE_SHAPE = {"h": 63, "d": 7, "t": 1, "n": 256}
REFERENCE_SIZE_KB = 8.0

ITERATION_CAP = 10 ** 6
H_SEARCH_LIMIT = 2 ** 20


@dataclass(frozen=True)
class SphincsParams:
    h: int
    d: int
    t: int
    n: int
    query_budget: float

    def __post_init__(self) -> None:
        for name in ("h", "d", "t", "n"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValidationError(f"{name} must be a positive integer, got {value}")
        if self.d > self.h:
            raise ValidationError("hypertree depth d cannot exceed height h")
        if not self.query_budget > 0:
            raise ValidationError("query budget must be positive")


class BindingConstraint(enum.Enum):
    ENTROPY = "ENTROPY"
    COLLISION_ALGO = "COLLISION_ALGO"
    DECOHERENCE = "DECOHERENCE"
    HEIGHT_BOUND = "HEIGHT_BOUND"


@dataclass
class SphincsReport:
    params: SphincsParams
    h2_effective: float
    collision_log2_prob: float
    cost_log2: float
    signature_size_bytes: float
    binding_constraint: BindingConstraint
    achieved_lambda: float
    lam: int = 0
    initial_h: int = 0
    iterations: int = 0
    tau_log2: float = 0.0
    entropy_threshold: float = 0.0
    attack_time_seconds: float = 0.0
    calibration: float = 0.0
    requirements: dict[str, float] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["binding_constraint"] = self.binding_constraint.value
        return out


def _log2_pairs(q: float) -> float:
    """log2 of C(q, 2); -inf when no pair exists."""
    if q < 2:
        return -math.inf
    return math.log2(q) + math.log2(q - 1) - 1.0


def collision_log2_probability(params: SphincsParams, h2: float, attack_time_seconds: float,
                               env: QuantumEnvironment) -> float:
    """log2 of ``C(q,2) * (2^-H2 + 3^(k/2) / 2^(n/2)) * exp(-t / tau_d)``.

    The result is a bound and may exceed 0 (a vacuous bound above 1).
    """
    if h2 < 0:
        raise DomainError("collision entropy must be >= 0")
    if attack_time_seconds < 0:
        raise DomainError("attack time must be >= 0")
    pairs = _log2_pairs(params.query_budget)
    if math.isinf(pairs):
        return -math.inf
    inner = logsumexp2([-h2, 0.5 * env.k * math.log2(3.0) - params.n / 2.0])
    decay = 0.0 if env.coherent else -(attack_time_seconds / env.tau_d) / LN2
    return pairs + inner + decay


def entropy_concentration_tail(b: float, t: float, constant: float = IMPROVED_CONSTANT) -> float:
    """Tail ``exp(-c t^2 / b)`` on the collision-entropy deficit of a b-bit hash."""
    if b < 1:
        raise DomainError("b must be >= 1")
    if t < 0:
        raise DomainError("deviation t must be >= 0")
    return math.exp(-constant * t * t / b)


def entropy_margin(b: float, lam: float, constant: float = IMPROVED_CONSTANT) -> float:
    """Deviation ``t*`` at which the concentration tail equals ``2^-lam``."""
    if b < 1 or lam <= 0:
        raise DomainError("b must be >= 1 and lambda > 0")
    return math.sqrt(b * lam * LN2 / constant)


def margin_ratio(constant: float = IMPROVED_CONSTANT, baseline: float = CLASSICAL_CONSTANT) -> float:
    """Ratio of required margins (same tail) between two concentration constants."""
    if constant <= 0 or baseline <= 0:
        raise DomainError("constants must be positive")
    return math.sqrt(baseline / constant)


def effective_h2(n: int, lam: float, constant: float = IMPROVED_CONSTANT) -> float:
    """Conservative collision entropy of an ideal n-bit hash (fails w.p. 2^-lam)."""
    value = n - entropy_margin(n, lam, constant)
    if value <= 0:
        raise DomainError(f"a {n}-bit hash leaves no entropy at lambda={lam}")
    return value


def tree_collision_entropy(h: int, n: int, lam: float, constant: float = IMPROVED_CONSTANT) -> float:
    return min(float(h), effective_h2(n, lam, constant))


def entropy_threshold(lam: float, query_budget: float, factor: float = 1.0) -> float:
    """``lam + log2(factor * q^2)``; factor 1 in the optimizer loop, 3/2 for h_opt."""
    if query_budget <= 0 or factor <= 0:
        raise DomainError("query budget and factor must be positive")
    return lam + math.log2(factor) + 2.0 * math.log2(query_budget)


def h_opt(lam: float, query_budget: float, n: int, step: int = 1,
          constant: float = IMPROVED_CONSTANT) -> int:
    """Smallest height whose tree entropy meets ``lam + log2(1.5 q^2)``."""
    threshold = entropy_threshold(lam, query_budget, 1.5)
    cap = effective_h2(n, lam, constant)
    if cap < threshold:
        raise DomainError(
            f"n={n} caps the entropy at {cap:.3f} bits, below the {threshold:.3f}-bit threshold")
    h = 1
    while h <= H_SEARCH_LIMIT:
        if tree_collision_entropy(h, n, lam, constant) >= threshold:
            return h
        h += step
    raise DomainError("no height up to 2^20 satisfies the entropy threshold")


def sphincs_quantum_cost(h: int, env: QuantumEnvironment) -> Log2Quantity:
    """log2 of ``min(2^(h/2), 2^(h/3)) * exp(-tau_g/tau_d)``.

    The min always resolves to h/3 for positive h; both branches are evaluated anyway.
    """
    if h < 1:
        raise DomainError("h must be >= 1")
    return Log2Quantity.cost(min(h / 2.0, h / 3.0) - env.gate_ratio / LN2)


def signature_size_estimate(params: SphincsParams, calibration: float) -> float:
    """Proxy signature size in bytes: ``c * (n/8) * (h + t log2 max(t, 2))``."""
    if calibration <= 0:
        raise DomainError("calibration must be positive")
    hash_bytes = params.n / 8.0
    tree = (params.h / params.d) * params.d
    fors = params.t * math.log2(max(params.t, 2))
    return calibration * tree * hash_bytes + calibration * fors * hash_bytes


def fit_signature_calibration(params: SphincsParams, size_bytes: float) -> float:
    return size_bytes / signature_size_estimate(params, 1.0)


def default_signature_calibration() -> float:
    ref = SphincsParams(query_budget=1.0, **REFERENCE_SHAPE)
    return fit_signature_calibration(ref, REFERENCE_SIZE_KB * BYTES_PER_KB)


def decoherence_height_bound(lam: float, env: QuantumEnvironment) -> float:
    """Minimum height ``1.5 lam + log2((tau_g/tau_d) ln 2)``."""
    if env.coherent:
        return -math.inf
    return 1.5 * lam + math.log2(env.gate_ratio * LN2)


def minimal_hash_bits(lam: float, threshold: float, constant: float = IMPROVED_CONSTANT) -> int:
    """Smallest n whose conservative entropy reaches ``threshold``."""
    n = max(1, math.ceil(threshold))
    while True:
        try:
            if effective_h2(n, lam, constant) >= threshold:
                return n
        except DomainError:
            pass
        n += 1


def _min_height_for_cost(lam: float, env: QuantumEnvironment) -> int:
    h = max(1, math.floor(3 * lam) - 1)
    while sphincs_quantum_cost(h, env).log2_value < lam:
        h += 1
    return h


def sphincs_requirements(lam: float, query_budget: float, n: int, env: QuantumEnvironment,
                         constant: float = IMPROVED_CONSTANT) -> dict[str, float]:
    """Height each constraint demands on its own (``inf`` when unattainable)."""
    threshold = entropy_threshold(lam, query_budget)
    entropy_req = math.ceil(threshold) if effective_h2(n, lam, constant) >= threshold else math.inf
    coherent = QuantumEnvironment.ideal(k=env.k, epsilon=env.epsilon)
    return {
        BindingConstraint.ENTROPY.value: float(entropy_req),
        BindingConstraint.COLLISION_ALGO.value: float(_min_height_for_cost(lam, coherent)),
        BindingConstraint.DECOHERENCE.value: float(_min_height_for_cost(lam, env)),
        BindingConstraint.HEIGHT_BOUND.value: float(math.ceil(decoherence_height_bound(lam, env)))
        if not env.coherent else 0.0,
    }


def binding_constraint(requirements: dict[str, float]) -> BindingConstraint:
    """The constraint with the largest height demand.

    DECOHERENCE only binds when the decoherence penalty raises the demand
    above the coherent collision-search demand.
    """
    order = [BindingConstraint.ENTROPY, BindingConstraint.COLLISION_ALGO,
             BindingConstraint.DECOHERENCE, BindingConstraint.HEIGHT_BOUND]
    best = order[0]
    for name in order[1:]:
        value = requirements[name.value]
        if name is BindingConstraint.DECOHERENCE and value <= requirements["COLLISION_ALGO"]:
            continue
        if value > requirements[best.value]:
            best = name
    return best


def evaluate_sphincs(params: SphincsParams, lam: float, env: QuantumEnvironment, *,
                     calibration: float | None = None, attack_time: float | None = None,
                     constant: float = IMPROVED_CONSTANT) -> SphincsReport:
    """Evaluate every bound on a fixed parameter set."""
    if calibration is None:
        calibration = default_signature_calibration()
    if attack_time is None:
        attack_time = params.query_budget * env.tau_g
    h2 = tree_collision_entropy(params.h, params.n, lam, constant)
    coll = collision_log2_probability(params, h2, attack_time, env)
    cost = sphincs_quantum_cost(params.h, env).log2_value
    reqs = sphincs_requirements(lam, params.query_budget, params.n, env, constant)
    flags = ["MIN_RETAINED_H_OVER_3"]
    threshold = entropy_threshold(lam, params.query_budget)
    if h2 < threshold:
        flags.append("ENTROPY_CONDITION_UNMET")
    if cost < lam:
        flags.append("COST_BELOW_LAMBDA")
    if coll > 0:
        flags.append("COLLISION_BOUND_VACUOUS")
    return SphincsReport(
        params=params,
        h2_effective=h2,
        collision_log2_prob=coll,
        cost_log2=cost,
        signature_size_bytes=signature_size_estimate(params, calibration),
        binding_constraint=binding_constraint(reqs),
        achieved_lambda=max(0.0, -coll),
        lam=int(lam),
        entropy_threshold=threshold,
        attack_time_seconds=attack_time,
        calibration=calibration,
        requirements=reqs,
        flags=flags,
    )


def optimize_sphincs(lam: int, env: QuantumEnvironment, max_depth: int = 8,
                     query_budget: float = 2.0 ** 64, step_h: int = 1, *,
                     hash_bits: int | None = None, max_tweak: int = 16,
                     calibration: float | None = None, attack_time: float | None = None,
                     constant: float = IMPROVED_CONSTANT,
                     iteration_cap: int = ITERATION_CAP) -> SphincsReport:
    """Grow (h, d, t) until the quantum collision cost reaches ``lam`` bits.

    Each pass: if the tree entropy is below ``lam + log2(q^2)`` raise h by
    ``step_h``; otherwise deepen the hypertree up to ``max_depth``, then raise
    the tweak count up to ``max_tweak``, and once both are exhausted raise h.
    Height therefore grows at least every ``max_depth + max_tweak`` passes, so
    the loop terminates; the iteration cap guards misconfiguration.

    ``hash_bits`` defaults to the smallest n whose conservative entropy can
    meet the threshold. ``tau_log2`` accumulates ``log2(d * 2^(h/d))`` per pass
    and is diagnostic only.
    """
    if lam < 1 or max_depth < 1 or step_h < 1 or max_tweak < 1:
        raise DomainError("lambda, max_depth, step_h and max_tweak must be >= 1")
    threshold = entropy_threshold(lam, query_budget)
    n = hash_bits if hash_bits is not None else minimal_hash_bits(lam, threshold, constant)
    h = math.ceil(lam * math.log2(3))
    d, t = 1, 1
    initial_h = h
    tau = 0.0
    sign_time_log2 = math.log2(d) + h / d
    iterations = 0
    while sphincs_quantum_cost(h, env).log2_value < lam:
        if iterations >= iteration_cap:
            raise NonTerminationError(
                "SPHINCS+ optimizer exceeded its iteration cap",
                {"h": h, "d": d, "t": t, "n": n, "tau_log2": tau, "iterations": iterations})
        iterations += 1
        h2 = tree_collision_entropy(h, n, lam, constant)
        if h2 < threshold:
            h += step_h
        elif d < max_depth and d < h:
            d += 1
        elif t < max_tweak:
            t += 1
        else:
            h += step_h
        tau += sign_time_log2
        sign_time_log2 = math.log2(d) + h / d

    params = SphincsParams(h=h, d=d, t=t, n=n, query_budget=query_budget)
    report = evaluate_sphincs(params, lam, env, calibration=calibration,
                              attack_time=attack_time, constant=constant)
    report.initial_h = initial_h
    report.iterations = iterations
    report.tau_log2 = tau
    if hash_bits is None:
        report.flags.append("HASH_BITS_DERIVED")
    return report
