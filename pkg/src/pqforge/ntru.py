"""NTRU hardness terms, quantum lattice entropy and the parameter optimizer.

Two cost models are supported. ``CLOSED_FORM`` evaluates the optimizer and
the three-term hardness bound in closed form, including the blocksize
``ceil(log2 2N)`` and a root-Hermite factor below 1; terms that become
undefined are flagged instead of reinterpreted. ``BKZ_BLOCKSIZE`` (default)
derives the blocksize from the root-Hermite relation and charges the sieve
its decoherence-limited expected cost.

Conventions for the NTRU lattice: dimension 2N, determinant q^N and the
Gaussian-heuristic first minimum; see :func:`estimate_ntru_shape`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .errors import (CapabilityError, ConvergenceError, DomainError, NonTerminationError,
                     RangeError, ValidationError)
from .lattice import MAX_ENUM_DIM, IntegerLattice, enumerate_short_vectors
from .quantum_model import (LN2, Log2Quantity, QuantumEnvironment, _saturate,
                            decoherence_log2_factor)

SIEVE_EXPONENT = 0.292
BLOCKSIZE_MIN = 50
BLOCKSIZE_MAX = 2 ** 20
DELTA_FLOOR = 1.0 + 1e-9

DEFAULT_Q0 = 2048
DEFAULT_RQ = 2
DEFAULT_NTRU_EPS = 2.0 ** -40
DEFAULT_MAX_MODULUS = 2 ** 40
DEFAULT_PRIME_STEP = 256
ITERATION_CAP = 10 ** 6
MAPPING_MAX_ITER = 100

COMPLEXITY_CONSTANT = 0.5


class CostModel(enum.Enum):
    CLOSED_FORM = "closed-form"
    BKZ_BLOCKSIZE = "bkz-blocksize"

    @classmethod
    def parse(cls, text: "str | CostModel") -> "CostModel":
        if isinstance(text, CostModel):
            return text
        key = str(text).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise DomainError(f"unknown cost model {text!r}; choose closed-form or bkz-blocksize")


class NSchedule(enum.Enum):
    POWER_OF_TWO = "power-of-two"
    PRIME = "prime"

    @classmethod
    def parse(cls, text: "str | NSchedule") -> "NSchedule":
        if isinstance(text, NSchedule):
            return text
        key = str(text).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key:
                return member
        raise DomainError(f"unknown N schedule {text!r}; choose power-of-two or prime")


class Outcome(enum.Enum):
    SUCCESS = "SUCCESS"
    INCREASE_LAMBDA = "INCREASE_LAMBDA"


# --------------------------------------------------------------------------
# primes

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime_3mod8(x: int) -> int:
    """Smallest prime p >= x with p = 3 (mod 8)."""
    if x < 2:
        raise DomainError("x must be >= 2")
    p = int(x) + (3 - int(x)) % 8
    while p < 2 ** 63:
        if is_prime(p):
            return p
        p += 8
    raise RangeError("no qualifying prime below 2^63")


def next_prime(x: int) -> int:
    p = max(2, int(x))
    while not is_prime(p):
        p += 1
    return p


# --------------------------------------------------------------------------
# domain types

@dataclass(frozen=True)
class NtruParams:
    N: int
    q: int
    sigma: float
    d_f: int
    d_g: int

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError("ring degree N must be a positive integer")
        if int(self.q) != self.q or self.q < 3 or not is_prime(int(self.q)):
            raise ValidationError(f"modulus q must be a prime >= 3, got {self.q}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValidationError("sigma must be positive and finite")
        for name in ("d_f", "d_g"):
            v = getattr(self, name)
            if int(v) != v or not 0 <= v <= self.N:
                raise ValidationError(f"{name} must be an integer in [0, N]")
        if self.d_f + self.d_g > 2 * self.N:
            raise ValidationError("d_f + d_g must not exceed 2N")

    @classmethod
    def with_default_weights(cls, N: int, q: int, sigma: float) -> "NtruParams":
        return cls(N, q, sigma, math.ceil(N / 3), N // 3)


@dataclass(frozen=True)
class LatticeShape:
    dim: int
    log2_det: float
    lambda1: float
    delta: float

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 2:
            raise ValidationError("lattice dimension must be an integer >= 2")
        if not self.lambda1 > 0:
            raise ValidationError("lambda1 must be positive")
        if not self.delta > 0:
            raise ValidationError("root Hermite factor must be positive")

    @property
    def delta_below_one(self) -> bool:
        return self.delta < 1


@dataclass
class NtruReport:
    params: NtruParams
    shape: LatticeShape
    term_lattice_log2: Optional[float]
    term_keyspace_log2: Optional[float]
    term_decoherence_log2: Optional[float]
    achieved_lambda: float
    hq_bits: float
    cost_model: CostModel
    blocksize: Optional[int] = None
    flags: list[str] = field(default_factory=list)
    outcome: Outcome = Outcome.SUCCESS
    lam: int = 0
    iterations: int = 0
    c_quant_log2: Optional[float] = None
    schedule: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["cost_model"] = self.cost_model.value
        out["outcome"] = self.outcome.value
        return out


# --------------------------------------------------------------------------
# elementary terms

def root_hermite(sigma: float, N: int, q: int) -> float:
    """``(sigma sqrt(N) / q)^(2/N)``, evaluated through logarithms."""
    if sigma <= 0 or N < 1 or q <= 0:
        raise DomainError("sigma, N and q must be positive")
    return math.exp((2.0 / N) * (math.log(sigma) + 0.5 * math.log(N) - math.log(q)))


def sieve_log2_cost(beta: int) -> Log2Quantity:
    if int(beta) != beta or beta < 1:
        raise DomainError("blocksize must be an integer >= 1")
    return Log2Quantity.cost(SIEVE_EXPONENT * beta)


def _delta_of_blocksize(beta: int) -> float:
    b = float(beta)
    return ((b / (2 * math.pi * math.e)) * (math.pi * b) ** (1.0 / b)) ** (1.0 / (2.0 * (b - 1.0)))


def blocksize_for_delta(delta: float) -> int:
    """Minimal blocksize ``beta >= 50`` whose predicted root-Hermite factor is <= ``delta``.

    The predicted factor decreases in beta over [50, 2^20], so bisection
    finds the boundary.
    """
    if not delta > 1:
        raise DomainError("blocksize needs a root Hermite factor > 1; use the literal cost model")
    if _delta_of_blocksize(BLOCKSIZE_MIN) <= delta:
        return BLOCKSIZE_MIN
    if _delta_of_blocksize(BLOCKSIZE_MAX) > delta:
        raise RangeError(f"delta={delta!r} needs a blocksize above 2^20")
    lo, hi = BLOCKSIZE_MIN, BLOCKSIZE_MAX
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _delta_of_blocksize(mid) <= delta:
            hi = mid
        else:
            lo = mid
    return hi


def literal_blocksize(N: int) -> int:
    return math.ceil(math.log2(2 * N))


def estimate_ntru_shape(params: NtruParams) -> LatticeShape:
    dim = 2 * params.N
    log2_det = params.N * math.log2(params.q)
    # det^(1/dim) = sqrt(q) exactly
    lambda1 = math.sqrt(dim / (2 * math.pi * math.e)) * math.sqrt(params.q)
    return LatticeShape(dim, log2_det, lambda1, root_hermite(params.sigma, params.N, params.q))


def keyspace_term(N: int, q: int) -> float:
    return N * math.log2(q) / 2.0


def decoherence_term(q: int, eps: float, env: QuantumEnvironment) -> Optional[float]:
    """log2 of ``lambda_d * ln(q / eps)``; absent on an ideal device."""
    if env.coherent:
        return None
    return math.log2(env.lambda_d) + math.log2(math.log(q) - math.log(eps))


def _bkz_delta(delta: float, flags: list[str]) -> float:
    if delta < 1:
        flags.append("DELTA_BELOW_ONE_INVERTED")
        delta = 1.0 / delta
    if delta <= DELTA_FLOOR:
        flags.append("DELTA_CLAMPED")
        delta = DELTA_FLOOR
    return delta


def bkz_attack_log2_cost(beta: int, env: QuantumEnvironment) -> float:
    """Sieve cost divided by its decoherence-limited success probability, in log2."""
    sieve = sieve_log2_cost(beta)
    penalty = decoherence_log2_factor(sieve, env).log2_value
    return _saturate(sieve.log2_value - penalty)


def literal_c_quant(N: int, env: QuantumEnvironment) -> tuple[int, float]:
    """``T_sieve * exp(-T_sieve tau_g / tau_d)`` with ``beta = ceil(log2 2N)``, in log2."""
    beta = literal_blocksize(N)
    sieve = sieve_log2_cost(beta)
    return beta, _saturate(sieve.log2_value + decoherence_log2_factor(sieve, env).log2_value)


def bkz_c_quant(params: NtruParams, env: QuantumEnvironment, flags: list[str]) -> tuple[int, float]:
    delta = _bkz_delta(root_hermite(params.sigma, params.N, params.q), flags)
    beta = blocksize_for_delta(delta)
    return beta, bkz_attack_log2_cost(beta, env)


# --------------------------------------------------------------------------
# hardness

def ntru_hardness(params: NtruParams, env: QuantumEnvironment,
                  mode: "CostModel | str" = CostModel.BKZ_BLOCKSIZE, *,
                  eps: Optional[float] = None) -> NtruReport:
    """Evaluate the lattice, keyspace and decoherence terms for ``params``.

    ``achieved_lambda`` is the largest defined term: each term is a separate
    lower bound on the attack cost, so the best guaranteed level is their max.
    ``eps`` (used by the decoherence term) defaults to ``env.epsilon``.
    """
    mode = CostModel.parse(mode)
    eps = env.epsilon if eps is None else eps
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    flags: list[str] = []
    shape = estimate_ntru_shape(params)
    if shape.delta_below_one:
        flags.append("DELTA_BELOW_ONE")

    beta: Optional[int] = None
    lattice: Optional[float]
    if mode is CostModel.CLOSED_FORM:
        log2_delta = math.log2(shape.delta)
        if log2_delta <= 0:
            flags.append("LATTICE_TERM_UNDEFINED")
            lattice = None
        elif env.coherent:
            flags.append("LATTICE_TERM_ABSENT_COHERENT")
            lattice = None
        else:
            radicand = params.N * math.log2(params.q) / log2_delta
            lattice = _saturate((math.pi * env.lambda_d / math.sqrt(2)) * math.sqrt(radicand) / LN2)
    else:
        beta, lattice = bkz_c_quant(params, env, flags)

    keyspace = keyspace_term(params.N, params.q)
    decoh = decoherence_term(params.q, eps, env)
    if decoh is None:
        flags.append("DECOHERENCE_TERM_ABSENT")
    defined = [t for t in (lattice, keyspace, decoh) if t is not None]
    if not defined:
        raise DomainError("every hardness term is undefined for these parameters")

    return NtruReport(
        params=params,
        shape=shape,
        term_lattice_log2=lattice,
        term_keyspace_log2=keyspace,
        term_decoherence_log2=decoh,
        achieved_lambda=max(defined),
        hq_bits=quantum_lattice_entropy_bound(shape, params.sigma, env),
        cost_model=mode,
        blocksize=beta,
        flags=flags,
    )


def security_mapping(N: int, q: int, env: QuantumEnvironment, eps: float,
                     max_iter: int = MAPPING_MAX_ITER, tol: float = 1e-9) -> float:
    """Security level as the min of lattice, keyspace and decoherence terms (bits).

    The decoherence term ``lambda_d * ln(2^lambda)`` refers to the level
    itself; the level is its fixed point, iterated from the keyspace term.
    """
    if N < 1 or q < 2:
        raise DomainError("N >= 1 and q >= 2 required")
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    keyspace = keyspace_term(N, q)
    if env.coherent:
        return keyspace
    lattice = math.pi * env.lambda_d * math.sqrt(N * math.log2(q)) / math.sqrt(2 * math.log(1 / eps))
    lam = keyspace
    for _ in range(max_iter):
        nxt = min(lattice, keyspace, env.lambda_d * lam * LN2)
        if abs(nxt - lam) <= tol * max(1.0, abs(lam)):
            return nxt
        lam = nxt
    raise ConvergenceError(f"security mapping did not converge in {max_iter} iterations")


# --------------------------------------------------------------------------
# quantum lattice entropy

def quantum_lattice_entropy_bound(shape: LatticeShape, sigma: float, env: QuantumEnvironment) -> float:
    """Lower bound ``pi lambda1^2 / sigma^2 - ln det - dim lambda1 / lambda_d`` in bits."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    gauss = math.pi * shape.lambda1 ** 2 / sigma ** 2 / LN2
    atten = 0.0 if env.coherent else shape.dim * shape.lambda1 / env.lambda_d / LN2
    return gauss - shape.log2_det - atten


class Attenuation(enum.Enum):
    EXPONENTIAL = "exponential"
    SATURATING = "saturating"


def _attenuation_log2(norm_sq: int, dim: int, lambda1: float, env: QuantumEnvironment,
                      kind: Attenuation) -> float:
    if env.coherent:
        return 0.0
    if kind is Attenuation.EXPONENTIAL:
        return -(math.sqrt(norm_sq) * dim / (env.lambda_d * lambda1)) / LN2
    x = norm_sq / (env.lambda_d ** 2 * dim)
    return math.log2(-math.expm1(-x))


def quantum_lattice_entropy_exact(lat: IntegerLattice, sigma: float, env: QuantumEnvironment,
                                  radius: Optional[float] = None,
                                  attenuation: "Attenuation | str" = Attenuation.EXPONENTIAL) -> float:
    """``-log2 max_v rho_sigma(v) * Gamma(v) / det`` over enumerated nonzero vectors.

    ``Gamma`` is ``exp(-|v| dim / (lambda_d lambda1))`` by default; the
    saturating alternative ``1 - exp(-|v|^2 / (lambda_d^2 dim))`` is kept for
    comparison.
    """
    if lat.dim > MAX_ENUM_DIM:
        raise CapabilityError(f"exact entropy is limited to dimension {MAX_ENUM_DIM}")
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    attenuation = Attenuation(attenuation) if isinstance(attenuation, str) else attenuation
    if radius is None:
        radius = lat.default_radius()
    vectors = list(enumerate_short_vectors(lat, radius))
    if not vectors:
        raise DomainError(f"no nonzero vector within radius {radius}")
    lambda1 = math.sqrt(min(sq for _, sq in vectors))
    log2_det = math.log2(lat.det)
    best = -math.inf
    for _, sq in vectors:
        val = (-math.pi * sq / (sigma * sigma)) / LN2 - log2_det \
            + _attenuation_log2(sq, lat.dim, lambda1, env, attenuation)
        best = max(best, val)
    return -best


def exact_shape(lat: IntegerLattice, radius: Optional[float] = None) -> LatticeShape:
    """Shape of a small lattice with an enumerated first minimum."""
    if radius is None:
        radius = lat.default_radius()
    sqs = [sq for _, sq in enumerate_short_vectors(lat, radius)]
    if not sqs:
        raise DomainError(f"no nonzero vector within radius {radius}")
    return LatticeShape(lat.dim, math.log2(lat.det), math.sqrt(min(sqs)), 1.0)


def lwe_reduction_advantage(eps: float, d: int, c: float = 1.0) -> float:
    """LWE advantage ``eps^2 / (c d^3)`` obtained from an NTRU distinguisher."""
    if not 0 <= eps <= 1:
        raise DomainError("eps must lie in [0, 1]")
    if d < 1 or c <= 0:
        raise DomainError("d >= 1 and c > 0 required")
    return eps * eps / (c * d ** 3)


def entropy_to_complexity(hq_bits: float, c: float = COMPLEXITY_CONSTANT) -> Log2Quantity:
    if c <= 0:
        raise DomainError("c must be positive")
    return Log2Quantity.cost(c * hq_bits)


def ntru_size_bound_holds(params: NtruParams, lam: int) -> bool:
    """``N log2 q >= 2 lam + log2(sigma sqrt(N) / q)``."""
    rhs = 2 * lam + math.log2(params.sigma * math.sqrt(params.N) / params.q)
    return params.N * math.log2(params.q) >= rhs


# --------------------------------------------------------------------------
# optimizer

def initial_sigma(lam: int, eps: float) -> float:
    return math.sqrt(lam * math.log(1 / eps) / (2 * math.pi))


def modulus_floor(sigma: float, N: int, eps: float) -> float:
    """The modulus must exceed ``4 sigma sqrt(N ln(1/eps) / pi)``."""
    return 4 * sigma * math.sqrt(N * math.log(1 / eps) / math.pi)


def _select_modulus(at_least: int, sigma: float, N: int, eps: float) -> int:
    return next_prime_3mod8(max(int(at_least), math.floor(modulus_floor(sigma, N, eps)) + 1, 2))


def initial_ring_degree(lam: int, q0: int, schedule: NSchedule) -> tuple[int, int]:
    """(d, N) from ``d = ceil(2 lam / log2 q0)`` and the schedule's first N."""
    d = math.ceil(2 * lam / math.log2(q0))
    if schedule is NSchedule.POWER_OF_TWO:
        return d, 2 ** math.floor(math.log2(d))
    return d, next_prime(d)


def _grow_ring_degree(N: int, schedule: NSchedule, step: int) -> int:
    if schedule is NSchedule.POWER_OF_TWO:
        return 2 * N
    return next_prime(N + step)


def optimize_ntru(lam: int, eps: float = DEFAULT_NTRU_EPS, max_modulus: int = DEFAULT_MAX_MODULUS,
                  env: Optional[QuantumEnvironment] = None,
                  mode: "CostModel | str" = CostModel.BKZ_BLOCKSIZE,
                  schedule: "NSchedule | str" = NSchedule.PRIME, *,
                  q0: int = DEFAULT_Q0, r_q: float = DEFAULT_RQ, n_step: int = DEFAULT_PRIME_STEP,
                  iteration_cap: int = ITERATION_CAP) -> NtruReport:
    """Grow (N, q) until the attack cost reaches ``lam`` bits or q hits ``max_modulus``.

    The initial N comes from ``d = ceil(2 lam / log2 q0)``; sigma starts at
    ``sqrt(lam ln(1/eps) / (2 pi))`` and every chosen q is a prime = 3 mod 8
    above the modulus floor. Each failing pass advances N by the schedule and
    multiplies q by ``r_q``. Exhausting the modulus ends with outcome
    ``INCREASE_LAMBDA``. The literal sigma update ``sqrt(N log q log delta)``
    only runs in the literal model and is skipped (flagged) while log delta < 0.
    """
    if lam < 1:
        raise DomainError("lambda must be >= 1")
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if q0 < 3 or r_q <= 1 or n_step < 1 or max_modulus < 3:
        raise DomainError("q0 >= 3, r_q > 1, n_step >= 1 and max_modulus >= 3 required")
    env = env or QuantumEnvironment()
    mode = CostModel.parse(mode)
    schedule = NSchedule.parse(schedule)
    flags: list[str] = []

    _, N = initial_ring_degree(lam, q0, schedule)
    sigma = initial_sigma(lam, eps)
    q = _select_modulus(2, sigma, N, eps)
    iterations = 0
    c_quant = -math.inf
    while q < max_modulus:
        if iterations >= iteration_cap:
            raise NonTerminationError("NTRU optimizer exceeded its iteration cap",
                                      {"N": N, "q": q, "sigma": sigma, "iterations": iterations})
        iterations += 1
        params = NtruParams.with_default_weights(N, q, sigma)
        delta = root_hermite(sigma, N, q)
        if mode is CostModel.CLOSED_FORM:
            _, c_quant = literal_c_quant(N, env)
        else:
            _, c_quant = bkz_c_quant(params, env, [])
        if c_quant >= lam:
            break
        N = _grow_ring_degree(N, schedule, n_step)
        q = _select_modulus(math.ceil(q * r_q), sigma, N, eps)
        if mode is CostModel.CLOSED_FORM:
            if delta < 1:
                if "SIGMA_UPDATE_UNDEFINED" not in flags:
                    flags.append("SIGMA_UPDATE_UNDEFINED")
            else:
                sigma = math.sqrt(N * math.log2(q) * math.log2(delta))
                q = _select_modulus(q, sigma, N, eps)

    outcome = Outcome.SUCCESS if c_quant >= lam and q < max_modulus else Outcome.INCREASE_LAMBDA
    if outcome is Outcome.INCREASE_LAMBDA:
        flags.append("INCREASE_LAMBDA")
        if mode is CostModel.CLOSED_FORM:
            flags.append("UNREACHABLE")
    params = NtruParams.with_default_weights(N, q, sigma)
    report = ntru_hardness(params, env, mode)
    if mode is CostModel.CLOSED_FORM:
        flags.append("LITERAL_BLOCKSIZE")
        report.blocksize = literal_blocksize(N)
    for f in flags:
        if f not in report.flags:
            report.flags.append(f)
    report.outcome = outcome
    report.lam = lam
    report.iterations = iterations
    report.c_quant_log2 = c_quant if math.isfinite(c_quant) else None
    report.schedule = schedule.value
    return report

