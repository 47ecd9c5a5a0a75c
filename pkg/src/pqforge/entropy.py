"""Rényi entropies of finite distributions and the entropy-to-security bounds.

All entropies are reported in bits. Orders are carried by :class:`EntropyOrder`
so that the Shannon limit (alpha = 1) is an explicit variant rather than a
removable singularity hit at runtime.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ValidationError

SUM_TOLERANCE = 1e-9

# slack for comparing two entropies that may coincide (point mass, uniform)
_RELATION_SLACK = 1e-12


class OrderKind(enum.Enum):
    FINITE = "finite"
    SHANNON = "shannon"
    INFINITY = "infinity"


@dataclass(frozen=True)
class EntropyOrder:
    """Order of a Rényi entropy: a finite alpha != 1, SHANNON, or INFINITY."""

    kind: OrderKind
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.kind is OrderKind.FINITE:
            if self.alpha is None or not math.isfinite(self.alpha):
                raise DomainError("finite order needs a finite alpha")
            if self.alpha <= 0:
                raise DomainError(f"alpha must be > 0, got {self.alpha}")
            if self.alpha == 1:
                raise DomainError("alpha = 1 is the SHANNON variant; use EntropyOrder.shannon()")
        elif self.alpha is not None:
            raise DomainError(f"{self.kind.value} order takes no alpha")

    @classmethod
    def finite(cls, alpha: float) -> "EntropyOrder":
        return cls(OrderKind.FINITE, float(alpha))

    @classmethod
    def shannon(cls) -> "EntropyOrder":
        return cls(OrderKind.SHANNON)

    @classmethod
    def infinity(cls) -> "EntropyOrder":
        return cls(OrderKind.INFINITY)

    @classmethod
    def parse(cls, text: "str | float | EntropyOrder") -> "EntropyOrder":
        """Build an order from ``"inf"``, ``"shannon"``, ``"1"`` or a number."""
        if isinstance(text, EntropyOrder):
            return text
        if isinstance(text, str):
            key = text.strip().lower()
            if key in {"inf", "infinity", "min", "oo"}:
                return cls.infinity()
            if key in {"shannon", "1", "1.0"}:
                return cls.shannon()
            try:
                value = float(key)
            except ValueError as exc:
                raise DomainError(f"cannot parse entropy order {text!r}") from exc
        else:
            value = float(text)
        if math.isinf(value) and value > 0:
            return cls.infinity()
        if value == 1:
            return cls.shannon()
        return cls.finite(value)

    @property
    def value(self) -> float:
        """Numeric alpha (1.0 for Shannon, inf for min-entropy)."""
        if self.kind is OrderKind.SHANNON:
            return 1.0
        if self.kind is OrderKind.INFINITY:
            return math.inf
        return float(self.alpha)  # type: ignore[arg-type]

    def __str__(self) -> str:
        if self.kind is OrderKind.FINITE:
            return f"{self.alpha:g}"
        return "shannon" if self.kind is OrderKind.SHANNON else "inf"


def _as_order(order: "EntropyOrder | float | str") -> EntropyOrder:
    return EntropyOrder.parse(order)


@dataclass(frozen=True)
class Distribution:
    """A finite probability vector, validated but never silently renormalized."""

    probs: np.ndarray
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float).ravel()
        if arr.size < 1:
            raise ValidationError("distribution needs at least one outcome")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("distribution entries must be finite")
        if np.any(arr < 0):
            raise ValidationError("distribution entries must be non-negative")
        total = math.fsum(arr.tolist())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValidationError(f"probabilities sum to {total!r}, not 1 (tolerance {SUM_TOLERANCE})")
        if self.labels is not None and len(self.labels) != arr.size:
            raise ValidationError("one label per outcome is required")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @classmethod
    def normalize(cls, weights: Iterable[float], labels: Sequence[str] | None = None) -> "Distribution":
        w = np.asarray(list(weights), dtype=float)
        if w.size and np.any(w < 0):
            raise ValidationError("weights must be non-negative")
        total = math.fsum(w.tolist())
        if total <= 0:
            raise ValidationError("weights must have a positive sum")
        return cls(w / total, tuple(labels) if labels is not None else None)

    @classmethod
    def uniform(cls, m: int) -> "Distribution":
        if m < 1:
            raise ValidationError("uniform distribution needs m >= 1")
        return cls(np.full(m, 1.0 / m))

    @classmethod
    def from_counts(cls, counts: Iterable[int]) -> "Distribution":
        return cls.normalize(counts)

    def __len__(self) -> int:
        return int(self.probs.size)

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.probs))


def _power_sum_log2(p: np.ndarray, alpha: float) -> float:
    """log2 of sum(p_i ** alpha) over the support, scaled by the max entry."""
    p = np.sort(p[p > 0])
    top = float(p[-1])
    scaled = (p / top) ** alpha
    return alpha * math.log2(top) + math.log2(math.fsum(scaled.tolist()))


def renyi_entropy(dist: Distribution, order: "EntropyOrder | float | str") -> float:
    """Rényi entropy of ``dist`` in bits.

    Finite orders use ``log2(sum p^alpha) / (1 - alpha)`` with the sum rescaled
    by ``max p`` so that neither large alpha nor tiny entries underflow.
    """
    order = _as_order(order)
    p = dist.probs
    if order.kind is OrderKind.INFINITY:
        return max(0.0, -math.log2(float(p.max())))
    if order.kind is OrderKind.SHANNON:
        nz = np.sort(p[p > 0])
        return max(0.0, -math.fsum((nz * np.log2(nz)).tolist()))
    alpha = order.value
    h = _power_sum_log2(p, alpha) / (1.0 - alpha)
    # clip float noise outside [0, log2 support]
    return min(max(h, 0.0), math.log2(dist.support_size))


def collision_entropy(dist: Distribution) -> float:
    return renyi_entropy(dist, EntropyOrder.finite(2))


def min_entropy(dist: Distribution) -> float:
    return renyi_entropy(dist, EntropyOrder.infinity())


def entropy_security_advantage(h2: float) -> float:
    """Distinguishing-advantage bound ``sqrt(2^-H2)`` (negligible term dropped)."""
    if h2 < 0 or math.isnan(h2):
        raise DomainError(f"collision entropy must be >= 0, got {h2}")
    return 2.0 ** (-h2 / 2.0)


def entropy_security_advantage_refined(h_three_halves: float, range_size_log2: float) -> float:
    """Trace-distance bound from the order-3/2 fidelity estimate.

    Returns ``sqrt(1 - 2^-H_{3/2} * |Y|^{-1/2})`` where the range size is given
    in bits.
    """
    if h_three_halves < 0 or range_size_log2 < 0:
        raise DomainError("entropy and range size must be non-negative")
    exponent = -(h_three_halves + range_size_log2 / 2.0) * math.log(2.0)
    return math.sqrt(-math.expm1(exponent))


def renyi_order_relation_holds(dist: Distribution, order: "EntropyOrder | float | str") -> bool:
    """Check ``H_2(P) >= ((alpha - 1) / alpha) * H_alpha(P)`` for a finite alpha > 1."""
    order = _as_order(order)
    if order.kind is not OrderKind.FINITE or order.value <= 1:
        raise DomainError("the order relation needs a finite alpha > 1")
    alpha = order.value
    h2 = collision_entropy(dist)
    ha = renyi_entropy(dist, order)
    return h2 + _RELATION_SLACK >= (alpha - 1.0) / alpha * ha


def min_required_entropy(order, lam: float, query_budget: float, env) -> float:
    """Rényi entropy needed for ``lam``-bit security against ``query_budget`` queries.

    ``lam + log2(alpha/(alpha-1) * q^2) - (tau_g/tau_d) * lam * ln 2``. May be
    negative; callers decide what that means.
    """
    order = _as_order(order)
    if order.kind is not OrderKind.FINITE or order.value <= 1:
        raise DomainError("min_required_entropy needs a finite alpha > 1")
    if query_budget <= 0:
        raise DomainError("query budget must be positive")
    alpha = order.value
    coeff = math.log2(alpha / (alpha - 1.0))
    penalty = env.gate_ratio * lam * math.log(2.0)
    return lam + coeff + 2.0 * math.log2(query_budget) - penalty
