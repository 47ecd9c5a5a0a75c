"""Brute-force and Monte Carlo oracles for the estimator formulas.

Random functions come from a counter-based SplitMix64 generator: the value at
input ``x`` under seed ``s`` is ``mix64(s + (x + 1) * GAMMA)`` (all arithmetic
mod 2^64), reduced to ``[0, range)`` by ``((z >> 32) * range) >> 32``. Any
implementation of those three lines reproduces the tables bit for bit, and
random access lets trials be split across workers by seed offset.

Trial ``j`` of a sweep seeded with ``s`` uses the function seed
``mix64(s + (j + 1) * GAMMA)``. The probability space is always "random
function", recorded in every result's metadata.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .entropy import Distribution, renyi_entropy
from .errors import CapabilityError, DomainError, ValidationError
from .lattice import IntegerLattice, enumerate_short_vectors
from .sphincs import IMPROVED_CONSTANT, entropy_concentration_tail

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1

MAX_DOMAIN = 2 ** 20
MAX_RANGE = 2 ** 16
PROBABILITY_SPACE = "random function"

_CHUNK_ELEMENTS = 1 << 22


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def counter_stream(seed: int | np.ndarray, counters: np.ndarray) -> np.ndarray:
    """``mix64(seed + (counter + 1) * GAMMA)`` broadcast over seeds and counters."""
    seed = np.asarray(seed, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = seed + (counters + np.uint64(1)) * GAMMA
    return mix64(state)


def to_range(z: np.ndarray, range_size: int) -> np.ndarray:
    return ((z >> np.uint64(32)) * np.uint64(range_size)) >> np.uint64(32)


def trial_seeds(seed: int, start: int, count: int) -> np.ndarray:
    return counter_stream(np.uint64(seed & _MASK64), np.arange(start, start + count, dtype=np.uint64))


def _check_sizes(domain_size: int, range_size: int) -> None:
    if not 1 <= domain_size <= MAX_DOMAIN:
        raise CapabilityError(f"domain size must lie in [1, {MAX_DOMAIN}]")
    if not 1 <= range_size <= MAX_RANGE:
        raise CapabilityError(f"range size must lie in [1, {MAX_RANGE}]")


@dataclass(frozen=True)
class FunctionTable:
    domain_size: int
    range_size: int
    table: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        _check_sizes(self.domain_size, self.range_size)
        if self.table.shape != (self.domain_size,):
            raise ValidationError("table length must equal the domain size")
        if self.table.size and int(self.table.max()) >= self.range_size:
            raise ValidationError("table entries must be < range_size")

    def counts(self) -> np.ndarray:
        return np.bincount(self.table.astype(np.int64), minlength=self.range_size)


def sample_random_function(domain_size: int, range_size: int, seed: int) -> FunctionTable:
    _check_sizes(domain_size, range_size)
    seed &= _MASK64
    raw = counter_stream(np.uint64(seed), np.arange(domain_size, dtype=np.uint64))
    table = to_range(raw, range_size).astype(np.uint32)
    table.setflags(write=False)
    return FunctionTable(domain_size, range_size, table, seed)


def empirical_collision_entropy(table: FunctionTable) -> float:
    """``-log2 sum(p_y^2)`` of the table's output histogram, from exact counts."""
    c = table.counts().astype(np.int64)
    s = int((c * c).sum())
    return 2.0 * math.log2(table.domain_size) - math.log2(s)


def empirical_distribution(table: FunctionTable) -> Distribution:
    return Distribution.from_counts(table.counts().tolist())


def _collision_deficits(domain_size: int, range_size: int, seeds: np.ndarray) -> np.ndarray:
    """``log2|Y| - H2`` for the random functions named by ``seeds``."""
    x = np.arange(domain_size, dtype=np.uint64)
    values = to_range(counter_stream(seeds[:, None], x[None, :]), range_size).astype(np.int64)
    rows = np.arange(seeds.size, dtype=np.int64)[:, None] * range_size
    counts = np.bincount((values + rows).ravel(), minlength=seeds.size * range_size)
    counts = counts.reshape(seeds.size, range_size)
    sq = (counts * counts).sum(axis=1)
    # both sides are exact integers, so a perfectly flat histogram gives exactly 0
    lhs = np.log2(sq.astype(np.float64) * range_size)
    return lhs - 2.0 * math.log2(domain_size)


@dataclass
class TailSweepResult:
    t_grid: list[float]
    empirical_tail: list[float]
    bound_tail: list[float]
    trials: int
    seed: int
    hits: list[int] = field(default_factory=list)
    domain_size: int = 0
    range_size: int = 0
    b: float = 0.0
    constant: float = IMPROVED_CONSTANT
    probability_space: str = PROBABILITY_SPACE

    def __post_init__(self) -> None:
        if not len(self.t_grid) == len(self.empirical_tail) == len(self.bound_tail):
            raise ValidationError("sweep vectors must have equal length")

    def dominated(self) -> list[bool]:
        return [e <= b for e, b in zip(self.empirical_tail, self.bound_tail)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "empirical_tail", "bound_tail", "trials", "seed"])
        for t, e, b in zip(self.t_grid, self.empirical_tail, self.bound_tail):
            w.writerow([repr(float(t)), repr(float(e)), repr(float(b)), self.trials, self.seed])
        return buf.getvalue()


def concentration_sweep(domain_size: int, range_size: int, trials: int, t_grid: Sequence[float],
                        seed: int, *, b: float | None = None,
                        constant: float = IMPROVED_CONSTANT) -> TailSweepResult:
    """Empirical ``Pr[H2 <= log2|Y| - t]`` over seeded random functions.

    ``b`` defaults to the output width ``log2(range_size)``.
    """
    _check_sizes(domain_size, range_size)
    if trials < 100:
        raise DomainError("a sweep needs at least 100 trials")
    if b is None:
        b = max(1.0, math.log2(range_size))
    seed &= _MASK64
    grid = [float(t) for t in t_grid]
    hits = [0] * len(grid)
    chunk = max(1, _CHUNK_ELEMENTS // domain_size)
    for start in range(0, trials, chunk):
        count = min(chunk, trials - start)
        deficits = _collision_deficits(domain_size, range_size, trial_seeds(seed, start, count))
        for i, t in enumerate(grid):
            hits[i] += int(np.count_nonzero(deficits >= t))
    return TailSweepResult(
        t_grid=grid,
        empirical_tail=[h / trials for h in hits],
        bound_tail=[entropy_concentration_tail(b, t, constant) for t in grid],
        trials=trials,
        seed=seed,
        hits=hits,
        domain_size=domain_size,
        range_size=range_size,
        b=b,
        constant=constant,
    )


def collision_count(domain_size: int, range_size: int, q_samples: int, trials: int, seed: int) -> int:
    """Number of trials in which ``q_samples`` distinct inputs hit a repeated output.

    The inputs are ``0 .. q-1``; under a random function their outputs are
    independent and uniform whichever distinct inputs are chosen.
    """
    _check_sizes(domain_size, range_size)
    if q_samples < 2:
        raise DomainError("need at least two samples for a collision")
    if q_samples > domain_size:
        raise DomainError("cannot draw more distinct inputs than the domain holds")
    seed &= _MASK64
    x = np.arange(q_samples, dtype=np.uint64)
    chunk = max(1, _CHUNK_ELEMENTS // q_samples)
    hits = 0
    for start in range(0, trials, chunk):
        count = min(chunk, trials - start)
        seeds = trial_seeds(seed, start, count)
        values = np.sort(to_range(counter_stream(seeds[:, None], x[None, :]), range_size), axis=1)
        hits += int(np.count_nonzero((values[:, 1:] == values[:, :-1]).any(axis=1)))
    return hits


def empirical_collision_frequency(domain_size: int, range_size: int, q_samples: int,
                                  trials: int, seed: int) -> float:
    if trials < 1:
        raise DomainError("trials must be >= 1")
    return collision_count(domain_size, range_size, q_samples, trials, seed) / trials


def birthday_product(q: int, range_size: int) -> float:
    """Exact ``1 - prod_{i<q} (1 - i/R)`` collision probability."""
    if q > range_size:
        return 1.0
    p = 1.0
    for i in range(1, q):
        p *= 1.0 - i / range_size
    return 1.0 - p


def binomial_standard_error(p: float, trials: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def shortest_vector_enum(lat: IntegerLattice, radius: float | None = None) -> tuple[float, tuple[int, ...]]:
    """Exact shortest nonzero vector length and a witness, by exhaustive enumeration."""
    if radius is None:
        radius = lat.default_radius()
    best_sq, best = None, None
    for vec, sq in enumerate_short_vectors(lat, radius):
        if best_sq is None or sq < best_sq or (sq == best_sq and vec > best):
            best_sq, best = sq, vec
    if best is None:
        raise DomainError(f"no nonzero vector within radius {radius}; enlarge the radius")
    return math.sqrt(best_sq), best


@dataclass(frozen=True)
class GaussianMass:
    mass: float
    tail_bound: float
    count: int


def gaussian_tail_bound(dim: int, sigma: float, radius: float, enumerated_mass: float) -> float:
    """Upper bound on the Gaussian mass outside the ball of ``radius``.

    Banaszczyk's estimate: outside ``r`` the mass is at most
    ``C * rho(L)`` with ``C = (r sqrt(2 pi e / n) / sigma)^n exp(-pi r^2/sigma^2)``,
    valid once ``r >= sigma sqrt(n / (2 pi))``. Solving for the unknown tail
    with ``rho(L) = 1 + enumerated + tail`` gives ``C (1 + enumerated) / (1 - C)``.
    Returns ``inf`` where the estimate does not apply.
    """
    if radius < sigma * math.sqrt(dim / (2 * math.pi)):
        return math.inf
    log_c = dim * math.log(radius * math.sqrt(2 * math.pi * math.e / dim) / sigma) \
        - math.pi * radius * radius / (sigma * sigma)
    c = math.exp(log_c)
    if c >= 1:
        return math.inf
    return c * (1.0 + enumerated_mass) / (1.0 - c)


def gaussian_mass_enum(lat: IntegerLattice, sigma: float, radius: float | None = None) -> GaussianMass:
    """Sum of ``exp(-pi |v|^2 / sigma^2)`` over nonzero lattice vectors within ``radius``."""
    if sigma <= 0:
        raise DomainError("sigma must be positive")
    if radius is None:
        radius = lat.default_radius()
    terms = []
    for _, sq in enumerate_short_vectors(lat, radius):
        terms.append(math.exp(-math.pi * sq / (sigma * sigma)))
    if not terms:
        raise DomainError(f"no nonzero vector within radius {radius}; enlarge the radius")
    mass = math.fsum(sorted(terms))
    return GaussianMass(mass, gaussian_tail_bound(lat.dim, sigma, radius, mass), len(terms))


def renyi_from_table(table: FunctionTable, order) -> float:
    """Entropy-module value on the same empirical histogram (cross-check path)."""
    return renyi_entropy(empirical_distribution(table), order)
