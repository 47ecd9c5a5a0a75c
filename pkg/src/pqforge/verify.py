"""Oracle-backed verification suite: every estimator bound against brute force."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .config import OracleBlock
from .errors import ValidationError
from .lattice import IntegerLattice
from .ntru import exact_shape, quantum_lattice_entropy_bound, quantum_lattice_entropy_exact
from .oracle import (TailSweepResult, binomial_standard_error, birthday_product,
                     collision_count, concentration_sweep)
from .quantum_model import QuantumEnvironment
from .sphincs import SphincsParams, collision_log2_probability, margin_ratio

SIGMA_MULTIPLIER = 3.0


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict[str, Any] = field(default_factory=dict)


@dataclass
class VerifyResult:
    checks: list[Check]
    sweep: TailSweepResult

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def check_sweep(sweep: TailSweepResult) -> Check:
    ok = all(sweep.dominated())
    return Check("concentration_tail", ok, {
        "t": sweep.t_grid, "empirical": sweep.empirical_tail, "bound": sweep.bound_tail,
        "b": sweep.b, "constant": sweep.constant, "probability_space": sweep.probability_space,
    })


def collision_rows(range_size: int, q_values, trials: int, seed: int) -> list[dict[str, Any]]:
    """Empirical collision frequency beside the analytic bound and the birthday product."""
    n = math.log2(range_size)
    if n != int(n):
        raise ValidationError("collision range must be a power of two")
    env = QuantumEnvironment.ideal()
    rows = []
    for i, q in enumerate(q_values):
        hits = collision_count(max(q, range_size), range_size, q, trials, seed + i)
        freq = hits / trials
        params = SphincsParams(h=int(n), d=1, t=1, n=int(n), query_budget=q)
        bound = 2.0 ** collision_log2_probability(params, n, 0.0, env)
        exact = birthday_product(q, range_size)
        rows.append({
            "q": q, "hits": hits, "frequency": freq, "bound": bound, "birthday": exact,
            "stderr": binomial_standard_error(freq, trials),
            "exact_stderr": binomial_standard_error(exact, trials),
        })
    return rows


def check_collisions(rows: list[dict[str, Any]]) -> list[Check]:
    checks = []
    for r in rows:
        dominated = r["bound"] >= r["frequency"] - SIGMA_MULTIPLIER * r["stderr"]
        checks.append(Check(f"collision_bound_q{r['q']}", dominated, dict(r)))
        near = abs(r["frequency"] - r["birthday"]) <= SIGMA_MULTIPLIER * r["exact_stderr"]
        checks.append(Check(f"birthday_q{r['q']}", near, dict(r)))
    return checks


def random_lattices(count: int, max_dim: int, entry_bound: int, seed: int) -> list[IntegerLattice]:
    """Seeded full-rank integer bases, dimensions cycling through 2..max_dim."""
    rng = np.random.default_rng(seed)
    out = []
    dims = list(range(2, max_dim + 1))
    while len(out) < count:
        dim = dims[len(out) % len(dims)]
        basis = rng.integers(-entry_bound, entry_bound + 1, size=(dim, dim))
        try:
            out.append(IntegerLattice(basis.tolist()))
        except ValidationError:
            continue
    return out


def lattice_rows(block: OracleBlock, seed: int) -> list[dict[str, Any]]:
    rows = []
    lattices = random_lattices(block.lattice_count, block.lattice_max_dim,
                               block.lattice_entry_bound, seed)
    for i, lat in enumerate(lattices):
        sigma = block.lattice_sigmas[i % len(block.lattice_sigmas)]
        lambda_d = block.lattice_lambda_ds[(i // len(block.lattice_sigmas)) % len(block.lattice_lambda_ds)]
        env = QuantumEnvironment.from_ratio(lambda_d)
        exact = quantum_lattice_entropy_exact(lat, sigma, env)
        bound = quantum_lattice_entropy_bound(exact_shape(lat), sigma, env)
        rows.append({"index": i, "dim": lat.dim, "sigma": sigma, "lambda_d": lambda_d,
                     "exact": exact, "bound": bound})
    return rows


def check_lattices(rows: list[dict[str, Any]]) -> Check:
    bad = [r for r in rows if not r["exact"] >= r["bound"]]
    return Check("lattice_entropy_order", not bad, {"cases": len(rows), "violations": bad})


def check_identity_lattice() -> Check:
    value = quantum_lattice_entropy_exact(IntegerLattice([[1, 0], [0, 1]]), 1.0, QuantumEnvironment.ideal())
    expected = math.pi / math.log(2.0)
    return Check("identity_lattice_entropy", abs(value - expected) <= 1e-9,
                 {"value": value, "expected": expected})


def check_margin(constant: float, band: tuple[float, float]) -> Check:
    reduction = 1.0 - margin_ratio(constant)
    lo, hi = band
    return Check("margin_reduction", lo <= reduction <= hi,
                 {"constant": constant, "reduction": reduction, "band": list(band)})


def run_verification(block: OracleBlock) -> VerifyResult:
    seed = block.seed
    sweep = concentration_sweep(block.sweep_domain, block.sweep_range, block.sweep_trials,
                                block.t_grid, seed, constant=block.bound_constant)
    checks = [check_sweep(sweep)]
    checks += check_collisions(collision_rows(block.collision_range, block.collision_q,
                                              block.collision_trials, seed + 1))
    checks.append(check_lattices(lattice_rows(block, seed + 2)))
    checks.append(check_identity_lattice())
    checks.append(check_margin(block.bound_constant, block.margin_band))
    return VerifyResult(checks, sweep)
