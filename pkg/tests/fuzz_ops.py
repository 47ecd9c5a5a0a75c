"""Randomized sweep over every bound operation; shared by the acceptance and unit suites."""

import math

import numpy as np

from pqforge import entropy as ent
from pqforge import ntru, quantum_model as qm, sphincs as sp


def _env(rng):
    lambda_d = 10 ** rng.uniform(0, 12)
    tau_g = 10 ** rng.uniform(-12, -3)
    return qm.QuantumEnvironment(tau_g=tau_g, tau_d=tau_g * lambda_d, k=int(rng.integers(1, 2 ** 20)))


def _log2q(x):
    return qm.Log2Quantity.cost(x)


def _ops():
    u = lambda r, a, b: float(r.uniform(a, b))
    return [
        ("decoherence_factor", lambda r, e: qm.decoherence_log2_factor(_log2q(u(r, -50, 1100)), e)),
        ("decoherence_factor_2^1024", lambda r, e: qm.decoherence_log2_factor(_log2q(1024.0), e)),
        ("min_queries", lambda r, e: qm.min_queries_for_error(2.0 ** -u(r, 1e-3, 1000), e)),
        ("lower_bound", lambda r, e: qm.quantum_lower_bound(
            qm.QueryComplexityInput(10 ** u(r, 0, 6), 1.0, u(r, 0, 1e4), u(r, 1e-9, 0.4999)), e)),
        ("compose", lambda r, e: qm.compose_attack_success(
            qm.Log2Quantity.probability(-u(r, 0, 1e6)), _log2q(u(r, -10, 1100)), e)),
        ("advantage_2^1024", lambda r, e: qm.quantum_advantage_bound(_log2q(1024.0), e, int(r.integers(2, 10 ** 5)))),
        ("advantage", lambda r, e: qm.quantum_advantage_bound(_log2q(u(r, 0, 1100)), e, int(r.integers(2, 10 ** 5)))),
        ("success_decay", lambda r, e: qm.lattice_success_decay(u(r, 1e-300, 1), u(r, 0, 1e6), e,
                                                                int(r.integers(3, 10 ** 5)))),
        ("max_dimension", lambda r, e: qm.max_feasible_dimension(e, int(r.integers(2, 1025)), u(r, 1e-12, 0.999))),
        ("parallel", lambda r, e: qm.parallelization_log2_penalty(int(r.integers(1, 2 ** 62)))),
        ("entropy_loss", lambda r, e: qm.entropy_loss_bound(int(r.integers(1, 2 ** 40)), e, u(r, 0, 1e4))),
        ("grover", lambda r, e: qm.grover_log2_cost(int(r.integers(1, 10 ** 6)))),
        ("collision_search", lambda r, e: qm.collision_search_log2_cost(int(r.integers(1, 10 ** 6)))),
        ("walk", lambda r, e: qm.quantum_walk_cost(u(r, 0, 1e30), u(r, 0, 1e30), u(r, 0, 1e30),
                                                   u(r, 1e-30, 1), u(r, 1e-30, 1))),
        ("collision_prob", lambda r, e: sp.collision_log2_probability(
            sp.SphincsParams(h=64, d=1, t=1, n=int(r.integers(1, 4097)), query_budget=2 ** u(r, 1, 1000)),
            u(r, 0, 4096), u(r, 0, 1e9), e)),
        ("concentration_tail", lambda r, e: sp.entropy_concentration_tail(u(r, 1, 4096), u(r, 0, 1e4))),
        ("effective_h2", lambda r, e: (lambda lam: sp.effective_h2(int(r.integers(math.ceil(lam) + 1, 4097)), lam))(
            u(r, 1, 256))),
        ("sphincs_cost", lambda r, e: sp.sphincs_quantum_cost(int(r.integers(1, 10 ** 6)), e)),
        ("height_bound", lambda r, e: sp.decoherence_height_bound(u(r, 1, 1024), e)),
        ("required_entropy", lambda r, e: ent.min_required_entropy(u(r, 1.001, 100), u(r, 1, 1024),
                                                                    2 ** u(r, 0, 256), e)),
        ("advantage_h2", lambda r, e: ent.entropy_security_advantage(u(r, 0, 1e4))),
        ("advantage_refined", lambda r, e: ent.entropy_security_advantage_refined(u(r, 0, 1e4), u(r, 0, 1e4))),
        ("root_hermite", lambda r, e: ntru.root_hermite(u(r, 0.1, 1e3), int(r.integers(1, 10 ** 5)),
                                                        int(r.integers(2, 2 ** 40)))),
        ("blocksize", lambda r, e: ntru.blocksize_for_delta(1 + 10 ** u(r, -5, -1))),
        ("bkz_cost", lambda r, e: ntru.bkz_attack_log2_cost(int(r.integers(1, 2 ** 20)), e)),
        ("keyspace", lambda r, e: ntru.keyspace_term(int(r.integers(1, 10 ** 6)), int(r.integers(2, 2 ** 62)))),
        ("decoherence_term", lambda r, e: ntru.decoherence_term(int(r.integers(2, 2 ** 62)), 2 ** -u(r, 1e-3, 1000), e)),
        ("mapping", lambda r, e: ntru.security_mapping(
            int(r.integers(1, 10 ** 5)), int(r.integers(2, 2 ** 40)),
            qm.QuantumEnvironment.from_ratio(10 ** u(r, 0.5, 12)), 2 ** -u(r, 1e-3, 1000))),
        ("hq_bound", lambda r, e: ntru.quantum_lattice_entropy_bound(
            ntru.LatticeShape(int(r.integers(2, 10 ** 5)), u(r, 0, 1e6), u(r, 1e-3, 1e6), 1.0), u(r, 1e-3, 1e3), e)),
        ("lwe_advantage", lambda r, e: ntru.lwe_reduction_advantage(u(r, 0, 1), int(r.integers(1, 10 ** 6)),
                                                                    u(r, 1e-6, 1e6))),
        ("complexity", lambda r, e: ntru.entropy_to_complexity(u(r, -1e6, 1e6), u(r, 1e-6, 10))),
    ]


def _finite(value):
    if isinstance(value, qm.Log2Quantity):
        return math.isfinite(value.log2_value)
    if isinstance(value, (bool, int)):
        return True
    if value is None:
        return True
    return math.isfinite(value)


def run_fuzz(draws, seed):
    """Evaluate ``draws`` random valid inputs round-robin over the operations.

    Returns (draws completed, list of (op, problem)).
    """
    rng = np.random.default_rng(seed)
    ops = _ops()
    bad = []
    done = 0
    for i in range(draws):
        name, fn = ops[i % len(ops)]
        env = _env(rng)
        try:
            value = fn(rng, env)
        except (ArithmeticError, ValueError) as exc:
            bad.append((name, repr(exc)))
        else:
            if not _finite(value):
                bad.append((name, repr(value)))
        done += 1
    return done, bad
