"""Command-line interface.

Exit codes: 0 success, 2 usage or invalid input, 3 the NTRU optimizer ran out
of modulus (increase lambda), 4 an optimizer hit its iteration cap, 5 a
verification check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from . import __version__
from .config import FORMATS, RunConfig, resolve_config
from .entropy import (Distribution, EntropyOrder, collision_entropy, entropy_security_advantage,
                      entropy_security_advantage_refined, min_required_entropy, renyi_entropy)
from .errors import NonTerminationError, PqforgeError
from .ntru import (CostModel, LatticeShape, NtruParams, Outcome, ntru_size_bound_holds,
                   decoherence_term, entropy_to_complexity, is_prime, keyspace_term, lwe_reduction_advantage,
                   ntru_hardness, optimize_ntru, quantum_lattice_entropy_bound, root_hermite,
                   security_mapping)
from .quantum_model import (DEFAULT_TAU_G, Log2Quantity, QueryComplexityInput, QuantumEnvironment,
                            collision_search_log2_cost, entropy_loss_bound, grover_log2_cost,
                            lattice_success_decay, max_feasible_dimension, min_queries_for_error,
                            parallelization_log2_penalty, quantum_advantage_bound,
                            quantum_lower_bound, quantum_walk_cost)
from .reference import (HEADLINE, REPORTED_HQ_BITS, REPORTED_HQ_COMPLEXITY_LOG2, SOURCE_LABEL,
                        REPORTED_PARAMS, REPORTED_LAMBDA, REPORTED_NTRU_SIGMA)
from .report import _flatten, build_report, dumps, render_grid, render_text, text_table
from .sphincs import (BYTES_PER_KB, REFERENCE_SHAPE, SphincsParams, decoherence_height_bound,
                      collision_log2_probability, default_signature_calibration, effective_h2,
                      entropy_concentration_tail, entropy_threshold, evaluate_sphincs,
                      optimize_sphincs, sphincs_quantum_cost)
from .verify import run_verification

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INCREASE_LAMBDA = 3
EXIT_NONTERMINATION = 4
EXIT_VERIFY_FAILED = 5


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument helpers

def _float(text: str) -> float:
    """Float that also accepts ``inf`` and ``2^k`` notation."""
    t = text.strip().lower()
    if "^" in t:
        base, exp = t.split("^", 1)
        return float(base) ** float(exp)
    return float(t)


def _env_from(lambda_d: float, tau_g: float = DEFAULT_TAU_G, k: int = 1) -> QuantumEnvironment:
    return QuantumEnvironment(tau_g=tau_g, tau_d=tau_g * lambda_d, k=k)


def parse_distribution(spec: str, normalize: bool = False) -> Distribution:
    """``0.5,0.25,0.25`` inline, ``uniform:M``, or a path to a file of numbers."""
    if spec.startswith("uniform:"):
        try:
            m = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad uniform size in {spec!r}") from exc
        return Distribution.uniform(m)
    path = Path(spec)
    if path.is_file():
        values: list[float] = []
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            for token in line.replace(",", " ").split():
                try:
                    values.append(float(token))
                except ValueError as exc:
                    raise UsageError(f"{path}:{lineno}: cannot parse {token!r} as a probability") from exc
        if not values:
            raise UsageError(f"{path}: no probabilities found")
    else:
        try:
            values = [float(v) for v in spec.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"cannot parse distribution {spec!r} (not a file or number list)") from exc
    return Distribution.normalize(values) if normalize else Distribution(values)


# --------------------------------------------------------------------------
# output

@dataclass
class CommandResult:
    report: dict[str, Any]
    code: int = EXIT_OK
    csv_text: Optional[str] = None
    text: Optional[str] = None


def _csv_from_results(results: Any) -> str:
    rows: list[tuple[str, str]] = []
    _flatten("", results, rows)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["field", "value"])
    w.writerows(rows)
    return buf.getvalue()


def emit(out: CommandResult, fmt: str, path: Optional[str]) -> None:
    if fmt == "json":
        body = dumps(out.report)
    elif fmt == "csv":
        body = out.csv_text if out.csv_text is not None else _csv_from_results(out.report["results"])
    else:
        body = out.text if out.text is not None else render_text(out.report)
    if path:
        Path(path).write_text(body, encoding="utf-8")
    else:
        sys.stdout.write(body)


# --------------------------------------------------------------------------
# entropy

def run_entropy(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    dist = parse_distribution(args.dist, args.normalize)
    orders = [EntropyOrder.parse(a) for a in (args.alpha or ["2"])]
    entropies = [{"alpha": str(o), "bits": renyi_entropy(dist, o)} for o in orders]
    h2 = collision_entropy(dist)
    h32 = renyi_entropy(dist, EntropyOrder.finite(1.5))
    results = {
        "outcomes": len(dist),
        "support": dist.support_size,
        "entropies": entropies,
        "collision_entropy": h2,
        "advantage_bound": entropy_security_advantage(h2),
        "refined_advantage_bound": entropy_security_advantage_refined(h32, math.log2(len(dist))),
    }
    report = build_report(cfg.to_dict(), results, [], ["entropy", "advantage"])
    text = text_table([(f"H_{e['alpha']}", f"{e['bits']:.6f}") for e in entropies]
                      + [("advantage_bound", f"{results['advantage_bound']:.4g}")],
                      ("order", "bits"))
    return CommandResult(report, text=text)


# --------------------------------------------------------------------------
# optimize

def run_optimize_sphincs(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    cfg = cfg.override("sphincs", lam=args.lam, max_depth=args.max_depth, query_budget=args.query_budget,
                       step_h=args.step_h, hash_bits=args.hash_bits, max_tweak=args.max_tweak)
    cfg = cfg.override("environment", tau_d=None if args.lambda_d is None
                       else cfg.environment.tau_g * args.lambda_d)
    s = cfg.sphincs
    rep = optimize_sphincs(s.lam, cfg.environment.build(), s.max_depth, s.query_budget, s.step_h,
                           hash_bits=s.hash_bits, max_tweak=s.max_tweak,
                           calibration=s.signature_calibration)
    results = rep.to_dict()
    results["signature_size_kb"] = rep.signature_size_bytes / BYTES_PER_KB
    report = build_report(cfg.to_dict(), results, rep.flags,
                          ["sphincs.collision", "sphincs.cost", "sphincs.entropy_threshold",
                           "sphincs.height_bound", "sphincs.tree_entropy"])
    return CommandResult(report)


def run_optimize_ntru(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    cfg = cfg.override("ntru", lam=args.lam, cost_mode=args.mode, n_schedule=args.schedule,
                       eps=args.eps, max_modulus=args.max_modulus, q0=args.q0, r_q=args.r_q,
                       n_step=args.n_step)
    cfg = cfg.override("environment", tau_d=None if args.lambda_d is None
                       else cfg.environment.tau_g * args.lambda_d)
    n = cfg.ntru
    mode = CostModel.parse(n.cost_mode)
    rep = optimize_ntru(n.lam, n.eps, n.max_modulus, cfg.environment.build(), mode, n.n_schedule,
                        q0=n.q0, r_q=n.r_q, n_step=n.n_step)
    lattice_anchor = "ntru.lattice.literal" if mode is CostModel.CLOSED_FORM else "ntru.lattice.bkz"
    report = build_report(cfg.to_dict(), rep.to_dict(), rep.flags,
                          [lattice_anchor, "ntru.keyspace", "ntru.decoherence", "ntru.delta",
                           "ntru.hq_bound"])
    code = EXIT_INCREASE_LAMBDA if rep.outcome is Outcome.INCREASE_LAMBDA else EXIT_OK
    return CommandResult(report, code)


# --------------------------------------------------------------------------
# reported vs model comparison

def reported_comparison(cfg: RunConfig) -> tuple[dict[str, Any], list[str]]:
    env = cfg.environment.build()
    lam = REPORTED_LAMBDA
    flags: list[str] = []
    rows = [{
        "scheme": r.scheme, "parameter": r.parameter, "unit": r.unit,
        "original": r.original, "optimized": r.optimized,
        "reduction_percent": r.reduction_percent,
        "recomputed_percent": r.recomputed_percent,
        "discrepancy_pp": r.discrepancy_pp,
        "source": SOURCE_LABEL,
    } for r in REPORTED_PARAMS.rows]

    # SPHINCS+: the optimized 214-bit hash under the tree-entropy model
    n_opt = int(REPORTED_PARAMS.find("SPHINCS+", "hash_size").optimized)
    q = cfg.sphincs.query_budget
    h2 = effective_h2(n_opt, lam)
    threshold = entropy_threshold(lam, q)
    calibration = cfg.sphincs.signature_calibration or default_signature_calibration()
    shape = dict(REFERENCE_SHAPE, n=n_opt)
    sig_params = SphincsParams(query_budget=q, **shape)
    sig_eval = evaluate_sphincs(sig_params, lam, env, calibration=calibration)
    sphincs = {
        "hash_bits": n_opt,
        "effective_h2": h2,
        "entropy_threshold": threshold,
        "entropy_margin_bits": h2 - threshold,
        "collision_log2_prob": sig_eval.collision_log2_prob,
        "signature_size_kb_model": sig_eval.signature_size_bytes / BYTES_PER_KB,
        "signature_size_kb_reported": REPORTED_PARAMS.find("SPHINCS+", "signature_size").optimized,
        "flags": sig_eval.flags,
    }
    if h2 < threshold:
        flags.append("SPHINCS_REPORTED_ENTROPY_BELOW_THRESHOLD")

    # NTRU: N=634, q=6144 (q is not prime, so terms are evaluated directly)
    N = int(REPORTED_PARAMS.find("NTRU", "dimension_N").optimized)
    qn = int(REPORTED_PARAMS.find("NTRU", "modulus_q").optimized)
    if not is_prime(qn):
        flags.append("NTRU_REPORTED_MODULUS_NOT_PRIME")
    sigma = REPORTED_NTRU_SIGMA
    delta = root_hermite(sigma, N, qn)
    shape_n = LatticeShape(2 * N, N * math.log2(qn),
                           math.sqrt(2 * N / (2 * math.pi * math.e)) * math.sqrt(qn), delta)
    hq = quantum_lattice_entropy_bound(shape_n, sigma, env)
    mapping = security_mapping(N, qn, env, cfg.ntru.eps)
    ntru = {
        "N": N, "q": qn, "sigma": sigma, "delta": delta,
        "keyspace_log2": keyspace_term(N, qn),
        "decoherence_log2": decoherence_term(qn, env.epsilon, env),
        "security_mapping_bits": mapping,
        "lambda1_gaussian_heuristic": shape_n.lambda1,
        "hq_bound_bits": hq,
        "hq_reported_bits": REPORTED_HQ_BITS,
        "hq_gap_bits": hq - REPORTED_HQ_BITS,
        "complexity_log2_model": entropy_to_complexity(hq, cfg.ntru.c_complexity).log2_value,
        "complexity_log2_reported": REPORTED_HQ_COMPLEXITY_LOG2,
        "size_bound_holds": N * math.log2(qn) >= 2 * lam + math.log2(sigma * math.sqrt(N) / qn),
    }
    if delta < 1:
        flags.append("NTRU_REPORTED_DELTA_BELOW_ONE")
    if abs(hq - REPORTED_HQ_BITS) > 1:
        flags.append("NTRU_REPORTED_HQ_GAP")

    headline = {}
    for key, datum in HEADLINE.items():
        headline[key] = dict(datum, source=SOURCE_LABEL, computed=None)
    sig = REPORTED_PARAMS.find("SPHINCS+", "signature_size")
    quoted = HEADLINE["sphincs_signature_kb"]["reduction_percent"]
    if abs(sig.recomputed_percent - quoted) > REPORTED_PARAMS.tolerance_pp:
        flags.append("SIGNATURE_HEADLINE_PERCENT_MISMATCH")
    headline["sphincs_signature_kb"]["computed"] = sphincs["signature_size_kb_model"]
    return {"rows": rows, "sphincs": sphincs, "ntru": ntru, "headline": headline}, flags


def run_compare(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    results, flags = reported_comparison(cfg)
    report = build_report(cfg.to_dict(), results, flags,
                          ["sphincs.tree_entropy", "sphincs.entropy_threshold", "sphincs.collision",
                           "ntru.keyspace", "ntru.decoherence", "ntru.delta", "ntru.hq_bound",
                           "ntru.mapping", "ntru.complexity"])
    grid = render_grid(["scheme", "parameter", "original", "optimized", "reported %", "recomputed %"],
                       [[r["scheme"], r["parameter"], r["original"], r["optimized"],
                         r["reduction_percent"], r["recomputed_percent"]] for r in results["rows"]])
    rest = dict(results)
    rest.pop("rows")
    text = grid + "\n" + render_text(dict(report, results=rest))
    return CommandResult(report, text=text)


# --------------------------------------------------------------------------
# verify

def run_verify(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    cfg = cfg.override("oracle", bound_constant=args.bound_constant, sweep_trials=args.trials)
    result = run_verification(cfg.oracle)
    if args.csv:
        Path(args.csv).write_text(result.sweep.to_csv(), encoding="utf-8")
    results = {
        "passed": result.passed,
        "checks": [{"name": c.name, "passed": c.passed} for c in result.checks],
        "failures": [{"name": c.name, "detail": c.detail} for c in result.failures()],
        "sweep": {"t": result.sweep.t_grid, "empirical_tail": result.sweep.empirical_tail,
                  "bound_tail": result.sweep.bound_tail, "trials": result.sweep.trials,
                  "seed": result.sweep.seed, "probability_space": result.sweep.probability_space},
    }
    flags = [] if result.passed else ["VERIFY_FAILED"]
    report = build_report(cfg.to_dict(), results, flags,
                          ["verify.tail", "verify.collision", "verify.lattice", "verify.margin"])
    if not result.passed:
        sys.stderr.write(json.dumps(report["results"]["failures"], indent=2, sort_keys=True) + "\n")
    return CommandResult(report, EXIT_OK if result.passed else EXIT_VERIFY_FAILED,
                    csv_text=result.sweep.to_csv())


# --------------------------------------------------------------------------
# bound

@dataclass(frozen=True)
class BoundSpec:
    help: str
    units: str
    anchor: str
    args: tuple[tuple[str, Callable, Any], ...]
    fn: Callable[[argparse.Namespace], Any]


def _ideal_or(lambda_d: float, k: int = 1) -> QuantumEnvironment:
    return QuantumEnvironment.ideal(k=k) if math.isinf(lambda_d) else _env_from(lambda_d, k=k)


def _ntru_shape(a: argparse.Namespace) -> LatticeShape:
    N, q = a.N, a.q
    return LatticeShape(2 * N, N * math.log2(q), math.sqrt(2 * N / (2 * math.pi * math.e)) * math.sqrt(q),
                        root_hermite(a.sigma, N, q))


BOUNDS: dict[str, BoundSpec] = {
    "decoherence-floor": BoundSpec(
        "sequential queries needed for error 2^-lambda", "operations",
        "(tau_d/tau_g) ln(1/eps), eps = 2^-lambda",
        (("lambda", int, 128), ("lambda-d", _float, 1e6)),
        lambda a: min_queries_for_error(2.0 ** -a.lam, _env_from(a.lambda_d))),
    "query-lower-bound": BoundSpec(
        "max of the polynomial-method term and the decoherence floor", "queries",
        "max(c (1-2eps)^2/deg log2(|X|/spar), (tau_d/tau_g) ln(1/eps))",
        (("deg", _float, 1.0), ("sparsity", _float, 1.0), ("domain-bits", _float, 128.0),
         ("eps", _float, 0.25), ("lambda-d", _float, 1e6)),
        lambda a: quantum_lower_bound(QueryComplexityInput(a.deg, a.sparsity, a.domain_bits, a.eps),
                                      _ideal_or(a.lambda_d)).value),
    "collision-prob": BoundSpec(
        "QROM collision probability bound", "log2 probability",
        "C(q,2) (2^-H2 + 3^(k/2) 2^(-n/2)) exp(-t/tau_d)",
        (("q", _float, 2.0 ** 64), ("n", int, 256), ("h2", _float, 256.0), ("k", int, 1),
         ("time", _float, 0.0), ("lambda-d", _float, 1e6)),
        lambda a: collision_log2_probability(
            SphincsParams(h=max(1, a.n), d=1, t=1, n=a.n, query_budget=a.q), a.h2, a.time,
            _ideal_or(a.lambda_d, a.k))),
    "ntru-hardness": BoundSpec(
        "largest defined NTRU hardness term", "bits",
        "max(lattice term, N log2 q / 2, log2(lambda_d ln(q/eps)))",
        (("N", int, 701), ("q", int, 8219), ("sigma", _float, 1.5), ("lambda-d", _float, 1e6),
         ("mode", str, "bkz-blocksize")),
        lambda a: ntru_hardness(NtruParams.with_default_weights(a.N, a.q, a.sigma),
                                _ideal_or(a.lambda_d), a.mode).achieved_lambda),
    "lattice-entropy-bound": BoundSpec(
        "closed-form quantum lattice entropy lower bound for an NTRU shape", "bits",
        "pi lambda1^2/sigma^2 - ln det - dim lambda1/lambda_d",
        (("N", int, 634), ("q", int, 6144), ("sigma", _float, 1.5), ("lambda-d", _float, 1e6)),
        lambda a: quantum_lattice_entropy_bound(_ntru_shape(a), a.sigma, _ideal_or(a.lambda_d))),
    "lwe-advantage": BoundSpec(
        "decisional-LWE advantage from an NTRU distinguisher", "probability",
        "eps^2 / (c d^3)",
        (("eps", _float, 1.0), ("d", int, 2), ("c", _float, 1.0)),
        lambda a: lwe_reduction_advantage(a.eps, a.d, a.c)),
    "advantage-bound": BoundSpec(
        "bound on the quantum lattice speed-up", "log2 factor",
        "exp((T tau_g/tau_d) log2(dim)/dim)",
        (("log2-t", _float, 10.0), ("lambda-d", _float, 1e6), ("dim", int, 1024)),
        lambda a: quantum_advantage_bound(Log2Quantity.cost(a.log2_t), _ideal_or(a.lambda_d), a.dim)),
    "entropy-tradeoff": BoundSpec(
        "Renyi entropy needed for lambda-bit security", "bits",
        "lambda + log2(alpha/(alpha-1) q^2) - (tau_g/tau_d) lambda ln 2",
        (("alpha", _float, 2.0), ("lambda", int, 128), ("q", _float, 2.0 ** 64), ("lambda-d", _float, 1e6)),
        lambda a: min_required_entropy(a.alpha, a.lam, a.q, _ideal_or(a.lambda_d))),
    "entropy-loss": BoundSpec(
        "entropy lost to k parallel queries (leading term)", "bits",
        "(k tau_g/tau_d) log2|X|",
        (("k", int, 1), ("lambda-d", _float, 1e6), ("domain-bits", _float, 256.0)),
        lambda a: entropy_loss_bound(a.k, _ideal_or(a.lambda_d), a.domain_bits)),
    "concentration-tail": BoundSpec(
        "collision-entropy concentration tail", "probability",
        "exp(-c t^2 / b)",
        (("b", _float, 256.0), ("t", _float, 1.0), ("c", _float, 3.0)),
        lambda a: entropy_concentration_tail(a.b, a.t, a.c)),
    "collision-cost": BoundSpec(
        "quantum collision search on an m-bit range", "log2 operations", "Theta(2^(m/3))",
        (("m", int, 256),), lambda a: collision_search_log2_cost(a.m).log2_value),
    "grover-cost": BoundSpec(
        "unstructured search over 2^n", "log2 operations", "sqrt(2^n)",
        (("n", int, 128),), lambda a: grover_log2_cost(a.n).log2_value),
    "quantum-walk": BoundSpec(
        "quantum-walk search cost", "operations", "S + (U/sqrt(delta) + C)/sqrt(eps)",
        (("setup", _float, 1.0), ("update", _float, 1.0), ("check", _float, 1.0),
         ("delta", _float, 1.0), ("eps", _float, 1.0)),
        lambda a: quantum_walk_cost(a.setup, a.update, a.check, a.delta, a.eps)),
    "success-decay": BoundSpec(
        "lattice-attack success after decoherence", "probability",
        "p0 exp(-(t/tau_d) dim/log2 dim)",
        (("p0", _float, 1.0), ("time", _float, 0.0), ("lambda-d", _float, 1e6), ("dim", int, 512)),
        lambda a: lattice_success_decay(a.p0, a.time, _ideal_or(a.lambda_d), a.dim)),
    "max-dimension": BoundSpec(
        "largest lattice dimension attackable before decoherence", "dimension",
        "lambda_d (log2 lambda / lambda) log2(1/p0)",
        (("lambda", int, 128), ("p0", _float, 0.5), ("lambda-d", _float, 1e6)),
        lambda a: max_feasible_dimension(_env_from(a.lambda_d), a.lam, a.p0)),
    "height-bound": BoundSpec(
        "minimum SPHINCS+ tree height", "levels", "1.5 lambda + log2((tau_g/tau_d) ln 2)",
        (("lambda", int, 128), ("lambda-d", _float, 1e6)),
        lambda a: decoherence_height_bound(a.lam, _ideal_or(a.lambda_d))),
    "sphincs-cost": BoundSpec(
        "quantum collision cost of a height-h hypertree", "log2 operations",
        "min(2^(h/2), 2^(h/3)) exp(-tau_g/tau_d)",
        (("h", int, 384), ("lambda-d", _float, 1e6)),
        lambda a: sphincs_quantum_cost(a.h, _ideal_or(a.lambda_d)).log2_value),
    "ntru-bound": BoundSpec(
        "NTRU parameter inequality", "boolean", "N log2 q >= 2 lambda + log2(sigma sqrt(N)/q)",
        (("N", int, 634), ("q", int, 6163), ("sigma", _float, 1.5), ("lambda", int, 128)),
        lambda a: ntru_size_bound_holds(NtruParams.with_default_weights(a.N, a.q, a.sigma), a.lam)),
    "security-mapping": BoundSpec(
        "security level from (N, q)", "bits", "min(lattice, keyspace, decoherence) at its fixed point",
        (("N", int, 634), ("q", int, 6144), ("eps", _float, 2.0 ** -40), ("lambda-d", _float, 1e6)),
        lambda a: security_mapping(a.N, a.q, _ideal_or(a.lambda_d), a.eps)),
    "parallel-penalty": BoundSpec(
        "k-processor success factor", "log2 factor", "1/sqrt(k)",
        (("k", int, 1),), lambda a: parallelization_log2_penalty(a.k).log2_value),
    "entropy-complexity": BoundSpec(
        "attack cost implied by a quantum lattice entropy", "log2 operations", "c H_Q",
        (("hq", _float, 380.0), ("c", _float, 0.5)),
        lambda a: entropy_to_complexity(a.hq, a.c).log2_value),
}


def _dest(flag: str) -> str:
    return "lam" if flag == "lambda" else flag.replace("-", "_")


def run_bound(args: argparse.Namespace, cfg: RunConfig) -> CommandResult:
    spec = BOUNDS[args.bound_name]
    value = spec.fn(args)
    inputs = {flag: getattr(args, _dest(flag)) for flag, _, _ in spec.args}
    results = {"name": args.bound_name, "value": value, "units": spec.units, "inputs": inputs,
               "anchor": spec.anchor}
    report = build_report(cfg.to_dict(), results, [], [])
    report["anchors"] = {args.bound_name: spec.anchor}
    shown = value if isinstance(value, (bool, int)) else f"{value:.4g}"
    text = f"{args.bound_name} = {shown} {spec.units}\n  {spec.anchor}\n"
    return CommandResult(report, text=text)


# --------------------------------------------------------------------------
# parser

def _global_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--config", default=argparse.SUPPRESS, help="JSON config file")
    g.add_argument("--output", default=argparse.SUPPRESS, help="write the report here instead of stdout")
    g.add_argument("--format", choices=FORMATS, default=argparse.SUPPRESS)
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit oracle seed")
    return p


def build_parser() -> argparse.ArgumentParser:
    parent = _global_parent()
    parser = argparse.ArgumentParser(prog="pqforge", parents=[parent],
                                     description="Entropy and decoherence-aware parameter estimates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", parents=[parent], help="Renyi entropies of a distribution")
    p.add_argument("--dist", required=True, help="p1,p2,...  |  uniform:M  |  file of numbers")
    p.add_argument("--alpha", action="append", help="order: number, 'shannon' or 'inf' (repeatable)")
    p.add_argument("--normalize", action="store_true", help="treat values as unnormalized weights")
    p.set_defaults(func=run_entropy)

    p = sub.add_parser("optimize", parents=[parent], help="run a parameter optimizer")
    osub = p.add_subparsers(dest="scheme", required=True)
    s = osub.add_parser("sphincs", parents=[parent])
    s.add_argument("--lambda", dest="lam", type=int)
    s.add_argument("--max-depth", type=int)
    s.add_argument("--query-budget", type=_float)
    s.add_argument("--step-h", type=int)
    s.add_argument("--hash-bits", type=int)
    s.add_argument("--max-tweak", type=int)
    s.add_argument("--lambda-d", type=_float)
    s.set_defaults(func=run_optimize_sphincs)
    n = osub.add_parser("ntru", parents=[parent])
    n.add_argument("--lambda", dest="lam", type=int)
    n.add_argument("--mode", choices=[m.value for m in CostModel])
    n.add_argument("--schedule", choices=["prime", "power-of-two"])
    n.add_argument("--eps", type=_float)
    n.add_argument("--max-modulus", type=int)
    n.add_argument("--q0", type=int)
    n.add_argument("--r-q", type=_float)
    n.add_argument("--n-step", type=int)
    n.add_argument("--lambda-d", type=_float)
    n.set_defaults(func=run_optimize_ntru)

    p = sub.add_parser("compare", parents=[parent], help="reported vs model-computed NIST level-I parameters")
    p.set_defaults(func=run_compare)

    p = sub.add_parser("verify", parents=[parent], help="check the bounds against brute-force oracles")
    p.add_argument("--csv", help="write the concentration sweep CSV here")
    p.add_argument("--trials", type=int, help="override the sweep trial count")
    p.add_argument("--bound-constant", type=_float,
                   help="concentration constant under test (negative-control hook)")
    p.set_defaults(func=run_verify)

    p = sub.add_parser("bound", parents=[parent], help="evaluate a single bound")
    bsub = p.add_subparsers(dest="bound_name", required=True, metavar="NAME")
    for name, spec in BOUNDS.items():
        b = bsub.add_parser(name, parents=[parent], help=spec.help)
        for flag, typ, default in spec.args:
            b.add_argument(f"--{flag}", dest=_dest(flag), type=typ, default=default)
    p.set_defaults(func=run_bound)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(getattr(args, "config", None))
        cfg = cfg.override("output", format=getattr(args, "format", None), path=getattr(args, "output", None))
        cfg = cfg.override("oracle", seed=getattr(args, "seed", None))
        out = args.func(args, cfg)
    except NonTerminationError as exc:
        sys.stderr.write(f"pqforge: {exc}\n")
        sys.stderr.write(json.dumps(exc.state, indent=2, sort_keys=True, default=str) + "\n")
        return EXIT_NONTERMINATION
    except (UsageError, PqforgeError, ValueError) as exc:
        sys.stderr.write(f"pqforge: error: {exc}\n")
        return EXIT_USAGE
    emit(out, cfg.output.format, cfg.output.path)
    return out.code


if __name__ == "__main__":
    sys.exit(main())
