"""Report assembly and serialization (JSON, fixed-width text)."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, is_dataclass
from typing import Any, Iterable

from . import __version__

SIG_FIGS = 4

# Formula strings attached to every computed term.
ANCHORS = {
    "entropy": "H_a(P) = log2(sum p^a) / (1 - a); a=1 Shannon, a=inf -log2 max p",
    "advantage": "advantage <= sqrt(2^-H2)",
    "sphincs.collision": "C(q,2) * (2^-H2 + 3^(k/2) 2^(-n/2)) * exp(-t/tau_d)",
    "sphincs.cost": "min(2^(h/2), 2^(h/3)) * exp(-tau_g/tau_d)",
    "sphincs.entropy_threshold": "H2 >= lambda + log2(q^2)",
    "sphincs.height_bound": "h >= 1.5 lambda + log2((tau_g/tau_d) ln 2)",
    "sphincs.tree_entropy": "H2(h) = min(h, n - sqrt(n lambda ln2 / 3))",
    "ntru.lattice.literal": "(pi lambda_d / sqrt2) sqrt(N log2 q / log2 delta)",
    "ntru.lattice.bkz": "0.292 beta - log2 exp(-2^(0.292 beta) tau_g/tau_d), beta from delta",
    "ntru.keyspace": "N log2 q / 2",
    "ntru.decoherence": "log2(lambda_d ln(q/eps))",
    "ntru.delta": "delta = (sigma sqrt(N) / q)^(2/N)",
    "ntru.hq_bound": "pi lambda1^2/sigma^2 - ln det - dim lambda1/lambda_d (bits)",
    "ntru.mapping": "min(pi lambda_d sqrt(N log q)/sqrt(2 ln 1/eps), N log2 q / 2, lambda_d ln 2^lambda)",
    "ntru.complexity": "log2 T >= c H_Q",
    "verify.tail": "Pr[H2 <= log2|Y| - t] <= exp(-c t^2 / b)",
    "verify.collision": "empirical collision frequency vs C(q,2) 2^-H2 and birthday product",
    "verify.lattice": "exact H_Q by enumeration >= closed-form lower bound",
    "verify.margin": "1 - sqrt(2/c) margin reduction",
}


def jsonable(obj: Any) -> Any:
    """Convert dataclasses/enums/tuples to JSON types; non-finite floats become strings."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return jsonable(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_report(config: dict[str, Any], results: Any, flags: Iterable[str],
                 anchors: Iterable[str]) -> dict[str, Any]:
    return {
        "version": __version__,
        "config": jsonable(config),
        "results": jsonable(results),
        "flags": sorted(set(flags)),
        "anchors": {name: ANCHORS[name] for name in anchors},
    }


def dumps(report: dict[str, Any]) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def fmt(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return str(value)
        return f"{value:.{SIG_FIGS}g}"
    return str(value)


def _flatten(prefix: str, obj: Any, out: list[tuple[str, str]]) -> None:
    if isinstance(obj, dict):
        for key in obj:
            _flatten(f"{prefix}.{key}" if prefix else str(key), obj[key], out)
    elif isinstance(obj, list) and obj and all(isinstance(v, (dict, list)) for v in obj):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    elif isinstance(obj, list):
        out.append((prefix, ", ".join(fmt(v) for v in obj)))
    else:
        out.append((prefix, fmt(obj)))


def text_table(rows: list[tuple[str, str]], headers: tuple[str, str] = ("field", "value")) -> str:
    width = max([len(headers[0])] + [len(k) for k, _ in rows])
    lines = [f"{headers[0]:<{width}}  {headers[1]}", f"{'-' * width}  {'-' * max(5, len(headers[1]))}"]
    lines += [f"{k:<{width}}  {v}" for k, v in rows]
    return "\n".join(lines) + "\n"


def render_text(report: dict[str, Any]) -> str:
    rows: list[tuple[str, str]] = []
    _flatten("", report["results"], rows)
    out = [f"pqforge {report['version']}", "", text_table(rows)]
    if report["flags"]:
        out.append("flags: " + ", ".join(report["flags"]) + "\n")
    return "\n".join(out)


def render_grid(headers: list[str], rows: list[list[Any]]) -> str:
    """Fixed-width multi-column table, numbers at 4 significant figures."""
    cells = [[fmt(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(headers)]
    line = lambda vals: "  ".join(f"{v:<{w}}" for v, w in zip(vals, widths)).rstrip()
    parts = [line(headers), line(["-" * w for w in widths])] + [line(r) for r in cells]
    return "\n".join(parts) + "\n"
