"""Strict JSON run configuration.

Precedence, lowest to highest: built-in defaults, the config file (``--config``
or the ``PQFORGE_CONFIG`` environment variable), then command-line flags.
Unknown keys anywhere in the file are rejected.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError
from .ntru import (DEFAULT_MAX_MODULUS, DEFAULT_NTRU_EPS, DEFAULT_PRIME_STEP, DEFAULT_Q0,
                   DEFAULT_RQ, CostModel, NSchedule)
from .quantum_model import DEFAULT_EPSILON, DEFAULT_LAMBDA_D, DEFAULT_TAU_G, QuantumEnvironment
from .sphincs import IMPROVED_CONSTANT

ENV_VAR = "PQFORGE_CONFIG"
FORMATS = ("json", "text", "csv")


@dataclass(frozen=True)
class EnvironmentBlock:
    tau_g: float = DEFAULT_TAU_G
    tau_d: float = DEFAULT_TAU_G * DEFAULT_LAMBDA_D
    k: int = 1
    epsilon: float = DEFAULT_EPSILON

    def build(self) -> QuantumEnvironment:
        return QuantumEnvironment(tau_g=self.tau_g, tau_d=self.tau_d, k=self.k, epsilon=self.epsilon)


@dataclass(frozen=True)
class SphincsBlock:
    lam: int = 128
    max_depth: int = 8
    query_budget: float = 2.0 ** 64
    step_h: int = 1
    max_tweak: int = 16
    hash_bits: Optional[int] = None
    signature_calibration: Optional[float] = None

    def check(self) -> None:
        if self.lam < 1 or self.max_depth < 1 or self.step_h < 1 or self.max_tweak < 1:
            raise ConfigError("sphincs: lambda, max_depth, step_h and max_tweak must be >= 1")
        if not self.query_budget > 0:
            raise ConfigError("sphincs: query_budget must be positive")
        if self.hash_bits is not None and self.hash_bits < 1:
            raise ConfigError("sphincs: hash_bits must be >= 1")
        if self.signature_calibration is not None and not self.signature_calibration > 0:
            raise ConfigError("sphincs: signature_calibration must be positive")


@dataclass(frozen=True)
class NtruBlock:
    lam: int = 128
    eps: float = DEFAULT_NTRU_EPS
    max_modulus: int = DEFAULT_MAX_MODULUS
    cost_mode: str = CostModel.BKZ_BLOCKSIZE.value
    n_schedule: str = NSchedule.PRIME.value
    q0: int = DEFAULT_Q0
    r_q: float = DEFAULT_RQ
    n_step: int = DEFAULT_PRIME_STEP
    c_lwe: float = 1.0
    c_complexity: float = 0.5

    def check(self) -> None:
        if self.lam < 1:
            raise ConfigError("ntru: lambda must be >= 1")
        if not 0 < self.eps < 1:
            raise ConfigError("ntru: eps must lie in (0, 1)")
        if self.max_modulus < 3 or self.q0 < 3 or self.n_step < 1:
            raise ConfigError("ntru: max_modulus and q0 must be >= 3, n_step >= 1")
        if not self.r_q > 1:
            raise ConfigError("ntru: r_q must exceed 1")
        if not (self.c_lwe > 0 and self.c_complexity > 0):
            raise ConfigError("ntru: constants must be positive")
        try:
            CostModel.parse(self.cost_mode)
            NSchedule.parse(self.n_schedule)
        except ValueError as exc:
            raise ConfigError(f"ntru: {exc}") from exc


@dataclass(frozen=True)
class OracleBlock:
    seed: int = 20240601
    sweep_domain: int = 4096
    sweep_range: int = 256
    sweep_trials: int = 10_000
    t_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0)
    collision_range: int = 256
    collision_q: tuple[int, ...] = (2, 4, 8, 16)
    collision_trials: int = 10_000
    lattice_count: int = 50
    lattice_max_dim: int = 4
    lattice_entry_bound: int = 5
    lattice_sigmas: tuple[float, ...] = (0.5, 1.0, 2.0)
    lattice_lambda_ds: tuple[float, ...] = (10.0, 1e6)
    bound_constant: float = IMPROVED_CONSTANT
    margin_band: tuple[float, float] = (0.15, 0.20)

    def check(self) -> None:
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("oracle: seed must be a 64-bit unsigned integer")
        if self.sweep_trials < 100 or self.collision_trials < 1:
            raise ConfigError("oracle: sweep_trials >= 100 and collision_trials >= 1 required")
        if not 2 <= self.lattice_max_dim <= 6:
            raise ConfigError("oracle: lattice_max_dim must lie in [2, 6]")
        if self.lattice_count < 1 or self.lattice_entry_bound < 1:
            raise ConfigError("oracle: lattice_count and lattice_entry_bound must be >= 1")
        if not self.bound_constant > 0:
            raise ConfigError("oracle: bound_constant must be positive")
        lo, hi = self.margin_band
        if not 0 <= lo <= hi < 1:
            raise ConfigError("oracle: margin_band must satisfy 0 <= lo <= hi < 1")


@dataclass(frozen=True)
class OutputBlock:
    format: str = "json"
    path: Optional[str] = None

    def check(self) -> None:
        if self.format not in FORMATS:
            raise ConfigError(f"output: format must be one of {', '.join(FORMATS)}")


_BLOCKS = {
    "environment": EnvironmentBlock,
    "sphincs": SphincsBlock,
    "ntru": NtruBlock,
    "oracle": OracleBlock,
    "output": OutputBlock,
}

# JSON spelling of dataclass fields where they differ
_ALIASES = {"lambda": "lam"}
_REVERSE = {v: k for k, v in _ALIASES.items()}


def _coerce(block: str, name: str, default: Any, value: Any) -> Any:
    where = f"{block}.{_REVERSE.get(name, name)}"
    if isinstance(value, str) and value.lower() in {"inf", "infinity"} and isinstance(default, float):
        return math.inf
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list")
        return tuple(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ConfigError(f"{where}: expected an integer")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if isinstance(default, str) and not isinstance(value, str):
        raise ConfigError(f"{where}: expected a string")
    return value


def _parse_block(name: str, cls: type, raw: Any) -> Any:
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: expected an object")
    known = {f.name: f for f in fields(cls)}
    values = {}
    for key, value in raw.items():
        attr = _ALIASES.get(key, key)
        if attr not in known:
            raise ConfigError(f"unknown key {name}.{key}")
        default = known[attr].default
        values[attr] = value if value is None else _coerce(name, attr, default, value)
    return cls(**values)


@dataclass(frozen=True)
class RunConfig:
    environment: EnvironmentBlock = field(default_factory=EnvironmentBlock)
    sphincs: SphincsBlock = field(default_factory=SphincsBlock)
    ntru: NtruBlock = field(default_factory=NtruBlock)
    oracle: OracleBlock = field(default_factory=OracleBlock)
    output: OutputBlock = field(default_factory=OutputBlock)

    def validate(self) -> "RunConfig":
        try:
            self.environment.build()
        except ValueError as exc:
            raise ConfigError(f"environment: {exc}") from exc
        self.sphincs.check()
        self.ntru.check()
        self.oracle.check()
        self.output.check()
        return self

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        blocks = {}
        for key, value in raw.items():
            if key not in _BLOCKS:
                raise ConfigError(f"unknown top-level key {key!r}")
            blocks[key] = _parse_block(key, _BLOCKS[key], value)
        return cls(**blocks).validate()

    @classmethod
    def load(cls, path: "str | Path") -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        return cls.from_dict(raw)

    def override(self, block: str, **changes: Any) -> "RunConfig":
        changes = {k: v for k, v in changes.items() if v is not None}
        if not changes:
            return self
        return replace(self, **{block: replace(getattr(self, block), **changes)}).validate()

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for name in _BLOCKS:
            block = asdict(getattr(self, name))
            out[name] = {_REVERSE.get(k, k): list(v) if isinstance(v, tuple) else v
                         for k, v in block.items()}
        return out


def resolve_config(path: Optional[str]) -> RunConfig:
    """Load ``path``, else the file named by ``PQFORGE_CONFIG``, else defaults."""
    path = path or os.environ.get(ENV_VAR)
    if path:
        return RunConfig.load(path)
    return RunConfig().validate()
