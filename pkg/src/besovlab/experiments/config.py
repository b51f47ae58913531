"""Experiment configuration: a flat dataclass read from key=value text."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

KINDS = (
    "lp_suite",
    "norm_suite",
    "paraproduct_suite",
    "linear_suite",
    "simulate",
    "threshold_search",
    "scaling_check",
)
FORMATS = ("json", "csv")
EXTRA_FUNCTIONALS = ("t", "mass", "l2q", "l2u", "maxu")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "simulate"
    grid: int = 32
    dim: int = 2
    grids: str = "32,64,128"
    # model
    gamma: float = 1.4
    mu: float = 1.0
    lam: float = 0.0
    viscosity: str = "constant"
    bd_c: float = 1.0
    bd_alpha: float = 1.0
    # indices
    s: float = 0.5
    p: float = 2.0
    p1: float = 2.0
    r: float = 1.0
    # run
    eps: float = 1e-3
    T: float = 10.0
    steps: int = 400
    formulation: str = "original"
    structure: bool = True
    seed: int = 0
    samples: int = 20
    # threshold search
    eps_low: float = 1e-4
    eps_high: float = 1.0
    # output
    out: str = "results"
    format: str = "json"
    extras: str = "t"

    def __post_init__(self):
        errors = []
        if self.kind not in KINDS:
            errors.append(f"kind: must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if self.dim not in (2, 3):
            errors.append(f"dim: must be 2 or 3, got {self.dim}")
        if self.grid < 8 or self.grid & (self.grid - 1) or self.grid > 256:
            errors.append(f"grid: must be a power of two in [8, 256], got {self.grid}")
        try:
            gl = self.grid_list
            if any(m < 8 or m & (m - 1) or m > 256 for m in gl) or not gl:
                errors.append(f"grids: need powers of two in [8, 256], got {self.grids!r}")
        except ValueError:
            errors.append(f"grids: comma-separated integers expected, got {self.grids!r}")
        if not self.gamma >= 1:
            errors.append(f"gamma: must be >= 1, got {self.gamma}")
        if self.viscosity not in ("constant", "bd"):
            errors.append(f"viscosity: must be 'constant' or 'bd', got {self.viscosity!r}")
        elif self.viscosity == "constant" and not (self.mu > 0 and self.lam + 2 * self.mu > 0):
            errors.append(f"mu, lam: need mu > 0 and lam + 2 mu > 0, got mu={self.mu}, lam={self.lam}")
        elif self.viscosity == "bd" and not (self.bd_c > 0 and self.bd_c * self.bd_alpha > 0):
            errors.append("bd_c, bd_alpha: need mu(1) > 0 and mu(1) + lambda(1) > 0")
        for name in ("p", "p1", "r"):
            if not getattr(self, name) >= 1:
                errors.append(f"{name}: must be >= 1 or inf, got {getattr(self, name)}")
        if not (0 <= self.eps < 1):
            errors.append(f"eps: must be in [0, 1), got {self.eps}")
        if not self.T > 0:
            errors.append(f"T: must be positive, got {self.T}")
        if self.steps < 1:
            errors.append(f"steps: must be >= 1, got {self.steps}")
        if self.formulation not in ("original", "effective"):
            errors.append(f"formulation: must be 'original' or 'effective', got {self.formulation!r}")
        if self.samples < 1:
            errors.append(f"samples: must be >= 1, got {self.samples}")
        if not (0 < self.eps_low < self.eps_high):
            errors.append(f"eps_low, eps_high: need 0 < eps_low < eps_high, got {self.eps_low}, {self.eps_high}")
        if self.format not in FORMATS:
            errors.append(f"format: must be one of {FORMATS}, got {self.format!r}")
        bad = [e for e in self.extra_list if e not in EXTRA_FUNCTIONALS]
        if bad:
            errors.append(f"extras: unknown functionals {bad}; available {EXTRA_FUNCTIONALS}")
        if errors:
            raise ConfigError("; ".join(errors))

    @property
    def grid_list(self) -> list[int]:
        return [int(x) for x in self.grids.split(",") if x.strip()]

    @property
    def extra_list(self) -> list[str]:
        return [x.strip() for x in self.extras.split(",") if x.strip()]

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, float) and math.isinf(v):
                d[k] = "inf"
        return d

    def updated(self, **changes) -> "ExperimentConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _convert(name: str, text: str):
    typ = _FIELDS[name].type
    try:
        if typ == "int":
            return int(text)
        if typ == "float":
            return math.inf if text.strip().lower() in ("inf", "infinity") else float(text)
        if typ == "bool":
            low = text.strip().lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(text)
        return text.strip()
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {text!r} as {typ}") from None


def parse_config_text(text: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if len(val) >= 2 and val[0] == val[-1] and val[0] in "'\"":
            val = val[1:-1]
        values[key] = _convert(key, val)
    return values


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)

