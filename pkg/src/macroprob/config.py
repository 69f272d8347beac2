"""Declarative experiment configuration.

A config is a single JSON object.  Numeric sweeps are either explicit
lists or log-scale ranges ``{"start": 4, "factor": 2, "count": 19}``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError

SCENARIOS = (
    "residual",
    "commutator",
    "entangle",
    "postselect",
    "disturb",
    "sweep",
    "qudit",
    "born",
    "uncertainty",
    "overlap",
)
STOCHASTIC = ("born",)

Scenario = Literal[
    "residual", "commutator", "entangle", "postselect", "disturb",
    "sweep", "qudit", "born", "uncertainty", "overlap",
]


class LogRange(BaseModel):
    model_config = ConfigDict(extra="forbid")

    start: float = Field(gt=0)
    factor: float = Field(gt=0)
    count: int = Field(ge=1)

    def values(self) -> list[float]:
        return [self.start * self.factor**i for i in range(self.count)]


Selection = Union[int, Literal["modal", "max", "min"]]


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenario: Scenario
    c_plus_sq: float | None = Field(default=None, ge=0.0, le=1.0)
    theta: float | None = None
    phi: float = 0.0
    n: Union[list[int], LogRange] = Field(default_factory=lambda: [100])
    epsilon: Union[list[float], LogRange, None] = None
    width: float | None = Field(default=None, gt=0)
    n_plus: list[Selection] | None = None
    trials: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
    orders: int = Field(default=6, ge=1, le=40)
    levels: list[float] | None = None
    probs: list[float] | None = None
    random_states: int = Field(default=0, ge=0)
    pairs: int = Field(default=0, ge=0)
    convention: Literal["rotation", "minimum_uncertainty"] = "rotation"
    dense_cap: int = Field(default=4096, ge=1)
    format: Literal["csv", "json"] = "csv"
    out: str | None = None
    timing: bool = False

    @field_validator("n")
    @classmethod
    def _positive_n(cls, v):
        values = v.values() if isinstance(v, LogRange) else v
        if not values:
            raise ValueError("at least one sample size is required")
        for x in values:
            if x < 1:
                raise ValueError(f"sample sizes must be >= 1, got {x}")
        return v

    @field_validator("epsilon")
    @classmethod
    def _positive_eps(cls, v):
        if v is None:
            return v
        values = v.values() if isinstance(v, LogRange) else v
        if not values:
            raise ValueError("epsilon list is empty")
        for x in values:
            if not x > 0:
                raise ValueError(f"epsilon values must be > 0, got {x}")
        return v

    def n_values(self) -> list[int]:
        if isinstance(self.n, LogRange):
            return sorted({int(round(x)) for x in self.n.values()})
        return list(self.n)

    def epsilon_values(self) -> list[float] | None:
        if self.epsilon is None:
            return None
        if isinstance(self.epsilon, LogRange):
            return self.epsilon.values()
        return list(self.epsilon)


def _error_path(err: dict) -> str:
    return ".".join(str(x) for x in err.get("loc", ()))


def _cross_checks(cfg: ExperimentConfig) -> None:
    if cfg.c_plus_sq is not None and cfg.theta is not None:
        raise ConfigError("theta", "give either c_plus_sq or theta, not both")
    stochastic = (
        cfg.scenario in STOCHASTIC
        or (cfg.scenario in ("uncertainty", "qudit") and cfg.random_states > 0)
        or (cfg.scenario == "qudit" and cfg.trials is not None)
        or (cfg.scenario == "overlap" and cfg.pairs > 0)
    )
    if stochastic and cfg.seed is None:
        raise ConfigError("seed", f"scenario {cfg.scenario!r} is stochastic here and requires a seed")
    if cfg.scenario == "born" and cfg.trials is None:
        raise ConfigError("trials", "born scenario requires trials")
    if cfg.scenario == "qudit" and cfg.random_states == 0:
        if cfg.levels is None or cfg.probs is None:
            raise ConfigError("levels", "qudit scenario requires levels and probs (or random_states)")
    if cfg.levels is not None and cfg.probs is not None and len(cfg.levels) != len(cfg.probs):
        raise ConfigError("probs", "levels and probs must have equal length")
    if cfg.scenario == "postselect" and not cfg.n_plus:
        raise ConfigError("n_plus", "postselect scenario requires n_plus")
    if cfg.scenario in ("entangle", "postselect") and cfg.epsilon is None and cfg.width is None:
        raise ConfigError("epsilon", f"scenario {cfg.scenario!r} needs epsilon or width")
    if cfg.scenario in ("disturb", "sweep") and cfg.epsilon is None:
        raise ConfigError("epsilon", f"scenario {cfg.scenario!r} needs epsilon")
    if cfg.n_plus:
        for i, sel in enumerate(cfg.n_plus):
            if isinstance(sel, int) and any(sel > n or sel < 0 for n in cfg.n_values()):
                raise ConfigError(f"n_plus.{i}", f"n_plus={sel} outside [0, N] for some N in the sweep")


def validate_config(data: dict[str, Any]) -> ExperimentConfig:
    """Validate every field and cross-field rule before any computation runs."""
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(_error_path(first), first["msg"]) from exc
    _cross_checks(cfg)
    return cfg


def load_config(path: str | Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a JSON object")
    return data


def parse_sweep(text: str, kind=float):
    """``"4,16,64"`` -> list, ``"4:2:19"`` -> LogRange(start=4, factor=2, count=19)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError("sweep", f"log range must be start:factor:count, got {text!r}")
        try:
            return {"start": float(parts[0]), "factor": float(parts[1]), "count": int(parts[2])}
        except ValueError as exc:
            raise ConfigError("sweep", f"bad log range {text!r}") from exc
    try:
        return [kind(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError("sweep", f"bad value list {text!r}") from exc
