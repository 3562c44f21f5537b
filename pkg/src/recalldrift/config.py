"""Run configuration files (JSON)."""

from __future__ import annotations

import json
from datetime import date
from pathlib import Path
from typing import Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError
from .recall import AgeBucket, InterventionEffect, RecallModelParams
from .replay import Policy
from .risk import CostModel
from .simgen import SimConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class BucketRow(_Strict):
    age_bucket: AgeBucket
    sensitive: bool
    p_c: float = Field(ge=0, le=1)
    p_o: float = Field(ge=0, le=1)


class DecaySection(_Strict):
    floor: float = Field(0.0, ge=0, le=1)
    ceiling: float = Field(1.0, ge=0, le=1)
    half_life_days: float = Field(365.0, gt=0)


class ModelSection(_Strict):
    bucket_table: list[BucketRow]
    decay: DecaySection = DecaySection()
    blend: bool = False
    old_threshold_days: float = Field(180.0, ge=0)


class EffectSection(_Strict):
    mode: Literal["absolute", "delta"] = "absolute"
    pc_after: float
    po_after: float


class CostSection(_Strict):
    c_f: float = Field(1.0, ge=0)
    c_o: float = Field(10.0, ge=0)


class SimSection(_Strict):
    n_items: int = Field(10, ge=0)
    horizon_days: int = Field(30, ge=1)
    reuse_rate: Union[float, list[tuple[float, float]]] = 0.1
    old_fraction: float = Field(0.5, ge=0, le=1)
    sensitive_fraction: float = Field(0.1, ge=0, le=1)
    hesitation_range: tuple[float, float] = (0.0, 1.0)
    scope_dist: tuple[float, float, float] = (0.3, 0.5, 0.2)
    device_contexts: list[str] = ["mobile", "desktop"]
    start_date: date = date(2025, 1, 1)


class RunConfig(_Strict):
    model: ModelSection
    effect: EffectSection
    costs: CostSection = CostSection()
    policy: str = "never"
    compare_policy: Optional[str] = None
    uncertainty_threshold: float = Field(0.5, ge=0, le=1)
    prior_grid: list[tuple[float, float, float, float]] = []
    sim: SimSection = SimSection()
    log: Optional[str] = None
    out: str = "out"
    seed: int = Field(0, ge=0, lt=2 ** 64)
    bins: int = Field(7, ge=1)
    noise_scale: float = Field(0.0, ge=0)
    calibration_bins: int = Field(10, ge=1)

    # set by load_run_config so relative paths resolve against the file
    base_dir: Path = Path(".")

    @field_validator("prior_grid")
    @classmethod
    def _probabilities(cls, grid):
        for row in grid:
            if not all(0.0 <= v <= 1.0 for v in row):
                raise ValueError(f"prior grid values must lie in [0, 1], got {row}")
        return grid

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def recall_model(self) -> RecallModelParams:
        return RecallModelParams.from_dict(self.model.model_dump(mode="json"))

    def intervention(self) -> InterventionEffect:
        return InterventionEffect(self.effect.pc_after, self.effect.po_after, self.effect.mode)

    def cost_model(self) -> CostModel:
        return CostModel(self.costs.c_f, self.costs.c_o)

    def run_policy(self, override: str | None = None) -> Policy:
        return Policy.parse(override or self.policy, self.uncertainty_threshold)

    def sim_config(self, seed: int | None = None) -> SimConfig:
        s = self.sim
        rate = s.reuse_rate if isinstance(s.reuse_rate, float) else tuple(tuple(p) for p in s.reuse_rate)
        try:
            return SimConfig(
                n_items=s.n_items, horizon_days=s.horizon_days, reuse_rate=rate,
                old_fraction=s.old_fraction, sensitive_fraction=s.sensitive_fraction,
                hesitation_range=tuple(s.hesitation_range), scope_dist=tuple(s.scope_dist),
                seed=self.seed if seed is None else seed,
                old_threshold_days=self.model.old_threshold_days,
                device_contexts=tuple(s.device_contexts), start_date=s.start_date,
            )
        except ConfigError as exc:
            raise ConfigError(str(exc).split(": ", 1)[-1], field=f"sim.{exc.field}") from None


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def parse_run_config(data: dict, base_dir: Path = Path(".")) -> RunConfig:
    try:
        cfg = RunConfig.model_validate({**data, "base_dir": base_dir})
    except ValidationError as exc:
        raise ConfigError(_format_validation(exc)) from None
    # catch domain-level problems up front rather than mid-run
    cfg.recall_model()
    cfg.intervention()
    try:
        cfg.run_policy()
        if cfg.compare_policy:
            cfg.run_policy(cfg.compare_policy)
    except ValueError as exc:
        raise ConfigError(str(exc), field="policy") from None
    cfg.sim_config()
    return cfg


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", field=str(path)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", field=str(path)) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", field=str(path))
    return parse_run_config(data, base_dir=path.parent)
