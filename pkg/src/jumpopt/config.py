"""Experiment configuration: a YAML-backed description of one study.

The file format is a flat mapping with three optional nested sections
(robot, gains, tpe). Unknown keys are rejected so typos fail loudly
instead of silently running defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import yaml

from .controller import Gains
from .profiles import DEFAULT_F1, JumpType
from .simulator import RobotModel, default_model
from .terrain import (DEFAULT_BLOCK_CELL, Terrain, flat_terrain, make_block_terrain)
from .tpe import TpeConfig


class ConfigError(Exception):
    """Raised for unreadable, malformed, or out-of-range configuration."""


def parse_terrain_spec(spec: str) -> tuple[str, float, float]:
    """Parse "flat" or "blocks:<height>[:<cell>]" into (kind, height, cell)."""
    parts = str(spec).strip().split(":")
    kind = parts[0]
    if kind == "flat":
        if len(parts) > 1:
            raise ConfigError(f"flat terrain takes no arguments: {spec!r}")
        return "flat", 0.0, DEFAULT_BLOCK_CELL
    if kind == "blocks":
        if len(parts) < 2 or len(parts) > 3:
            raise ConfigError(f"expected blocks:<height>[:<cell>]: {spec!r}")
        try:
            height = float(parts[1])
            cell = float(parts[2]) if len(parts) == 3 else DEFAULT_BLOCK_CELL
        except ValueError as exc:
            raise ConfigError(f"bad terrain numbers in {spec!r}") from exc
        if height < 0 or cell <= 0:
            raise ConfigError(f"terrain sizes out of range in {spec!r}")
        return "blocks", height, cell
    raise ConfigError(f"unknown terrain kind {kind!r}")


_ROBOT_KEYS = ("trunk_mass", "trunk_inertia", "foot_mass", "tau_max",
               "k_work", "d_work", "gravity")
_GAIN_KEYS = ("kp", "kd", "kd_joint", "k_att")
_TPE_KEYS = ("gamma", "n_startup", "n_candidates", "bandwidth_floor")


@dataclass
class ExperimentConfig:
    jump_type: JumpType = JumpType.FORWARD
    iterations: int = 20
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    terrain: str = "flat"
    terrain_seed: int | None = None  # None: reuse the study seed for blocks
    f1: float = DEFAULT_F1
    jumps_per_episode: int = 1
    settle_duration: float = 1.0
    post_landing_wait: float = 1.0
    vmc_enabled: bool = True
    output_dir: str | None = None
    robot: dict = field(default_factory=dict)
    gains: dict = field(default_factory=dict)
    tpe: TpeConfig = field(default_factory=TpeConfig)

    def __post_init__(self):
        if isinstance(self.jump_type, str):
            try:
                self.jump_type = JumpType(self.jump_type)
            except ValueError as exc:
                raise ConfigError(f"unknown jump type {self.jump_type!r}") from exc
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        self.seeds = tuple(int(s) for s in self.seeds)
        if not self.seeds:
            raise ConfigError("at least one seed required")
        if not 0 < self.f1 <= 10.0:
            raise ConfigError(f"f1 out of range: {self.f1}")
        if self.jumps_per_episode < 1:
            raise ConfigError("jumps_per_episode must be >= 1")
        if self.settle_duration < 0 or self.post_landing_wait < 0:
            raise ConfigError("durations must be non-negative")
        parse_terrain_spec(self.terrain)  # validate eagerly
        for key in self.robot:
            if key not in _ROBOT_KEYS:
                raise ConfigError(f"unknown robot key {key!r}")
        for key in self.gains:
            if key not in _GAIN_KEYS:
                raise ConfigError(f"unknown gains key {key!r}")

    def build_model(self) -> RobotModel:
        overrides = dict(self.robot)
        for key in ("trunk_inertia",):
            if key in overrides:
                overrides[key] = tuple(overrides[key])
        try:
            return default_model(**overrides)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def build_gains(self) -> Gains:
        kw = dict(self.gains)
        for key in ("kp", "kd", "kd_joint"):
            if key in kw:
                v = kw[key]
                kw[key] = tuple(v) if hasattr(v, "__len__") else (float(v),) * 3
        try:
            return Gains(**kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def build_terrain(self, seed: int = 0) -> Terrain:
        kind, height, cell = parse_terrain_spec(self.terrain)
        if kind == "flat":
            return flat_terrain()
        tseed = self.terrain_seed if self.terrain_seed is not None else seed
        return make_block_terrain(height, cell=cell, seed=tseed)

    def to_dict(self) -> dict:
        d = {
            "jump_type": self.jump_type.value,
            "iterations": self.iterations,
            "seeds": list(self.seeds),
            "terrain": self.terrain,
            "f1": self.f1,
            "jumps_per_episode": self.jumps_per_episode,
            "settle_duration": self.settle_duration,
            "post_landing_wait": self.post_landing_wait,
            "vmc_enabled": self.vmc_enabled,
        }
        if self.terrain_seed is not None:
            d["terrain_seed"] = self.terrain_seed
        if self.output_dir is not None:
            d["output_dir"] = self.output_dir
        if self.robot:
            d["robot"] = dict(self.robot)
        if self.gains:
            d["gains"] = dict(self.gains)
        default_tpe = TpeConfig()
        tpe = {k: getattr(self.tpe, k) for k in _TPE_KEYS
               if getattr(self.tpe, k) != getattr(default_tpe, k)}
        if tpe:
            d["tpe"] = tpe
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        tpe_section = data.pop("tpe", {})
        if not isinstance(tpe_section, dict):
            raise ConfigError("tpe section must be a mapping")
        bad = set(tpe_section) - set(_TPE_KEYS)
        if bad:
            raise ConfigError(f"unknown tpe keys: {sorted(bad)}")
        try:
            data["tpe"] = TpeConfig(**tpe_section)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        data = {}
    return ExperimentConfig.from_dict(data)


def save_config(cfg: ExperimentConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)
