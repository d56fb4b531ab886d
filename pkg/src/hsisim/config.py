"""Run configuration: one file describes one session end to end."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .hazards import HazardParams, KINDS
from .sagat import ConfigError, ScoringConfig
from .swarm import PsoParams
from .world import SpawnArea


@dataclass
class WorldConfig:
    width: int = 20
    height: int = 20
    cell_size: float = 1.0
    obstacle_fraction: float = 0.06
    spawn: SpawnArea = field(default_factory=SpawnArea)
    target_cell: tuple | None = None
    min_target_dist_frac: float = 0.5


@dataclass
class PauseConfig:
    windows: tuple = ((0.30, 0.45), (0.65, 0.80))
    min_gap_s: float = 20.0


@dataclass
class LoggingConfig:
    snapshot_every: int = 10
    metric_every: int = 10
    hash_every: int = 50


@dataclass
class OperatorConfig:
    policy: str = "passive"
    accuracy: float = 0.5
    delay_ticks: int = 10
    swipe_interval_ticks: int = 100
    respondent: str = "idk"          # idk | oracle | noisy
    respondent_accuracy: float | None = None   # noisy: defaults to accuracy


@dataclass
class SessionConfig:
    seed: int = 1
    participant_id: str = "p00"
    hazard_kind: str = "spr"
    attempt: str = "A1"
    task_order_index: int = 0
    task_duration_s: float = 300.0
    world: WorldConfig = field(default_factory=WorldConfig)
    swarm: PsoParams = field(default_factory=PsoParams)
    hazards: HazardParams = field(default_factory=HazardParams)
    alert_latency_ticks: int = 0
    swipe_radius: float = 3.0
    k_impulse: float | None = None
    pauses: PauseConfig = field(default_factory=PauseConfig)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    naq_mode: str = "prefix_mean"
    bank_path: str | None = None
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    operator: OperatorConfig = field(default_factory=OperatorConfig)
    # reseeds only the scripted operator's streams, so synthetic cohorts can
    # run many operators against one identical task realization
    operator_stream_seed: int | None = None

    def __post_init__(self):
        if self.task_duration_s <= 0:
            raise ConfigError("task_duration_s must be positive")
        if self.hazard_kind not in KINDS and self.hazard_kind != "none":
            raise ConfigError(f"unknown hazard_kind {self.hazard_kind!r}")
        if self.attempt not in ("A1", "A2"):
            raise ConfigError("attempt must be A1 or A2")
        if self.naq_mode not in ("prefix_mean", "boundary"):
            raise ConfigError(f"unknown naq_mode {self.naq_mode!r}")

    @property
    def duration_ticks(self) -> int:
        return int(round(self.task_duration_s / self.swarm.dt))

    def to_dict(self) -> dict:
        return asdict(self)


_SECTION_TYPES = {
    "world": WorldConfig,
    "swarm": PsoParams,
    "hazards": HazardParams,
    "pauses": PauseConfig,
    "scoring": ScoringConfig,
    "logging": LoggingConfig,
    "operator": OperatorConfig,
}


def _build_section(cls, data):
    if isinstance(data, cls):
        return data
    if cls is WorldConfig and "spawn" in data and isinstance(data["spawn"], dict):
        data = {**data, "spawn": SpawnArea(**data["spawn"])}
    if cls is WorldConfig and data.get("target_cell") is not None:
        data = {**data, "target_cell": tuple(data["target_cell"])}
    if cls is HazardParams and data.get("origin_cell") is not None:
        data = {**data, "origin_cell": tuple(data["origin_cell"])}
    if cls is PauseConfig and "windows" in data:
        data = {**data, "windows": tuple(tuple(w) for w in data["windows"])}
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad {cls.__name__} section: {exc}") from None


def config_from_dict(data: dict) -> SessionConfig:
    data = dict(data)
    kwargs = {}
    for key, value in data.items():
        if key in _SECTION_TYPES and isinstance(value, dict):
            kwargs[key] = _build_section(_SECTION_TYPES[key], value)
        else:
            kwargs[key] = value
    try:
        return SessionConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad session config: {exc}") from None


def load_config(path: str) -> SessionConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(data)
