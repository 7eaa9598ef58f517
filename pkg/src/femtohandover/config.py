"""Simulation configuration: defaults, validation, and YAML round-trip.

The config file is a flat YAML mapping. Every key is optional; omitted keys
take the defaults below (the reference mobility/traffic model plus the
calibrated radio and CAC settings documented in the README).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import yaml

from .cac import CacPolicy
from .errors import ConfigError
from .protocol import NetworkTopology, TopologyKind
from .radio import PathLossModel


@dataclass(frozen=True)
class SimConfig:
    # traffic and mobility
    fap_count: int = 100
    femto_radius_m: float = 10.0
    mean_speed_mps: float = 0.25
    min_speed_mps: float = 0.01
    mean_call_life_after_ho_s: float = 90.0
    offered_calls: int = 10_000
    call_spacing_s: float = 1.0
    lead_distance_m: float = 5.0
    csg_probability: float = 1.0
    # admission control
    rsl_threshold_dbm: float = -30.0
    threshold_time_s: float = 10.0
    es_io_floor_db: float = 0.0
    sampling_interval_s: float = 0.1
    exit_hysteresis_db: float = 30.0
    # network
    topology: str = "concentrator"
    hop_latency_s: float = 0.010
    fap_capacity: int = 4
    scan_radius_m: float = 100.0
    # radio
    fap_tx_dbm: float = 10.0
    femto_reference_loss_db: float = 37.0
    femto_exponent: float = 3.0
    femto_wall_loss_db: float = 0.0
    macro_tx_dbm: float = 43.0
    macro_reference_loss_db: float = 37.0
    macro_exponent: float = 3.5
    macro_wall_loss_db: float = 10.0
    noise_floor_dbm: float = -104.0
    interference_radius_m: float = 50.0
    # layout
    macro_radius_m: float = 500.0
    fap_min_distance_m: float = 30.0
    fap_min_separation_m: float = 20.0
    # classification windows
    return_window_s: float = 60.0
    terminate_window_s: float = 10.0
    seed: int = 1

    @property
    def cac(self) -> CacPolicy:
        return CacPolicy(self.rsl_threshold_dbm, self.threshold_time_s, self.es_io_floor_db,
                         self.sampling_interval_s)

    @property
    def network(self) -> NetworkTopology:
        return NetworkTopology.uniform(self.topology, self.hop_latency_s)

    @property
    def femto_model(self) -> PathLossModel:
        return PathLossModel(self.femto_reference_loss_db, self.femto_exponent, self.femto_wall_loss_db)

    @property
    def macro_model(self) -> PathLossModel:
        return PathLossModel(self.macro_reference_loss_db, self.macro_exponent, self.macro_wall_loss_db)

    def replace(self, **changes) -> "SimConfig":
        return replace(self, **changes)


_INT_FIELDS = {f.name for f in fields(SimConfig) if f.type in ("int", int)}
_POSITIVE = {
    "femto_radius_m", "mean_speed_mps", "min_speed_mps", "mean_call_life_after_ho_s",
    "call_spacing_s", "sampling_interval_s", "hop_latency_s", "scan_radius_m",
    "femto_reference_loss_db", "femto_exponent", "macro_reference_loss_db", "macro_exponent",
    "macro_radius_m", "return_window_s", "terminate_window_s",
}
_NON_NEGATIVE = {
    "lead_distance_m", "threshold_time_s", "exit_hysteresis_db", "femto_wall_loss_db",
    "macro_wall_loss_db", "interference_radius_m", "fap_min_distance_m", "fap_min_separation_m",
}
_AT_LEAST_ONE = {"fap_count", "offered_calls", "fap_capacity"}
# thresholds may be pushed to +-inf to disable a gate
_MAY_BE_INFINITE = {"rsl_threshold_dbm", "es_io_floor_db", "exit_hysteresis_db"}


def validate(cfg: SimConfig) -> list[str]:
    errors = []
    for f in fields(SimConfig):
        v = getattr(cfg, f.name)
        if f.name == "topology":
            if v not in {k.value for k in TopologyKind}:
                errors.append(f"topology: must be one of {sorted(k.value for k in TopologyKind)}, got {v!r}")
            continue
        if f.name in _INT_FIELDS:
            if isinstance(v, bool) or not isinstance(v, int):
                errors.append(f"{f.name}: must be an integer, got {v!r}")
                continue
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            errors.append(f"{f.name}: must be a number, got {v!r}")
            continue
        if isinstance(v, float) and math.isnan(v):
            errors.append(f"{f.name}: must not be NaN")
            continue
        if isinstance(v, float) and math.isinf(v) and f.name not in _MAY_BE_INFINITE:
            errors.append(f"{f.name}: must be finite, got {v}")
            continue
        if f.name in _POSITIVE and not v > 0:
            errors.append(f"{f.name}: must be > 0, got {v}")
        if f.name in _NON_NEGATIVE and not v >= 0:
            errors.append(f"{f.name}: must be >= 0, got {v}")
        if f.name in _AT_LEAST_ONE and not v >= 1:
            errors.append(f"{f.name}: must be >= 1, got {v}")
    if isinstance(cfg.csg_probability, (int, float)) and not 0 <= cfg.csg_probability <= 1:
        errors.append(f"csg_probability: must be in [0, 1], got {cfg.csg_probability}")
    if isinstance(cfg.seed, int) and not 0 <= cfg.seed < 2 ** 64:
        errors.append(f"seed: must be a 64-bit unsigned integer, got {cfg.seed}")
    if not errors and cfg.fap_min_distance_m >= cfg.macro_radius_m:
        errors.append("fap_min_distance_m: must be below macro_radius_m")
    return errors


def checked(cfg: SimConfig) -> SimConfig:
    errors = validate(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def from_mapping(data) -> SimConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError([f"config must be a key/value mapping, got {type(data).__name__}"])
    known = {f.name: f for f in fields(SimConfig)}
    errors = [f"{k}: unknown key" for k in data if k not in known]
    values = {}
    for k, v in data.items():
        if k not in known:
            continue
        # YAML reads 10 as int; float fields accept it
        if k not in _INT_FIELDS and k != "topology" and isinstance(v, int) and not isinstance(v, bool):
            v = float(v)
        values[k] = v
    cfg = SimConfig(**values)
    errors += validate(cfg)
    if errors:
        raise ConfigError(errors)
    return cfg


def parse_config(text: str) -> SimConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"malformed config: {exc}"]) from None
    return from_mapping(data)


def load_config(path) -> SimConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg: SimConfig) -> str:
    return yaml.safe_dump(asdict(cfg), sort_keys=False)
