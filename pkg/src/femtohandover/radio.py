"""Deterministic log-distance propagation and Es/I0 estimation.

Functions accept scalars or numpy arrays for distances so the simulator can
evaluate a whole measurement trace at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .geometry import Point2D, Trajectory


@dataclass(frozen=True, slots=True)
class PathLossModel:
    reference_loss_db: float = 37.0
    exponent: float = 3.0
    wall_loss_db: float = 0.0

    def __post_init__(self):
        if not self.exponent > 0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")
        if not self.reference_loss_db > 0:
            raise ValueError(f"reference_loss_db must be > 0, got {self.reference_loss_db}")
        if self.wall_loss_db < 0:
            raise ValueError(f"wall_loss_db must be >= 0, got {self.wall_loss_db}")


FEMTO_MODEL = PathLossModel(37.0, 3.0, 0.0)
MACRO_INDOOR_MODEL = PathLossModel(37.0, 3.5, 10.0)


class Contributor(NamedTuple):
    tx_dbm: float
    position: Point2D
    model: PathLossModel


@dataclass(frozen=True, slots=True)
class InterferenceField:
    contributors: tuple[Contributor, ...] = ()
    noise_floor_dbm: float = -104.0

    def __post_init__(self):
        object.__setattr__(self, "contributors", tuple(self.contributors))
        if math.isnan(self.noise_floor_dbm) or self.noise_floor_dbm == math.inf:
            raise ValueError("noise_floor_dbm must be finite or -inf")
        if not self.contributors and self.noise_floor_dbm == -math.inf:
            raise ValueError("interference field with no contributors and no noise is undefined")
        for c in self.contributors:
            if not math.isfinite(c.tx_dbm):
                raise ValueError("contributor power must be finite")


@dataclass(frozen=True, slots=True)
class Measurement:
    time: float
    rsl_dbm: float
    es_io_db: float


def received_power_dbm(tx_dbm, distance, model: PathLossModel):
    """Log-distance received power; distances under 1 m are clamped to 1 m."""
    d = np.maximum(np.asarray(distance, dtype=float), 1.0)
    rx = tx_dbm - model.reference_loss_db - 10.0 * model.exponent * np.log10(d) - model.wall_loss_db
    return float(rx) if np.ndim(rx) == 0 else rx


def range_for_level(tx_dbm: float, level_dbm: float, model: PathLossModel) -> float:
    """Largest distance at which the received power is still >= ``level_dbm``.

    Returns 0 when the level is unreachable even at the 1 m reference.
    """
    margin = tx_dbm - model.reference_loss_db - model.wall_loss_db - level_dbm
    if margin < 0:
        return 0.0
    return 10.0 ** (margin / (10.0 * model.exponent))


def dbm_to_mw(dbm):
    return np.power(10.0, np.asarray(dbm, dtype=float) / 10.0)


def mw_to_dbm(mw):
    return 10.0 * np.log10(mw)


def interference_mw(field: InterferenceField, xs, ys):
    """Total interference-plus-noise power (linear mW) at the given positions."""
    xs = np.asarray(xs, dtype=float)
    total = np.full(xs.shape, 10.0 ** (field.noise_floor_dbm / 10.0))
    for c in field.contributors:
        d = np.hypot(xs - c.position.x, np.asarray(ys, dtype=float) - c.position.y)
        total = total + dbm_to_mw(received_power_dbm(c.tx_dbm, d, c.model))
    return total


def es_io_db(serving_dbm, field: InterferenceField, at: Point2D):
    total = interference_mw(field, at.x, at.y)
    out = np.asarray(serving_dbm, dtype=float) - mw_to_dbm(total)
    return float(out) if np.ndim(out) == 0 else out


def measure(trajectory: Trajectory, center: Point2D, tx_dbm: float, field: InterferenceField,
            times, model: PathLossModel = FEMTO_MODEL):
    """Received level and Es/I0 from one FAP along a trajectory at ``times``.

    Returns ``(rsl_dbm, es_io_db)`` arrays aligned with ``times``.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times < trajectory.start_time):
        raise ValueError("sample times precede the trajectory start")
    ux, uy = trajectory.direction
    s = trajectory.speed * (times - trajectory.start_time)
    xs = trajectory.origin.x + s * ux
    ys = trajectory.origin.y + s * uy
    rsl = received_power_dbm(tx_dbm, np.hypot(xs - center.x, ys - center.y), model)
    rsl = np.atleast_1d(rsl)
    esio = rsl - mw_to_dbm(interference_mw(field, xs, ys))
    return rsl, np.atleast_1d(esio)


def sample_times(interval: float, window: Sequence[float]) -> np.ndarray:
    if interval <= 0:
        raise ValueError(f"interval must be > 0, got {interval}")
    t0, t1 = window
    if t1 < t0:
        raise ValueError(f"empty window [{t0}, {t1}]")
    n = int(math.floor((t1 - t0) / interval + 1e-9)) + 1
    return t0 + interval * np.arange(n)


def sample_measurements(trajectory: Trajectory, fap, field: InterferenceField, interval: float,
                        window: Sequence[float], model: PathLossModel = FEMTO_MODEL) -> list[Measurement]:
    times = sample_times(interval, window)
    rsl, esio = measure(trajectory, fap.center, fap.tx_dbm, field, times, model)
    return [Measurement(float(t), float(r), float(e)) for t, r, e in zip(times, rsl, esio)]
