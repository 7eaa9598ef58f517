"""Three-parameter admission gate for macro->femto handover.

A handover is admitted once the FAP signal has stayed at or above the
threshold level for at least the threshold time and the current Es/I0 is at
or above its floor. Any sample below the threshold level restarts the timer.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import ContractViolation
from .radio import Measurement

# Absorbs float error in sample timestamps built as start + k * interval.
TIME_EPS = 1e-9


class Decision(enum.Enum):
    PENDING = "pending"
    ADMIT = "admit"
    REJECT_INTERFERENCE = "reject:interference_below_floor"


@dataclass(frozen=True, slots=True)
class CacPolicy:
    rsl_threshold_dbm: float
    threshold_time_s: float
    es_io_floor_db: float = 0.0
    sampling_interval_s: float = 0.1

    def __post_init__(self):
        if not self.threshold_time_s >= 0:
            raise ValueError(f"threshold_time_s must be >= 0, got {self.threshold_time_s}")
        if not self.sampling_interval_s > 0:
            raise ValueError(f"sampling_interval_s must be > 0, got {self.sampling_interval_s}")
        if math.isnan(self.rsl_threshold_dbm) or math.isnan(self.es_io_floor_db):
            raise ValueError("thresholds must not be NaN")


@dataclass(frozen=True, slots=True)
class CacState:
    above_since: Optional[float] = None
    last_decision: Decision = Decision.PENDING
    last_time: Optional[float] = None


def update(state: CacState, m: Measurement, policy: CacPolicy) -> CacState:
    if state.last_time is not None and m.time < state.last_time:
        raise ContractViolation(f"measurement at t={m.time} arrived after t={state.last_time}")
    if state.last_decision is Decision.ADMIT:
        # admission is terminal; later samples only advance the clock
        return replace(state, last_time=m.time)
    if m.rsl_dbm < policy.rsl_threshold_dbm:
        return CacState(None, Decision.PENDING, m.time)
    since = m.time if state.above_since is None else state.above_since
    if m.time - since >= policy.threshold_time_s - TIME_EPS:
        if m.es_io_db >= policy.es_io_floor_db:
            return CacState(since, Decision.ADMIT, m.time)
        return CacState(since, Decision.REJECT_INTERFERENCE, m.time)
    return CacState(since, Decision.PENDING, m.time)


def admit_decision(state: CacState) -> Decision:
    return state.last_decision


def run_gate(measurements, policy: CacPolicy, state: CacState | None = None) -> tuple[CacState, Optional[Measurement]]:
    """Fold ``update`` over a trace, stopping at the first admission.

    Returns the final state and the admitting measurement (or None).
    """
    state = state or CacState()
    for m in measurements:
        state = update(state, m, policy)
        if state.last_decision is Decision.ADMIT:
            return state, m
    return state, None


def first_admission(times, rsl_dbm, es_io_db, policy: CacPolicy) -> Optional[int]:
    """Index of the admitting sample in a trace, or None.

    Array counterpart of folding :func:`update`; used by the simulator on
    long traces.
    """
    times = np.asarray(times, dtype=float)
    n = times.size
    if n == 0:
        return None
    if n > 1 and np.any(np.diff(times) < 0):
        raise ContractViolation("measurement times must be non-decreasing")
    above = np.asarray(rsl_dbm) >= policy.rsl_threshold_dbm
    idx = np.arange(n)
    # start index of the run of above-threshold samples containing each sample
    run_start = np.maximum.accumulate(np.where(above, 0, idx + 1))
    run_start = np.minimum(run_start, n - 1)
    elapsed = times - times[run_start]
    ok = above & (elapsed >= policy.threshold_time_s - TIME_EPS) & (np.asarray(es_io_db) >= policy.es_io_floor_db)
    hits = np.flatnonzero(ok)
    return int(hits[0]) if hits.size else None
