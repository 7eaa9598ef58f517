"""Seeded discrete-event simulation of macro/femto handover.

One run places the FAPs, draws every offered call up front (so runs that
differ only in CAC settings see identical calls), then replays the calls
through a single time-ordered event queue. Measurement samples are
evaluated in bulk per call rather than queued one by one; only state
changes (admission, handover completion, coverage exit, call end) become
events.
"""
from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import protocol
from .cac import Decision, first_admission
from .config import SimConfig, checked
from .entities import MACRO, FemtoAccessPoint, MobileStation
from .errors import ContractViolation
from .geometry import TWO_PI, Point2D, Trajectory, chord_length, intersect
from .metrics import HandoverRecord, classify_handover
from .protocol import FailureReason, HandoverAttempt
from .radio import Contributor, InterferenceField, Measurement, measure, range_for_level

# per-call uniform draws, in this column order
DRAW_COLUMNS = ("speed", "lifetime", "offset", "fap", "heading", "side", "csg")

_MAX_LAYOUT_TRIES = 100_000


class EventKind(str, enum.Enum):
    CALL_START = "CallStart"
    CAC_ADMIT = "CacAdmit"
    HO_BLOCKED = "HoBlocked"
    HO_FAILED = "HoFailed"
    HO_COMPLETE = "HoComplete"
    COVERAGE_EXIT = "CoverageExit"
    CALL_END = "CallEnd"


@dataclass(frozen=True, slots=True)
class Event:
    time: float
    ordinal: int
    kind: EventKind
    call_id: int
    fap_id: int = -1
    detail: str = ""

    def to_tsv(self) -> str:
        return f"{self.time:.6f}\t{self.ordinal}\t{self.kind.value}\t{self.call_id}\t{self.fap_id}\t{self.detail}"


RUNLOG_COLUMNS = ("time", "ordinal", "kind", "call_id", "fap_id", "detail")


class EventQueue:
    """Min-queue on (time, ordinal); ordinals follow insertion order."""

    def __init__(self):
        self._heap = []
        self._ordinal = itertools.count()
        self.now = 0.0

    def __len__(self):
        return len(self._heap)

    def schedule(self, time: float, kind: EventKind, call_id: int, fap_id: int = -1, detail: str = "") -> Event:
        if time < self.now:
            raise ContractViolation(f"cannot schedule {kind.value} at t={time} before now={self.now}")
        ev = Event(time, next(self._ordinal), kind, call_id, fap_id, detail)
        heapq.heappush(self._heap, (time, ev.ordinal, ev))
        return ev

    def stamp(self, time: float, kind: EventKind, call_id: int, fap_id: int = -1, detail: str = "") -> Event:
        """An event that happens now and is logged without being queued."""
        return Event(time, next(self._ordinal), kind, call_id, fap_id, detail)

    def next_event(self) -> Optional[Event]:
        """Pop the earliest event, or None when the queue is exhausted."""
        if not self._heap:
            return None
        _, _, ev = heapq.heappop(self._heap)
        self.now = ev.time
        return ev


@dataclass
class RunLog:
    config: SimConfig
    faps: list[FemtoAccessPoint]
    events: list[Event] = field(default_factory=list)
    records: list[HandoverRecord] = field(default_factory=list)
    attempts: list[HandoverAttempt] = field(default_factory=list)

    def to_tsv(self) -> str:
        lines = ["\t".join(RUNLOG_COLUMNS)]
        lines.extend(ev.to_tsv() for ev in self.events)
        return "\n".join(lines) + "\n"


def rng_streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent PCG64 streams for the FAP layout and the call draws."""
    layout, calls = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(layout)), np.random.Generator(np.random.PCG64(calls))


def place_faps(config: SimConfig, rng: np.random.Generator) -> list[Point2D]:
    """FAP centers uniform over the macrocell annulus, rejecting overlaps."""
    centers: list[Point2D] = []
    rmin2, rmax2 = config.fap_min_distance_m ** 2, config.macro_radius_m ** 2
    sep = config.fap_min_separation_m
    for _ in range(_MAX_LAYOUT_TRIES):
        if len(centers) == config.fap_count:
            return centers
        r = math.sqrt(rmin2 + (rmax2 - rmin2) * rng.random())
        a = TWO_PI * rng.random()
        p = Point2D(r * math.cos(a), r * math.sin(a))
        if all(p.distance(q) >= sep for q in centers):
            centers.append(p)
    raise ValueError(f"could not place {config.fap_count} FAPs {sep} m apart in the macrocell")


def interference_fields(config: SimConfig, centers: list[Point2D]) -> list[InterferenceField]:
    """Macro downlink plus co-channel FAPs within the interference radius."""
    macro = Contributor(config.macro_tx_dbm, Point2D(0.0, 0.0), config.macro_model)
    out = []
    for i, c in enumerate(centers):
        contribs = [macro]
        contribs += [Contributor(config.fap_tx_dbm, q, config.femto_model)
                     for j, q in enumerate(centers)
                     if j != i and c.distance(q) <= config.interference_radius_m]
        out.append(InterferenceField(tuple(contribs), config.noise_floor_dbm))
    return out


def call_from_draws(row, call_id: int, config: SimConfig, centers: list[Point2D]) -> tuple[MobileStation, int]:
    """Build one MS from its seven uniforms (see DRAW_COLUMNS)."""
    u_speed, u_life, u_offset, u_fap, u_heading, u_side, u_csg = (float(x) for x in row)
    # clamp, not resample: lifts the mean by under 0.1% at the defaults
    speed = max(-config.mean_speed_mps * math.log1p(-u_speed), config.min_speed_mps)
    life = -config.mean_call_life_after_ho_s * math.log1p(-u_life)
    radius = config.femto_radius_m
    offset = radius * u_offset
    fap_id = min(int(u_fap * config.fap_count), config.fap_count - 1)
    heading = TWO_PI * u_heading
    side = 1.0 if u_side < 0.5 else -1.0
    member = u_csg < config.csg_probability

    c = centers[fap_id]
    ux, uy = math.cos(heading), math.sin(heading)
    half = chord_length(offset, radius) / 2.0
    back = half + config.lead_distance_m
    origin = Point2D(c.x - side * offset * uy - back * ux, c.y + side * offset * ux - back * uy)
    traj = Trajectory(origin, heading, speed, call_id * config.call_spacing_s)
    ms = MobileStation(call_id, traj, life, frozenset({fap_id}) if member else frozenset())
    return ms, fap_id


def generate_call(rng: np.random.Generator, config: SimConfig, centers: list[Point2D],
                  call_id: int = 0) -> tuple[MobileStation, int]:
    return call_from_draws(rng.random(len(DRAW_COLUMNS)), call_id, config, centers)


def draw_calls(rng: np.random.Generator, config: SimConfig) -> np.ndarray:
    # row-major fill: identical to drawing each call's row in turn
    return rng.random((config.offered_calls, len(DRAW_COLUMNS)))


@dataclass
class _Call:
    ms: MobileStation
    fap: FemtoAccessPoint
    record: Optional[HandoverRecord] = None
    holds_slot: bool = False
    ended: bool = False


@dataclass(frozen=True)
class Scenario:
    """Everything a run draws from its seed: FAP layout and offered calls.

    Independent of the CAC and protocol settings, so a threshold-time sweep
    can build it once per seed.
    """
    faps: tuple[FemtoAccessPoint, ...]
    fields: tuple[InterferenceField, ...]
    stations: tuple[tuple[MobileStation, int], ...]


def build_scenario(config: SimConfig) -> Scenario:
    layout_rng, call_rng = rng_streams(config.seed)
    centers = place_faps(config, layout_rng)
    draws = draw_calls(call_rng, config)
    stations = [call_from_draws(row, i, config, centers) for i, row in enumerate(draws.tolist())]
    members = [set() for _ in centers]
    for ms, _ in stations:
        for f in ms.csg_memberships:
            members[f].add(ms.id)
    faps = tuple(FemtoAccessPoint(i, c, config.femto_radius_m, config.fap_tx_dbm, frozenset(members[i]))
                 for i, c in enumerate(centers))
    return Scenario(faps, tuple(interference_fields(config, centers)), tuple(stations))


class _Engine:
    def __init__(self, config: SimConfig, scenario: Scenario):
        self.cfg = config
        self.policy = config.cac
        self.topology = config.network
        self.femto_model = config.femto_model
        self.faps = list(scenario.faps)
        self.fields = scenario.fields
        # fresh MS objects: the engine mutates serving cell and call end
        self.calls = [_Call(MobileStation(ms.id, ms.trajectory, ms.residual_life_s, ms.csg_memberships),
                            self.faps[f])
                      for ms, f in scenario.stations]
        self.occupancy = [0] * len(self.faps)
        self.queue = EventQueue()
        self.log = RunLog(config, self.faps)
        self.r_thr = range_for_level(config.fap_tx_dbm, config.rsl_threshold_dbm, self.femto_model)
        self.r_exit = range_for_level(config.fap_tx_dbm, config.rsl_threshold_dbm - config.exit_hysteresis_db,
                                      self.femto_model)
        self._pending = {}

    # -- helpers ---------------------------------------------------------
    def _emit(self, ev: Event):
        self.log.events.append(ev)

    def _grid_time(self, traj: Trajectory, k: int) -> float:
        return traj.start_time + k * self.policy.sampling_interval_s

    def _threshold_window(self, traj: Trajectory, center: Point2D):
        if self.r_thr <= 0:
            return None
        if math.isinf(self.r_thr):
            return traj.start_time, math.inf
        crossing = intersect(traj, center, self.r_thr)
        return None if crossing is None else (crossing.entry_time, crossing.exit_time)

    def _trace(self, call: _Call, k0: int, k1: int):
        traj = call.ms.trajectory
        times = traj.start_time + self.policy.sampling_interval_s * np.arange(k0, k1 + 1)
        rsl, esio = measure(traj, call.fap.center, call.fap.tx_dbm, self.fields[call.fap.id], times,
                            self.femto_model)
        return times, rsl, esio

    def _plan_call(self, call: _Call, admissible: bool):
        """Anchor the call end and find the CAC admission sample, if any."""
        traj = call.ms.trajectory
        dt = self.policy.sampling_interval_s
        thr = self.policy.rsl_threshold_dbm
        window = self._threshold_window(traj, call.fap.center)
        life = call.ms.residual_life_s
        anchor = None
        if window is not None:
            k0 = max(0, math.ceil((window[0] - traj.start_time) / dt) - 1)
            # the anchor sits within a sample of the window entry, so the
            # call cannot outlive entry + life + 2 samples
            horizon = min(window[1], window[0] + life + 2 * dt)
            k1 = max(math.ceil((horizon - traj.start_time) / dt) + 1, k0 + 2)
            times, rsl, esio = self._trace(call, k0, k1)
            above = np.flatnonzero(rsl >= thr)
            if above.size:
                anchor = float(times[above[0]])
        if anchor is None:
            cov = intersect(traj, call.fap.center, call.fap.radius)
            anchor = traj.start_time if cov is None else 0.5 * (cov.entry_time + cov.exit_time)
        call_end = anchor + life
        if call_end <= traj.start_time:
            call_end = math.nextafter(traj.start_time, math.inf)
        call.ms.call_end_time = call_end
        if window is None or not admissible:
            return call_end, None
        if times[-1] < min(window[1], call_end):
            k1 = math.ceil((min(window[1], call_end) - traj.start_time) / dt) + 1
            times, rsl, esio = self._trace(call, k0, k1)
        live = times < call_end
        idx = first_admission(times[live], rsl[live], esio[live], self.policy)
        if idx is None:
            return call_end, None
        # the timer started at the first sample of the admitting run
        j = idx
        while j > 0 and rsl[j - 1] >= thr:
            j -= 1
        return call_end, (Measurement(float(times[idx]), float(rsl[idx]), float(esio[idx])), float(times[j]))

    def _leave_trigger(self, call: _Call, now: float) -> float:
        traj = call.ms.trajectory
        center = call.fap.center
        exits = []
        cov = intersect(traj, center, call.fap.radius)
        exits.append(now if cov is None else cov.exit_time)
        if self.r_exit <= 0:
            exits.append(now)
        elif math.isfinite(self.r_exit):
            sig = intersect(traj, center, self.r_exit)
            exits.append(now if sig is None else sig.exit_time)
        dt = self.policy.sampling_interval_s
        k = math.ceil((min(exits) - traj.start_time) / dt - 1e-9)
        return max(self._grid_time(traj, k), now)

    def _finish(self, rec: HandoverRecord):
        rec.classification = classify_handover(rec, self.cfg.return_window_s, self.cfg.terminate_window_s)

    # -- event handlers ----------------------------------------------------
    def on_call_start(self, ev: Event):
        call = self.calls[ev.call_id]
        ms = call.ms
        candidates = [self.faps[f] for f in sorted(ms.csg_memberships)]
        neighbors = protocol.build_neighbor_list(ms, candidates, self.topology, self.cfg.scan_radius_m)
        call_end, admission = self._plan_call(call, call.fap.id in neighbors)
        self._emit(ev)
        self.queue.schedule(call_end, EventKind.CALL_END, ms.id, call.fap.id)
        if admission is not None:
            m, since = admission
            self._pending[ms.id] = admission
            self.queue.schedule(m.time, EventKind.CAC_ADMIT, ms.id, call.fap.id, f"since={since:.6f}")

    def on_cac_admit(self, ev: Event):
        call = self.calls[ev.call_id]
        m, since = self._pending.pop(ev.call_id)
        self._emit(ev)
        fap = call.fap
        attempt = protocol.run_macro_to_femto(
            call.ms, fap, m, Decision.ADMIT, self.topology, trigger_time=since,
            capacity_available=self.occupancy[fap.id] < self.cfg.fap_capacity,
            call_end=call.ms.call_end_time)
        self.log.attempts.append(attempt)
        rec = HandoverRecord(call.ms.id, fap.id, m.time)
        if attempt.failure is FailureReason.UNAUTHORIZED:
            self._emit(self.queue.stamp(ev.time, EventKind.HO_FAILED, ev.call_id, fap.id,
                                           f"dir=M2F reason={attempt.failure.value}"))
            return
        call.record = rec
        self.log.records.append(rec)
        if attempt.failure is FailureReason.NO_RESOURCES:
            rec.blocked = True
            self._finish(rec)
            self._emit(self.queue.stamp(ev.time, EventKind.HO_BLOCKED, ev.call_id, fap.id,
                                           f"msgs={attempt.message_count}"))
            return
        if attempt.failure is FailureReason.CALL_ENDED:
            return  # the pending CallEnd records the termination
        self.occupancy[fap.id] += 1
        call.holds_slot = True
        self.queue.schedule(attempt.completion_time, EventKind.HO_COMPLETE, ev.call_id, fap.id,
                            f"dir=M2F msgs={attempt.message_count}")

    def on_ho_complete(self, ev: Event):
        call = self.calls[ev.call_id]
        self._emit(ev)
        if ev.detail.startswith("dir=M2F"):
            call.ms.serving = call.fap.id
            t_leave = self._leave_trigger(call, ev.time)
            if t_leave < call.ms.call_end_time:
                self.queue.schedule(t_leave, EventKind.COVERAGE_EXIT, ev.call_id, call.fap.id)
        else:
            call.ms.serving = MACRO
            self._release(call)
            call.record.leave_time = ev.time
            self._finish(call.record)

    def on_coverage_exit(self, ev: Event):
        call = self.calls[ev.call_id]
        self._emit(ev)
        attempt = protocol.run_femto_to_macro(call.ms, call.fap, self.topology, ev.time,
                                              call_end=call.ms.call_end_time)
        self.log.attempts.append(attempt)
        if attempt.complete:
            self.queue.schedule(attempt.completion_time, EventKind.HO_COMPLETE, ev.call_id, call.fap.id,
                                f"dir=F2M msgs={attempt.message_count}")

    def on_call_end(self, ev: Event):
        call = self.calls[ev.call_id]
        call.ended = True
        rec = call.record
        where = "femto" if call.ms.in_femto else "macro"
        if rec is not None and not rec.blocked and rec.leave_time is None:
            rec.terminate_time = ev.time
            self._finish(rec)
            where = "femto" if call.holds_slot else "macro"
        self._release(call)
        self._emit(Event(ev.time, ev.ordinal, ev.kind, ev.call_id, ev.fap_id, f"in={where}"))

    def _release(self, call: _Call):
        if call.holds_slot:
            self.occupancy[call.fap.id] -= 1
            call.holds_slot = False

    def run(self) -> RunLog:
        for call in self.calls:
            self.queue.schedule(call.ms.trajectory.start_time, EventKind.CALL_START, call.ms.id, call.fap.id)
        handlers = {
            EventKind.CALL_START: self.on_call_start,
            EventKind.CAC_ADMIT: self.on_cac_admit,
            EventKind.HO_COMPLETE: self.on_ho_complete,
            EventKind.COVERAGE_EXIT: self.on_coverage_exit,
            EventKind.CALL_END: self.on_call_end,
        }
        while (ev := self.queue.next_event()) is not None:
            if self.calls[ev.call_id].ended:
                continue
            handlers[ev.kind](ev)
        return self.log


def run(config: SimConfig, scenario: Optional[Scenario] = None) -> RunLog:
    """Simulate every offered call of ``config``; deterministic in the seed."""
    config = checked(config)
    return _Engine(config, scenario or build_scenario(config)).run()


def run_sweep(config: SimConfig, threshold_times, seeds) -> dict[tuple[float, int], RunLog]:
    """Runs for every (T, seed) pair. Equal seeds share all call draws."""
    out = {}
    for s in seeds:
        base = checked(config.replace(seed=int(s)))
        scenario = build_scenario(base)
        for T in threshold_times:
            out[(float(T), int(s))] = run(base.replace(threshold_time_s=float(T)), scenario)
    return dict(sorted(out.items()))
