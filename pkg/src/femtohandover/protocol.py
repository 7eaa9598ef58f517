"""Abstract handover signaling between macrocell and femtocell.

Each direction is a fixed, ordered table of (sender, receiver, message)
hops per topology. Running an attempt walks its table, charging the per-hop
latency of each message, and stops early on an authorization failure, a
full FAP, or the call ending before the next message lands.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional

from .cac import Decision
from .entities import FemtoAccessPoint, MobileStation
from .errors import ContractViolation
from .geometry import Point2D


class Entity(str, enum.Enum):
    MS = "MS"
    NODE_B = "NodeB"
    RNC = "RNC"
    FGW = "FGW"
    FAP = "FAP"
    SGSN = "SGSN"


class TopologyKind(str, enum.Enum):
    CONCENTRATOR = "concentrator"
    DIRECT_RNC = "direct_rnc"


class Direction(str, enum.Enum):
    MACRO_TO_FEMTO = "M2F"
    FEMTO_TO_MACRO = "F2M"


class Phase(str, enum.Enum):
    PREPARATION = "preparation"
    EXECUTION = "execution"
    COMPLETE = "complete"
    FAILED = "failed"


class FailureReason(str, enum.Enum):
    UNAUTHORIZED = "unauthorized"
    NO_RESOURCES = "no_resources"
    CALL_ENDED = "call_ended"


class Message(NamedTuple):
    step: str
    sender: Entity
    receiver: Entity
    name: str

    @property
    def phase(self) -> Phase:
        return Phase.PREPARATION if self.step.startswith("P") else Phase.EXECUTION


_E = Entity

MACRO_TO_FEMTO: dict[TopologyKind, tuple[Message, ...]] = {
    TopologyKind.CONCENTRATOR: (
        Message("P1", _E.MS, _E.NODE_B, "MeasurementReport"),
        Message("P1", _E.NODE_B, _E.RNC, "MeasurementReport"),
        Message("P2", _E.RNC, _E.FGW, "HandoverRequest"),
        Message("P3", _E.FGW, _E.FAP, "ResourceReservationRequest"),
        Message("P3", _E.FAP, _E.FGW, "ResourceReservationAck"),
        Message("P3", _E.FGW, _E.RNC, "HandoverRequestAck"),
        Message("E1", _E.RNC, _E.NODE_B, "HandoverCommand"),
        Message("E1", _E.NODE_B, _E.MS, "HandoverCommand"),
        Message("E2", _E.MS, _E.FAP, "RrcReconfigurationComplete"),
        Message("E3", _E.RNC, _E.SGSN, "PathSwitchRequest"),
        Message("E3", _E.SGSN, _E.RNC, "PathSwitchAck"),
        Message("E4", _E.RNC, _E.NODE_B, "ResourceRelease"),
    ),
    TopologyKind.DIRECT_RNC: (
        Message("P1", _E.MS, _E.NODE_B, "MeasurementReport"),
        Message("P1", _E.NODE_B, _E.RNC, "MeasurementReport"),
        Message("P2", _E.RNC, _E.FAP, "HandoverRequest"),
        Message("P3", _E.FAP, _E.RNC, "HandoverRequestAck"),
        Message("E1", _E.RNC, _E.NODE_B, "HandoverCommand"),
        Message("E1", _E.NODE_B, _E.MS, "HandoverCommand"),
        Message("E2", _E.MS, _E.FAP, "RrcReconfigurationComplete"),
        Message("E3", _E.RNC, _E.SGSN, "PathSwitchRequest"),
        Message("E3", _E.SGSN, _E.RNC, "PathSwitchAck"),
        Message("E4", _E.RNC, _E.NODE_B, "ResourceRelease"),
    ),
}

# No authorization step and no interference report; the FAP owns RRC and
# releases its radio bearer locally once it has issued the command.
FEMTO_TO_MACRO: dict[TopologyKind, tuple[Message, ...]] = {
    TopologyKind.CONCENTRATOR: (
        Message("P1", _E.MS, _E.FAP, "MeasurementReport"),
        Message("P2", _E.FAP, _E.FGW, "RelocationRequired"),
        Message("P2", _E.FGW, _E.RNC, "RelocationRequired"),
        Message("P3", _E.RNC, _E.NODE_B, "RadioLinkSetup"),
        Message("E1", _E.RNC, _E.FGW, "RelocationCommand"),
        Message("E1", _E.FGW, _E.FAP, "RelocationCommand"),
        Message("E1", _E.FAP, _E.MS, "HandoverCommand"),
        Message("E2", _E.RNC, _E.SGSN, "PathSwitchRequest"),
    ),
    TopologyKind.DIRECT_RNC: (
        Message("P1", _E.MS, _E.FAP, "MeasurementReport"),
        Message("P2", _E.FAP, _E.RNC, "RelocationRequired"),
        Message("P3", _E.RNC, _E.NODE_B, "RadioLinkSetup"),
        Message("E1", _E.RNC, _E.FAP, "RelocationCommand"),
        Message("E1", _E.FAP, _E.MS, "HandoverCommand"),
        Message("E2", _E.RNC, _E.SGSN, "PathSwitchRequest"),
    ),
}


def _hops(kind: TopologyKind) -> set[frozenset]:
    hops = set()
    for table in (MACRO_TO_FEMTO[kind], FEMTO_TO_MACRO[kind]):
        hops.update(frozenset((m.sender, m.receiver)) for m in table)
    return hops


@dataclass(frozen=True)
class NetworkTopology:
    kind: TopologyKind
    latencies: Mapping[frozenset, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "kind", TopologyKind(self.kind))
        lat = {frozenset(k): float(v) for k, v in dict(self.latencies).items()}
        for pair, v in lat.items():
            if not v > 0:
                raise ValueError(f"latency for {sorted(pair)} must be > 0")
        missing = [sorted(p) for p in _hops(self.kind) if p not in lat]
        if missing:
            raise ValueError(f"{self.kind.value} topology missing hop latencies: {missing}")
        object.__setattr__(self, "latencies", lat)

    @classmethod
    def uniform(cls, kind, hop_latency_s: float = 0.010) -> "NetworkTopology":
        kind = TopologyKind(kind)
        return cls(kind, {p: hop_latency_s for p in _hops(kind)})

    @property
    def fgw_present(self) -> bool:
        return self.kind is TopologyKind.CONCENTRATOR

    def latency(self, a: Entity, b: Entity) -> float:
        return self.latencies[frozenset((a, b))]


@dataclass
class HandoverAttempt:
    direction: Direction
    ms_id: int
    fap_id: int
    topology: TopologyKind
    trigger_time: float
    admission_time: float
    phase: Phase = Phase.PREPARATION
    failure: Optional[FailureReason] = None
    completion_time: Optional[float] = None
    message_count: int = 0
    reached_execution: bool = False

    @property
    def complete(self) -> bool:
        return self.phase is Phase.COMPLETE

    @property
    def latency(self) -> Optional[float]:
        if self.completion_time is None:
            return None
        return self.completion_time - self.admission_time


def check_access(ms: MobileStation, fap: FemtoAccessPoint) -> bool:
    return fap.open_access or ms.id in fap.csg


def build_neighbor_list(ms: MobileStation, faps: Iterable[FemtoAccessPoint], topology: NetworkTopology,
                        scan_radius_m: float = 100.0, at: Optional[Point2D] = None) -> list[int]:
    """Allowed FAPs within scan range of the MS, nearest first, ties by id.

    The provisioning source differs by topology (FGW or RNC) but the content
    does not, so ``topology`` does not affect the result.
    """
    here = at if at is not None else ms.trajectory.origin
    allowed = []
    for fap in faps:
        if not check_access(ms, fap):
            continue
        d = here.distance(fap.center)
        if d <= scan_radius_m:
            allowed.append((d, fap.id))
    allowed.sort()
    return [fid for _, fid in allowed]


def _walk(attempt: HandoverAttempt, table, topology: NetworkTopology, call_end: Optional[float],
          checks: Mapping[int, FailureReason]) -> HandoverAttempt:
    """Deliver messages in order; ``checks`` maps a message index to the
    failure raised by the receiver after that message lands."""
    t = attempt.admission_time
    for i, msg in enumerate(table):
        arrival = t + topology.latency(msg.sender, msg.receiver)
        if call_end is not None and arrival > call_end:
            attempt.phase = Phase.FAILED
            attempt.failure = FailureReason.CALL_ENDED
            return attempt
        if msg.phase is Phase.EXECUTION:
            attempt.phase = Phase.EXECUTION
            attempt.reached_execution = True
        t = arrival
        attempt.message_count += 1
        if i in checks:
            attempt.phase = Phase.FAILED
            attempt.failure = checks[i]
            return attempt
    attempt.phase = Phase.COMPLETE
    attempt.completion_time = t
    return attempt


def run_macro_to_femto(ms: MobileStation, fap: FemtoAccessPoint, admission, decision: Decision,
                       topology: NetworkTopology, *, trigger_time: Optional[float] = None,
                       capacity_available: bool = True, call_end: Optional[float] = None) -> HandoverAttempt:
    """Drive one macro->femto attempt starting at the admitting measurement."""
    if decision is not Decision.ADMIT:
        raise ContractViolation(f"macro->femto handover requires CAC admit, got {decision.value}")
    t_adm = admission.time
    attempt = HandoverAttempt(Direction.MACRO_TO_FEMTO, ms.id, fap.id, topology.kind,
                              trigger_time=t_adm if trigger_time is None else min(trigger_time, t_adm),
                              admission_time=t_adm)
    table = MACRO_TO_FEMTO[topology.kind]
    checks = {}
    if not check_access(ms, fap):
        checks[_first_step(table, "P2")] = FailureReason.UNAUTHORIZED
    elif not capacity_available:
        checks[_first_step(table, "P3")] = FailureReason.NO_RESOURCES
    return _walk(attempt, table, topology, call_end, checks)


def run_femto_to_macro(ms: MobileStation, fap: FemtoAccessPoint, topology: NetworkTopology,
                       trigger_time: float, *, call_end: Optional[float] = None) -> HandoverAttempt:
    if ms.serving != fap.id:
        raise ContractViolation(f"MS {ms.id} is not served by FAP {fap.id}")
    attempt = HandoverAttempt(Direction.FEMTO_TO_MACRO, ms.id, fap.id, topology.kind,
                              trigger_time=trigger_time, admission_time=trigger_time)
    return _walk(attempt, FEMTO_TO_MACRO[topology.kind], topology, call_end, {})


def _first_step(table, step: str) -> int:
    return next(i for i, m in enumerate(table) if m.step == step)


def sequence_latency(table, topology: NetworkTopology) -> float:
    return math.fsum(topology.latency(m.sender, m.receiver) for m in table)

