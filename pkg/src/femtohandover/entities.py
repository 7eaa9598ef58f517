from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .geometry import Point2D, Trajectory

MACRO = None  # MobileStation.serving value while attached to the macrocell


@dataclass(frozen=True)
class FemtoAccessPoint:
    id: int
    center: Point2D
    radius: float = 10.0
    tx_dbm: float = 10.0
    csg: frozenset = frozenset()
    open_access: bool = False

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"FAP {self.id}: radius must be > 0")
        object.__setattr__(self, "csg", frozenset(self.csg))


@dataclass
class MobileStation:
    id: int
    trajectory: Trajectory
    residual_life_s: float
    csg_memberships: frozenset = field(default_factory=frozenset)
    call_end_time: Optional[float] = None
    serving: Optional[int] = MACRO  # FAP id while femto-served

    @property
    def in_femto(self) -> bool:
        return self.serving is not MACRO
