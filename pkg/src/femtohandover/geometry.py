"""Straight-line mobility through circular femtocell coverage.

All functions are pure. Times are seconds, lengths meters, headings radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

TWO_PI = 2.0 * math.pi


class Point2D(NamedTuple):
    x: float
    y: float

    def distance(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class Trajectory:
    origin: Point2D
    heading: float
    speed: float
    start_time: float = 0.0

    def __post_init__(self):
        if not (self.speed > 0 and math.isfinite(self.speed)):
            raise ValueError(f"speed must be positive, got {self.speed}")
        if self.start_time < 0:
            raise ValueError(f"start_time must be >= 0, got {self.start_time}")
        if not (math.isfinite(self.origin.x) and math.isfinite(self.origin.y)):
            raise ValueError("origin must be finite")
        object.__setattr__(self, "heading", self.heading % TWO_PI)

    @property
    def direction(self) -> tuple[float, float]:
        return math.cos(self.heading), math.sin(self.heading)


@dataclass(frozen=True, slots=True)
class CoverageCrossing:
    entry_time: float
    exit_time: float
    chord_offset: float
    chord_length: float

    @property
    def dwell(self) -> float:
        return self.exit_time - self.entry_time


def chord_length(offset: float, radius: float) -> float:
    """Length of the chord cut by a line passing ``offset`` from the center."""
    if offset < 0:
        raise ValueError(f"offset must be >= 0, got {offset}")
    if radius <= 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    if offset >= radius:
        return 0.0
    return 2.0 * math.sqrt(radius * radius - offset * offset)


def dwell_time(chord: float, speed: float) -> float:
    if speed <= 0:
        raise ValueError(f"speed must be > 0, got {speed}")
    if chord < 0:
        raise ValueError(f"chord must be >= 0, got {chord}")
    return chord / speed


def position_at(trajectory: Trajectory, t: float) -> Point2D:
    if t < trajectory.start_time:
        raise ValueError(f"t={t} precedes trajectory start {trajectory.start_time}")
    s = trajectory.speed * (t - trajectory.start_time)
    ux, uy = trajectory.direction
    return Point2D(trajectory.origin.x + s * ux, trajectory.origin.y + s * uy)


def intersect(trajectory: Trajectory, center: Point2D, radius: float) -> Optional[CoverageCrossing]:
    """Crossing of the trajectory ray with a circle, or None if it never enters.

    When the origin is already inside the circle the entry time is clamped to
    the trajectory start and ``chord_length`` is the remaining path inside.
    """
    if radius <= 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    ux, uy = trajectory.direction
    wx = trajectory.origin.x - center.x
    wy = trajectory.origin.y - center.y
    b = wx * ux + wy * uy
    c = wx * wx + wy * wy - radius * radius
    disc = b * b - c
    if disc < 0:
        return None
    root = math.sqrt(disc)
    s_exit = -b + root
    if s_exit < 0:
        return None
    s_entry = max(-b - root, 0.0)
    offset = min(abs(wx * uy - wy * ux), radius)
    v = trajectory.speed
    return CoverageCrossing(
        entry_time=trajectory.start_time + s_entry / v,
        exit_time=trajectory.start_time + s_exit / v,
        chord_offset=offset,
        chord_length=s_exit - s_entry,
    )
