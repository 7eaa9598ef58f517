"""Macrocell/femtocell handover simulation with a threshold-time admission gate."""
from .cac import CacPolicy, CacState, Decision, admit_decision, first_admission, update
from .config import SimConfig, parse_config, serialize_config
from .geometry import Point2D, Trajectory, chord_length, dwell_time, intersect, position_at
from .metrics import Classification, HandoverRecord, aggregate, classify_handover
from .sim import RunLog, run, run_sweep

__version__ = "0.1.0"
