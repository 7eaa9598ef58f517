"""Handover classification and per-FAP aggregation."""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, fields
from typing import Iterable, Optional, Sequence

from .errors import ContractViolation


class Classification(str, enum.Enum):
    NECESSARY = "necessary"
    UNNECESSARY_RETURN = "unnecessary_return"
    UNNECESSARY_SHORT_CALL = "unnecessary_short_call"
    BLOCKED = "blocked"


UNNECESSARY = (Classification.UNNECESSARY_RETURN, Classification.UNNECESSARY_SHORT_CALL)


@dataclass
class HandoverRecord:
    call_id: int
    fap_id: int
    admission_time: float
    leave_time: Optional[float] = None
    terminate_time: Optional[float] = None
    blocked: bool = False
    classification: Optional[Classification] = None

    @property
    def completed(self) -> bool:
        return self.blocked or (self.leave_time is None) != (self.terminate_time is None)


def classify_handover(rec: HandoverRecord, return_window_s: float = 60.0,
                      terminate_window_s: float = 10.0) -> Classification:
    """Strict inequalities: a stay of exactly the window length is necessary."""
    if rec.blocked:
        return Classification.BLOCKED
    if not rec.completed:
        raise ContractViolation(f"handover record for call {rec.call_id} is not completed")
    if rec.leave_time is not None:
        if rec.leave_time - rec.admission_time < return_window_s:
            return Classification.UNNECESSARY_RETURN
        return Classification.NECESSARY
    if rec.terminate_time - rec.admission_time < terminate_window_s:
        return Classification.UNNECESSARY_SHORT_CALL
    return Classification.NECESSARY


@dataclass(frozen=True)
class SweepRow:
    threshold_time_s: float
    handovers_per_fap: float
    unnecessary_fraction: Optional[float]
    unnecessary_stderr: Optional[float] = None
    blocked_fraction: float = 0.0


CSV_COLUMNS = [f.name for f in fields(SweepRow)]


def class_counts(records: Iterable[HandoverRecord]) -> dict[Classification, int]:
    counts = {c: 0 for c in Classification}
    for rec in records:
        counts[rec.classification] += 1
    return counts


def _row_from_counts(T, counts, fap_count, include_blocked) -> SweepRow:
    blocked = counts[Classification.BLOCKED]
    admitted = sum(counts.values()) - blocked
    unnecessary = sum(counts[c] for c in UNNECESSARY)
    denom = admitted + blocked if include_blocked else admitted
    attempts = admitted + blocked
    return SweepRow(
        threshold_time_s=T,
        handovers_per_fap=admitted / fap_count,
        unnecessary_fraction=unnecessary / denom if denom else None,
        blocked_fraction=blocked / attempts if attempts else 0.0,
    )


def aggregate(logs: Sequence, fap_count: int, include_blocked: bool = False) -> SweepRow:
    """Pool the handover records of ``logs`` into one summary row.

    ``handovers_per_fap`` is total admitted (non-blocked) handovers divided by
    ``fap_count``; blocked attempts are left out of the unnecessary-fraction
    denominator unless ``include_blocked``.
    """
    if not logs:
        raise ValueError("aggregate needs at least one run log")
    if fap_count < 1:
        raise ValueError("fap_count must be >= 1")
    Ts = {log.config.threshold_time_s for log in logs}
    if len(Ts) != 1:
        raise ValueError(f"logs mix threshold times {sorted(Ts)}")
    counts = {c: 0 for c in Classification}
    for log in logs:
        for c, n in class_counts(log.records).items():
            counts[c] += n
    return _row_from_counts(Ts.pop(), counts, fap_count, include_blocked)


def per_fap_handovers(log, fap_count: int) -> list[int]:
    counts = [0] * fap_count
    for rec in log.records:
        if not rec.blocked:
            counts[rec.fap_id] += 1
    return counts


def mean_over_seeds(rows: Sequence[SweepRow]) -> SweepRow:
    """Average per-seed rows for one threshold time; stderr is across seeds."""
    if not rows:
        raise ValueError("no rows to average")
    fr = [r.unnecessary_fraction for r in rows if r.unnecessary_fraction is not None]
    mean_fr = math.fsum(fr) / len(fr) if fr else None
    stderr = None
    if len(fr) > 1:
        var = math.fsum((x - mean_fr) ** 2 for x in fr) / (len(fr) - 1)
        stderr = math.sqrt(var / len(fr))
    return SweepRow(
        threshold_time_s=rows[0].threshold_time_s,
        handovers_per_fap=math.fsum(r.handovers_per_fap for r in rows) / len(rows),
        unnecessary_fraction=mean_fr,
        unnecessary_stderr=stderr,
        blocked_fraction=math.fsum(r.blocked_fraction for r in rows) / len(rows),
    )


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def sweep_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(rows, key=lambda r: r.threshold_time_s):
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def sweep_from_csv(text: str) -> list[SweepRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    rows = []
    for rec in reader:
        vals = {k: (float(v) if v != "" else None) for k, v in rec.items()}
        rows.append(SweepRow(**vals))
    return rows


def format_table(rows: Iterable[SweepRow]) -> str:
    header = f"{'T (s)':>7}  {'HO/FAP':>9}  {'unnecessary':>11}  {'stderr':>8}  {'blocked':>8}"
    lines = [header, "-" * len(header)]
    for r in sorted(rows, key=lambda r: r.threshold_time_s):
        fr = "n/a" if r.unnecessary_fraction is None else f"{r.unnecessary_fraction:.4f}"
        se = "n/a" if r.unnecessary_stderr is None else f"{r.unnecessary_stderr:.4f}"
        lines.append(f"{r.threshold_time_s:>7g}  {r.handovers_per_fap:>9.3f}  {fr:>11}  {se:>8}  {r.blocked_fraction:>8.4f}")
    return "\n".join(lines)
