"""Command-line entry point: ``femtohandover {run,sweep,validate}``."""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import metrics, sim
from .config import SimConfig, checked, load_config
from .errors import ConfigError

log = logging.getLogger("femtohandover")


def parse_float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def parse_seeds(text: str) -> list[int]:
    """``"1..20"`` (inclusive range) or ``"3,7,11"``."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        seeds = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}; use A..B or a,b,c") from None
    if not seeds:
        raise argparse.ArgumentTypeError("expected at least one seed")
    return seeds


def _load(path) -> SimConfig:
    return load_config(path) if path else SimConfig()


def seed_rows(config: SimConfig, threshold_times, seed: int, include_blocked: bool) -> list[metrics.SweepRow]:
    logs = sim.run_sweep(config, threshold_times, [seed])
    return [metrics.aggregate([logs[(float(T), seed)]], config.fap_count, include_blocked)
            for T in threshold_times]


def sweep_summary(config: SimConfig, threshold_times, seeds, include_blocked=False, jobs=1) -> list[metrics.SweepRow]:
    """One row per threshold time, averaged over seeds (merge order: T, then seed)."""
    threshold_times = sorted(float(T) for T in threshold_times)
    args = [(config, threshold_times, s, include_blocked) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(seed_rows, *zip(*args)))
    else:
        per_seed = [seed_rows(*a) for a in args]
    return [metrics.mean_over_seeds([rows[i] for rows in per_seed]) for i in range(len(threshold_times))]


def write_records(path: Path, log_: sim.RunLog):
    lines = ["call_id\tfap_id\tadmission_time\tleave_time\tterminate_time\tclassification"]
    for r in log_.records:
        leave = "" if r.leave_time is None else f"{r.leave_time:.6f}"
        term = "" if r.terminate_time is None else f"{r.terminate_time:.6f}"
        lines.append(f"{r.call_id}\t{r.fap_id}\t{r.admission_time:.6f}\t{leave}\t{term}\t{r.classification.value}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_run(args) -> int:
    cfg = _load(args.config)
    if args.seed is not None:
        cfg = checked(cfg.replace(seed=args.seed))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    run_log = sim.run(cfg)
    row = metrics.aggregate([run_log], cfg.fap_count, args.include_blocked)
    (out / "runlog.tsv").write_text(run_log.to_tsv(), encoding="utf-8")
    (out / "sweep.csv").write_text(metrics.sweep_to_csv([row]), encoding="utf-8")
    write_records(out / "handovers.tsv", run_log)
    print(metrics.format_table([row]))
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args.config)
    if args.calls is not None:
        cfg = checked(cfg.replace(offered_calls=args.calls))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("sweeping T=%s over %d seeds", args.threshold_times, len(args.seeds))
    rows = sweep_summary(cfg, args.threshold_times, args.seeds, args.include_blocked, args.jobs)
    (out / "sweep.csv").write_text(metrics.sweep_to_csv(rows), encoding="utf-8")
    print(metrics.format_table(rows))
    return 0


def cmd_validate(args) -> int:
    load_config(args.config)
    print(f"{args.config}: ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="femtohandover",
                                description="Macrocell/femtocell handover simulator with threshold-time CAC.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="single seeded run: runlog.tsv, handovers.tsv, sweep.csv")
    r.add_argument("--config", help="YAML config (defaults when omitted)")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", required=True)
    r.add_argument("--include-blocked", action="store_true",
                   help="count blocked handovers in the unnecessary-fraction denominator")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="threshold-time sweep averaged over seeds: sweep.csv")
    s.add_argument("--config")
    s.add_argument("--threshold-times", type=parse_float_list, default=[0.0, 10.0, 20.0])
    s.add_argument("--seeds", type=parse_seeds, default=parse_seeds("1..20"))
    s.add_argument("--calls", type=int, help="override offered_calls")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.add_argument("--include-blocked", action="store_true")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", help="check a config file")
    v.add_argument("--config", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        for v in exc.violations:
            print(f"config error: {v}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
