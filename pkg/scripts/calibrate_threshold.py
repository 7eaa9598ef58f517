"""Scan rsl_threshold_dbm and report the unnecessary fraction at each T.

This is how the shipped default threshold was picked: the deepest threshold
that puts the T=0 baseline inside its band while T=10 and T=20 also land in
theirs. Usage:

    python3 scripts/calibrate_threshold.py --thresholds=-28,-30,-35,-40 --seeds 1..5
"""
import argparse

from femtohandover.cli import parse_float_list, parse_seeds, sweep_summary
from femtohandover.config import SimConfig, load_config


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--config")
    p.add_argument("--thresholds", type=parse_float_list, default=[-28.0, -30.0, -35.0, -40.0, -50.0])
    p.add_argument("--threshold-times", type=parse_float_list, default=[0.0, 10.0, 20.0])
    p.add_argument("--seeds", type=parse_seeds, default=parse_seeds("1..5"))
    p.add_argument("--calls", type=int)
    args = p.parse_args(argv)

    base = load_config(args.config) if args.config else SimConfig()
    if args.calls:
        base = base.replace(offered_calls=args.calls)
    print("rsl_dbm  " + "  ".join(f"T={T:<5g}" for T in args.threshold_times))
    for thr in args.thresholds:
        rows = sweep_summary(base.replace(rsl_threshold_dbm=thr), args.threshold_times, args.seeds)
        cells = ["n/a  " if r.unnecessary_fraction is None else f"{r.unnecessary_fraction:.3f}"
                 for r in rows]
        print(f"{thr:7g}  " + "  ".join(f"{c:<7}" for c in cells))


if __name__ == "__main__":
    main()
