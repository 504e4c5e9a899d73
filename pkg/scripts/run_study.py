#!/usr/bin/env python3
"""Run one of the canned simulation-study experiments and print a summary.

Example:
    python scripts/run_study.py --experiment table1 --reps 500 --out results/
"""

import argparse
from pathlib import Path

from concur.study import EXPERIMENTS, StudyConfig, study_harness


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=20240801)
    ap.add_argument("--out", type=Path, default=Path("study_out"))
    ap.add_argument("--n", type=int, action="append", default=None,
                    help="sample size(s), repeatable")
    ap.add_argument("--max-atoms", type=int, default=1000)
    args = ap.parse_args()

    cfg = StudyConfig(experiment=args.experiment, out_dir=args.out, seed=args.seed,
                      reps=args.reps, sample_sizes=tuple(args.n) if args.n else (),
                      max_atoms=args.max_atoms)
    result = study_harness(cfg)
    print(f"wrote {result['csv']} ({len(result['rows'])} rows)")
    for row in result["rows"][:12]:
        cells = {k: v for k, v in row.items()
                 if k in ("p_target", "n", "n0", "m", "lag", "estimator", "mean", "sd", "rmse")}
        print("  " + ", ".join(f"{k}={v if not isinstance(v, float) else round(v, 4)}"
                               for k, v in cells.items()))
    if len(result["rows"]) > 12:
        print(f"  ... ({len(result['rows']) - 12} more rows)")


if __name__ == "__main__":
    main()
