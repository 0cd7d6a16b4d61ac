#!/usr/bin/env python3
"""Finite-difference audit across the whole loss registry.

Same machinery as `segloss gradcheck`, but also prints the absolute error
and per-loss instance families, and lets you sweep the probe step to watch
the central-difference truncation error shrink quadratically.
"""

import argparse

from segloss import loss_names, run_suite


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=25)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--h-sweep",
        action="store_true",
        help="re-run the audit at h, h/2, h/4 and report the error ratios",
    )
    args = parser.parse_args()

    steps = [1e-4, 5e-5, 2.5e-5] if args.h_sweep else [1e-6]
    rows = {name: [] for name in loss_names()}
    for h in steps:
        for rep in run_suite(trials=args.trials, h=h, seed=args.seed):
            rows[rep.loss_name].append(rep)

    print(f"{'loss':18s} " + " ".join(f"{f'rel@h={h:g}':>16s}" for h in steps))
    for name, reps in rows.items():
        cells = " ".join(f"{r.max_rel_err:16.3e}" for r in reps)
        flag = "" if all(r.passed for r in reps) else "  <-- FAIL"
        print(f"{name:18s} {cells}{flag}")

    if args.h_sweep:
        print("\nhalving h should shrink truncation-dominated errors ~4x")


if __name__ == "__main__":
    main()
