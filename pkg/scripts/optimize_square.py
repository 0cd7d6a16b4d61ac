#!/usr/bin/env python3
"""Descent comparison on a centered-square ground truth.

Runs logit gradient descent for a few losses against the same 32x32 square
and prints how the overlap and boundary metrics evolve. Useful for eyeballing
how region, distribution, and boundary-aware losses shape the iterates.
"""

import argparse

import numpy as np

from segloss import optimize


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--losses", default="ce,dice,generalized_dice,hd")
    parser.add_argument("--steps", type=int, default=300)
    parser.add_argument("--lr", type=float, default=20.0)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--side", type=int, default=32)
    args = parser.parse_args()

    gt = np.zeros((args.side, args.side), dtype=int)
    lo = args.side // 2 - args.side // 8
    hi = args.side // 2 + args.side // 8
    gt[lo:hi, lo:hi] = 1

    names = [t.strip() for t in args.losses.split(",") if t.strip()]
    print(f"{args.side}x{args.side} grid, square [{lo}:{hi})^2, "
          f"lr={args.lr}, steps={args.steps}, seed={args.seed}\n")
    print(f"{'loss':18s} {'start':>10s} {'final':>10s} {'dice':>7s} {'hausdorff':>10s}")
    for name in names:
        traj = optimize(name, gt, steps=args.steps, lr=args.lr, seed=args.seed)
        print(
            f"{name:18s} {traj.loss[0]:10.4f} {traj.loss[-1]:10.4f} "
            f"{traj.dice[-1]:7.3f} {traj.hausdorff[-1]:10.3f}"
        )


if __name__ == "__main__":
    main()
