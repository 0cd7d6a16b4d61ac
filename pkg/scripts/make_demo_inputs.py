#!/usr/bin/env python3
"""Write a small set of demo tensors for exercising the CLI.

Creates, under the output directory:
  gt_line.ntf / pred_line.ntf   four-pixel binary pair (the doc example)
  gt_square.ntf / pred_square.ntf   32x32 centered square with a blurred guess
  mask_square.pgm   the same square as a binary PGM
  config.json   parameter overrides matching the documented reference values
"""

import argparse
import json
from pathlib import Path

import numpy as np

from segloss import softmax, write_tensor


def blurred_square_probs(gt, sharpness=2.0):
    """A plausibly-shaped prediction: logits from the square, softened."""
    logits = np.where(gt > 0, sharpness, -sharpness)
    rng = np.random.default_rng(0)
    logits = logits + rng.normal(scale=0.8, size=gt.shape)
    return softmax(np.stack([-logits, logits], axis=-1))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="demo", help="directory to fill (default demo/)")
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    labels = np.array([1, 0, 0, 1], dtype=np.uint8)
    s1 = np.array([0.8, 0.2, 0.3, 0.9])
    write_tensor(out / "gt_line.ntf", labels)
    write_tensor(out / "pred_line.ntf", np.stack([1.0 - s1, s1], axis=-1))

    gt = np.zeros((32, 32), dtype=np.uint8)
    gt[12:20, 12:20] = 1
    write_tensor(out / "gt_square.ntf", gt)
    write_tensor(out / "pred_square.ntf", blurred_square_probs(gt.astype(int)))

    header = b"P5\n32 32\n255\n"
    (out / "mask_square.pgm").write_bytes(header + (gt * 255).tobytes())

    (out / "config.json").write_text(
        json.dumps(
            {
                "params": {
                    "wce": {"weights": [0.75, 0.25]},
                    "topk": {"t": 0.85},
                    "combo": {"beta": 0.4},
                }
            },
            indent=2,
        )
    )
    print(f"wrote demo inputs to {out}/")
    print(f"try: segloss eval --gt {out}/gt_line.ntf --pred {out}/pred_line.ntf "
          f"--loss all --config {out}/config.json")


if __name__ == "__main__":
    main()
