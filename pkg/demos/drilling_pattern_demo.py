#!/usr/bin/env python3
"""Drill a seeded 3x3 hole pattern and print per-hole errors.

    python3 demos/drilling_pattern_demo.py [--seed 0] [--no-noise]
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from perchdrill.experiments import run_drilling_study


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--no-noise", action="store_true")
    args = ap.parse_args()

    report = run_drilling_study(seed=args.seed, noise=not args.no_noise)
    print(f"{'hole':>4}  {'target [mm]':>18}  {'offset [mm]':>11}  {'depth [mm]':>10}  excl")
    for r in report.records:
        tgt = f"({r['target_lateral_mm']:+.0f}, {r['target_vertical_mm']:+.0f})"
        print(
            f"{r['run_id']:>4}  {tgt:>18}  {r['offset_norm_mm']:11.2f}  "
            f"{r['depth_mm']:10.2f}  {r['excluded']}"
        )
    print()
    print(f"accuracy : {report.summary['accuracy_mm']:.2f} mm")
    print(f"precision: {report.summary['precision_mm']:.2f} mm")
    print("PASS" if report.passed else "FAIL")


if __name__ == "__main__":
    main()
