#!/usr/bin/env python3
"""Print the feed-force / power table for the perched, rotation-locked robot.

    python3 demos/force_power_demo.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from perchdrill.experiments import run_force_power_sweep


def main():
    report = run_force_power_sweep()
    print(f"{'rpm':>8}  {'feed force [N]':>15}  {'power [W]':>10}")
    for row in report.records:
        print(f"{row['rpm']:8.0f}  {row['feed_force_n']:15.2f}  {row['power_w']:10.1f}")
    print()
    for k, v in report.summary.items():
        print(f"{k:24s} {v}")
    print("PASS" if report.passed else "FAIL")


if __name__ == "__main__":
    main()
