#!/usr/bin/env python3
"""Fly the complete perch-rotate-drill-detach mission and narrate it.

Runs the shipped mission script headless and prints each mode change and
detachment event as it happens, plus a short summary at the end.

    python3 demos/full_mission_demo.py [--depth-goal 0.01]
"""

import argparse
import math
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from perchdrill.commands import parse_script
from perchdrill.mission import MissionSim, ScriptRunner


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--depth-goal", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    root = pathlib.Path(__file__).resolve().parents[1]
    entries = parse_script((root / "missions" / "full_mission.jsonl").read_text())
    sim = MissionSim(seed=args.seed, depth_goal=args.depth_goal)
    runner = ScriptRunner(sim, entries)

    seen_modes = 1
    seen_events = 0
    print(f"t={sim.state.time:7.3f}  mode -> {sim.mode.value}")
    while runner.pending and sim.state.time < 300.0:
        runner.poll()
        sim.tick()
        if len(sim.mode_trace) > seen_modes:
            for m in sim.mode_trace[seen_modes:]:
                print(f"t={sim.state.time:7.3f}  mode -> {m.value}")
            seen_modes = len(sim.mode_trace)
        if len(sim.events) > seen_events:
            for t, name in sim.events[seen_events:]:
                print(f"t={t:7.3f}  event   {name}")
            seen_events = len(sim.events)

    print()
    print(f"drilled depth : {sim.state.drill_depth * 1e3:.1f} mm")
    print(f"final tilt    : {math.degrees(sim.state.hinge_theta):.2f} deg")
    print(f"final position: {sim.state.body_pose.position.round(3)}")
    print(f"rejections    : {len(sim.rejections)}")
    print(f"mode trace    : {' -> '.join(m.value for m in sim.mode_trace)}")


if __name__ == "__main__":
    main()
