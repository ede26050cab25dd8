"""Command-line entry point: headless mission runs, the teleop bridge, and
the experiment harness.

Exit codes for ``run``: 0 nominal, 2 input parse/load error, 3 guard
violation or sequence abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .commands import parse_script
from .control import SequenceAbort
from .experiments import run_experiment
from .mission import MissionSim, ScriptRunner
from .params import load_params
from .telemetry import TelemetryLog


def _load_inputs(args):
    params = None
    if args.params:
        params = load_params(args.params)
    entries = None
    if getattr(args, "script", None):
        text = Path(args.script).read_text()
        entries = parse_script(text)
    return params, entries


def cli_run(args) -> int:
    try:
        params, entries = _load_inputs(args)
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    sim = MissionSim(params=params, seed=args.seed, depth_goal=args.depth_goal)
    runner = ScriptRunner(sim, entries or [])
    telem = TelemetryLog()
    code = 0
    try:
        while sim.state.time < args.max_time:
            runner.poll()
            telem.maybe_record(sim)
            if sim.rejections:
                code = 3
                break
            if not runner.pending:
                break
            sim.tick()
        else:
            print("error: script did not complete within the horizon", file=sys.stderr)
            code = 3
        if code == 0:
            for _ in range(int(2.0 / 0.001)):  # settle tail
                sim.tick()
                telem.maybe_record(sim)
    except SequenceAbort as e:
        print(f"abort: {e}", file=sys.stderr)
        code = 3

    telem.write_csv(out / "telemetry.csv")
    with open(out / "events.log", "w") as f:
        for t, name in sim.events:
            f.write(f"{t:.3f} {name}\n")
        for rej in sim.rejections:
            f.write(f"{rej.time:.3f} REJECTED {type(rej.command).__name__}: {rej.reason}\n")
    with open(out / "final_state.json", "w") as f:
        f.write(sim.state.to_json())
    with open(out / "mode_trace.json", "w") as f:
        json.dump([m.value for m in sim.mode_trace], f)
    if code == 3 and sim.rejections:
        rej = sim.rejections[0]
        print(f"rejected: {type(rej.command).__name__}: {rej.reason}", file=sys.stderr)
    return code


def cli_serve(args) -> int:
    from .teleop import serve_teleop

    try:
        params = load_params(args.params) if args.params else None
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    serve_teleop(
        port=args.port,
        params=params,
        seed=args.seed,
        rate=args.rate,
        host=args.host,
        depth_goal=args.depth_goal,
    )
    return 0


def cli_experiment(args) -> int:
    try:
        params = load_params(args.params) if args.params else None
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        report = run_experiment(args.name, seed=args.seed, out_dir=args.out, params=params)
    except KeyError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(json.dumps(report.summary, indent=2))
    print(f"{report.name}: {'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="perchdrill", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="run a mission script headless, as fast as possible")
    r.add_argument("script", help="mission script (JSON lines)")
    r.add_argument("--params", help="parameter YAML file")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--out", default="out", help="output directory")
    r.add_argument("--max-time", type=float, default=600.0, help="sim-time horizon, s")
    r.add_argument("--depth-goal", type=float, default=0.03, help="drill depth goal, m")
    r.set_defaults(fn=cli_run)

    s = sub.add_parser("serve", help="teleop bridge: telemetry out, commands in")
    s.add_argument("--port", type=int, default=None)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--params")
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--rate", type=float, default=1.0, help="real-time factor")
    s.add_argument("--depth-goal", type=float, default=0.03, help="drill depth goal, m")
    s.set_defaults(fn=cli_serve)

    e = sub.add_parser("experiment", help="run a named study and write its report")
    e.add_argument("name", help="force_power | perching | drilling | detachment | endurance")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", default=None)
    e.add_argument("--params")
    e.set_defaults(fn=cli_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "port", None) is None and args.cmd == "serve":
        from .teleop import DEFAULT_PORT

        args.port = DEFAULT_PORT
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
