"""capflow command line for capillary flow runs and checks on state files.

Exit codes:
    0  success (for ``flow``: the run finished with status converged, t_max or max_steps)
    1  a verification check failed
    2  invalid input: config schema, state file contents, arguments, or initial data
    3  numerical failure during a flow run (partial trace and last good state written)
    4  file system error
"""

import argparse
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from .capgeom import CapProfile
from .errors import CapflowError, DomainError, InvalidInitialDataError
from .flow import FlowConfig, fit_cap, run
from .state import load_state, save_state
from .verify import SUITES, af_check, af_gap, reports_to_json, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_TOP_KEYS = {"n", "theta", "grid", "initial", "time", "output"}
_INITIAL_KEYS = {"type", "r", "amplitude", "mode"}
_TIME_KEYS = {"cfl", "t_max", "tol_static", "max_steps"}
_OUTPUT_KEYS = {"trace_csv", "state_json", "every"}


class ConfigError(DomainError):
    pass


def _require_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = set(required) - set(obj)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def _number(value, where, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number")
    if integer and not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer")
    return value


def parse_config(data, base_dir=Path(".")):
    """Validate a flow config object and return (FlowConfig, trace_path, state_path)."""
    _require_keys(data, _TOP_KEYS, {"n", "theta", "grid", "initial", "output"}, "config")
    init = data["initial"]
    _require_keys(init, _INITIAL_KEYS, {"type", "r"}, "initial")
    if init["type"] not in ("cap", "perturbed_cap"):
        raise ConfigError("initial.type must be 'cap' or 'perturbed_cap'")
    initial = {"kind": init["type"], "r": float(_number(init["r"], "initial.r"))}
    if "amplitude" in init:
        initial["amplitude"] = float(_number(init["amplitude"], "initial.amplitude"))
    if "mode" in init:
        initial["mode"] = _number(init["mode"], "initial.mode", integer=True)
    timing = data.get("time", {})
    _require_keys(timing, _TIME_KEYS, (), "time")
    out = data["output"]
    _require_keys(out, _OUTPUT_KEYS, {"trace_csv", "state_json"}, "output")
    for key in ("trace_csv", "state_json"):
        if not isinstance(out[key], str) or not out[key]:
            raise ConfigError(f"output.{key} must be a non-empty string")
    kwargs = {}
    for key in ("cfl", "t_max", "tol_static"):
        if key in timing:
            kwargs[key] = float(_number(timing[key], f"time.{key}"))
    if "max_steps" in timing:
        kwargs["max_steps"] = _number(timing["max_steps"], "time.max_steps", integer=True)
    if "every" in out:
        kwargs["every"] = _number(out["every"], "output.every", integer=True)
    config = FlowConfig(
        n=_number(data["n"], "n", integer=True),
        theta=float(_number(data["theta"], "theta")),
        m=_number(data["grid"], "grid", integer=True),
        initial=initial,
        **kwargs,
    )
    return config, base_dir / out["trace_csv"], base_dir / out["state_json"]


def _fmt_vector(values):
    return "[" + ", ".join("%.12g" % v for v in values) + "]"


def cmd_flow(args):
    path = Path(args.config)
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        data = json.loads(text)
        config, trace_path, state_path = parse_config(data, path.parent)
        initial = config.initial_state()
    except (json.JSONDecodeError, DomainError, InvalidInitialDataError) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    trace, final = run(config, initial)
    manifest_path = state_path.with_name(state_path.stem + ".manifest.json")
    manifest = {
        "config": data,
        "status": trace.status,
        "message": trace.message,
        "steps": trace.rows[-1][0],
        "t": trace.rows[-1][1],
        "wall_time_s": round(trace.wall_time, 3),
        "finished_at": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "epsilon0": trace.epsilon0,
        "outputs": {"trace_csv": str(trace_path), "state_json": str(state_path)},
    }
    W = trace.rows[-1][3:3 + config.n + 2]
    try:
        r_hat, max_dev = fit_cap(final)
    except CapflowError:
        r_hat, max_dev = math.nan, math.nan
    manifest.update({"final_W": W, "r_hat": r_hat, "max_dev": max_dev})
    try:
        trace.write_csv(trace_path)
        save_state(final, state_path)
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"status     {trace.status}{' (' + trace.message + ')' if trace.message else ''}")
    print(f"steps      {manifest['steps']}   t = {manifest['t']:.6g}   wall {trace.wall_time:.1f} s")
    print(f"final W    {_fmt_vector(W)}")
    print(f"fitted r   {r_hat:.10g}   max_dev {max_dev:.3e}")
    print(f"trace      {trace_path}")
    print(f"state      {state_path}")
    return EXIT_NUMERICAL if trace.status == "error" else EXIT_OK


def cmd_cap_table(args):
    if not (args.r_min > 0 and args.r_max >= args.r_min and args.steps >= 1 and args.n >= 2):
        print("error: need n >= 2, 0 < r-min <= r-max and steps >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        profile = CapProfile(args.n, args.theta, args.grid)
        radii = np.geomspace(args.r_min, args.r_max, args.steps) if args.steps > 1 else np.array([args.r_min])
        rows = [[r] + list(profile.values(r)) for r in radii]
    except CapflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    header = ["r"] + [f"f_{k}" for k in range(args.n + 2)]
    lines = [",".join(header)] + [",".join("%.17g" % v for v in row) for row in rows]
    try:
        Path(args.out).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        print(f"error: cannot write table: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def _load(path):
    """Load a state file, mapping failures to exit codes."""
    try:
        return load_state(path), None
    except OSError as exc:
        print(f"error: cannot read state: {exc}", file=sys.stderr)
        return None, EXIT_IO
    except (json.JSONDecodeError, CapflowError, TypeError, ValueError) as exc:
        print(f"error: invalid state file: {exc}", file=sys.stderr)
        return None, EXIT_INVALID


def cmd_verify(args):
    state, code = _load(args.state)
    if state is None:
        return code
    try:
        reports = run_suite(state, args.suite)
    except CapflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out) if args.out else Path(args.state).with_suffix(".verify.json")
    try:
        out.write_text(reports_to_json(reports) + "\n")
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<28} residual {r.residual: .3e}  tol {r.tol:.1e}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_af(args):
    state, code = _load(args.state)
    if state is None:
        return code
    try:
        report = af_check(state, args.k)
    except CapflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(json.dumps(dict(report.to_dict(), gap=af_gap(report)), indent=2))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog="capflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flow", help="run the flow from a JSON config")
    p.add_argument("config")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("cap-table", help="tabulate f_0..f_{n+1} of model caps on a log-spaced r grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True, help="number of rows")
    p.add_argument("--grid", type=int, default=400, help="cells used for each cap (default 400)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cap_table)

    p = sub.add_parser("verify", help="run a check suite on a state file")
    p.add_argument("state")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--out", help="report path (default: <state>.verify.json)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("af", help="Alexandrov-Fenchel comparison for one k")
    p.add_argument("state")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_af)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)
