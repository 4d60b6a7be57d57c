"""Command-line front end.

``unistoch run SCENARIO`` executes a scenario file.  The other subcommands
wrap a single task around objects read from JSON files and go through the
same engine, so every report has one shape.

Exit status: 0 when every verdict-bearing task holds, 1 when one fails,
2 when an input cannot be read or parsed, 3 when an input is invalid.
"""
import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .core import TOL_ALG, TOL_INT, UnistochError
from .scenario import SCHEMA_VERSION, Scenario, TaskError, load_scenario, run_scenario

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_INVALID = 3

TOL_ENV = "UNISTOCH_TOL"


class InputError(Exception):
    """Unreadable or unparsable input; maps to exit status 2."""


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _object_spec(path, default_type):
    """A file holds either an object spec (with ``type``) or a bare literal."""
    data = _read_json(path)
    if isinstance(data, dict) and "type" in data:
        return data
    if default_type == "process" and isinstance(data, dict):
        return {"type": "process", **data}
    if default_type == "kraus":
        ops = data.get("operators") if isinstance(data, dict) else data
        return {"type": "kraus", "operators": ops}
    return {"type": default_type, "value": data}


def _vector_arg(text):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _single(name, objects, task, seed):
    return Scenario(name=name, seed=seed, objects=objects, tasks=[task])


def _cmd_validate(a):
    kind = "kraus" if a.check == "kraus" else "matrix"
    objects = {"m": _object_spec(a.matrix, kind)}
    return _single("validate", objects, {"task": "validate", "object": "m", "check": a.check}, a.seed)


def _cmd_evolve(a):
    objects = {"theta": _object_spec(a.theta, "evolution")}
    task = {"task": "evolve", "theta": "theta"}
    if a.rho:
        objects["rho"] = _object_spec(a.rho, "density")
        task["rho"] = "rho"
    else:
        task["p0"] = a.p0
    tasks = [task]
    if a.gamma:
        tasks.insert(0, {"task": "gamma_from_theta", "theta": "theta"})
    return Scenario("evolve", a.seed, objects, tasks)


def _cmd_divisibility(a):
    objects = {"process": _object_spec(a.process, "process")}
    task = {"task": "divisibility", "process": "process", "t": a.t, "t_prime": a.tprime}
    if a.expect is not None:
        task["expect"] = a.expect == "divisible"
    return _single("divisibility", objects, task, a.seed)


def _cmd_gauge(a):
    objects = {"theta": _object_spec(a.theta, "evolution")}
    sh = {"task": "sh_gauge", "theta": "theta"}
    if a.phases:
        objects["phases"] = _object_spec(a.phases, "phases")
        sh["phases"] = "phases"
    tasks = [sh]
    if a.rho:
        if not (a.v or a.generator):
            raise UnistochError("--rho needs --v or --generator for the unitary-gauge check")
        objects["rho"] = _object_spec(a.rho, "density")
        if a.v:
            objects["v"] = {"type": "fw_transform", "builtin": "constant", "value": _read_json(a.v)}
        else:
            objects["v"] = {"type": "fw_transform", "builtin": "exp", "generator": _read_json(a.generator)}
        obs = []
        for k, path in enumerate(a.observable or []):
            objects[f"obs{k}"] = _object_spec(path, "observable")
            obs.append(f"obs{k}")
        tasks.append({"task": "fw_gauge", "theta": "theta", "rho": "rho", "transform": "v", "t": a.t, "observables": obs})
    return Scenario("gauge-check", a.seed, objects, tasks)


def _cmd_symmetry(a):
    objects = {"theta": _object_spec(a.theta, "evolution"), "v": _object_spec(a.v, "matrix")}
    task = {"task": "symmetry", "theta": "theta", "v": "v", "wigner_trials": a.wigner_trials}
    return _single("symmetry-check", objects, task, a.seed)


def _cmd_dilate(a):
    objects = {"theta": _object_spec(a.theta, "evolution")}
    task = {"task": "dilate", "theta": "theta", "d": a.d, "gamma_index": a.gamma_index}
    return _single("dilate", objects, task, a.seed)


def _cmd_stinespring(a):
    objects = {"kraus": _object_spec(a.kraus, "kraus")}
    return _single("stinespring", objects, {"task": "stinespring", "kraus": "kraus"}, a.seed)


def _cmd_realify(a):
    objects = {"m": _object_spec(a.matrix, "matrix")}
    return _single("realify", objects, {"task": "realify", "matrix": "m"}, a.seed)


def _cmd_run(a):
    try:
        scenario = load_scenario(a.scenario)
    except json.JSONDecodeError as exc:
        raise InputError(f"{a.scenario}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{a.scenario}: {exc.strerror}") from None
    if a.seed is not None:
        scenario.seed = a.seed
    return scenario


def _common(p, seed_default):
    p.add_argument("--tol", type=float, default=None, help=f"algebraic tolerance (default {TOL_ALG:g}, or ${TOL_ENV})")
    p.add_argument("--tol-int", type=float, default=TOL_INT, help="tolerance for integrated and differentiated quantities")
    p.add_argument("--seed", type=int, default=seed_default, help="seed for every random draw")
    p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--no-timing", action="store_true", help="leave elapsed time out of the report")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unistoch", description="Checks for the unitary/stochastic correspondence.")
    parser.add_argument("--version", action="version", version=f"unistoch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a scenario file")
    p.add_argument("scenario", type=Path)
    _common(p, None)
    p.add_argument("--jobs", type=int, default=1, help="run independent tasks on this many threads")
    p.set_defaults(build=_cmd_run)

    p = sub.add_parser("validate", help="check a matrix or Kraus set against a structural property")
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument(
        "--check",
        required=True,
        choices=("unitary", "self_adjoint", "psd", "projector", "stochastic", "density", "kraus"),
    )
    _common(p, 0)
    p.set_defaults(build=_cmd_validate)

    p = sub.add_parser("evolve", help="evolve a distribution or density matrix by an evolution operator")
    p.add_argument("--theta", type=Path, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p0", type=_vector_arg, help="initial probabilities, comma separated")
    g.add_argument("--rho", type=Path)
    p.add_argument("--gamma", action="store_true", help="also report the transition matrix")
    _common(p, 0)
    p.set_defaults(build=_cmd_evolve)

    p = sub.add_parser("divisibility", help="test a process for a stochastic intermediate")
    p.add_argument("--process", type=Path, required=True)
    p.add_argument("--t", type=float, required=True, help="target time")
    p.add_argument("--tprime", type=float, required=True, help="split time")
    p.add_argument("--expect", choices=("divisible", "indivisible"), default=None)
    _common(p, 0)
    p.set_defaults(build=_cmd_divisibility)

    p = sub.add_parser("gauge-check", help="invariance under entrywise phases and unitary changes of frame")
    p.add_argument("--theta", type=Path, required=True)
    p.add_argument("--phases", type=Path, help="phase matrix; random phases from --seed otherwise")
    p.add_argument("--rho", type=Path, help="state at time --t; enables the frame-change check")
    p.add_argument("--v", type=Path, help="constant unitary frame change")
    p.add_argument("--generator", type=Path, help="self-adjoint G for V(t) = exp(-iGt)")
    p.add_argument("--observable", type=Path, action="append")
    p.add_argument("--t", type=float, default=1.0)
    _common(p, 0)
    p.set_defaults(build=_cmd_gauge)

    p = sub.add_parser("symmetry-check", help="classify a candidate dynamical symmetry")
    p.add_argument("--theta", type=Path, required=True)
    p.add_argument("--v", type=Path, required=True)
    p.add_argument("--wigner-trials", type=int, default=0)
    _common(p, 0)
    p.set_defaults(build=_cmd_symmetry)

    p = sub.add_parser("dilate", help="trivial dilation Theta ⊗ 1 and its reconstructed transition matrix")
    p.add_argument("--theta", type=Path, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--gamma-index", type=int, default=0)
    _common(p, 0)
    p.set_defaults(build=_cmd_dilate)

    p = sub.add_parser("stinespring", help="unitary dilation of a Kraus set")
    p.add_argument("--kraus", type=Path, required=True)
    _common(p, 0)
    p.set_defaults(build=_cmd_stinespring)

    p = sub.add_parser("realify", help="real orthogonal representation of a complex matrix")
    p.add_argument("--matrix", type=Path, required=True)
    _common(p, 0)
    p.set_defaults(build=_cmd_realify)
    return parser


def _resolve_tol(cli_value):
    if cli_value is not None:
        tol = cli_value
    elif os.environ.get(TOL_ENV):
        try:
            tol = float(os.environ[TOL_ENV])
        except ValueError:
            raise UnistochError(f"${TOL_ENV} is not a number: {os.environ[TOL_ENV]!r}") from None
    else:
        tol = TOL_ALG
    if not (math.isfinite(tol) and tol > 0):
        raise UnistochError(f"tolerance must be positive and finite, got {tol!r}")
    return tol


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _scalar_summary(result):
    parts = []
    for key in sorted(result):
        val = result[key]
        if isinstance(val, bool) or val is None:
            parts.append(f"{key}={val}")
        elif isinstance(val, (int, float)):
            parts.append(f"{key}={val:.6g}")
        elif isinstance(val, str):
            parts.append(f"{key}={val}")
    return " ".join(parts)


def format_text(report: dict) -> str:
    lines = [f"scenario {report['scenario']} (seed {report['seed']}, unistoch {report['version']})"]
    for entry in report["tasks"]:
        mark = {True: "PASS", False: "FAIL", None: "INFO"}[entry["holds"]]
        label = f" [{entry['label']}]" if "label" in entry else ""
        lines.append(f"{mark} #{entry['index']} {entry['task']}{label}: {_scalar_summary(entry['result'])}")
    lines.append("all verdicts hold" if report["all_hold"] else "some verdicts failed")
    return "\n".join(lines) + "\n"


def _error(msg, code):
    print(f"unistoch: error: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = _resolve_tol(args.tol)
        scenario = args.build(args)
        if scenario.seed is None:
            scenario.seed = 0
        scenario = Scenario.from_dict(
            {"schema": SCHEMA_VERSION, "name": scenario.name, "seed": scenario.seed,
             "objects": scenario.objects, "tasks": scenario.tasks},
            base_dir=scenario.base_dir,
        )
        report = run_scenario(scenario, tol, args.tol_int, getattr(args, "jobs", 1))
    except InputError as exc:
        return _error(str(exc), EXIT_PARSE)
    except TaskError as exc:
        return _error(str(exc), EXIT_INVALID)
    except (UnistochError, ValueError, KeyError) as exc:
        return _error(str(exc), EXIT_INVALID)
    if args.no_timing:
        report.pop("timing", None)
    text = dump_report(report) if args.format == "json" else format_text(report)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK if report["all_hold"] else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
