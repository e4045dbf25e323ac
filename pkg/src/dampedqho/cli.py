"""Command-line interface.

    dampedqho spectrum     --omega 1 --alpha 0.25 --n-max 4 --t-end 5
    dampedqho wavefunction --omega 1 --alpha 0.005 --n 1 --t 250
    dampedqho evolve       --omega 1 --alpha 0.75 --n 0 --t-end 20 --modes 60
    dampedqho closedform   --omega 1 --alpha 2 --n 2 --m-max 10 --t-end 10
    dampedqho qubit        --kind phase --unit reduced --C 1 --R 0.5 --I0 1
    dampedqho figure       fig2a

Every command also accepts ``--config FILE`` with a JSON run configuration
``{"command": ..., "params": {...}, "output": {"path": ..., "format": ...}}``;
flags given on the command line win over the file.  Relative output paths are
resolved against ``$DAMPEDQHO_OUTPUT_DIR`` when it is set.

Exit codes: 0 success, 2 usage, 3 config schema, 4 domain, 5 numerical,
6 I/O.  Errors are reported on stderr as ``error[<category>]: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from . import dynamics, qubits, spectrum, wavefunction
from .errors import DampedQHOError, DomainError, RegimeError
from .figures import FIGURES, figure_table
from .timewarp import OscillatorParams, tau_of_t

OUTPUT_DIR_ENV = "DAMPEDQHO_OUTPUT_DIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCHEMA = 3
EXIT_DOMAIN = 4
EXIT_NUMERICAL = 5
EXIT_IO = 6

COMMANDS = ("spectrum", "wavefunction", "evolve", "closedform", "qubit", "figure")

# name -> (json type, argparse type, help)
PARAMS = {
    "omega": ("number", float, "angular frequency"),
    "alpha": ("number", float, "damping coefficient"),
    "hbar": ("number", float, "action scale"),
    "K": ("number", float, "warp constant (default 1/(2 alpha))"),
    "n": ("integer", int, "quantum number / initial state"),
    "n_max": ("integer", int, "highest level reported"),
    "m_max": ("integer", int, "highest mode reported"),
    "t": ("number", float, "laboratory time"),
    "tau": ("number", float, "warped time (overrides --t)"),
    "t_start": ("number", float, "first sample time"),
    "t_end": ("number", float, "last sample time"),
    "t_samples": ("integer", int, "number of time samples"),
    "coordinate": ("string", str, "time coordinate of the samples: t or tau"),
    "units": ("string", str, "energy units: hbar-omega or raw"),
    "x_min": ("number", float, "grid start"),
    "x_max": ("number", float, "grid end"),
    "x_points": ("integer", int, "grid points"),
    "modes": ("integer", int, "truncation order M"),
    "rtol": ("number", float, "relative tolerance"),
    "atol": ("number", float, "absolute tolerance"),
    "tail_tol": ("number", float, "tail population threshold"),
    "strict": ("boolean", None, "fail instead of warn when the tail threshold is crossed"),
    "kind": ("string", str, "qubit kind: phase or flux"),
    "unit": ("string", str, "unit system: reduced or SI"),
    "C": ("number", float, "capacitance"),
    "R": ("number", float, "resistance"),
    "I0": ("number", float, "junction critical current"),
    "I": ("number", float, "bias current"),
    "L": ("number", float, "loop inductance"),
    "delta_X": ("number", float, "external flux parameter"),
    "e": ("number", float, "elementary charge override"),
    "name": ("string", str, "figure preset"),
}

COMMAND_PARAMS = {
    "spectrum": ["omega", "alpha", "hbar", "K", "n_max", "t_start", "t_end", "t_samples",
                 "coordinate", "units"],
    "wavefunction": ["omega", "alpha", "hbar", "K", "n", "t", "tau", "x_min", "x_max", "x_points"],
    "evolve": ["omega", "alpha", "hbar", "n", "t_end", "t_samples", "modes", "rtol", "atol",
               "tail_tol", "strict"],
    "closedform": ["omega", "alpha", "hbar", "n", "m_max", "t_end", "t_samples"],
    "qubit": ["kind", "unit", "C", "R", "I0", "I", "L", "delta_X", "hbar", "e", "K", "n_max",
              "t_start", "t_end", "t_samples"],
    "figure": ["name"],
}

DEFAULTS = {
    "spectrum": {"omega": 1.0, "hbar": 1.0, "n_max": 5, "t_start": 0.0, "t_end": 10.0,
                 "t_samples": 101, "coordinate": "t", "units": "hbar-omega"},
    "wavefunction": {"omega": 1.0, "hbar": 1.0, "n": 0, "t": 0.0, "x_min": -10.0,
                     "x_max": 10.0, "x_points": 2001},
    "evolve": {"omega": 1.0, "hbar": 1.0, "n": 0, "t_end": 10.0, "t_samples": 201,
               "modes": dynamics.DEFAULT_MODES, "rtol": 1e-9, "atol": 1e-12,
               "tail_tol": dynamics.TAIL_TOL, "strict": False},
    "closedform": {"omega": 1.0, "hbar": 1.0, "n": 0, "m_max": 6, "t_end": 10.0,
                   "t_samples": 201},
    "qubit": {"kind": "phase", "unit": "reduced", "I": 0.0, "delta_X": 0.0, "n_max": 3,
              "t_start": 0.0, "t_end": 0.0, "t_samples": 1},
    "figure": {},
}

DEFAULT_FORMAT = {"qubit": "json"}

ENUMS = {
    "coordinate": ["t", "tau"],
    "units": ["hbar-omega", "raw"],
    "kind": ["phase", "flux"],
    "unit": ["reduced", "SI"],
}

MINIMA = {"n": 0, "n_max": 0, "m_max": 0, "t_samples": 1, "x_points": 2, "modes": 1}


def _param_schema(name):
    jtype = PARAMS[name][0]
    if name in ENUMS:
        return {"enum": ENUMS[name]}
    if name in MINIMA:
        return {"type": jtype, "minimum": MINIMA[name]}
    return {"type": jtype}


PARAMS_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {name: _param_schema(name) for name in PARAMS},
}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["command"],
    "additionalProperties": False,
    "properties": {
        "command": {"enum": list(COMMANDS)},
        "params": PARAMS_SCHEMA,
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "format": {"enum": ["csv", "json"]},
            },
        },
    },
}


class SchemaError(DampedQHOError):
    category = "schema"


class UsageError(DampedQHOError):
    category = "usage"


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _jsonable(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(table: Table, fmt: str) -> str:
    """Serialise deterministically: CSV with 17 significant digits, or JSON."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()
    lines = [json.dumps(_jsonable(list(r)), allow_nan=False) for r in table.rows]
    head = json.dumps({"columns": table.columns, "meta": _jsonable(table.meta)},
                      sort_keys=True, allow_nan=False)
    return head[:-1] + ', "rows": [\n' + ",\n".join(lines) + "\n]}\n"


def load_config(path) -> RunConfig:
    """Read and schema-check a JSON run configuration."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    return config_from_dict(doc, source=str(path))


def _check(schema, doc, source, prefix=""):
    errors = sorted(jsonschema.Draft7Validator(schema).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        where = prefix + ".".join(str(p) for p in err.path) or "<root>"
        raise SchemaError(f"{source}: field {where}: {err.message}")


def check_params(command, params, source="<config>", ranges=True):
    """Schema, membership and finiteness checks; ``ranges`` adds non-empty range checks."""
    _check(PARAMS_SCHEMA, params, source, "params.")
    allowed = set(COMMAND_PARAMS[command])
    for k, v in params.items():
        if k not in allowed:
            raise SchemaError(f"{source}: field params.{k}: not used by {command!r}")
        if isinstance(v, float) and not math.isfinite(v):
            raise SchemaError(f"{source}: field params.{k}: must be finite")
    if not ranges:
        return
    if "x_min" in params and "x_max" in params and not params["x_max"] > params["x_min"]:
        raise SchemaError(f"{source}: field params.x_max: empty grid, need x_max > x_min")
    if params.get("t_samples", 1) > 1 and not params.get("t_end", 0.0) > params.get("t_start", 0.0):
        raise SchemaError(f"{source}: field params.t_end: empty range, need t_end > t_start")


def config_from_dict(doc, source="<config>") -> RunConfig:
    _check(CONFIG_SCHEMA, doc, source)
    params = doc.get("params", {})
    check_params(doc["command"], params, source, ranges=False)
    return RunConfig(doc["command"], dict(params), dict(doc.get("output", {})))


def _osc(params) -> OscillatorParams:
    if params.get("alpha") is None:
        raise UsageError("--alpha is required")
    return OscillatorParams(alpha=params["alpha"], omega=params["omega"], hbar=params["hbar"],
                            K=params.get("K"))


def _times(params):
    return np.linspace(params.get("t_start", 0.0), params["t_end"], params["t_samples"])


def _spectrum(params) -> Table:
    p = _osc(params)
    scale = p.hbar * p.omega if params["units"] == "hbar-omega" else 1.0
    samples = _times(params)
    rows = []
    for s in samples:
        for n in range(params["n_max"] + 1):
            if params["coordinate"] == "tau":
                e = spectrum.energy_tau(p, n, s)
            else:
                e = spectrum.energy_t(p, n, s)
            rows.append((s, n, e / scale))
    meta = {"alpha": p.alpha, "omega": p.omega, "hbar": p.hbar, "K": p.K,
            "coordinate": params["coordinate"], "units": params["units"]}
    return Table(["t_or_tau", "n", "energy"], rows, meta)


def _wavefunction(params) -> Table:
    p = _osc(params)
    x = np.linspace(params["x_min"], params["x_max"], params["x_points"])
    n = params["n"]
    if params.get("tau") is not None:
        coord, when = "tau", params["tau"]
        psi = wavefunction.psi_n_tau(p, n, x, when)
    else:
        coord, when = "t", params["t"]
        psi = wavefunction.psi_n_t(p, n, x, when)
    sample = wavefunction.WavefunctionSample(x, psi, (coord, when), n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        norm = wavefunction.quadrature_norm(sample)
    meta = {"n": n, coord: when, "norm": norm.value, "support_ok": norm.support_ok}
    rows = list(zip(x, sample.values.real, sample.values.imag, sample.prob))
    return Table(["x", "re", "im", "prob"], rows, meta)


def _trajectory_rows(t, c, modes):
    rows = []
    for i, ti in enumerate(t):
        for m in modes:
            v = c[i, m]
            rows.append((ti, m, v.real, v.imag, abs(v) ** 2))
    return rows


def _evolve(params) -> Table:
    p = _osc(params)
    t = np.linspace(0.0, params["t_end"], params["t_samples"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        traj = dynamics.integrate(p, params["n"], params["t_end"], M=params["modes"], t_eval=t,
                                  rtol=params["rtol"], atol=params["atol"],
                                  tail_tol=params["tail_tol"], strict=params["strict"])
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    norms = traj.norms()
    meta = {"alpha": p.alpha, "omega": p.omega, "n0": params["n"], "M": traj.M,
            "max_tail": traj.max_tail, "tail_exceeded": traj.tail_exceeded,
            "max_norm_drift": float(np.max(np.abs(norms - 1.0))), **traj.stats}
    return Table(["t", "m", "re_c", "im_c", "prob"],
                 _trajectory_rows(traj.t, traj.c, range(traj.M + 1)), meta)


def _closedform(params) -> Table:
    p = _osc(params)
    t = np.linspace(0.0, params["t_end"], params["t_samples"])
    modes = range(params["m_max"] + 1)
    c = np.array([dynamics.closed_form(p, params["n"], m, t) for m in modes]).T
    meta = {"alpha": p.alpha, "omega": p.omega, "n0": params["n"],
            "regime": dynamics.classify_regime(p)}
    return Table(["t", "m", "re_c", "im_c", "prob"], _trajectory_rows(t, c, modes), meta)


def _qubit(params) -> Table:
    fields = {k: params[k] for k in ("I", "delta_X", "L", "hbar", "e") if params.get(k) is not None}
    for k in ("C", "R", "I0"):
        if params.get(k) is None:
            raise UsageError(f"--{k} is required")
    if params["unit"] == "reduced":
        q = qubits.RcsjParams.reduced(params["C"], params["R"], params["I0"], **fields)
    else:
        q = qubits.RcsjParams(params["C"], params["R"], params["I0"], **fields)
    kind = params["kind"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        qmap, core = qubits.map_to_oscillator(q, kind, K=params.get("K"))
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if kind == "phase":
        r_crit = qubits.critical_resistance_phase(q)
        energy = qubits.energy_phase
    else:
        r_crit = qubits.critical_resistance_flux(q)
        energy = qubits.energy_flux
    rows = [(t, n, energy(q, n, t, params.get("K")))
            for t in _times(params) for n in range(params["n_max"] + 1)]
    meta = {"unit": params["unit"], "map": asdict(qmap), "critical_resistance": r_crit,
            "regime": dynamics.classify_regime(core),
            "core": {"alpha": core.alpha, "omega": core.omega, "hbar": core.hbar, "K": core.K}}
    if params["unit"] == "SI":
        meta["caveat"] = "energy offsets mix a squared frequency with a dimensionless ratio"
    return Table(["t_or_tau", "n", "energy"], rows, meta)


def _figure(params) -> Table:
    name = params.get("name")
    if name not in FIGURES:
        raise UsageError(f"unknown figure {name!r}; choose from {', '.join(sorted(FIGURES))}")
    columns, rows = figure_table(name)
    return Table(columns, rows, {"figure": name})


HANDLERS = {
    "spectrum": _spectrum,
    "wavefunction": _wavefunction,
    "evolve": _evolve,
    "closedform": _closedform,
    "qubit": _qubit,
    "figure": _figure,
}


def resolve_output(path) -> Path:
    path = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def run(config: RunConfig) -> dict:
    """Execute one configuration, write its output file and return a summary."""
    params = dict(DEFAULTS[config.command])
    params.update({k: v for k, v in config.params.items() if v is not None})
    check_params(config.command, {k: v for k, v in params.items() if v is not None}, "<run>")
    table = HANDLERS[config.command](params)
    fmt = config.output.get("format") or DEFAULT_FORMAT.get(config.command, "csv")
    path = config.output.get("path")
    if path is None:
        stem = params["name"] if config.command == "figure" else config.command
        path = f"{stem}.{fmt}"
    path = resolve_output(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(table, fmt))
    return {"command": config.command, "path": str(path), "format": fmt,
            "rows": len(table.rows), **_jsonable(table.meta)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dampedqho", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sp = sub.add_parser(command)
        sp.add_argument("--config", help="JSON run configuration")
        sp.add_argument("--output", "-o", help="output file")
        sp.add_argument("--format", choices=["csv", "json"])
        if command == "figure":
            sp.add_argument("name", nargs="?", help="figure preset")
            sp.add_argument("--all", action="store_true", help="write every preset")
            continue
        for name in COMMAND_PARAMS[command]:
            jtype, conv, help_ = PARAMS[name]
            flag = "--" + name.replace("_", "-")
            if jtype == "boolean":
                sp.add_argument(flag, dest=name, action="store_const", const=True, help=help_)
            elif name in ENUMS:
                sp.add_argument(flag, dest=name, choices=ENUMS[name], help=help_)
            else:
                sp.add_argument(flag, dest=name, type=conv, help=help_)
    return parser


def _exit_code(exc) -> int:
    if isinstance(exc, SchemaError):
        return EXIT_SCHEMA
    if isinstance(exc, UsageError):
        return EXIT_USAGE
    if isinstance(exc, (DomainError, RegimeError)):
        return EXIT_DOMAIN
    if isinstance(exc, DampedQHOError):
        return EXIT_NUMERICAL
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_NUMERICAL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configs = _configs_from_args(args)
        for config in configs:
            print(json.dumps(run(config), sort_keys=True))
    except (DampedQHOError, OSError) as exc:
        category = getattr(exc, "category", "io" if isinstance(exc, OSError) else "error")
        print(f"error[{category}]: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


def _configs_from_args(args):
    if args.config:
        base = load_config(args.config)
        if base.command != args.command:
            raise SchemaError(f"{args.config}: field command: {base.command!r} does not match "
                              f"subcommand {args.command!r}")
    else:
        base = RunConfig(args.command)
    flags = {k: getattr(args, k) for k in COMMAND_PARAMS[args.command]
             if getattr(args, k, None) is not None}
    params = {**base.params, **flags}
    output = dict(base.output)
    if args.output:
        output["path"] = args.output
    if args.format:
        output["format"] = args.format
    if args.command == "figure" and getattr(args, "all", False):
        outdir = Path(output.get("path", "."))
        fmt = output.get("format", "csv")
        return [RunConfig("figure", {"name": n}, {"path": str(outdir / f"{n}.{fmt}"), "format": fmt})
                for n in sorted(FIGURES)]
    if args.command == "figure" and "name" not in params:
        raise UsageError("figure name required (or --all)")
    return [RunConfig(args.command, params, output)]


if __name__ == "__main__":
    sys.exit(main())
