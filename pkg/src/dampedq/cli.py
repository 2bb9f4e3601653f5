"""Command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 on domain errors (the error
name and message go to stderr as JSON).  Complex numbers are written as
``[re, im]`` in JSON and as paired ``re``/``im`` columns in CSV.
"""

from dataclasses import dataclass, field
import argparse
import io
import json
import math
import os
import sys

import numpy as np

from . import checks, classical, pseudoq, solder
from .errors import DampedQError
from .params import (
    ChiralParams,
    DhoParams,
    RegimeKind,
    chiral_to_physical,
    classify,
    frequencies,
    parse_number,
    physical_to_chiral,
)

COMMANDS = ("classify", "map", "simulate", "solder", "diagonalize", "spectrum", "checks")
DEFAULT_FORMAT = {"simulate": "csv", "spectrum": "csv"}
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output_path: str = None
    format: str = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format is None:
            self.format = DEFAULT_FORMAT.get(self.command, "json")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")

    @classmethod
    def from_dict(cls, data):
        if "command" not in data:
            raise UsageError("config needs a 'command' key")
        unknown = set(data) - {"command", "params", "output_path", "format", "seed"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            data["command"],
            dict(data.get("params") or {}),
            data.get("output_path"),
            data.get("format"),
            int(data.get("seed", DEFAULT_SEED)),
        )


def _num(v):
    """JSON number: integral values as ints, ``inf`` as a string."""
    v = float(v)
    if math.isinf(v):
        return "inf"
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def _pair(z):
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _get(params, key, parse=parse_number, default=None, required=True):
    if key in params and params[key] is not None:
        v = params[key]
        try:
            return parse(v) if isinstance(v, str) else v
        except ValueError as exc:
            raise UsageError(f"bad value for {key}: {v!r}") from exc
    if default is not None or not required:
        return default
    raise UsageError(f"missing parameter {key!r}")


def _complex(text):
    return complex(str(text).replace(" ", "").replace("i", "j"))


def _dho(params):
    return DhoParams(_get(params, "m"), _get(params, "gamma"), _get(params, "k"))


def _has(params, *keys):
    return all(params.get(k) is not None for k in keys)


def _chiral(params):
    if _has(params, "g", "kappa"):
        return ChiralParams.complex(float(_get(params, "g")), _get(params, "kappa", _complex))
    return ChiralParams.real(_get(params, "Gamma"), _get(params, "k_plus"), _get(params, "k_minus"))


def _chiral_dict(c):
    out = {"regime": c.regime_tag.value, "Gamma": _pair(c.Gamma), "k_plus": _pair(c.k_plus), "k_minus": _pair(c.k_minus)}
    if c.is_complex:
        out.update(g=_num(c.g), kappa=_pair(c.kappa))
    return out


def cmd_classify(cfg):
    p = _dho(cfg.params)
    r = classify(p)
    out = {"R": _num(r.R), "kind": r.kind.value}
    if r.kind is RegimeKind.UNDERDAMPED:
        f = frequencies(p)
        out.update(Omega=_num(f.Omega), omega_plus=_pair(f.omega_plus), omega_minus=_pair(f.omega_minus))
    return out


def cmd_map(cfg):
    if _has(cfg.params, "m", "gamma", "k"):
        p = _dho(cfg.params)
        return {"direction": "physical_to_chiral", "chiral": _chiral_dict(physical_to_chiral(p))}
    p = chiral_to_physical(_chiral(cfg.params))
    return {"direction": "chiral_to_physical", "physical": {k: _num(v) for k, v in zip(("m", "gamma", "k"), p.astuple())}}


def cmd_solder(cfg):
    c = _chiral(cfg.params)
    route = _get(cfg.params, "route", str, default="auxiliary")
    fn = {"auxiliary": solder.solder_auxiliary, "direct": solder.solder_direct}.get(route)
    if fn is None:
        raise UsageError(f"unknown route {route!r}")
    report = fn(solder.chiral_lagrangian(+1, c), solder.chiral_lagrangian(-1, c))
    out = report.to_dict()
    out["route"] = route
    return out


def cmd_simulate(cfg):
    params = cfg.params
    p = _dho(params)
    t_end = float(_get(params, "t_end", default=10.0))
    dt = float(_get(params, "dt", default=0.01))
    max_step = float(_get(params, "max_step", default=classical.DEFAULT_STEP))
    nsteps = max(1, int(round(t_end / dt)))
    t = np.linspace(0.0, t_end, nsteps + 1)
    if _has(params, "x0"):
        vals = [_get(params, k, _complex, default=0) for k in ("x0", "v0", "y0", "vy0")]
        init = classical.PhaseState.from_physical(*(complex(v) for v in vals))
    else:
        A = _get(params, "A", _complex, default=1.0)
        init = classical.analytic_initial_state(p.as_float(), complex(A))
    traj = classical.integrate_doubled(p.as_float(), init, t, max_step=max_step)
    if cfg.format == "csv":
        buf = io.StringIO()
        traj.to_csv(buf)
        return buf.getvalue()
    return {
        "t": [float(v) for v in traj.times],
        "x1": [_pair(v) for v in traj.x1],
        "x2": [_pair(v) for v in traj.x2],
        "x": [_pair(v) for v in traj.x],
        "y": [_pair(v) for v in traj.y],
    }


def _omega_from(params):
    if _has(params, "omega"):
        return _get(params, "omega", _complex)
    return frequencies(_dho(params).as_float()).omega_plus


def _diagonalized(params):
    omega = _omega_from(params)
    D = int(_get(params, "dim", default=pseudoq.DEFAULT_DIM))
    ref = _get(params, "omega_ref", float, required=False)
    H = pseudoq.fock_matrix_hamiltonian(omega, ref, D)
    modes = int(_get(params, "modes", default=D // 4))
    if not 1 <= modes <= D:
        raise UsageError(f"modes must lie in 1..{D}")
    return pseudoq.biorthogonal_diagonalize(H), modes


def cmd_diagonalize(cfg):
    sys_, modes = _diagonalized(cfg.params)
    return sys_.to_dict(modes)


def cmd_spectrum(cfg):
    sys_, modes = _diagonalized(cfg.params)
    if cfg.format == "csv":
        buf = io.StringIO()
        pseudoq.write_spectrum_csv(sys_, modes, buf)
        return buf.getvalue()
    rows = pseudoq.spectrum_rows(sys_, modes)
    return {"modes": [{"n": n, "eigenvalue": [re, im], "biorth_residual": r} for n, re, im, r in rows]}


def cmd_checks(cfg):
    names = cfg.params.get("suites")
    if names is not None:
        if isinstance(names, str):
            names = [s for s in names.split(",") if s]
        bad = [s for s in names if s not in checks.SUITES]
        if bad:
            raise UsageError(f"unknown suites {bad}")
    return checks.report_json(checks.run_checks(cfg.seed, names))


HANDLERS = {
    "classify": cmd_classify,
    "map": cmd_map,
    "simulate": cmd_simulate,
    "solder": cmd_solder,
    "diagonalize": cmd_diagonalize,
    "spectrum": cmd_spectrum,
    "checks": cmd_checks,
}


def _write(text, path, stdout):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def run(cfg, stdout=None, stderr=None):
    """Execute a RunConfig; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        out = HANDLERS[cfg.command](cfg)
        if not isinstance(out, str):
            out = json.dumps(out, sort_keys=True, indent=2) + "\n"
        _write(out, cfg.output_path, stdout)
    except DampedQError as exc:
        stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return 2
    except UsageError as exc:
        stderr.write(f"dampedq: error: {exc}\n")
        return 1
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_PARAM_FLAGS = {
    "classify": ("m", "gamma", "k"),
    "map": ("m", "gamma", "k", "Gamma", "k-plus", "k-minus", "g", "kappa"),
    "simulate": ("m", "gamma", "k", "A", "t-end", "dt", "max-step", "x0", "v0", "y0", "vy0"),
    "solder": ("Gamma", "k-plus", "k-minus", "g", "kappa", "route"),
    "diagonalize": ("m", "gamma", "k", "omega", "omega-ref", "dim", "modes"),
    "spectrum": ("m", "gamma", "k", "omega", "omega-ref", "dim", "modes"),
    "checks": ("suites",),
}


def build_parser():
    parser = _Parser(prog="dampedq", description="Damped oscillator doubling, soldering and pseudo-hermitian spectra.")
    parser.add_argument("--config", help="JSON RunConfig file")
    common = _Parser(add_help=False)
    common.add_argument("-o", "--output", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--seed", type=int)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        for flag in _PARAM_FLAGS[name]:
            # values parsed later so rationals stay exact
            sp.add_argument(f"--{flag}", dest=flag.replace("-", "_"), type=str, metavar=flag.upper().replace("-", "_"))
    return parser


def config_from_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = RunConfig.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    elif args.command is None:
        raise UsageError("a command or --config is required")
    else:
        params = {k.replace("-", "_"): getattr(args, k.replace("-", "_")) for k in _PARAM_FLAGS[args.command]}
        cfg = RunConfig(args.command, {k: v for k, v in params.items() if v is not None})
    if args.command is not None and not args.config:
        cfg.output_path = args.output
        if args.format:
            cfg.format = args.format
        if args.seed is not None:
            cfg.seed = args.seed
    env = os.environ.get("DAMPEDQ_SEED")
    if env is not None:
        try:
            cfg.seed = int(env)
        except ValueError as exc:
            raise UsageError(f"DAMPEDQ_SEED must be an integer, got {env!r}") from exc
    return cfg


def main(argv=None):
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        sys.stderr.write(f"dampedq: error: {exc}\n")
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
