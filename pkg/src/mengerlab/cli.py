"""Command-line front end: ``mengerlab <subcommand> ...``.

Exit codes: 0 success, 2 precondition error, 3 accuracy error, 4 usage error.
Output files go to ``--output-dir`` (or ``$MENGERLAB_OUTPUT_DIR``, or the
current directory); every file-producing run also writes one manifest.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import math
import os
import platform
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .curve import CROSSING_TOL, load_curve, make_fixture, quality_report, refined_min_separation, save_curve
from .energy import EnergyParams, MengerEnergy, energy_report
from .errors import AccuracyError, MengerError, ParameterError, PreconditionError
from .flow import FlowConfig, find_critical_point
from .quadrature import QuadratureConfig

log = logging.getLogger("mengerlab")

EXIT_OK, EXIT_PRECONDITION, EXIT_ACCURACY, EXIT_USAGE = 0, 2, 3, 4
OUTPUT_ENV = "MENGERLAB_OUTPUT_DIR"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- serialization


def fmt(x) -> str:
    """A float with 17 significant digits, JSON spelling for non-finite values."""
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.floating, np.integer)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def write_csv(path_or_fh, header, rows):
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])

    if hasattr(path_or_fh, "write"):
        emit(path_or_fh)
    else:
        with open(path_or_fh, "w", newline="") as fh:
            emit(fh)


def sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


# ---------------------------------------------------------------- configuration


@dataclass(frozen=True)
class GlobalConfig:
    """Defaults for every module, read from an INI file and overridden by flags."""

    p: float = 2.5
    q: float = 2.0
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    flow: FlowConfig = field(default_factory=FlowConfig)
    outputDir: str = "."
    workers: int = 1

    def params(self, p=None, q=None) -> EnergyParams:
        return EnergyParams(self.p if p is None else p, self.q if q is None else q, self.quad)

    def snapshot(self) -> dict:
        return {
            "energy": {"p": self.p, "q": self.q},
            "quadrature": asdict(self.quad),
            "flow": asdict(self.flow),
            "output": {"dir": self.outputDir},
            "parallel": {"workers": self.workers},
        }


def _coerce(cls, section: configparser.SectionProxy):
    kinds = {f.name: f.type for f in fields(cls)}
    out = {}
    for key, raw in section.items():
        match = next((n for n in kinds if n.lower() == key.lower()), None)
        if match is None:
            raise ParameterError(f"unknown key {key!r} in [{section.name}]")
        t = str(kinds[match])
        if raw.strip().lower() == "none":
            out[match] = None
        elif "int" in t and "float" not in t:
            out[match] = int(raw)
        else:
            out[match] = float(raw)
    return cls(**out)


def load_config(path=None, env=None) -> GlobalConfig:
    """Read sections [energy], [quadrature], [flow], [output], [parallel]."""
    env = os.environ if env is None else env
    cfg = GlobalConfig()
    if path is not None:
        cp = configparser.ConfigParser()
        if not cp.read(path):
            raise ParameterError(f"cannot read config file {path}")
        known = {"energy", "quadrature", "flow", "output", "parallel"}
        extra = set(cp.sections()) - known
        if extra:
            raise ParameterError(f"unknown config sections {sorted(extra)}")
        if cp.has_section("energy"):
            e = cp["energy"]
            cfg = replace(cfg, p=e.getfloat("p", cfg.p), q=e.getfloat("q", cfg.q))
        if cp.has_section("quadrature"):
            cfg = replace(cfg, quad=_coerce(QuadratureConfig, cp["quadrature"]))
        if cp.has_section("flow"):
            cfg = replace(cfg, flow=_coerce(FlowConfig, cp["flow"]))
        if cp.has_section("output"):
            cfg = replace(cfg, outputDir=cp["output"].get("dir", cfg.outputDir))
        if cp.has_section("parallel"):
            cfg = replace(cfg, workers=cp["parallel"].getint("workers", cfg.workers))
    if env.get(OUTPUT_ENV):
        cfg = replace(cfg, outputDir=env[OUTPUT_ENV])
    return cfg


# ---------------------------------------------------------------- manifest


@dataclass
class RunManifest:
    command: list
    config: dict
    inputs: dict
    outputs: dict = field(default_factory=dict)
    version: str = __version__
    timestamp: str = ""
    extra: dict = field(default_factory=dict)

    def add_output(self, path):
        self.outputs[str(path)] = sha256(path)

    def write(self, path):
        self.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        body = {
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "version": self.version,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "timestamp": self.timestamp,
        }
        body.update(self.extra)
        Path(path).write_text(dumps(body) + "\n")
        return path


def verify_manifest(path) -> bool:
    """True when every recorded input and output still has its recorded hash."""
    data = json.loads(Path(path).read_text())
    for group in ("inputs", "outputs"):
        for name, digest in data[group].items():
            if not Path(name).exists() or sha256(name) != digest:
                return False
    return True


class _Run:
    """Collects outputs of one invocation and writes its manifest."""

    def __init__(self, args, cfg: GlobalConfig, inputs=()):
        self.dir = Path(args.output_dir or cfg.outputDir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.manifest = RunManifest(list(args.argv), cfg.snapshot(), {str(p): sha256(p) for p in inputs})
        self.name = args.command

    def path(self, name):
        return self.dir / name

    def output(self, path):
        self.manifest.add_output(path)
        return path

    def close(self, **extra):
        self.manifest.extra.update(extra)
        return self.manifest.write(self.dir / f"{self.name}.manifest.json")


# ---------------------------------------------------------------- commands


def _emit(obj):
    sys.stdout.write(dumps(obj) + "\n")


def _floats(text: str, n: int | None = None, name: str = "value"):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"{name} must be comma-separated numbers") from exc
    if n is not None and len(vals) != n:
        raise UsageError(f"{name} needs {n} numbers")
    return vals


def cmd_curve_make(args, cfg):
    kw = {}
    for key in ("a", "b", "R", "r", "mode", "amplitude"):
        if getattr(args, key) is not None:
            kw[key] = getattr(args, key)
    if args.knot_p is not None:
        kw["p"] = args.knot_p
    if args.knot_q is not None:
        kw["q"] = args.knot_q
    bandwidth = args.N if args.N is not None else (1 if args.shape == "circle" else 64)
    curve = make_fixture(args.shape, args.n, bandwidth, strict=False, **kw)
    qr = quality_report(curve)
    closest = refined_min_separation(curve)
    warn = not qr.simple or closest < CROSSING_TOL
    run = _Run(args, cfg)
    out = Path(args.output) if args.output else run.path(f"{args.shape}.json")
    data = curve.to_json_dict()
    data["topologyWarning"] = warn
    data["lengthDeviation"] = qr.lengthDeviation
    out.write_text(json.dumps(data) + "\n")
    run.output(out)
    run.close()
    if warn:
        log.warning("fixture is not numerically simple (closest approach %.3e)", closest)
    _emit({"curve": str(out), "topologyWarning": warn, "closestApproach": closest, "quality": asdict(qr)})
    return EXIT_OK


def cmd_curve_info(args, cfg):
    curve = load_curve(args.curve)
    qr = quality_report(curve)
    _emit({"dim": curve.dim, "bandwidth": curve.bandwidth, "simple": qr.simple, "quality": asdict(qr)})
    return EXIT_OK


def cmd_energy(args, cfg):
    curve = load_curve(args.curve)
    res = energy_report(curve, cfg.params(args.p, args.q))
    d = res.to_dict()
    d.update({"quadratureError": res.quadratureError, "uError": res.uError, "nodes": res.nodes})
    _emit(d)
    return EXIT_OK


def cmd_gradient(args, cfg):
    curve = load_curve(args.curve)
    params = cfg.params(args.p, args.q)
    fn = MengerEnergy.for_curve(curve, params)
    value, grad = fn.value_and_gradient(curve)
    run = _Run(args, cfg, [args.curve])
    out = Path(args.output) if args.output else run.path("gradient.json")
    save_curve(grad, out)
    run.output(out)
    run.close()
    _emit({"energy": value, "gradient": str(out), "gradientL2": float(np.sqrt(np.sum(np.abs(grad.coeffs) ** 2)))})
    return EXIT_OK


def cmd_multiplier(args, cfg):
    from .variation import multiplier_table

    table = multiplier_table(args.p, args.kmax)
    rows = [(k, r, q) for k, r, q in table.entries()]
    buf = io.StringIO()
    write_csv(buf, ["k", "rho", "q"], rows)
    sys.stdout.write(buf.getvalue())
    if args.output:
        run = _Run(args, cfg)
        out = Path(args.output)
        out.write_text(buf.getvalue())
        run.output(out)
        run.close(cEstimate=table.cEstimate)
    return EXIT_OK


def cmd_elresidual(args, cfg):
    from .variation import euler_lagrange_residual

    curve = load_curve(args.curve)
    el = euler_lagrange_residual(curve, cfg.params(args.p, 2.0))
    _emit({"residualNorm": el.residualNorm, "lambda": el.lam, "gradientNorm": el.gradientNorm, "relativeResidual": el.relativeResidual})
    return EXIT_OK


def cmd_flow(args, cfg):
    init = load_curve(args.init)
    fcfg = cfg.flow
    if args.iters is not None:
        fcfg = replace(fcfg, maxIters=args.iters)
    if args.tol is not None:
        fcfg = replace(fcfg, residualTol=args.tol)
    if args.step is not None:
        fcfg = replace(fcfg, step=args.step)
    params = cfg.params(args.p, 2.0)
    cfg = replace(cfg, flow=fcfg, p=params.p)
    state = find_critical_point(init, fcfg, params)
    run = _Run(args, cfg, [args.init])
    final = run.path("final.json")
    save_curve(state.curve, final)
    hist = run.path("history.csv")
    rows = zip(range(len(state.energyHistory)), state.energyHistory, state.residualHistory, state.lambdaHistory)
    write_csv(hist, ["iter", "energy", "residual", "lambda"], rows)
    run.output(final)
    run.output(hist)
    run.close(converged=bool(state.converged), iterations=state.iter)
    _emit({"converged": bool(state.converged), "iterations": state.iter, "energy": state.energy,
           "residual": state.residual, "lambda": state.lam, "final": str(final), "history": str(hist)})
    return EXIT_OK if state.converged else EXIT_ACCURACY


def cmd_diagnose(args, cfg):
    from .analysis.diagnostics import analyticity_diagnostics

    curve = load_curve(args.curve)
    _emit(analyticity_diagnostics(curve, args.lmax).to_dict())
    return EXIT_OK


def _parse_alpha(key: str):
    key = key.strip().strip("()[]")
    return tuple(int(t) for t in key.split(",") if t.strip() != "")


def cmd_faadibruno(args, cfg):
    from .analysis.faadibruno import UniversalPolyInput, faa_di_bruno, multi_indices

    data = json.loads(Path(args.input).read_text())
    try:
        k, n = int(data["k"]), int(data["n"])
        if "yAll" in data:
            y = {a: float(data["yAll"]) for a in multi_indices(n, k)}
        else:
            y = {_parse_alpha(a): float(v) for a, v in data["y"].items()}
        x = tuple(tuple(float(v) for v in row) for row in data["x"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed Faa di Bruno input: {exc}") from exc
    _emit({"k": k, "n": n, "value": float(faa_di_bruno(UniversalPolyInput(k, n, y, x)))})
    return EXIT_OK


def cmd_majorant(args, cfg):
    from .analysis.majorant import MajorantConfig, factorial_growth_fit, majorant_ode, majorant_sequence

    mc = MajorantConfig.from_dict(json.loads(Path(args.config_json).read_text())) if args.config_json else MajorantConfig()
    seq = majorant_sequence(mc, args.L)
    ode = majorant_ode(mc, args.L)
    rows = [(l, float(seq[l]), float(ode[l]), float(abs(ode[l] / seq[l] - 1))) for l in range(args.L + 1)]
    fit = factorial_growth_fit(seq)
    buf = io.StringIO()
    write_csv(buf, ["l", "majorant", "ode", "relDiff"], rows)
    sys.stdout.write(buf.getvalue())
    if args.output:
        run = _Run(args, cfg, [args.config_json] if args.config_json else [])
        out = Path(args.output)
        out.write_text(buf.getvalue())
        run.output(out)
        fjson = out.with_suffix(".fit.json")
        fjson.write_text(dumps({"config": mc.to_dict(), "growthFit": fit.to_dict()}) + "\n")
        run.output(fjson)
        run.close()
    else:
        log.info("growth fit: %s", fit)
    return EXIT_OK


def _scalar_input(path, modes):
    from .sobolev import cosine, scalar_series

    if path:
        return load_curve(path)
    if modes:
        return scalar_series(_floats(modes, name="modes"))
    return cosine(1)


def cmd_leibniz(args, cfg):
    from .analysis.leibniz import fractional_leibniz_check

    f = _scalar_input(args.f, args.f_modes)
    g = _scalar_input(args.g, args.g_modes)
    res = fractional_leibniz_check(f, g, args.m, args.p, args.case, args.s1, args.s2, cfg.quad, args.refine)
    _emit(res.to_dict())
    return EXIT_OK


def cmd_intersect(args, cfg):
    from .analysis.diagnostics import Plane, Sphere, intersection_count

    curve = load_curve(args.curve)
    if (args.plane is None) == (args.sphere is None):
        raise UsageError("give exactly one of --plane or --sphere")
    if args.plane is not None:
        vals = _floats(args.plane, curve.dim + 1, "--plane")
        surface = Plane(tuple(vals[:-1]), vals[-1])
    else:
        vals = _floats(args.sphere, curve.dim + 1, "--sphere")
        surface = Sphere(tuple(vals[:-1]), vals[-1])
    _emit(intersection_count(curve, surface, args.tol).to_dict())
    return EXIT_OK


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="mengerlab", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="INI file with [energy], [quadrature], [flow], [output], [parallel]")
    ap.add_argument("--output-dir", help=f"output directory (overrides ${OUTPUT_ENV})")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    ap.add_argument("--version", action="version", version=f"mengerlab {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        return sp

    sp = add("curve-make", cmd_curve_make, "write a unit-length arc-length fixture curve")
    sp.add_argument("--shape", required=True, choices=["circle", "ellipse", "torus-knot", "perturbed"])
    sp.add_argument("--n", type=int, default=3, help="ambient dimension")
    sp.add_argument("--N", type=int, help="bandwidth")
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--knot-p", type=int)
    sp.add_argument("--knot-q", type=int)
    sp.add_argument("--R", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--mode", type=int)
    sp.add_argument("--amplitude", type=float)
    sp.add_argument("-o", "--output")

    sp = add("curve-info", cmd_curve_info, "quality report of a curve file")
    sp.add_argument("curve")

    sp = add("energy", cmd_energy, "evaluate intM^(p,q)")
    sp.add_argument("curve")
    sp.add_argument("--p", type=float)
    sp.add_argument("--q", type=float)

    sp = add("gradient", cmd_gradient, "L2 gradient of intM^(p,q) as a curve file")
    sp.add_argument("curve")
    sp.add_argument("--p", type=float)
    sp.add_argument("--q", type=float)
    sp.add_argument("-o", "--output")

    sp = add("multiplier", cmd_multiplier, "table of rho_k and q_k as CSV")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--kmax", type=int, default=32)
    sp.add_argument("-o", "--output")

    sp = add("elresidual", cmd_elresidual, "Euler-Lagrange residual with fitted multiplier")
    sp.add_argument("curve")
    sp.add_argument("--p", type=float)

    sp = add("flow", cmd_flow, "descend to a length-constrained critical curve")
    sp.add_argument("--init", required=True)
    sp.add_argument("--p", type=float)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--step", type=float)

    sp = add("diagnose", cmd_diagnose, "analyticity diagnostics as JSON")
    sp.add_argument("curve")
    sp.add_argument("--lmax", type=int, default=12)

    sp = add("faadibruno", cmd_faadibruno, "evaluate p_k^(n) from a JSON input")
    sp.add_argument("input")

    sp = add("majorant", cmd_majorant, "majorant sequence and ODE coefficients as CSV")
    sp.add_argument("--config", dest="config_json", help="JSON MajorantConfig")
    sp.add_argument("--L", type=int, default=12)
    sp.add_argument("-o", "--output")

    sp = add("leibniz", cmd_leibniz, "fractional Leibniz lhs and rhs product")
    sp.add_argument("--case", type=int, required=True, choices=[1, 2, 3, 4])
    sp.add_argument("--f", help="scalar curve file")
    sp.add_argument("--g", help="scalar curve file")
    sp.add_argument("--f-modes", help="comma-separated f_hat(1..N) (default cos)")
    sp.add_argument("--g-modes", help="comma-separated g_hat(1..N) (default cos)")
    sp.add_argument("--m", type=float, default=1.0)
    sp.add_argument("--p", type=float, default=2.5)
    sp.add_argument("--s1", type=float, default=1.0)
    sp.add_argument("--s2", type=float, default=0.0)
    sp.add_argument("--refine", type=int, default=0)

    sp = add("intersect", cmd_intersect, "count intersections with a plane or sphere")
    sp.add_argument("curve")
    sp.add_argument("--plane", help="n1,...,nd,offset")
    sp.add_argument("--sphere", help="c1,...,cd,radius")
    sp.add_argument("--tol", type=float, default=1e-10)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    args.argv = ["mengerlab", *argv]
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (PreconditionError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"precondition error: {exc}\n")
        return EXIT_PRECONDITION
    except AccuracyError as exc:
        sys.stderr.write(f"accuracy error: {exc}\n")
        return EXIT_ACCURACY
    except MengerError as exc:  # pragma: no cover - every library error is one of the above
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
