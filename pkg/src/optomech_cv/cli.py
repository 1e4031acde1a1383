"""optomech-cv command line: sweep, figures, classify, couplings."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import dynamics as dyn
from . import entanglement as ent
from . import quantities as qty
from . import teleportation as tel
from .gaussian_core import NumericalError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TOOL = "optomech-cv"
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3
REFERENCE_R = 1.0 + 2.5e-7
SWEEP_VARS = ("t_prime", "n_bar", "r")

SWEEP_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["tool", "version", "variable", "fixed", "columns", "rows"],
    "additionalProperties": False,
    "properties": {
        "tool": {"const": TOOL},
        "version": {"type": "string"},
        "variable": {"enum": list(SWEEP_VARS)},
        "fixed": {
            "type": "object",
            "additionalProperties": {"type": "number"},
        },
        "clamp_log": {"type": "number"},
        "columns": {"type": "array", "items": {"type": "string"}, "minItems": 2},
        "rows": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
    },
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    variable: str = "t_prime"
    start: float = 0.0
    stop: float = dyn.TWO_PI
    count: int = 101
    r: float = REFERENCE_R
    n_bar: float = 0.0
    t_prime: float = math.pi / 2
    quantities: tuple = ("fidelity_traced",)
    format: str = "csv"
    clamp_log: float = qty.DEFAULT_CLAMP_LOG
    jobs: int = 1
    out: str | None = None

    def validate(self) -> "SweepConfig":
        if self.variable not in SWEEP_VARS:
            raise UsageError(f"--var must be one of {', '.join(SWEEP_VARS)}")
        if self.count < 2:
            raise UsageError("--count must be >= 2")
        if not self.start < self.stop:
            raise UsageError("--start must be below --stop")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        if not self.quantities:
            raise UsageError("no quantities requested")
        try:
            qty.check_names(self.quantities)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        try:
            for x in (self.start, self.stop):
                self.point(x)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return self

    def grid(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def point(self, x: float) -> dyn.ScaledParams:
        values = {"t_prime": self.t_prime, "r": self.r, "n_bar": self.n_bar}
        values[self.variable] = float(x)
        return dyn.ScaledParams(**values)

    def fixed(self) -> dict:
        values = {"t_prime": self.t_prime, "r": self.r, "n_bar": self.n_bar}
        del values[self.variable]
        return values


# config-file / flag names -> SweepConfig fields
_KEYS = {
    "var": "variable", "start": "start", "stop": "stop", "count": "count",
    "r": "r", "nbar": "n_bar", "tprime": "t_prime", "quantities": "quantities",
    "format": "format", "clamp_log": "clamp_log", "clamp-log": "clamp_log",
    "jobs": "jobs", "out": "out",
}
_TYPES = {"variable": str, "start": float, "stop": float, "count": int, "r": float,
          "n_bar": float, "t_prime": float, "format": str, "clamp_log": float,
          "jobs": int, "out": str}


def _split_quantities(value) -> tuple:
    if isinstance(value, str):
        value = value.split(",")
    return tuple(v.strip() for v in value if v.strip())


def _coerce(name: str, value):
    if name == "quantities":
        return _split_quantities(value)
    try:
        if _TYPES[name] is int and isinstance(value, float):
            raise ValueError
        return _TYPES[name](value)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {name}: {value!r}") from None


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"malformed config {path}: {exc}") from None
    out = {}
    for key, value in raw.items():
        if key not in _KEYS:
            raise UsageError(f"unknown config key {key!r}")
        out[_KEYS[key]] = _coerce(_KEYS[key], value)
    return out


def build_sweep_config(args) -> SweepConfig:
    """Flags override config-file values, which override defaults."""
    values = load_config(args.config) if args.config else {}
    for flag in ("var", "start", "stop", "count", "r", "nbar", "tprime", "quantities",
                 "format", "clamp_log", "jobs", "out"):
        v = getattr(args, flag, None)
        if v is not None:
            values[_KEYS[flag]] = _coerce(_KEYS[flag], v)
    return SweepConfig(**values).validate()


def _row(task):
    cfg, x = task
    return [float(x)] + qty.evaluate(cfg.point(x), cfg.quantities, cfg.clamp_log)


def run_sweep(cfg: SweepConfig) -> list:
    tasks = [(cfg, x) for x in cfg.grid()]
    if cfg.jobs == 1:
        return [_row(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(_row, tasks, chunksize=max(1, len(tasks) // (4 * cfg.jobs))))


def format_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow(["%.16e" % v for v in row])
    return buf.getvalue()


def format_json(cfg: SweepConfig, columns, rows) -> str:
    doc = {
        "tool": TOOL,
        "version": __version__,
        "variable": cfg.variable,
        "fixed": cfg.fixed(),
        "clamp_log": cfg.clamp_log,
        "columns": list(columns),
        "rows": rows,
    }
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", newline="\n", encoding="utf-8") as fh:
        fh.write(text)


def cmd_sweep(args) -> int:
    cfg = build_sweep_config(args)
    rows = run_sweep(cfg)
    columns = [cfg.variable, *cfg.quantities]
    text = format_csv(columns, rows) if cfg.format == "csv" else format_json(cfg, columns, rows)
    _emit(text, cfg.out)
    return EXIT_OK


@dataclass(frozen=True)
class FigurePreset:
    quantity: str
    n_bars: tuple
    start: float
    stop: float
    count: int
    extra: tuple = field(default=())


_NEAR_2PI = dyn.TWO_PI - 0.005
FIGURES = {
    "negativity": FigurePreset("log_neg_b", (0.0, 0.1, 1.0, 1e7), 0.0, dyn.TWO_PI, 401,
                               ("log_neg_b_flag",)),
    "upsilon3": FigurePreset("upsilon3", (0.0, 1e5, 5e6, 1e7), 0.0, dyn.TWO_PI, 2001),
    "upsilon2": FigurePreset("upsilon2", (0.0, 1e-8, 1e-7), 0.0, dyn.TWO_PI, 2001),
    "upsilon2_zoom": FigurePreset("upsilon2", (1e3,), dyn.TWO_PI - 0.003, dyn.TWO_PI, 2001),
    "fid_traced": FigurePreset("fidelity_traced", (0.0, 1.0, 10.0, 1e3), _NEAR_2PI,
                               dyn.TWO_PI, 2001),
    "fid_het": FigurePreset("fidelity_het", (0.0, 1.0, 10.0, 1e3), _NEAR_2PI,
                            dyn.TWO_PI, 2001),
    "info_gain": FigurePreset("info_gain", (0.0, 1.0, 10.0, 1e3), _NEAR_2PI,
                              dyn.TWO_PI, 2001),
}
_SCAN_KIND = {"fid_traced": tel.ChannelKind.TracedOut,
              "fid_het": tel.ChannelKind.HeterodyneConditioned}


def _curve_summary(x, y) -> dict:
    i_max, i_min = int(np.argmax(y)), int(np.argmin(y))
    return {"max": float(y[i_max]), "t_prime_at_max": float(x[i_max]),
            "min": float(y[i_min]), "t_prime_at_min": float(x[i_min])}


def cmd_figures(args) -> int:
    if args.figure_id not in FIGURES:
        raise UsageError(f"unknown figure {args.figure_id!r}; choose from {', '.join(FIGURES)}")
    preset = FIGURES[args.figure_id]
    out_dir = Path(args.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create {out_dir}: {exc}") from None
    curves = []
    for n_bar in preset.n_bars:
        cfg = SweepConfig(variable="t_prime", start=preset.start, stop=preset.stop,
                          count=preset.count, r=REFERENCE_R, n_bar=n_bar,
                          quantities=(preset.quantity, *preset.extra),
                          jobs=args.jobs).validate()
        rows = run_sweep(cfg)
        name = f"{args.figure_id}_nbar_{n_bar:g}.csv"
        try:
            _emit(format_csv(["t_prime", *cfg.quantities], rows), out_dir / name)
        except OSError as exc:
            raise UsageError(f"cannot write {out_dir / name}: {exc}") from None
        arr = np.array(rows)
        curve = {"n_bar": n_bar, "file": name, "summary": _curve_summary(arr[:, 0], arr[:, 1])}
        if args.figure_id in _SCAN_KIND:
            t_max, f_max = tel.optimal_fidelity_scan(None, REFERENCE_R, n_bar,
                                                     _SCAN_KIND[args.figure_id])
            curve["peak"] = {"t_prime": t_max, "fidelity": f_max}
        curves.append(curve)
    manifest = {
        "tool": TOOL,
        "version": __version__,
        "figure": args.figure_id,
        "preset": {"r": REFERENCE_R, "variable": "t_prime", "start": preset.start,
                   "stop": preset.stop, "count": preset.count,
                   "quantities": [preset.quantity, *preset.extra]},
        "curves": curves,
    }
    _emit(json.dumps(manifest, indent=2, sort_keys=True) + "\n", out_dir / "manifest.json")
    return EXIT_OK


def classify_report(s: dyn.ScaledParams) -> str:
    cls = ent.classify(s)
    lines = [
        f"t_prime = {s.t_prime!r}, r = {s.r!r}, n_bar = {s.n_bar!r}",
        f"class: {cls.label.value} ({cls.label.name})",
        f"eta_1 = {cls.eta_1:.6e}",
        f"eta_2 = {cls.eta_2:.6e}",
        f"eta_b = {cls.eta_b:.6e}",
        f"tolerance = {cls.tol:.1e}",
    ]
    for j in (1, 2, 3):
        lines.append(f"upsilon{j} = {ent.simon_marker(s, j).value:.6e}")
    if cls.eta_b < -cls.tol:
        lines.append(f"log10|eta_b| = {math.log10(-cls.eta_b):.6f}")
    else:
        lines.append("log10|eta_b| = non-negative")
    if cls.label is ent.EntanglementLabel.ThreeModeBiseparableOrSeparable \
            and dyn.reduce_time(s.t_prime) == 0.0:
        lines.append("note: fully separable here (the initial product state)")
    return "\n".join(lines) + "\n"


def cmd_classify(args) -> int:
    try:
        s = dyn.ScaledParams(args.tprime, args.r, args.nbar)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(classify_report(s))
    return EXIT_OK


def couplings_report(p: dyn.PhysicalParams) -> str:
    c = dyn.couplings_from_physical(p)
    # r - 1 from r^2 - 1 = 2 Omega / (omega0 - Omega), without cancellation
    r_minus_1 = 2 * p.mechanical_frequency / (p.carrier_frequency - p.mechanical_frequency) / (c.r + 1)
    return "\n".join([
        f"chi = {c.chi:.6e} rad/s",
        f"theta = {c.theta:.6e} rad/s",
        f"r = {c.r!r}",
        f"r - 1 = {r_minus_1:.6e}",
        f"Theta = {c.big_theta:.6e} rad/s",
        f"pulse duration for t' = 2 pi: {c.pulse_duration():.6e} s",
    ]) + "\n"


def cmd_couplings(args) -> int:
    try:
        p = dyn.PhysicalParams(args.power, args.carrier, args.mechanical, args.det_bandwidth,
                               args.mode_bandwidth, args.mass, args.angle)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(couplings_report(p))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description=__doc__)
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="tabulate quantities over a 1-D grid")
    sw.add_argument("--var", choices=SWEEP_VARS)
    sw.add_argument("--start", type=float)
    sw.add_argument("--stop", type=float)
    sw.add_argument("--count", type=int)
    sw.add_argument("--r", type=float)
    sw.add_argument("--nbar", type=float)
    sw.add_argument("--tprime", type=float)
    sw.add_argument("--quantities", help="comma list; see `list` for names")
    sw.add_argument("--format", choices=("csv", "json"))
    sw.add_argument("--out", help="output file (default stdout)")
    sw.add_argument("--config", help="TOML file with the same keys")
    sw.add_argument("--clamp-log", dest="clamp_log", type=float)
    sw.add_argument("--jobs", type=int)
    sw.set_defaults(func=cmd_sweep)

    fg = sub.add_parser("figures", help="write the bundled figure datasets")
    fg.add_argument("figure_id", help=", ".join(FIGURES))
    fg.add_argument("output_dir")
    fg.add_argument("--jobs", type=int, default=1)
    fg.set_defaults(func=cmd_figures)

    cl = sub.add_parser("classify", help="entanglement report at one point")
    cl.add_argument("--tprime", type=float, required=True)
    cl.add_argument("--r", type=float, default=REFERENCE_R)
    cl.add_argument("--nbar", type=float, default=0.0)
    cl.set_defaults(func=cmd_classify)

    cp = sub.add_parser("couplings", help="couplings from laboratory parameters")
    cp.add_argument("--power", type=float, default=10.0, help="W")
    cp.add_argument("--carrier", type=float, default=2e15, help="rad/s")
    cp.add_argument("--mechanical", type=float, default=5e8, help="rad/s")
    cp.add_argument("--det-bandwidth", type=float, default=1e7, help="Hz")
    cp.add_argument("--mode-bandwidth", type=float, default=1e3, help="Hz")
    cp.add_argument("--mass", type=float, default=1e-10, help="kg")
    cp.add_argument("--angle", type=float, default=0.0, help="incidence angle, rad")
    cp.set_defaults(func=cmd_couplings)

    ls = sub.add_parser("list", help="print the quantity registry")
    ls.set_defaults(func=cmd_list)
    return parser


def cmd_list(args) -> int:
    for name in qty.REGISTRY:
        sys.stdout.write(f"{name}\t{qty.DESCRIPTIONS[name]}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"{TOOL}: error: {exc}\n")
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        sys.stderr.write(f"{TOOL}: numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
