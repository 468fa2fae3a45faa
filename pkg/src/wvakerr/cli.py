"""Command-line front end.

    wvakerr point [KEY=VALUE ...]
    wvakerr fig fig1d [KEY=VALUE ...]
    wvakerr sweep axis=chi start=1e-3 stop=0.1 points=50 log_spaced=true
    wvakerr estimate-chi --g1 1 --g2 1 --delta1 10 --delta2 100

Parameters come from ``--config`` (key=value lines or a JSON object) and are
overridden by KEY=VALUE arguments. Angles accept a ``pi`` suffix
(``theta_f=1.5pi``, ``phi_0=pi``, ``theta_i=pi/2``).
"""

import argparse
import io
import json
import math
import re
import sys
from dataclasses import dataclass

from .errors import ConfigError, DegeneratePostselection, PathMismatch, ZeroDetuning
from .fock_core import DEFAULT_TAIL_TOL, CoherentProbe, CouplingConfig
from .infotheory import fisher_report
from .postselect import PpsAngles
from .scaling import (
    FIG4_CHI,
    FIG4_N_RANGE,
    FIG4_POINTS,
    FixedParams,
    SweepAxis,
    SweepSpec,
    run_sweep,
    scaling_fits,
)

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_IO = 0, 1, 2, 3, 4

ANGLE_KEYS = ("theta_i", "theta_f", "phi_0")
FLOAT_KEYS = ("mean_photons", "chi", "tail_tol")
KNOWN_KEYS = frozenset(ANGLE_KEYS + FLOAT_KEYS + ("order", "format", "axis", "start", "stop", "points", "log_spaced"))
ALIASES = {"N": "mean_photons", "n": "mean_photons", "phi0": "phi_0"}

# the figures' common setting: theta_i = pi/2, phi_0 = pi, N = 8
BASE_PARAMS = {"theta_i": "0.5pi", "theta_f": "0.5pi", "phi_0": "pi", "mean_photons": "8", "chi": "0.01"}

FIG1_CHI = {"fig1a": 0.001, "fig1b": 0.005, "fig1c": 0.01, "fig1d": 0.1}
FIG3_CHIS = (0.001, 0.01, 0.1)
FIG3_DISPLAY_CHI = 0.001
FIG3_DISPLAY_SCALE = 1e3
FIGURES = tuple(FIG1_CHI) + ("fig2", "fig3", "fig4")

TABLE_COLUMNS = ("p_f", "wva_fi", "wva_qfi", "q_cm", "degenerate")
POINT_FIELDS = ("p_f", "F_f", "Q_f", "wva_fi", "wva_qfi", "q_cm", "crb", "n_max")

_ANGLE_RE = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


def parse_angle(text):
    """Parse radians, accepting multiples of pi: ``1.5pi``, ``-pi``, ``3pi/2``, ``pi/2``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip()
    sign = 1.0
    if s.startswith("-") and s[1:].lstrip().startswith("pi"):
        sign, s = -1.0, s[1:]
    m = _ANGLE_RE.match(s)
    if m:
        coef = float(m.group(1)) if m.group(1) else 1.0
        denom = float(m.group(2)) if m.group(2) else 1.0
        return sign * coef * math.pi / denom
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def _parse_bool(text):
    if isinstance(text, bool):
        return text
    s = str(text).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"cannot parse boolean {text!r}")


def _parse_float(key, text):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot parse number {text!r}") from None


def parse_pairs(items):
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        key = ALIASES.get(key.strip(), key.strip())
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown parameter {key!r}")
        out[key] = value.strip()
    return out


def load_config_file(path):
    """Raw parameters from a JSON object or key=value lines (``#`` comments allowed)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from None
        return parse_pairs(f"{k}={v}" for k, v in data.items())
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    return parse_pairs(ln for ln in lines if ln)


@dataclass(frozen=True)
class ExperimentConfig:
    pps: PpsAngles
    probe: CoherentProbe
    coupling: CouplingConfig
    sweep: SweepSpec = None
    tail_tol: float = DEFAULT_TAIL_TOL
    output_format: str = "csv"

    @property
    def fixed(self):
        return FixedParams(self.pps, self.probe, self.coupling, self.tail_tol)


def build_config(raw, require_sweep=False):
    """Validate raw string parameters into an :class:`ExperimentConfig` (ConfigError on failure)."""
    params = dict(BASE_PARAMS)
    params.update(raw)
    fmt = params.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    try:
        pps = PpsAngles(*(parse_angle(params[k]) for k in ANGLE_KEYS))
        probe = CoherentProbe(_parse_float("mean_photons", params["mean_photons"]))
        order = int(_parse_float("order", params.get("order", 2)))
        coupling = CouplingConfig(_parse_float("chi", params["chi"]), order)
        tail_tol = _parse_float("tail_tol", params.get("tail_tol", DEFAULT_TAIL_TOL))
        if not 0 < tail_tol < 1:
            raise ConfigError("tail_tol must lie in (0, 1)")
        sweep = None
        if "axis" in params:
            axis = SweepAxis(params["axis"])
            conv = parse_angle if axis is SweepAxis.THETA_F else (lambda v: _parse_float(axis.value, v))
            for key in ("start", "stop", "points"):
                if key not in params:
                    raise ConfigError(f"sweep needs {key}")
            sweep = SweepSpec(
                axis,
                conv(params["start"]),
                conv(params["stop"]),
                int(_parse_float("points", params["points"])),
                FixedParams(pps, probe, coupling, tail_tol),
                _parse_bool(params.get("log_spaced", False)),
            )
        elif require_sweep:
            raise ConfigError("sweep needs axis=theta_f|chi|mean_photons, start, stop, points")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return ExperimentConfig(pps, probe, coupling, sweep, tail_tol, fmt)


def fmt_num(value):
    """Fixed 17-significant-digit rendering so every double round-trips."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    return f"{value:.17g}"


@dataclass
class Table:
    name: str
    meta: dict
    columns: tuple
    rows: list
    fits: dict = None

    def to_csv(self):
        buf = io.StringIO()
        meta = dict(self.meta, rows=len(self.rows))
        buf.write("# wvakerr " + self.name + " " + " ".join(f"{k}={_meta_str(v)}" for k, v in meta.items()) + "\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(fmt_num(v) for v in row) + "\n")
        for series, fit in (self.fits or {}).items():
            buf.write(
                f"# fit series={series} slope={fmt_num(fit.slope)} intercept={fmt_num(fit.intercept)} "
                f"r_squared={fmt_num(fit.r_squared)} residual_max={fmt_num(fit.residual_max)}\n"
            )
        return buf.getvalue()

    def to_json(self):
        doc = {
            "name": self.name,
            "meta": self.meta,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
        }
        if self.fits:
            doc["fits"] = {k: _fit_dict(f) for k, f in self.fits.items()}
        return json.dumps(doc) + "\n"

    def render(self, fmt):
        return self.to_json() if fmt == "json" else self.to_csv()


def _meta_str(value):
    return fmt_num(value) if isinstance(value, (int, float)) else str(value)


def _fit_dict(fit):
    return {
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "residual_max": fit.residual_max,
    }


def read_csv_table(text):
    """Parse emitted CSV back into (meta, columns, rows); '#' lines other than the first are skipped."""
    lines = text.split("\n")
    if not lines or not lines[0].startswith("# "):
        raise ValueError("missing metadata line")
    tokens = lines[0][2:].split()
    meta = dict(t.split("=", 1) for t in tokens if "=" in t)
    columns = lines[1].split(",")
    rows = [ln.split(",") for ln in lines[2:] if ln and not ln.startswith("#")]
    return meta, columns, rows


def _params_meta(config):
    return {
        "theta_i": config.pps.theta_i,
        "theta_f": config.pps.theta_f,
        "phi_0": config.pps.phi_0,
        "mean_photons": config.probe.mean_photons,
        "chi": config.coupling.chi,
        "order": config.coupling.order,
        "tail_tol": config.tail_tol,
    }


def _row_values(row):
    if row.degenerate:
        return [row.p_f, math.nan, math.nan, row.q_conventional, True]
    r = row.report
    return [r.p_f, r.wva_fi, r.wva_qfi, r.q_conventional, False]


def sweep_table(name, spec, threads=1, meta=None):
    rows = run_sweep(spec, threads=threads)
    meta = dict(meta or {})
    meta.pop(spec.axis.value, None)
    meta.update(axis=spec.axis.value, start=spec.start, stop=spec.stop, points=spec.points,
                log_spaced=int(spec.log_spaced))
    return Table(name, meta, (spec.axis.value,) + TABLE_COLUMNS, [[r.value] + _row_values(r) for r in rows]), rows


def point_table(config):
    report = fisher_report(config.pps, config.probe, config.coupling, config.tail_tol)
    d = report.as_dict()
    return Table("point", _params_meta(config), POINT_FIELDS, [[d[k] for k in POINT_FIELDS]])


def figure_table(which, raw_overrides, threads=1):
    """Data behind one of the figures; overrides adjust fixed parameters or the grid."""
    if which not in FIGURES:
        raise ConfigError(f"unknown figure {which!r}; choose from {', '.join(FIGURES)}")
    grid_keys = {"start", "stop", "points", "log_spaced"}
    overrides = {k: v for k, v in raw_overrides.items() if k not in grid_keys | {"axis"}}
    grid = {k: v for k, v in raw_overrides.items() if k in grid_keys}

    if which in FIG1_CHI:
        defaults = {"chi": repr(FIG1_CHI[which]), "axis": "theta_f", "start": "0", "stop": "2pi", "points": "201"}
    elif which == "fig2":
        defaults = {"theta_f": "0.5pi", "axis": "chi", "start": "1e-4", "stop": "0.2", "points": "200",
                    "log_spaced": "true"}
    elif which == "fig3":
        defaults = {"axis": "mean_photons", "start": "1", "stop": "64", "points": "128"}
    else:
        defaults = {"chi": repr(FIG4_CHI), "axis": "mean_photons", "start": repr(FIG4_N_RANGE[0]),
                    "stop": repr(FIG4_N_RANGE[1]), "points": str(FIG4_POINTS), "log_spaced": "true"}
    config = build_config({**defaults, **overrides, **grid})
    meta = _params_meta(config)

    if which == "fig3":
        chis = (config.coupling.chi,) if "chi" in overrides else FIG3_CHIS
        columns = ("chi", "mean_photons") + TABLE_COLUMNS + ("wva_fi_scaled",)
        rows = []
        for chi in chis:
            fixed = FixedParams(config.pps, config.probe, CouplingConfig(chi, config.coupling.order),
                                config.tail_tol)
            spec = SweepSpec(config.sweep.axis, config.sweep.start, config.sweep.stop, config.sweep.points,
                             fixed, config.sweep.log_spaced)
            for r in run_sweep(spec, threads=threads):
                values = _row_values(r)
                scale = FIG3_DISPLAY_SCALE if chi == FIG3_DISPLAY_CHI else 1.0
                rows.append([chi, r.value] + values + [values[1] * scale])
        meta.pop("chi")
        meta.update(chis=";".join(fmt_num(c) for c in chis), axis="mean_photons",
                    display_scale=FIG3_DISPLAY_SCALE, display_chi=FIG3_DISPLAY_CHI)
        return Table(which, meta, columns, rows), config

    table, rows = sweep_table(which, config.sweep, threads=threads, meta=meta)
    if which == "fig4":
        table.fits = scaling_fits(rows)
    return table, config


def estimate_chi(g1, g2, delta1, delta2):
    """Dispersive two-photon coupling |g1 g2|^2 / (delta1^2 delta2) of a three-level emitter.

    Inputs share one angular-frequency unit; the result is in that unit.
    """
    if delta1 == 0 or delta2 == 0:
        raise ZeroDetuning("detunings must be nonzero")
    return abs(g1 * g2) ** 2 / (delta1**2 * delta2)


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _error_record(exc):
    record = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, DegeneratePostselection):
        record["p_f"] = exc.p_f
        record["p_min"] = exc.p_min
    return json.dumps(record) + "\n"


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value or JSON parameter file")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
    common.add_argument("--tail-tol", type=float, help="Poisson tail mass allowed beyond the Fock cutoff")
    common.add_argument("--threads", type=int, default=1, help="worker threads for sweep rows")

    parser = argparse.ArgumentParser(prog="wvakerr", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("point", parents=[common], help="all Fisher quantities at one parameter point")
    p.add_argument("params", nargs="*", metavar="KEY=VALUE")
    f = sub.add_parser("fig", parents=[common], help="regenerate the data of one figure")
    f.add_argument("which", choices=FIGURES)
    f.add_argument("params", nargs="*", metavar="KEY=VALUE")
    s = sub.add_parser("sweep", parents=[common], help="sweep one axis (theta_f, chi, mean_photons)")
    s.add_argument("params", nargs="*", metavar="KEY=VALUE")
    e = sub.add_parser("estimate-chi", help="cavity-QED nonlinear coupling |g1 g2|^2/(d1^2 d2)")
    for name in ("--g1", "--g2", "--delta1", "--delta2"):
        e.add_argument(name, type=float, required=True)
    return parser


def _raw_params(args):
    raw = load_config_file(args.config) if args.config else {}
    raw.update(parse_pairs(args.params))
    if args.tail_tol is not None:
        raw["tail_tol"] = repr(args.tail_tol)
    if args.format is not None:
        raw["format"] = args.format
    return raw


def main(argv=None):
    args = build_parser().parse_args(argv)
    out = getattr(args, "out", None)
    try:
        if args.command == "estimate-chi":
            text = fmt_num(estimate_chi(args.g1, args.g2, args.delta1, args.delta2)) + "\n"
        else:
            raw = _raw_params(args)
            fmt = raw.get("format", "csv")
            if args.command == "point":
                if "axis" in raw:
                    raise ConfigError("point takes no sweep; use the sweep command")
                config = build_config(raw)
                text = point_table(config).render(fmt)
            elif args.command == "fig":
                table, _ = figure_table(args.which, raw, threads=args.threads)
                text = table.render(fmt)
            else:
                config = build_config(raw, require_sweep=True)
                table, _ = sweep_table("sweep", config.sweep, threads=args.threads, meta=_params_meta(config))
                text = table.render(fmt)
    except (ConfigError, ZeroDetuning) as exc:
        sys.stderr.write(f"wvakerr: {exc}\n")
        return EXIT_CONFIG
    except DegeneratePostselection as exc:
        sys.stdout.write(_error_record(exc))
        return EXIT_DEGENERATE
    except PathMismatch as exc:
        sys.stdout.write(_error_record(exc))
        return EXIT_NUMERIC
    try:
        _emit(text, out)
    except OSError as exc:
        sys.stderr.write(f"wvakerr: cannot write output: {exc}\n")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
