"""Parameter sweeps over one axis and log-log power-law fits of the results."""

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegeneratePostselection, InsufficientPoints, NonpositiveData
from .fock_core import DEFAULT_TAIL_TOL, CoherentProbe, CouplingConfig, default_cutoff
from .infotheory import fisher_report, qfi_conventional
from .postselect import PpsAngles, postselection_probability

FIG4_CHI = 0.01
FIG4_N_RANGE = (20.0, 120.0)
FIG4_POINTS = 12


class SweepAxis(enum.Enum):
    THETA_F = "theta_f"
    CHI = "chi"
    MEAN_PHOTONS = "mean_photons"


@dataclass(frozen=True)
class FixedParams:
    angles: PpsAngles
    probe: CoherentProbe
    coupling: CouplingConfig
    tail_tol: float = DEFAULT_TAIL_TOL

    def at(self, axis, value):
        if axis is SweepAxis.THETA_F:
            return replace(self, angles=replace(self.angles, theta_f=value))
        if axis is SweepAxis.CHI:
            return replace(self, coupling=replace(self.coupling, chi=value))
        return replace(self, probe=CoherentProbe(value))


@dataclass(frozen=True)
class SweepSpec:
    axis: SweepAxis
    start: float
    stop: float
    points: int
    fixed: FixedParams
    log_spaced: bool = False

    def __post_init__(self):
        if not isinstance(self.axis, SweepAxis):
            object.__setattr__(self, "axis", SweepAxis(self.axis))
        if int(self.points) != self.points or self.points < 1:
            raise ValueError(f"points must be a positive integer, got {self.points!r}")
        if self.points == 1:
            if self.start != self.stop:
                raise ValueError("a single-point sweep needs start == stop")
        elif not self.start < self.stop:
            raise ValueError("start must be < stop")
        if self.log_spaced and not self.start > 0:
            raise ValueError("log-spaced sweeps need start > 0")

    def grid(self):
        if self.points == 1:
            return np.array([float(self.start)])
        if self.log_spaced:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class SweepRow:
    value: float
    p_f: float
    report: object = None  # FisherReport, or None for degenerate points
    q_conventional: float = math.nan

    @property
    def degenerate(self):
        return self.report is None


def _evaluate(axis, fixed, value):
    point = fixed.at(axis, float(value))
    try:
        report = fisher_report(point.angles, point.probe, point.coupling, point.tail_tol)
    except DegeneratePostselection:
        n_max = default_cutoff(point.probe, point.tail_tol)
        p_f = postselection_probability(point.angles, point.probe, point.coupling, n_max)
        return SweepRow(float(value), p_f, None, qfi_conventional(point.probe))
    return SweepRow(float(value), report.p_f, report, report.q_conventional)


def run_sweep(spec, threads=1):
    """Evaluate :func:`fisher_report` at every grid point, in grid order.

    Degenerate postselection points come back as rows with ``report=None``
    instead of being dropped. ``threads > 1`` evaluates rows concurrently;
    the output is identical either way.
    """
    grid = spec.grid()
    if threads <= 1:
        return [_evaluate(spec.axis, spec.fixed, v) for v in grid]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda v: _evaluate(spec.axis, spec.fixed, v), grid))


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    residual_max: float
    residuals: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def precision_exponent(self):
        """k in the Cramer-Rao precision scaling 1/N^k (half the information slope)."""
        return self.slope / 2


def fit_power_law(x, y):
    """Ordinary least squares of log(y) on log(x); ``slope`` is the power-law exponent."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if len(x) < 3:
        raise InsufficientPoints(f"need at least 3 points, got {len(x)}")
    if np.any(~(x > 0)) or np.any(~(y > 0)):
        raise NonpositiveData("power-law fit needs strictly positive x and y")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(design, ly, rcond=None)
    residuals = ly - (slope * lx + intercept)
    ss_res = float(residuals @ residuals)
    centered = ly - ly.mean()
    ss_tot = float(centered @ centered)
    r_squared = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1 - ss_res / ss_tot))
    return ScalingFit(float(slope), float(intercept), r_squared, float(np.max(np.abs(residuals))), residuals)


def fig4_spec(chi=FIG4_CHI, n_range=FIG4_N_RANGE, points=FIG4_POINTS, tail_tol=DEFAULT_TAIL_TOL):
    fixed = FixedParams(PpsAngles.aav(), CoherentProbe(n_range[0]), CouplingConfig(chi), tail_tol)
    return SweepSpec(SweepAxis.MEAN_PHOTONS, n_range[0], n_range[1], points, fixed, log_spaced=True)


def scaling_fits(rows):
    """Power-law fits of the WVA-FI and of Q_cm against the mean photon number."""
    good = [r for r in rows if not r.degenerate]
    x = [r.value for r in good]
    return {
        "wva_fi": fit_power_law(x, [r.report.wva_fi for r in good]),
        "q_cm": fit_power_law(x, [r.q_conventional for r in good]),
    }
