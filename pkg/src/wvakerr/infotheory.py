"""Photon-counting statistics and Fisher information of the postselected meter.

Two independent routes to the postselected QFI are provided:
:func:`qfi_derivative_path` differentiates the normalized state directly,
:func:`qfi_closed_form` evaluates the expanded series expression built from
the A, B, C coefficients. :func:`fisher_report` insists that they agree.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _precision
from .errors import DegeneratePostselection, NonpositiveInformation, PathMismatch
from .fock_core import DEFAULT_TAIL_TOL, CoherentProbe, default_cutoff, poisson_weights
from .postselect import P_MIN, postselection_probability, probability_terms, series_terms

PROB_FLOOR = 1e-300
PATH_RTOL = 1e-6
# central-difference step, as a phase increment on the bulk Fock levels
FD_PHASE_STEP = 1e-5


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    probs: np.ndarray
    p_f: float


@dataclass(frozen=True)
class FisherReport:
    p_f: float
    f_classical: float
    q_quantum: float
    wva_fi: float
    wva_qfi: float
    q_conventional: float
    crb: float
    n_max: int

    def as_dict(self):
        return {
            "p_f": self.p_f,
            "F_f": self.f_classical,
            "Q_f": self.q_quantum,
            "wva_fi": self.wva_fi,
            "wva_qfi": self.wva_qfi,
            "q_cm": self.q_conventional,
            "crb": self.crb,
            "n_max": self.n_max,
        }


def _require_postselection(p_f):
    if p_f < P_MIN:
        raise DegeneratePostselection(p_f, P_MIN)


def outcome_distribution(angles, probe, coupling, n_max):
    """P_f(n), photon-count distribution of the normalized postselected meter.

    Each level's interference factor A + B cos(x) is evaluated in the
    equivalent half-angle form (a+b)^2 cos^2(x/2) + (a-b)^2 sin^2(x/2), a sum
    of non-negative terms, so entries near destructive interference keep full
    relative accuracy.
    """
    a, b = angles.branch_weights()
    n = np.arange(n_max + 1, dtype=float)
    half = coupling.chi * n**coupling.order + angles.phi_0 / 2
    factor = (a + b) ** 2 * np.cos(half) ** 2 + (a - b) ** 2 * np.sin(half) ** 2
    unnormalized = poisson_weights(probe, n_max) * factor
    p_f = math.fsum(unnormalized)
    _require_postselection(p_f)
    return OutcomeDistribution(unnormalized / p_f, p_f)


def _classical_fisher_kernel(ops, angles, probe, coupling, n_max):
    t = series_terms(ops, angles, probe, coupling, n_max)
    p, p_cond = probability_terms(t)
    dp = -2 * t.B * ops.sum(t.w * t.nk * t.sin_x)
    level = t.A + t.B * t.cos_x
    probs = t.w * level / p
    signal = t.w * (-2 * t.B * t.nk * t.sin_x) / p
    drift = probs * dp / p
    dprobs = signal - drift

    keep = np.array([pr > PROB_FLOOR for pr in probs], dtype=bool)
    probs, dprobs, level = probs[keep], dprobs[keep], level[keep]
    spread = (abs(signal) + abs(drift))[keep]
    level_cond = (abs(t.A) + abs(t.B) * abs(t.cos_x[keep])) / abs(level)

    fisher = ops.sum(dprobs**2 / probs)
    err = ops.sum(2 * abs(dprobs) * spread / probs + dprobs**2 / probs * (level_cond + 2 * p_cond))
    if err == 0:
        cond = 1.0
    elif fisher == 0:
        cond = math.inf
    else:
        cond = float(err / fisher)
    return fisher, cond


def classical_fisher(angles, probe, coupling, n_max):
    """Fisher information of chi in the photon-number distribution, analytic derivative."""
    _require_postselection(postselection_probability(angles, probe, coupling, n_max))
    return _precision.evaluate(_classical_fisher_kernel, angles, probe, coupling, n_max)


def classical_fisher_fd(angles, probe, coupling, n_max, step=None):
    """Fisher information from central differences of :func:`outcome_distribution`.

    P_f(n) oscillates in chi at rate ~2 n^k, so the default step is sized so
    that the phase of the populated levels moves by ~FD_PHASE_STEP.
    """
    if step is None:
        step = default_fd_step(probe, coupling)
    if not step > 0:
        raise ValueError("step must be positive")
    shifted = [
        outcome_distribution(angles, probe, type(coupling)(coupling.chi + s, coupling.order), n_max).probs
        for s in (step, -step)
    ]
    center = outcome_distribution(angles, probe, coupling, n_max).probs
    deriv = (shifted[0] - shifted[1]) / (2 * step)
    keep = center > PROB_FLOOR
    return math.fsum(deriv[keep] ** 2 / center[keep])


def default_fd_step(probe, coupling):
    mean = probe.mean_photons
    n_bulk = mean + 4 * math.sqrt(mean) + 1
    return FD_PHASE_STEP / (2 * n_bulk**coupling.order)


def _qfi_state_kernel(ops, angles, probe, coupling, n_max):
    t = series_terms(ops, angles, probe, coupling, n_max)
    c = ops.sqrt(t.w)
    theta = t.chi * t.nk
    cos_m, sin_m = ops.cos(theta), ops.sin(theta)
    cos_p, sin_p = ops.cos(theta + t.phi0), ops.sin(theta + t.phi0)
    a, b = t.a, t.b

    # unnormalized amplitudes c_n [a e^{-i theta} + b e^{i(phi0 + theta)}]
    psi_re = c * (a * cos_m + b * cos_p)
    psi_im = c * (-a * sin_m + b * sin_p)
    # d/dchi of the above: c_n (-i n^k) [a e^{-i theta} - b e^{i(phi0 + theta)}]
    u_re = a * cos_m - b * cos_p
    u_im = -a * sin_m - b * sin_p
    dpsi_re = c * t.nk * u_im
    dpsi_im = -c * t.nk * u_re

    p = ops.sum(psi_re**2 + psi_im**2)
    dp = 2 * ops.sum(psi_re * dpsi_re + psi_im * dpsi_im)
    scale = 1 / ops.ssqrt(p)
    shift = dp / (2 * p) * scale
    phi_re, phi_im = psi_re * scale, psi_im * scale
    dphi_re = dpsi_re * scale - psi_re * shift
    dphi_im = dpsi_im * scale - psi_im * shift

    dd = ops.sum(dphi_re**2 + dphi_im**2)
    ov_re = ops.sum(phi_re * dphi_re + phi_im * dphi_im)
    ov_im = ops.sum(phi_re * dphi_im - phi_im * dphi_re)
    gap = dd - (ov_re**2 + ov_im**2)

    # the normalization shift nearly cancels dpsi when the state barely moves with chi
    dd_magnitude = ops.sum(
        (abs(dpsi_re) + abs(dpsi_im)) ** 2 * scale**2 + (abs(psi_re) + abs(psi_im)) ** 2 * shift**2
    )
    amp_cond = _precision.ratio((abs(a) + abs(b)) ** 2 * ops.sum(t.w), p)
    cond = _precision.ratio(dd_magnitude, gap) * (1 + math.sqrt(amp_cond))
    return 4 * gap, cond


def qfi_derivative_path(angles, probe, coupling, n_max):
    """QFI of the normalized postselected state, 4(<dPhi|dPhi> - |<Phi|dPhi>|^2)."""
    _require_postselection(postselection_probability(angles, probe, coupling, n_max))
    return _precision.evaluate(_qfi_state_kernel, angles, probe, coupling, n_max)


def _qfi_closed_kernel(ops, angles, probe, coupling, n_max):
    t = series_terms(ops, angles, probe, coupling, n_max)
    p, p_cond = probability_terms(t)
    nk2 = t.nk**2
    m_k = ops.sum(t.w * t.nk)
    m_2k = ops.sum(t.w * nk2)
    s_cos = ops.sum(t.w * nk2 * t.cos_x)
    s_sin = ops.sum(t.w * t.nk * t.sin_x)

    correction = ((t.C * m_k) ** 2 + (t.B * s_sin) ** 2) / p
    core = t.A * m_2k - t.B * s_cos - correction
    magnitude = abs(t.A) * m_2k + abs(t.B) * ops.sum(t.w * nk2 * abs(t.cos_x)) + correction * (1 + p_cond)
    cond = _precision.ratio(magnitude, core) + p_cond
    return 4 * core / p, cond


def qfi_closed_form(angles, probe, coupling, n_max):
    """Postselected QFI from the expanded A/B/C series expression.

    The coherent averages <n^k> and <n^2k> (k = coupling order) are summed
    over the truncated Poisson ladder, never taken from polynomial shortcuts.
    """
    _require_postselection(postselection_probability(angles, probe, coupling, n_max))
    return _precision.evaluate(_qfi_closed_kernel, angles, probe, coupling, n_max)


def qfi_conventional(probe):
    """QFI of chi for |phi_-> without postselection: 4 Var(n^2) = 4(4N^3 + 6N^2 + N)."""
    n = probe.mean_photons
    return 4 * (4 * n**3 + 6 * n**2 + n)


def crb_bound(p_f, fisher):
    """Cramer-Rao floor on the error of chi per probe, 1/sqrt(p_f * fisher)."""
    info = p_f * fisher
    if not info > 0:
        raise NonpositiveInformation(f"p_f * F = {info!r} must be positive")
    return 1 / math.sqrt(info)


def fisher_report(angles, probe, coupling, tail_tol=DEFAULT_TAIL_TOL):
    """All information measures at one parameter point.

    Raises DegeneratePostselection below P_MIN and PathMismatch if the two
    QFI routes disagree by more than PATH_RTOL.
    """
    if not isinstance(probe, CoherentProbe):
        probe = CoherentProbe(probe)
    n_max = default_cutoff(probe, tail_tol)
    p_f = postselection_probability(angles, probe, coupling, n_max)
    _require_postselection(p_f)

    q_state = _precision.evaluate(_qfi_state_kernel, angles, probe, coupling, n_max)
    q_closed = _precision.evaluate(_qfi_closed_kernel, angles, probe, coupling, n_max)
    scale = max(abs(q_state), abs(q_closed))
    if scale > 0 and abs(q_state - q_closed) > PATH_RTOL * scale:
        raise PathMismatch(f"QFI paths disagree: state={q_state!r} closed={q_closed!r}")
    f_cl = _precision.evaluate(_classical_fisher_kernel, angles, probe, coupling, n_max)

    wva_fi = p_f * f_cl
    try:
        crb = crb_bound(p_f, f_cl)
    except NonpositiveInformation:
        crb = math.inf
    return FisherReport(
        p_f=p_f,
        f_classical=f_cl,
        q_quantum=q_state,
        wva_fi=wva_fi,
        wva_qfi=p_f * q_state,
        q_conventional=qfi_conventional(probe),
        crb=crb,
        n_max=n_max,
    )
