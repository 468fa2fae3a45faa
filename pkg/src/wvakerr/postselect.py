"""Pre/post-selection of the qubit and the resulting conditional meter state.

The qubit is prepared in |i> = cos(theta_i/2)|1> + sin(theta_i/2) e^{i phi_i}|2>
and postselected on |f> with (theta_f, phi_f). Only phi_0 = phi_i - phi_f enters
any observable, so that is all :class:`PpsAngles` stores.
"""

import math
from dataclasses import dataclass
from types import SimpleNamespace

import numpy as np

from . import _precision
from .errors import DegeneratePostselection, DivergentWeakValue
from .fock_core import TruncatedMeterState, coherent_amplitudes

P_MIN = 1e-12
OVERLAP_MIN = 1e-12


@dataclass(frozen=True)
class PpsAngles:
    theta_i: float
    theta_f: float
    phi_0: float = 0.0

    def __post_init__(self):
        for name in ("theta_i", "theta_f", "phi_0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def aav(cls, theta_f=math.pi / 2):
        """The orthogonal-overlap configuration theta_i = pi/2, phi_0 = pi used in the figures."""
        return cls(math.pi / 2, theta_f, math.pi)

    def branch_weights(self):
        """(a, b): amplitudes of the |1> and |2> branches surviving postselection."""
        a = math.cos(self.theta_i / 2) * math.cos(self.theta_f / 2)
        b = math.sin(self.theta_i / 2) * math.sin(self.theta_f / 2)
        return a, b


@dataclass(frozen=True)
class PpsCoefficients:
    a_coef: float
    b_coef: float
    c_coef: float


def pps_coefficients(angles):
    ci, cf = math.cos(angles.theta_i), math.cos(angles.theta_f)
    return PpsCoefficients(
        a_coef=0.5 * (1 + ci * cf),
        b_coef=0.5 * math.sin(angles.theta_i) * math.sin(angles.theta_f),
        c_coef=0.5 * (ci + cf),
    )


def series_terms(ops, angles, probe, coupling, n_max):
    """Shared ingredients of every postselected series, evaluated in backend ``ops``.

    ``x`` is the interference phase 2*chi*n**k + phi_0 per Fock level and
    ``nk`` is n**k, the generator of the encoding.
    """
    ti, tf = ops.scalar(angles.theta_i), ops.scalar(angles.theta_f)
    chi, phi0 = ops.scalar(coupling.chi), ops.scalar(angles.phi_0)
    n = ops.vector(np.arange(n_max + 1))
    nk = n**coupling.order
    x = 2 * chi * nk + phi0
    ci, cf = ops.scos(ti), ops.scos(tf)
    return SimpleNamespace(
        ops=ops,
        A=(1 + ci * cf) / 2,
        B=ops.ssin(ti) * ops.ssin(tf) / 2,
        C=(ci + cf) / 2,
        a=ops.scos(ti / 2) * ops.scos(tf / 2),
        b=ops.ssin(ti / 2) * ops.ssin(tf / 2),
        chi=chi,
        phi0=phi0,
        nk=nk,
        w=ops.poisson_weights(probe.mean_photons, n_max),
        cos_x=ops.cos(x),
        sin_x=ops.sin(x),
    )


def probability_terms(t):
    """p_f = A<1> + B<cos x> and its condition number, from :func:`series_terms` output."""
    ops = t.ops
    w_cos = ops.sum(t.w * t.cos_x)
    m0 = ops.sum(t.w)
    p = t.A * m0 + t.B * w_cos
    magnitude = abs(t.A) * m0 + abs(t.B) * ops.sum(t.w * abs(t.cos_x))
    return p, _precision.ratio(magnitude, p)


def _probability_kernel(ops, angles, probe, coupling, n_max):
    return probability_terms(series_terms(ops, angles, probe, coupling, n_max))


def postselection_probability(angles, probe, coupling, n_max):
    """Success probability of the postselection, summed over the Poisson series.

    Coherent-state averages are taken over the same truncated ladder as the
    state itself, so <1> is the retained Poisson mass rather than exactly 1;
    this keeps p_f identical to the norm of the truncated conditional state.
    """
    return _precision.evaluate(_probability_kernel, angles, probe, coupling, n_max)


def postselected_state(angles, probe, coupling, n_max):
    """Unnormalized conditional meter state <f|Psi> and its norm p_f.

    Raises DegeneratePostselection if p_f < P_MIN.
    """
    a, b = angles.branch_weights()
    coherent = coherent_amplitudes(probe, n_max)
    n = np.arange(n_max + 1, dtype=float)
    theta = coupling.chi * n**coupling.order
    branch = a * np.exp(-1j * theta) + b * np.exp(1j * (angles.phi_0 + theta))
    amplitudes = coherent.amplitudes * branch
    p_f = math.fsum(np.abs(amplitudes) ** 2)
    if p_f < P_MIN:
        raise DegeneratePostselection(p_f, P_MIN)
    return TruncatedMeterState(amplitudes), p_f


def weak_value(angles):
    """AAV weak value <f|sigma_z|i> / <f|i> with sigma_z = |2><2| - |1><1|.

    Only phi_0 = phi_i - phi_f matters: a common phase cancels between numerator
    and denominator, so phi_f is set to zero.
    """
    a, b = angles.branch_weights()
    rel = complex(math.cos(angles.phi_0), math.sin(angles.phi_0))
    overlap = a + b * rel
    if abs(overlap) <= OVERLAP_MIN:
        raise DivergentWeakValue(
            f"|<f|i>| = {abs(overlap):.3e} <= {OVERLAP_MIN:.0e}; weak value diverges"
        )
    return (b * rel - a) / overlap


def amplified_strength(coupling, angles):
    return coupling.chi * weak_value(angles)
