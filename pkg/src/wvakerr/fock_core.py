"""Coherent probe states on a truncated Fock ladder, nonlinear phase encoding, photon moments."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

DEFAULT_TAIL_TOL = 1e-12
# extra Fock levels kept beyond the Poisson-tail cutoff
CUTOFF_MARGIN = 5
NORM_TOL = 1e-12


@dataclass(frozen=True)
class CoherentProbe:
    """Coherent meter field |alpha> with real alpha = sqrt(mean_photons)."""

    mean_photons: float

    def __post_init__(self):
        n = self.mean_photons
        if not (isinstance(n, (int, float, np.floating, np.integer)) and math.isfinite(n) and n >= 0):
            raise ValueError(f"mean_photons must be finite and >= 0, got {n!r}")
        object.__setattr__(self, "mean_photons", float(n))

    @property
    def alpha(self):
        return math.sqrt(self.mean_photons)


@dataclass(frozen=True)
class CouplingConfig:
    """Integrated coupling chi of the interaction exp(i chi sigma_z n**order)."""

    chi: float
    order: int = 2

    def __post_init__(self):
        if not math.isfinite(self.chi):
            raise ValueError(f"chi must be finite, got {self.chi!r}")
        if int(self.order) != self.order or self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order!r}")
        object.__setattr__(self, "chi", float(self.chi))
        object.__setattr__(self, "order", int(self.order))


@dataclass(frozen=True, eq=False)
class TruncatedMeterState:
    """Meter ket over Fock levels 0..n_max.

    ``tail_bound`` is the probability mass known to be discarded by the
    truncation (zero for states that are not normalized kets).
    """

    amplitudes: np.ndarray
    tail_bound: float = 0.0

    @property
    def n_max(self):
        return len(self.amplitudes) - 1

    def norm_squared(self):
        return math.fsum(np.abs(self.amplitudes) ** 2)


def truncation_cutoff(probe, tail_tol=DEFAULT_TAIL_TOL):
    """Smallest n_max whose Poisson(N) tail mass above n_max is below ``tail_tol``."""
    if not 0 < tail_tol < 1:
        raise ValueError(f"tail_tol must lie in (0, 1), got {tail_tol!r}")
    mean = probe.mean_photons
    if mean == 0:
        return 0
    n = int(mean)
    while poisson.sf(n, mean) >= tail_tol:
        n += 1
    # walk down in case the mean itself already satisfies the bound
    while n > 0 and poisson.sf(n - 1, mean) < tail_tol:
        n -= 1
    return n


def default_cutoff(probe, tail_tol=DEFAULT_TAIL_TOL):
    """Working truncation used by the Fisher routines: tail cutoff plus a safety margin."""
    return truncation_cutoff(probe, tail_tol) + CUTOFF_MARGIN


def poisson_weights(probe, n_max):
    """Photon-number distribution |<n|alpha>|**2 for n = 0..n_max."""
    return poisson.pmf(np.arange(n_max + 1), probe.mean_photons)


def coherent_amplitudes(probe, n_max):
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    weights = poisson_weights(probe, n_max)
    tail = float(poisson.sf(n_max, probe.mean_photons))
    return TruncatedMeterState(np.sqrt(weights).astype(complex), tail_bound=tail)


def encode_phase(state, coupling, sign):
    """Imprint exp(i*sign*chi*n**order) on each Fock component.

    ``sign=-1`` gives the branch coupled through qubit level |1>, ``+1`` the |2> branch.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    n = np.arange(state.n_max + 1, dtype=float)
    phase = np.exp(1j * sign * coupling.chi * n**coupling.order)
    return TruncatedMeterState(state.amplitudes * phase, tail_bound=state.tail_bound)


def photon_moment(probe, power, n_max):
    """<n**power> over the truncated Poisson distribution, by compensated direct summation.

    Exact polynomials agree with this series: <n> = N, <n^2> = N^2 + N,
    <n^3> = N^3 + 3N^2 + N, <n^4> = N^4 + 6N^3 + 7N^2 + N.
    """
    if power not in (1, 2, 3, 4):
        raise ValueError(f"power must be one of 1..4, got {power!r}")
    return series_moment(probe, power, n_max)


def series_moment(probe, power, n_max):
    n = np.arange(n_max + 1, dtype=float)
    return math.fsum(poisson_weights(probe, n_max) * n**power)
