"""Arithmetic backends for the Fock-space series, with automatic escalation.

Every series kernel in the package is written once against a small set of
backend primitives and returns ``(value, condition)``, where ``condition``
bounds the factor by which rounding error is amplified in that evaluation.
:func:`evaluate` runs the kernel in float64 first and, when the condition
number says too many digits were lost, reruns it in mpmath at a working
precision sized to the loss.

Near the orthogonal pre/post-selection configuration with weak coupling,
the Fisher quantities are small differences of large Cauchy-Schwarz terms,
so this escalation is what keeps the results meaningful there.
"""

import math

import mpmath
import numpy as np
from scipy.stats import poisson

EPS = np.finfo(float).eps

# float64 result accepted when cond * EPS stays below this
FLOAT_REL_TOL = 1e-12
# mpmath result accepted when cond * 10**-dps stays below this
MP_REL_TOL = 1e-17
MAX_DPS = 400


class FloatOps:
    """float64 numpy backend with error-free (``math.fsum``) accumulation."""

    dps = 15

    @staticmethod
    def scalar(value):
        return float(value)

    @staticmethod
    def vector(values):
        return np.asarray(values, dtype=float)

    cos = staticmethod(np.cos)
    sin = staticmethod(np.sin)
    sqrt = staticmethod(np.sqrt)
    scos = staticmethod(math.cos)
    ssin = staticmethod(math.sin)
    ssqrt = staticmethod(math.sqrt)

    @staticmethod
    def sum(terms):
        return math.fsum(terms)

    @staticmethod
    def poisson_weights(mean, n_max):
        return poisson.pmf(np.arange(n_max + 1), mean)


class MpOps:
    """mpmath backend on a private context, so concurrent callers never share precision state."""

    def __init__(self, dps):
        self.dps = dps
        self.ctx = mpmath.MPContext()
        self.ctx.dps = dps
        self.cos = np.frompyfunc(self.ctx.cos, 1, 1)
        self.sin = np.frompyfunc(self.ctx.sin, 1, 1)
        self.sqrt = np.frompyfunc(self.ctx.sqrt, 1, 1)
        self.scos = self.ctx.cos
        self.ssin = self.ctx.sin
        self.ssqrt = self.ctx.sqrt

    def scalar(self, value):
        return self.ctx.mpf(float(value))

    def vector(self, values):
        return np.array([self.ctx.mpf(float(v)) for v in values], dtype=object)

    def sum(self, terms):
        return self.ctx.fsum(terms)

    def poisson_weights(self, mean, n_max):
        ctx = self.ctx
        mean = ctx.mpf(float(mean))
        out = np.empty(n_max + 1, dtype=object)
        if mean == 0:
            out[:] = ctx.zero
            out[0] = ctx.one
            return out
        term = ctx.exp(-mean)
        out[0] = term
        for n in range(1, n_max + 1):
            term = term * mean / n
            out[n] = term
        return out


FLOAT = FloatOps()


def to_float(value):
    if isinstance(value, tuple):
        return tuple(to_float(v) for v in value)
    if isinstance(value, np.ndarray):
        return np.array([float(v) for v in value], dtype=float)
    return float(value)


def ratio(magnitude, value):
    """Condition number ``|magnitude| / |value|`` with 0/0 treated as exact."""
    magnitude = abs(magnitude)
    value = abs(value)
    if magnitude == 0:
        return 1.0
    if value == 0:
        return math.inf
    return float(magnitude / value)


def evaluate(kernel, *args):
    """Run ``kernel(ops, *args)`` in float64, escalating to mpmath if ill-conditioned."""
    value, cond = kernel(FLOAT, *args)
    if cond * EPS <= FLOAT_REL_TOL:
        return value
    dps = 40 if not math.isfinite(cond) else 30 + int(math.log10(cond))
    while True:
        dps = min(dps, MAX_DPS)
        ops = MpOps(dps)
        value, cond = kernel(ops, *args)
        if dps >= MAX_DPS or cond * 10.0 ** (-dps) <= MP_REL_TOL:
            return to_float(value)
        dps = 2 * dps if not math.isfinite(cond) else max(2 * dps, 25 + int(math.log10(cond)))
