import math

import numpy as np
import pytest

from wvakerr import CoherentProbe, CouplingConfig, PpsAngles

# <n^4> of a coherent state as (N^4, N^3, N^2, N, 1) coefficients. Pinned by the
# weighted Poisson series below, not by any printed formula: the variant with
# a 4N^2 term gives 4(<n^4> - <n^2>^2) != 4(4N^3 + 6N^2 + N).
N4_POLYNOMIAL = (1, 6, 7, 1, 0)
N4_REJECTED_POLYNOMIAL = (1, 6, 4, 1, 0)

# oracles.poisson_moment(N, 4) at 60 digits, frozen
N4_SERIES = {2: 94.0, 8: 7624.0, 32: 1252384.0}

# oracles.poisson_cutoff(N, 1e-12), frozen
CUTOFF_1E12 = {8: 35, 100: 178}


def polyval(coefs, x):
    return float(np.polyval(coefs, x))


@pytest.fixture
def n4_polynomial():
    return N4_POLYNOMIAL


@pytest.fixture
def aav_angles():
    return PpsAngles(math.pi / 2, math.pi / 2, math.pi)


@pytest.fixture
def probe8():
    return CoherentProbe(8)


def random_points(seed, count, chi_range=(1e-4, 0.2), n_range=(1.0, 32.0)):
    """Uniform random (angles, probe, coupling) triples over the acceptance grid."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        ti, tf, ph = rng.uniform(0, 2 * math.pi, 3)
        chi = rng.uniform(*chi_range)
        n = rng.uniform(*n_range)
        out.append((PpsAngles(ti, tf, ph), CoherentProbe(n), CouplingConfig(chi)))
    return out
