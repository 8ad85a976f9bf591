"""Shared parameter sets, frozen reference values, and corpus builders.

Reference moments were computed with adaptive quadrature of the weight at
1e-12 relative tolerance (mapped semi-infinite rule) and independently
cross-checked against the closed-form expressions; they are frozen here
so the tests do not depend on the code path they are checking.
"""

from __future__ import annotations

import numpy as np
import pytest

from dampo.fano import CouplingSpectrum
from dampo.spectral import make_parametric_density

# (slow rate, fast rate pair) for the four reference kernel-evolution panels
FIG_SETS = {
    "2a": (0.01, 0.75 + 0j, 0.25 + 0j),
    "2b": (0.01, 0.5 + 5j, 0.5 - 5j),
    "3a": (10.0, 0.75 + 0j, 0.25 + 0j),
    "3b": (10.0, 0.5 + 5j, 0.5 - 5j),
}

# frozen quadrature moments: mean, inverse mean, second moment
FROZEN_MOMENTS = {
    "2a": (0.2752975282701807, 11.046819180330045, 0.1975),
    "2b": (4.731430048139377, 0.3405472161389792, 25.26),
    "3a": (1.732038552492445, 1.5239786294099842, 10.1875),
    "3b": (5.438818471352877, 0.19894831035654176, 35.25),
}


def fig_density(fig_id):
    return make_parametric_density(*FIG_SETS[fig_id])


def corpus_coupling(strength, omega_b=1.5, band=8.0, n=600):
    """Smooth compact-support coupling used across the fano/oracle tests:
    V^2 = strength * w * exp(-w/omega_b) * (1 - (w/band)^2)^2 on [0, band]."""
    grid = np.linspace(0.0, band, n)
    v_sq = strength * grid * np.exp(-grid / omega_b) * (1.0 - (grid / band) ** 2) ** 2
    return CouplingSpectrum(grid, np.sqrt(v_sq))


# resonance widths (pi V^2(root) / 2) for the corpus strengths, measured once
CORPUS_STRENGTHS = {"strong": 0.3, "medium": 0.1, "narrow": 0.02, "weak": 0.0064}


@pytest.fixture(scope="session")
def medium_coupling():
    return corpus_coupling(CORPUS_STRENGTHS["medium"])


@pytest.fixture(scope="session")
def strong_coupling():
    return corpus_coupling(CORPUS_STRENGTHS["strong"])


def rate_triples_seeded(rng, n):
    """n random valid rate triples, half real pairs, half conjugate pairs."""
    out = []
    for _ in range(n):
        big_gamma = 10.0 ** rng.uniform(-2, 1)
        if rng.random() < 0.5:
            gp = 10.0 ** rng.uniform(-1.5, 1.0)
            gm = 10.0 ** rng.uniform(-1.5, 1.0)
            if abs(gp - gm) < 1e-3 * max(gp, gm):
                gm *= 1.07
            if abs(big_gamma - gp) < 1e-3 * max(big_gamma, gp):
                big_gamma *= 1.07
            if abs(big_gamma - gm) < 1e-3 * max(big_gamma, gm):
                big_gamma *= 1.13
            out.append((big_gamma, complex(gp), complex(gm)))
        else:
            re = 10.0 ** rng.uniform(-1.5, 0.5)
            im = 10.0 ** rng.uniform(-1.0, 1.0)
            out.append((big_gamma, complex(re, im), complex(re, -im)))
    return out
