import math

import numpy as np
import pytest

from phaselimit import EstimatePOM, ProbeState, make_state


def random_state(rng, dim, complex_amps=True) -> ProbeState:
    amps = rng.standard_normal(dim)
    if complex_amps:
        amps = amps + 1j * rng.standard_normal(dim)
    return make_state(amps)


def msd_quadrature(dist, nodes=512) -> float:
    """Independent oracle: integral of theta^2 * p(theta) by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = math.pi * x
    k = np.arange(1, dist.moments.size)
    dens = (1.0 + 2.0 * (np.exp(-1j * np.outer(theta, k)) @ dist.moments[1:]).real) / (
        2 * math.pi
    )
    return float(np.sum(w * math.pi * theta**2 * dens))


def random_povm(rng, dim, n_outcomes) -> EstimatePOM:
    """Random informationally-unstructured POM: conjugate random PSD blocks
    by S^{-1/2} so they sum to the identity."""
    blocks = []
    for _ in range(n_outcomes):
        r = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        blocks.append(r @ r.conj().T)
    total = sum(blocks)
    vals, vecs = np.linalg.eigh(total)
    inv_sqrt = (vecs * (1.0 / np.sqrt(vals))) @ vecs.conj().T
    elements = np.array([inv_sqrt @ b @ inv_sqrt for b in blocks])
    estimates = np.sort(rng.uniform(0, 2 * math.pi, n_outcomes))
    return EstimatePOM(estimates, elements)


def number_povm(dim, estimates=None) -> EstimatePOM:
    """Projective number measurement with estimate labels (default 0)."""
    if estimates is None:
        estimates = np.zeros(dim)
    elements = np.array([np.outer(e, e) for e in np.eye(dim, dtype=complex)])
    return EstimatePOM(np.asarray(estimates, dtype=float), elements)


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)
