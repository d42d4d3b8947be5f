"""Discrete estimate-valued measurements and the phase-averaged error
distribution they induce.

Each outcome carries an estimate value in [0, 2*pi) and a PSD matrix on the
number basis.  Averaging the error theta = estimate - phase uniformly over
the true phase makes the phi-integral analytic, so the moments of the
average distribution are computed in closed form and never by numerical
integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .fock import ProbeState, make_state
from .phasedist import PhaseDistribution

PSD_EIG_FLOOR = -1e-10
COMPLETENESS_TOL = 1e-10
TWO_PI = 2 * math.pi


def wrap_angle(x):
    """Map angles into [-pi, pi) with wrap(pi) = -pi."""
    return np.mod(np.asarray(x) + math.pi, TWO_PI) - math.pi


@dataclass(frozen=True)
class EstimatePOM:
    """Discrete POM; outcome j has estimate ``estimates[j]`` and PSD element
    ``elements[j]``, with the elements summing to the identity."""

    estimates: np.ndarray
    elements: np.ndarray  # shape (n_outcomes, dim, dim)

    def __post_init__(self):
        est = np.asarray(self.estimates, dtype=float)
        els = np.asarray(self.elements, dtype=complex)
        est.setflags(write=False)
        els.setflags(write=False)
        object.__setattr__(self, "estimates", est)
        object.__setattr__(self, "elements", els)
        if est.ndim != 1 or est.size == 0:
            raise ValidationError("need at least one outcome")
        if np.any(est < 0) or np.any(est >= TWO_PI):
            raise ValidationError("estimates must lie in [0, 2*pi)")
        if els.ndim != 3 or els.shape[0] != est.size or els.shape[1] != els.shape[2]:
            raise ValidationError("elements must be (n_outcomes, dim, dim)")
        for j, m in enumerate(els):
            if not np.allclose(m, m.conj().T, atol=1e-10, rtol=0.0):
                raise ValidationError(f"element {j} is not Hermitian")
            low = float(np.linalg.eigvalsh(m).min())
            if low < PSD_EIG_FLOOR:
                raise ValidationError(f"element {j} has eigenvalue {low:.3e} < 0")
        total = els.sum(axis=0)
        if np.max(np.abs(total - np.eye(els.shape[1]))) > COMPLETENESS_TOL:
            raise ValidationError("elements do not sum to the identity")

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    @property
    def n_outcomes(self) -> int:
        return self.estimates.size

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "outcomes": [
                {
                    "estimate": float(e),
                    "matrix": [[[float(v.real), float(v.imag)] for v in row] for row in m],
                }
                for e, m in zip(self.estimates, self.elements)
            ],
        }

    @classmethod
    def from_json(cls, data) -> "EstimatePOM":
        try:
            est = [o["estimate"] for o in data["outcomes"]]
            els = [
                [[complex(re, im) for re, im in row] for row in o["matrix"]]
                for o in data["outcomes"]
            ]
        except (TypeError, ValueError, KeyError) as exc:
            raise ValidationError(f"malformed POM data: {exc}") from exc
        return cls(np.array(est), np.array(els))


def conditional_probability(
    povm: EstimatePOM, state: ProbeState, phi: float, outcome_index: int
) -> float:
    """p(j|phi) = tr[M_j rho_phi] with rho_phi the phase-shifted probe."""
    if not 0 <= outcome_index < povm.n_outcomes:
        raise ValidationError(f"outcome index {outcome_index} out of range")
    if povm.dim != state.dim:
        raise ValidationError("POM and state dimensions differ")
    c_phi = state.amplitudes * np.exp(-1j * np.arange(state.dim) * phi)
    val = complex(np.conj(c_phi) @ povm.elements[outcome_index] @ c_phi)
    if abs(val.imag) > 1e-12:
        raise ValidationError(f"probability has imaginary part {val.imag:.3e}")
    return max(val.real, 0.0)


def average_distribution(povm: EstimatePOM, state: ProbeState) -> PhaseDistribution:
    """Exact moments of the phase-averaged error distribution.

    Integrating the uniform phase average against the discrete outcomes gives
    m_k = sum_j e^{ik est_j} sum_n (M_j)_{n+k,n} conj(c_{n+k}) c_n.
    """
    if povm.dim != state.dim:
        raise ValidationError("POM and state dimensions differ")
    c = state.amplitudes
    d = state.dim
    phases = np.exp(1j * np.outer(np.arange(d), povm.estimates))  # (k, j)
    m = np.empty(d, dtype=complex)
    m[0] = 1.0
    for k in range(1, d):
        pair = np.conj(c[k:]) * c[: d - k]
        inner = np.array(
            [np.dot(np.diagonal(el, offset=-k), pair) for el in povm.elements]
        )
        m[k] = np.dot(phases[k], inner)
    return PhaseDistribution(m)


def covariant_seed(povm: EstimatePOM) -> np.ndarray:
    """Seed of the covariant measurement generating the same average
    distribution: (1/2pi) sum_j e^{iN est_j} M_j e^{-iN est_j}.

    The covariant family e^{-iN theta} seed e^{iN theta} d(theta) is complete
    exactly when diag(2*pi*seed) is the all-ones vector; that is verified.
    """
    n = np.arange(povm.dim)
    seed = np.zeros((povm.dim, povm.dim), dtype=complex)
    for est, m in zip(povm.estimates, povm.elements):
        d = np.exp(1j * n * est)
        seed += d[:, None] * m * np.conj(d)[None, :]
    seed /= TWO_PI
    if np.max(np.abs(TWO_PI * np.diagonal(seed) - 1.0)) > COMPLETENESS_TOL:
        raise ValidationError("covariant seed fails the completeness identity")
    return seed


def covariant_average_distribution(seed: np.ndarray, state: ProbeState) -> PhaseDistribution:
    """Moments of the average distribution generated by a covariant seed:
    m_k = 2*pi sum_n seed_{n+k,n} conj(c_{n+k}) c_n."""
    seed = np.asarray(seed, dtype=complex)
    c = state.amplitudes
    d = state.dim
    if seed.shape != (d, d):
        raise ValidationError("seed and state dimensions differ")
    m = np.empty(d, dtype=complex)
    m[0] = 1.0
    for k in range(1, d):
        m[k] = TWO_PI * np.dot(np.diagonal(seed, offset=-k), np.conj(c[k:]) * c[: d - k])
    return PhaseDistribution(m)


def per_phase_variance(povm: EstimatePOM, state: ProbeState, phi: float) -> float:
    """Var_phi of the estimate: sum_j wrap(est_j - phi)^2 p(j|phi)."""
    errors = wrap_angle(povm.estimates - phi)
    probs = np.array(
        [conditional_probability(povm, state, phi, j) for j in range(povm.n_outcomes)]
    )
    return float(np.dot(errors**2, probs))


def kphase_construction(K: int):
    """Probe and measurement that perfectly discriminate the K phases
    2*pi*k/K: the uniform K-level state and the spectral projectors of its
    shifted copies.

    Returns (state, povm, report); the report carries the Gram matrix of the
    shifted states, the success probabilities at each special phase, and the
    mean number (K-1)/2.
    """
    if K < 1:
        raise ValidationError("K must be >= 1")
    psi = make_state(np.ones(K))
    phis = TWO_PI * np.arange(K) / K
    n = np.arange(K)
    shifted = np.exp(-1j * np.outer(phis, n)) * psi.amplitudes  # (k, n)
    elements = np.einsum("km,kn->kmn", shifted, np.conj(shifted))
    povm = EstimatePOM(phis, elements)
    gram = shifted @ shifted.conj().T
    success = np.array(
        [conditional_probability(povm, psi, phis[k], k) for k in range(K)]
    )
    report = {
        "K": K,
        "mean_number": (K - 1) / 2,
        "gram": [[[float(g.real), float(g.imag)] for g in row] for row in gram],
        "gram_identity_error": float(np.max(np.abs(gram - np.eye(K)))),
        "success_probabilities": [float(p) for p in success],
    }
    return psi, povm, report
