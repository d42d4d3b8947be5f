"""2*pi-periodic phase-error distributions held exactly by their
trigonometric moments m_k = <e^{ik Theta}>, k = 0..kmax.

Every distribution produced in this package is a trigonometric polynomial
(finite states, discrete measurements), so the moments are exact and all
polynomial concentration measures are closed-form; only the differential
entropy needs quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError
from .fock import ProbeState

DENSITY_FLOOR = -1e-9
HOLEVO_SENTINEL = 1e-14
DEFAULT_ENTROPY_GRID = 8192
ENTROPY_REFINE_TOL = 1e-8


@dataclass(frozen=True)
class PhaseDistribution:
    """Moment vector m_0..m_kmax of a phase-error density on [-pi, pi)."""

    moments: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.moments, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "moments", m)
        if m.ndim != 1 or m.size < 1:
            raise ValidationError("moments must be a nonempty 1-d vector")
        if m[0] != 1.0:
            raise ValidationError(f"m_0 must be exactly 1, got {m[0]!r}")
        if np.any(np.abs(m) > 1 + 1e-12):
            raise ValidationError("moment magnitudes must not exceed 1")
        points = 4096
        while points <= 2 * (m.size - 1):
            points *= 2
        dens = density_grid(self, points)
        worst = float(dens.min())
        if worst < DENSITY_FLOOR:
            raise ValidationError(
                f"reconstructed density dips to {worst:.3e} (< {DENSITY_FLOOR})"
            )

    @property
    def kmax(self) -> int:
        return self.moments.size - 1

    def to_json(self) -> dict:
        return {
            "kmax": self.kmax,
            "moments": [[float(m.real), float(m.imag)] for m in self.moments],
        }

    @classmethod
    def from_json(cls, data) -> "PhaseDistribution":
        try:
            m = np.array([complex(re, im) for re, im in data["moments"]])
        except (TypeError, ValueError, KeyError) as exc:
            raise ValidationError(f"malformed distribution data: {exc}") from exc
        return cls(m)


def canonical_distribution(state: ProbeState) -> PhaseDistribution:
    """Moments of the canonical phase density (1/2pi)|sum_n c_n e^{in theta}|^2.

    m_k = sum_n c_n conj(c_{n+k}); all moments beyond dim-1 vanish.
    """
    c = state.amplitudes
    d = state.dim
    m = np.empty(d, dtype=complex)
    m[0] = 1.0
    for k in range(1, d):
        m[k] = np.dot(c[: d - k], np.conj(c[k:]))
    return PhaseDistribution(m)


def density_grid(dist: PhaseDistribution, points: int, midpoint: bool = False) -> np.ndarray:
    """Density on a uniform grid over [-pi, pi) via an inverse FFT of the
    two-sided moment spectrum.  ``midpoint`` shifts the grid by half a step."""
    if points <= 2 * dist.kmax:
        raise ValidationError("grid must have more points than twice kmax")
    m = np.asarray(dist.moments)
    offset = -math.pi + (math.pi / points if midpoint else 0.0)
    # theta_j = offset + 2*pi*j/points; fold the phase of the grid origin
    # into the spectrum so a plain FFT evaluates sum_k m_k e^{-ik theta_j}.
    k = np.arange(m.size)
    spec = np.zeros(points, dtype=complex)
    twisted = m * np.exp(-1j * k * offset)
    spec[: m.size] = twisted
    spec[points - m.size + 1 :] += np.conj(twisted[1:][::-1])
    return np.fft.fft(spec).real / (2 * math.pi)


def density_at(dist: PhaseDistribution, theta: float) -> float:
    """(1/2pi)[1 + 2 sum_k Re(m_k e^{-ik theta})]."""
    k = np.arange(1, dist.moments.size)
    val = 1.0 + 2.0 * float(np.sum((dist.moments[1:] * np.exp(-1j * k * theta)).real))
    return val / (2 * math.pi)


def mean_square_deviation(dist: PhaseDistribution) -> float:
    """<Theta^2> from the cosine series of theta^2 on [-pi, pi]:
    pi^2/3 + 4 sum_k (-1)^k Re(m_k)/k^2, exact for moment-complete densities."""
    k = np.arange(1, dist.moments.size)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    return math.pi**2 / 3 + 4.0 * float(np.sum(signs * dist.moments[1:].real / k**2))


def holevo_variance(dist: PhaseDistribution) -> float:
    """|m_1|^-2 - 1; +inf when |m_1| is below the sentinel threshold."""
    if dist.kmax < 1:
        return math.inf
    m1 = abs(complex(dist.moments[1]))
    if m1 < HOLEVO_SENTINEL:
        return math.inf
    return 1.0 / m1**2 - 1.0


def surrogate_cost(dist: PhaseDistribution) -> float:
    """Expectation of 5/2 - (8/3)cos(theta) + (1/6)cos(2 theta), the sparse
    pointwise lower bound on theta^2; missing moments count as zero."""
    m1 = dist.moments[1].real if dist.kmax >= 1 else 0.0
    m2 = dist.moments[2].real if dist.kmax >= 2 else 0.0
    return 2.5 - (8.0 / 3.0) * m1 + (1.0 / 6.0) * m2


def differential_entropy(
    dist: PhaseDistribution, grid_points: int = DEFAULT_ENTROPY_GRID
) -> float:
    """H(Theta) = -int p ln p by the composite midpoint rule.

    The result at ``grid_points`` must agree with the doubled grid to
    ENTROPY_REFINE_TOL, else ConvergenceError is raised.
    """
    if grid_points < 64 or grid_points & (grid_points - 1):
        raise ValidationError("grid_points must be a power of two >= 64")
    coarse = _entropy_on_grid(dist, grid_points)
    fine = _entropy_on_grid(dist, 2 * grid_points)
    if abs(fine - coarse) >= ENTROPY_REFINE_TOL:
        raise ConvergenceError(
            f"entropy quadrature not converged at {grid_points} points "
            f"(refinement change {abs(fine - coarse):.3e})"
        )
    return coarse


def _entropy_on_grid(dist: PhaseDistribution, points: int) -> float:
    p = np.clip(density_grid(dist, points, midpoint=True), 0.0, None)
    mask = p > 0
    return float(-np.sum(p[mask] * np.log(p[mask])) * (2 * math.pi / points))


def ensemble_length(dist: PhaseDistribution, grid_points: int = DEFAULT_ENTROPY_GRID) -> float:
    """Effective support length exp(H(Theta)), in (0, 2*pi]."""
    return math.exp(differential_entropy(dist, grid_points))
