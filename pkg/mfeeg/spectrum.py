"""Scaling exponents and singularity spectrum derived from a Hurst curve.

``tau(q) = q h(q) - 1``, ``alpha = h + q h'`` and ``f(alpha) = q (alpha - h) + 1``,
the last two being the Legendre pair ``alpha = tau'(q)``,
``f = q alpha - tau``. The derivative ``h'`` is taken on the q grid with
central differences inside and second-order one-sided stencils at the ends.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, GridTooCoarse
from .mfdfa import HurstCurve

# f values within this distance of the maximum count as tied for the peak
PEAK_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SingularitySpectrum:
    """The multifractal spectrum, aligned with `q_values`."""
    q_values: np.ndarray
    tau: np.ndarray
    alpha: np.ndarray
    f_alpha: np.ndarray
    h: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ('q_values', 'tau', 'alpha', 'f_alpha'):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.q_values.size
        if any(getattr(self, name).size != n for name in ('tau', 'alpha', 'f_alpha')):
            raise ConfigError('Spectrum arrays must align with the q values')

    @property
    def width(self) -> float:
        """Spectrum width, max(alpha) - min(alpha) over the finite points."""
        finite = self.alpha[np.isfinite(self.alpha)]
        return float(finite.max() - finite.min()) if finite.size else float('nan')


@dataclass(frozen=True)
class SpectrumDescriptors:
    """Geometric landmarks of a singularity spectrum."""
    alpha_peak: float
    alpha_min: float
    alpha_max: float
    f_at_alpha_min: float
    f_at_alpha_max: float
    f_at_peak: float

    @property
    def width(self) -> float:
        return self.alpha_max - self.alpha_min


def scaling_exponents(hurst: HurstCurve) -> np.ndarray:
    """Returns ``tau(q) = q h(q) - 1``. Absent exponents stay NaN."""
    return hurst.q_values * hurst.h - 1.0


def legendre_f(q_values: np.ndarray, alpha: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Returns ``f = q alpha - tau``."""
    return np.asarray(q_values) * np.asarray(alpha) - np.asarray(tau)


def singularity_spectrum(hurst: HurstCurve) -> SingularitySpectrum:
    """Computes tau, alpha and f(alpha) on the q grid of `hurst`.

    :raises GridTooCoarse: If the grid has fewer than 3 points.
    """
    q = hurst.q_values
    h = hurst.h
    if q.size < 3:
        raise GridTooCoarse(f'Need at least 3 q values for h\'(q), got {q.size}')

    h_prime = np.gradient(h, q, edge_order=2)
    alpha = h + q * h_prime
    f_alpha = q * (alpha - h) + 1.0
    return SingularitySpectrum(
        q_values=q, tau=scaling_exponents(hurst), alpha=alpha, f_alpha=f_alpha, h=h)


def spectrum_descriptors(spec: SingularitySpectrum) -> SpectrumDescriptors:
    """Reads the extreme and peak points off a spectrum.

    alpha_min and alpha_max are the extreme alpha values over the grid. The
    peak is the grid point of largest f; among points tied within 1e-12 the
    one whose q is nearest to 0 wins. Non-finite points are ignored.
    """
    valid = np.flatnonzero(np.isfinite(spec.alpha) & np.isfinite(spec.f_alpha))
    if valid.size == 0:
        raise ConfigError('Spectrum has no finite points')

    alpha = spec.alpha[valid]
    f = spec.f_alpha[valid]
    q = spec.q_values[valid]

    i_min = int(np.argmin(alpha))
    i_max = int(np.argmax(alpha))

    tied = np.flatnonzero(f >= f.max() - PEAK_TIE_TOL)
    # argmin returns the first, i.e. lowest index, among equal distances
    i_peak = int(tied[np.argmin(np.abs(q[tied]))])

    return SpectrumDescriptors(
        alpha_peak=float(alpha[i_peak]),
        alpha_min=float(alpha[i_min]),
        alpha_max=float(alpha[i_max]),
        f_at_alpha_min=float(f[i_min]),
        f_at_alpha_max=float(f[i_max]),
        f_at_peak=float(f[i_peak]),
    )
