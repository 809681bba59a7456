"""Synthetic signals with known scaling behaviour.

White noise and fractional Gaussian noise are monofractal (``h(q)``
constant); the binomial multiplicative cascade is multifractal with the
closed form ``h(q) = 1/q - log2(a**q + (1 - a)**q) / q``.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .errors import ConfigError, EmbeddingFailure
from .mfdfa import TimeSeries

mfeeglogger = logging.getLogger('mfeeg')

# Relative size below which negative circulant eigenvalues are rounding noise
EMBEDDING_TOL = 1e-10

# Half-width of the symmetric difference used for the analytic h(0)
ANALYTIC_Q0_STEP = 1e-6

ArrayOrFloat = Union[float, np.ndarray]


@dataclass(frozen=True)
class CascadeSpec:
    """Parameters of a binomial multiplicative cascade.

    :param levels: Number of splits k; the series has 2**k samples.
    :param multiplier_a: Share of the mass sent to one child, 0.5 < a < 1.
    :param seed: Seed of the per-level left/right shuffle.
    :param shuffle: If False the larger share always goes left.
    """
    levels: int
    multiplier_a: float = 0.6
    seed: Optional[int] = None
    shuffle: bool = True

    def validate(self):
        if self.levels < 1:
            raise ConfigError(f'A cascade needs at least one level, got {self.levels}')
        if not 0.5 < self.multiplier_a < 1.0:
            raise ConfigError(f'Cascade multiplier must lie in (0.5, 1), got {self.multiplier_a}')
        if self.levels < 10:
            mfeeglogger.warning(
                f'Cascade with {self.levels} levels is too short for stable scaling estimates')


def gen_white_noise(n: int, seed: Optional[int] = None) -> TimeSeries:
    """I.i.d. standard Gaussian samples; h(2) = 0.5."""
    if n < 64:
        raise ConfigError(f'White noise needs n >= 64, got {n}')
    rng = np.random.default_rng(seed)
    return TimeSeries(rng.standard_normal(n), signal_id=f'white_n{n}_s{seed}')


def fgn_autocovariance(hurst_h: float, lags: np.ndarray) -> np.ndarray:
    """Autocovariance of unit-variance fractional Gaussian noise."""
    k = np.abs(np.asarray(lags, dtype=float))
    two_h = 2.0 * hurst_h
    return 0.5 * (np.abs(k - 1) ** two_h - 2 * k ** two_h + (k + 1) ** two_h)


def gen_fgn(n: int, hurst_h: float, seed: Optional[int] = None) -> TimeSeries:
    """Fractional Gaussian noise by circulant embedding (Davies-Harte).

    The length-n autocovariance is embedded in a circulant of size 2n whose
    eigenvalues are obtained by FFT; a complex Gaussian vector coloured by
    their square roots and transformed back gives a sample with exactly the
    target covariance.

    :param n: Number of samples, a power of 2.
    :param hurst_h: Hurst exponent in (0, 1).
    :raises EmbeddingFailure: If the circulant has a negative eigenvalue.
    """
    if not 0 < hurst_h < 1:
        raise ConfigError(f'Hurst exponent must lie in (0, 1), got {hurst_h}')
    if n < 2 or n & (n - 1):
        raise ConfigError(f'fGn length must be a power of 2, got {n}')

    gamma = fgn_autocovariance(hurst_h, np.arange(n + 1))
    row = np.concatenate([gamma, gamma[n - 1:0:-1]])
    eigenvalues = np.fft.fft(row).real

    if eigenvalues.min() < -EMBEDDING_TOL * eigenvalues.max():
        raise EmbeddingFailure(
            f'Circulant embedding of fGn(H={hurst_h}, n={n}) has a negative eigenvalue '
            f'{eigenvalues.min():.3e}')
    eigenvalues = np.clip(eigenvalues, 0.0, None)

    rng = np.random.default_rng(seed)
    m = row.size
    noise = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    sample = np.fft.fft(np.sqrt(eigenvalues / m) * noise)
    return TimeSeries(sample.real[:n], signal_id=f'fgn_H{hurst_h:g}_n{n}_s{seed}')


def gen_binomial_cascade(spec: CascadeSpec) -> TimeSeries:
    """The binomial measure after `spec.levels` splits.

    Every cell of mass v becomes the pair (v a, v (1 - a)); with shuffling on,
    each pair's order is flipped by a fair seeded coin, independently per
    cell and level. The masses sum to 1.
    """
    spec.validate()
    a = spec.multiplier_a
    rng = np.random.default_rng(spec.seed)
    measure = np.ones(1)

    for _ in range(spec.levels):
        left = measure * a
        right = measure * (1.0 - a)
        if spec.shuffle:
            flip = rng.random(measure.size) < 0.5
            left, right = np.where(flip, right, left), np.where(flip, left, right)
        measure = np.empty(2 * measure.size)
        measure[0::2] = left
        measure[1::2] = right

    return TimeSeries(measure, signal_id=f'cascade_k{spec.levels}_a{a:g}_s{spec.seed}')


def analytic_binomial_tau(q: ArrayOrFloat, a: float) -> ArrayOrFloat:
    """Mass exponent of the binomial cascade, ``-log2(a**q + (1 - a)**q)``."""
    q = np.asarray(q, dtype=float)
    tau = -np.log2(a ** q + (1.0 - a) ** q)
    return float(tau) if tau.ndim == 0 else tau


def _closed_form_hurst(q: np.ndarray, a: float) -> np.ndarray:
    return 1.0 / q - np.log2(a ** q + (1.0 - a) ** q) / q


def analytic_binomial_hurst(q: ArrayOrFloat, a: float) -> ArrayOrFloat:
    """Generalized Hurst exponent of the binomial cascade.

    At q = 0 the removable singularity is filled with the mean of the
    closed form at +/-1e-6.
    """
    if not 0.5 <= a < 1.0:
        raise ConfigError(f'Cascade multiplier must lie in [0.5, 1), got {a}')
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    h = np.empty_like(q_arr)
    at_zero = q_arr == 0
    h[~at_zero] = _closed_form_hurst(q_arr[~at_zero], a)
    if at_zero.any():
        step = np.array([-ANALYTIC_Q0_STEP, ANALYTIC_Q0_STEP])
        h[at_zero] = _closed_form_hurst(step, a).mean()
    return float(h[0]) if np.ndim(q) == 0 else h


def analytic_binomial_spectrum(q_values: np.ndarray, a: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact (tau, alpha, f) of the binomial cascade on `q_values`.

    ``alpha = tau'(q)`` is evaluated in closed form and ``f = q alpha - tau``.
    """
    q = np.asarray(q_values, dtype=float)
    b = 1.0 - a
    tau = -np.log2(a ** q + b ** q)
    alpha = -(a ** q * np.log2(a) + b ** q * np.log2(b)) / (a ** q + b ** q)
    return tau, alpha, q * alpha - tau
