"""Multifractal detrended fluctuation analysis (MFDFA).

The analysis runs in five steps:

1. `build_profile`: cumulative sum of the mean-removed series.
2. The profile is cut into ``N_s = N // s`` non-overlapping segments of
   length ``s``, once from the start and once from the end, giving ``2 N_s``
   segments in total.
3. `segment_variances`: each segment is detrended with a least-squares
   polynomial and its mean squared residual is kept.
4. `fluctuation_function`: the q-th order generalized mean of those
   variances, with a logarithmic average at ``q = 0``.
5. `fit_hurst`: the generalized Hurst exponent ``h(q)`` is the slope of
   ``ln F_q(s)`` against ``ln s``.

`mfdfa` chains all of the above and hands the Hurst curve to
`mfeeg.spectrum` for the scaling exponents and the singularity spectrum.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from .errors import (
    AllZeroVariance, ConfigError, DegenerateGrid, FitUnderdetermined,
    InsufficientScales, NonFiniteSample, ScaleTooLarge, SeriesTooShort,
)

mfeeglogger = logging.getLogger('mfeeg')

# q values closer than this to zero take the logarithmic-average branch
Q_ZERO_TOL = 1e-12

# Fewest distinct scales a grid may collapse to
MIN_GRID_SCALES = 3

ArrayLike = Union[Sequence[float], np.ndarray]


def make_q_grid(q_min: float = -5.0, q_max: float = 5.0, q_step: float = 0.1) -> Tuple[float, ...]:
    """Returns an inclusive, evenly spaced q grid.

    Values are rounded to 12 decimals so that grid points such as 0 and 2
    are represented exactly and can be looked up by value.
    """
    if q_step <= 0 or q_max <= q_min:
        raise ConfigError(f'Invalid q grid: min={q_min}, max={q_max}, step={q_step}')
    n_steps = int(round((q_max - q_min) / q_step))
    grid = np.round(q_min + q_step * np.arange(n_steps + 1), 12)
    # Avoid a signed zero in the exported curves
    grid[grid == 0] = 0.0
    return tuple(float(q) for q in grid)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A single univariate signal.

    :param samples: The ordered sample values.
    :param sample_rate: Sampling frequency in Hz.
    :param label: Optional class tag.
    :param signal_id: Identifier of the source (file stem, generator name...).
    """
    samples: np.ndarray
    sample_rate: float = 1.0
    label: Optional[str] = None
    signal_id: str = 'series'

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float).ravel()
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    def __len__(self) -> int:
        return self.samples.size

    def scaled(self, factor: float) -> 'TimeSeries':
        """Returns a copy whose samples are multiplied by `factor`."""
        return TimeSeries(self.samples * factor, self.sample_rate, self.label, self.signal_id)


@dataclass(frozen=True)
class MfdfaConfig:
    """Parameters of one MFDFA run.

    The defaults are q from -5 to 5 in steps of 0.1 and 20 logarithmically
    spaced scales (19 intervals) between 16 and 1024, detrended linearly.

    :param q_values: Strictly increasing moment orders, containing 2 and
    values of both signs.
    :param scale_min: Smallest segment length.
    :param scale_max: Largest segment length.
    :param scale_intervals: Number of logarithmic intervals between the two.
    :param detrend_order: Order of the local detrending polynomial.
    :param min_segment_points: Smallest admissible segment length.
    :param min_fit_points: Fewest usable scales for a Hurst slope.
    """
    q_values: Tuple[float, ...] = field(default_factory=make_q_grid)
    scale_min: int = 16
    scale_max: int = 1024
    scale_intervals: int = 19
    detrend_order: int = 1
    min_segment_points: int = 4
    min_fit_points: int = 4

    def __post_init__(self):
        object.__setattr__(self, 'q_values', tuple(float(q) for q in self.q_values))

    @property
    def scale_count(self) -> int:
        """Number of grid points before deduplication."""
        return self.scale_intervals + 1

    @property
    def q_array(self) -> np.ndarray:
        return np.asarray(self.q_values, dtype=float)

    def validate(self, length: Optional[int] = None):
        """Checks the configuration, optionally against a series length.

        :param length: If given, the number of samples of the series to analyse.
        :raises ConfigError: If an invariant is violated.
        :raises SeriesTooShort: If `length` cannot hold two smallest segments.
        """
        q = self.q_array
        if q.size < 3 or np.any(np.diff(q) <= 0):
            raise ConfigError('q values must be strictly increasing with at least 3 points')
        if not np.any(np.isclose(q, 2.0, rtol=0, atol=1e-9)):
            raise ConfigError('q values must contain q = 2')
        if q[0] >= 0 or q[-1] <= 0:
            raise ConfigError('q values must span negative and positive orders')
        if self.detrend_order < 1:
            raise ConfigError(f'Detrending order must be >= 1, got {self.detrend_order}')
        if not 4 <= self.scale_min < self.scale_max:
            raise ConfigError(f'Need 4 <= scale_min < scale_max, got {self.scale_min}, {self.scale_max}')
        if self.scale_min < max(self.min_segment_points, self.detrend_order + 2):
            raise ConfigError(
                f'scale_min={self.scale_min} is too small for detrending order {self.detrend_order}')
        if self.min_fit_points < 2:
            raise ConfigError('A Hurst fit needs at least 2 scales')

        if length is not None:
            if length < 2 * self.scale_min:
                raise SeriesTooShort(
                    f'Series of length {length} is shorter than twice the smallest scale {self.scale_min}')
            if self.scale_max > length / 4:
                raise ConfigError(
                    f'scale_max={self.scale_max} exceeds a quarter of the series length {length}')


@dataclass(frozen=True, eq=False)
class FluctuationSurface:
    """F_q(s) for every (q, scale) pair, indexed ``values[q_index, scale_index]``."""
    scales: np.ndarray
    q_values: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.q_values), len(self.scales)):
            raise ConfigError(
                f'Surface of shape {self.values.shape} does not match '
                f'{len(self.q_values)} q values x {len(self.scales)} scales')


@dataclass(frozen=True, eq=False)
class HurstCurve:
    """Generalized Hurst exponents.

    Exponents that could not be fitted are NaN and listed by `absent`.
    """
    q_values: np.ndarray
    h: np.ndarray
    fit_r2: Optional[np.ndarray] = None
    stderr: Optional[np.ndarray] = None
    intercept: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ('q_values', 'h', 'fit_r2', 'stderr', 'intercept'):
            value = getattr(self, name)
            if value is None:
                value = np.full(len(self.q_values), np.nan)
            object.__setattr__(self, name, np.asarray(value, dtype=float))
        if self.h.shape != self.q_values.shape:
            raise ConfigError('Hurst exponents and q values differ in length')

    @property
    def absent(self) -> np.ndarray:
        return self.q_values[~np.isfinite(self.h)]

    def require_complete(self) -> 'HurstCurve':
        if self.absent.size > 0:
            raise InsufficientScales(
                f'No Hurst exponent for q in {self.absent.tolist()}')
        return self

    def at(self, q: float) -> float:
        """Returns h at the grid point `q`.

        :raises KeyError: If `q` is not on the grid.
        """
        idx = np.flatnonzero(np.isclose(self.q_values, q, rtol=0, atol=1e-9))
        if idx.size == 0:
            raise KeyError(q)
        return float(self.h[idx[0]])


@dataclass(frozen=True, eq=False)
class MfdfaResult:
    """Everything produced by one MFDFA run on one series."""
    series_id: str
    config: MfdfaConfig
    surface: FluctuationSurface
    hurst: HurstCurve
    spectrum: 'SingularitySpectrum'  # noqa: F821
    label: Optional[str] = None

    @property
    def scales(self) -> np.ndarray:
        return self.surface.scales

    @property
    def tau(self) -> np.ndarray:
        return self.spectrum.tau

    def curve_frames(self) -> Dict[str, pd.DataFrame]:
        """Returns the plot-ready curves: h(q) with fit quality, tau(q) and
        the singularity spectrum (alpha, f)."""
        return {
            'hq': pd.DataFrame({
                'q': self.hurst.q_values, 'h': self.hurst.h,
                'r2': self.hurst.fit_r2, 'stderr': self.hurst.stderr}),
            'tau': pd.DataFrame({'q': self.spectrum.q_values, 'tau': self.spectrum.tau}),
            'spectrum': pd.DataFrame({'alpha': self.spectrum.alpha, 'f': self.spectrum.f_alpha}),
        }


def _as_samples(series: Union[TimeSeries, ArrayLike]) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.samples
    return np.asarray(series, dtype=float).ravel()


def build_profile(series: Union[TimeSeries, ArrayLike]) -> np.ndarray:
    """Returns the profile ``Y(i) = sum_{n<=i} (x(n) - mean(x))``.

    :param series: A `TimeSeries` or a sequence of samples.
    :raises NonFiniteSample: If any sample is NaN or infinite.
    """
    samples = _as_samples(series)
    if samples.size == 0:
        raise SeriesTooShort('Cannot build the profile of an empty series')
    bad = np.flatnonzero(~np.isfinite(samples))
    if bad.size > 0:
        raise NonFiniteSample(
            f'{bad.size} non-finite sample(s), first at index {bad[0]}')
    return np.cumsum(samples - samples.mean())


def make_scale_grid(config: MfdfaConfig) -> np.ndarray:
    """Returns the segment lengths: `config.scale_count` points evenly spaced
    in log space between `scale_min` and `scale_max`, rounded to integers and
    deduplicated.

    :raises DegenerateGrid: If fewer than 3 distinct scales remain.
    """
    if config.scale_count < 1 or config.scale_min < 1 or config.scale_max < config.scale_min:
        raise DegenerateGrid(
            f'Empty scale range [{config.scale_min}, {config.scale_max}] '
            f'with {config.scale_intervals} intervals')
    raw = np.logspace(np.log10(config.scale_min), np.log10(config.scale_max), config.scale_count)
    scales = np.unique(np.rint(raw).astype(int))
    if scales.size < MIN_GRID_SCALES:
        raise DegenerateGrid(
            f'Scale grid [{config.scale_min}, {config.scale_max}] with '
            f'{config.scale_intervals} intervals leaves {scales.size} distinct scale(s)')
    return scales


@lru_cache(maxsize=256)
def _detrend_basis(scale: int, order: int) -> np.ndarray:
    """Orthonormal basis of the polynomials of degree <= `order` sampled on
    `scale` points. Residuals are invariant to the affine abscissa used, so
    [-1, 1] is chosen for conditioning."""
    x = np.linspace(-1.0, 1.0, scale)
    basis, _ = np.linalg.qr(np.polynomial.polynomial.polyvander(x, order))
    basis.setflags(write=False)
    return basis


def segment_variances(profile: ArrayLike, scale: int, detrend_order: int = 1) -> np.ndarray:
    """Returns the detrended variance of each of the ``2 N_s`` segments.

    The first ``N_s`` entries come from segments counted from the start of
    the profile, the next ``N_s`` from segments counted from its end, the
    (N_s + 1)-th entry being the segment that ends on the last sample.

    :param profile: The profile from `build_profile`.
    :param scale: Segment length.
    :param detrend_order: Degree of the least-squares polynomial.
    :raises ScaleTooLarge: If the profile does not hold a single segment.
    :raises FitUnderdetermined: If a segment is shorter than ``detrend_order + 1``.
    """
    profile = np.asarray(profile, dtype=float)
    n = profile.size
    scale = int(scale)
    if scale < detrend_order + 1:
        raise FitUnderdetermined(
            f'Segments of {scale} points cannot fit a polynomial of order {detrend_order}')
    n_segments = n // scale if scale > 0 else 0
    if n_segments < 1:
        raise ScaleTooLarge(f'Scale {scale} exceeds the profile length {n}')

    covered = n_segments * scale
    forward = profile[:covered].reshape(n_segments, scale)
    # Row v holds samples [n - (v + 1) * s, n - v * s)
    backward = profile[n - covered:].reshape(n_segments, scale)[::-1]
    segments = np.vstack([forward, backward])

    basis = _detrend_basis(scale, detrend_order)
    residuals = segments - (segments @ basis) @ basis.T
    return np.mean(residuals ** 2, axis=1)


def _generalized_means(variances: np.ndarray, q_values: np.ndarray, warn: bool = True) -> np.ndarray:
    """Evaluates F_q for a vector of q on one scale's variances.

    Means are taken in log space so that large |q| neither overflows nor
    underflows.
    """
    v = np.asarray(variances, dtype=float)
    q = np.atleast_1d(np.asarray(q_values, dtype=float))
    if v.size == 0:
        raise ConfigError('No segment variances given')
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise ConfigError('Segment variances must be finite and non-negative')

    out = np.empty(q.shape, dtype=float)
    positive = v > 0
    with np.errstate(divide='ignore'):
        log_v = np.log(v)

    is_zero_q = np.abs(q) < Q_ZERO_TOL
    non_positive = (q < 0) | is_zero_q

    if non_positive.any():
        n_zero = v.size - int(positive.sum())
        if n_zero == v.size:
            raise AllZeroVariance(
                f'All {v.size} segment variances are zero; F_q undefined for q <= 0')
        if n_zero > 0 and warn:
            mfeeglogger.warning(
                f'{n_zero} of {v.size} zero-variance segments excluded for q <= 0')
        log_pos = log_v[positive]
        out[is_zero_q] = np.exp(0.5 * np.mean(log_pos))
        neg = non_positive & ~is_zero_q
        if neg.any():
            qn = q[neg]
            log_mean = logsumexp(0.5 * qn[:, None] * log_pos[None, :], axis=1) - np.log(log_pos.size)
            out[neg] = np.exp(log_mean / qn)

    pos = ~non_positive
    if pos.any():
        qp = q[pos]
        with np.errstate(divide='ignore'):
            log_mean = logsumexp(0.5 * qp[:, None] * log_v[None, :], axis=1) - np.log(v.size)
        out[pos] = np.exp(log_mean / qp)

    return out


def fluctuation_function(variances: ArrayLike, q: float) -> float:
    """Returns the q-th order fluctuation function of one scale.

    For ``q != 0`` this is ``(mean(var ** (q / 2))) ** (1 / q)``; for
    ``q = 0`` it is ``exp(mean(ln var) / 2)``. Zero variances are left out
    of the average for ``q <= 0``.

    :raises AllZeroVariance: If every variance is zero and ``q <= 0``.
    """
    return float(_generalized_means(np.asarray(variances, dtype=float), np.array([q]))[0])


def fluctuation_surface(profile: ArrayLike, scales: Sequence[int],
                        q_values: ArrayLike, detrend_order: int = 1,
                        series_id: str = 'series') -> FluctuationSurface:
    """Computes F_q(s) on the full (q, scale) grid of one profile."""
    q = np.asarray(q_values, dtype=float)
    scales = np.asarray(scales, dtype=int)
    values = np.empty((q.size, scales.size), dtype=float)
    n_excluded = 0

    for j, scale in enumerate(scales):
        variances = segment_variances(profile, int(scale), detrend_order)
        n_excluded += int(np.sum(variances == 0))
        values[:, j] = _generalized_means(variances, q, warn=False)

    if n_excluded > 0 and np.any(q <= 0):
        mfeeglogger.warning(
            f'{series_id}: {n_excluded} zero-variance segment(s) excluded for q <= 0')

    return FluctuationSurface(scales=scales, q_values=q, values=values)


def fit_hurst(surface: FluctuationSurface, min_points: int = 4) -> HurstCurve:
    """Fits ``ln F_q(s) = h(q) ln s + c`` by ordinary least squares for each q.

    Scales whose F is not finite and positive are left out of that q's fit.
    A q with fewer than `min_points` usable scales gets a NaN exponent and a
    warning; `HurstCurve.require_complete` turns that into an error.
    """
    q = np.asarray(surface.q_values, dtype=float)
    log_s = np.log(np.asarray(surface.scales, dtype=float))
    h = np.full(q.size, np.nan)
    r2 = np.full(q.size, np.nan)
    stderr = np.full(q.size, np.nan)
    intercept = np.full(q.size, np.nan)

    for i in range(q.size):
        row = surface.values[i]
        usable = np.isfinite(row) & (row > 0)
        n_pts = int(usable.sum())
        if n_pts < min_points:
            mfeeglogger.warning(
                f'q = {q[i]:g}: only {n_pts} usable scale(s), need {min_points}; exponent absent')
            continue

        x = log_s[usable]
        y = np.log(row[usable])
        x_c = x - x.mean()
        y_c = y - y.mean()
        sxx = np.dot(x_c, x_c)
        slope = np.dot(x_c, y_c) / sxx
        resid = y_c - slope * x_c
        ss_res = np.dot(resid, resid)
        ss_tot = np.dot(y_c, y_c)

        h[i] = slope
        intercept[i] = y.mean() - slope * x.mean()
        r2[i] = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
        if n_pts > 2:
            stderr[i] = np.sqrt(ss_res / (n_pts - 2) / sxx)

    return HurstCurve(q_values=q, h=h, fit_r2=r2, stderr=stderr, intercept=intercept)


def mfdfa(series: TimeSeries, config: Optional[MfdfaConfig] = None) -> MfdfaResult:
    """Runs the full analysis on one series.

    :param series: The signal.
    :param config: Analysis parameters; the defaults if `None`.
    :return: An `MfdfaResult` with the surface, the Hurst curve and the
    singularity spectrum.
    """
    # Delayed import, spectrum depends on this module's types
    from .spectrum import singularity_spectrum

    config = config if config is not None else MfdfaConfig()
    config.validate(len(series))

    profile = build_profile(series)
    scales = make_scale_grid(config)
    surface = fluctuation_surface(
        profile, scales, config.q_array, config.detrend_order, series.signal_id)
    hurst = fit_hurst(surface, config.min_fit_points)
    spectrum = singularity_spectrum(hurst)

    return MfdfaResult(
        series_id=series.signal_id, config=config, surface=surface,
        hurst=hurst, spectrum=spectrum, label=series.label)
