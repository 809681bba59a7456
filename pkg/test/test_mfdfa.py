import logging

import numpy as np
import pytest

from mfeeg.errors import (AllZeroVariance, ConfigError, DegenerateGrid, FitUnderdetermined,
                          InsufficientScales, NonFiniteSample, ScaleTooLarge, SeriesTooShort)
from mfeeg.mfdfa import (FluctuationSurface, MfdfaConfig, TimeSeries, build_profile, fit_hurst,
                         fluctuation_function, make_q_grid, make_scale_grid, mfdfa,
                         segment_variances)
from mfeeg.synth import (CascadeSpec, analytic_binomial_hurst, gen_binomial_cascade, gen_fgn,
                         gen_white_noise)

EPSILON = 1e-9


def naive_mfdfa(x, scales, q_values, order):
    """Loop-by-loop reference: polyfit per segment, both directions."""
    profile = np.cumsum(np.asarray(x) - np.mean(x))
    n = profile.size
    log_f = np.empty((len(q_values), len(scales)))
    for j, s in enumerate(scales):
        n_s = n // s
        t = np.arange(s)
        variances = []
        for start in [v * s for v in range(n_s)] + [n - (v + 1) * s for v in range(n_s)]:
            seg = profile[start:start + s]
            fit = np.polyval(np.polyfit(t, seg, order), t)
            variances.append(np.mean((seg - fit) ** 2))
        variances = np.array(variances)
        for i, q in enumerate(q_values):
            if q == 0:
                log_f[i, j] = 0.5 * np.mean(np.log(variances))
            else:
                log_f[i, j] = np.log(np.mean(variances ** (q / 2))) / q
    h = np.array([np.polyfit(np.log(scales), row, 1)[0] for row in log_f])
    return np.exp(log_f), h


test_scale_grid_cases = [
    (MfdfaConfig(scale_min=16, scale_max=64, scale_intervals=2), [16, 32, 64]),
    (MfdfaConfig(scale_min=10, scale_max=1000, scale_intervals=2), [10, 100, 1000]),
    (MfdfaConfig(scale_min=8, scale_max=16, scale_intervals=1000), list(range(8, 17))),
]

test_generalized_mean_cases = [
    ([4.0, 4.0], -3.0, 2.0),
    ([4.0, 4.0], 0.0, 2.0),
    ([4.0, 4.0], 5.0, 2.0),
    ([1.0, 4.0], 2.0, np.sqrt(2.5)),
    ([1.0, 4.0], 0.0, np.sqrt(2.0)),
    ([1.0, 4.0], -2.0, 0.625 ** -0.5),
    # zero variances are dropped for q <= 0 only
    ([0.0, 4.0], 2.0, np.sqrt(2.0)),
    ([0.0, 4.0], 0.0, 2.0),
    ([0.0, 4.0], -2.0, 2.0),
    ([0.0, 0.0], 3.0, 0.0),
]


def test_q_grid_defaults():
    grid = make_q_grid()
    assert len(grid) == 101
    assert grid[0] == -5.0 and grid[-1] == 5.0
    assert 0.0 in grid and 2.0 in grid
    assert all(b > a for a, b in zip(grid, grid[1:]))


def test_q_grid_invalid():
    with pytest.raises(ConfigError):
        make_q_grid(1.0, -1.0, 0.1)
    with pytest.raises(ConfigError):
        make_q_grid(-1.0, 1.0, 0.0)


def test_default_scale_grid():
    scales = make_scale_grid(MfdfaConfig())
    assert scales.size == 20
    assert scales[0] == 16 and scales[-1] == 1024
    assert np.all(np.diff(scales) > 0)


@pytest.mark.parametrize("config, expected", test_scale_grid_cases)
def test_scale_grid(config, expected):
    assert make_scale_grid(config).tolist() == expected


def test_degenerate_scale_grid():
    with pytest.raises(DegenerateGrid):
        make_scale_grid(MfdfaConfig(scale_min=16, scale_max=17, scale_intervals=5))


def test_profile():
    assert build_profile([1.0, 2.0, 3.0]).tolist() == [-1.0, -1.0, 0.0]
    profile = build_profile(np.random.default_rng(0).standard_normal(257))
    assert abs(profile[-1]) < EPSILON


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_profile_non_finite(bad):
    with pytest.raises(NonFiniteSample):
        build_profile([1.0, bad, 3.0])


def test_segment_variances_layout():
    profile = np.random.default_rng(1).standard_normal(103)
    variances = segment_variances(profile, 10, 1)
    assert variances.size == 20

    # the first backward segment ends on the last sample
    _, ref = naive_segment(profile[93:103])
    assert abs(variances[10] - ref) < EPSILON
    _, ref = naive_segment(profile[0:10])
    assert abs(variances[0] - ref) < EPSILON


def naive_segment(seg):
    t = np.arange(seg.size)
    fit = np.polyval(np.polyfit(t, seg, 1), t)
    return fit, np.mean((seg - fit) ** 2)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_polynomial_profile_detrends_to_zero(order):
    t = np.arange(64, dtype=float)
    profile = np.polyval(np.arange(1, order + 2, dtype=float), t / 64)
    assert np.all(segment_variances(profile, 16, order) < 1e-20)


def test_segment_variances_errors():
    with pytest.raises(ScaleTooLarge):
        segment_variances(np.zeros(10), 11, 1)
    with pytest.raises(FitUnderdetermined):
        segment_variances(np.zeros(10), 2, 2)


@pytest.mark.parametrize("variances, q, expected", test_generalized_mean_cases)
def test_fluctuation_function(variances, q, expected):
    assert abs(fluctuation_function(variances, q) - expected) < EPSILON


def test_fluctuation_function_continuous_at_zero():
    variances = [1.0, 2.0, 1.5, 0.7]
    f0 = fluctuation_function(variances, 0.0)
    below = fluctuation_function(variances, -1e-4)
    above = fluctuation_function(variances, 1e-4)
    assert abs(below - f0) < 1e-5
    assert abs(above - f0) < 1e-5
    assert abs((below + above) / 2 - f0) < 1e-6


def test_fluctuation_function_large_q_is_finite():
    variances = np.logspace(-8, 8, 50)
    for q in (-40.0, 40.0):
        assert np.isfinite(fluctuation_function(variances, q))


def test_all_zero_variance():
    with pytest.raises(AllZeroVariance):
        fluctuation_function([0.0, 0.0], -1.0)
    with pytest.raises(AllZeroVariance):
        fluctuation_function([0.0, 0.0], 0.0)


def test_against_naive_implementation():
    x = np.random.default_rng(7).standard_normal(500)
    q_values = (-2.0, 0.0, 2.0)
    config = MfdfaConfig(q_values=q_values, scale_min=16, scale_max=64,
                         scale_intervals=2, min_fit_points=3)
    result = mfdfa(TimeSeries(x), config)
    ref_f, ref_h = naive_mfdfa(x, [16, 32, 64], q_values, 1)

    assert result.scales.tolist() == [16, 32, 64]
    assert np.allclose(result.surface.values, ref_f, rtol=1e-9, atol=0)
    assert np.allclose(result.hurst.h, ref_h, rtol=0, atol=1e-9)


def test_fit_exact_power_law():
    scales = np.array([16, 32, 64, 128])
    q = np.array([-1.0, 0.0, 2.0])
    values = np.array([3.0 * scales ** 0.8, 2.0 * scales ** 0.6, scales ** 0.4])
    curve = fit_hurst(FluctuationSurface(scales, q, values))
    assert np.allclose(curve.h, [0.8, 0.6, 0.4], rtol=0, atol=EPSILON)
    assert np.allclose(curve.fit_r2, 1.0)
    assert np.allclose(curve.intercept, np.log([3.0, 2.0, 1.0]), atol=EPSILON)


def test_fit_too_few_scales(caplog):
    scales = np.array([16, 32, 64, 128])
    q = np.array([-1.0, 0.0, 2.0])
    values = np.vstack([scales ** 0.5] * 3).astype(float)
    values[0, :2] = np.nan
    with caplog.at_level(logging.WARNING, logger='mfeeg'):
        curve = fit_hurst(FluctuationSurface(scales, q, values), min_points=3)
    assert np.isnan(curve.h[0])
    assert curve.absent.tolist() == [-1.0]
    assert 'exponent absent' in caplog.text
    with pytest.raises(InsufficientScales):
        curve.require_complete()


def test_hurst_at():
    result = mfdfa(gen_white_noise(2048, seed=2), MfdfaConfig(scale_max=256))
    assert result.hurst.at(2.0) == result.hurst.h[70]
    with pytest.raises(KeyError):
        result.hurst.at(2.05)


test_config_error_cases = [
    dict(q_values=(-1.0, 1.0, 3.0)),              # no q = 2
    dict(q_values=(0.5, 1.0, 2.0)),               # no negative q
    dict(q_values=(-1.0, 2.0)),                   # too few
    dict(q_values=(-1.0, 2.0, 1.0)),              # not increasing
    dict(scale_min=2),
    dict(scale_min=64, scale_max=64),
    dict(detrend_order=0),
]


@pytest.mark.parametrize("kwargs", test_config_error_cases)
def test_config_errors(kwargs):
    with pytest.raises(ConfigError):
        MfdfaConfig(**kwargs).validate()


def test_config_against_length():
    with pytest.raises(ConfigError):
        MfdfaConfig(scale_max=1024).validate(4000)
    with pytest.raises(SeriesTooShort):
        MfdfaConfig(scale_min=16, scale_max=1024).validate(20)
    MfdfaConfig(scale_max=1024).validate(4096)


def test_white_noise_is_monofractal():
    result = mfdfa(gen_white_noise(16384, seed=11))
    assert abs(result.hurst.at(2.0) - 0.5) < 0.1
    assert np.all(np.isfinite(result.hurst.h))


def test_fgn_recovers_hurst():
    result = mfdfa(gen_fgn(2 ** 14, 0.7, seed=5))
    assert np.all(np.abs(result.hurst.h - 0.7) < 0.15)
    assert abs(result.hurst.at(2.0) - 0.7) < 0.07
    assert result.spectrum.width < 0.2


@pytest.fixture(scope='module')
def cascade_result():
    return mfdfa(gen_binomial_cascade(CascadeSpec(16, 0.6, seed=1)))


def test_cascade_matches_closed_form(cascade_result):
    q = cascade_result.hurst.q_values
    away_from_zero = np.abs(q) >= 0.5
    expected = analytic_binomial_hurst(q[away_from_zero], 0.6)
    assert np.all(np.abs(cascade_result.hurst.h[away_from_zero] - expected) < 0.05)

    tau = cascade_result.tau
    assert np.all(np.diff(tau, 2) <= 1e-6)


def test_fluctuations_grow_with_q(cascade_result):
    values = cascade_result.surface.values
    assert np.all(np.isfinite(values))
    assert np.all(np.diff(values, axis=0) >= -1e-9 * values[1:])


def test_cascade_spectrum_shape(cascade_result):
    spec = cascade_result.spectrum
    assert np.all(spec.f_alpha <= 1.0 + 1e-6)
    assert np.all(np.diff(spec.alpha) <= 1e-9)
    assert spec.width > 0.2


def test_scaled_input_scales_fluctuations():
    series = gen_fgn(4096, 0.3, seed=9)
    config = MfdfaConfig(scale_max=512)
    base = mfdfa(series, config)
    scaled = mfdfa(series.scaled(7.5), config)
    assert np.allclose(scaled.surface.values, 7.5 * base.surface.values, rtol=1e-9, atol=0)
    assert np.allclose(scaled.hurst.h, base.hurst.h, rtol=0, atol=1e-8)


def test_constant_series():
    with pytest.raises(AllZeroVariance):
        mfdfa(TimeSeries(np.full(4096, 3.0)))
