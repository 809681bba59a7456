import numpy as np
import pytest

from mfeeg.errors import ConfigError, GridTooCoarse
from mfeeg.mfdfa import HurstCurve, make_q_grid
from mfeeg.spectrum import (SingularitySpectrum, legendre_f, scaling_exponents,
                            singularity_spectrum, spectrum_descriptors)

EPSILON = 1e-12

Q = np.array(make_q_grid())


def test_monofractal_spectrum_collapses():
    spec = singularity_spectrum(HurstCurve(Q, np.full(Q.size, 0.5)))
    assert np.allclose(spec.alpha, 0.5, rtol=0, atol=EPSILON)
    assert np.allclose(spec.f_alpha, 1.0, rtol=0, atol=EPSILON)
    assert np.allclose(spec.tau, 0.5 * Q - 1.0, rtol=0, atol=EPSILON)
    assert spec.width < EPSILON

    d = spectrum_descriptors(spec)
    assert abs(d.alpha_peak - 0.5) < EPSILON
    assert abs(d.f_at_peak - 1.0) < EPSILON


def test_linear_hurst_curve():
    # h = 1 - 0.05 q gives alpha = 1 - 0.1 q and f = 1 - 0.05 q^2
    spec = singularity_spectrum(HurstCurve(Q, 1.0 - 0.05 * Q))
    assert np.allclose(spec.alpha, 1.0 - 0.1 * Q, rtol=0, atol=1e-10)
    assert np.allclose(spec.f_alpha, 1.0 - 0.05 * Q ** 2, rtol=0, atol=1e-10)

    d = spectrum_descriptors(spec)
    assert abs(d.alpha_min - 0.5) < 1e-10
    assert abs(d.alpha_max - 1.5) < 1e-10
    assert abs(d.alpha_peak - 1.0) < 1e-10
    assert abs(d.f_at_alpha_min + 0.25) < 1e-10
    assert abs(d.f_at_alpha_max + 0.25) < 1e-10
    assert abs(d.width - 1.0) < 1e-10


def test_legendre_identity():
    h = 0.8 + 0.2 * np.tanh(-Q / 2)
    hurst = HurstCurve(Q, h)
    spec = singularity_spectrum(hurst)
    assert np.allclose(spec.f_alpha, legendre_f(Q, spec.alpha, spec.tau), rtol=0, atol=1e-12)
    assert np.allclose(scaling_exponents(hurst), Q * h - 1.0)
    # tau(0) = -1 whatever h is
    assert abs(spec.tau[Q == 0][0] + 1.0) < EPSILON


def test_absent_exponents_stay_nan():
    h = np.full(Q.size, 0.5)
    h[0] = np.nan
    spec = singularity_spectrum(HurstCurve(Q, h))
    assert np.isnan(spec.tau[0])
    assert np.isnan(spec.alpha[0])
    assert np.isfinite(spec.width)


@pytest.mark.parametrize("q", [[2.0], [-1.0, 2.0]])
def test_grid_too_coarse(q):
    with pytest.raises(GridTooCoarse):
        singularity_spectrum(HurstCurve(np.array(q), np.full(len(q), 0.5)))


def test_peak_tie_goes_to_q_nearest_zero():
    q = np.array([-1.0, -0.5, 0.5, 1.0])
    spec = SingularitySpectrum(q, tau=q - 1.0, alpha=np.array([1.0, 2.0, 3.0, 4.0]),
                               f_alpha=np.ones(4))
    # -0.5 and 0.5 are equally near 0, the lower index wins
    assert spectrum_descriptors(spec).alpha_peak == 2.0

    spec = SingularitySpectrum(q, tau=q - 1.0, alpha=np.array([1.0, 2.0, 3.0, 4.0]),
                               f_alpha=np.array([1.0, 1.0 - 1e-6, 1.0, 1.0]))
    assert spectrum_descriptors(spec).alpha_peak == 3.0


def test_misaligned_spectrum():
    with pytest.raises(ConfigError):
        SingularitySpectrum(np.zeros(3), np.zeros(3), np.zeros(2), np.zeros(3))
