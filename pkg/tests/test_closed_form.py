import numpy as np
import pytest

from nftkit import closed_form as cf
from nftkit.errors import ConsistencyError, DegenerateSpectrumError, InvalidArgumentError
from nftkit.types import Signal


def test_zero_amplitude_is_identity():
    s = cf.rect_scattering(cf.RectPulse(0.0, -1.0, 2.0), 0.7)
    assert abs(s.a - 1) < 1e-15 and s.b == 0


def test_values_at_zero_lambda():
    s = cf.rect_scattering(cf.RectPulse(2.0, 0.0, 1.0), 0.0)
    assert s.a == pytest.approx(-0.4161468365, abs=1e-10)
    assert s.b == pytest.approx(-0.9092974268, abs=1e-10)


def test_unimodular_on_real_axis():
    lam = np.linspace(-30, 30, 1001)
    for A in (0.3, 2.0, 5.0 - 2.0j):
        a, b = cf.rect_ab(cf.RectPulse(A, -0.3, 1.4), lam)
        assert np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1)) < 1e-13


def test_continuous_equals_ratio():
    p = cf.RectPulse(2.0, 0.0, 1.0)
    lam = np.linspace(-10, 10, 201)
    a, b = cf.rect_ab(p, lam)
    np.testing.assert_allclose(cf.rect_continuous(p, lam), b / a, atol=1e-12)


def test_continuous_limit_at_zero():
    p = cf.RectPulse(1.0, -0.5, 0.5)
    v0 = cf.rect_continuous(p, 0.0)
    a, b = cf.rect_ab(p, 1e-6)
    assert np.isfinite(v0)
    assert abs(v0 - b / a) < 1e-5
    assert abs(v0 + np.tan(1.0)) < 1e-12


def test_continuous_weak_limit():
    p = cf.RectPulse(1e-4, 0.0, 1.0)
    lam = np.linspace(-8, 8, 81)
    err = np.max(np.abs(cf.rect_continuous(p, lam) - cf.rect_linear_limit(p, lam)))
    assert err < 1e-11


def test_continuous_degenerate():
    # A sech has a real zero at A=1.5; for rect a(0) = cos(A T) vanishes at A T = pi/2
    with pytest.raises(DegenerateSpectrumError):
        cf.rect_continuous(cf.RectPulse(np.pi / 2, 0.0, 1.0), 0.0)


@pytest.mark.parametrize("A,count", [(1.0, 0), (2.0, 1), (6.0, 2), (10.0, 3)])
def test_eigenvalue_counts(A, count):
    roots = cf.rect_eigenvalues(A, 1.0)
    assert len(roots) == count
    p = cf.RectPulse(A, 0.0, 1.0)
    for r in roots:
        assert r.real == 0 and 0 < r.imag < A
        assert abs(cf.rect_ab(p, r)[0]) < 1e-12


def test_eigenvalues_consistency_guard():
    with pytest.raises(ConsistencyError):
        # a scan too coarse to bracket both roots trips the count check
        cf.rect_eigenvalues(6.0, 1.0, n_scan=2)


def test_eigenvalue_args_validated():
    with pytest.raises(InvalidArgumentError):
        cf.rect_eigenvalues(2.0, -1.0)


def test_a_derivative_matches_finite_difference():
    p = cf.RectPulse(2.0, 0.0, 1.0)
    lam = 0.2 + 0.6j
    h = 1e-6
    fd = (cf.rect_ab(p, lam + h)[0] - cf.rect_ab(p, lam - h)[0]) / (2 * h)
    assert abs(cf.rect_a_derivative(p, lam) - fd) < 1e-8


def test_linear_fourier_zero():
    assert cf.linear_fourier(Signal.zeros(10), 1.0) == 0


def test_linear_fourier_rect():
    p = cf.RectPulse(1.5, 0.0, 1.0)
    sig = p.sample(1e-3)
    lam = np.linspace(-10, 10, 41)
    np.testing.assert_allclose(cf.linear_fourier(sig, lam), cf.rect_linear_limit(p, lam), atol=1e-12)


def test_linear_fourier_time_shift():
    sig = Signal.from_function(lambda t: np.exp(-t ** 2), -5, 0.01, 1001)
    shifted = Signal(sig.samples, sig.t_start + 0.7, sig.dt)
    lam = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(cf.linear_fourier(shifted, lam),
                               cf.linear_fourier(sig, lam) * np.exp(-2j * lam * 0.7), atol=1e-13)


def test_sampling_modes():
    p = cf.RectPulse(2.0, 0.0, 1.0)
    cells = p.sample(0.1, 0.5)
    assert cells.window == pytest.approx((-0.5, 1.5))
    assert cells.l1_norm() == pytest.approx(2.0)
    edges = p.sample(0.1, 0.0, align="edges")
    assert edges.samples[0] == 1.0 and edges.samples[-1] == 1.0
    assert edges.l1_norm() == pytest.approx(2.0)
    with pytest.raises(InvalidArgumentError):
        p.sample(0.3)
    with pytest.raises(InvalidArgumentError):
        cf.RectPulse(1.0, 1.0, 0.0)
