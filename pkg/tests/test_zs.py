import numpy as np
import pytest

from nftkit import closed_form as cf
from nftkit import zs
from nftkit.errors import (
    DegenerateSpectrumError,
    DomainError,
    InvalidArgumentError,
    RiccatiSingularityError,
)
from nftkit.types import Signal


@pytest.fixture(scope="module")
def rect2():
    return cf.RectPulse(2.0, 0.0, 1.0).sample(1e-3, 0.2)


def test_step_zero_potential_is_pure_phase():
    m = zs.transfer_matrix_step(0.0, 1.0, 1.0).as_array()
    np.testing.assert_allclose(m, np.diag([np.exp(-1j), np.exp(1j)]), atol=1e-15)


def test_step_constant_potential_at_zero_lambda():
    m = zs.transfer_matrix_step(2.0, 1.0, 0.0).as_array()
    expected = [[np.cos(2), np.sin(2)], [-np.sin(2), np.cos(2)]]
    np.testing.assert_allclose(m, expected, atol=1e-15)


def test_step_matches_matrix_exponential():
    from scipy.linalg import expm
    q, dt, lam = 0.7 - 1.1j, 0.3, 0.4 + 0.2j
    P = np.array([[-1j * lam, q], [-np.conj(q), 1j * lam]])
    np.testing.assert_allclose(zs.transfer_matrix_step(q, dt, lam).as_array(), expm(P * dt), atol=1e-14)


def test_step_rejects_non_finite():
    with pytest.raises(InvalidArgumentError):
        zs.transfer_matrix_step(np.nan, 1.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        zs.transfer_matrix_step(1.0, 1.0, np.inf)


def test_step_at_delta_zero():
    # lam = j|q| makes delta vanish; the series branch must give exp(P dt)
    m = zs.transfer_matrix_step(1.0, 0.5, 1j)
    from scipy.linalg import expm
    P = np.array([[1.0, 1.0], [-1.0, -1.0]])
    np.testing.assert_allclose(m.as_array(), expm(P * 0.5), atol=1e-14)
    assert abs(m.det() - 1) < 1e-12


def test_zero_signal_scatters_trivially():
    s = zs.scatter(Signal.zeros(50, -2.0, 0.1), 0.3 + 0.2j)
    assert abs(s.a - 1) < 1e-14 and abs(s.b) < 1e-14


def test_rect_at_zero_lambda(rect2):
    s = zs.scatter(rect2, 0.0)
    assert abs(s.a - np.cos(2)) < 1e-10
    assert abs(s.b + np.sin(2)) < 1e-10


def test_rect_large_lambda(rect2):
    s = zs.scatter(rect2, 50.0)
    assert abs(s.a - 1) <= 5e-2


def test_scatter_rejects_lower_half_plane(rect2):
    with pytest.raises(InvalidArgumentError):
        zs.scatter(rect2, 1.0 - 0.1j)


def test_continuous_spectrum_matches_closed_form(rect2):
    p = cf.RectPulse(2.0, 0.0, 1.0)
    spec = zs.continuous_spectrum(rect2, [1.0])
    assert abs(spec.q_hat[0] - cf.rect_continuous(p, 1.0)) < 1e-6
    assert spec.discrete == ()


def test_continuous_spectrum_of_zero_signal():
    spec = zs.continuous_spectrum(Signal.zeros(10), np.linspace(-3, 3, 7))
    assert np.all(spec.q_hat == 0)


def test_weak_rect_is_ordinary_fourier_transform():
    p = cf.RectPulse(0.01, 0.0, 1.0)
    sig = p.sample(1e-3)
    lam = np.linspace(-10, 10, 201)
    q_hat = zs.continuous_spectrum(sig, lam).q_hat
    assert np.max(np.abs(q_hat - cf.rect_linear_limit(p, lam))) <= 1e-3 * sig.l1_norm()


def test_continuous_spectrum_rejects_unsorted_grid(rect2):
    with pytest.raises(InvalidArgumentError):
        zs.continuous_spectrum(rect2, [1.0, 0.0])


def test_sech_real_axis_zero():
    # A sech(t) with A = 1.5 has a(0) = cos(1.5 pi) = 0
    sig = Signal.from_function(lambda t: 1.5 / np.cosh(t), -20, 0.01, 4001)
    a, _ = zs.scattering_arrays(sig, np.array([0.0]))
    assert abs(a[0]) < 1e-4


def test_real_axis_zero_is_degenerate():
    sig = cf.RectPulse(np.pi / 2, 0.0, 1.0).sample(1e-3)
    with pytest.raises(DegenerateSpectrumError):
        zs.continuous_spectrum(sig, [-1.0, 0.0, 1.0])


def test_riccati_agrees_with_transfer_matrix():
    sig = cf.RectPulse(0.5, 0.0, 1.0).sample(1e-3)
    ref = zs.scatter(sig, 0.7)
    assert abs(zs.scatter_riccati(sig, 0.7) - ref.b / ref.a) < 1e-4


def test_riccati_zero_signal():
    assert zs.scatter_riccati(Signal.zeros(20), 1.3) == 0


def test_riccati_passes_through_pole_on_strong_rect(rect2):
    # for A=2 at lam=0 the first component vanishes at t = pi/4 inside the pulse
    with pytest.raises(RiccatiSingularityError):
        zs.scatter_riccati(rect2, 0.0)


def test_second_order_ode_rect():
    sig = cf.RectPulse(2.0, 0.0, 1.0).sample(1e-3)
    assert abs(zs.a_via_second_order(sig, 0.0) - np.cos(2)) < 1e-6


def test_second_order_ode_smooth_bump():
    sig = Signal.from_function(lambda t: 0.9 * np.exp(-t ** 2), -4, 2e-3, 4001)
    assert abs(zs.a_via_second_order(sig, 0.3) - zs.scatter(sig, 0.3).a) < 1e-4


def test_second_order_ode_rejects_zero_sample():
    sig = Signal.from_function(lambda t: t, -1, 0.1, 21)
    with pytest.raises(DomainError):
        zs.a_via_second_order(sig, 0.3)


def test_a_derivative_of_zero_signal():
    assert abs(zs.a_derivative(Signal.zeros(10), 0.4)) < 1e-9


def test_a_derivative_at_rect_eigenvalue(rect2):
    p = cf.RectPulse(2.0, 0.0, 1.0)
    lam1 = cf.rect_eigenvalues(2.0, 1.0)[0]
    assert abs(zs.a_derivative(rect2, lam1) - cf.rect_a_derivative(p, lam1)) < 1e-4


def test_a_derivative_step_refinement(rect2):
    lam = 0.3 + 0.5j
    h = 1e-6 * (1 + abs(lam))
    d1 = zs.a_derivative(rect2, lam, h)
    d2 = zs.a_derivative(rect2, lam, h / 2)
    assert abs(d1 - d2) / abs(d1) < 1e-6


def test_a_derivative_rejects_bad_step(rect2):
    with pytest.raises(InvalidArgumentError):
        zs.a_derivative(rect2, 0.1, -1.0)


@pytest.mark.parametrize("A,count", [(1.0, 0), (2.0, 1), (6.0, 2)])
def test_rect_eigenvalue_counts(A, count):
    sig = cf.RectPulse(A, 0.0, 1.0).sample(2e-3, 0.1)
    found = zs.find_discrete_eigenvalues(sig)
    assert len(found) == count
    assert all(abs(d.lam.real) < 1e-6 for d in found)
    for d in found:
        assert d.q_tilde == pytest.approx(d.b / d.a_prime)


def test_sech_has_eigenvalue_near_half_j():
    sig = Signal.from_function(lambda t: 1 / np.cosh(t), -20, 0.01, 4001)
    spec = zs.compute_spectrum(sig, np.linspace(-5, 5, 11))
    assert len(spec.discrete) == 1
    assert abs(spec.discrete[0].lam - 0.5j) < 1e-4


def test_compute_spectrum_zero_signal():
    spec = zs.compute_spectrum(Signal.zeros(16), np.linspace(-1, 1, 5))
    assert spec.discrete == () and np.all(spec.q_hat == 0)


def test_search_box_validation():
    with pytest.raises(InvalidArgumentError):
        zs.SearchBox(0, 1, -0.1, 1)
    with pytest.raises(InvalidArgumentError):
        zs.SearchBox(1, 0, 0.1, 1)


def test_default_box_bounds_eigenvalues(rect2):
    box = zs.default_box(rect2)
    assert box.im_max >= 2.0 and box.re_min < 0 < box.re_max


def test_count_estimate():
    sig = Signal.from_function(lambda t: 3 * np.exp(-t ** 2), -6, 1e-3, 12001)
    assert zs.eigenvalue_count_estimate(sig) == 2
    assert len(zs.find_discrete_eigenvalues(sig)) == 2


def test_unimodularity_on_random_signal():
    rng = np.random.default_rng(3)
    sig = Signal(rng.normal(size=300) + 1j * rng.normal(size=300), -1.5, 0.01)
    a, b = zs.scattering_arrays(sig, np.linspace(-20, 20, 101))
    assert np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1)) < 1e-8
