import numpy as np
import pytest

from nftkit import closed_form as cf
from nftkit import props, zs
from nftkit.errors import InvalidArgumentError
from nftkit.types import DiscreteEigenvalue, NftSpectrum, ScatteringCoeffs, Signal


def _soliton(xi=0.3, eta=0.5, dt=0.005, half=20.0):
    n = int(round(2 * half / dt))
    return Signal.from_function(lambda t: 2 * eta / np.cosh(2 * eta * t) * np.exp(-2j * xi * t),
                                -half, dt, n)


def test_trace_constants_of_moving_soliton():
    tc = props.trace_constants_time(_soliton(), "spectral")
    assert tc.c1 == pytest.approx(2.0, abs=1e-8)
    assert tc.c2 == pytest.approx(0.6, abs=1e-8)
    assert tc.c3 == pytest.approx(0.04 / 3, abs=1e-8)


def test_spectral_trace_power_variant_matches_time_domain():
    spec = NftSpectrum(np.zeros(0), np.zeros(0, complex), (DiscreteEigenvalue(0.3 + 0.5j, 1.0),))
    tc = props.trace_constants_spectral(spec)
    assert (tc.c1, tc.c2.real, tc.c3) == pytest.approx((2.0, 0.6, 0.04 / 3))
    printed = props.trace_constants_spectral(spec, "printed")
    assert printed.c1 == tc.c1
    assert abs(printed.c2 - tc.c2) > 0.1


def test_central_and_spectral_derivatives_agree():
    sig = _soliton()
    a = props.trace_constants_time(sig, "central")
    b = props.trace_constants_time(sig, "spectral")
    assert abs(a.c3 - b.c3) < 1e-4


def test_unknown_options_rejected():
    with pytest.raises(InvalidArgumentError):
        props.trace_constants_time(_soliton(), "forward")
    with pytest.raises(InvalidArgumentError):
        props.trace_constants_spectral(NftSpectrum.empty(), "other")
    with pytest.raises(InvalidArgumentError):
        props.transform_spectrum(NftSpectrum.empty(), "rotate", 1.0)


def test_parseval_weak_bump():
    sig = Signal.from_function(lambda t: 0.5 * np.exp(-t ** 2), -8, 0.01, 1601)
    spec = zs.continuous_spectrum(sig, np.linspace(-20, 20, 4001))
    # residual is the O(dt^2) cell discretization of the forward transform
    assert props.parseval_check(sig, spec) < 2e-5


def test_parseval_discrete_only():
    disc = (DiscreteEigenvalue(0.5j, 1.0), DiscreteEigenvalue(0.2 + 0.25j, 1.0))
    assert props.discrete_energy(NftSpectrum((), (), disc)) == pytest.approx(3.0)


def test_tail_correction_helps_for_rect():
    p = cf.RectPulse(0.5, 0.0, 1.0)
    g = np.linspace(-20, 20, 8001)
    spec = NftSpectrum(g, cf.rect_continuous(p, g))
    plain = abs(props.continuous_energy(spec) - p.energy)
    corrected = abs(props.continuous_energy(spec, tail_correction=True) - p.energy)
    assert corrected < 0.1 * plain


def test_energy_split_of_empty_spectrum():
    assert props.energy_split(NftSpectrum.empty()) == (0.0, 0.0)


def test_compose_real_lambda():
    p1 = cf.RectPulse(1.2, 0.0, 0.4)
    p2 = cf.RectPulse(1.2, 0.4, 1.0)
    whole = cf.RectPulse(1.2, 0.0, 1.0)
    lam = 0.7
    s = props.compose_scattering(cf.rect_scattering(p1, lam), cf.rect_scattering(p2, lam))
    ref = cf.rect_scattering(whole, lam)
    assert abs(s.a - ref.a) < 1e-13 and abs(s.b - ref.b) < 1e-13


def test_compose_complex_lambda_needs_conjugate_point():
    p1 = cf.RectPulse(2.0 - 0.5j, -1.0, 0.0)
    p2 = cf.RectPulse(0.7, 0.0, 0.5)
    lam = 0.3 + 0.4j
    s1, s2 = cf.rect_scattering(p1, lam), cf.rect_scattering(p2, lam)
    with pytest.raises(InvalidArgumentError):
        props.compose_scattering(s1, s2)
    s = props.compose_scattering(s1, s2, s2_conj=cf.rect_scattering(p2, np.conj(lam)))
    sig = Signal(np.concatenate([np.full(1000, 2.0 - 0.5j), np.full(500, 0.7)]), -1.0 + 5e-4, 1e-3)
    ref = zs.scatter(sig, lam)
    assert abs(s.a - ref.a) < 1e-10 and abs(s.b - ref.b) < 1e-10


def test_compose_rejects_mismatched_lambda():
    with pytest.raises(InvalidArgumentError):
        props.compose_scattering(ScatteringCoeffs(0.1, 1, 0), ScatteringCoeffs(0.2, 1, 0))


@pytest.fixture(scope="module")
def bump():
    sig = Signal.from_function(lambda t: 1.4 * np.exp(-t ** 2) * (1 + 0.3j * t), -10, 5e-3, 4001)
    grid = np.linspace(-6, 6, 25)
    return sig, zs.compute_spectrum(sig, grid)


def _max_err(pred, got):
    e = np.max(np.abs(pred.q_hat - got.q_hat)) if pred.grid.size else 0.0
    for a, b in zip(sorted(pred.discrete, key=lambda d: d.lam.imag),
                    sorted(got.discrete, key=lambda d: d.lam.imag)):
        e = max(e, abs(a.lam - b.lam), abs(a.q_tilde - b.q_tilde))
    return e


def test_phase_rotation(bump):
    sig, spec = bump
    got = zs.compute_spectrum(sig.with_samples(sig.samples * np.exp(0.9j)), spec.grid)
    assert _max_err(props.transform_spectrum(spec, "phase", 0.9), got) < 1e-8


def test_time_shift(bump):
    sig, spec = bump
    moved = Signal(sig.samples, sig.t_start + 1.5, sig.dt)
    got = zs.compute_spectrum(moved, spec.grid)
    assert _max_err(props.transform_spectrum(spec, "time_shift", 1.5), got) < 1e-6


def test_frequency_shift(bump):
    sig, spec = bump
    w = 0.4
    pred = props.transform_spectrum(spec, "freq_shift", w)
    got = zs.compute_spectrum(sig.with_samples(sig.samples * np.exp(-2j * w * sig.t)), pred.grid)
    # the chirp is only piecewise constant across cells, hence O(dt^2)
    assert _max_err(pred, got) < 1e-5


def test_dilation(bump):
    sig, spec = bump
    a = 2.0
    pred = props.transform_spectrum(spec, "dilation", a)
    # q(t/a) on the stretched grid uses the same samples
    slow = Signal(sig.samples, a * sig.t_start, a * sig.dt)
    big = zs.compute_spectrum(sig.with_samples(sig.samples * a), spec.grid)
    small = zs.compute_spectrum(slow, pred.grid)
    assert _max_err(props.transform_spectrum(big, "dilation", a), small) < 1e-6


def test_dilation_rejects_nonpositive():
    with pytest.raises(InvalidArgumentError):
        props.transform_spectrum(NftSpectrum.empty(), "dilation", 0.0)


def test_single_lobe():
    t = np.linspace(-3, 3, 61)
    assert props.is_single_lobe(Signal(np.exp(-t ** 2) + 0j, -3, 0.1))
    assert not props.is_single_lobe(Signal(np.exp(-(t - 1) ** 2) + np.exp(-(t + 1) ** 2) + 0j, -3, 0.1))
    assert not props.is_single_lobe(Signal(1j * np.exp(-t ** 2), -3, 0.1))


@pytest.mark.parametrize("A,count", [(1.0, 0), (2.0, 1), (6.0, 2)])
def test_count_bound_for_rect(A, count):
    cert, pred = props.eigenvalue_count_bound(cf.RectPulse(A, 0.0, 1.0).sample(1e-3))
    assert pred == count
    assert cert == (A < np.pi / 2)
