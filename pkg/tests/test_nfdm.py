import numpy as np
import pytest

from nftkit import nfdm
from nftkit.errors import InvalidArgumentError


@pytest.fixture(scope="module")
def cfg():
    # a zero symbol keys the carrier off
    return nfdm.ModemConfig(discrete_constellation=nfdm.QPSK + (0j,), n_samples=512, ssf_steps=200)


@pytest.fixture(scope="module")
def cfg_b2b():
    return nfdm.ModemConfig(n_samples=512, z_span=0.0)


def test_raised_cosine():
    x = np.array([-2.0, -1.0, -0.5, 0.0, 0.5, 1.0])
    np.testing.assert_allclose(nfdm.raised_cosine(x, 1.0), [0, 0, 0.5, 1, 0.5, 0], atol=1e-15)


def test_encode_on_off_keying(cfg):
    spec = nfdm.encode(nfdm.SymbolFrame((0j, nfdm.QPSK[1])), cfg)
    assert len(spec.discrete) == 1
    assert spec.discrete[0].lam == 1.0j
    assert spec.discrete[0].q_tilde == nfdm.QPSK[1]


def test_frame_shape_checked(cfg):
    with pytest.raises(InvalidArgumentError):
        nfdm.encode(nfdm.SymbolFrame((nfdm.QPSK[0],)), cfg)


def test_transmit_energy_matches_eigenvalues(cfg):
    sig = nfdm.transmit(nfdm.SymbolFrame((nfdm.QPSK[0], nfdm.QPSK[2])), cfg)
    assert sig.energy() == pytest.approx(4 * 1.5, rel=1e-3)
    assert len(sig) == cfg.n_samples


def test_back_to_back_recovers_symbols(cfg_b2b):
    frame = nfdm.SymbolFrame((nfdm.QPSK[3], nfdm.QPSK[1]))
    got, metrics = nfdm.receive(nfdm.transmit(frame, cfg_b2b), cfg_b2b)
    assert got == frame
    # dt = 24/512 limits the forward transform to O(dt^2)
    assert max(metrics.eigenvalue_error) < 5e-3
    assert max(metrics.discrete_distance) < 1e-2


def test_noise_free_propagation_recovers_symbols(cfg):
    frame = nfdm.SymbolFrame((nfdm.QPSK[2], 0j))
    rx = nfdm.propagate_frame(nfdm.transmit(frame, cfg), cfg)
    got, _ = nfdm.receive(rx, cfg)
    assert got == frame


def test_count_errors():
    sent = nfdm.SymbolFrame((1j, 1.0))
    errs, er = nfdm.count_errors(sent, nfdm.SymbolFrame((1j, None)))
    assert errs == [0, 1] and er == 1


def test_ber_harness_is_deterministic(cfg):
    noisy = nfdm.ModemConfig(n_samples=512, ssf_steps=100, noise_var=1e-3)
    a = nfdm.ber_harness(noisy, 3, seed=7)
    b = nfdm.ber_harness(noisy, 3, seed=7)
    assert a == b
    assert a.n_symbols == 6


def test_confinement_guard():
    with pytest.raises(InvalidArgumentError):
        nfdm.ModemConfig(discrete_carriers=(0.05j,), frame_duration=8.0)
    assert nfdm.confinement_loss(nfdm.ModemConfig()) < 0.01


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        nfdm.ModemConfig(discrete_carriers=(0.5,))
    with pytest.raises(InvalidArgumentError):
        nfdm.ModemConfig(discrete_carriers=(0.5j, 0.5j))
    with pytest.raises(InvalidArgumentError):
        nfdm.ModemConfig(noise_var=-1.0)


def test_continuous_carriers_back_to_back():
    c = nfdm.ModemConfig(discrete_carriers=(), continuous_carriers=(-1.5, 0.0, 1.5),
                         n_samples=128, frame_duration=16.0, z_span=0.0)
    frame = nfdm.SymbolFrame((), tuple(c.continuous_constellation[:3]))
    got, metrics = nfdm.receive(nfdm.transmit(frame, c), c)
    assert got == frame
    assert max(metrics.continuous_distance) < 0.02


def test_frame_longer_than_alias_period_is_rejected():
    # lambda spacing 40/511 makes the synthesis repeat every ~40 time units
    with pytest.raises(InvalidArgumentError):
        nfdm.ModemConfig(discrete_carriers=(), continuous_carriers=(0.0,), frame_duration=48.0)
