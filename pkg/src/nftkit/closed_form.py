"""Exact scattering data for rectangular pulses and the weak-signal limit."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, DegenerateSpectrumError, InvalidArgumentError
from .types import ScatteringCoeffs, Signal


@dataclass(frozen=True)
class RectPulse:
    """q(t) = A on [t1, t2], zero elsewhere."""

    amplitude: complex
    t1: float = 0.0
    t2: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.amplitude) and np.isfinite(self.t1) and np.isfinite(self.t2)):
            raise InvalidArgumentError("rect pulse parameters must be finite")
        if not self.t2 > self.t1:
            raise InvalidArgumentError("need t2 > t1")

    @property
    def duration(self) -> float:
        return self.t2 - self.t1

    @property
    def t_sum(self) -> float:
        return self.t2 + self.t1

    @property
    def energy(self) -> float:
        return abs(self.amplitude) ** 2 * self.duration

    def sample(self, dt: float, pad: float = 0.0, align: str = "cells") -> Signal:
        """Sample the pulse with spacing ``dt`` and ``pad`` of zeros on each side.

        ``align="cells"`` places the pulse edges on cell boundaries, so the
        piecewise-constant model is exact. ``align="edges"`` puts samples on
        the edges themselves with the half value A/2, the usual trapezoid-style
        sampling of a discontinuity.
        """
        if not dt > 0:
            raise InvalidArgumentError("dt must be > 0")
        n_on = int(round(self.duration / dt))
        if abs(n_on * dt - self.duration) > 1e-9 * self.duration:
            raise InvalidArgumentError("pulse duration must be a multiple of dt")
        n_pad = int(round(pad / dt))
        amp = complex(self.amplitude)
        if align == "cells":
            q = np.zeros(2 * n_pad + n_on, complex)
            q[n_pad:n_pad + n_on] = amp
            return Signal(q, self.t1 - n_pad * dt + 0.5 * dt, dt)
        if align == "edges":
            q = np.zeros(2 * n_pad + n_on + 1, complex)
            q[n_pad:n_pad + n_on + 1] = amp
            q[n_pad] = q[n_pad + n_on] = amp / 2
            return Signal(q, self.t1 - n_pad * dt, dt)
        raise InvalidArgumentError(f"unknown alignment {align!r}")


def _delta_terms(amplitude, lam, duration):
    lam = np.asarray(lam, dtype=complex)
    delta = np.sqrt(lam * lam + abs(amplitude) ** 2)
    c = np.cos(delta * duration)
    s = duration * np.sinc(delta * duration / np.pi)  # sin(delta T)/delta
    return delta, c, s


def rect_ab(p: RectPulse, lam):
    """Vectorized (a, b) for a rectangular pulse."""
    lam = np.asarray(lam, dtype=complex)
    _, c, s = _delta_terms(p.amplitude, lam, p.duration)
    a = (c - 1j * lam * s) * np.exp(1j * lam * p.duration)
    b = -np.conj(p.amplitude) * s * np.exp(-1j * lam * p.t_sum)
    return a, b


def rect_scattering(p: RectPulse, lam: complex) -> ScatteringCoeffs:
    a, b = rect_ab(p, lam)
    return ScatteringCoeffs(complex(lam), complex(a), complex(b))


def rect_a_derivative(p: RectPulse, lam):
    """Analytic da/dlam."""
    lam = np.asarray(lam, dtype=complex)
    T = p.duration
    delta, c, s = _delta_terms(p.amplitude, lam, T)
    d2 = delta * delta
    small = np.abs(delta * T) < 1e-4
    # (T cos(delta T) - sin(delta T)/delta)/delta^2, series value -T^3/3 near 0
    safe = np.where(small, 1.0, d2)
    ratio = np.where(small, -T ** 3 / 3, (T * c - s) / safe)
    g = c - 1j * lam * s
    dg = -T * lam * s - 1j * s - 1j * lam * lam * ratio
    return (dg + 1j * T * g) * np.exp(1j * lam * T)


def rect_continuous(p: RectPulse, lam):
    """q_hat(lam) = A* e^{-2j lam t2} / (j lam - delta cot(delta T)).

    Evaluated in the equivalent form A* s e^{-2j lam t2} / (j lam s - cos),
    with s = sin(delta T)/delta, which is free of 0/0 at lam -> 0 and at the
    zeros of sin(delta T).
    """
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    _, c, s = _delta_terms(p.amplitude, lam, p.duration)
    den = 1j * lam * s - c
    if np.any(np.abs(den) < 1e-12):
        raise DegenerateSpectrumError("a(lambda) = 0 on the real axis")
    out = np.conj(p.amplitude) * s * np.exp(-2j * lam * p.t2) / den
    return complex(out[0]) if scalar else out


def rect_eigenvalue_count(amplitude: float, duration: float) -> int:
    return int(math.floor(0.5 + abs(amplitude) * duration / math.pi - 1e-12))


def _imag_axis_reduction(amplitude, duration, sigma):
    # a(j sigma) = f(sigma) e^{-sigma T} with f real for real A and 0 < sigma < A
    d = np.sqrt(amplitude ** 2 - sigma ** 2)
    return np.cos(d * duration) + sigma * duration * np.sinc(d * duration / np.pi)


def rect_eigenvalues(amplitude: float, duration: float, n_scan: int = 4000) -> list[complex]:
    """Purely imaginary zeros j*sigma of a(lambda), ascending in sigma."""
    amplitude = float(abs(amplitude))
    if not (amplitude > 0 and duration > 0):
        raise InvalidArgumentError("amplitude and duration must be > 0")
    sig = np.linspace(0.0, amplitude, n_scan + 1)[1:-1]
    f = _imag_axis_reduction(amplitude, duration, sig)
    roots = []
    for i in np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) < 0):
        r = brentq(lambda x: _imag_axis_reduction(amplitude, duration, x), sig[i], sig[i + 1],
                   xtol=1e-15, rtol=4 * np.finfo(float).eps)
        roots.append(1j * r)
    expected = rect_eigenvalue_count(amplitude, duration)
    if len(roots) != expected:
        raise ConsistencyError(f"found {len(roots)} rect eigenvalues, count law predicts {expected}")
    return roots


def linear_fourier(signal: Signal, lam):
    """Q(lam) = -int conj(q) e^{-2j lam t} dt over the sample cells.

    Each cell is integrated exactly for a piecewise-constant signal, which
    coincides with the trapezoid rule for signals that vanish at the window
    edges, up to the O((lam dt)^2) cell factor.
    """
    scalar = np.ndim(lam) == 0
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    dt = signal.dt
    cell = dt * np.sinc(lam * dt / np.pi)
    kern = np.exp(-2j * lam[:, None] * signal.t[None, :])
    out = -cell * (kern @ np.conj(signal.samples))
    return complex(out[0]) if scalar else out


def rect_linear_limit(p: RectPulse, lam):
    """Ordinary Fourier transform -A* T e^{-j lam T'} sinc(2 T f), lam = 2 pi f."""
    lam = np.asarray(lam, dtype=float)
    T = p.duration
    return -np.conj(p.amplitude) * T * np.exp(-1j * lam * p.t_sum) * np.sinc(lam * T / np.pi)
