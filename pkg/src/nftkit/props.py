"""Conserved quantities, layer peeling and metamorphic spectral relations."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError
from .types import NftSpectrum, ScatteringCoeffs, Signal


@dataclass(frozen=True)
class TraceConstants:
    """Energy c1, momentum c2 and Hamiltonian c3 with the normalization

    c1 = int |q|^2,  c2 = (j/2) int conj(q) q_t,  c3 = (1/4) int (|q_t|^2 - |q|^4),

    chosen so that each equals the n-th spectral trace sum (see
    :func:`trace_constants_spectral`).
    """

    c1: float
    c2: complex
    c3: float


def _tail_constant(grid, dens, frac=0.2):
    # dens ~ C/lam^2 on each side: estimate C from the outer part of the grid
    lam_max = min(-grid[0], grid[-1])
    if lam_max <= 0:
        return 0.0, 0.0
    outer = np.abs(grid) >= (1 - frac) * lam_max
    left = outer & (grid < 0)
    right = outer & (grid > 0)
    cl = float(np.mean(grid[left] ** 2 * dens[left])) if left.any() else 0.0
    cr = float(np.mean(grid[right] ** 2 * dens[right])) if right.any() else 0.0
    return cl / -grid[0], cr / grid[-1]


def continuous_energy(spectrum: NftSpectrum, tail_correction: bool = False) -> float:
    """(1/pi) int log(1 + |q_hat|^2) by the trapezoid rule on the spectrum grid.

    With ``tail_correction`` the integral beyond the grid is estimated
    assuming the density decays like 1/lam^2, as it does for pulses with
    jump discontinuities.
    """
    g = spectrum.grid
    if g.size < 2:
        return 0.0
    dens = np.log1p(np.abs(spectrum.q_hat) ** 2)
    total = np.trapezoid(dens, g)
    if tail_correction:
        total += sum(_tail_constant(g, dens))
    return float(total / math.pi)


def discrete_energy(spectrum: NftSpectrum) -> float:
    return float(4 * np.sum(spectrum.eigenvalues.imag))


def energy_split(spectrum: NftSpectrum, tail_correction: bool = False) -> tuple[float, float]:
    """(E_hat, E_tilde): energy carried by the continuous and discrete parts."""
    return continuous_energy(spectrum, tail_correction), discrete_energy(spectrum)


def _derivative(signal: Signal, method: str) -> np.ndarray:
    q = signal.samples
    if method == "central":
        return np.gradient(q, signal.dt)
    if method == "spectral":
        omega = 2 * np.pi * np.fft.fftfreq(q.size, signal.dt)
        return np.fft.ifft(1j * omega * np.fft.fft(q))
    raise InvalidArgumentError(f"unknown derivative method {method!r}")


def trace_constants_time(signal: Signal, derivative: str = "central") -> TraceConstants:
    """Time-domain c1, c2, c3. ``derivative="spectral"`` differentiates via
    the FFT, which suits periodic-window data from the split-step solver."""
    q = signal.samples
    qt = _derivative(signal, derivative)
    dt = signal.dt
    p2 = np.abs(q) ** 2
    c1 = float(np.trapezoid(p2, dx=dt))
    c2 = complex(0.5j * np.trapezoid(np.conj(q) * qt, dx=dt))
    c3 = float(0.25 * np.trapezoid(np.abs(qt) ** 2 - p2 ** 2, dx=dt))
    return TraceConstants(c1, c2, c3)


def trace_constants_spectral(spectrum: NftSpectrum, variant: str = "power",
                             tail_correction: bool = False) -> TraceConstants:
    """c_n = (4/n) sum Im(lam_j^n) + (1/pi) int lam^{n-1} log(1+|q_hat|^2).

    ``variant="printed"`` uses Im(lam_j) in place of Im(lam_j^n); the two
    agree for n = 1. Only the ``"power"`` form reproduces the time-domain
    constants for n >= 2.
    """
    if variant not in ("power", "printed"):
        raise InvalidArgumentError("variant must be 'power' or 'printed'")
    lam = spectrum.eigenvalues
    g = spectrum.grid
    dens = np.log1p(np.abs(spectrum.q_hat) ** 2) if g.size > 1 else np.zeros(g.size)

    def cont(k):
        if g.size < 2:
            return 0.0
        return float(np.trapezoid(g ** k * dens, g) / math.pi)

    def disc(n):
        vals = lam ** n if variant == "power" else lam
        return float(4.0 / n * np.sum(vals.imag))

    c1 = continuous_energy(spectrum, tail_correction) + disc(1)
    return TraceConstants(c1, complex(disc(2) + cont(1)), disc(3) + cont(2))


def parseval_check(signal: Signal, spectrum: NftSpectrum, tail_correction: bool = False) -> float:
    """Relative mismatch |c1 - E_hat - E_tilde| / c1."""
    c1 = signal.energy()
    e_hat, e_tilde = energy_split(spectrum, tail_correction)
    return abs(c1 - e_hat - e_tilde) / max(c1, 1e-12)


def compose_scattering(s1: ScatteringCoeffs, s2: ScatteringCoeffs,
                       s1_conj: Optional[ScatteringCoeffs] = None,
                       s2_conj: Optional[ScatteringCoeffs] = None) -> ScatteringCoeffs:
    """Scattering data of the concatenation: s1 from the earlier segment.

    a = a1 a2 - b1 conj(b2(conj lam)),  b = a1 b2 + b1 conj(a2(conj lam)).
    For complex lambda the coefficients of the second segment at conj(lam)
    must be supplied as ``s2_conj``; on the real axis they default to s2.
    """
    if s1.lam != s2.lam:
        raise InvalidArgumentError("cannot compose coefficients at different lambda")
    if s2_conj is None:
        if complex(s2.lam).imag != 0:
            raise InvalidArgumentError("complex lambda needs s2 evaluated at conj(lambda)")
        s2_conj = s2
    elif s2_conj.lam != np.conj(s2.lam):
        raise InvalidArgumentError("s2_conj must be evaluated at conj(lambda)")
    a = s1.a * s2.a - s1.b * np.conj(s2_conj.b)
    b = s1.a * s2.b + s1.b * np.conj(s2_conj.a)
    return ScatteringCoeffs(s1.lam, complex(a), complex(b))


def _scale_discrete(spectrum: NftSpectrum, factor_fn):
    out = []
    for d in spectrum.discrete:
        f = factor_fn(d.lam)
        out.append(replace(d, q_tilde=d.q_tilde * f, b=None if d.b is None else d.b * f))
    return tuple(out)


def transform_spectrum(spectrum: NftSpectrum, kind: str, value: float) -> NftSpectrum:
    """Spectrum of a transformed signal computed from the spectrum alone.

    kind="phase" (q -> e^{j phi} q): q_hat and q_tilde pick up e^{-j phi}.
    kind="time_shift" (q(t) -> q(t - t0)): factor e^{-2j lam t0}.
    kind="freq_shift" (q -> q e^{-2j omega t}): grid and eigenvalues move by
    +omega, values unchanged.
    kind="dilation" (value a > 0): maps the spectrum of a*q(t) to that of
    q(t/a): grid and eigenvalues divide by a, q_tilde divides by a.
    """
    value = float(value)
    if not np.isfinite(value):
        raise InvalidArgumentError("transform parameter must be finite")
    g = spectrum.grid
    if kind == "phase":
        f = np.exp(-1j * value)
        return NftSpectrum(g, spectrum.q_hat * f, _scale_discrete(spectrum, lambda lam: f))
    if kind == "time_shift":
        return NftSpectrum(g, spectrum.q_hat * np.exp(-2j * g * value),
                           _scale_discrete(spectrum, lambda lam: np.exp(-2j * lam * value)))
    if kind == "freq_shift":
        disc = tuple(replace(d, lam=d.lam + value) for d in spectrum.discrete)
        return NftSpectrum(g + value, spectrum.q_hat, disc)
    if kind == "dilation":
        if not value > 0:
            raise InvalidArgumentError("dilation factor must be > 0")
        disc = tuple(replace(d, lam=d.lam / value, q_tilde=d.q_tilde / value,
                             a_prime=None if d.a_prime is None else d.a_prime * value)
                     for d in spectrum.discrete)
        return NftSpectrum(g / value, spectrum.q_hat, disc)
    raise InvalidArgumentError(f"unknown transform kind {kind!r}")


def is_single_lobe(signal: Signal, rel_tol: float = 1e-9) -> bool:
    """Real, nonnegative, nondecreasing then nonincreasing."""
    q = signal.samples
    scale = np.max(np.abs(q))
    if scale == 0:
        return True
    tol = rel_tol * scale
    if np.max(np.abs(q.imag)) > tol or np.min(q.real) < -tol:
        return False
    d = np.diff(q.real)
    peak = int(np.argmax(q.real))
    return bool(np.all(d[:peak] >= -tol) and np.all(d[peak:] <= tol))


def eigenvalue_count_bound(signal: Signal) -> tuple[bool, Optional[int]]:
    """(no-discrete-spectrum certificate, predicted count or None)."""
    l1 = signal.l1_norm()
    certificate = l1 < math.pi / 2
    if is_single_lobe(signal):
        return certificate, int(math.floor(0.5 + l1 / math.pi - 1e-12))
    return certificate, 0 if certificate else None
