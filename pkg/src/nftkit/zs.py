"""Forward nonlinear Fourier transform (Zakharov-Shabat scattering).

The potential is taken as piecewise constant over each sample cell, so the
propagator over one cell is the exact matrix exponential of
``P = [[-j lam, q], [-conj(q), j lam]]``. Products of many cells are
evaluated as a balanced binary tree, vectorized over lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    DomainError,
    InvalidArgumentError,
    MultiplicityError,
    RiccatiSingularityError,
    ScatteringOverflowError,
)
from .types import DiscreteEigenvalue, NftSpectrum, ScatteringCoeffs, Signal, TransferMatrix

# complex entries per chunk of the (lambda, sample) step-matrix array
_CHUNK = 1 << 18


def _step_entries(q, dt, lam):
    """Entries of exp(P dt), broadcast over ``q`` and ``lam``."""
    q = np.asarray(q, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    delta = np.sqrt(lam * lam + np.abs(q) ** 2)
    x = delta * dt
    # complex sin and cos from real trig and hyperbolic parts (cheaper than
    # the complex ufuncs, and free of cancellation at small |x|)
    u, v = x.real, x.imag
    su, cu = np.sin(u), np.cos(u)
    chv, shv = np.cosh(v), np.sinh(v)
    c = cu * chv - 1j * (su * shv)
    sin_x = su * chv + 1j * (cu * shv)
    small = np.abs(x) < 1e-4
    with np.errstate(invalid="ignore", divide="ignore"):
        # sin(delta dt)/delta, with its series near delta = 0
        s = np.where(small, dt * (1 - x * x / 6), sin_x / np.where(small, 1.0, x) * dt)
    return c - 1j * lam * s, q * s, -np.conj(q) * s, c + 1j * lam * s


def _signal_steps(q, dt, lam):
    """Step entries for every (lam, sample) pair, computing each distinct
    sample value only once."""
    uq, inv = np.unique(q, return_inverse=True)
    if uq.size > q.size // 2:
        return _step_entries(q[None, :], dt, lam[:, None])
    return [e[:, inv] for e in _step_entries(uq[None, :], dt, lam[:, None])]


def transfer_matrix_step(q_sample: complex, dt: float, lam: complex) -> TransferMatrix:
    """Exact propagator of the Zakharov-Shabat system over one constant cell."""
    vals = (q_sample, dt, lam)
    if not all(np.isfinite(v) for v in vals):
        raise InvalidArgumentError(f"non-finite input to transfer_matrix_step: {vals!r}")
    if not dt > 0:
        raise InvalidArgumentError("dt must be > 0")
    m11, m12, m21, m22 = _step_entries(q_sample, dt, lam)
    return TransferMatrix(complex(m11), complex(m12), complex(m21), complex(m22))


def _ordered_product(m11, m12, m21, m22):
    """Entries of ``E[N-1] @ ... @ E[0]`` along the last axis by pairwise
    reduction; explicit entry arithmetic beats matmul on 2x2 blocks."""
    while m11.shape[-1] > 1:
        n = m11.shape[-1]
        k = n - n % 2
        # later factor (odd index) times earlier factor (even index)
        a11, a12, a21, a22 = (m[..., 1:k:2] for m in (m11, m12, m21, m22))
        b11, b12, b21, b22 = (m[..., 0:k:2] for m in (m11, m12, m21, m22))
        p = (a11 * b11 + a12 * b21, a11 * b12 + a12 * b22,
             a21 * b11 + a22 * b21, a21 * b12 + a22 * b22)
        if n % 2:
            p = tuple(np.concatenate([x, m[..., -1:]], axis=-1)
                      for x, m in zip(p, (m11, m12, m21, m22)))
        m11, m12, m21, m22 = p
    return m11[..., 0], m12[..., 0], m21[..., 0], m22[..., 0]


def scatter_many(signal: Signal, lam) -> tuple[np.ndarray, np.ndarray]:
    """Scattering coefficients ``(a, b)`` for an array of spectral points.

    Non-finite results are returned as NaN/inf without raising; use
    :func:`scatter` or :func:`scattering_arrays` for checked evaluation.
    """
    lam = np.asarray(lam, dtype=complex)
    shape = lam.shape
    lam = lam.ravel()
    q = signal.samples
    n = q.size
    dt = signal.dt
    t_hi = signal.window[1]
    a = np.empty(lam.size, complex)
    b = np.empty(lam.size, complex)
    per_chunk = max(1, _CHUNK // n)
    with np.errstate(all="ignore"):
        for i in range(0, lam.size, per_chunk):
            lc = lam[i:i + per_chunk]
            # factor e^{j lam dt} keeps the zero-potential step diag(1, e^{2j lam dt})
            # bounded in the upper half plane
            phase = np.exp(1j * lc * dt)[:, None]
            ents = [e * phase for e in _signal_steps(q, dt, lc)]
            p11, _, p21, _ = _ordered_product(*ents)
            a[i:i + per_chunk] = p11
            b[i:i + per_chunk] = p21 * np.exp(-2j * lc * t_hi)
    return a.reshape(shape), b.reshape(shape)


def scattering_arrays(signal: Signal, lam) -> tuple[np.ndarray, np.ndarray]:
    a, b = scatter_many(signal, lam)
    bad = ~(np.isfinite(a) & np.isfinite(b))
    if np.any(bad):
        raise ScatteringOverflowError(np.asarray(lam, complex).ravel()[np.flatnonzero(bad.ravel())[0]])
    return a, b


def scatter(signal: Signal, lam: complex) -> ScatteringCoeffs:
    """a(lam), b(lam) of the signal, with the boundary condition (1, 0)e^{-j lam t}
    imposed at the left edge of the window."""
    lam = complex(lam)
    if lam.imag < 0:
        raise InvalidArgumentError("scatter expects Im(lambda) >= 0")
    a, b = scattering_arrays(signal, np.array([lam]))
    return ScatteringCoeffs(lam, complex(a[0]), complex(b[0]))


def continuous_spectrum(signal: Signal, grid: Sequence[float]) -> NftSpectrum:
    grid = np.asarray(grid, dtype=float)
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise InvalidArgumentError("grid must be strictly ascending")
    a, b = scattering_arrays(signal, grid.astype(complex))
    small = np.abs(a) < 1e-12
    if np.any(small):
        raise DegenerateSpectrumError(
            f"a(lambda) vanishes on the real axis near lambda={grid[np.argmax(small)]:.6g}")
    return NftSpectrum(grid, b / a, ())


def scatter_riccati(signal: Signal, lam: float, blowup: float = 1e6) -> complex:
    """Continuous spectrum at one real point from the Riccati equation
    ``y' = -q e^{2j lam t} y^2 - conj(q) e^{-2j lam t}``, y(left edge) = 0.

    Classical RK4, one step per sample cell with the cell's constant q.
    """
    lam = float(lam)
    q = signal.samples
    h = signal.dt
    t = signal.window[0]

    def f(tt, y, qq):
        return -qq * np.exp(2j * lam * tt) * y * y - np.conj(qq) * np.exp(-2j * lam * tt)

    y = 0j
    for qq in q:
        k1 = f(t, y, qq)
        k2 = f(t + h / 2, y + h / 2 * k1, qq)
        k3 = f(t + h / 2, y + h / 2 * k2, qq)
        k4 = f(t + h, y + h * k3, qq)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += h
        if not abs(y) <= blowup:
            raise RiccatiSingularityError(
                f"Riccati solution exceeded {blowup:g} at t={t:.6g} (lambda={lam:g}); "
                "use scatter instead")
    return complex(y)


def a_via_second_order(signal: Signal, lam: complex) -> complex:
    """a(lam) from ``z'' - (2j lam + q_t/q) z' + |q|^2 z = 0``, z=1, z'=0 at the
    left edge. The signal must be nonzero on every sample."""
    q = signal.samples
    if np.any(np.abs(q) < 1e-12):
        raise DomainError("second-order ODE needs q != 0 on the whole support")
    lam = complex(lam)
    h = signal.dt
    log_deriv = np.gradient(q, h) / q
    y = np.array([1.0 + 0j, 0j])
    for qq, g in zip(q, log_deriv):
        c1 = 2j * lam + g
        c0 = abs(qq) ** 2

        def f(v):
            return np.array([v[1], c1 * v[1] - c0 * v[0]])

        k1 = f(y)
        k2 = f(y + h / 2 * k1)
        k3 = f(y + h / 2 * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return complex(y[0])


def _default_step(lam) -> float:
    return 1e-6 * (1.0 + abs(lam))


def a_derivative(signal: Signal, lam: complex, h: Optional[float] = None) -> complex:
    """da/dlam by a central difference along the real direction."""
    h = _default_step(lam) if h is None else float(h)
    if not h > 0:
        raise InvalidArgumentError("h must be > 0")
    lam = complex(lam)
    a, _ = scattering_arrays(signal, np.array([lam + h, lam - h]))
    return complex((a[0] - a[1]) / (2 * h))


@dataclass(frozen=True)
class SearchBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise InvalidArgumentError(f"degenerate search box {self!r}")
        if self.im_min <= 0:
            raise InvalidArgumentError("search box must lie in the upper half plane")

    def contains(self, lam, margin: float = 0.0) -> np.ndarray:
        lam = np.asarray(lam)
        wr = margin * (self.re_max - self.re_min)
        wi = margin * (self.im_max - self.im_min)
        return ((lam.real >= self.re_min - wr) & (lam.real <= self.re_max + wr)
                & (lam.imag >= self.im_min - wi) & (lam.imag <= self.im_max + wi))


@dataclass(frozen=True)
class EigenSearchOptions:
    n_re: int = 20
    n_im: int = 20
    newton_tol: float = 1e-11
    max_iter: int = 60
    accept_tol: float = 1e-9
    im_min: float = 1e-3
    dedupe_tol: float = 1e-6
    aprime_min: float = 1e-8
    extra_seeds: tuple = field(default_factory=tuple)


def default_box(signal: Signal, im_min: float = 1e-3) -> SearchBox:
    """Box guaranteed to hold every eigenvalue in imaginary extent
    (Im lam <= max|q|), centred in real part on the mean frequency."""
    q = signal.samples
    qmax = float(np.max(np.abs(q)))
    c1 = np.sum(np.abs(q) ** 2)
    center = 0.0
    if c1 > 0:
        qt = np.gradient(q, signal.dt)
        center = float(np.real(np.sum(q * np.conj(qt)) / 2j) / c1)
    half = max(2.0, qmax)
    return SearchBox(center - half, center + half, im_min, max(1.05 * qmax, 2 * im_min))


def _a_and_slope(signal: Signal, lam: np.ndarray):
    h = 1e-6 * (1.0 + np.abs(lam))
    pts = np.concatenate([lam, lam + h, lam - h])
    a, _ = scatter_many(signal, pts)
    n = lam.size
    return a[:n], (a[n:2 * n] - a[2 * n:]) / (2 * h)


def find_discrete_eigenvalues(signal: Signal, box: Optional[SearchBox] = None,
                              opts: Optional[EigenSearchOptions] = None) -> list[DiscreteEigenvalue]:
    """Zeros of a(lambda) in the upper half plane by multi-start Newton.

    Seeds that fail to converge, leave the (slightly enlarged) box, or drop
    below ``im_min`` are discarded silently, so a root whose basin misses
    every seed is not reported.
    """
    opts = opts or EigenSearchOptions()
    box = box or default_box(signal, opts.im_min)
    if np.max(np.abs(signal.samples)) == 0:
        return []
    re = box.re_min + (np.arange(opts.n_re) + 0.5) * (box.re_max - box.re_min) / opts.n_re
    im = box.im_min + (np.arange(opts.n_im) + 0.5) * (box.im_max - box.im_min) / opts.n_im
    seeds = (re[None, :] + 1j * im[:, None]).ravel()
    if opts.extra_seeds:
        seeds = np.concatenate([seeds, np.asarray(opts.extra_seeds, complex)])

    lam = seeds.copy()
    active = np.ones(lam.size, bool)
    done = np.zeros(lam.size, bool)
    with np.errstate(all="ignore"):
        for _ in range(opts.max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            a, ap = _a_and_slope(signal, lam[idx])
            step = a / ap
            ok = np.isfinite(step)
            new = lam[idx] - np.where(ok, step, 0)
            lam[idx] = new
            conv = ok & (np.abs(step) <= opts.newton_tol * (1 + np.abs(new)))
            gone = ~ok | ~box.contains(new, margin=0.5) | (new.imag <= 0)
            done[idx[conv & ~gone]] = True
            active[idx[conv | gone]] = False

    cand = []
    for lam_j in lam[done]:
        if all(abs(lam_j - c) > opts.dedupe_tol for c in cand):
            cand.append(lam_j)
    if not cand:
        return []
    cand = np.array(cand)
    a, ap = _a_and_slope(signal, cand)
    keep = (np.abs(a) <= opts.accept_tol) & (cand.imag >= opts.im_min)
    cand, ap = cand[keep], ap[keep]

    roots, slopes = [], []
    for lam_j, ap_j in sorted(zip(cand, ap), key=lambda p: (p[0].imag, p[0].real)):
        if all(abs(lam_j - r) > opts.dedupe_tol for r in roots):
            roots.append(lam_j)
            slopes.append(ap_j)
    out = []
    for lam_j, ap_j in zip(roots, slopes):
        if abs(ap_j) < opts.aprime_min:
            raise MultiplicityError(f"|a'(lambda)| = {abs(ap_j):.3g} at lambda={lam_j!r}: "
                                    "suspected multiple zero")
        _, b = scattering_arrays(signal, np.array([lam_j]))
        b_j = complex(b[0])
        out.append(DiscreteEigenvalue(complex(lam_j), b_j / complex(ap_j), b_j, complex(ap_j)))
    return out


def compute_spectrum(signal: Signal, grid: Sequence[float], box: Optional[SearchBox] = None,
                     opts: Optional[EigenSearchOptions] = None) -> NftSpectrum:
    """Continuous spectrum on ``grid`` plus the discrete spectrum inside ``box``."""
    cont = continuous_spectrum(signal, grid)
    return cont.replace(discrete=tuple(find_discrete_eigenvalues(signal, box, opts)))


def eigenvalue_count_estimate(signal: Signal) -> int:
    """floor(1/2 + ||q||_1/pi - eps); only meaningful for single-lobe real pulses."""
    return int(math.floor(0.5 + signal.l1_norm() / math.pi - 1e-12))
