"""Core data containers shared by all modules.

Time sampling convention: sample ``k`` sits at ``t_k = t_start + k*dt`` and
represents the cell ``[t_k - dt/2, t_k + dt/2]``. The scattering problem is
therefore solved on ``[t_start - dt/2, t_start + (N - 1/2)*dt]``, a window of
length ``N*dt``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled complex envelope q(t) in normalized units."""

    samples: np.ndarray
    t_start: float
    dt: float

    def __post_init__(self):
        q = np.array(self.samples, dtype=complex).ravel()
        q.setflags(write=False)
        object.__setattr__(self, "samples", q)
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise InvalidArgumentError(f"dt must be finite and > 0, got {self.dt!r}")
        if not np.isfinite(self.t_start):
            raise InvalidArgumentError("t_start must be finite")
        if q.size < 2:
            raise InvalidArgumentError("a signal needs at least 2 samples")
        if not np.all(np.isfinite(q)):
            raise InvalidArgumentError("signal samples must be finite")
        object.__setattr__(self, "t_start", float(self.t_start))
        object.__setattr__(self, "dt", float(self.dt))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], t_start: float,
                      dt: float, n: int) -> "Signal":
        t = t_start + dt * np.arange(n)
        return cls(np.asarray(func(t), dtype=complex) * np.ones(n), t_start, dt)

    @classmethod
    def zeros(cls, n: int, t_start: float = 0.0, dt: float = 1.0) -> "Signal":
        return cls(np.zeros(n, complex), t_start, dt)

    def __len__(self):
        return self.samples.size

    @property
    def t(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.samples.size)

    @property
    def window(self) -> tuple[float, float]:
        """Edges of the integration window covered by the sample cells."""
        lo = self.t_start - 0.5 * self.dt
        return lo, lo + self.samples.size * self.dt

    @property
    def t_end(self) -> float:
        return self.window[1]

    def l1_norm(self) -> float:
        return float(self.dt * np.sum(np.abs(self.samples)))

    def energy(self) -> float:
        return float(self.dt * np.sum(np.abs(self.samples) ** 2))

    def with_samples(self, samples) -> "Signal":
        return Signal(samples, self.t_start, self.dt)

    def slice(self, start: int, stop: Optional[int] = None) -> "Signal":
        stop = self.samples.size if stop is None else stop
        return Signal(self.samples[start:stop], self.t_start + start * self.dt, self.dt)

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return (self.t_start == other.t_start and self.dt == other.dt
                and np.array_equal(self.samples, other.samples))


@dataclass(frozen=True)
class ScatteringCoeffs:
    lam: complex
    a: complex
    b: complex

    def unimodularity_defect(self) -> float:
        return abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1.0)


@dataclass(frozen=True)
class TransferMatrix:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21


@dataclass(frozen=True)
class DiscreteEigenvalue:
    """A zero of a(lambda) in the upper half plane with its norming constant.

    ``b`` and ``a_prime`` are known for spectra measured from a signal; for
    synthesized spectra (modem, round trips) only ``q_tilde`` is meaningful and
    the other two may be ``None``.
    """

    lam: complex
    q_tilde: complex
    b: Optional[complex] = None
    a_prime: Optional[complex] = None

    def __post_init__(self):
        if not complex(self.lam).imag > 0:
            raise InvalidArgumentError(f"eigenvalue must lie in the upper half plane: {self.lam!r}")
        if self.a_prime is not None and self.a_prime == 0:
            raise InvalidArgumentError("a_prime must be nonzero (simple zero)")


@dataclass(frozen=True, eq=False)
class NftSpectrum:
    """Continuous part q_hat on a real grid plus the discrete eigenvalues."""

    grid: np.ndarray
    q_hat: np.ndarray
    discrete: tuple = field(default_factory=tuple)

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float).ravel()
        q_hat = np.array(self.q_hat, dtype=complex).ravel()
        if grid.shape != q_hat.shape:
            raise InvalidArgumentError("grid and q_hat must have the same length")
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            raise InvalidArgumentError("grid must be strictly ascending")
        grid.setflags(write=False)
        q_hat.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "q_hat", q_hat)
        object.__setattr__(self, "discrete", tuple(self.discrete))

    @classmethod
    def empty(cls, grid: Sequence[float] = ()) -> "NftSpectrum":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.zeros(grid.size, complex), ())

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([d.lam for d in self.discrete], dtype=complex)

    @property
    def norming_constants(self) -> np.ndarray:
        return np.array([d.q_tilde for d in self.discrete], dtype=complex)

    def replace(self, **changes) -> "NftSpectrum":
        return replace(self, **changes)

    def q_hat_at(self, lam) -> np.ndarray:
        """Linear interpolation of the continuous part, zero outside the grid."""
        lam = np.asarray(lam, dtype=float)
        if self.grid.size == 0:
            return np.zeros(lam.shape, complex)
        re = np.interp(lam, self.grid, self.q_hat.real, left=0.0, right=0.0)
        im = np.interp(lam, self.grid, self.q_hat.imag, left=0.0, right=0.0)
        return re + 1j * im
