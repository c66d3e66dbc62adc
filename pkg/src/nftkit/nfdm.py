"""Nonlinear frequency-division multiplexing: symbols live on the norming
constants of fixed eigenvalues and on raised-cosine bumps of the continuous
spectrum."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import channel, rh, zs
from .errors import InvalidArgumentError
from .types import DiscreteEigenvalue, NftSpectrum, Signal

QPSK = tuple(complex(np.exp(1j * (np.pi / 4 + k * np.pi / 2))) for k in range(4))


def _min_distance(points) -> float:
    p = np.asarray(points, complex)
    if p.size < 2:
        return np.inf
    d = np.abs(p[:, None] - p[None, :])
    return float(np.min(d[~np.eye(p.size, dtype=bool)]))


@dataclass(frozen=True)
class ModemConfig:
    discrete_carriers: tuple = (0.5j, 1.0j)
    discrete_constellation: tuple = QPSK
    continuous_carriers: tuple = ()
    continuous_weights: tuple = ()
    continuous_constellation: tuple = tuple(0.2 * s for s in QPSK)
    shape_width: float = 1.0
    frame_duration: float = 24.0
    n_samples: int = 1024
    z_span: float = 1.0
    noise_var: float = 0.0
    seed: int = 0
    ssf_steps: int = 400
    match_radius: float = 0.25
    rh_grid: rh.RhGrid = field(default_factory=rh.RhGrid)
    check_confinement: bool = True

    def __post_init__(self):
        object.__setattr__(self, "discrete_carriers", tuple(complex(c) for c in self.discrete_carriers))
        object.__setattr__(self, "discrete_constellation",
                           tuple(complex(c) for c in self.discrete_constellation))
        object.__setattr__(self, "continuous_carriers", tuple(float(c) for c in self.continuous_carriers))
        object.__setattr__(self, "continuous_constellation",
                           tuple(complex(c) for c in self.continuous_constellation))
        weights = self.continuous_weights or (1.0,) * len(self.continuous_carriers)
        object.__setattr__(self, "continuous_weights", tuple(float(w) for w in weights))
        if len(self.continuous_weights) != len(self.continuous_carriers):
            raise InvalidArgumentError("one weight per continuous carrier")
        if any(c.imag <= 0 for c in self.discrete_carriers):
            raise InvalidArgumentError("discrete carriers must lie in the upper half plane")
        for name in ("discrete_carriers", "continuous_carriers"):
            if _min_distance(getattr(self, name)) == 0:
                raise InvalidArgumentError(f"{name} must be distinct")
        if self.discrete_carriers and not self.discrete_constellation:
            raise InvalidArgumentError("discrete constellation is empty")
        if self.continuous_carriers and not self.continuous_constellation:
            raise InvalidArgumentError("continuous constellation is empty")
        for name in ("discrete_constellation", "continuous_constellation"):
            if _min_distance(getattr(self, name)) == 0:
                raise InvalidArgumentError(f"{name} is degenerate")
        if not (self.frame_duration > 0 and self.n_samples >= 16 and self.shape_width > 0):
            raise InvalidArgumentError("frame_duration, n_samples, shape_width out of range")
        if self.z_span < 0 or self.noise_var < 0 or self.match_radius <= 0:
            raise InvalidArgumentError("z_span, noise_var must be >= 0 and match_radius > 0")
        if self.check_confinement:
            frac = confinement_loss(self)
            if frac >= 0.01:
                raise InvalidArgumentError(
                    f"{100 * frac:.2f}% of the worst-case frame energy falls outside the frame")

    @property
    def dt(self) -> float:
        return self.frame_duration / self.n_samples

    @property
    def t_grid(self) -> np.ndarray:
        return -self.frame_duration / 2 + self.dt * (np.arange(self.n_samples) + 0.5)

    @property
    def spectral_grid(self) -> np.ndarray:
        return self.rh_grid.points


@dataclass(frozen=True)
class SymbolFrame:
    """Symbols per carrier; ``None`` marks an erasure in received frames."""

    discrete_symbols: tuple = ()
    continuous_symbols: tuple = ()

    def check(self, cfg: ModemConfig):
        if len(self.discrete_symbols) != len(cfg.discrete_carriers):
            raise InvalidArgumentError("one discrete symbol per discrete carrier")
        if len(self.continuous_symbols) != len(cfg.continuous_carriers):
            raise InvalidArgumentError("one continuous symbol per continuous carrier")


@dataclass(frozen=True)
class ReceiveMetrics:
    discrete_distance: tuple
    eigenvalue_error: tuple
    continuous_distance: tuple


@dataclass(frozen=True)
class BerStats:
    n_frames: int
    n_symbols: int
    symbol_errors: int
    erasures: int
    per_carrier_errors: tuple

    @property
    def symbol_error_rate(self) -> float:
        return self.symbol_errors / self.n_symbols if self.n_symbols else 0.0

    @property
    def erasure_rate(self) -> float:
        return self.erasures / self.n_symbols if self.n_symbols else 0.0


def raised_cosine(x, width: float):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < width, 0.5 * (1 + np.cos(np.pi * x / width)), 0.0)


def _shapes(cfg: ModemConfig, grid) -> np.ndarray:
    return np.array([w * raised_cosine(grid - c, cfg.shape_width)
                     for c, w in zip(cfg.continuous_carriers, cfg.continuous_weights)]).reshape(-1, len(grid))


def encode(frame: SymbolFrame, cfg: ModemConfig) -> NftSpectrum:
    """Spectrum carrying the frame. A zero discrete symbol leaves its carrier
    empty, which allows on-off keying of eigenvalues."""
    frame.check(cfg)
    grid = cfg.spectral_grid
    q_hat = np.zeros(grid.size, complex)
    if cfg.continuous_carriers:
        q_hat = np.asarray(frame.continuous_symbols, complex) @ _shapes(cfg, grid)
    disc = tuple(DiscreteEigenvalue(lam, complex(s))
                 for lam, s in zip(cfg.discrete_carriers, frame.discrete_symbols) if s != 0)
    return NftSpectrum(grid, q_hat, disc)


def _synthesize(spec: NftSpectrum, t_grid, cfg: ModemConfig) -> Signal:
    if np.any(spec.q_hat != 0):
        return rh.inft(spec, t_grid, cfg.rh_grid)
    return rh.inft_discrete_only(spec.discrete, t_grid)


def transmit(frame: SymbolFrame, cfg: ModemConfig) -> Signal:
    return _synthesize(encode(frame, cfg), cfg.t_grid, cfg)


def confinement_loss(cfg: ModemConfig) -> float:
    """Largest fraction of frame energy falling outside the frame window,
    over frames that use the smallest or largest constellation magnitude on
    every carrier. Evaluated on a window three frames long.

    With continuous carriers the synthesized signal repeats with period
    pi/h in time (h the lambda spacing), so the window is clipped to half
    that period and frames that do not fit in it report a loss of 1.
    """
    mags = [p for p in (min(cfg.discrete_constellation, key=abs, default=0),
                        max(cfg.discrete_constellation, key=abs, default=0))]
    cmax = max(cfg.continuous_constellation, key=abs, default=0)
    T = cfg.frame_duration
    half = 1.5 * T
    n_t = 3 * cfg.n_samples
    if cfg.continuous_carriers:
        t_alias = np.pi / (2 * cfg.rh_grid.spacing)
        if T / 2 >= t_alias:
            return 1.0
        half = min(half, t_alias)
        # each sample costs a full Riemann-Hilbert solve; 4 points per unit time suffices
        n_t = min(n_t, max(96, int(8 * half)))
    dt = 2 * half / n_t
    t = -half + dt * (np.arange(n_t) + 0.5)
    worst = 0.0
    for m in mags:
        f = SymbolFrame(tuple(m for _ in cfg.discrete_carriers),
                        tuple(cmax for _ in cfg.continuous_carriers))
        q = np.abs(_synthesize(encode(f, cfg), t, cfg).samples) ** 2
        total = q.sum()
        if total > 0:
            worst = max(worst, float(q[np.abs(t) > T / 2].sum() / total))
    return worst


def propagate_frame(signal: Signal, cfg: ModemConfig, seed: Optional[int] = None,
                    noise_var: Optional[float] = None) -> Signal:
    """Zero-pad the frame to twice its length, run the split-step channel over
    ``z_span`` and crop back to the frame."""
    noise_var = cfg.noise_var if noise_var is None else noise_var
    if cfg.z_span == 0:
        return signal
    n = len(signal)
    pad = n // 2
    padded = Signal(np.concatenate([np.zeros(pad), signal.samples, np.zeros(pad)]),
                    signal.t_start - pad * signal.dt, signal.dt)
    pc = channel.PropagationConfig(cfg.ssf_steps, cfg.seed if seed is None else seed, noise_var > 0)
    out = channel.ssf_propagate(padded, cfg.z_span, pc, noise_var)
    return out.slice(pad, pad + n)


def _search_box(cfg: ModemConfig) -> zs.SearchBox:
    c = np.asarray(cfg.discrete_carriers)
    r = cfg.match_radius
    return zs.SearchBox(float(c.real.min() - r), float(c.real.max() + r),
                        float(max(c.imag.min() - r, 1e-3)), float(c.imag.max() + r))


def _slice(value, points):
    p = np.asarray(points)
    k = int(np.argmin(np.abs(p - value)))
    return complex(p[k]), float(abs(p[k] - value))


def receive(signal: Signal, cfg: ModemConfig) -> tuple[SymbolFrame, ReceiveMetrics]:
    grid = cfg.spectral_grid if cfg.continuous_carriers else np.zeros(0)
    found = []
    if cfg.discrete_carriers:
        seeds = tuple(cfg.discrete_carriers)
        opts = zs.EigenSearchOptions(n_re=4, n_im=6, extra_seeds=seeds)
        found = zs.find_discrete_eigenvalues(signal, _search_box(cfg), opts)
    spec = channel.equalize(NftSpectrum(grid, zs.continuous_spectrum(signal, grid).q_hat
                                        if grid.size else np.zeros(0), tuple(found)), cfg.z_span)
    disc, dist, lam_err = [], [], []
    used = set()
    for carrier in cfg.discrete_carriers:
        best = None
        for i, d in enumerate(spec.discrete):
            e = abs(d.lam - carrier)
            if i not in used and e <= cfg.match_radius and (best is None or e < best[1]):
                best = (i, e)
        if best is None:
            if 0 in cfg.discrete_constellation:
                disc.append(0j)
            else:
                disc.append(None)
            dist.append(np.nan)
            lam_err.append(np.nan)
            continue
        used.add(best[0])
        s, m = _slice(spec.discrete[best[0]].q_tilde, [p for p in cfg.discrete_constellation if p != 0])
        disc.append(s)
        dist.append(m)
        lam_err.append(best[1])
    cont, cdist = [], []
    if cfg.continuous_carriers:
        shapes = _shapes(cfg, grid)
        gram = shapes @ shapes.T
        proj = np.linalg.solve(gram, shapes @ spec.q_hat)
        for v in proj:
            s, m = _slice(v, cfg.continuous_constellation)
            cont.append(s)
            cdist.append(m)
    return (SymbolFrame(tuple(disc), tuple(cont)),
            ReceiveMetrics(tuple(dist), tuple(lam_err), tuple(cdist)))


def random_frame(cfg: ModemConfig, rng: np.random.Generator) -> SymbolFrame:
    dc = np.asarray(cfg.discrete_constellation)
    cc = np.asarray(cfg.continuous_constellation)
    return SymbolFrame(tuple(complex(dc[i]) for i in rng.integers(0, dc.size, len(cfg.discrete_carriers))),
                       tuple(complex(cc[i]) for i in rng.integers(0, cc.size, len(cfg.continuous_carriers))))


def count_errors(sent: SymbolFrame, got: SymbolFrame):
    errs, erasures = [], 0
    for s, g in zip(sent.discrete_symbols + sent.continuous_symbols,
                    got.discrete_symbols + got.continuous_symbols):
        if g is None:
            erasures += 1
            errs.append(1)
        else:
            errs.append(int(g != s))
    return errs, erasures


def ber_harness(cfg: ModemConfig, n_frames: int, seed: int = 0) -> BerStats:
    """Monte-Carlo symbol error statistics over noisy propagation.

    Frame ``k`` draws its symbols and its noise seed from
    ``SeedSequence([seed, k])`` so results do not depend on evaluation order.
    Erasures count as symbol errors and are also reported separately.
    """
    if n_frames < 1:
        raise InvalidArgumentError("n_frames must be >= 1")
    n_carriers = len(cfg.discrete_carriers) + len(cfg.continuous_carriers)
    per = np.zeros(n_carriers, int)
    erasures = 0
    for k in range(n_frames):
        ss = np.random.SeedSequence([int(seed), k])
        rng = np.random.default_rng(ss)
        noise_seed = int(ss.generate_state(1, np.uint64)[0])
        frame = random_frame(cfg, rng)
        rx = propagate_frame(transmit(frame, cfg), cfg, seed=noise_seed)
        got, _ = receive(rx, cfg)
        errs, er = count_errors(frame, got)
        per += np.asarray(errs, int)
        erasures += er
    return BerStats(n_frames, n_frames * n_carriers, int(per.sum()), erasures, tuple(int(p) for p in per))
