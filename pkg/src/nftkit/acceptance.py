"""Acceptance checks, runnable from the test suite and from ``nftkit verify``.

Each criterion returns a :class:`CriterionResult` holding named checks of
the form (measured value, limit, comparison).
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import channel, closed_form as cf, nfdm, props, rh, zs
from .types import DiscreteEigenvalue, NftSpectrum, Signal


@dataclass
class Check:
    label: str
    value: float
    limit: float
    op: str = "<="

    @property
    def ok(self) -> bool:
        if self.op == "<=":
            return bool(self.value <= self.limit)
        if self.op == ">=":
            return bool(self.value >= self.limit)
        if self.op == "==":
            return bool(self.value == self.limit)
        lo, hi = self.limit
        return bool(lo <= self.value <= hi)

    def __str__(self):
        if self.op == "in":
            return f"{self.label}={self.value:.4g} in [{self.limit[0]:g}, {self.limit[1]:g}]"
        return f"{self.label}={self.value:.4g} {self.op} {self.limit:g}"


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    elapsed: float = 0.0
    time_limit: float = float("inf")

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks) and self.elapsed <= self.time_limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [str(c) for c in self.checks if not c.ok]
        worst = "; ".join(failed) if failed else "; ".join(str(c) for c in self.checks[:3])
        more = "" if failed or len(self.checks) <= 3 else f" (+{len(self.checks) - 3} checks)"
        limit = f", limit {self.time_limit:g}s" if math.isfinite(self.time_limit) else ""
        return f"[{status}] criterion {self.number:2d} {self.title}: {worst}{more} ({self.elapsed:.1f}s{limit})"


def _timed(number, title, time_limit):
    def deco(fn: Callable[[CriterionResult], None]):
        def run() -> CriterionResult:
            res = CriterionResult(number, title, time_limit=time_limit)
            t0 = time.perf_counter()
            fn(res)
            res.elapsed = time.perf_counter() - t0
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return deco


def _ab_error(sig, p, lam):
    a, b = zs.scattering_arrays(sig, lam)
    ae, be = cf.rect_ab(p, lam)
    # |a|^2 + |b|^2 = 1, so absolute and relative error coincide in scale
    return float(np.max(np.maximum(np.abs(a - ae), np.abs(b - be))))


@_timed(1, "closed-form equivalence", 30)
def criterion_1(res: CriterionResult):
    """Cell-aligned sampling at dt=1e-3 must match to 1e-6; on edge-sampled
    grids (half-value edge samples) halving dt must cut the error by ~4."""
    lam = np.linspace(-10, 10, 401)
    for A in (1.0, 2.0, 6.0):
        p = cf.RectPulse(A, 0.0, 1.0)
        res.checks.append(Check(f"A={A:g} err(dt=1e-3)", _ab_error(p.sample(1e-3, 0.1), p, lam), 1e-6))
        e1 = _ab_error(p.sample(1e-3, 0.1, align="edges"), p, lam)
        e2 = _ab_error(p.sample(5e-4, 0.1, align="edges"), p, lam)
        res.checks.append(Check(f"A={A:g} edge-sampled err ratio (err {e1:.2g})", e1 / e2, (3.5, 4.5), "in"))


@_timed(2, "eigenvalue counts", 60)
def criterion_2(res: CriterionResult):
    for A, expect in ((1.0, 0), (2.0, 1), (6.0, 2)):
        sig = cf.RectPulse(A, 0.0, 1.0).sample(1e-3, 0.1)
        found = sorted(zs.find_discrete_eigenvalues(sig), key=lambda d: d.lam.imag)
        exact = cf.rect_eigenvalues(A, 1.0)
        res.checks.append(Check(f"A={A:g} count", len(found), expect, "=="))
        res.checks.append(Check(f"A={A:g} closed-form count", len(exact), expect, "=="))
        if found:
            res.checks.append(Check(f"A={A:g} max|Re|", max(abs(d.lam.real) for d in found), 1e-6))
        if len(found) == len(exact) and found:
            dev = max(abs(d.lam - e) for d, e in zip(found, exact))
            res.checks.append(Check(f"A={A:g} |lam-closed form|", dev, 1e-6))


def linear_limit_error(A: float, dt: float = 1e-3) -> float:
    p = cf.RectPulse(A, 0.0, 1.0)
    sig = p.sample(dt, 0.1)
    lam = np.linspace(-10, 10, 401)
    q_hat = zs.continuous_spectrum(sig, lam).q_hat
    return float(np.max(np.abs(q_hat - cf.rect_linear_limit(p, lam))) / sig.l1_norm())


@_timed(3, "linear limit", float("inf"))
def criterion_3(res: CriterionResult):
    e2 = linear_limit_error(1e-2)
    e3 = linear_limit_error(1e-3)
    res.checks.append(Check("A=1e-2 sup|q_hat-Q|/|q|_1", e2, 1e-3))
    res.checks.append(Check("error ratio A=1e-2 vs 1e-3", e2 / e3, (80.0, 120.0), "in"))


def unimodularity_corpus():
    """(name, signal) pairs used for the unimodularity check."""
    rng = np.random.default_rng(7)
    out = [(f"rect A={A:g}", cf.RectPulse(A, 0.0, 1.0).sample(1e-3, 0.5)) for A in (0.5, 1.0, 2.0, 6.0)]
    for A in (0.8, 1.0, 1.5, 3.0):
        out.append((f"sech A={A:g}", Signal.from_function(lambda t, A=A: A / np.cosh(t), -15, 0.01, 3001)))
    out.append(("gaussian", Signal.from_function(lambda t: 3 * np.exp(-t ** 2), -6, 0.005, 2401)))
    out.append(("chirped", Signal.from_function(
        lambda t: 1.2 * np.exp(-t ** 2 / 2 + 0.7j * t ** 2 - 0.4j * t), -8, 0.01, 1601)))
    coeffs = rng.normal(size=(6, 2)) @ np.array([1, 1j])
    out.append(("random smooth", Signal.from_function(
        lambda t: np.exp(-t ** 2 / 4) * sum(c * np.cos((k + 1) * t) for k, c in enumerate(coeffs)),
        -10, 0.01, 2001)))
    return out


@_timed(4, "unimodularity", float("inf"))
def criterion_4(res: CriterionResult):
    lam = np.concatenate([np.linspace(-10, 10, 401), np.linspace(-50, 50, 101)])
    worst, name = 0.0, ""
    for label, sig in unimodularity_corpus():
        a, b = zs.scattering_arrays(sig, lam)
        d = float(np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1)))
        if d >= worst:
            worst, name = d, label
    res.checks.append(Check(f"max defect ({name})", worst, 1e-8))


def soliton_propagation_error(n_steps: int = 2000) -> float:
    n = 1024
    dt = 40.0 / n
    sig = Signal.from_function(lambda t: 1 / np.cosh(t), -20.0, dt, n)
    out = channel.ssf_propagate(sig, 1.0, channel.PropagationConfig(n_steps))
    ref = sig.samples * np.exp(-1j)
    return float(np.linalg.norm(out.samples - ref) / np.linalg.norm(ref))


@_timed(5, "soliton propagation", 10)
def criterion_5(res: CriterionResult):
    res.checks.append(Check("rel L2 deviation", soliton_propagation_error(), 1e-4))


@_timed(6, "spectral evolution law", 60)
def criterion_6(res: CriterionResult):
    window, n, z = 64.0, 8192, 0.5
    dt = window / n
    p = cf.RectPulse(2.0, 0.0, 1.0)
    sig = p.sample(dt, (window - 1.0) / 2)
    sig = Signal(sig.samples, sig.t_start - 0.5, dt)   # centre the pulse in the window
    p = cf.RectPulse(2.0, -0.5, 0.5)
    grid = np.linspace(-3, 3, 121)
    before = zs.compute_spectrum(sig, grid)
    out = channel.ssf_propagate(sig, z, channel.PropagationConfig(500))
    box = zs.SearchBox(-1.0, 1.0, 0.05, 2.1)
    after = channel.equalize(zs.compute_spectrum(out, grid, box), z)
    res.checks.append(Check("eigenvalue count after", len(after.discrete), len(before.discrete), "=="))
    if len(after.discrete) == len(before.discrete):
        drift = float(np.max(np.abs(after.eigenvalues - before.eigenvalues)))
        res.checks.append(Check("eigenvalue drift", drift, 1e-3))
    res.checks.append(Check("sup|q_hat eq - q_hat in|, |lam|<=3",
                            float(np.max(np.abs(after.q_hat - before.q_hat))), 1e-2))
    res.checks.append(Check("input vs closed form", float(np.max(np.abs(before.q_hat - cf.rect_continuous(p, grid)))),
                            1e-6))


def graded_grid(lam_max: float, n_outer: int = 4001, n_inner: int = 400, inner: float = 0.5) -> np.ndarray:
    """Uniform grid on [-lam_max, lam_max] refined geometrically towards 0."""
    outer = np.linspace(-lam_max, lam_max, n_outer)
    outer = outer[np.abs(outer) > inner]
    fine = np.geomspace(1e-10, inner, n_inner)
    return np.unique(np.concatenate([outer, -fine, fine]))


def parseval_cases():
    """(name, signal, spectrum grid, tail correction) for the Parseval check."""
    rect = cf.RectPulse(2.0, 0.0, 1.0).sample(1e-2, 0.0)
    cases = [("rect A=2", rect, np.linspace(-200, 200, 40001), True)]
    for A in (0.8, 1.5):
        sig = Signal.from_function(lambda t, A=A: A / np.cosh(t), -25, 0.005, 10001)
        cases.append((f"sech A={A:g}", sig, graded_grid(40.0), False))
    return cases


def conservation_drift(z: float = 1.0, n_steps: int = 2000):
    n = 1024
    dt = 40.0 / n
    sig = Signal.from_function(lambda t: 1.2 / np.cosh(t) * np.exp(-0.6j * t), -20.0, dt, n)
    before = props.trace_constants_time(sig, "spectral")
    after = props.trace_constants_time(channel.ssf_propagate(sig, z, channel.PropagationConfig(n_steps)),
                                       "spectral")
    return {name: abs(getattr(after, name) - getattr(before, name)) / abs(getattr(before, name))
            for name in ("c1", "c2", "c3")}


@_timed(7, "Parseval and trace conservation", float("inf"))
def criterion_7(res: CriterionResult):
    for name, sig, grid, tail in parseval_cases():
        spec = zs.compute_spectrum(sig, grid)
        res.checks.append(Check(f"{name} |c1-E_hat-E_tilde|/c1", props.parseval_check(sig, spec, tail), 1e-4))
    for name, drift in conservation_drift().items():
        res.checks.append(Check(f"{name} relative drift", drift, 1e-4))


def random_smooth_pulse(rng: np.random.Generator) -> Signal:
    c = rng.normal(size=4) + 1j * rng.normal(size=4)
    width = rng.uniform(0.5, 2.0)
    return Signal.from_function(
        lambda t: np.exp(-(t / width) ** 2) * (c[0] + c[1] * t + c[2] * np.cos(2 * t) + c[3] * np.sin(t)),
        -6 * width, 0.01 * width, 1201)


@_timed(8, "layer peeling", float("inf"))
def criterion_8(res: CriterionResult):
    lam = np.linspace(-10, 10, 401)
    worst = 0.0
    for A in (1.0, 2.0, 6.0):
        whole = cf.RectPulse(A, 0.0, 1.0)
        left, right = cf.RectPulse(A, 0.0, 0.5), cf.RectPulse(A, 0.5, 1.0)
        for l in lam:
            c = props.compose_scattering(cf.rect_scattering(left, l), cf.rect_scattering(right, l))
            w = cf.rect_scattering(whole, l)
            worst = max(worst, abs(c.a - w.a), abs(c.b - w.b))
    res.checks.append(Check("closed-form half+half vs whole", worst, 1e-10))
    rng = np.random.default_rng(11)
    worst = 0.0
    lam = np.linspace(-5, 5, 41)
    for _ in range(5):
        sig = random_smooth_pulse(rng)
        cut = int(rng.integers(100, len(sig) - 100))
        a, b = zs.scattering_arrays(sig, lam)
        al, bl = zs.scattering_arrays(sig.slice(0, cut), lam)
        ar, br = zs.scattering_arrays(sig.slice(cut), lam)
        ac = al * ar - bl * np.conj(br)
        bc = al * br + bl * np.conj(ar)
        worst = max(worst, float(np.max(np.abs(ac - a))), float(np.max(np.abs(bc - b))))
    res.checks.append(Check("scatter vs composed slices", worst, 1e-8))


def round_trip_error(sig: Signal, t_grid, ref, grid: rh.RhGrid = rh.RhGrid()) -> float:
    spec = zs.compute_spectrum(sig, grid.points)
    out = rh.inft(spec, t_grid, grid)
    return float(np.linalg.norm(out.samples - ref) / np.linalg.norm(ref))


def _rect_round_trip_case():
    dt = 0.01
    t = np.arange(-1.0 + dt / 2, 2.0, dt)
    ref = np.where((t > 0) & (t < 1), 0.5, 0.0)
    return cf.RectPulse(0.5, 0.0, 1.0), t, ref


def rect_round_trip(grid: rh.RhGrid = rh.RhGrid()) -> float:
    p, t, ref = _rect_round_trip_case()
    return round_trip_error(p.sample(1e-3, 0.5), t, ref, grid)


def rect_truncation_floor(lambda_max: float = 20.0) -> float:
    """Error of the exact weak-signal inverse of the rect spectrum cut off
    at |lam| <= lambda_max: a floor no inverse working from the truncated
    spectrum can beat, since the pulse is close to the linear regime."""
    p, t, ref = _rect_round_trip_case()
    lam = np.linspace(-lambda_max, lambda_max, 20001)
    w = np.full(lam.size, lam[1] - lam[0])
    w[0] = w[-1] = w[0] / 2
    q_conj = -(np.exp(2j * t[:, None] * lam[None, :]) @ (w * cf.rect_linear_limit(p, lam))) / np.pi
    return float(np.linalg.norm(np.conj(q_conj) - ref) / np.linalg.norm(ref))


def sech_round_trip(grid: rh.RhGrid = rh.RhGrid()) -> float:
    sig = Signal.from_function(lambda t: 0.8 / np.cosh(t), -15, 0.01, 3001)
    t = np.arange(-8, 8.0001, 0.1)
    return round_trip_error(sig, t, 0.8 / np.cosh(t), grid)


@_timed(9, "inverse transform round trips", 300)
def criterion_9(res: CriterionResult):
    err = rect_round_trip()
    floor = rect_truncation_floor()
    res.checks.append(Check("rect A=0.5 rel L2", err, 5e-2))
    res.checks.append(Check(f"rect error / truncation floor {floor:.3g}", err / floor, 1.1))
    res.checks.append(Check("sech A=0.8 rel L2", sech_round_trip(), 1e-2))
    lam1 = 0.5j
    sol = rh.inft_discrete_only([DiscreteEigenvalue(lam1, 1.0)], np.arange(-15, 15, 0.01))
    found = zs.find_discrete_eigenvalues(sol)
    res.checks.append(Check("1-soliton eigenvalue count", len(found), 1, "=="))
    if found:
        res.checks.append(Check("|lam - j/2|", abs(found[0].lam - lam1), 1e-3))
    res.checks.append(Check("|energy - 4 Im lam|", abs(sol.energy() - 4 * lam1.imag), 1e-3))


def metamorphic_errors(dt: float = 5e-4) -> dict:
    p = cf.RectPulse(2.0, 0.0, 1.0)
    sig = p.sample(dt, 0.5)
    grid = np.linspace(-5, 5, 41)
    base = zs.compute_spectrum(sig, grid)

    def err(pred: NftSpectrum, got: NftSpectrum):
        e = float(np.max(np.abs(pred.q_hat - got.q_hat)))
        if len(pred.discrete) != len(got.discrete):
            return np.inf
        if pred.discrete:
            e = max(e, float(np.max(np.abs(pred.eigenvalues - got.eigenvalues))),
                    float(np.max(np.abs(pred.norming_constants - got.norming_constants))))
        return e

    out = {}
    phi = 0.7
    pred = props.transform_spectrum(base, "phase", phi)
    out["phase"] = err(pred, zs.compute_spectrum(sig.with_samples(np.exp(1j * phi) * sig.samples), grid))
    t0 = 0.3
    pred = props.transform_spectrum(base, "time_shift", t0)
    out["time shift"] = err(pred, zs.compute_spectrum(Signal(sig.samples, sig.t_start + t0, dt), grid))
    w = 0.4
    pred = props.transform_spectrum(base, "freq_shift", w)
    shifted = sig.with_samples(sig.samples * np.exp(-2j * w * sig.t))
    out["freq shift"] = err(pred, zs.compute_spectrum(shifted, pred.grid))
    a = 2.0
    scaled = zs.compute_spectrum(sig.with_samples(a * sig.samples), grid * a)
    pred = props.transform_spectrum(scaled, "dilation", a)
    dilated = Signal(sig.samples, sig.t_start * a, dt * a)
    out["dilation"] = err(pred, zs.compute_spectrum(dilated, pred.grid))
    return out


@_timed(10, "metamorphic properties", float("inf"))
def criterion_10(res: CriterionResult):
    for name, e in metamorphic_errors().items():
        res.checks.append(Check(f"{name} max err", e, 1e-6))


def nfdm_config(**kw) -> nfdm.ModemConfig:
    return nfdm.ModemConfig(**kw)


@_timed(11, "NFDM end-to-end", float("inf"))
def criterion_11(res: CriterionResult, noisy_frames: int = 30):
    for z in (0.0, 1.0):
        cfg = nfdm_config(z_span=z)
        errors = 0
        for syms in itertools.product(cfg.discrete_constellation, repeat=len(cfg.discrete_carriers)):
            frame = nfdm.SymbolFrame(tuple(syms), ())
            got, _ = nfdm.receive(nfdm.propagate_frame(nfdm.transmit(frame, cfg), cfg), cfg)
            errors += sum(nfdm.count_errors(frame, got)[0])
        res.checks.append(Check(f"z={z:g} noise-free symbol errors", errors, 0, "=="))
    cfg = nfdm_config(z_span=1.0, noise_var=1e-3, check_confinement=False)
    s1 = nfdm.ber_harness(cfg, 5, seed=42)
    s2 = nfdm.ber_harness(cfg, 5, seed=42)
    frame = nfdm.SymbolFrame(cfg.discrete_constellation[:2], ())
    tx = nfdm.transmit(frame, cfg)
    r1 = nfdm.propagate_frame(tx, cfg, seed=9)
    r2 = nfdm.propagate_frame(tx, cfg, seed=9)
    res.checks.append(Check("seeded rerun identical (stats and samples)",
                            int(s1 == s2 and np.array_equal(r1.samples, r2.samples)), 1, "=="))
    rates = []
    for nv in (1e-2, 1e-3, 1e-4):
        st = nfdm.ber_harness(nfdm_config(z_span=1.0, noise_var=nv, check_confinement=False),
                              noisy_frames, seed=2024)
        rates.append(st.symbol_error_rate)
    mono = all(b <= a for a, b in zip(rates, rates[1:]))
    res.checks.append(Check("SER non-increasing over noise 1e-2,1e-3,1e-4 " +
                            "(" + ", ".join(f"{r:.3g}" for r in rates) + ")", int(mono), 1, "=="))


CRITERIA = {i: f for i, f in enumerate(
    [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
     criterion_7, criterion_8, criterion_9, criterion_10, criterion_11], start=1)}


def run(numbers=None, echo=print) -> list[CriterionResult]:
    out = []
    for n in sorted(numbers or CRITERIA):
        r = CRITERIA[n]()
        if echo:
            echo(r.line())
        out.append(r)
    return out
