"""Signal CSV and spectrum JSON files."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import jsonschema
import numpy as np

from . import __version__
from .errors import ParseError, ValidationError
from .types import DiscreteEigenvalue, NftSpectrum, Signal

PathLike = Union[str, Path]
SIGNAL_HEADER = ["t", "re", "im"]
FORMAT_VERSION = 1

_num = {"type": "number"}
_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_opt = {"type": ["number", "null"]}
SPECTRUM_SCHEMA = {
    "type": "object",
    "required": ["grid", "q_hat", "discrete"],
    "additionalProperties": False,
    "properties": {
        "grid": {"type": "array", "items": _num},
        "q_hat": {"type": "array", "items": _pair},
        "discrete": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lambda_re", "lambda_im", "qtilde_re", "qtilde_im"],
                "additionalProperties": False,
                "properties": {k: (_num if k in ("lambda_re", "lambda_im", "qtilde_re", "qtilde_im") else _opt)
                               for k in ("lambda_re", "lambda_im", "qtilde_re", "qtilde_im",
                                         "b_re", "b_im", "aprime_re", "aprime_im")},
            },
        },
        "meta": {"type": "object"},
    },
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def bundled(name: str) -> Path:
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("nftkit") / "data" / name))


def resolve(path: PathLike) -> Path:
    s = str(path)
    if s.startswith("bundled:"):
        return bundled(s[len("bundled:"):])
    return Path(s)


def signal_to_csv(signal: Signal) -> str:
    buf = _io.StringIO()
    buf.write(",".join(SIGNAL_HEADER) + "\n")
    for t, q in zip(signal.t, signal.samples):
        buf.write(f"{_fmt(t)},{_fmt(q.real)},{_fmt(q.imag)}\n")
    return buf.getvalue()


def write_signal_csv(signal: Signal, path: PathLike) -> None:
    Path(path).write_text(signal_to_csv(signal), encoding="utf-8")


def _infer_dt(t: np.ndarray) -> float:
    """Spacing that regenerates the written time stamps exactly, if one exists
    near the mean spacing; otherwise the mean spacing."""
    n = t.size
    k = np.arange(n)
    base = [(t[-1] - t[0]) / (n - 1), t[1] - t[0]]
    cands = []
    for b in base:
        c = b
        for _ in range(4):
            cands.append(c)
            c = np.nextafter(c, np.inf)
        c = b
        for _ in range(4):
            c = np.nextafter(c, -np.inf)
            cands.append(c)
    for c in cands:
        if np.array_equal(t[0] + c * k, t):
            return float(c)
    return float(base[0])


def signal_from_csv(text: str) -> Signal:
    reader = csv.reader(_io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty file", 1) from None
    if [h.strip() for h in header] != SIGNAL_HEADER:
        raise ParseError(f"expected header {','.join(SIGNAL_HEADER)!r}", 1)
    rows = []
    for line, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line)
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise ParseError(f"non-numeric field in {row!r}", line) from None
        if not all(math.isfinite(v) for v in vals):
            raise ParseError("non-finite value", line)
        rows.append(vals)
    if len(rows) < 2:
        raise ParseError("a signal needs at least 2 samples")
    arr = np.array(rows)
    t = arr[:, 0]
    dt = _infer_dt(t)
    if not dt > 0:
        raise ValidationError("time column must be ascending")
    dev = np.abs(t - (t[0] + dt * np.arange(t.size)))
    if np.max(dev) > 1e-9 * dt:
        bad = int(np.argmax(dev))
        raise ValidationError(f"non-uniform time grid at line {bad + 2}")
    return Signal(arr[:, 1] + 1j * arr[:, 2], float(t[0]), dt)


def read_signal_csv(path: PathLike) -> Signal:
    return signal_from_csv(resolve(path).read_text(encoding="utf-8"))


def _opt_pair(z):
    if z is None:
        return None, None
    return float(np.real(z)), float(np.imag(z))


def spectrum_to_dict(spectrum: NftSpectrum, meta: Optional[dict] = None) -> dict:
    disc = []
    for d in spectrum.discrete:
        b_re, b_im = _opt_pair(d.b)
        ap_re, ap_im = _opt_pair(d.a_prime)
        disc.append({
            "lambda_re": float(d.lam.real), "lambda_im": float(d.lam.imag),
            "qtilde_re": float(np.real(d.q_tilde)), "qtilde_im": float(np.imag(d.q_tilde)),
            "b_re": b_re, "b_im": b_im, "aprime_re": ap_re, "aprime_im": ap_im,
        })
    m = {"tool": "nftkit", "version": __version__, "format": FORMAT_VERSION}
    m.update(meta or {})
    return {
        "grid": [float(x) for x in spectrum.grid],
        "q_hat": [[float(z.real), float(z.imag)] for z in spectrum.q_hat],
        "discrete": disc,
        "meta": m,
    }


def spectrum_from_dict(data: dict) -> NftSpectrum:
    try:
        jsonschema.validate(data, SPECTRUM_SCHEMA)
    except jsonschema.ValidationError as err:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ValidationError(f"invalid spectrum file at {where}: {err.message}") from None
    flat = list(data["grid"]) + [v for p in data["q_hat"] for v in p]
    for d in data["discrete"]:
        flat += [v for v in d.values() if v is not None]
    if not all(math.isfinite(v) for v in flat):
        raise ValidationError("spectrum file contains non-finite numbers")
    discrete = []
    for d in data["discrete"]:
        b = None if d.get("b_re") is None else complex(d["b_re"], d.get("b_im") or 0.0)
        ap = None if d.get("aprime_re") is None else complex(d["aprime_re"], d.get("aprime_im") or 0.0)
        discrete.append(DiscreteEigenvalue(complex(d["lambda_re"], d["lambda_im"]),
                                           complex(d["qtilde_re"], d["qtilde_im"]), b, ap))
    q_hat = np.array([complex(r, i) for r, i in data["q_hat"]], dtype=complex)
    return NftSpectrum(np.array(data["grid"], dtype=float), q_hat, tuple(discrete))


def _reject_constant(token):
    raise ValueError(f"non-finite number {token}")


def spectrum_to_json(spectrum: NftSpectrum, meta: Optional[dict] = None) -> str:
    # repr of a float is the shortest string that reads back to the same
    # double, so values round-trip exactly
    return json.dumps(spectrum_to_dict(spectrum, meta), indent=1, allow_nan=False) + "\n"


def spectrum_from_json(text: str) -> NftSpectrum:
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except ValueError as err:
        line = getattr(err, "lineno", None)
        raise ParseError(f"malformed spectrum JSON: {err}", line) from None
    return spectrum_from_dict(data)


def write_spectrum_json(spectrum: NftSpectrum, path: PathLike, meta: Optional[dict] = None) -> None:
    Path(path).write_text(spectrum_to_json(spectrum, meta), encoding="utf-8")


def read_spectrum_json(path: PathLike) -> NftSpectrum:
    return spectrum_from_json(resolve(path).read_text(encoding="utf-8"))


def read_spectrum_meta(path: PathLike) -> dict:
    return json.loads(resolve(path).read_text(encoding="utf-8")).get("meta", {})
