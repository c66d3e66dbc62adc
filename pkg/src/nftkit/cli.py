"""Command-line interface.

Exit status: 0 on success, 1 for invalid input (bad arguments, malformed
files, bad config), 2 when the numerics fail.

Every subcommand accepts ``--config FILE`` with a JSON object whose keys are
the subcommand's long option names (dashes or underscores); unknown keys are
rejected. Explicit flags override config values.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import jsonschema
import numpy as np

from . import __version__, acceptance, channel, io, nfdm, props, rh, zs
from .errors import NftError, NumericalError, ValidationError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _add_rh_options(p):
    p.add_argument("--lambda-max", type=float, default=20.0, help="half-width of the lambda grid")
    p.add_argument("--n-lambda", type=int, default=512, help="number of lambda grid points")
    p.add_argument("--epsilon", type=float, default=None, help="contour offset (offset quadrature)")
    p.add_argument("--quadrature", choices=rh.QUADRATURES, default="plemelj")


def _rh_grid(args) -> rh.RhGrid:
    return rh.RhGrid(args.lambda_max, args.n_lambda, args.epsilon, args.quadrature)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nftkit", description="Nonlinear Fourier transform toolkit for the focusing NLS equation")
    parser.add_argument("--version", action="version", version=f"nftkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("nft", help="signal CSV -> spectrum JSON")
    p.add_argument("signal", help="signal CSV (or bundled:NAME)")
    p.add_argument("-o", "--output", required=True)
    _add_rh_options(p)
    p.add_argument("--no-discrete", action="store_true", help="skip the eigenvalue search")
    p.add_argument("--box", type=float, nargs=4, metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
                   default=None, help="eigenvalue search rectangle")
    p.add_argument("--seeds", type=int, nargs=2, metavar=("N_RE", "N_IM"), default=[20, 20])
    p.add_argument("--dump-grid", default=None, help="also write lambda,abs,re,im CSV of q_hat")

    p = sub.add_parser("inft", help="spectrum JSON -> signal CSV")
    p.add_argument("spectrum")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--t-start", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--n", type=int, required=True, help="number of time samples")
    _add_rh_options(p)

    p = sub.add_parser("propagate", help="split-step NLS propagation of a signal")
    p.add_argument("signal")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--noise-var", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("filter", help="apply the channel filter exp(-4j lam^2 z) to a spectrum")
    p.add_argument("spectrum")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--equalize", action="store_true", help="apply the inverse filter")

    p = sub.add_parser("props", help="conserved quantities and Parseval report")
    p.add_argument("signal")
    p.add_argument("--spectrum", default=None)
    p.add_argument("--derivative", choices=("central", "spectral"), default="central")
    p.add_argument("--tail-correction", action="store_true",
                   help="extrapolate the continuous-energy integral beyond the grid (1/lam^2 decay)")
    p.add_argument("-o", "--output", default=None, help="write the JSON report here instead of stdout")

    p = sub.add_parser("simulate", help="NFDM Monte-Carlo symbol error statistics")
    p.add_argument("--frames", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z-span", type=float, default=1.0)
    p.add_argument("--noise-var", type=float, default=0.0)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--carriers", type=str, default="0.5j,1.0j", help="comma-separated complex eigenvalues")
    p.add_argument("--n-samples", type=int, default=1024)
    p.add_argument("--frame-duration", type=float, default=24.0)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", type=str, default=None, help="comma-separated criterion numbers")

    for name, sp in sub.choices.items():
        sp.add_argument("--config", default=None, help="JSON file with option values")
    return parser


def _schema_for(sp: argparse.ArgumentParser) -> dict:
    """JSON schema accepting exactly the optional arguments of a subparser."""
    props_ = {}
    for action in sp._actions:
        if not action.option_strings or action.dest in ("help", "config"):
            continue
        if isinstance(action, argparse._StoreTrueAction):
            t = {"type": "boolean"}
        elif action.nargs is not None:
            item = {"type": "integer"} if action.type is int else {"type": "number"}
            t = {"type": "array", "items": item}
        elif action.type is int:
            t = {"type": "integer"}
        elif action.type is float:
            t = {"type": ["number", "null"]} if action.default is None else {"type": "number"}
        else:
            t = {"type": ["string", "null"]}
        if action.choices:
            t = {"enum": list(action.choices)}
        props_[action.dest] = t
    return {"type": "object", "additionalProperties": False, "properties": props_}


def _apply_config(parser, sp, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        data = json.loads(Path(known.config).read_text(encoding="utf-8"))
    except OSError as err:
        raise ValidationError(f"cannot read config: {err}") from None
    except ValueError as err:
        raise ValidationError(f"config is not valid JSON: {err}") from None
    if isinstance(data, dict):
        data = {k.replace("-", "_"): v for k, v in data.items()}
    try:
        jsonschema.validate(data, _schema_for(sp))
    except jsonschema.ValidationError as err:
        raise ValidationError(f"invalid config: {err.message}") from None
    sp.set_defaults(**data)
    # options required on the command line may come from the config instead
    for action in sp._actions:
        if action.dest in data:
            action.required = False


def _write_or_print(text: str, path: Optional[str]):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_nft(args) -> int:
    sig = io.read_signal_csv(args.signal)
    grid = _rh_grid(args)
    if args.no_discrete:
        spec = zs.continuous_spectrum(sig, grid.points)
    else:
        box = zs.SearchBox(*args.box) if args.box else None
        opts = zs.EigenSearchOptions(n_re=args.seeds[0], n_im=args.seeds[1])
        spec = zs.compute_spectrum(sig, grid.points, box, opts)
    meta = {"command": "nft", "params": {"lambda_max": args.lambda_max, "n_lambda": args.n_lambda,
                                         "source": str(args.signal), "dt": sig.dt, "t_start": sig.t_start,
                                         "n_samples": len(sig)}}
    io.write_spectrum_json(spec, args.output, meta)
    if args.dump_grid:
        rows = ["lambda,abs,re,im"] + [f"{io._fmt(l)},{io._fmt(abs(v))},{io._fmt(v.real)},{io._fmt(v.imag)}"
                                      for l, v in zip(spec.grid, spec.q_hat)]
        Path(args.dump_grid).write_text("\n".join(rows) + "\n", encoding="utf-8")
    print(f"{len(spec.discrete)} eigenvalue(s)" +
          "".join(f"\n  lambda={d.lam.real:.10g}{d.lam.imag:+.10g}j  q_tilde={d.q_tilde:.10g}"
                  for d in spec.discrete))
    return 0


def cmd_inft(args) -> int:
    spec = io.read_spectrum_json(args.spectrum)
    if args.n < 2 or not args.dt > 0:
        raise ValidationError("need --n >= 2 and --dt > 0")
    t = args.t_start + args.dt * np.arange(args.n)
    grid = _rh_grid(args)
    sig = rh.inft(spec, t, grid) if spec.grid.size else rh.inft_discrete_only(spec.discrete, t)
    io.write_signal_csv(sig, args.output)
    return 0


def cmd_propagate(args) -> int:
    sig = io.read_signal_csv(args.signal)
    cfg = channel.PropagationConfig(args.steps, args.seed, args.noise_var > 0)
    io.write_signal_csv(channel.ssf_propagate(sig, args.z, cfg, args.noise_var), args.output)
    return 0


def cmd_filter(args) -> int:
    spec = io.read_spectrum_json(args.spectrum)
    out = (channel.equalize if args.equalize else channel.channel_filter)(spec, args.z)
    meta = io.read_spectrum_meta(args.spectrum)
    meta.setdefault("history", []).append({"command": "filter", "z": args.z, "equalize": args.equalize})
    io.write_spectrum_json(out, args.output, meta)
    return 0


def _tc(tc: props.TraceConstants) -> dict:
    return {"c1": tc.c1, "c2": [tc.c2.real, tc.c2.imag], "c3": tc.c3}


def cmd_props(args) -> int:
    sig = io.read_signal_csv(args.signal)
    report = {"energy": sig.energy(), "l1_norm": sig.l1_norm(),
              "time_domain": _tc(props.trace_constants_time(sig, args.derivative))}
    cert, pred = props.eigenvalue_count_bound(sig)
    report["no_discrete_certificate"] = cert
    report["predicted_eigenvalue_count"] = pred
    if args.spectrum:
        spec = io.read_spectrum_json(args.spectrum)
        tail = args.tail_correction
        e_hat, e_tilde = props.energy_split(spec, tail)
        report["e_hat"], report["e_tilde"] = e_hat, e_tilde
        report["parseval_mismatch"] = props.parseval_check(sig, spec, tail)
        for variant in ("power", "printed"):
            report[f"spectral_{variant}"] = _tc(props.trace_constants_spectral(spec, variant, tail))
    _write_or_print(json.dumps(report, indent=1) + "\n", args.output)
    return 0


def cmd_simulate(args) -> int:
    try:
        carriers = tuple(complex(c.strip()) for c in args.carriers.split(",") if c.strip())
    except ValueError:
        raise ValidationError(f"cannot parse carriers {args.carriers!r}") from None
    cfg = nfdm.ModemConfig(discrete_carriers=carriers, z_span=args.z_span, noise_var=args.noise_var,
                           ssf_steps=args.steps, n_samples=args.n_samples,
                           frame_duration=args.frame_duration, seed=args.seed)
    st = nfdm.ber_harness(cfg, args.frames, args.seed)
    out = {"n_frames": st.n_frames, "n_symbols": st.n_symbols, "symbol_errors": st.symbol_errors,
           "erasures": st.erasures, "symbol_error_rate": st.symbol_error_rate,
           "erasure_rate": st.erasure_rate, "per_carrier_errors": list(st.per_carrier_errors)}
    _write_or_print(json.dumps(out, indent=1) + "\n", args.output)
    return 0


def cmd_verify(args) -> int:
    nums = None
    if args.only:
        try:
            nums = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise ValidationError("--only expects comma-separated integers") from None
        bad = [n for n in nums if n not in acceptance.CRITERIA]
        if bad:
            raise ValidationError(f"unknown criteria {bad}")
    results = acceptance.run(nums)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    return 0 if n_pass == len(results) else 2


COMMANDS = {"nft": cmd_nft, "inft": cmd_inft, "propagate": cmd_propagate, "filter": cmd_filter,
            "props": cmd_props, "simulate": cmd_simulate, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if argv and argv[0] in COMMANDS:
            sub = parser._subparsers._group_actions[0].choices[argv[0]]
            _apply_config(parser, sub, argv[1:])
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except NumericalError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return 2
    except NftError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
