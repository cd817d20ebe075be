"""Command-line entry point: ``mfdxa analyze | synth | plotdata``.

Exit codes: 0 on success, 1 for data or configuration errors, 2 when an
internal invariant check fails.
"""

from __future__ import annotations

import argparse
import io
import sys
import warnings

import numpy as np

from . import __version__
from .analysis import (
    FIGURES,
    AnalysisConfig,
    analyze,
    format_cell,
    load_bundle,
    plot_rows,
    spectrum_rows,
)
from .exceptions import InvariantViolation, MfdxaError, NonPositiveValue, ParseError, UnknownFigure
from .io import format_table, read_table
from .series import RawSeries, levels_from_returns
from .synth import KINDS, PRNG_NAME, GeneratorSpec, generate

EXIT_OK, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2


def _add_analyze(sub):
    p = sub.add_parser("analyze", help="MF-DFA / MF-DXA of a price-volume CSV")
    p.add_argument("--input", required=True, help="CSV with a date column and two value columns")
    p.add_argument("--volume-input", help="separate CSV for the volume column (same dates)")
    p.add_argument("--date-col", default="date")
    p.add_argument("--price-col", default="price")
    p.add_argument("--volume-col", default="volume")
    p.add_argument("--input-kind", choices=("levels", "returns"), default="levels",
                   help="columns hold positive levels (default) or ready-made returns")
    p.add_argument("--s-min", type=int, default=10)
    p.add_argument("--n-scales", type=int, default=20)
    p.add_argument("--scale-spacing", choices=("log", "linear"), default="log")
    p.add_argument("--q-min", type=float, default=-5.0)
    p.add_argument("--q-max", type=float, default=5.0)
    p.add_argument("--q-step", type=float, default=0.25)
    p.add_argument("--detrend-order", type=int, default=1)
    p.add_argument("--fit-lo", type=int)
    p.add_argument("--fit-hi", type=int)
    p.add_argument("--weighted-fit", action="store_true",
                   help="weight log-log fits by the number of windows per scale")
    p.add_argument("--alpha-sig", type=float, default=0.05)
    p.add_argument("--m-max", type=int, help="largest Q_cc lag (default min(64, N/4))")
    p.add_argument("--qcc-detrend", choices=("none", "mean", "linear"), default="mean")
    p.add_argument("--rho-variant", choices=("absolute", "signed"), default="absolute")
    p.add_argument("--rho-unfiltered", action="store_true",
                   help="report rho at every scale, not only significant ones")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--seed", type=int, help="recorded in provenance; analysis itself is deterministic")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (results do not depend on it)")


def _add_synth(sub):
    p = sub.add_parser("synth", help="write a synthetic CSV fixture")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=int, default=4096, help="number of increments")
    p.add_argument("--hurst", type=float, help="fgn Hurst exponent")
    p.add_argument("--a", type=float, help="pmodel multiplier")
    p.add_argument("--d-x", type=float, help="farima_pair d of the first series")
    p.add_argument("--d-y", type=float, help="farima_pair d of the second series")
    p.add_argument("--independent", action="store_true", help="farima_pair with independent innovations")
    p.add_argument("--levels", action="store_true",
                   help="write exp-cumsum levels (N+1 rows) instead of increments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


def _add_plotdata(sub):
    p = sub.add_parser("plotdata", help="long-format CSV for one figure family")
    p.add_argument("--input", required=True, help="JSON bundle written by analyze")
    p.add_argument("--which", required=True, help=f"one of {', '.join(FIGURES)}")
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(prog="mfdxa", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_analyze(sub)
    _add_synth(sub)
    _add_plotdata(sub)
    return parser


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(str(format_cell(v)) for v in row) + "\n")
    return buf.getvalue()


def config_from_args(args) -> AnalysisConfig:
    return AnalysisConfig(
        input=args.input,
        volume_input=args.volume_input,
        date_col=args.date_col,
        price_col=args.price_col,
        volume_col=args.volume_col,
        input_kind=args.input_kind,
        s_min=args.s_min,
        n_scales=args.n_scales,
        scale_spacing=args.scale_spacing,
        q_min=args.q_min,
        q_max=args.q_max,
        q_step=args.q_step,
        detrend_order=args.detrend_order,
        fit_lo=args.fit_lo,
        fit_hi=args.fit_hi,
        weighted_fit=args.weighted_fit,
        alpha_sig=args.alpha_sig,
        m_max=args.m_max,
        qcc_detrend=args.qcc_detrend,
        rho_variant=args.rho_variant,
        rho_filter=not args.rho_unfiltered,
        format=args.format,
        out=args.out,
        seed=args.seed,
        jobs=args.jobs,
    )


def _load_inputs(cfg: AnalysisConfig):
    if cfg.volume_input is None:
        dates, cols, _ = read_table(cfg.input, cfg.date_col, (cfg.price_col, cfg.volume_col))
        price, volume = cols[cfg.price_col], cols[cfg.volume_col]
    else:
        dates, pc, _ = read_table(cfg.input, cfg.date_col, (cfg.price_col,))
        vdates, vc, _ = read_table(cfg.volume_input, cfg.date_col, (cfg.volume_col,))
        if vdates != dates:
            raise ParseError("volume file dates do not match the price file", column=cfg.date_col)
        price, volume = pc[cfg.price_col], vc[cfg.volume_col]
    if cfg.input_kind == "levels":
        # Row diagnostics for non-positive levels, in file terms.
        for name, values in ((cfg.price_col, price), (cfg.volume_col, volume)):
            bad = np.flatnonzero(~(values > 0))
            if bad.size:
                raise NonPositiveValue(
                    f"column {name!r}, data row {int(bad[0]) + 1}: value {values[bad[0]]!r} "
                    "is not strictly positive"
                )
        price = RawSeries(price, timestamps=dates, label="price")
        volume = RawSeries(volume, timestamps=dates, label="volume")
    return price, volume


def cmd_analyze(args) -> int:
    cfg = config_from_args(args).validate()
    price, volume = _load_inputs(cfg)
    bundle = analyze(price, volume, cfg)
    if cfg.format == "json":
        _emit(bundle.to_json(), cfg.out)
    else:
        _emit(_csv_text(*spectrum_rows(bundle.to_dict())), cfg.out)
    return EXIT_OK


def synth_text(spec: GeneratorSpec, levels=False) -> str:
    series = generate(spec)
    names = ("value",) if len(series) == 1 else ("x", "y")
    cols = {}
    for name, s in zip(names, series):
        cols[name] = levels_from_returns(s.values) if levels else s.values
    params = " ".join(f"{k}={v}" for k, v in spec.to_dict().items())
    meta = [
        f"mfdxa {__version__} synth {params}",
        f"prng={PRNG_NAME} seed={spec.seed}",
        f"content={'levels' if levels else 'increments'}",
    ]
    return format_table(cols, meta)


def cmd_synth(args) -> int:
    spec = GeneratorSpec(kind=args.kind, N=args.n, seed=args.seed, hurst=args.hurst, a=args.a,
                         d_x=args.d_x, d_y=args.d_y, independent=args.independent)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        text = synth_text(spec, args.levels)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit(text, args.out)
    return EXIT_OK


def cmd_plotdata(args) -> int:
    if args.which not in FIGURES:
        raise UnknownFigure(f"unknown figure {args.which!r}; expected one of {', '.join(FIGURES)}")
    try:
        bundle = load_bundle(args.input)
    except ValueError as exc:
        raise ParseError(f"not a JSON result bundle: {exc}") from None
    header, rows = plot_rows(bundle, args.which)
    _emit(_csv_text(header, rows), args.out)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "synth": cmd_synth, "plotdata": cmd_plotdata}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (MfdxaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
