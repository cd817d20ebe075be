"""End-to-end price/volume analysis and its serialisable result bundle."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__
from .crosscorr import QccResult, RhoCurve, qcc, rho_dxa
from .detrending import MAX_ORDER, build_scale_grid
from .exceptions import ConfigError, InvariantViolation, SeriesTooShort, UnknownFigure
from .fluctuation import ABSOLUTE, SIGNED, FluctuationFunction, MomentGrid, mfdfa, mfdxa
from .series import DescriptiveStats, RawSeries, ReturnSeries, describe, log_returns, standardize
from .spectra import (
    MIN_CROSSOVER_SCALES,
    Crossover,
    HurstSpectrum,
    RenyiExponent,
    SingularitySpectrum,
    detect_crossover,
    fit_hurst,
    multifractality_degree,
    renyi,
    singularity_spectrum,
)

SIG_DIGITS = 12
SERIES_NAMES = ("price", "volume", "cross")
FIGURES = ("logf_logs", "hurst", "spectrum", "tau", "qcc", "rho")


@dataclass
class AnalysisConfig:
    input: Optional[str] = None
    volume_input: Optional[str] = None
    date_col: str = "date"
    price_col: str = "price"
    volume_col: str = "volume"
    input_kind: str = "levels"
    s_min: int = 10
    n_scales: int = 20
    scale_spacing: str = "log"
    q_min: float = -5.0
    q_max: float = 5.0
    q_step: float = 0.25
    detrend_order: int = 1
    fit_lo: Optional[int] = None
    fit_hi: Optional[int] = None
    weighted_fit: bool = False
    alpha_sig: float = 0.05
    m_max: Optional[int] = None
    qcc_detrend: str = "mean"
    rho_variant: str = ABSOLUTE
    rho_filter: bool = True
    format: str = "json"
    out: Optional[str] = None
    seed: Optional[int] = None
    jobs: int = 1

    def validate(self):
        if self.input_kind not in ("levels", "returns"):
            raise ConfigError(f"input kind must be 'levels' or 'returns', got {self.input_kind!r}")
        if not 0 <= self.detrend_order <= MAX_ORDER:
            raise ConfigError(f"detrend order must be in 0..{MAX_ORDER}, got {self.detrend_order}")
        if self.s_min < max(4, self.detrend_order + 2):
            raise ConfigError(f"s_min must be at least max(4, order + 2), got {self.s_min}")
        if self.n_scales < 2:
            raise ConfigError("n_scales must be at least 2")
        if self.scale_spacing not in ("log", "linear"):
            raise ConfigError(f"scale spacing must be 'log' or 'linear', got {self.scale_spacing!r}")
        if not self.q_step > 0 or not self.q_min < self.q_max or self.q_max < 2:
            raise ConfigError("moment grid needs q_step > 0, q_min < q_max and q_max >= 2")
        if self.fit_lo is not None and self.fit_hi is not None and self.fit_lo >= self.fit_hi:
            raise ConfigError("fit_lo must be below fit_hi")
        if not 0 < self.alpha_sig < 1:
            raise ConfigError(f"significance level must be in (0, 1), got {self.alpha_sig}")
        if self.rho_variant not in (ABSOLUTE, SIGNED):
            raise ConfigError(f"rho variant must be 'absolute' or 'signed', got {self.rho_variant!r}")
        if self.qcc_detrend not in ("none", "mean", "linear"):
            raise ConfigError(f"unknown qcc detrend mode {self.qcc_detrend!r}")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"format must be 'json' or 'csv', got {self.format!r}")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        return self

    def moment_grid(self) -> MomentGrid:
        try:
            return MomentGrid.regular(self.q_min, self.q_max, self.q_step)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def provenance(self) -> dict:
        # Neither the worker count nor the output location changes results;
        # leaving them out keeps outputs byte-identical.
        d = asdict(self)
        d.pop("jobs")
        d.pop("out")
        return d


@dataclass
class SeriesResult:
    name: str
    fluctuation: FluctuationFunction
    hurst: HurstSpectrum
    renyi: RenyiExponent
    spectrum: SingularitySpectrum
    delta_h: float
    delta_alpha: float
    crossover: Optional[Crossover]
    stats: Optional[DescriptiveStats] = None

    def to_dict(self):
        F = self.fluctuation
        d = {
            "kind": F.kind,
            "delta_h": self.delta_h,
            "delta_alpha": self.delta_alpha,
            "h2": self.hurst.at(2.0),
            "fit_range": list(self.hurst.fit_range),
            "hurst": self.hurst.records(),
            "renyi": self.renyi.records(),
            "singularity": self.spectrum.records(),
            "crossover": None if self.crossover is None else asdict(self.crossover),
            "fluctuation": {
                "scales": [int(s) for s in F.scales],
                "q": [float(q) for q in F.q],
                "F": [[float(v) for v in row] for row in F.table],
                "dropped_windows": [int(d) for d in F.dropped],
                "n_windows": [int(n) for n in F.n_windows],
            },
        }
        if self.stats is not None:
            d = {"descriptive": self.stats.to_dict(), **d}
        return d


@dataclass
class ResultBundle:
    provenance: dict
    series: Dict[str, SeriesResult]
    qcc: QccResult
    rho: RhoCurve
    rho_filtered: bool
    warnings: List[str] = field(default_factory=list)

    def to_dict(self):
        scales, values = self.rho.filtered() if self.rho_filtered else (self.rho.scales, self.rho.rho)
        return {
            "provenance": self.provenance,
            "series": {name: self.series[name].to_dict() for name in SERIES_NAMES},
            "qcc": {"alpha_sig": self.qcc.alpha_sig, "records": self.qcc.records()},
            "rho": {
                "variant": self.rho.variant,
                "filtered": self.rho_filtered,
                "records": self.rho.records(),
                "reported": [{"s": int(s), "rho": float(r)} for s, r in zip(scales, values)],
            },
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _fixed(obj):
    """Round floats to a fixed number of significant digits, recursively."""
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if not math.isfinite(v):
            return None
        return float(f"{v:.{SIG_DIGITS}g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _fixed(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fixed(v) for v in obj]
    return obj


def dumps(d) -> str:
    return json.dumps(_fixed(d), indent=2, allow_nan=False) + "\n"


def _returns(values, label, kind, dates=None) -> ReturnSeries:
    if isinstance(values, ReturnSeries):
        return values
    if isinstance(values, RawSeries):
        return log_returns(values)
    if kind == "levels":
        return log_returns(RawSeries(values, timestamps=dates, label=label))
    return ReturnSeries(np.asarray(values, dtype=float), source_label=label)


def _analyse(name, F, config, stats=None) -> SeriesResult:
    hs = fit_hurst(F, (config.fit_lo, config.fit_hi), weighted=config.weighted_fit)
    sp = singularity_spectrum(hs)
    cross = detect_crossover(F, 2.0) if F.scales.size >= MIN_CROSSOVER_SCALES else None
    return SeriesResult(name, F, hs, renyi(hs), sp, multifractality_degree(hs),
                        sp.delta_alpha, cross, stats)


def _check_invariants(bundle: ResultBundle):
    for name, res in bundle.series.items():
        T = res.fluctuation.table
        if not np.all(T > 0):
            raise InvariantViolation(f"{name}: non-positive fluctuation function")
        if np.any(np.diff(T, axis=0) < -1e-9 * T[1:]):
            raise InvariantViolation(f"{name}: F_q(s) decreases in q")
        if np.any((res.hurst.r2 < 0) | (res.hurst.r2 > 1)):
            raise InvariantViolation(f"{name}: R^2 outside [0, 1]")
    if np.any(np.diff(bundle.qcc.q_cc) < 0):
        raise InvariantViolation("Q_cc decreases with lag")
    lo = 0.0 if bundle.rho.variant == ABSOLUTE else -1.0
    if np.any(bundle.rho.rho < lo - 1e-10) or np.any(bundle.rho.rho > 1 + 1e-10):
        raise InvariantViolation("rho outside its bounds")


def analyze(price, volume, config: Optional[AnalysisConfig] = None, dates=None) -> ResultBundle:
    """Run the full pipeline on a price and a volume series.

    ``price`` and ``volume`` are positive levels (or return series when
    ``config.input_kind == "returns"``).
    """
    config = (config or AnalysisConfig()).validate()
    caught = []
    with warnings.catch_warnings(record=True) as records:
        warnings.simplefilter("always")
        rp = _returns(price, "price", config.input_kind, dates)
        rv = _returns(volume, "volume", config.input_kind, dates)
        if len(rp) != len(rv):
            raise ConfigError(f"price and volume have different lengths: {len(rp)} vs {len(rv)}")
        need = 8 * config.s_min
        if len(rp) < need:
            raise SeriesTooShort(f"{len(rp)} returns; analysis needs at least {need} (8 * s_min)")
        stats_p, stats_v = describe(rp), describe(rv)
        zp, zv = standardize(rp), standardize(rv)
        grid = build_scale_grid(len(zp), config.n_scales, config.scale_spacing,
                                config.s_min, config.detrend_order)
        moments = config.moment_grid()
        order, jobs = config.detrend_order, config.jobs
        series = {
            "price": _analyse("price", mfdfa(zp, grid, moments, order, n_jobs=jobs), config, stats_p),
            "volume": _analyse("volume", mfdfa(zv, grid, moments, order, n_jobs=jobs), config, stats_v),
            "cross": _analyse("cross", mfdxa(zp, zv, grid, moments, order, n_jobs=jobs), config),
        }
        q_res = qcc(zp, zv, config.m_max, config.alpha_sig, detrend=config.qcc_detrend)
        rho = rho_dxa(zp, zv, grid, order, config.rho_variant, q_res)
        caught = [str(w.message) for w in records]

    notes = []
    for name in SERIES_NAMES:
        res = series[name]
        notes.extend(res.fluctuation.warnings())
        if res.spectrum.has_negative_dimension:
            notes.append(f"{name}: singularity spectrum has f(alpha) < 0")
        if res.crossover is not None:
            notes.append(f"{name}: crossover in log F_2 near scale {res.crossover.scale}")
    notes.extend(caught)

    provenance = {
        "package": "mfdxa",
        "version": __version__,
        "config": config.provenance(),
        "n_returns": len(zp),
        "scales": list(grid.scales),
        "q": list(moments.q),
        "fit_range": list(series["price"].hurst.fit_range),
        "standardization": "full-sample, ddof=1",
        "normality_test": "jarque-bera",
    }
    bundle = ResultBundle(provenance, series, q_res, rho, config.rho_filter, notes)
    _check_invariants(bundle)
    return bundle


def spectrum_rows(bundle: dict):
    """Per-(series, q) table used for ``--format csv``."""
    header = ["series", "q", "h", "stderr", "r2", "tau", "alpha", "f"]
    rows = []
    for name in SERIES_NAMES:
        s = bundle["series"][name]
        for hq, tq, sq in zip(s["hurst"], s["renyi"], s["singularity"]):
            rows.append([name, hq["q"], hq["h"], hq["stderr"], hq["r2"], tq["tau"], sq["alpha"], sq["f"]])
    return header, rows


def plot_rows(bundle: dict, which: str):
    """Long-format rows for one figure family of a result bundle (as a dict)."""
    if which not in FIGURES:
        raise UnknownFigure(f"unknown figure {which!r}; expected one of {FIGURES}")
    series = bundle["series"]
    if which == "logf_logs":
        rows = []
        for name in SERIES_NAMES:
            fl = series[name]["fluctuation"]
            for q, row in zip(fl["q"], fl["F"]):
                for s, F in zip(fl["scales"], row):
                    rows.append([name, q, math.log(s), math.log(F)])
        return ["series", "q", "log_s", "log_F"], rows
    if which == "hurst":
        return ["series", "q", "h"], [
            [name, r["q"], r["h"]] for name in SERIES_NAMES for r in series[name]["hurst"]
        ]
    if which == "spectrum":
        return ["series", "q", "alpha", "f"], [
            [name, r["q"], r["alpha"], r["f"]] for name in SERIES_NAMES for r in series[name]["singularity"]
        ]
    if which == "tau":
        return ["series", "q", "tau"], [
            [name, r["q"], r["tau"]] for name in SERIES_NAMES for r in series[name]["renyi"]
        ]
    if which == "qcc":
        return ["m", "q_cc", "critical", "significant"], [
            [r["m"], r["q_cc"], r["critical"], r["significant"]] for r in bundle["qcc"]["records"]
        ]
    return ["s", "rho", "significant"], [
        [r["s"], r["rho"], r["significant"]] for r in bundle["rho"]["records"]
    ]


def format_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    return v


def load_bundle(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
