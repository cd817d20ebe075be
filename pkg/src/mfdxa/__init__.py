"""Multifractal detrended (cross-)fluctuation analysis of paired series."""

__version__ = "0.1.0"

from .crosscorr import QccResult, RhoCurve, chi2_critical, cross_corr_function, qcc, rho_dxa
from .detrending import ScaleGrid, WindowPlan, build_scale_grid, fit_local_trend, plan_windows
from .estimators import MFDFA, MFDXA, DetrendedCrossCorrelation
from .fluctuation import (
    FluctuationFunction,
    FluctuationSurface,
    MomentGrid,
    detrended_covariance,
    fluctuation_q,
    mfdfa,
    mfdxa,
)
from .series import RawSeries, ReturnSeries, describe, log_returns, profile, standardize
from .spectra import (
    detect_crossover,
    fit_hurst,
    multifractality_degree,
    renyi,
    singularity_spectrum,
)

__all__ = [
    "MFDFA",
    "MFDXA",
    "DetrendedCrossCorrelation",
    "FluctuationFunction",
    "FluctuationSurface",
    "MomentGrid",
    "QccResult",
    "RawSeries",
    "ReturnSeries",
    "RhoCurve",
    "ScaleGrid",
    "WindowPlan",
    "build_scale_grid",
    "chi2_critical",
    "cross_corr_function",
    "describe",
    "detect_crossover",
    "detrended_covariance",
    "fit_hurst",
    "fit_local_trend",
    "fluctuation_q",
    "log_returns",
    "mfdfa",
    "mfdxa",
    "multifractality_degree",
    "plan_windows",
    "profile",
    "qcc",
    "renyi",
    "rho_dxa",
    "singularity_spectrum",
    "standardize",
]
