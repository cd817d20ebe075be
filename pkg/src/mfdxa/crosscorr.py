"""Lagged cross-correlation test statistic and the DCCA coefficient rho(s)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammainccinv

from .detrending import ScaleGrid, plan_windows
from .exceptions import InvalidLevel, LagOutOfRange, LengthMismatch, ZeroDenominator
from .fluctuation import ABSOLUTE, SIGNED, _as_profile_array, _surface
from .series import Profile, ReturnSeries

DEFAULT_M_MAX = 64
DEFAULT_ALPHA_SIG = 0.05


@dataclass(frozen=True)
class QccResult:
    m: np.ndarray
    q_cc: np.ndarray
    critical: np.ndarray
    significant: np.ndarray
    alpha_sig: float

    @property
    def m_max(self) -> int:
        return int(self.m[-1])

    def significant_at_scale(self, s) -> bool:
        """Significance at lag ``min(s, m_max)``, used to gate rho(s)."""
        return bool(self.significant[min(int(s), self.m_max) - 1])

    def records(self):
        return [
            {"m": int(m), "q_cc": float(q), "critical": float(c), "significant": bool(g)}
            for m, q, c, g in zip(self.m, self.q_cc, self.critical, self.significant)
        ]


@dataclass(frozen=True)
class RhoCurve:
    scales: np.ndarray
    rho: np.ndarray
    variant: str
    significant: Optional[np.ndarray] = None

    def filtered(self):
        """Scales and rho values where the lagged cross-correlation is significant."""
        if self.significant is None:
            return self.scales, self.rho
        return self.scales[self.significant], self.rho[self.significant]

    def records(self):
        sig = self.significant if self.significant is not None else [None] * self.rho.size
        return [
            {"s": int(s), "rho": float(r), "significant": None if g is None else bool(g)}
            for s, r, g in zip(self.scales, self.rho, sig)
        ]


def _vector(x) -> np.ndarray:
    if isinstance(x, (ReturnSeries, Profile)):
        return x.values
    return np.asarray(x, dtype=float).reshape(-1)


def _pair(x, y):
    xv, yv = _vector(x), _vector(y)
    if xv.size != yv.size:
        raise LengthMismatch(f"series differ in length: {xv.size} vs {yv.size}")
    return xv, yv


def _detrend_returns(v, detrend):
    if detrend == "none":
        return v
    if detrend == "mean":
        return v - v.mean()
    if detrend == "linear":
        t = np.arange(v.size, dtype=float)
        t -= t.mean()
        c = v - v.mean()
        return c - t * (np.dot(t, c) / np.dot(t, t))
    raise ValueError(f"unknown detrend mode {detrend!r}; expected 'none', 'mean' or 'linear'")


def cross_corr_function(x, y, i, detrend="none") -> float:
    """Normalised lag-``i`` cross product ``sum_k x[k] y[k-i]``."""
    xv, yv = _pair(x, y)
    N = xv.size
    if not 0 <= int(i) < N:
        raise LagOutOfRange(f"lag {i} outside [0, {N})")
    xv, yv = _detrend_returns(xv, detrend), _detrend_returns(yv, detrend)
    i = int(i)
    norm = np.sqrt(np.dot(xv, xv)) * np.sqrt(np.dot(yv, yv))
    if norm == 0:
        raise ZeroDenominator("cross-correlation of a zero series")
    return float(np.dot(xv[i:], yv[: N - i]) / norm)


def chi2_critical(m, level=DEFAULT_ALPHA_SIG):
    """Upper-``level`` quantile of the chi-squared distribution with ``m`` dof."""
    if not 0.0 < level < 1.0:
        raise InvalidLevel(f"significance level must be in (0, 1), got {level}")
    m_arr = np.asarray(m, dtype=float)
    if np.any(m_arr < 1):
        raise ValueError("degrees of freedom must be at least 1")
    # Q(m/2, x/2) = level  <=>  x is the (1 - level) quantile.
    out = 2.0 * gammainccinv(m_arr / 2.0, level)
    return float(out) if out.ndim == 0 else out


def qcc(x, y, m_max=None, alpha_sig=DEFAULT_ALPHA_SIG, detrend="mean") -> QccResult:
    """Cumulative cross-correlation statistic ``N^2 sum_i X_i^2 / (N - i)`` for lags 1..m_max.

    Each value is compared against the chi-squared critical value with ``m``
    degrees of freedom; exceeding it marks the cross-correlation significant.
    """
    xv, yv = _pair(x, y)
    N = xv.size
    limit = N // 4
    if m_max is None:
        m_max = min(DEFAULT_M_MAX, limit)
    m_max = int(m_max)
    if m_max < 1 or m_max > limit:
        raise LagOutOfRange(f"m_max must be in [1, {limit}] for N={N}, got {m_max}")
    xv, yv = _detrend_returns(xv, detrend), _detrend_returns(yv, detrend)
    norm = np.sqrt(np.dot(xv, xv)) * np.sqrt(np.dot(yv, yv))
    if norm == 0:
        raise ZeroDenominator("cross-correlation of a zero series")
    lags = np.arange(1, m_max + 1)
    X = np.array([np.dot(xv[i:], yv[: N - i]) for i in lags]) / norm
    q = float(N) ** 2 * np.cumsum(X * X / (N - lags))
    crit = chi2_critical(lags, alpha_sig)
    return QccResult(lags, q, crit, q > crit, float(alpha_sig))


def rho_dxa(x, y, grid, order=1, variant=ABSOLUTE, qcc_result: Optional[QccResult] = None) -> RhoCurve:
    """Detrended cross-correlation coefficient at each scale of ``grid``.

    The absolute variant uses products of absolute residuals in the
    numerator and lies in [0, 1]; the signed variant lies in [-1, 1].
    Windows exactly detrended in either series are left out of all three
    means. Passing ``qcc_result`` attaches per-scale significance flags.
    """
    xv, yv = _pair(x, y)
    if variant not in (ABSOLUTE, SIGNED):
        raise ValueError(f"unknown rho variant {variant!r}")
    px = _as_profile_array(x)
    py = _as_profile_array(y)
    scales = tuple(grid.scales) if isinstance(grid, ScaleGrid) else tuple(int(s) for s in grid)
    rho = np.empty(len(scales))
    for j, s in enumerate(scales):
        plan_windows(px.size, s)
        sx = _surface(px, None, s, order, False)
        sy = _surface(py, None, s, order, False)
        sxy = _surface(px, py, s, order, variant == SIGNED)
        keep = sxy.values > 0
        if not np.any(keep):
            raise ZeroDenominator(f"every window at scale {s} is exactly detrended")
        num = sxy.signed_values[keep] if variant == SIGNED else sxy.values[keep]
        fx = np.sqrt(np.mean(sx.values[keep]))
        fy = np.sqrt(np.mean(sy.values[keep]))
        den = fx * fy
        if den == 0:
            raise ZeroDenominator(f"zero single-series fluctuation at scale {s}")
        rho[j] = np.mean(num) / den
    significant = None
    if qcc_result is not None:
        significant = np.array([qcc_result.significant_at_scale(s) for s in scales])
    return RhoCurve(np.asarray(scales, dtype=float), rho, variant, significant)
