"""Power-law fits of F_q(s) and the spectra derived from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .exceptions import InsufficientMoments, InsufficientScales
from .fluctuation import ZERO_EPSILON, FluctuationFunction

MIN_FIT_SCALES = 4
MIN_CROSSOVER_SCALES = 8
# Smallest slope change reported as a crossover, whatever the standard errors.
CROSSOVER_MIN_DIFF = 1e-8


@dataclass(frozen=True)
class HurstSpectrum:
    q: np.ndarray
    h: np.ndarray
    intercept: np.ndarray
    stderr: np.ndarray
    r2: np.ndarray
    fit_range: Tuple[int, int]
    n_scales: int

    def at(self, q: float) -> float:
        idx = np.flatnonzero(np.abs(self.q - q) < ZERO_EPSILON)
        if idx.size == 0:
            raise KeyError(f"q={q} is not on the moment grid")
        return float(self.h[idx[0]])

    def records(self):
        return [
            {"q": float(q), "h": float(h), "intercept": float(b), "stderr": float(e), "r2": float(r)}
            for q, h, b, e, r in zip(self.q, self.h, self.intercept, self.stderr, self.r2)
        ]


@dataclass(frozen=True)
class RenyiExponent:
    q: np.ndarray
    tau: np.ndarray

    def records(self):
        return [{"q": float(q), "tau": float(t)} for q, t in zip(self.q, self.tau)]


@dataclass(frozen=True)
class SingularitySpectrum:
    q: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    h_prime: np.ndarray
    interior: np.ndarray  # boolean mask; endpoints use one-sided derivatives
    delta_alpha: float
    delta_h: float

    @property
    def has_negative_dimension(self) -> bool:
        return bool(np.any(self.f[self.interior] < 0))

    def records(self):
        return [
            {"q": float(q), "alpha": float(a), "f": float(f), "interior": bool(i)}
            for q, a, f, i in zip(self.q, self.alpha, self.f, self.interior)
        ]


@dataclass(frozen=True)
class Crossover:
    q: float
    scale: int
    slope_below: float
    slope_above: float
    stderr_below: float
    stderr_above: float


def _ols(x, y, w=None):
    """Slope, intercept, slope standard error and R^2 of y on x."""
    n = x.size
    if w is None:
        w = np.ones(n)
    w = w / w.sum()
    xm = np.sum(w * x)
    ym = np.sum(w * y, axis=-1, keepdims=True)
    dx = x - xm
    dy = y - ym
    sxx = np.sum(w * dx * dx)
    slope = np.sum(w * dx * dy, axis=-1) / sxx
    intercept = ym[..., 0] - slope * xm
    resid = dy - slope[..., None] * dx
    ssr = np.sum(w * resid * resid, axis=-1)
    sst = np.sum(w * dy * dy, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r2 = np.where(sst > 0, 1.0 - ssr / sst, 1.0)
        stderr = np.sqrt(ssr / (n - 2) / sxx) if n > 2 else np.full_like(slope, np.nan)
    return slope, intercept, stderr, np.clip(r2, 0.0, 1.0), ssr


def fit_hurst(F: FluctuationFunction, fit_range=None, weighted=False) -> HurstSpectrum:
    """Least-squares slope of ``log F_q(s)`` against ``log s`` for every q.

    ``fit_range=(s_lo, s_hi)`` restricts the scales used (inclusive);
    ``weighted=True`` weights each scale by its number of windows.
    """
    scales = F.scales
    mask = np.ones(scales.size, dtype=bool)
    if fit_range is not None:
        lo, hi = fit_range
        if lo is not None:
            mask &= scales >= lo
        if hi is not None:
            mask &= scales <= hi
    if np.count_nonzero(mask) < MIN_FIT_SCALES:
        raise InsufficientScales(
            f"{np.count_nonzero(mask)} scales in fit range, need at least {MIN_FIT_SCALES}"
        )
    x = np.log(scales[mask])
    y = np.log(F.table[:, mask])
    # Weighted fits use the unscaled ssr for stderr; fine as a relative diagnostic.
    w = F.n_windows[mask].astype(float) if weighted else None
    slope, intercept, stderr, r2, _ = _ols(x, y, w)
    used = scales[mask]
    return HurstSpectrum(
        q=F.q.copy(),
        h=slope,
        intercept=intercept,
        stderr=stderr,
        r2=r2,
        fit_range=(int(used[0]), int(used[-1])),
        n_scales=int(used.size),
    )


def multifractality_degree(hs: HurstSpectrum) -> float:
    if hs.h.size < 2:
        raise InsufficientMoments("need at least 2 moments for a multifractality degree")
    return float(np.max(hs.h) - np.min(hs.h))


def renyi(hs: HurstSpectrum) -> RenyiExponent:
    return RenyiExponent(q=hs.q.copy(), tau=hs.q * hs.h - 1.0)


def singularity_spectrum(hs: HurstSpectrum) -> SingularitySpectrum:
    """Singularity strengths and dimensions from h(q) by finite differences.

    The derivative is second-order central in the interior and one-sided at
    both ends; the two end points are reported but left out of the width.
    """
    q, h = hs.q, hs.h
    if q.size < 3:
        raise InsufficientMoments("need at least 3 moments for the singularity spectrum")
    h_prime = np.gradient(h, q, edge_order=1)
    alpha = h + q * h_prime
    f = q * (alpha - h) + 1.0
    interior = np.zeros(q.size, dtype=bool)
    interior[1:-1] = True
    a_in = alpha[interior]
    return SingularitySpectrum(
        q=q.copy(),
        alpha=alpha,
        f=f,
        h_prime=h_prime,
        interior=interior,
        delta_alpha=float(np.max(a_in) - np.min(a_in)),
        delta_h=multifractality_degree(hs),
    )


def detect_crossover(F: FluctuationFunction, q=2.0, min_points=3) -> Optional[Crossover]:
    """Best two-segment log-log split of ``F_q(s)``, or None if the slopes agree.

    Splits are scanned over every scale with at least ``min_points`` scales on
    each side; the reported scale is the first scale of the upper segment.
    """
    n = F.scales.size
    if n < MIN_CROSSOVER_SCALES:
        raise InsufficientScales(f"crossover detection needs {MIN_CROSSOVER_SCALES} scales, got {n}")
    x = np.log(F.scales)
    y = np.log(F.at(q))
    best = None
    for k in range(min_points, n - min_points + 1):
        lo = _ols(x[:k], y[:k])
        hi = _ols(x[k:], y[k:])
        total = lo[4] + hi[4]
        if best is None or total < best[0]:
            best = (total, k, lo, hi)
    _, k, lo, hi = best
    diff = abs(hi[0] - lo[0])
    pooled = np.sqrt(lo[2] ** 2 + hi[2] ** 2)
    if not (diff > 2.0 * pooled and diff > CROSSOVER_MIN_DIFF):
        return None
    return Crossover(
        q=float(q),
        scale=int(F.scales[k]),
        slope_below=float(lo[0]),
        slope_above=float(hi[0]),
        stderr_below=float(lo[2]),
        stderr_above=float(hi[2]),
    )


def persistence_label(h2: float) -> str:
    if h2 < 0.5:
        return "anti-persistent"
    if h2 > 0.5:
        return "persistent"
    return "random walk"


def market_label(h2: float) -> Optional[str]:
    """Labelling helper on h(2): developed-like below 0.5, emerging-like in (0.5, 1)."""
    if 0.0 < h2 < 0.5:
        return "developed-like"
    if 0.5 < h2 < 1.0:
        return "emerging-like"
    return None
