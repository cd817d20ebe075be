"""Detrended (co)variance per window and q-order fluctuation functions.

The single-series case (MF-DFA) is the paired computation (MF-DXA) with
both profiles equal, so the two share one kernel and agree bit for bit.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .detrending import ScaleGrid, WindowPlan, detrend_rows, plan_windows, segment_matrix
from .exceptions import EmptySurface, LengthMismatch, NonPositiveVariance
from .series import Profile, ReturnSeries, profile

ZERO_EPSILON = 1e-9
# Windows whose residual is this small relative to the window magnitude are
# treated as exactly detrended.
DEGENERATE_RTOL = 1e-10
# Fraction of dropped windows above which a scale is flagged unreliable.
UNRELIABLE_FRACTION = 0.10

ABSOLUTE = "absolute"
SIGNED = "signed"
DFA_SINGLE = "dfa_single"
DXA_PAIR = "dxa_pair"


@dataclass(frozen=True)
class MomentGrid:
    q: Tuple[float, ...]
    zero_epsilon: float = ZERO_EPSILON

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        if len(q) == 0:
            raise ValueError("moment grid is empty")
        if any(b <= a for a, b in zip(q, q[1:])):
            raise ValueError("moment grid must be strictly increasing")
        if not any(abs(v - 2.0) < self.zero_epsilon for v in q):
            raise ValueError("moment grid must contain q = 2")
        object.__setattr__(self, "q", q)

    @classmethod
    def regular(cls, q_min=-5.0, q_max=5.0, step=0.25):
        """Evenly spaced grid; ``q_min``, ``q_max`` and 0 and 2 land on it when commensurate."""
        if step <= 0:
            raise ValueError("q step must be positive")
        if q_max < 2.0:
            raise ValueError("q_max must be at least 2")
        n = int(round((q_max - q_min) / step))
        q = q_min + step * np.arange(n + 1)
        q = np.round(q, 12)
        q = np.union1d(q, [2.0])
        return cls(tuple(float(v) for v in q))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.q, dtype=float)

    def __len__(self):
        return len(self.q)


@dataclass(frozen=True)
class FluctuationSurface:
    """Per-window detrended covariances ``F^2(s, nu)`` at one scale.

    ``values`` has ``2 * (N // s)`` entries in forward-then-backward order;
    exactly detrended windows are stored as 0 and excluded from moments.
    """

    s: int
    values: np.ndarray
    signed_values: Optional[np.ndarray] = None

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def retained(self) -> np.ndarray:
        return self.values[self.values > 0]

    @property
    def dropped(self) -> int:
        return int(np.count_nonzero(self.values <= 0))

    @property
    def unreliable(self) -> bool:
        return self.dropped > UNRELIABLE_FRACTION * self.count


@dataclass(frozen=True)
class FluctuationFunction:
    q: np.ndarray
    scales: np.ndarray
    table: np.ndarray  # shape (n_q, n_scales)
    kind: str
    order: int
    dropped: np.ndarray
    n_windows: np.ndarray
    covariance: str = ABSOLUTE
    surfaces: Tuple[FluctuationSurface, ...] = field(default=(), repr=False)

    @property
    def unreliable(self) -> np.ndarray:
        return self.dropped > UNRELIABLE_FRACTION * self.n_windows

    def at(self, q: float) -> np.ndarray:
        """Row of the table for moment ``q``."""
        idx = np.flatnonzero(np.abs(self.q - q) < ZERO_EPSILON)
        if idx.size == 0:
            raise KeyError(f"q={q} is not on the moment grid")
        return self.table[idx[0]]

    def warnings(self):
        out = []
        for s, d, n in zip(self.scales, self.dropped, self.n_windows):
            if d:
                level = "unreliable" if d > UNRELIABLE_FRACTION * n else "dropped"
                out.append(f"{self.kind}: scale {int(s)} {level}: {int(d)} of {int(n)} windows exactly detrended")
        return out


def _degenerate(windows: np.ndarray, resid: np.ndarray) -> np.ndarray:
    size = np.max(np.abs(windows), axis=1)
    return np.max(np.abs(resid), axis=1) <= DEGENERATE_RTOL * size


def _surface(x: np.ndarray, y: Optional[np.ndarray], s: int, order: int,
             keep_signed: bool) -> FluctuationSurface:
    wx = segment_matrix(x, s)
    rx = detrend_rows(wx, order)
    bad = _degenerate(wx, rx)
    if y is None:
        ry = rx
    else:
        wy = segment_matrix(y, s)
        ry = detrend_rows(wy, order)
        bad = bad | _degenerate(wy, ry)
    f2 = np.sum(np.abs(rx) * np.abs(ry), axis=1) / s
    f2[bad] = 0.0
    signed = None
    if keep_signed:
        signed = np.sum(rx * ry, axis=1) / s
        signed[bad] = 0.0
    return FluctuationSurface(int(s), f2, signed)


def _profile_values(p) -> np.ndarray:
    if isinstance(p, Profile):
        return p.values
    return np.asarray(p, dtype=float).reshape(-1)


def detrended_covariance(px, py, plan, order=1, keep_signed=False) -> FluctuationSurface:
    """Mean product of absolute detrended residuals in every window of ``plan``.

    ``plan`` may be a :class:`WindowPlan` or a bare scale; a bare scale only
    has to fit in the series once.
    """
    x = _profile_values(px)
    y = _profile_values(py)
    if x.size != y.size:
        raise LengthMismatch(f"profiles differ in length: {x.size} vs {y.size}")
    if isinstance(plan, WindowPlan):
        if plan.N != x.size:
            raise LengthMismatch(f"plan is for N={plan.N}, profiles have {x.size} points")
        s = plan.s
    else:
        s = plan_windows(x.size, plan, min_segments=1).s
    return _surface(x, None if py is px else y, s, order, keep_signed)


def fluctuation_q(surface, q, zero_epsilon=ZERO_EPSILON) -> float:
    """Generalised mean of ``sqrt(F^2)`` with exponent ``q`` (geometric mean at q=0)."""
    values = surface.values if isinstance(surface, FluctuationSurface) else np.asarray(surface, float)
    if values.size == 0:
        raise EmptySurface("fluctuation surface has no windows")
    if np.any(values < 0):
        raise ValueError("detrended covariances must be non-negative")
    kept = values[values > 0]
    if kept.size == 0:
        if q > zero_epsilon:
            return 0.0
        raise NonPositiveVariance("every window is exactly detrended")
    return float(np.exp(_log_fq(np.log(kept), q, zero_epsilon)))


def _log_fq(log_f2: np.ndarray, q: float, zero_epsilon: float) -> float:
    if abs(q) < zero_epsilon:
        return float(np.mean(log_f2) / 2.0)
    a = (q / 2.0) * log_f2
    return float((logsumexp(a) - np.log(a.size)) / q)


def _as_profile_array(series) -> np.ndarray:
    if isinstance(series, Profile):
        return series.values
    return profile(series).values


def _fluctuation_function(x, y, grid, moments, order, kind, covariance, n_jobs):
    scales = tuple(grid.scales) if isinstance(grid, ScaleGrid) else tuple(int(s) for s in grid)
    q = moments.as_array() if isinstance(moments, MomentGrid) else np.asarray(moments, float)
    eps = moments.zero_epsilon if isinstance(moments, MomentGrid) else ZERO_EPSILON
    for s in scales:
        plan_windows(x.size, s)
    keep_signed = covariance == SIGNED

    def work(s):
        return _surface(x, y, s, order, keep_signed)

    if n_jobs is not None and n_jobs > 1 and len(scales) > 1:
        # Each scale is computed independently; map() preserves grid order.
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            surfaces = tuple(pool.map(work, scales))
    else:
        surfaces = tuple(work(s) for s in scales)

    if covariance == SIGNED:
        surfaces = tuple(
            FluctuationSurface(sf.s, np.abs(sf.signed_values), sf.signed_values) for sf in surfaces
        )

    table = np.empty((q.size, len(scales)))
    for j, sf in enumerate(surfaces):
        kept = sf.retained
        if kept.size == 0:
            raise NonPositiveVariance(f"every window at scale {sf.s} is exactly detrended")
        log_f2 = np.log(kept)
        for i, qi in enumerate(q):
            table[i, j] = np.exp(_log_fq(log_f2, qi, eps))
    return FluctuationFunction(
        q=q,
        scales=np.asarray(scales, dtype=float),
        table=table,
        kind=kind,
        order=int(order),
        dropped=np.array([sf.dropped for sf in surfaces]),
        n_windows=np.array([sf.count for sf in surfaces]),
        covariance=covariance,
        surfaces=surfaces,
    )


def mfdfa(series, grid, moments, order=1, n_jobs=1) -> FluctuationFunction:
    """q-order fluctuation function of one return series (or of a ready profile)."""
    x = _as_profile_array(series)
    return _fluctuation_function(x, None, grid, moments, order, DFA_SINGLE, ABSOLUTE, n_jobs)


def mfdxa(x, y, grid, moments, order=1, covariance=ABSOLUTE, n_jobs=1) -> FluctuationFunction:
    """q-order cross-fluctuation function of two equal-length return series.

    ``covariance="signed"`` uses ``|sum(rx * ry)| / s`` per window instead of
    ``sum(|rx| |ry|) / s``.
    """
    xv = x.values if isinstance(x, (ReturnSeries, Profile)) else np.asarray(x, float).reshape(-1)
    yv = y.values if isinstance(y, (ReturnSeries, Profile)) else np.asarray(y, float).reshape(-1)
    if xv.size != yv.size:
        raise LengthMismatch(f"series differ in length: {xv.size} vs {yv.size}")
    if covariance not in (ABSOLUTE, SIGNED):
        raise ValueError(f"unknown covariance variant {covariance!r}")
    px = _as_profile_array(x)
    py = _as_profile_array(y)
    same = np.array_equal(px, py)
    return _fluctuation_function(px, None if same else py, grid, moments, order,
                                 DXA_PAIR, covariance, n_jobs)
