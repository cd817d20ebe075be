"""Scale grids, forward/backward window plans and local polynomial detrending."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DegenerateGrid, ScaleOutOfRange, SeriesTooShort, UnderDetermined

MIN_SCALE = 4
MAX_ORDER = 3
# The largest admissible scale leaves at least this many segments per pass.
MIN_SEGMENTS = 4

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class ScaleGrid:
    scales: Tuple[int, ...]
    N: int
    spacing: str = "log"

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(int(s) for s in self.scales))

    def __len__(self):
        return len(self.scales)

    def __iter__(self):
        return iter(self.scales)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.scales, dtype=float)


@dataclass(frozen=True)
class WindowPlan:
    """Segments of length ``s``; start indices are 0-based."""

    N: int
    s: int
    segments: Tuple[Tuple[int, str], ...]

    @property
    def n_segments(self) -> int:
        return self.N // self.s

    @property
    def count(self) -> int:
        return len(self.segments)

    def indices(self, k: int) -> np.ndarray:
        start, _ = self.segments[k]
        return np.arange(start, start + self.s)


@dataclass(frozen=True)
class LocalFit:
    coefficients: np.ndarray
    residuals: np.ndarray


def max_scale(N: int) -> int:
    return N // MIN_SEGMENTS


def build_scale_grid(N, n_scales=20, spacing="log", s_min=10, detrend_order=1) -> ScaleGrid:
    """Integer scales between ``s_min`` and ``N // 4``.

    Log spacing is the default; rounding can merge neighbours, so the grid
    may hold fewer than ``n_scales`` entries.
    """
    N = int(N)
    s_min = int(s_min)
    if detrend_order < 0 or detrend_order > MAX_ORDER:
        raise ValueError(f"detrend_order must be in 0..{MAX_ORDER}, got {detrend_order}")
    if n_scales < 2:
        raise DegenerateGrid(f"n_scales must be at least 2, got {n_scales}")
    s_min = max(s_min, MIN_SCALE, detrend_order + 2)
    if N < MIN_SEGMENTS * s_min:
        raise SeriesTooShort(
            f"series of length {N} is shorter than {MIN_SEGMENTS} windows of the smallest scale {s_min}"
        )
    s_max = max_scale(N)
    if spacing == "log":
        raw = np.geomspace(s_min, s_max, int(n_scales))
    elif spacing == "linear":
        raw = np.linspace(s_min, s_max, int(n_scales))
    else:
        raise ValueError(f"unknown spacing {spacing!r}; expected 'log' or 'linear'")
    scales = np.unique(np.clip(np.rint(raw).astype(int), s_min, s_max))
    if scales.size < 2:
        raise DegenerateGrid(
            f"only {scales.size} distinct scale(s) fit between {s_min} and {s_max}"
        )
    return ScaleGrid(tuple(int(s) for s in scales), N, spacing)


def plan_windows(N, s, min_segments=MIN_SEGMENTS) -> WindowPlan:
    """Forward windows from the start, then backward windows from the end.

    Backward window ``k`` (0-based) covers ``[N - (k+1)s, N - ks)``. Scales
    must leave ``min_segments`` windows per pass.
    """
    N, s = int(N), int(s)
    s_max = N // int(min_segments)
    if s < MIN_SCALE or s > s_max:
        raise ScaleOutOfRange(f"scale {s} outside [{MIN_SCALE}, {s_max}] for N={N}")
    ns = N // s
    forward = tuple((k * s, FORWARD) for k in range(ns))
    backward = tuple((N - (k + 1) * s, BACKWARD) for k in range(ns))
    return WindowPlan(N, s, forward + backward)


def segment_matrix(values: np.ndarray, s: int) -> np.ndarray:
    """Stack all ``2 * (N // s)`` windows of a plan into an array of rows.

    Row order matches :func:`plan_windows`.
    """
    N = values.size
    ns = N // s
    forward = values[: ns * s].reshape(ns, s)
    backward = values[N - ns * s:].reshape(ns, s)[::-1]
    return np.concatenate([forward, backward], axis=0)


def _centered_design(s: int, order: int) -> np.ndarray:
    t = np.arange(1, s + 1, dtype=float) - (s + 1) / 2.0
    return np.vander(t, order + 1, increasing=True)


def detrend_rows(windows: np.ndarray, order: int) -> np.ndarray:
    """Least-squares polynomial residuals for every row of ``windows``."""
    s = windows.shape[1]
    if s < order + 2:
        raise UnderDetermined(f"window of length {s} cannot over-determine a degree-{order} fit")
    V = _centered_design(s, order)
    coef = np.linalg.solve(V.T @ V, (windows @ V).T)
    return windows - (V @ coef).T


def fit_local_trend(window, order=1) -> LocalFit:
    """Fit a degree-``order`` polynomial on abscissa ``1..s`` centred at ``(s+1)/2``.

    Coefficients are returned in increasing-power order of the centred
    abscissa.
    """
    w = np.asarray(window, dtype=float).reshape(-1)
    s = w.size
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
    if s < order + 2:
        raise UnderDetermined(f"window of length {s} cannot over-determine a degree-{order} fit")
    V = _centered_design(s, order)
    coef = np.linalg.solve(V.T @ V, V.T @ w)
    return LocalFit(coefficients=coef, residuals=w - V @ coef)
