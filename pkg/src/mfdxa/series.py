"""Raw series ingestion, log returns, standardization, profiles and moments."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .exceptions import (
    NonMonotonicTimestamps,
    NonPositiveValue,
    TooShort,
    ZeroVariance,
)

# Smallest series the detrending machinery can do anything with.
MIN_PROFILE_LENGTH = 4
MIN_DESCRIBE_LENGTH = 8


def _as_float_vector(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RawSeries:
    """Positive observations (prices or volumes) on increasing dates."""

    values: np.ndarray
    timestamps: Optional[tuple] = None
    label: str = "series"

    def __post_init__(self):
        values = _as_float_vector(self.values)
        object.__setattr__(self, "values", values)
        if values.size < 2:
            raise TooShort(f"{self.label}: need at least 2 observations, got {values.size}")
        bad = np.flatnonzero(~(values > 0))
        if bad.size:
            i = int(bad[0])
            raise NonPositiveValue(
                f"{self.label}: value {values[i]!r} at position {i} is not strictly positive"
            )
        if self.timestamps is not None:
            ts = tuple(self.timestamps)
            if len(ts) != values.size:
                raise ValueError("timestamps and values differ in length")
            for i in range(1, len(ts)):
                if not ts[i] > ts[i - 1]:
                    raise NonMonotonicTimestamps(
                        f"{self.label}: timestamp {ts[i]} at position {i} does not follow {ts[i - 1]}"
                    )
            object.__setattr__(self, "timestamps", ts)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class ReturnSeries:
    values: np.ndarray
    standardized: bool = False
    source_label: str = "series"

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_vector(self.values))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class Profile:
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _as_float_vector(self.values))

    @property
    def N(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class DescriptiveStats:
    n: int
    mean: float
    std: float
    skewness: float
    excess_kurtosis: float
    normality_statistic: float
    normality_p: float
    normality_test: str = field(default="jarque-bera")

    def to_dict(self):
        return {
            "n": self.n,
            "mean": self.mean,
            "std": self.std,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
            "normality_test": self.normality_test,
            "normality_statistic": self.normality_statistic,
            "normality_p": self.normality_p,
        }


def _values(r) -> np.ndarray:
    if isinstance(r, (ReturnSeries, RawSeries, Profile)):
        return r.values
    return np.asarray(r, dtype=float).reshape(-1)


def log_returns(raw) -> ReturnSeries:
    """Logarithmic changes ``ln v[t] - ln v[t-1]`` of a positive series.

    Accepts a :class:`RawSeries` or anything array-like, which is validated
    the same way.
    """
    if not isinstance(raw, RawSeries):
        raw = RawSeries(raw)
    return ReturnSeries(np.diff(np.log(raw.values)), standardized=False,
                        source_label=raw.label)


def standardize(r) -> ReturnSeries:
    """Demean and divide by the sample (ddof=1) standard deviation."""
    x = _values(r)
    label = r.source_label if isinstance(r, ReturnSeries) else "series"
    if x.size < 2:
        raise TooShort(f"need at least 2 returns to standardize, got {x.size}")
    centered = x - x.mean()
    sd = np.sqrt(np.sum(centered * centered) / (x.size - 1))
    # Relative cutoff so rounding noise on a constant input is not mistaken for variance.
    if not sd > 1e-14 * max(1.0, float(np.max(np.abs(x)))):
        raise ZeroVariance(f"{label}: series has zero variance")
    z = centered / sd
    # One polishing pass removes the O(eps) residual mean/scale left by the first one.
    z = z - z.mean()
    z = z / np.sqrt(np.sum(z * z) / (z.size - 1))
    return ReturnSeries(z, standardized=True, source_label=label)


def profile(r) -> Profile:
    """Cumulative sum of the demeaned increments."""
    x = _values(r)
    if x.size < MIN_PROFILE_LENGTH:
        raise TooShort(f"profile needs at least {MIN_PROFILE_LENGTH} points, got {x.size}")
    return Profile(np.cumsum(x - x.mean()))


def describe(r) -> DescriptiveStats:
    """Sample moments plus a Jarque-Bera normality test."""
    x = _values(r)
    if x.size < MIN_DESCRIBE_LENGTH:
        raise TooShort(f"describe needs at least {MIN_DESCRIBE_LENGTH} points, got {x.size}")
    jb = stats.jarque_bera(x)
    return DescriptiveStats(
        n=int(x.size),
        mean=float(np.mean(x)),
        std=float(np.std(x, ddof=1)),
        skewness=float(stats.skew(x, bias=False)),
        excess_kurtosis=float(stats.kurtosis(x, fisher=True, bias=False)),
        normality_statistic=float(jb.statistic),
        normality_p=float(np.clip(jb.pvalue, 0.0, 1.0)),
    )


def levels_from_returns(r: Sequence[float], start: float = 1.0) -> np.ndarray:
    """Inverse of :func:`log_returns`: ``start * exp(cumsum(r))`` with ``start`` prepended."""
    x = _values(r)
    return start * np.exp(np.concatenate([[0.0], np.cumsum(x)]))


def parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())
