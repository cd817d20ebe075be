"""Input validation shared by the estimators."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import LengthMismatch, TooShort
from .series import ReturnSeries


def check_series(x, name="X", min_length=4):
    """Return ``x`` as a finite 1-D float array.

    Accepts a :class:`ReturnSeries`, a 1-D array or a single-column 2-D array.
    """
    if isinstance(x, ReturnSeries):
        x = x.values
    arr = check_array(x, ensure_2d=False, dtype=np.float64, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must be a single series; got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.size < min_length:
        raise TooShort(f"{name} has {arr.size} observations, need at least {min_length}")
    return arr


def check_batch(X, name="X", min_length=4):
    """Return ``X`` as a 2-D array with one series per row; 1-D input is one row."""
    if isinstance(X, ReturnSeries):
        X = X.values
    arr = check_array(X, ensure_2d=False, dtype=np.float64, input_name=name)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.shape[1] < min_length:
        raise TooShort(f"{name} rows have {arr.shape[1]} observations, need at least {min_length}")
    return arr


def check_pair(x, y, min_length=4):
    xv = check_series(x, "X", min_length)
    yv = check_series(y, "y", min_length)
    if xv.size != yv.size:
        raise LengthMismatch(f"X and y differ in length: {xv.size} vs {yv.size}")
    return xv, yv
