"""scikit-learn style estimators wrapping the functional core.

All three follow the usual conventions: hyper-parameters are stored
unchanged by ``__init__``, ``fit`` returns ``self`` and results live in
trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import crosscorr, spectra
from .detrending import ScaleGrid, build_scale_grid
from .fluctuation import ABSOLUTE, MomentGrid, mfdfa, mfdxa
from .series import standardize
from .validation import check_batch, check_pair, check_series


class _ScalingParams:
    """Grid construction shared by the estimators below."""

    def _scale_grid(self, N):
        if self.scales is not None:
            return ScaleGrid(tuple(sorted(int(s) for s in self.scales)), N, "explicit")
        return build_scale_grid(N, self.n_scales, self.spacing, self.s_min, self.order)

    def _grids(self, N):
        if self.q is None:
            moments = MomentGrid.regular()
        else:
            moments = MomentGrid(tuple(np.sort(np.asarray(self.q, dtype=float))))
        return self._scale_grid(N), moments

    def _prepare(self, x):
        return standardize(x).values if self.standardize else x


def _spectra_attrs(est, F, fit_range, weighted):
    hs = spectra.fit_hurst(F, fit_range, weighted=weighted)
    est.fluctuation_ = F
    est.hurst_ = hs
    est.h_ = hs.h
    est.renyi_ = spectra.renyi(hs)
    est.tau_ = est.renyi_.tau
    # Short moment grids still give h(q); the derived summaries need more points.
    est.delta_h_ = spectra.multifractality_degree(hs) if hs.q.size >= 2 else None
    est.spectrum_ = spectra.singularity_spectrum(hs) if hs.q.size >= 3 else None
    est.delta_alpha_ = None if est.spectrum_ is None else est.spectrum_.delta_alpha
    est.crossover_ = (
        spectra.detect_crossover(F, 2.0) if F.scales.size >= spectra.MIN_CROSSOVER_SCALES else None
    )


class MFDFA(_ScalingParams, TransformerMixin, BaseEstimator):
    """Multifractal detrended fluctuation analysis of a single return series.

    Parameters
    ----------
    scales : sequence of int, optional
        Explicit window lengths. When omitted a grid of ``n_scales``
        log-spaced (or linear) scales from ``s_min`` to ``N // 4`` is built.
    n_scales, s_min, spacing
        Grid construction parameters.
    q : sequence of float, optional
        Moment grid; must contain 2. Defaults to -5..5 in steps of 0.25.
    order : int
        Degree of the local polynomial trend (0-3).
    fit_range : (int, int), optional
        Inclusive scale range used for the power-law fits.
    standardize : bool
        Standardize the input before building the profile.
    weighted : bool
        Weight the log-log fit by number of windows per scale.
    n_jobs : int
        Worker threads across scales; results do not depend on it.

    Attributes
    ----------
    h_ : ndarray of shape (n_q,)
        Generalized Hurst exponents of the fitted series.
    delta_h_, delta_alpha_ : float or None
        Spread of h(q) and width of the singularity spectrum; None when the
        moment grid has too few points (2 and 3 respectively).
    fluctuation_, hurst_, renyi_, spectrum_, crossover_
        Full result objects.
    """

    def __init__(self, scales=None, n_scales=20, s_min=10, spacing="log", q=None,
                 order=1, fit_range=None, standardize=True, weighted=False, n_jobs=1):
        self.scales = scales
        self.n_scales = n_scales
        self.s_min = s_min
        self.spacing = spacing
        self.q = q
        self.order = order
        self.fit_range = fit_range
        self.standardize = standardize
        self.weighted = weighted
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        x = self._prepare(check_series(X))
        grid, moments = self._grids(x.size)
        self.scales_ = np.asarray(grid.scales)
        self.q_ = moments.as_array()
        F = mfdfa(x, grid, moments, self.order, n_jobs=self.n_jobs)
        _spectra_attrs(self, F, self.fit_range, self.weighted)
        return self

    def transform(self, X):
        """Generalized Hurst exponents for each row of ``X`` (one series per row)."""
        check_is_fitted(self, "q_")
        rows = check_batch(X)
        grid, moments = self._grids(rows.shape[1])
        out = np.empty((rows.shape[0], len(moments)))
        for i, row in enumerate(rows):
            F = mfdfa(self._prepare(row), grid, moments, self.order, n_jobs=self.n_jobs)
            out[i] = spectra.fit_hurst(F, self.fit_range, weighted=self.weighted).h
        return out

    def fit_transform(self, X, y=None, **fit_params):
        rows = check_batch(X)
        self.fit(rows[0])
        return self.transform(rows)


class MFDXA(_ScalingParams, BaseEstimator):
    """Multifractal detrended cross-correlation analysis of a pair of series.

    Takes the same parameters as :class:`MFDFA` plus ``covariance``
    (``"absolute"`` or ``"signed"``). ``fit(X, y)`` analyses the pair; the
    fitted attributes mirror :class:`MFDFA` (``h_``, ``delta_h_``,
    ``tau_``, ``spectrum_``...) and describe the cross exponents.
    """

    def __init__(self, scales=None, n_scales=20, s_min=10, spacing="log", q=None,
                 order=1, fit_range=None, standardize=True, weighted=False,
                 covariance=ABSOLUTE, n_jobs=1):
        self.scales = scales
        self.n_scales = n_scales
        self.s_min = s_min
        self.spacing = spacing
        self.q = q
        self.order = order
        self.fit_range = fit_range
        self.standardize = standardize
        self.weighted = weighted
        self.covariance = covariance
        self.n_jobs = n_jobs

    def fit(self, X, y):
        x, yy = check_pair(X, y)
        x, yy = self._prepare(x), self._prepare(yy)
        grid, moments = self._grids(x.size)
        self.scales_ = np.asarray(grid.scales)
        self.q_ = moments.as_array()
        F = mfdxa(x, yy, grid, moments, self.order, covariance=self.covariance, n_jobs=self.n_jobs)
        _spectra_attrs(self, F, self.fit_range, self.weighted)
        return self


class DetrendedCrossCorrelation(_ScalingParams, BaseEstimator):
    """Scale-dependent DCCA coefficient with a lagged significance test.

    ``fit(X, y)`` computes ``qcc_`` (a :class:`~mfdxa.crosscorr.QccResult`)
    and ``rho_`` (a :class:`~mfdxa.crosscorr.RhoCurve` whose ``significant``
    flags come from ``qcc_``).
    """

    def __init__(self, scales=None, n_scales=20, s_min=10, spacing="log", order=1,
                 variant=ABSOLUTE, m_max=None, alpha_sig=0.05, standardize=True,
                 qcc_detrend="mean"):
        self.scales = scales
        self.n_scales = n_scales
        self.s_min = s_min
        self.spacing = spacing
        self.order = order
        self.variant = variant
        self.m_max = m_max
        self.alpha_sig = alpha_sig
        self.standardize = standardize
        self.qcc_detrend = qcc_detrend

    def fit(self, X, y):
        x, yy = check_pair(X, y)
        x, yy = self._prepare(x), self._prepare(yy)
        grid = self._scale_grid(x.size)
        self.scales_ = np.asarray(grid.scales)
        self.qcc_ = crosscorr.qcc(x, yy, self.m_max, self.alpha_sig, detrend=self.qcc_detrend)
        self.rho_ = crosscorr.rho_dxa(x, yy, grid, self.order, self.variant, self.qcc_)
        return self
