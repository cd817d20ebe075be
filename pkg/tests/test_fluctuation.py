import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mfdxa.detrending import build_scale_grid, plan_windows
from mfdxa.exceptions import EmptySurface, LengthMismatch, NonPositiveVariance
from mfdxa.fluctuation import (
    FluctuationSurface,
    MomentGrid,
    detrended_covariance,
    fluctuation_q,
    mfdfa,
    mfdxa,
)
from mfdxa.series import profile, standardize
from mfdxa.spectra import fit_hurst
from mfdxa.synth import GeneratorSpec, gen_farima_pair, gen_fgn, gen_pmodel, gen_white_noise

from oracles import f2_loop, fq_formula, profile_loop

PAIR8_X = [0.3, -1.2, 0.8, 2.1, -0.4, 0.9, -1.7, 0.5]
PAIR8_Y = [1.1, 0.2, -0.6, 0.4, 1.5, -2.0, 0.3, 0.7]


class TestMomentGrid:
    def test_default(self):
        g = MomentGrid.regular()
        assert len(g) == 41
        assert 0.0 in g.q and 2.0 in g.q and g.q[0] == -5.0 and g.q[-1] == 5.0

    def test_requires_q2(self):
        with pytest.raises(ValueError):
            MomentGrid((-1.0, 0.0, 1.0))

    def test_increasing(self):
        with pytest.raises(ValueError):
            MomentGrid((2.0, 1.0))


class TestDetrendedCovariance:
    def test_self_pair_is_variance(self):
        p = profile(np.random.default_rng(0).normal(size=200))
        sxx = detrended_covariance(p, p, plan_windows(200, 20))
        resid_var = f2_loop(list(p.values), list(p.values), 20)
        np.testing.assert_allclose(sxx.values, resid_var, rtol=1e-10)

    def test_linear_windows_are_zero(self):
        line = np.arange(16.0) * 0.7 + 2
        sf = detrended_covariance(line, 3 * line, 4)
        assert np.all(sf.values == 0)
        assert sf.dropped == sf.count == 8 and sf.unreliable

    def test_eight_point_oracle(self):
        X, Y = profile_loop(PAIR8_X), profile_loop(PAIR8_Y)
        sf = detrended_covariance(np.array(X), np.array(Y), plan_windows(8, 4, min_segments=1))
        assert sf.count == 4
        np.testing.assert_allclose(sf.values, f2_loop(X, Y, 4), rtol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            detrended_covariance(np.zeros(16), np.zeros(20), 4)

    @settings(max_examples=40, deadline=None)
    @given(arrays(float, st.integers(16, 200), elements=st.floats(-10, 10)), st.data())
    def test_non_negative_and_count(self, x, data):
        s = data.draw(st.integers(4, x.size // 4))
        y = np.roll(x, 1) + 0.5
        sf = detrended_covariance(x, y, s)
        assert sf.count == 2 * (x.size // s)
        assert np.all(sf.values >= 0)


class TestFluctuationQ:
    @pytest.mark.parametrize("q", [-5, -2, 0, 0.5, 2, 5])
    def test_constant(self, q):
        assert fluctuation_q(FluctuationSurface(10, np.full(6, 3.0)), q) == pytest.approx(np.sqrt(3.0), rel=1e-14)

    def test_q2(self):
        assert fluctuation_q(np.array([1.0, 4.0]), 2) == pytest.approx(np.sqrt(2.5), rel=1e-14)

    def test_q0(self):
        assert fluctuation_q(np.array([1.0, 4.0]), 0) == pytest.approx(np.sqrt(2.0), rel=1e-14)
        assert fq_formula([1.0, 4.0], 0) == pytest.approx(np.sqrt(2.0), rel=1e-14)

    def test_zero_branch_threshold(self):
        f2 = np.array([1.0, 4.0, 9.0])
        assert fluctuation_q(f2, 1e-12) == fluctuation_q(f2, 0.0)

    def test_empty(self):
        with pytest.raises(EmptySurface):
            fluctuation_q(np.array([]), 2)

    def test_all_zero(self):
        with pytest.raises(NonPositiveVariance):
            fluctuation_q(np.zeros(4), -1)

    def test_zero_windows_dropped(self):
        assert fluctuation_q(np.array([0.0, 1.0, 4.0]), -2) == pytest.approx(fq_formula([1.0, 4.0], -2))

    @settings(max_examples=60, deadline=None)
    @given(arrays(float, st.integers(1, 50), elements=st.floats(1e-6, 1e6)))
    def test_matches_formula(self, f2):
        for q in (-3.0, -0.5, 0.0, 1.0, 2.0, 4.0):
            assert fluctuation_q(f2, q) == pytest.approx(fq_formula(list(f2), q), rel=1e-9)


class TestMfdfa:
    grid64 = (4, 8, 16)

    def test_monotone_in_q(self, default_moments):
        x = standardize(np.random.default_rng(5).standard_t(3, 3000))
        F = mfdfa(x, build_scale_grid(3000), default_moments)
        d = np.diff(F.table, axis=0)
        assert np.all(d >= -1e-12 * F.table[1:])
        assert np.all(F.table > 0)

    def test_white_noise(self, white_noise_runs):
        h2, _ = white_noise_runs
        assert abs(h2.mean() - 0.5) <= 0.05

    def test_fgn_07(self, default_moments):
        grid = build_scale_grid(4096)
        h2 = [fit_hurst(mfdfa(standardize(gen_fgn(GeneratorSpec("fgn", 4096, seed=s, hurst=0.7))),
                              grid, default_moments)).at(2.0) for s in range(100)]
        assert abs(np.mean(h2) - 0.7) <= 0.05

    def test_pmodel_h2(self, default_moments):
        # Dyadic scales match the cascade's own structure.
        x = standardize(gen_pmodel(GeneratorSpec("pmodel", 4096, a=0.75)))
        F = mfdfa(x, [16, 32, 64, 128, 256, 512, 1024], default_moments)
        assert fit_hurst(F).at(2.0) == pytest.approx(0.8390, abs=0.05)

    def test_unstandardized_scaling(self, default_moments):
        x = np.random.default_rng(2).normal(size=1000)
        grid = build_scale_grid(1000)
        F1 = mfdfa(x, grid, default_moments)
        F3 = mfdfa(-3.0 * x, grid, default_moments)
        np.testing.assert_allclose(F3.table, 3.0 * F1.table, rtol=1e-10)

    def test_parallel_is_bitwise_identical(self, default_moments):
        x = standardize(np.random.default_rng(9).normal(size=4096))
        grid = build_scale_grid(4096)
        a = mfdfa(x, grid, default_moments, n_jobs=1)
        b = mfdfa(x, grid, default_moments, n_jobs=4)
        assert np.array_equal(a.table, b.table)


class TestMfdxa:
    def test_self_equals_mfdfa(self, default_moments):
        x = standardize(np.random.default_rng(1).normal(size=2048))
        grid = build_scale_grid(2048)
        assert np.array_equal(mfdxa(x, x, grid, default_moments).table, mfdfa(x, grid, default_moments).table)

    def test_symmetric(self, default_moments):
        rng = np.random.default_rng(2)
        x, y = standardize(rng.normal(size=2048)), standardize(rng.normal(size=2048))
        grid = build_scale_grid(2048)
        assert np.array_equal(mfdxa(x, y, grid, default_moments).table,
                              mfdxa(y, x, grid, default_moments).table)

    def test_length_mismatch(self, default_moments):
        with pytest.raises(LengthMismatch):
            mfdxa(np.zeros(100), np.zeros(101), [10, 20], default_moments)

    def test_farima_arithmetic_mean(self, default_moments):
        grid = build_scale_grid(8192)
        gaps = []
        for seed in range(10):
            x, y = gen_farima_pair(GeneratorSpec("farima_pair", 8192, seed=seed, d_x=0.1, d_y=0.3))
            x, y = standardize(x), standardize(y)
            hx = fit_hurst(mfdfa(x, grid, default_moments)).at(2.0)
            hy = fit_hurst(mfdfa(y, grid, default_moments)).at(2.0)
            hxy = fit_hurst(mfdxa(x, y, grid, default_moments)).at(2.0)
            gaps.append(hxy - (hx + hy) / 2)
        assert abs(np.mean(gaps)) < 0.05

    def test_independent_white_noise(self, default_moments):
        grid = build_scale_grid(4096)
        h = []
        for seed in range(100):
            x = standardize(gen_white_noise(GeneratorSpec("white_noise", 4096, seed=2 * seed)))
            y = standardize(gen_white_noise(GeneratorSpec("white_noise", 4096, seed=2 * seed + 1)))
            h.append(fit_hurst(mfdxa(x, y, grid, default_moments)).at(2.0))
        assert abs(np.mean(h) - 0.5) <= 0.07

    def test_signed_variant(self, default_moments):
        rng = np.random.default_rng(3)
        x = rng.normal(size=1024)
        y = x + rng.normal(size=1024)
        grid = build_scale_grid(1024)
        F = mfdxa(x, y, grid, default_moments, covariance="signed")
        assert F.covariance == "signed" and np.all(F.table > 0)
        sf = F.surfaces[0]
        np.testing.assert_array_equal(sf.values, np.abs(sf.signed_values))
