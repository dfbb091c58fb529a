import numpy as np
import pytest

import pointspec as ps
from pointspec.errors import ValidationError
from pointspec.spectral import fourier_sum


def naive_si(pattern, grid, denom):
    out = np.empty(len(grid))
    for i, k in enumerate(grid.wavevectors):
        total = 0.0 + 0.0j
        for x in pattern.points:
            total += np.exp(-1j * np.dot(k, x))
        out[i] = abs(total) ** 2 / denom
    return out


class TestFourierSum:
    def test_matches_einsum(self, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 1.0)
        got = fourier_sum(poisson_box.points, grid.wavevectors)
        want = np.exp(-1j * grid.wavevectors @ poisson_box.points.T).sum(axis=1)
        np.testing.assert_allclose(got, want, atol=1e-9)

    def test_weights(self, small_pattern):
        grid = ps.allowed_wavevectors(small_pattern.window, 3.0)
        w = np.array([0.5, -1.0, 2.0, 0.25])
        got = fourier_sum(small_pattern.points, grid.wavevectors, weights=w)
        want = (w[None, :] * np.exp(-1j * grid.wavevectors @ small_pattern.points.T)).sum(axis=1)
        np.testing.assert_allclose(got, want, atol=1e-10)


class TestScatteringIntensity:
    def test_against_naive_loop(self, small_pattern):
        grid = ps.allowed_wavevectors(small_pattern.window, 3.0)
        est = ps.scattering_intensity(small_pattern, grid)
        rho = small_pattern.intensity
        want = naive_si(small_pattern, grid, rho * small_pattern.window.volume)
        np.testing.assert_allclose(est.values, want, rtol=1e-10)
        assert est.meta["estimator"] == "scattering_intensity"

    def test_self_normalized_ratio_is_exact(self, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 1.5)
        plain = ps.scattering_intensity(poisson_box, grid)
        selfn = ps.scattering_intensity(poisson_box, grid, self_normalized=True)
        n = len(poisson_box)
        rho_w = poisson_box.intensity * poisson_box.window.volume
        np.testing.assert_allclose(selfn.values * n, plain.values * rho_w, rtol=1e-12)

    def test_empty_pattern_rejected(self):
        empty = ps.PointPattern(np.empty((0, 2)), ps.Box((10.0, 10.0)), intensity=1.0)
        grid = ps.allowed_wavevectors(empty.window, 2.0)
        with pytest.raises(ValidationError):
            ps.scattering_intensity(empty, grid)

    def test_poisson_values_hover_around_one(self, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 3.0)
        est = ps.scattering_intensity(poisson_box, grid)
        assert abs(est.values.mean() - 1.0) < 0.15

    def test_rho_source_recorded(self, small_pattern):
        grid = ps.allowed_wavevectors(small_pattern.window, 3.0)
        est = ps.scattering_intensity(small_pattern, grid)
        assert est.meta["rho_source"] == "declared"
        bare = ps.PointPattern(small_pattern.points, small_pattern.window)
        est2 = ps.scattering_intensity(bare, grid)
        assert est2.meta["rho_source"] == "estimated"
        assert est2.meta["rho"] == pytest.approx(4.0 / 24.0)


class TestTaperedVariants:
    def test_indicator_taper_reproduces_si_on_allowed_grid(self, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 1.5)
        si = ps.scattering_intensity(poisson_box, grid)
        t0 = ps.indicator_taper()
        for debias in ("none", "direct", "undirect"):
            est = ps.tapered(poisson_box, grid, t0, debias=debias)
            np.testing.assert_allclose(est.values, si.values, rtol=1e-9,
                                       err_msg=f"debias={debias}")

    def test_undirect_subtracts_bias_outside(self, small_pattern):
        window = small_pattern.window
        ks = np.array([[0.3, 0.1], [1.1, -0.7], [0.9, 2.0]])
        grid = ps.WaveGrid.from_vectors(ks)
        taper = ps.sine_taper((1, 2))
        rho = small_pattern.intensity
        plain = ps.tapered(small_pattern, grid, taper, debias="none")
        udt = ps.tapered(small_pattern, grid, taper, debias="undirect")
        bias = rho * np.abs(taper.ft(ks, window)) ** 2
        np.testing.assert_allclose(udt.values, plain.values - bias, rtol=1e-10)

    def test_direct_subtracts_bias_inside(self, small_pattern):
        window = small_pattern.window
        ks = np.array([[0.3, 0.1], [1.1, -0.7]])
        grid = ps.WaveGrid.from_vectors(ks)
        taper = ps.sine_taper((2, 1))
        rho = small_pattern.intensity
        ddt = ps.tapered(small_pattern, grid, taper, debias="direct")
        weights = taper.eval(small_pattern.points, window)
        phases = np.exp(-1j * ks @ small_pattern.points.T)
        want = np.abs((weights[None, :] * phases).sum(axis=1)
                      - rho * taper.ft(ks, window)) ** 2 / rho
        np.testing.assert_allclose(ddt.values, want, rtol=1e-10)
        assert np.all(ddt.values >= 0.0)

    def test_undirect_can_go_negative_direct_cannot(self):
        rng = np.random.default_rng(5)
        window = ps.Box((20.0, 20.0))
        pts = rng.uniform(-10, 10, size=(60, 2))
        pat = ps.PointPattern(pts, window, intensity=60 / 400.0)
        ks = np.column_stack([np.linspace(0.05, 0.5, 120),
                              np.linspace(0.04, 0.4, 120)])
        grid = ps.WaveGrid.from_vectors(ks)
        taper = ps.sine_taper((1, 1))
        udt = ps.tapered(pat, grid, taper, debias="undirect")
        ddt = ps.tapered(pat, grid, taper, debias="direct")
        assert np.all(ddt.values >= 0.0)
        assert udt.values.min() < 0.0

    def test_empty_pattern_direct_gives_pure_bias(self):
        window = ps.Box((10.0, 10.0))
        empty = ps.PointPattern(np.empty((0, 2)), window, intensity=0.3)
        ks = np.array([[0.5, 0.2]])
        grid = ps.WaveGrid.from_vectors(ks)
        taper = ps.sine_taper((1, 1))
        est = ps.tapered(empty, grid, taper, debias="direct")
        want = 0.3 * np.abs(taper.ft(ks, window)[0]) ** 2
        assert est.values[0] == pytest.approx(want, rel=1e-12)

    def test_multitaper_is_mean_of_singles(self, small_pattern):
        grid = ps.allowed_wavevectors(small_pattern.window, 3.0)
        family = ps.sine_taper_family(4, 2)
        mt = ps.multitaper(small_pattern, grid, family, debias="direct")
        singles = [ps.tapered(small_pattern, grid, t, debias="direct").values
                   for t in family]
        np.testing.assert_allclose(mt.values, np.mean(singles, axis=0), rtol=1e-12)
        assert mt.meta["estimator"] == "multitaper"

    def test_bad_debias_rejected(self, small_pattern):
        grid = ps.allowed_wavevectors(small_pattern.window, 3.0)
        with pytest.raises(ValidationError):
            ps.tapered(small_pattern, grid, ps.sine_taper((1, 1)), debias="both")


class TestBinning:
    def test_matches_manual_groupby(self, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 2.5)
        est = ps.scattering_intensity(poisson_box, grid)
        binned = ps.bin_by_wavenumber(est, 12)
        k = est.wavenumbers
        edges = np.linspace(k.min(), k.max(), 13)
        idx = np.clip(np.searchsorted(edges, k, side="right") - 1, 0, 11)
        for b, (kb, mean, std, count) in enumerate(zip(
                binned.bins.k_bin, binned.bins.mean, binned.bins.std, binned.bins.count)):
            sel = est.values[idx == b]
            assert count == len(sel)
            assert mean == pytest.approx(sel.mean(), rel=1e-12)
            want_std = sel.std(ddof=1) / np.sqrt(len(sel)) if len(sel) > 1 else 0.0
            assert std == pytest.approx(want_std, rel=1e-12, abs=1e-15)

    def test_counts_cover_everything(self, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 2.5)
        est = ps.scattering_intensity(poisson_box, grid)
        binned = ps.bin_by_wavenumber(est, 17)
        assert binned.bins.count.sum() == len(est)
        assert np.all(binned.bins.count > 0)

    def test_too_few_bins_rejected(self, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 2.0)
        est = ps.scattering_intensity(poisson_box, grid)
        with pytest.raises(ValidationError):
            ps.bin_by_wavenumber(est, 0)


class TestEstimateIO:
    def test_roundtrip_without_vectors(self, tmp_path):
        est = ps.SpectralEstimate(np.array([0.3, 0.7]), np.array([1.25, 0.5]))
        path = tmp_path / "est.csv"
        ps.save_estimate(est, path)
        back = ps.load_estimate(path)
        np.testing.assert_array_equal(back.wavenumbers, est.wavenumbers)
        np.testing.assert_array_equal(back.values, est.values)
        assert back.wavevectors is None

    def test_roundtrip_with_vectors_and_bins(self, tmp_path, poisson_box):
        grid = ps.allowed_wavevectors(poisson_box.window, 2.0)
        est = ps.bin_by_wavenumber(ps.scattering_intensity(poisson_box, grid), 9)
        path = tmp_path / "est.csv"
        ps.save_estimate(est, path)
        assert (tmp_path / "est.csv.bins").exists()
        back = ps.load_estimate(path)
        np.testing.assert_array_equal(back.wavevectors, est.wavevectors)
        np.testing.assert_array_equal(back.values, est.values)
        np.testing.assert_array_equal(back.bins.mean, est.bins.mean)
        np.testing.assert_array_equal(back.bins.count, est.bins.count)

    def test_header_enforced(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("wavenumber,value\n0.5,1.0\n")
        with pytest.raises(ValidationError):
            ps.load_estimate(path)
