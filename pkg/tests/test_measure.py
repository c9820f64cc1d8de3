"""Tests for resonance prediction, band tracking, and growth-rate fitting."""

from __future__ import annotations

import numpy as np
import pytest

from spinstep import (
    BandTrack,
    GNSolitonParams,
    RunConfig,
    SpectrumField,
    SpinorField,
    band_amplitude,
    band_track,
    cfl_threshold,
    dft,
    extract_mode_shape,
    fit_growth_rate,
    idft,
    make_grid,
    resonant_wavenumbers,
    run_simulation,
    spectral_support_width,
)


class TestResonantWavenumbers:
    def test_small_step_gives_five_resonances(self):
        ks = resonant_wavenumbers(dt=0.005, k_max=3272.0)
        assert len(ks) == 5
        np.testing.assert_allclose(ks, (np.pi / 0.005) * np.arange(1, 6), rtol=1e-13)

    def test_step_below_grid_spacing_gives_none(self):
        grid = make_grid(L=40 * np.pi, N=4096)
        ks = resonant_wavenumbers(dt=0.9 * grid.dx, k_max=grid.k_max)
        assert len(ks) == 0

    def test_coarse_step_count(self):
        assert len(resonant_wavenumbers(dt=0.2, k_max=3272.0)) == 208

    def test_count_is_floor_of_step_ratio(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            dx = rng.uniform(0.01, 0.2)
            ratio = rng.uniform(1.1, 6.5)
            if abs(ratio - round(ratio)) < 0.05:
                ratio += 0.07  # keep clear of exact multiples of the threshold
            ks = resonant_wavenumbers(dt=ratio * dx, k_max=np.pi / dx)
            assert len(ks) == int(np.floor(ratio))

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError, match="dt"):
            resonant_wavenumbers(dt=0.0, k_max=100.0)

    def test_threshold_step_is_resonance_free(self):
        dx = 0.0473
        assert len(resonant_wavenumbers(cfl_threshold(dx), np.pi / dx)) == 0
        assert len(resonant_wavenumbers(1.01 * dx, np.pi / dx)) == 1


class TestBandAmplitude:
    def _delta_spectrum(self):
        grid = make_grid(L=2 * np.pi, N=64)  # dk = 1
        s1 = np.zeros(64, dtype=complex)
        s2 = np.zeros(64, dtype=complex)
        s1[np.argmin(np.abs(grid.k - 3.0))] = 2.5j
        s2[np.argmin(np.abs(grid.k + 4.0))] = -1.0
        return SpectrumField(grid=grid, s1=s1, s2=s2)

    def test_picks_out_single_coefficient(self):
        spec = self._delta_spectrum()
        a1, a2 = band_amplitude(spec, k_center=3.0, k_halfwidth=0.5)
        assert a1 == pytest.approx(2.5) and a2 == 0.0
        a1, a2 = band_amplitude(spec, k_center=-4.0, k_halfwidth=0.5)
        assert a1 == 0.0 and a2 == pytest.approx(1.0)

    def test_band_beyond_spectral_window_rejected(self):
        spec = self._delta_spectrum()
        with pytest.raises(ValueError, match="window"):
            band_amplitude(spec, k_center=0.0, k_halfwidth=200.0)
        with pytest.raises(ValueError, match="window"):
            band_amplitude(spec, k_center=spec.grid.k_max - 0.5, k_halfwidth=0.6)

    def test_band_without_ladder_points_rejected(self):
        spec = self._delta_spectrum()
        with pytest.raises(ValueError, match="ladder"):
            band_amplitude(spec, k_center=3.4, k_halfwidth=0.2)
        with pytest.raises(ValueError, match="halfwidth"):
            band_amplitude(spec, k_center=3.0, k_halfwidth=0.0)

    def test_white_noise_amplitude_scale(self):
        grid = make_grid(L=16 * np.pi, N=512)
        rng = np.random.default_rng(5)
        a = 1e-9
        c = a * (rng.standard_normal((2, 512)) + 1j * rng.standard_normal((2, 512)))
        spec = dft(SpinorField(grid=grid, c1=c[0], c2=c[1]))
        a1, a2 = band_amplitude(spec, k_center=0.0, k_halfwidth=grid.k_max / 2)
        scale = a * np.sqrt(512)  # unitary-dft factor folds into the coefficients
        for v in (a1, a2):
            assert scale / 10 < v < scale * 10


class TestBandTrack:
    def _run(self, **overrides):
        cfg = dict(
            model="gn",
            scheme="ssm2",
            L=8 * np.pi,
            N=256,
            dt=8 * np.pi / 256 / 5.0,
            t_max=50 * (8 * np.pi / 256 / 5.0),
            solitons=(GNSolitonParams(Omega=0.6),),
            noise_amplitude=1e-10,
            seed=3,
        )
        cfg.update(overrides)
        return run_simulation(RunConfig(**cfg))

    def test_tracked_band_matches_stored_spectra(self):
        traj = self._run(tracked_bands=((20.0, 1.5),), store_spectra=True)
        tracked = band_track(traj, 20.0, 1.5)
        direct = np.array([band_amplitude(s, 20.0, 1.5) for s in traj.spectra])
        np.testing.assert_array_equal(tracked.amp1, direct[:, 0])
        np.testing.assert_array_equal(tracked.amp2, direct[:, 1])
        np.testing.assert_array_equal(tracked.times, traj.times)

    def test_untracked_band_needs_spectra(self):
        traj = self._run(store_spectra=False, tracked_bands=((20.0, 1.5),))
        assert band_track(traj, 20.0, 1.5).amp1.shape == traj.times.shape
        with pytest.raises(ValueError, match="spectra"):
            band_track(traj, 10.0, 1.0)

    def test_untracked_band_from_spectra(self):
        traj = self._run(store_spectra=True)
        tr = band_track(traj, -12.0, 2.0)
        assert tr.k_center == -12.0
        assert np.all(tr.amplitude >= np.maximum(tr.amp1, tr.amp2) - 1e-300)

    def test_times_must_increase(self):
        t = np.array([0.0, 1.0, 1.0])
        a = np.ones(3)
        with pytest.raises(ValueError, match="increasing"):
            BandTrack(k_center=0.0, k_halfwidth=1.0, times=t, amp1=a, amp2=a)


def _track(t, amp):
    amp = np.asarray(amp, dtype=float)
    return BandTrack(k_center=30.0, k_halfwidth=1.0, times=np.asarray(t, float),
                     amp1=amp, amp2=np.zeros_like(amp))


class TestFitGrowthRate:
    def test_pure_exponential(self):
        t = np.linspace(0.0, 100.0, 201)
        fit = fit_growth_rate(_track(t, 1e-10 * np.exp(0.05 * t)))
        assert fit.model == "exponential"
        assert fit.rate == pytest.approx(0.05, abs=1e-6)
        assert fit.exp_rate == fit.rate
        assert fit.r_squared > 0.999999

    def test_noisy_exponential(self):
        rng = np.random.default_rng(17)
        t = np.linspace(0.0, 200.0, 401)
        amp = 1e-11 * np.exp(0.03 * t) * (1.0 + 0.05 * rng.standard_normal(401))
        fit = fit_growth_rate(_track(t, amp))
        assert fit.model == "exponential"
        assert fit.rate == pytest.approx(0.03, rel=0.05)
        assert fit.window[1] - fit.window[0] >= 0.3 * 200.0

    def test_pure_linear_is_not_exponential(self):
        t = np.linspace(0.0, 100.0, 201)
        fit = fit_growth_rate(_track(t, 1e-8 * (1.0 + 0.02 * t)))
        assert fit.model == "linear"
        assert fit.rate == pytest.approx(2e-10, rel=1e-6)
        # the log-linear fallback fields still bound the growth
        assert fit.exp_rate > 0.0
        assert fit.exp_r2 > 0.9

    def test_constant_is_flat(self):
        t = np.linspace(0.0, 50.0, 101)
        fit = fit_growth_rate(_track(t, np.full(101, 3.3e-9)))
        assert fit.model == "flat"
        assert fit.rate == 0.0
        assert fit.intercept == pytest.approx(3.3e-9)

    def test_all_zero_is_flat(self):
        t = np.linspace(0.0, 50.0, 101)
        fit = fit_growth_rate(_track(t, np.zeros(101)))
        assert fit.model == "flat" and fit.rate == 0.0

    def test_decay_is_flat(self):
        t = np.linspace(0.0, 50.0, 101)
        fit = fit_growth_rate(_track(t, 1e-6 * np.exp(-0.1 * t)))
        assert fit.model == "flat"

    def test_needs_thirty_samples(self):
        t = np.linspace(0.0, 10.0, 29)
        with pytest.raises(ValueError, match="30"):
            fit_growth_rate(_track(t, np.exp(t)))

    def test_rate_invariant_under_rescaling(self):
        t = np.linspace(0.0, 80.0, 161)
        rng = np.random.default_rng(2)
        amp = 1e-12 * np.exp(0.04 * t) * (1.0 + 0.02 * rng.standard_normal(161))
        f1 = fit_growth_rate(_track(t, amp))
        f2 = fit_growth_rate(_track(t, 3.7 * amp))
        assert f1.model == f2.model == "exponential"
        assert f2.rate == pytest.approx(f1.rate, abs=1e-12)
        assert f2.window == f1.window


class TestSpectralSupportWidth:
    def test_counts_modes_above_threshold(self):
        grid = make_grid(L=2 * np.pi, N=32)
        s1 = np.zeros(grid.N, dtype=complex)
        s2 = np.zeros(grid.N, dtype=complex)
        s1[[3, 4, 5]] = 1.0  # three ladder points
        s2[10] = 0.5  # below threshold
        spec = SpectrumField(grid=grid, s1=s1, s2=s2)
        assert spectral_support_width(spec, 0.75) == pytest.approx(3 * grid.dk)

    def test_k_min_masks_low_wavenumbers(self):
        grid = make_grid(L=2 * np.pi, N=32)
        s1 = np.ones(grid.N, dtype=complex)
        spec = SpectrumField(grid=grid, s1=s1, s2=np.zeros(grid.N, dtype=complex))
        full = spectral_support_width(spec, 0.5)
        masked = spectral_support_width(spec, 0.5, k_min=grid.k_max / 2)
        assert full == pytest.approx(grid.N * grid.dk)
        assert masked < full
        # half the window (plus the asymmetric negative-edge point) remains
        expected = grid.dk * np.count_nonzero(np.abs(grid.k) >= grid.k_max / 2)
        assert masked == pytest.approx(expected)

    def test_silent_spectrum_has_zero_width(self):
        grid = make_grid(L=2 * np.pi, N=16)
        zeros = np.zeros(grid.N, dtype=complex)
        spec = SpectrumField(grid=grid, s1=zeros, s2=zeros)
        assert spectral_support_width(spec, 1e-8) == 0.0

    def test_rejects_bad_arguments(self):
        grid = make_grid(L=2 * np.pi, N=16)
        zeros = np.zeros(grid.N, dtype=complex)
        spec = SpectrumField(grid=grid, s1=zeros, s2=zeros)
        with pytest.raises(ValueError, match="threshold"):
            spectral_support_width(spec, 0.0)
        with pytest.raises(ValueError, match="k_min"):
            spectral_support_width(spec, 1.0, k_min=-1.0)


class TestExtractModeShape:
    def test_plane_wave_passes_through(self):
        grid = make_grid(L=2 * np.pi, N=256)
        f = SpinorField(grid=grid, c1=np.exp(10j * grid.x), c2=np.zeros(256, complex))
        out = extract_mode_shape(f, k_lo=5.0)
        np.testing.assert_allclose(np.abs(out.c1), 1.0, atol=1e-13)
        np.testing.assert_allclose(out.c2, 0.0, atol=1e-13)
        spec = dft(out)
        keep = np.abs(np.abs(grid.k) - 10.0) < 0.5
        assert np.max(np.abs(spec.s1[~keep])) < 1e-12 * np.max(np.abs(spec.s1))

    def test_band_limited_field_rejected(self):
        grid = make_grid(L=2 * np.pi, N=64)
        s = np.zeros(64, dtype=complex)
        s[np.argmin(np.abs(grid.k - 2.0))] = 1.0
        f = idft(SpectrumField(grid=grid, s1=s, s2=s.copy()))
        with pytest.raises(ValueError, match="removed"):
            extract_mode_shape(f, k_lo=10.0)

    def test_k_lo_bounds_checked(self):
        grid = make_grid(L=2 * np.pi, N=64)
        f = SpinorField(grid=grid, c1=np.ones(64, complex), c2=np.ones(64, complex))
        for bad in (0.0, -1.0, grid.k_max, 2 * grid.k_max):
            with pytest.raises(ValueError, match="k_lo"):
                extract_mode_shape(f, bad)

    def test_idempotent(self):
        grid = make_grid(L=4 * np.pi, N=128)
        rng = np.random.default_rng(9)
        f = SpinorField(
            grid=grid,
            c1=rng.standard_normal(128) + 1j * rng.standard_normal(128),
            c2=rng.standard_normal(128) + 1j * rng.standard_normal(128),
        )
        once = extract_mode_shape(f, k_lo=7.5)
        twice = extract_mode_shape(once, k_lo=7.5)
        np.testing.assert_allclose(twice.c1, once.c1, atol=1e-14)
        np.testing.assert_allclose(twice.c2, once.c2, atol=1e-14)
        peak = np.max(np.abs(once.c1) ** 2 + np.abs(once.c2) ** 2)
        assert peak == pytest.approx(1.0, abs=1e-13)
