import numpy as np
import pytest

from chaossep.dynsys import TimeSeries
from chaossep.wiener import (
    SpectrumEstimate,
    WienerFilter,
    apply,
    build_wiener,
    hann_window,
    impulse_response,
    welch_csd,
    welch_psd,
    wiener_transfer,
)

DT = 0.05


def series(values):
    return TimeSeries(np.asarray(values, dtype=float), DT)


class TestHannWindow:
    def test_endpoints_zero(self):
        w = hann_window(11)
        assert w[0] == 0.0 and w[-1] == 0.0

    def test_odd_midpoint_one(self):
        w = hann_window(11)
        assert w[5] == 1.0

    def test_length_four_values(self):
        np.testing.assert_allclose(hann_window(4), [0.0, 0.75, 0.75, 0.0], rtol=0, atol=1e-15)

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            hann_window(1)


class TestWelch:
    def test_sinusoid_peak_and_parseval(self):
        # A sinusoid on an exact grid frequency concentrates power in its
        # bin pair, and the summed PSD reproduces the variance.
        L = 256
        n = np.arange(L * 40)
        m = 8
        x = series(np.sqrt(2.0) * np.sin(2.0 * np.pi * m * n / L))
        psd = welch_psd(x, seg_len=L)
        peak_bins = {int(np.argmax(psd.values)), int(np.argmax(psd.values[: L // 2]))}
        assert m in peak_bins
        total = float(np.sum(psd.values))
        var = float(np.var(x.samples))
        assert abs(total - var) <= 0.02 * var

    def test_white_noise_parseval(self, rng):
        x = series(rng.normal(size=30000))
        psd = welch_psd(x, seg_len=500)
        total = float(np.sum(psd.values))
        var = float(np.var(x.samples))
        assert abs(total - var) <= 0.05 * var

    def test_delayed_copy_magnitude_and_phase(self, rng):
        d = 3
        base = rng.normal(size=60000 + d)
        x = series(base[d:])
        y = series(base[:-d])  # y[n] = x[n-d]
        L = 256
        csd = welch_csd(x, y, seg_len=L)
        psd = welch_psd(x, seg_len=L)
        ratio = np.abs(csd.values[1:20]) / psd.values[1:20]
        assert np.all(np.abs(ratio - 1.0) < 0.1)
        # Shift theorem: phase is -2 pi k d / L on low bins.
        k = np.arange(1, 20)
        residual = np.angle(csd.values[1:20] * np.exp(2j * np.pi * k * d / L))
        assert np.max(np.abs(residual)) < 0.15

    def test_independent_inputs_decorrelate(self, rng):
        x = series(rng.normal(size=30000))
        y = series(rng.normal(size=30000))
        csd = welch_csd(x, y, seg_len=500)
        psd = welch_psd(x, seg_len=500)
        assert float(np.mean(np.abs(csd.values)) / np.mean(psd.values)) < 0.2

    def test_psd_real_nonnegative(self, rng):
        psd = welch_psd(series(rng.normal(size=5000)), seg_len=250)
        assert psd.values.dtype.kind == "f"
        assert np.all(psd.values >= 0.0)

    def test_short_series_rejected(self, rng):
        with pytest.raises(ValueError):
            welch_psd(series(rng.normal(size=100)), seg_len=500)

    def test_bad_overlap_rejected(self, rng):
        x = series(rng.normal(size=5000))
        with pytest.raises(ValueError):
            welch_csd(x, x, seg_len=500, overlap=500)

    def test_frequency_grid(self, rng):
        psd = welch_psd(series(rng.normal(size=2000)), seg_len=100)
        np.testing.assert_allclose(psd.frequencies(), np.fft.fftfreq(100, d=DT))


class TestWienerTransfer:
    def test_identical_spectra_unit_transfer(self):
        p = SpectrumEstimate(values=np.full(64, 2.0), seg_len=64, dt=DT)
        h = wiener_transfer(p, p)
        np.testing.assert_allclose(h.values, 1.0, rtol=0, atol=1e-15)

    def test_zero_cross_spectrum_zero_transfer(self):
        p_uu = SpectrumEstimate(values=np.full(64, 2.0), seg_len=64, dt=DT)
        p_us = SpectrumEstimate(values=np.zeros(64), seg_len=64, dt=DT)
        h = wiener_transfer(p_us, p_uu)
        np.testing.assert_array_equal(h.values, np.zeros(64))

    def test_flat_spectra_mix_gives_sqrt_alpha(self, rng):
        # For independent flat unit-power components the transfer toward
        # one of them is the constant sqrt(alpha).
        alpha = 0.36
        T = 120000
        s = rng.normal(size=T)
        n = rng.normal(size=T)
        u = series(np.sqrt(alpha) * s + np.sqrt(1.0 - alpha) * n)
        h = wiener_transfer(welch_csd(u, series(s), seg_len=500), welch_psd(u, seg_len=500))
        assert abs(float(np.mean(h.values.real)) - np.sqrt(alpha)) < 0.03
        assert float(np.mean(np.abs(h.values - np.sqrt(alpha)))) < 0.1

    def test_grid_mismatch_rejected(self):
        a = SpectrumEstimate(values=np.ones(64), seg_len=64, dt=DT)
        b = SpectrumEstimate(values=np.ones(128), seg_len=128, dt=DT)
        with pytest.raises(ValueError):
            wiener_transfer(a, b)


class TestImpulseResponse:
    def test_unit_transfer_centered_impulse(self):
        h = impulse_response(SpectrumEstimate(values=np.ones(64), seg_len=64, dt=DT))
        expected = np.zeros(64)
        expected[32] = 1.0
        np.testing.assert_allclose(h.h, expected, rtol=0, atol=1e-12)

    def test_zero_transfer_zero_filter(self):
        h = impulse_response(SpectrumEstimate(values=np.zeros(64), seg_len=64, dt=DT))
        np.testing.assert_array_equal(h.h, np.zeros(64))

    def test_half_band_lowpass_matches_direct_inversion(self):
        # Oracle: explicit inverse-DFT sum with explicit recentering,
        # independent of the fft/roll code path.
        L = 64
        values = np.zeros(L)
        cut = L // 4
        values[: cut + 1] = 1.0
        values[L - cut :] = 1.0
        filt = impulse_response(SpectrumEstimate(values=values, seg_len=L, dt=DT))
        k = np.arange(L)
        oracle = np.array(
            [np.sum(values * np.exp(2j * np.pi * k * n / L)).real / L for n in range(L)]
        )
        oracle = np.concatenate([oracle[L // 2 :], oracle[: L // 2]])
        np.testing.assert_allclose(filt.h, oracle, rtol=0, atol=1e-10)
        # Shape check: peak at center, sinc-like alternating zeros.
        assert int(np.argmax(filt.h)) == L // 2

    def test_non_hermitian_rejected(self):
        values = np.zeros(64, dtype=complex)
        values[1] = 1.0 + 0.5j  # conjugate bin left at zero
        with pytest.raises(ValueError):
            impulse_response(SpectrumEstimate(values=values, seg_len=64, dt=DT))


class TestApply:
    def test_identity_filter_passthrough(self, rng):
        L = 64
        h = np.zeros(L)
        h[L // 2] = 1.0
        u = series(rng.normal(size=500))
        out = apply(WienerFilter(h=h, seg_len=L), u)
        np.testing.assert_allclose(out.samples, u.samples, rtol=0, atol=1e-12)
        assert out.dt == u.dt

    def test_zero_filter(self, rng):
        out = apply(WienerFilter(h=np.zeros(64), seg_len=64), series(rng.normal(size=500)))
        np.testing.assert_array_equal(out.samples, np.zeros(500))

    def test_too_short_input_rejected(self, rng):
        with pytest.raises(ValueError):
            apply(WienerFilter(h=np.zeros(64), seg_len=64), series(rng.normal(size=32)))

    def test_lowpass_separates_grid_sinusoids(self):
        # Passband sine passes with unit gain and zero shift; stopband
        # sine is suppressed.  Edges are excluded.
        L = 64
        values = np.zeros(L)
        cut = L // 4
        values[: cut + 1] = 1.0
        values[L - cut :] = 1.0
        filt = impulse_response(SpectrumEstimate(values=values, seg_len=L, dt=DT))
        n = np.arange(2000)
        inside = np.sin(2.0 * np.pi * 8 * n / L)
        outside = np.sin(2.0 * np.pi * 24 * n / L)
        got_in = apply(filt, series(inside)).samples[L : 2000 - L]
        got_out = apply(filt, series(outside)).samples[L : 2000 - L]
        np.testing.assert_allclose(got_in, inside[L : 2000 - L], rtol=0, atol=0.01)
        assert np.max(np.abs(got_out)) < 0.01


class TestBuildWiener:
    def test_self_separation_near_identity(self, rng):
        base = rng.normal(size=4000)
        u = series(base)
        filt = build_wiener(u, series(base.copy()), seg_len=256)
        fresh = series(rng.normal(size=2000))
        out = apply(filt, fresh)
        interior = slice(128, 2000 - 128)
        err = np.max(np.abs(out.samples[interior] - fresh.samples[interior]))
        assert err < 1e-2 * np.max(np.abs(fresh.samples))

    def test_zero_target_zero_filter(self, rng):
        u = series(rng.normal(size=4000))
        filt = build_wiener(u, series(np.zeros(4000)), seg_len=256)
        np.testing.assert_allclose(filt.h, 0.0, atol=1e-12)

    def test_recovers_band_limited_component(self, rng):
        # Two disjoint-band signals built by FFT masking; the filter
        # trained toward the low-band component must recover it.
        T = 40000
        spec_lo = np.fft.rfft(rng.normal(size=T))
        spec_hi = np.fft.rfft(rng.normal(size=T))
        grid = np.arange(len(spec_lo))
        spec_lo[grid > T // 8] = 0.0
        spec_hi[grid <= T // 8] = 0.0
        lo = np.fft.irfft(spec_lo, T)
        hi = np.fft.irfft(spec_hi, T)
        lo /= np.std(lo)
        hi /= np.std(hi)
        u = (lo + hi) / np.sqrt(2.0)
        half = T // 2
        filt = build_wiener(series(u[:half]), series(lo[:half]), seg_len=500)
        out = apply(filt, series(u[half:])).samples
        target = lo[half:]
        interior = slice(250, half - 250)
        mse = float(np.mean((out[interior] - target[interior]) ** 2))
        assert mse / float(np.var(target[interior])) < 0.05

    def test_perturbing_filter_increases_mse(self, rng):
        # The built filter sits at an MSE minimum on stationary data:
        # random impulse-response perturbations must not improve it.
        T = 60000
        u = rng.normal(size=T)
        kernel = np.array([0.6, 0.25, -0.2, 0.1, 0.05])
        s = np.convolve(u, kernel, mode="same") + 0.1 * rng.normal(size=T)
        half = T // 2
        filt = build_wiener(series(u[:half]), series(s[:half]), seg_len=500)
        u_test = series(u[half:])
        s_test = s[half:]
        interior = slice(250, half - 250)

        def mse(h):
            out = apply(WienerFilter(h=h, seg_len=500), u_test).samples
            return float(np.mean((out[interior] - s_test[interior]) ** 2))

        base = mse(filt.h)
        scale = 0.01 * np.linalg.norm(filt.h)
        increased = 0
        for _ in range(100):
            delta = rng.normal(size=500)
            delta *= scale / np.linalg.norm(delta)
            if mse(filt.h + delta) > base:
                increased += 1
        assert increased >= 95, f"only {increased}/100 perturbations increased MSE"
