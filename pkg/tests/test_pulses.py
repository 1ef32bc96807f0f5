"""Pulse families: time/frequency values, norms, FFT bridge, serialization."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from photonflow.errors import GridCoverageError, ParameterError, UnsupportedKindError
from photonflow.pulses import (
    TimeGrid,
    decaying_exp,
    default_grid,
    eval_spectrum,
    eval_time,
    fft_spectrum,
    gaussian_pulse,
    ifft_pulse,
    norm_l2,
    read_pulse_csv,
    read_pulse_json,
    rising_exp,
    sample_pulse,
    sampled_pulse,
    write_pulse_csv,
    write_pulse_json,
    write_spectrum_csv,
)

betas = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)


class TestEvalTime:
    def test_decaying_exp_at_zero(self):
        assert eval_time(decaying_exp(2.0), 0.0) == pytest.approx(np.sqrt(2.0))

    def test_rising_exp_zero_after_origin(self):
        assert eval_time(rising_exp(2.0), 0.5) == 0.0

    def test_gaussian_peak(self):
        omega = 2.92
        assert eval_time(gaussian_pulse(omega, 0.0), 0.0) == pytest.approx(
            (omega**2 / (2 * np.pi)) ** 0.25
        )

    def test_decaying_zero_before_origin(self):
        assert eval_time(decaying_exp(1.0), -3.0) == 0.0

    def test_rising_exp_keeps_sign_convention(self):
        assert eval_time(rising_exp(4.0), 0.0) == pytest.approx(-2.0)

    @given(betas, st.floats(-20, 20, allow_nan=False))
    def test_time_reversal_mirror(self, beta, t):
        rising = eval_time(rising_exp(beta), -t)
        decaying = eval_time(decaying_exp(beta), t)
        assert abs(abs(rising) - abs(decaying)) < 1e-12 * max(1.0, abs(decaying))

    def test_sampled_interpolates_and_vanishes_outside(self):
        grid = TimeGrid(0.0, 0.5, 5)
        p = sampled_pulse(grid, np.array([0, 1, 2, 1, 0], dtype=complex))
        assert eval_time(p, 0.75) == pytest.approx(1.5)
        assert eval_time(p, -1.0) == 0.0
        assert eval_time(p, 99.0) == 0.0


class TestEvalSpectrum:
    def test_decaying_lorentzian_at_zero(self):
        assert abs(eval_spectrum(decaying_exp(2.0), 0.0)) ** 2 == pytest.approx(1 / np.pi)

    @given(betas)
    def test_fwhm_half_peak(self, beta):
        p = decaying_exp(beta)
        peak = abs(eval_spectrum(p, 0.0)) ** 2
        for sign in (+1, -1):
            half = abs(eval_spectrum(p, sign * beta / 2)) ** 2
            assert half == pytest.approx(peak / 2, rel=1e-12)

    @given(betas)
    def test_rising_same_lineshape(self, beta):
        w = np.linspace(-3 * beta, 3 * beta, 7)
        lor = abs(eval_spectrum(decaying_exp(beta), w)) ** 2
        ris = abs(eval_spectrum(rising_exp(beta), w)) ** 2
        assert np.allclose(lor, ris)

    def test_gaussian_at_zero(self):
        omega = 2.92
        expected = 1.0 / (np.sqrt(2 * np.pi) * omega / 2)
        assert abs(eval_spectrum(gaussian_pulse(omega), 0.0)) ** 2 == pytest.approx(expected)

    def test_sampled_kind_directed_to_fft(self):
        grid = TimeGrid(0.0, 0.1, 8)
        p = sampled_pulse(grid, np.ones(8, dtype=complex))
        with pytest.raises(UnsupportedKindError, match="fft_spectrum"):
            eval_spectrum(p, 0.0)


class TestNorm:
    @given(betas)
    def test_exponentials_normalized(self, beta):
        assert norm_l2(decaying_exp(beta)) == 1.0
        assert norm_l2(rising_exp(beta)) == 1.0

    @given(st.floats(0.1, 10), st.floats(-5, 5))
    def test_gaussian_normalized(self, omega, tau):
        assert norm_l2(gaussian_pulse(omega, tau)) == 1.0

    def test_sampled_gaussian_trapezoid(self):
        p = gaussian_pulse(2.92, 0.0)
        grid = default_grid(p)
        samples = sample_pulse(p, grid)
        assert norm_l2(sampled_pulse(grid, samples)) == pytest.approx(1.0, abs=1e-6)

    def test_sampled_exponential_within_numeric_tolerance(self):
        p = decaying_exp(2.0)
        grid = default_grid(p)
        assert norm_l2(sampled_pulse(grid, sample_pulse(p, grid))) == pytest.approx(
            1.0, abs=1e-4
        )

    def test_invalid_parameters(self):
        with pytest.raises(ParameterError):
            decaying_exp(0.0)
        with pytest.raises(ParameterError):
            gaussian_pulse(-1.0)


class TestSampling:
    def test_jump_sample_is_mean_of_limits(self):
        grid = TimeGrid(-1.0, 0.25, 9)  # hits t = 0 exactly
        vals = sample_pulse(decaying_exp(4.0), grid)
        assert vals[4] == pytest.approx(0.5 * np.sqrt(4.0))
        vals_r = sample_pulse(rising_exp(4.0), grid)
        assert vals_r[4] == pytest.approx(-0.5 * np.sqrt(4.0))


class TestFFTBridge:
    def test_gaussian_matches_closed_form(self):
        p = gaussian_pulse(2.92, 0.0)
        grid = TimeGrid(t_start=-15.0, dt=30.0 / 2**14, n=2**14)
        s = fft_spectrum(p, grid)
        exact = eval_spectrum(p, s.omegas)
        interior = np.abs(s.omegas) <= 0.8 * s.omega_max
        assert np.max(np.abs(s.values - exact)[interior]) < 1e-4

    @pytest.mark.parametrize("pulse", [decaying_exp(2.0), rising_exp(2.0)])
    def test_exponentials_match_closed_form(self, pulse):
        s = fft_spectrum(pulse)
        exact = eval_spectrum(pulse, s.omegas)
        interior = np.abs(s.omegas) <= 0.8 * s.omega_max
        assert np.max(np.abs(s.values - exact)[interior]) < 1e-4

    @pytest.mark.parametrize(
        "pulse", [decaying_exp(2.0), rising_exp(1.0), gaussian_pulse(2.92, 0.0)]
    )
    def test_round_trip(self, pulse):
        grid = default_grid(pulse)
        s = fft_spectrum(pulse, grid)
        back = ifft_pulse(s)
        reference = sample_pulse(pulse, grid)
        err = np.abs(back.values - reference)
        at_jump = np.abs(grid.times) <= grid.dt / 2
        assert err[~at_jump].max() < 1e-6
        if at_jump.any():
            assert err[at_jump].max() < 5e-2

    def test_round_trip_preserves_norm(self):
        p = gaussian_pulse(1.46, 3.0)
        back = ifft_pulse(fft_spectrum(p))
        assert norm_l2(back) == pytest.approx(1.0, abs=1e-4)

    def test_parseval(self):
        for pulse in (decaying_exp(2.0), gaussian_pulse(2.92, 0.0)):
            s = fft_spectrum(pulse)
            assert s.energy() == pytest.approx(1.0, abs=1e-4)

    def test_grid_coverage_failure_reports_measured_value(self):
        p = gaussian_pulse(1.0, 0.0)
        tiny = TimeGrid(t_start=-0.5, dt=0.01, n=100)
        with pytest.raises(GridCoverageError) as exc_info:
            fft_spectrum(p, tiny)
        assert 0.0 < exc_info.value.coverage < 0.9999

    def test_grid_delta_has_flat_spectrum(self):
        n = 64
        grid = TimeGrid(0.0, 0.5, n)
        v = np.zeros(n, dtype=complex)
        v[10] = 1.0 / np.sqrt(0.5)  # unit trapezoid norm
        s = fft_spectrum(sampled_pulse(grid, v), grid)
        assert np.ptp(np.abs(s.values)) < 1e-12


class TestSerialization:
    def test_csv_round_trip(self, tmp_path):
        p = ifft_pulse(fft_spectrum(gaussian_pulse(2.0, 0.0), TimeGrid(-8.0, 0.01, 1600)))
        path = tmp_path / "pulse.csv"
        write_pulse_csv(p, path)
        with open(path) as fh:
            assert fh.readline().strip() == "t,re,im"
        back = read_pulse_csv(path)
        assert np.allclose(back.values, p.values)
        assert np.allclose(back.grid.times, p.grid.times)

    def test_json_round_trip(self, tmp_path):
        grid = TimeGrid(0.0, 0.1, 32)
        p = sampled_pulse(grid, np.exp(1j * np.linspace(0, 3, 32)))
        path = tmp_path / "pulse.json"
        write_pulse_json(p, path)
        back = read_pulse_json(path)
        assert np.allclose(back.values, p.values)

    def test_spectrum_csv_header(self, tmp_path):
        s = fft_spectrum(gaussian_pulse(2.0), TimeGrid(-8.0, 0.01, 1600))
        path = tmp_path / "spectrum.csv"
        write_spectrum_csv(s, path)
        with open(path) as fh:
            assert fh.readline().strip() == "omega,re,im"

    def test_analytic_pulse_not_serializable(self, tmp_path):
        with pytest.raises(UnsupportedKindError):
            write_pulse_csv(decaying_exp(1.0), tmp_path / "x.csv")
