"""Beamsplitters, closed-loop pulse shaping, and generic composition."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photonflow.doubled import cavity_linear_model
from photonflow.errors import ParameterError, ValidationError, WellPosednessError
from photonflow.network import (
    Beamsplitter,
    NetworkTopology,
    bare_cavity_output,
    bs_apply,
    cavity_loop_transfer,
    closed_loop_shape,
    compose_feedback,
    compose_series,
    identity_transfer,
    loop_response,
    single_loop_topology,
)
from photonflow.pulses import decaying_exp, gaussian_pulse, norm_l2, sample_pulse
from photonflow.response import TransferFunction, transfer_function


class TestBeamsplitter:
    def test_full_reflection_is_pass_through(self):
        bs = Beamsplitter.from_gamma_phi(1.0)
        a = np.array([1 + 1j, 2.0])
        b = np.array([0.5, -1j])
        out_a, out_b = bs_apply(bs, (a, b))
        assert np.allclose(out_a, a)
        assert np.allclose(out_b, b)

    def test_full_transmission_swaps_with_sign(self):
        bs = Beamsplitter.from_gamma_phi(0.0, 0.0)
        a = np.array([1.0, 2.0], dtype=complex)
        b = np.array([3.0, 4.0], dtype=complex)
        out_a, out_b = bs_apply(bs, (a, b))
        assert np.allclose(out_a, b)
        assert np.allclose(out_b, -a)

    def test_unitarity_residual_tiny(self):
        bs = Beamsplitter.from_gamma_phi(0.4, np.pi / 3)
        assert bs.unitarity_deviation() < 1e-15

    def test_non_unitary_entries_rejected_with_deviation(self):
        with pytest.raises(ValidationError) as exc_info:
            Beamsplitter(s11=0.9, s12=0.0, s21=0.0, s22=1.0)
        assert exc_info.value.deviation > 0.01

    def test_gamma_range_checked(self):
        with pytest.raises(ParameterError):
            Beamsplitter.from_gamma_phi(1.2)

    @given(st.floats(0, 1), st.floats(0, 2 * np.pi))
    def test_construction_always_unitary(self, gamma, phi):
        assert Beamsplitter.from_gamma_phi(gamma, phi).unitarity_deviation() < 1e-12


class TestLoopResponse:
    def test_gamma_zero_is_negated_bare_cavity(self):
        pulse = decaying_exp(2.0)
        closed = closed_loop_shape(0.0, 2.0, 0.0, pulse)
        bare = bare_cavity_output(0.0, 2.0, pulse, grid=closed.spectrum.time_grid)
        assert np.allclose(closed.pulse.values, -bare.pulse.values, atol=1e-10)
        assert np.max(np.abs(np.abs(closed.pulse.values) ** 2 - np.abs(bare.pulse.values) ** 2)) < 1e-10

    def test_gamma_one_reflects_unchanged(self):
        pulse = gaussian_pulse(2.92, 0.0)
        out = closed_loop_shape(0.0, 1.0, 1.0, pulse)
        xi = sample_pulse(pulse, out.spectrum.time_grid)
        assert np.max(np.abs(out.pulse.values - xi)) < 1e-9

    def test_gamma_out_of_range(self):
        with pytest.raises(ParameterError):
            closed_loop_shape(0.0, 1.0, 1.5, gaussian_pulse(1.0))

    def test_curves_approach_input_monotonically(self):
        pulse = decaying_exp(2.0)
        grid = None
        distances = []
        for gamma in (0.0, 0.5, 0.9):
            out = closed_loop_shape(0.0, 2.0, gamma, pulse, grid=grid)
            grid = out.spectrum.time_grid
            xi_sq = np.abs(sample_pulse(pulse, grid)) ** 2
            gap = np.abs(np.abs(out.pulse.values) ** 2 - xi_sq)
            distances.append(float(np.sum(gap) * grid.dt))
        assert distances[0] > distances[1] > distances[2]

    def test_normalization_preserved(self):
        for gamma in (0.0, 0.5, 0.9, 0.999):
            out = closed_loop_shape(0.0, 2.0, gamma, decaying_exp(2.0))
            assert norm_l2(out.pulse) == pytest.approx(1.0, abs=1e-4)

    def test_effective_bandwidth_law(self):
        # closed loop equals a bare cavity with kappa / r, up to a global sign
        kappa, gamma = 2.0, 0.6
        r = (1 - np.sqrt(gamma)) / (1 + np.sqrt(gamma))
        w = np.linspace(-80, 80, 1001)
        closed = loop_response(0.0, kappa, gamma, w)
        from photonflow.network import cavity_response

        assert np.allclose(closed, -cavity_response(0.0, kappa / r, w), atol=1e-12)


class TestComposition:
    def test_series_with_identity(self):
        w = np.linspace(-20, 20, 301)
        tf = transfer_function(cavity_linear_model(0.3, 1.0), w)
        out = compose_series(tf, identity_transfer(w))
        assert np.allclose(out.xi_minus, tf.xi_minus)

    def test_two_cavities_all_pass_of_order_two(self):
        w = np.linspace(-40, 40, 801)
        t1 = transfer_function(cavity_linear_model(0.0, 1.0), w)
        t2 = transfer_function(cavity_linear_model(0.7, 3.0), w)
        ser = compose_series(t1, t2)
        assert np.allclose(np.abs(ser.xi_minus[:, 0, 0]), 1.0, atol=1e-12)
        assert np.allclose(
            ser.xi_minus[:, 0, 0], t2.xi_minus[:, 0, 0] * t1.xi_minus[:, 0, 0]
        )

    def test_feedback_reproduces_closed_form(self):
        rng = np.random.default_rng(11)
        w = np.linspace(-40, 40, 801)
        for _ in range(20):
            gamma = rng.uniform(0.0, 0.99)
            omega_c = rng.uniform(-3, 3)
            kappa = rng.uniform(0.5, 5.0)
            phi = rng.uniform(0, 2 * np.pi)
            lft = cavity_loop_transfer(omega_c, kappa, gamma, phi, w)
            assert np.max(np.abs(lft.xi_minus[:, 0, 0] - loop_response(omega_c, kappa, gamma, w))) < 1e-10

    @given(st.floats(0, 2 * np.pi), st.floats(0.05, 0.95))
    @settings(max_examples=15)
    def test_closed_loop_phase_independent(self, phi, gamma):
        w = np.linspace(-10, 10, 101)
        with_phi = cavity_loop_transfer(0.0, 2.0, gamma, phi, w)
        without = cavity_loop_transfer(0.0, 2.0, gamma, 0.0, w)
        assert np.allclose(with_phi.xi_minus, without.xi_minus, atol=1e-12)

    def test_composed_network_all_pass(self):
        w = np.linspace(-60, 60, 1201)
        g = transfer_function(cavity_linear_model(0.0, 2.0), w)
        k = transfer_function(cavity_linear_model(1.0, 0.7), w)
        closed = compose_feedback(g, k, Beamsplitter.from_gamma_phi(0.35, 0.4))
        assert closed.all_pass_deviation() < 1e-8

    def test_gamma_one_loop_degenerates_to_identity(self):
        w = np.linspace(-5, 5, 11)
        g = transfer_function(cavity_linear_model(0.0, 1.0), w)
        closed = compose_feedback(g, None, Beamsplitter.from_gamma_phi(1.0))
        assert np.allclose(closed.xi_minus[:, 0, 0], 1.0)

    def test_ill_posed_loop_reports_frequencies(self):
        # a gain-2 "loop" against s22 = 1/2 makes 1 - s22 L vanish everywhere
        w = np.linspace(-5, 5, 11)
        hot = TransferFunction(
            omegas=w,
            xi_minus=np.full((11, 1, 1), 2.0 + 0j),
            xi_plus=np.zeros((11, 1, 1), dtype=complex),
        )
        bs = Beamsplitter.from_gamma_phi(0.25)
        with pytest.raises(WellPosednessError) as exc_info:
            compose_feedback(hot, None, bs)
        assert exc_info.value.omegas is not None
        assert len(exc_info.value.omegas) == 11

    def test_non_passive_subsystem_rejected(self):
        w = np.linspace(-5, 5, 11)
        bad = TransferFunction(
            omegas=w,
            xi_minus=np.ones((11, 1, 1), dtype=complex),
            xi_plus=np.full((11, 1, 1), 0.1 + 0j),
        )
        with pytest.raises(ParameterError):
            compose_feedback(bad, None, Beamsplitter.from_gamma_phi(0.5))


class TestTopology:
    def test_single_loop_validates(self):
        top = single_loop_topology()
        assert top.external_input == ("bs", 0)

    def test_dangling_and_double_wiring_rejected(self):
        with pytest.raises(ValidationError):
            NetworkTopology(
                components=("bs", "G"),
                wiring={("bs", 1): ("G", 0), ("G", 0): ("G", 0)},
                external_input=("bs", 0),
                external_output=("bs", 0),
            ).validate()
        with pytest.raises(ValidationError):
            NetworkTopology(
                components=("bs",),
                wiring={("bs", 1): ("X", 0)},
                external_input=("bs", 0),
                external_output=("bs", 0),
            ).validate()
