"""Impulse response, frequency response on the imaginary axis, and
steady-state propagation of single-photon and photon-Gaussian field states
through quantum linear systems.

The frequency response is evaluated only at s = i w: the steady-state
output-state results need no other contour. A system must be Hurwitz for the
steady state to exist; zero-coupling systems are accepted as exact identity
maps. For passive systems the response is block-diagonal and all-pass, so a
single photon stays a single photon with unit norm and the vacuum covariance
is left invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .doubled import DoubledUpMatrix, LinearSystemModel
from .errors import ConsistencyError, DimensionError, StabilityError
from .pulses import (
    PulseShape,
    SpectrumView,
    TimeGrid,
    default_grid,
    fft_spectrum,
    ifft_pulse,
)

HURWITZ_TOL = 1e-12
ALL_PASS_TOL = 1e-8
_SOLVE_CHUNK = 8192


class ImpulseResponse(NamedTuple):
    """Response at one time: a flag for the delta-at-zero identity part plus
    the smooth part, which is -C exp(A t) C^b for t >= 0."""

    has_delta: bool
    smooth: DoubledUpMatrix


def impulse_response(model: LinearSystemModel, t: float) -> ImpulseResponse:
    m = model.m
    if t < 0:
        zero = np.zeros((m, m), dtype=complex)
        return ImpulseResponse(False, DoubledUpMatrix(zero, zero))
    if model.n == 0:
        zero = np.zeros((m, m), dtype=complex)
        return ImpulseResponse(True, DoubledUpMatrix(zero, zero))
    smooth_full = -model.c.full() @ expm(model.a.full() * t) @ model.c.flat().full()
    u = smooth_full[:m, :m]
    v = smooth_full[:m, m:]
    return ImpulseResponse(True, DoubledUpMatrix(u, v))


def _require_hurwitz(model: LinearSystemModel) -> None:
    if model.n == 0 or not np.any(model.c.full()):
        return  # decoupled from the field: response is the identity
    eigs = np.linalg.eigvals(model.a.full())
    bad = eigs[eigs.real >= -HURWITZ_TOL]
    if bad.size:
        raise StabilityError(
            f"system matrix is not Hurwitz; offending eigenvalues {bad}",
            eigenvalues=bad,
        )


@dataclass(frozen=True)
class TransferFunction:
    """Frequency response sampled on a grid, stored as the doubled-up block
    pair per grid point: xi_minus and xi_plus have shape (n_omega, m, m)."""

    omegas: np.ndarray
    xi_minus: np.ndarray
    xi_plus: np.ndarray
    model: LinearSystemModel | None = None

    @property
    def m(self) -> int:
        return self.xi_minus.shape[-1]

    @property
    def is_passive(self) -> bool:
        return not np.any(self.xi_plus)

    def at(self, index: int) -> DoubledUpMatrix:
        return DoubledUpMatrix(self.xi_minus[index], self.xi_plus[index])

    def full(self) -> np.ndarray:
        """Materialized (n_omega, 2m, 2m) array."""
        top = np.concatenate([self.xi_minus, self.xi_plus], axis=2)
        bot = np.concatenate([self.xi_plus.conj(), self.xi_minus.conj()], axis=2)
        return np.concatenate([top, bot], axis=1)

    def all_pass_deviation(self) -> float:
        """max over the grid of || Xi- Xi-^dag - I ||; zero means all-pass."""
        prod = self.xi_minus @ np.swapaxes(self.xi_minus, 1, 2).conj()
        eye = np.eye(self.m)
        return float(np.max(np.linalg.norm(prod - eye, axis=(1, 2))))


def transfer_function(model: LinearSystemModel, omegas: np.ndarray) -> TransferFunction:
    """Frequency response I - C (i w I - A)^{-1} C^b on the given grid.

    Requires a Hurwitz system (or zero coupling). For passive models the
    creation block vanishes and the annihilation block is verified unitary at
    every grid point.
    """
    omegas = np.asarray(omegas, dtype=float)
    m = model.m
    _require_hurwitz(model)
    n_w = omegas.size
    if model.n == 0 or not np.any(model.c.full()):
        xi_minus = np.broadcast_to(np.eye(m, dtype=complex), (n_w, m, m)).copy()
        xi_plus = np.zeros((n_w, m, m), dtype=complex)
        return TransferFunction(omegas=omegas, xi_minus=xi_minus, xi_plus=xi_plus, model=model)

    a_full = model.a.full()
    c_full = model.c.full()
    c_flat_full = model.c.flat().full()
    two_n = a_full.shape[0]
    eye_2n = np.eye(two_n, dtype=complex)
    eye_2m = np.eye(2 * m, dtype=complex)

    xi_minus = np.empty((n_w, m, m), dtype=complex)
    xi_plus = np.empty((n_w, m, m), dtype=complex)
    for start in range(0, n_w, _SOLVE_CHUNK):
        sl = slice(start, min(start + _SOLVE_CHUNK, n_w))
        w = omegas[sl]
        lhs = 1j * w[:, None, None] * eye_2n - a_full
        rhs = np.broadcast_to(c_flat_full, (w.size, two_n, 2 * m))
        resolvent_cb = np.linalg.solve(lhs, rhs)
        t_full = eye_2m - c_full @ resolvent_cb
        xi_minus[sl] = t_full[:, :m, :m]
        xi_plus[sl] = t_full[:, :m, m:]

    if model.passive:
        stray = float(np.max(np.abs(xi_plus))) if xi_plus.size else 0.0
        if stray > ALL_PASS_TOL:
            raise ConsistencyError(
                f"passive model produced a creation block of size {stray:.3e}"
            )
        xi_plus[:] = 0.0
        tf = TransferFunction(omegas=omegas, xi_minus=xi_minus, xi_plus=xi_plus, model=model)
        dev = tf.all_pass_deviation()
        if dev > ALL_PASS_TOL:
            raise ConsistencyError(
                f"passive response deviates from all-pass by {dev:.3e}"
            )
        return tf
    return TransferFunction(omegas=omegas, xi_minus=xi_minus, xi_plus=xi_plus, model=model)


@dataclass(frozen=True)
class CovarianceSpectrum:
    """Per-frequency 2m x 2m covariance of the field state."""

    omegas: np.ndarray
    values: np.ndarray

    @classmethod
    def vacuum(cls, omegas: np.ndarray, m: int = 1) -> "CovarianceSpectrum":
        """[[I, 0], [0, 0]] at every frequency."""
        omegas = np.asarray(omegas, dtype=float)
        block = np.zeros((2 * m, 2 * m), dtype=complex)
        block[:m, :m] = np.eye(m)
        values = np.broadcast_to(block, (omegas.size, 2 * m, 2 * m)).copy()
        return cls(omegas=omegas, values=values)


def vacuum_covariance(omegas: np.ndarray, m: int = 1) -> CovarianceSpectrum:
    return CovarianceSpectrum.vacuum(omegas, m)


@dataclass(frozen=True)
class PhotonGaussianState:
    """Field state described by an m x m matrix of pulse functions in the
    doubled-up pair (xi_minus, xi_plus), shapes (n_omega, m, m), together
    with a per-frequency covariance.

    normalization is the scalar sum over channels of the spectral energy
    difference between annihilation and creation content; passive
    vacuum-covariance propagation preserves it.
    """

    omegas: np.ndarray
    xi_minus: np.ndarray
    xi_plus: np.ndarray
    covariance: CovarianceSpectrum

    @property
    def m(self) -> int:
        return self.xi_minus.shape[-1]

    @property
    def d_omega(self) -> float:
        return float(self.omegas[1] - self.omegas[0])

    def normalization(self) -> float:
        energy = np.sum(np.abs(self.xi_minus) ** 2) - np.sum(np.abs(self.xi_plus) ** 2)
        return float(energy * self.d_omega)

    @classmethod
    def from_single_photon(cls, spectrum: SpectrumView) -> "PhotonGaussianState":
        """Single channel, one photon in the given spectrum, vacuum covariance."""
        vals = spectrum.values[:, None, None]
        zeros = np.zeros_like(vals)
        return cls(
            omegas=spectrum.omegas,
            xi_minus=vals,
            xi_plus=zeros,
            covariance=CovarianceSpectrum.vacuum(spectrum.omegas, 1),
        )


def propagate_photon_gaussian(
    model: LinearSystemModel, state: PhotonGaussianState
) -> PhotonGaussianState:
    """Steady-state action of a linear system on a photon-Gaussian state.

    Pointwise on the grid: the pulse matrix is multiplied by the doubled-up
    frequency response and the covariance is conjugated by it. The class is
    closed under this action.
    """
    if model.m != state.m:
        raise DimensionError(
            f"model has {model.m} channels but state has {state.m}"
        )
    tf = transfer_function(model, state.omegas)
    tf_full = tf.full()
    xi_full = _materialize_pair(state.xi_minus, state.xi_plus)
    out_full = tf_full @ xi_full
    m = state.m
    r_out = tf_full @ state.covariance.values @ np.swapaxes(tf_full, 1, 2).conj()
    return PhotonGaussianState(
        omegas=state.omegas,
        xi_minus=out_full[:, :m, :m],
        xi_plus=out_full[:, :m, m:],
        covariance=CovarianceSpectrum(omegas=state.omegas, values=r_out),
    )


def _materialize_pair(xi_minus: np.ndarray, xi_plus: np.ndarray) -> np.ndarray:
    top = np.concatenate([xi_minus, xi_plus], axis=2)
    bot = np.concatenate([xi_plus.conj(), xi_minus.conj()], axis=2)
    return np.concatenate([top, bot], axis=1)


@dataclass(frozen=True)
class PropagationResult:
    """Output of single-photon propagation: temporal pulse pair plus the
    output covariance and the frequency-domain data behind them."""

    pulse_minus: PulseShape
    pulse_plus: PulseShape
    spectrum_minus: SpectrumView
    spectrum_plus: SpectrumView
    covariance: CovarianceSpectrum

    def output_norm(self) -> float:
        """Temporal squared norm of the annihilation-part output pulse."""
        from .pulses import norm_l2

        return norm_l2(self.pulse_minus)


def model_rates(model: LinearSystemModel) -> tuple[float, ...]:
    """Characteristic rates of the system, for grid construction."""
    if model.n == 0:
        return ()
    eigs = np.linalg.eigvals(model.a.full())
    rates = []
    for lam in eigs:
        if lam.real < 0:
            rates.append(-2.0 * lam.real)
        if abs(lam.imag) > 0:
            rates.append(abs(lam.imag))
    return tuple(rates)


def propagate_photon(
    model: LinearSystemModel,
    pulse: PulseShape,
    grid: TimeGrid | None = None,
) -> PropagationResult:
    """Steady-state output of a single-channel system driven by one photon.

    The input photon rides on vacuum; the output pulse pair is the
    frequency response applied to (xi, 0) and the covariance transforms by
    conjugation. For a passive system the creation part vanishes, the
    covariance is unchanged, and the output pulse keeps unit norm.
    """
    if model.m != 1:
        raise DimensionError(f"single-photon propagation needs m = 1, got m = {model.m}")
    if grid is None:
        grid = default_grid(pulse, rates=model_rates(model))
    spectrum = fft_spectrum(pulse, grid)
    state = PhotonGaussianState.from_single_photon(spectrum)
    out = propagate_photon_gaussian(model, state)
    spec_minus = SpectrumView(
        omegas=spectrum.omegas, values=out.xi_minus[:, 0, 0], time_grid=grid
    )
    spec_plus = SpectrumView(
        omegas=spectrum.omegas, values=out.xi_plus[:, 0, 0], time_grid=grid
    )
    return PropagationResult(
        pulse_minus=ifft_pulse(spec_minus),
        pulse_plus=ifft_pulse(spec_plus),
        spectrum_minus=spec_minus,
        spectrum_plus=spec_plus,
        covariance=out.covariance,
    )
