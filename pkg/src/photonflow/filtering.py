"""Conditional and unconditional dynamics of a system driven by one photon.

The conditional state under two homodyne measurements is carried by a
quartet of matrix blocks (rho11, rho10, rho01, rho00): rho11 is the
normalized conditional density operator, rho00 the auxiliary vacuum-record
block, rho10 the cross block, and rho01 is its adjoint by construction. The
coupled stochastic equations are integrated by Euler-Maruyama (noise enters
linearly, so strong order 1/2 suffices at the default step); the
unconditional master equation is the same drift with the noise terms
removed and is integrated with classical RK4.

Measurement records are synthesized in the standard quantum-trajectory way:
innovations are drawn as independent Wiener increments and the record
increment is dY = k dt + dW with k the filter's own prediction. Each
trajectory owns an RNG stream seeded as seed + trajectory index, so ensembles
are reproducible and embarrassingly parallel; PHOTONFLOW_THREADS caps the
worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    GridCoverageError,
    IntegrationDivergedError,
    ParameterError,
    UnsupportedConfigError,
    ValidationError,
)
from .hilbert import SLHModel, pure_density
from .pulses import (
    PulseShape,
    apply_spectral_filter,
    default_grid,
    energy_in_window,
    eval_time,
    fft_spectrum,
    ifft_pulse,
    norm_l2,
    sample_pulse,
)
from .network import cavity_response

COLUMN_UNITARITY_TOL = 1e-12
PULSE_COVERAGE_MIN = 0.9999


@dataclass(frozen=True)
class HomodyneConfig:
    """Beamsplitter column feeding the two homodyne detectors.

    Only s11 (amplitude-quadrature weight) and s21 (phase-quadrature weight)
    enter the filter; the remaining entries are irrelevant and not stored.
    """

    s11: complex = 1.0
    s21: complex = 0.0

    def __post_init__(self):
        dev = abs(abs(self.s11) ** 2 + abs(self.s21) ** 2 - 1.0)
        if dev > COLUMN_UNITARITY_TOL:
            raise ValidationError(
                f"|s11|^2 + |s21|^2 must equal 1; deviation {dev:.3e}",
                deviation=dev,
            )

    @property
    def perfect(self) -> bool:
        return self.s11 == 1.0 and self.s21 == 0.0


PERFECT_MEASUREMENT = HomodyneConfig(1.0, 0.0)


@dataclass(frozen=True)
class FilterState:
    """Conditional-state quartet at one instant. rho01 is stored as the exact
    adjoint of rho10."""

    rho11: np.ndarray
    rho10: np.ndarray
    rho01: np.ndarray
    rho00: np.ndarray
    t: float

    @classmethod
    def initial(cls, eta0: np.ndarray, t0: float) -> "FilterState":
        rho = pure_density(eta0)
        zero = np.zeros_like(rho)
        return cls(rho11=rho, rho10=zero, rho01=zero.copy(), rho00=rho.copy(), t=t0)

    def trace_defect(self) -> float:
        return abs(np.trace(self.rho11).real - 1.0)

    def hermiticity_defect(self) -> float:
        return float(
            max(
                np.linalg.norm(self.rho11 - self.rho11.conj().T),
                np.linalg.norm(self.rho00 - self.rho00.conj().T),
            )
        )


@dataclass(frozen=True)
class MeasurementRecord:
    """Homodyne increments on a uniform grid: dy are the record increments,
    dw the innovations, linked by dW_j = dY_j - k_j dt."""

    dt: float
    dy: np.ndarray  # (n_steps, 2)
    dw: np.ndarray  # (n_steps, 2)

    @property
    def n_steps(self) -> int:
        return self.dy.shape[0]

    def predictions(self) -> np.ndarray:
        """The k_j dt series implied by the stored increments."""
        return self.dy - self.dw


class _Precomp:
    """Operator products reused every step."""

    def __init__(self, model: SLHModel):
        self.l = model.coupling
        self.ld = self.l.conj().T
        self.ldl = self.ld @ self.l
        self.s = model.scattering
        self.sd = self.s.conj().T
        self.h = model.hamiltonian
        self.dim = model.dim

    def liouville(self, rho: np.ndarray) -> np.ndarray:
        h, l, ld, ldl = self.h, self.l, self.ld, self.ldl
        return (
            -1j * (h @ rho - rho @ h)
            + l @ rho @ ld
            - 0.5 * (ldl @ rho + rho @ ldl)
        )


def _dagger(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x, -1, -2).conj()


def _trace(x: np.ndarray) -> np.ndarray:
    return np.einsum("...ii->...", x)


def _em_step(pre, s11, s21, xi, rho11, rho10, rho00, dw1, dw2, dt):
    """One Euler-Maruyama step of the full two-measurement filter.

    All rho arguments may carry leading batch dimensions; xi, dw1, dw2 are
    scalars or arrays broadcastable against those batch dimensions. Returns
    the updated blocks (hermitized) and the predictions (k1, k2).
    """
    l, ld, s, sd = pre.l, pre.ld, pre.s, pre.sd
    xi_c = np.conjugate(xi)
    abs2 = (xi * xi_c).real
    s11c = np.conjugate(s11)
    s21c = np.conjugate(s21)

    s_rho01 = s @ _dagger(rho10)
    rho10_sd = rho10 @ sd
    s_rho00 = s @ rho00

    # drift
    d11 = (
        pre.liouville(rho11)
        + (s_rho01 @ ld - ld @ s_rho01) * xi
        + (l @ rho10_sd - rho10_sd @ l) * xi_c
        + (s_rho00 @ sd - rho00) * abs2
    )
    d10 = pre.liouville(rho10) + (s_rho00 @ ld - ld @ s_rho00) * xi
    d00 = pre.liouville(rho00)

    # predictions (real by hermiticity of rho11 and rho01 = rho10^dag)
    tr_l11 = _trace(l @ rho11)
    tr_ld11 = _trace(ld @ rho11)
    tr_s01 = _trace(s_rho01)
    tr_10sd = _trace(rho10_sd)
    k1 = (s11 * tr_l11 + s11c * tr_ld11 + s11 * tr_s01 * xi + s11c * tr_10sd * xi_c).real
    k2 = (
        -1j * s21 * tr_l11
        + 1j * s21c * tr_ld11
        - 1j * s21 * tr_s01 * xi
        + 1j * s21c * tr_10sd * xi_c
    ).real

    def bc(x):
        # broadcast a per-batch scalar against (..., d, d) blocks
        return np.asarray(x)[..., None, None] if np.ndim(x) else x

    k1b, k2b = bc(k1), bc(k2)
    g1_11 = s11c * rho11 @ ld + s11 * l @ rho11 + s11c * rho10_sd * xi_c + s11 * s_rho01 * xi - rho11 * k1b
    g2_11 = (
        1j * s21c * rho11 @ ld
        - 1j * s21 * l @ rho11
        + 1j * s21c * rho10_sd * xi_c
        - 1j * s21 * s_rho01 * xi
        - rho11 * k2b
    )
    g1_10 = s11c * rho10 @ ld + s11 * l @ rho10 + s11 * s_rho00 * xi - rho10 * k1b
    g2_10 = 1j * s21c * rho10 @ ld - 1j * s21 * l @ rho10 - 1j * s21 * s_rho00 * xi - rho10 * k2b
    g1_00 = s11c * rho00 @ ld + s11 * l @ rho00 - rho00 * k1b
    g2_00 = 1j * s21c * rho00 @ ld - 1j * s21 * l @ rho00 - rho00 * k2b

    w1, w2 = bc(dw1), bc(dw2)
    new11 = rho11 + d11 * dt + g1_11 * w1 + g2_11 * w2
    new10 = rho10 + d10 * dt + g1_10 * w1 + g2_10 * w2
    new00 = rho00 + d00 * dt + g1_00 * w1 + g2_00 * w2

    new11 = 0.5 * (new11 + _dagger(new11))
    new00 = 0.5 * (new00 + _dagger(new00))
    return new11, new10, new00, k1, k2


def filter_step(
    model: SLHModel,
    cfg: HomodyneConfig,
    xi_t: complex,
    state: FilterState,
    dw1: float,
    dw2: float,
    dt: float,
) -> FilterState:
    """Advance the two-measurement filter by one step.

    rho11 and rho00 are re-hermitized after the update and rho01 is set to
    the exact adjoint of rho10.
    """
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    pre = _Precomp(model)
    with np.errstate(over="ignore", invalid="ignore"):
        new11, new10, new00, k1, k2 = _em_step(
            pre, cfg.s11, cfg.s21, xi_t, state.rho11, state.rho10, state.rho00, dw1, dw2, dt
        )
    if not (np.isfinite(k1) and np.isfinite(k2) and np.all(np.isfinite(new11))):
        raise IntegrationDivergedError("filter step produced non-finite values")
    return FilterState(
        rho11=new11, rho10=new10, rho01=new10.conj().T, rho00=new00, t=state.t + dt
    )


def filter_step_reduced(
    model: SLHModel,
    xi_t: complex,
    state: FilterState,
    dw1: float,
    dt: float,
) -> FilterState:
    """Perfect-measurement specialization: a single amplitude-quadrature
    detector, obtained from the full filter at s11 = 1, s21 = 0."""
    return filter_step(model, PERFECT_MEASUREMENT, xi_t, state, dw1, 0.0, dt)


@dataclass(frozen=True)
class TrajectoryResult:
    """One conditional path: block trajectories plus derived observables."""

    times: np.ndarray
    rho11: np.ndarray  # (n+1, d, d)
    rho10: np.ndarray
    rho00: np.ndarray

    @property
    def rho01(self) -> np.ndarray:
        return _dagger(self.rho10)

    def excitation(self, observable: np.ndarray | None = None) -> np.ndarray:
        """<obs> along the path; defaults to the top-level projector
        (the excited state of a two-level system)."""
        if observable is None:
            return self.rho11[:, -1, -1].real
        return np.einsum("ij,tji->t", observable, self.rho11).real

    def trace11(self) -> np.ndarray:
        return _trace(self.rho11).real

    def trace10(self) -> np.ndarray:
        return _trace(self.rho10)


def _check_pulse_coverage(pulse: PulseShape, t_start: float, t_stop: float) -> None:
    if pulse.kind == "rising-exp" and t_start > -10.0 / pulse.beta:
        raise ParameterError(
            f"rising-exp needs t_start <= {-10.0 / pulse.beta:.3f}, got {t_start}"
        )
    if norm_l2(pulse) == 0.0:
        return  # vacuum input: nothing to cover
    coverage = energy_in_window(pulse, t_start, t_stop)
    if coverage < PULSE_COVERAGE_MIN:
        raise GridCoverageError(
            f"[{t_start}, {t_stop}] captures {coverage:.6f} of the pulse energy",
            coverage=coverage,
        )


def _run_batch(pre, cfg, xi_vals, rho0, dt, dw, observable, keep_path=False):
    """Step a stack of trajectories with pre-drawn noise.

    xi_vals: (n_steps,) pulse samples; rho0: (d, d); dw: (batch, n_steps, 2).
    Returns per-trajectory excitation curves, trace curves, Re tr rho10
    curves, prediction series, and optionally the full block paths.
    """
    batch, n_steps, _ = dw.shape
    d = rho0.shape[0]
    rho11 = np.broadcast_to(rho0, (batch, d, d)).copy()
    rho00 = rho11.copy()
    rho10 = np.zeros_like(rho11)

    exc = np.empty((batch, n_steps + 1))
    tr11 = np.empty((batch, n_steps + 1))
    tr10 = np.empty((batch, n_steps + 1), dtype=complex)
    ks = np.empty((batch, n_steps, 2))
    path = None
    if keep_path:
        path = (
            np.empty((batch, n_steps + 1, d, d), dtype=complex),
            np.empty((batch, n_steps + 1, d, d), dtype=complex),
            np.empty((batch, n_steps + 1, d, d), dtype=complex),
        )

    def observe(i):
        if observable is None:
            exc[:, i] = rho11[:, -1, -1].real
        else:
            exc[:, i] = np.einsum("ij,bji->b", observable, rho11).real
        tr11[:, i] = _trace(rho11).real
        tr10[:, i] = _trace(rho10)
        if keep_path:
            path[0][:, i] = rho11
            path[1][:, i] = rho10
            path[2][:, i] = rho00

    observe(0)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(n_steps):
            rho11, rho10, rho00, k1, k2 = _em_step(
                pre, cfg.s11, cfg.s21, xi_vals[i], rho11, rho10, rho00,
                dw[:, i, 0], dw[:, i, 1], dt,
            )
            ks[:, i, 0] = k1
            ks[:, i, 1] = k2
            if not np.all(np.isfinite(k1)):
                raise IntegrationDivergedError(
                    f"trajectory integration diverged at step {i}", step=i
                )
            observe(i + 1)
    return exc, tr11, tr10, ks, path


def simulate_trajectory(
    model: SLHModel,
    cfg: HomodyneConfig,
    pulse: PulseShape,
    eta0: np.ndarray,
    t_start: float,
    t_stop: float,
    dt: float,
    seed: int,
    observable: np.ndarray | None = None,
) -> tuple[TrajectoryResult, MeasurementRecord]:
    """Generate one conditional trajectory with a synthesized record.

    Innovations are drawn as independent N(0, dt) increments from
    default_rng(seed); the recorded increments are dY = k dt + dW. The same
    seed reproduces the identical path and record.
    """
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    _check_pulse_coverage(pulse, t_start, t_stop)
    n_steps = int(round((t_stop - t_start) / dt))
    times = t_start + dt * np.arange(n_steps + 1)
    xi_vals = np.asarray(eval_time(pulse, times[:-1]))
    rng = np.random.default_rng(seed)
    dw = rng.normal(0.0, np.sqrt(dt), size=(1, n_steps, 2))
    pre = _Precomp(model)
    exc, tr11, tr10, ks, path = _run_batch(
        pre, cfg, xi_vals, pure_density(eta0), dt, dw, observable, keep_path=True
    )
    result = TrajectoryResult(
        times=times, rho11=path[0][0], rho10=path[1][0], rho00=path[2][0]
    )
    record = MeasurementRecord(dt=dt, dy=ks[0] * dt + dw[0], dw=dw[0])
    return result, record


@dataclass(frozen=True)
class EnsembleResult:
    """Trajectory ensemble summary: per-trajectory excitation curves plus
    their pointwise mean and standard error."""

    times: np.ndarray
    excitation: np.ndarray  # (n_traj, n_times)
    mean: np.ndarray
    stderr: np.ndarray
    max_trace_defect: float

    @property
    def n_traj(self) -> int:
        return self.excitation.shape[0]


def _thread_count(explicit: int | None) -> int:
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("PHOTONFLOW_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ParameterError(f"PHOTONFLOW_THREADS must be an integer, got {env!r}")
    return 1


def simulate_ensemble(
    model: SLHModel,
    cfg: HomodyneConfig,
    pulse: PulseShape,
    eta0: np.ndarray,
    t_start: float,
    t_stop: float,
    dt: float,
    n_traj: int,
    seed: int,
    observable: np.ndarray | None = None,
    max_workers: int | None = None,
) -> EnsembleResult:
    """Run n_traj independent trajectories and average the excitation.

    Trajectory i draws its noise from default_rng(seed + i), so the ensemble
    is independent of worker count and chunking. Workers default to
    PHOTONFLOW_THREADS (or 1); trajectories within a chunk are stepped as a
    stacked batch.
    """
    if n_traj < 1:
        raise ParameterError(f"n_traj must be >= 1, got {n_traj}")
    _check_pulse_coverage(pulse, t_start, t_stop)
    n_steps = int(round((t_stop - t_start) / dt))
    times = t_start + dt * np.arange(n_steps + 1)
    xi_vals = np.asarray(eval_time(pulse, times[:-1]))
    rho0 = pure_density(eta0)
    pre = _Precomp(model)

    def run_chunk(indices: np.ndarray):
        dw = np.empty((indices.size, n_steps, 2))
        for row, idx in enumerate(indices):
            dw[row] = np.random.default_rng(seed + int(idx)).normal(
                0.0, np.sqrt(dt), size=(n_steps, 2)
            )
        exc, tr11, _, _, _ = _run_batch(pre, cfg, xi_vals, rho0, dt, dw, observable)
        return exc, np.max(np.abs(tr11 - 1.0))

    workers = _thread_count(max_workers)
    chunks = np.array_split(np.arange(n_traj), min(workers, n_traj))
    if workers == 1 or len(chunks) == 1:
        outputs = [run_chunk(c) for c in chunks if c.size]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(run_chunk, [c for c in chunks if c.size]))

    excitation = np.concatenate([o[0] for o in outputs], axis=0)
    max_trace_defect = float(max(o[1] for o in outputs))
    mean = excitation.mean(axis=0)
    if n_traj > 1:
        stderr = excitation.std(axis=0, ddof=1) / np.sqrt(n_traj)
    else:
        stderr = np.zeros_like(mean)
    return EnsembleResult(
        times=times,
        excitation=excitation,
        mean=mean,
        stderr=stderr,
        max_trace_defect=max_trace_defect,
    )


# --- unconditional (master) evolution ---------------------------------------


@dataclass(frozen=True)
class MasterState:
    """Unconditional block quartet at one instant."""

    rho11: np.ndarray
    rho10: np.ndarray
    rho01: np.ndarray
    rho00: np.ndarray
    t: float


@dataclass(frozen=True)
class MasterPath:
    """RK4 solution of the single-photon master equation."""

    times: np.ndarray
    rho11: np.ndarray
    rho10: np.ndarray
    rho00: np.ndarray

    @property
    def rho01(self) -> np.ndarray:
        return _dagger(self.rho10)

    def state_at(self, i: int) -> MasterState:
        return MasterState(
            rho11=self.rho11[i],
            rho10=self.rho10[i],
            rho01=self.rho10[i].conj().T,
            rho00=self.rho00[i],
            t=float(self.times[i]),
        )

    def excitation(self, observable: np.ndarray | None = None) -> np.ndarray:
        if observable is None:
            return self.rho11[:, -1, -1].real
        return np.einsum("ij,tji->t", observable, self.rho11).real

    def trace11(self) -> np.ndarray:
        return _trace(self.rho11).real

    def trace10(self) -> np.ndarray:
        return _trace(self.rho10)

    def max_trace_defect(self) -> float:
        return float(np.max(np.abs(self.trace11() - 1.0)))


def _master_rhs(pre, rho11, rho10, rho00, xi):
    """Drift of the unconditional quartet (scattering already reduced to I)."""
    l, ld = pre.l, pre.ld
    xi_c = np.conjugate(xi)
    rho01 = _dagger(rho10)
    d11 = (
        pre.liouville(rho11)
        + (rho01 @ ld - ld @ rho01) * xi
        + (l @ rho10 - rho10 @ l) * xi_c
    )
    d10 = pre.liouville(rho10) + (rho00 @ ld - ld @ rho00) * xi
    d00 = pre.liouville(rho00)
    return d11, d10, d00


def _require_identity_scattering(model: SLHModel) -> None:
    if not model.scattering_is_identity:
        raise UnsupportedConfigError(
            "master evolution is derived for identity scattering only"
        )


def master_evolve(
    model: SLHModel,
    pulse: PulseShape,
    eta0: np.ndarray,
    t_start: float,
    t_stop: float,
    dt: float,
) -> MasterPath:
    """Integrate the single-photon master equation with RK4.

    The rho00 block evolves autonomously under the bare dissipative
    generator; rho11 stays trace-one to integrator accuracy.
    """
    _require_identity_scattering(model)
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")
    _check_pulse_coverage(pulse, t_start, t_stop)
    n_steps = int(round((t_stop - t_start) / dt))
    times = t_start + dt * np.arange(n_steps + 1)
    xi_full = np.asarray(eval_time(pulse, times))
    xi_half = np.asarray(eval_time(pulse, times[:-1] + 0.5 * dt))

    pre = _Precomp(model)
    d = model.dim
    rho11 = pure_density(eta0)
    rho00 = rho11.copy()
    rho10 = np.zeros((d, d), dtype=complex)

    out11 = np.empty((n_steps + 1, d, d), dtype=complex)
    out10 = np.empty_like(out11)
    out00 = np.empty_like(out11)
    out11[0], out10[0], out00[0] = rho11, rho10, rho00

    for i in range(n_steps):
        x0, xh, x1 = xi_full[i], xi_half[i], xi_full[i + 1]
        k1 = _master_rhs(pre, rho11, rho10, rho00, x0)
        k2 = _master_rhs(pre, rho11 + 0.5 * dt * k1[0], rho10 + 0.5 * dt * k1[1], rho00 + 0.5 * dt * k1[2], xh)
        k3 = _master_rhs(pre, rho11 + 0.5 * dt * k2[0], rho10 + 0.5 * dt * k2[1], rho00 + 0.5 * dt * k2[2], xh)
        k4 = _master_rhs(pre, rho11 + dt * k3[0], rho10 + dt * k3[1], rho00 + dt * k3[2], x1)
        rho11 = rho11 + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        rho10 = rho10 + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        rho00 = rho00 + dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        out11[i + 1], out10[i + 1], out00[i + 1] = rho11, rho10, rho00

    if not np.all(np.isfinite(out11[-1])):
        raise IntegrationDivergedError("master integration diverged", step=n_steps)
    return MasterPath(times=times, rho11=out11, rho10=out10, rho00=out00)


def excitation_curves(
    model: SLHModel,
    pulses: list[PulseShape],
    eta0: np.ndarray,
    t_start: float,
    t_stop: float,
    dt: float,
    observable: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Excitation curves of the master equation for a family of pulses,
    integrated as one stacked RK4 run. Returns (times, curves) with curves of
    shape (len(pulses), n_times)."""
    _require_identity_scattering(model)
    for p in pulses:
        _check_pulse_coverage(p, t_start, t_stop)
    n_steps = int(round((t_stop - t_start) / dt))
    times = t_start + dt * np.arange(n_steps + 1)
    xi_full = np.stack([np.asarray(eval_time(p, times)) for p in pulses])
    xi_half = np.stack([np.asarray(eval_time(p, times[:-1] + 0.5 * dt)) for p in pulses])

    pre = _Precomp(model)
    d = model.dim
    n_p = len(pulses)
    rho0 = pure_density(eta0)
    rho11 = np.broadcast_to(rho0, (n_p, d, d)).copy()
    rho00 = rho11.copy()
    rho10 = np.zeros_like(rho11)
    curves = np.empty((n_p, n_steps + 1))

    def observe(i):
        if observable is None:
            curves[:, i] = rho11[:, -1, -1].real
        else:
            curves[:, i] = np.einsum("ij,bji->b", observable, rho11).real

    observe(0)
    col = lambda x: x[:, None, None]
    for i in range(n_steps):
        x0, xh, x1 = col(xi_full[:, i]), col(xi_half[:, i]), col(xi_full[:, i + 1])
        k1 = _master_rhs(pre, rho11, rho10, rho00, x0)
        k2 = _master_rhs(pre, rho11 + 0.5 * dt * k1[0], rho10 + 0.5 * dt * k1[1], rho00 + 0.5 * dt * k1[2], xh)
        k3 = _master_rhs(pre, rho11 + 0.5 * dt * k2[0], rho10 + 0.5 * dt * k2[1], rho00 + 0.5 * dt * k2[2], xh)
        k4 = _master_rhs(pre, rho11 + dt * k3[0], rho10 + dt * k3[1], rho00 + dt * k3[2], x1)
        rho11 = rho11 + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        rho10 = rho10 + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        rho00 = rho00 + dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        observe(i + 1)
    return times, curves


def excitation_balance(
    pulse: PulseShape,
    kappa: float,
    t_up: float,
    grid=None,
) -> float:
    """Energy-balance integral of input minus output detection probability
    up to t_up, with the output pulse from the emitter's all-pass map
    (i w - kappa/2) / (i w + kappa/2).

    Vanishes as t_up grows (the map is all-pass), and at intermediate times
    equals the excitation stored in the emitter."""
    if kappa <= 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    if grid is None:
        grid = default_grid(pulse, rates=(kappa,))
    spectrum = fft_spectrum(pulse, grid)
    h = cavity_response(0.0, kappa, spectrum.omegas)
    eta = ifft_pulse(apply_spectral_filter(spectrum, h))
    times = grid.times
    if t_up < times[0]:
        return 0.0
    xi_s = sample_pulse(pulse, grid)
    integrand = np.abs(xi_s) ** 2 - np.abs(eta.values) ** 2
    mask = times <= t_up
    f = getattr(np, "trapezoid", None) or np.trapz
    total = float(f(integrand[mask], dx=grid.dt))
    # partial cell up to t_up
    last = int(np.nonzero(mask)[0][-1])
    if last + 1 < times.size and t_up > times[last]:
        frac = (t_up - times[last]) / grid.dt
        mid = integrand[last] + 0.5 * frac * (integrand[last + 1] - integrand[last])
        total += mid * frac * grid.dt
    return total
