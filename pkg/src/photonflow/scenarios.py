"""Named simulation scenarios behind the command-line front end.

Each scenario consumes a single JSON configuration document (flags override
file fields, which override defaults), runs deterministically for a fixed
seed, and emits one CSV of curves plus one JSON summary carrying the
headline quantities and the invariant-check flags (trace drift,
hermiticity, all-pass deviation, energy normalization).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .doubled import check_realizability, random_model
from .errors import ConfigError, PhotonflowError
from .filtering import (
    HomodyneConfig,
    excitation_curves,
    master_evolve,
    simulate_ensemble,
    simulate_trajectory,
)
from .hilbert import GROUND, atom_model, basis_state
from .network import bare_cavity_output, cavity_response, loop_response
from .pulses import (
    PulseShape,
    TimeGrid,
    apply_spectral_filter,
    decaying_exp,
    default_grid,
    energy_in_window,
    fft_spectrum,
    gaussian_pulse,
    ifft_pulse,
    pulse_window,
    rising_exp,
    sample_pulse,
)

SCENARIOS = (
    "cavity-response",
    "feedback-shaping",
    "filter-trajectory",
    "master-equation",
    "excitation-sweep",
    "realizability-check",
)

ENERGY_TOL = 1e-4
ALL_PASS_TOL = 1e-8
TRACE_TOL_MASTER = 1e-8
HERMITICITY_TOL = 1e-10


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class ScenarioConfig:
    """Validated scenario parameters; unset optionals stay None until
    scenario-specific defaults apply."""

    scenario: str
    seed: int | None = None
    out_dir: str = "."
    format: str = "both"
    kappa: float | None = None
    detuning: float = 0.0
    pulse: dict | None = None
    gamma_list: list = field(default_factory=lambda: [0.0, 0.5, 0.9])
    s11: complex = 1.0
    s21: complex = 0.0
    dt: float | None = None
    t_start: float | None = None
    t_stop: float | None = None
    grid_n: int | None = None
    n_traj: int = 1
    n_models: int = 100
    max_modes: int = 4
    max_channels: int = 4
    sweep: dict | None = None
    output_stride: int = 10

    @classmethod
    def from_sources(cls, file_doc: dict | None, overrides: dict | None) -> "ScenarioConfig":
        """Merge defaults < file < flags."""
        doc: dict = {}
        if file_doc:
            doc.update(file_doc)
        if overrides:
            doc.update({k: v for k, v in overrides.items() if v is not None})
        # omega_c / omega_a are aliases for the detuning slot
        for alias in ("omega_c", "omega_a"):
            if alias in doc:
                if "detuning" in doc and doc["detuning"] != doc[alias]:
                    raise ConfigError(f"conflicting detuning and {alias} fields")
                doc["detuning"] = doc.pop(alias)
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        for key in ("s11", "s21"):
            if key in doc and isinstance(doc[key], (list, tuple)):
                re_part, im_part = doc[key]
                doc[key] = complex(re_part, im_part)
        if "scenario" not in doc:
            raise ConfigError("missing required field: scenario")
        return cls(**doc)


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    numerics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors


def _build_pulse(doc: dict) -> PulseShape:
    kind = doc.get("kind")
    if kind == "decaying-exp":
        return decaying_exp(float(doc["beta"]))
    if kind == "rising-exp":
        return rising_exp(float(doc["beta"]))
    if kind == "gaussian":
        return gaussian_pulse(float(doc["bandwidth"]), float(doc.get("peak_time", 0.0)))
    raise ConfigError(f"pulse.kind must be decaying-exp, rising-exp, or gaussian, got {kind!r}")


def validate(cfg: ScenarioConfig) -> ValidationReport:
    """Static validation; never raises, the report lists every problem."""
    rep = ValidationReport()
    if cfg.scenario not in SCENARIOS:
        rep.errors.append(f"scenario: unknown name {cfg.scenario!r}; choose from {SCENARIOS}")
        return rep
    if cfg.seed is None:
        rep.errors.append("seed: required for every scenario (reproducibility contract)")
    if cfg.format not in ("csv", "json", "both"):
        rep.errors.append(f"format: must be csv, json, or both, got {cfg.format!r}")

    needs_kappa = cfg.scenario != "realizability-check"
    if needs_kappa:
        if cfg.kappa is None:
            rep.errors.append("kappa: required")
        elif cfg.kappa <= 0:
            rep.errors.append(f"kappa: must be positive, got {cfg.kappa}")

    needs_pulse = cfg.scenario in (
        "cavity-response", "feedback-shaping", "filter-trajectory",
        "master-equation", "excitation-sweep",
    )
    pulse = None
    if needs_pulse:
        if cfg.pulse is None:
            rep.errors.append("pulse: required")
        else:
            try:
                pulse = _build_pulse(cfg.pulse)
            except (ConfigError, PhotonflowError, KeyError, TypeError, ValueError) as exc:
                rep.errors.append(f"pulse: {exc}")

    if cfg.scenario == "feedback-shaping":
        for g in cfg.gamma_list:
            if not 0.0 <= g <= 1.0:
                rep.errors.append(f"gamma_list: value {g} outside [0, 1]")

    if cfg.scenario == "filter-trajectory":
        if cfg.n_traj < 1:
            rep.errors.append(f"n_traj: must be >= 1, got {cfg.n_traj}")
        dev = abs(abs(cfg.s11) ** 2 + abs(cfg.s21) ** 2 - 1.0)
        if dev > 1e-12:
            rep.errors.append(f"s11/s21: |s11|^2+|s21|^2 deviates from 1 by {dev:.3e}")

    if cfg.scenario in ("filter-trajectory", "master-equation") and cfg.dt is not None:
        if cfg.dt <= 0:
            rep.errors.append(f"dt: must be positive, got {cfg.dt}")

    if cfg.scenario == "excitation-sweep" and cfg.sweep is not None:
        sw = cfg.sweep
        if not {"start", "stop", "count"} <= set(sw):
            rep.errors.append("sweep: needs start, stop, count")
        elif not (0 < sw["start"] < sw["stop"]) or sw["count"] < 3:
            rep.errors.append(f"sweep: invalid range {sw}")

    if cfg.scenario == "realizability-check":
        if cfg.n_models < 1:
            rep.errors.append(f"n_models: must be >= 1, got {cfg.n_models}")

    # effective numerics for grid-based scenarios
    if pulse is not None and cfg.kappa and cfg.kappa > 0:
        if cfg.scenario in ("cavity-response", "feedback-shaping"):
            if cfg.grid_n is not None and cfg.grid_n < 16:
                rep.errors.append(f"grid_n: must be >= 16, got {cfg.grid_n}")
            grid = _spectral_grid(cfg, pulse)
            coverage = energy_in_window(pulse, grid.t_start, grid.t_end)
            rep.numerics.update(
                grid_n=grid.n,
                grid_dt=grid.dt,
                grid_window=[grid.t_start, grid.t_end],
                energy_coverage=coverage,
            )
            rep.warnings.append(f"coverage {coverage:.4%}")
        else:
            t0, t1, dt = _time_window(cfg, pulse)
            coverage = energy_in_window(pulse, t0, t1)
            rep.numerics.update(dt=dt, t_start=t0, t_stop=t1, energy_coverage=coverage)
            rep.warnings.append(f"coverage {coverage:.4%}")
            if coverage < 0.9999:
                rep.errors.append(
                    f"t_start/t_stop: window [{t0}, {t1}] captures only "
                    f"{coverage:.6f} of the pulse energy"
                )
    return rep


def _spectral_grid(cfg: ScenarioConfig, pulse: PulseShape):
    """FFT grid for the frequency-domain scenarios; grid_n overrides the
    automatic point count over the same window."""
    grid = default_grid(pulse, rates=(cfg.kappa, abs(cfg.detuning)))
    if cfg.grid_n is None:
        return grid
    span = grid.dt * grid.n
    return TimeGrid(t_start=grid.t_start, dt=span / cfg.grid_n, n=cfg.grid_n)


def _time_window(cfg: ScenarioConfig, pulse: PulseShape) -> tuple[float, float, float]:
    """Integration window covering the pulse plus the decay transient."""
    left, right, _ = pulse_window(pulse)
    pad = 6.0 / cfg.kappa
    t0 = cfg.t_start if cfg.t_start is not None else left - 0.5
    t1 = cfg.t_stop if cfg.t_stop is not None else right + pad
    dt = cfg.dt if cfg.dt is not None else 1e-3 / cfg.kappa
    return t0, t1, dt


def _invariant(checked: bool, value: float | None = None, ok: bool | None = None) -> dict:
    return {"checked": checked, "value": value, "ok": ok}


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([_fmt(float(x)) for x in row])


def _write_json(path: Path, doc: dict) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class ScenarioResult:
    summary: dict
    csv_path: Path | None
    json_path: Path | None


def run(cfg: ScenarioConfig) -> ScenarioResult:
    """Validate and execute a scenario, writing its output files."""
    report = validate(cfg)
    if not report.ok:
        raise ConfigError("; ".join(report.errors))
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = {
        "cavity-response": _run_cavity_response,
        "feedback-shaping": _run_feedback_shaping,
        "filter-trajectory": _run_filter_trajectory,
        "master-equation": _run_master_equation,
        "excitation-sweep": _run_excitation_sweep,
        "realizability-check": _run_realizability,
    }[cfg.scenario]
    header, columns, summary = runner(cfg)
    summary = {
        "scenario": cfg.scenario,
        "seed": cfg.seed,
        "version": __version__,
        **summary,
    }
    csv_path = json_path = None
    if cfg.format in ("csv", "both"):
        csv_path = out_dir / f"{cfg.scenario}.csv"
        _write_csv(csv_path, header, columns)
    if cfg.format in ("json", "both"):
        json_path = out_dir / f"{cfg.scenario}.json"
        _write_json(json_path, summary)
    return ScenarioResult(summary=summary, csv_path=csv_path, json_path=json_path)


def _energy_invariant(values: np.ndarray, dt: float) -> dict:
    f = getattr(np, "trapezoid", None) or np.trapz
    norm = float(f(np.abs(values) ** 2, dx=dt))
    return _invariant(True, abs(norm - 1.0), abs(norm - 1.0) < ENERGY_TOL)


def _run_cavity_response(cfg: ScenarioConfig):
    pulse = _build_pulse(cfg.pulse)
    out = bare_cavity_output(cfg.detuning, cfg.kappa, pulse, grid=_spectral_grid(cfg, pulse))
    grid = out.spectrum.time_grid
    xi_s = sample_pulse(pulse, grid)
    all_pass_dev = float(np.max(np.abs(np.abs(out.transfer) - 1.0)))
    energy = _energy_invariant(out.pulse.values, grid.dt)
    summary = {
        "params": {"kappa": cfg.kappa, "detuning": cfg.detuning, "pulse": cfg.pulse},
        "numerics": {"grid_n": grid.n, "grid_dt": grid.dt, "window": [grid.t_start, grid.t_end]},
        "peak_input": float(np.max(np.abs(xi_s) ** 2)),
        "peak_output": float(np.max(np.abs(out.pulse.values) ** 2)),
        "invariants": {
            "trace_drift": _invariant(False),
            "hermiticity": _invariant(False),
            "all_pass_deviation": _invariant(True, all_pass_dev, all_pass_dev < ALL_PASS_TOL),
            "energy_normalization": energy,
        },
    }
    header = ["t", "abs_xi_sq", "abs_eta1_sq"]
    columns = [grid.times, np.abs(xi_s) ** 2, np.abs(out.pulse.values) ** 2]
    return header, columns, summary


def _run_feedback_shaping(cfg: ScenarioConfig):
    pulse = _build_pulse(cfg.pulse)
    grid = _spectral_grid(cfg, pulse)
    spectrum = fft_spectrum(pulse, grid)
    xi_s = sample_pulse(pulse, grid)
    eta1 = ifft_pulse(
        apply_spectral_filter(
            spectrum, cavity_response(cfg.detuning, cfg.kappa, spectrum.omegas)
        )
    )
    header = ["t", "abs_xi_sq", "abs_eta1_sq"]
    columns = [grid.times, np.abs(xi_s) ** 2, np.abs(eta1.values) ** 2]
    f = getattr(np, "trapezoid", None) or np.trapz
    peaks, l1_distances, worst_energy, worst_all_pass = {}, {}, 0.0, 0.0
    for g in cfg.gamma_list:
        h = loop_response(cfg.detuning, cfg.kappa, g, spectrum.omegas)
        eta3 = ifft_pulse(apply_spectral_filter(spectrum, h))
        header.append(f"abs_eta3_sq_gamma_{g:g}")
        columns.append(np.abs(eta3.values) ** 2)
        key = f"{g:g}"
        peaks[key] = float(np.max(np.abs(eta3.values) ** 2))
        l1_distances[key] = float(
            f(np.abs(np.abs(eta3.values) ** 2 - np.abs(xi_s) ** 2), dx=grid.dt)
        )
        worst_energy = max(worst_energy, abs(float(f(np.abs(eta3.values) ** 2, dx=grid.dt)) - 1.0))
        worst_all_pass = max(worst_all_pass, float(np.max(np.abs(np.abs(h) - 1.0))))
    summary = {
        "params": {
            "kappa": cfg.kappa,
            "detuning": cfg.detuning,
            "pulse": cfg.pulse,
            "gamma_list": list(cfg.gamma_list),
        },
        "numerics": {"grid_n": grid.n, "grid_dt": grid.dt, "window": [grid.t_start, grid.t_end]},
        "peak_input": float(np.max(np.abs(xi_s) ** 2)),
        "output_peaks": peaks,
        "l1_distance_to_input": l1_distances,
        "invariants": {
            "trace_drift": _invariant(False),
            "hermiticity": _invariant(False),
            "all_pass_deviation": _invariant(True, worst_all_pass, worst_all_pass < ALL_PASS_TOL),
            "energy_normalization": _invariant(True, worst_energy, worst_energy < ENERGY_TOL),
        },
    }
    return header, columns, summary


def _run_filter_trajectory(cfg: ScenarioConfig):
    pulse = _build_pulse(cfg.pulse)
    t0, t1, dt = _time_window(cfg, pulse)
    model = atom_model(cfg.detuning, cfg.kappa)
    hom = HomodyneConfig(cfg.s11, cfg.s21)
    eta0 = basis_state(2, GROUND)
    traj, record = simulate_trajectory(model, hom, pulse, eta0, t0, t1, dt, cfg.seed)
    header = ["t", "P_e", "tr_rho11", "re_tr_rho10"]
    columns = [traj.times, traj.excitation(), traj.trace11(), traj.trace10().real]

    trace_defect = float(np.max(np.abs(traj.trace11() - 1.0)))
    herm = float(
        np.max(np.linalg.norm(traj.rho11 - np.swapaxes(traj.rho11, 1, 2).conj(), axis=(1, 2)))
    )
    trace_bound = 5.0 * dt * (t1 - t0)
    summary: dict = {
        "params": {
            "kappa": cfg.kappa,
            "detuning": cfg.detuning,
            "pulse": cfg.pulse,
            "s11": [cfg.s11.real, cfg.s11.imag] if isinstance(cfg.s11, complex) else cfg.s11,
            "s21": [cfg.s21.real, cfg.s21.imag] if isinstance(cfg.s21, complex) else cfg.s21,
        },
        "numerics": {"dt": dt, "t_start": t0, "t_stop": t1, "n_traj": cfg.n_traj},
        "invariants": {
            "trace_drift": _invariant(True, trace_defect, trace_defect < trace_bound),
            "hermiticity": _invariant(True, herm, herm < HERMITICITY_TOL),
            "all_pass_deviation": _invariant(False),
            "energy_normalization": _invariant(False),
        },
    }
    if cfg.n_traj > 1:
        ens = simulate_ensemble(
            model, hom, pulse, eta0, t0, t1, dt, n_traj=cfg.n_traj, seed=cfg.seed
        )
        stride = max(1, cfg.output_stride)
        summary["ensemble"] = {
            "n_traj": ens.n_traj,
            "t": ens.times[::stride].tolist(),
            "mean": ens.mean[::stride].tolist(),
            "stderr": ens.stderr[::stride].tolist(),
            "max_trace_defect": ens.max_trace_defect,
        }
        summary["invariants"]["trace_drift"] = _invariant(
            True,
            max(trace_defect, ens.max_trace_defect),
            max(trace_defect, ens.max_trace_defect) < trace_bound,
        )
    return header, columns, summary


def _run_master_equation(cfg: ScenarioConfig):
    pulse = _build_pulse(cfg.pulse)
    t0, t1, dt = _time_window(cfg, pulse)
    model = atom_model(cfg.detuning, cfg.kappa)
    path = master_evolve(model, pulse, basis_state(2, GROUND), t0, t1, dt)
    pe = path.excitation()
    i_max = int(np.argmax(pe))
    trace_defect = path.max_trace_defect()
    herm = float(
        np.max(np.linalg.norm(path.rho11 - np.swapaxes(path.rho11, 1, 2).conj(), axis=(1, 2)))
    )
    header = ["t", "P_e", "tr_rho11", "re_tr_rho10"]
    columns = [path.times, pe, path.trace11(), path.trace10().real]
    summary = {
        "params": {"kappa": cfg.kappa, "detuning": cfg.detuning, "pulse": cfg.pulse},
        "numerics": {"dt": dt, "t_start": t0, "t_stop": t1},
        "max_Pe": float(pe[i_max]),
        "t_at_max": float(path.times[i_max]),
        "invariants": {
            "trace_drift": _invariant(True, trace_defect, trace_defect < TRACE_TOL_MASTER),
            "hermiticity": _invariant(True, herm, herm < HERMITICITY_TOL),
            "all_pass_deviation": _invariant(False),
            "energy_normalization": _invariant(False),
        },
    }
    return header, columns, summary


def _default_sweep(cfg: ScenarioConfig) -> dict:
    kind = cfg.pulse.get("kind")
    if kind == "gaussian":
        return {"start": 0.5 * cfg.kappa, "stop": 3.0 * cfg.kappa, "count": 51}
    return {"start": 0.5 * cfg.kappa, "stop": 2.0 * cfg.kappa, "count": 31}


def _run_excitation_sweep(cfg: ScenarioConfig):
    sw = cfg.sweep or _default_sweep(cfg)
    values = np.linspace(sw["start"], sw["stop"], int(sw["count"]))
    kind = cfg.pulse.get("kind")
    peak_time = float(cfg.pulse.get("peak_time", 0.0))
    if kind == "gaussian":
        pulses = [gaussian_pulse(v, peak_time) for v in values]
        param = "bandwidth"
    elif kind == "rising-exp":
        pulses = [rising_exp(v) for v in values]
        param = "beta"
    elif kind == "decaying-exp":
        pulses = [decaying_exp(v) for v in values]
        param = "beta"
    else:
        raise ConfigError(f"unsupported sweep pulse kind {kind!r}")

    # window wide enough for the slowest pulse in the family
    lefts, rights = [], []
    for p in pulses:
        l, r, _ = pulse_window(p)
        lefts.append(l)
        rights.append(r)
    t0 = cfg.t_start if cfg.t_start is not None else min(lefts) - 0.5
    t1 = cfg.t_stop if cfg.t_stop is not None else max(rights) + 6.0 / cfg.kappa
    dt = cfg.dt if cfg.dt is not None else 5e-3 / cfg.kappa

    model = atom_model(cfg.detuning, cfg.kappa)
    times, curves = excitation_curves(model, pulses, basis_state(2, GROUND), t0, t1, dt)
    maxima = curves.max(axis=1)
    t_at_max = times[np.argmax(curves, axis=1)]
    j = int(np.argmax(maxima))
    header = ["param_value", "max_excitation", "t_at_max"]
    columns = [values, maxima, t_at_max]
    summary = {
        "params": {"kappa": cfg.kappa, "detuning": cfg.detuning, "pulse_kind": kind, "sweep_param": param},
        "numerics": {"dt": dt, "t_start": t0, "t_stop": t1, "count": int(sw["count"])},
        "argmax": float(values[j]),
        "max_excitation": float(maxima[j]),
        "invariants": {
            "trace_drift": _invariant(False),
            "hermiticity": _invariant(False),
            "all_pass_deviation": _invariant(False),
            "energy_normalization": _invariant(False),
        },
    }
    return header, columns, summary


def _run_realizability(cfg: ScenarioConfig):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(cfg.n_models):
        n = int(rng.integers(1, cfg.max_modes + 1))
        m = int(rng.integers(1, cfg.max_channels + 1))
        passive = bool(rng.integers(0, 2))
        model = random_model(rng, n, m, passive=passive)
        rep = check_realizability(model)
        rows.append((i, n, m, rep.commutation_residual, rep.demolition_residual))
    arr = np.array(rows, dtype=float)
    worst_comm = float(arr[:, 3].max())
    worst_demo = float(arr[:, 4].max())
    header = ["model_index", "n_modes", "n_channels", "commutation_residual", "demolition_residual"]
    columns = [arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4]]
    summary = {
        "params": {"n_models": cfg.n_models, "max_modes": cfg.max_modes, "max_channels": cfg.max_channels},
        "numerics": {},
        "max_commutation_residual": worst_comm,
        "max_demolition_residual": worst_demo,
        "all_ok": bool(worst_comm < 1e-10 and worst_demo < 1e-10),
        "invariants": {
            "trace_drift": _invariant(False),
            "hermiticity": _invariant(False),
            "all_pass_deviation": _invariant(False),
            "energy_normalization": _invariant(False),
        },
    }
    return header, columns, summary
