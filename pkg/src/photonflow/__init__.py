"""photonflow: single-photon pulses in open quantum systems.

Steady-state propagation through quantum linear systems (doubled-up matrix
algebra, transfer functions on the imaginary axis), coherent feedback pulse
shaping, and stochastic filtering / master-equation integration for
finite-dimensional systems driven by a single photon.
"""

__version__ = "0.1.0"

from .doubled import (
    DoubledUpMatrix,
    LinearSystemModel,
    RealizabilityReport,
    build_state_space,
    cavity_linear_model,
    check_realizability,
    delta,
    flat,
    random_model,
    sign_matrix,
    static_model,
)
from .pulses import (
    PulseShape,
    SpectrumView,
    TimeGrid,
    apply_spectral_filter,
    decaying_exp,
    default_grid,
    energy_in_window,
    eval_spectrum,
    eval_time,
    fft_spectrum,
    gaussian_pulse,
    ifft_pulse,
    norm_l2,
    pulse_window,
    rising_exp,
    sample_pulse,
    sampled_pulse,
)
from .response import (
    CovarianceSpectrum,
    ImpulseResponse,
    PhotonGaussianState,
    PropagationResult,
    TransferFunction,
    impulse_response,
    propagate_photon,
    propagate_photon_gaussian,
    transfer_function,
    vacuum_covariance,
)
from .network import (
    Beamsplitter,
    NetworkTopology,
    bare_cavity_output,
    bs_apply,
    cavity_response,
    closed_loop_shape,
    compose_feedback,
    compose_series,
    identity_transfer,
    loop_response,
    single_loop_topology,
)
from .hilbert import (
    EXCITED,
    GROUND,
    SLHModel,
    atom_model,
    basis_state,
    cavity_model,
    lindbladian,
    liouvillian,
    pure_density,
)
from .filtering import (
    EnsembleResult,
    FilterState,
    HomodyneConfig,
    MasterPath,
    MasterState,
    MeasurementRecord,
    PERFECT_MEASUREMENT,
    TrajectoryResult,
    excitation_balance,
    excitation_curves,
    filter_step,
    filter_step_reduced,
    master_evolve,
    simulate_ensemble,
    simulate_trajectory,
)

__all__ = [
    "__version__",
    # doubled-up algebra
    "DoubledUpMatrix", "LinearSystemModel", "RealizabilityReport",
    "build_state_space", "cavity_linear_model", "check_realizability",
    "delta", "flat", "random_model", "sign_matrix", "static_model",
    # pulses
    "PulseShape", "SpectrumView", "TimeGrid", "apply_spectral_filter",
    "decaying_exp", "default_grid", "energy_in_window", "eval_spectrum",
    "eval_time", "fft_spectrum", "gaussian_pulse", "ifft_pulse", "norm_l2",
    "pulse_window", "rising_exp", "sample_pulse", "sampled_pulse",
    # linear response
    "CovarianceSpectrum", "ImpulseResponse", "PhotonGaussianState",
    "PropagationResult", "TransferFunction", "impulse_response",
    "propagate_photon", "propagate_photon_gaussian", "transfer_function",
    "vacuum_covariance",
    # feedback networks
    "Beamsplitter", "NetworkTopology", "bare_cavity_output", "bs_apply",
    "cavity_response", "closed_loop_shape", "compose_feedback",
    "compose_series", "identity_transfer", "loop_response",
    "single_loop_topology",
    # operators
    "EXCITED", "GROUND", "SLHModel", "atom_model", "basis_state",
    "cavity_model", "lindbladian", "liouvillian", "pure_density",
    # filtering
    "EnsembleResult", "FilterState", "HomodyneConfig", "MasterPath",
    "MasterState", "MeasurementRecord", "PERFECT_MEASUREMENT",
    "TrajectoryResult", "excitation_balance", "excitation_curves",
    "filter_step", "filter_step_reduced", "master_evolve",
    "simulate_ensemble", "simulate_trajectory",
]
