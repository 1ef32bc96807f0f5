"""Exception types shared across the package."""

from __future__ import annotations


class PhotonflowError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(PhotonflowError, ValueError):
    """Matrix or channel dimensions do not conform."""


class ParameterError(PhotonflowError, ValueError):
    """A physical parameter is outside its admissible range."""


class ModelError(PhotonflowError, ValueError):
    """A model violates a structural requirement (e.g. non-Hermitian Hamiltonian data)."""


class ConsistencyError(PhotonflowError, RuntimeError):
    """An internally guaranteed identity failed beyond tolerance."""


class StabilityError(PhotonflowError, ValueError):
    """System matrix is not Hurwitz, so no steady state exists.

    The offending eigenvalues are stored on ``eigenvalues``.
    """

    def __init__(self, message: str, eigenvalues=None):
        super().__init__(message)
        self.eigenvalues = eigenvalues


class GridCoverageError(PhotonflowError, ValueError):
    """Time grid captures too little pulse energy. Measured coverage on ``coverage``."""

    def __init__(self, message: str, coverage: float | None = None):
        super().__init__(message)
        self.coverage = coverage


class UnsupportedKindError(PhotonflowError, ValueError):
    """Operation does not apply to this pulse kind."""


class ValidationError(PhotonflowError, ValueError):
    """A constructed object failed its defining numerical check (e.g. unitarity).

    The measured deviation is stored on ``deviation``.
    """

    def __init__(self, message: str, deviation: float | None = None):
        super().__init__(message)
        self.deviation = deviation


class WellPosednessError(PhotonflowError, ValueError):
    """Feedback loop gain makes I - loop singular at some grid frequencies."""

    def __init__(self, message: str, omegas=None):
        super().__init__(message)
        self.omegas = omegas


class IntegrationDivergedError(PhotonflowError, RuntimeError):
    """Numerical integration produced non-finite values. Step index on ``step``."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class UnsupportedConfigError(PhotonflowError, ValueError):
    """Requested configuration is outside the supported regime."""


class ConfigError(PhotonflowError, ValueError):
    """Scenario configuration is invalid; message carries field-level details."""
