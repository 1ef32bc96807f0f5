"""Finite-dimensional operators, (S, L, H) system records, and the open-system
generators used by filtering and master-equation integration.

Everything is dense: dimensions stay small (two-level systems, truncated
oscillators with a few tens of levels), so sparse machinery is unjustified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ModelError, ParameterError

UNITARITY_TOL = 1e-12
HERMITICITY_TOL = 1e-12

# Basis convention for two-level systems: index 0 is the ground state,
# index 1 the excited state.
GROUND = 0
EXCITED = 1


def basis_state(dim: int, index: int) -> np.ndarray:
    """Computational basis vector |index> in dimension dim."""
    if not 0 <= index < dim:
        raise DimensionError(f"index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def pure_density(vec: np.ndarray) -> np.ndarray:
    """|v><v| normalized to unit trace."""
    v = np.asarray(vec, dtype=complex).ravel()
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ParameterError("cannot normalize the zero vector")
    v = v / nrm
    return np.outer(v, v.conj())


def annihilation(dim: int) -> np.ndarray:
    """Truncated oscillator annihilation operator, a|n> = sqrt(n)|n-1>."""
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def sigma_minus() -> np.ndarray:
    """|g><e| in the (ground, excited) basis."""
    s = np.zeros((2, 2), dtype=complex)
    s[GROUND, EXCITED] = 1.0
    return s


def sigma_z() -> np.ndarray:
    """|e><e| - |g><g|."""
    s = np.zeros((2, 2), dtype=complex)
    s[EXCITED, EXCITED] = 1.0
    s[GROUND, GROUND] = -1.0
    return s


@dataclass(frozen=True)
class SLHModel:
    """Open quantum system record: scattering S (unitary), coupling L,
    Hamiltonian H (Hermitian), all d x d."""

    scattering: np.ndarray
    coupling: np.ndarray
    hamiltonian: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.scattering, dtype=complex)
        l = np.asarray(self.coupling, dtype=complex)
        h = np.asarray(self.hamiltonian, dtype=complex)
        d = s.shape[0]
        for name, op in (("scattering", s), ("coupling", l), ("hamiltonian", h)):
            if op.shape != (d, d):
                raise DimensionError(f"{name} must be {d}x{d}, got {op.shape}")
        eye = np.eye(d)
        dev = max(
            np.linalg.norm(s.conj().T @ s - eye, ord=np.inf),
            np.linalg.norm(s @ s.conj().T - eye, ord=np.inf),
        )
        if dev > UNITARITY_TOL:
            raise ModelError(f"scattering operator not unitary; deviation {dev:.3e}")
        dev = np.linalg.norm(h - h.conj().T, ord=np.inf)
        if dev > HERMITICITY_TOL * max(1.0, np.linalg.norm(h, ord=np.inf)):
            raise ModelError(f"Hamiltonian not Hermitian; deviation {dev:.3e}")
        for name, op in (("scattering", s), ("coupling", l), ("hamiltonian", h)):
            op = op.copy()
            op.flags.writeable = False
            object.__setattr__(self, name, op)

    @property
    def dim(self) -> int:
        return self.scattering.shape[0]

    @property
    def scattering_is_identity(self) -> bool:
        return bool(
            np.linalg.norm(self.scattering - np.eye(self.dim), ord=np.inf)
            <= UNITARITY_TOL
        )


def atom_model(omega_a: float, kappa: float) -> SLHModel:
    """Two-level emitter in a single waveguide channel.

    S = I, L = sqrt(kappa) |g><e|, H = (omega_a / 2) sigma_z, with omega_a the
    detuning from the field carrier and kappa the decay rate.
    """
    if kappa <= 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    return SLHModel(
        scattering=np.eye(2, dtype=complex),
        coupling=np.sqrt(kappa) * sigma_minus(),
        hamiltonian=0.5 * omega_a * sigma_z(),
    )


def cavity_model(omega_c: float, kappa: float, n_levels: int) -> SLHModel:
    """Truncated single-mode cavity on n_levels + 1 Fock states.

    The commutator [a, a^dag] equals the identity except in the top corner,
    which is the usual truncation artifact; keep the top-level population
    small in any simulation that uses this model.
    """
    if kappa <= 0:
        raise ParameterError(f"kappa must be positive, got {kappa}")
    if n_levels < 1:
        raise ParameterError(f"n_levels must be >= 1, got {n_levels}")
    a = annihilation(n_levels + 1)
    return SLHModel(
        scattering=np.eye(n_levels + 1, dtype=complex),
        coupling=np.sqrt(kappa) * a,
        hamiltonian=omega_c * (a.conj().T @ a),
    )


def _check_dim(model: SLHModel, x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape[-2:] != (model.dim, model.dim):
        raise DimensionError(
            f"{name} has shape {x.shape}, expected trailing ({model.dim}, {model.dim})"
        )
    return x


def lindbladian(model: SLHModel, x: np.ndarray) -> np.ndarray:
    """Heisenberg-picture generator: -i[X, H] + L^dag X L - (1/2){L^dag L, X}."""
    x = _check_dim(model, x, "operator")
    h, l = model.hamiltonian, model.coupling
    ld = l.conj().T
    ldl = ld @ l
    return (
        -1j * (x @ h - h @ x)
        + ld @ x @ l
        - 0.5 * (ldl @ x + x @ ldl)
    )


def liouvillian(model: SLHModel, rho: np.ndarray) -> np.ndarray:
    """Schroedinger-picture generator: -i[H, rho] + L rho L^dag - (1/2){L^dag L, rho}.

    Trace-free for every input, so unconditional evolution preserves
    normalization.
    """
    rho = _check_dim(model, rho, "density operator")
    h, l = model.hamiltonian, model.coupling
    ld = l.conj().T
    ldl = ld @ l
    return (
        -1j * (h @ rho - rho @ h)
        + l @ rho @ ld
        - 0.5 * (ldl @ rho + rho @ ldl)
    )
