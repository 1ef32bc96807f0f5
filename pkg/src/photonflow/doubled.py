"""Doubled-up matrix algebra for quantum linear systems.

Annihilation and creation coordinates are stacked, so every system matrix
carries the block symmetry [[U, V], [V#, U#]] with # the entrywise
conjugate. Storing only the (U, V) pair makes the symmetry unbreakable by
construction and halves memory; the full 2r x 2k matrix is materialized on
demand.

The adjoint respecting this structure is the flat operation
X^b = J X^dag J with J = diag(I, -I). A physical model must satisfy the
realizability conditions A + A^b + B B^b = 0 and B = -C^b, which encode
preservation of commutation relations and the non-demolition property.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConsistencyError, DimensionError, ModelError

# Realizability residual tolerance: double-precision headroom for n, m <= 16.
PR_TOL = 1e-10


def _as_complex_matrix(x, name: str = "matrix") -> np.ndarray:
    a = np.atleast_2d(np.asarray(x, dtype=complex))
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class DoubledUpMatrix:
    """The pair (U, V) standing for the block matrix [[U, V], [V#, U#]]."""

    upper_left: np.ndarray
    upper_right: np.ndarray

    def __post_init__(self):
        u = _as_complex_matrix(self.upper_left, "upper_left")
        v = _as_complex_matrix(self.upper_right, "upper_right")
        if u.shape != v.shape:
            raise DimensionError(
                f"block shapes differ: {u.shape} vs {v.shape}"
            )
        u = u.copy()
        v = v.copy()
        u.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "upper_left", u)
        object.__setattr__(self, "upper_right", v)

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.upper_left.shape

    @property
    def shape(self) -> tuple[int, int]:
        r, k = self.upper_left.shape
        return (2 * r, 2 * k)

    def full(self) -> np.ndarray:
        """Materialize the 2r x 2k matrix."""
        u, v = self.upper_left, self.upper_right
        return np.block([[u, v], [v.conj(), u.conj()]])

    def flat(self) -> "DoubledUpMatrix":
        """J X^dag J, which is again doubled-up: delta(U^dag, -V^T)."""
        return DoubledUpMatrix(self.upper_left.conj().T, -self.upper_right.T)

    def __add__(self, other: "DoubledUpMatrix") -> "DoubledUpMatrix":
        if not isinstance(other, DoubledUpMatrix):
            return NotImplemented
        return DoubledUpMatrix(
            self.upper_left + other.upper_left,
            self.upper_right + other.upper_right,
        )

    def __sub__(self, other: "DoubledUpMatrix") -> "DoubledUpMatrix":
        if not isinstance(other, DoubledUpMatrix):
            return NotImplemented
        return DoubledUpMatrix(
            self.upper_left - other.upper_left,
            self.upper_right - other.upper_right,
        )

    def __neg__(self) -> "DoubledUpMatrix":
        return DoubledUpMatrix(-self.upper_left, -self.upper_right)

    def __mul__(self, scalar) -> "DoubledUpMatrix":
        # Only real scalars commute with the block-conjugate symmetry.
        s = float(scalar)
        return DoubledUpMatrix(s * self.upper_left, s * self.upper_right)

    __rmul__ = __mul__

    def __matmul__(self, other: "DoubledUpMatrix") -> "DoubledUpMatrix":
        if not isinstance(other, DoubledUpMatrix):
            return NotImplemented
        if self.upper_left.shape[1] != other.upper_left.shape[0]:
            raise DimensionError(
                f"cannot multiply block shapes {self.block_shape} and {other.block_shape}"
            )
        u1, v1 = self.upper_left, self.upper_right
        u2, v2 = other.upper_left, other.upper_right
        return DoubledUpMatrix(u1 @ u2 + v1 @ v2.conj(), u1 @ v2 + v1 @ u2.conj())


def delta(u, v) -> DoubledUpMatrix:
    """Build the doubled-up matrix with upper row (U, V)."""
    return DoubledUpMatrix(_as_complex_matrix(u, "U"), _as_complex_matrix(v, "V"))


def sign_matrix(n: int) -> np.ndarray:
    """diag(I_n, -I_n), the metric of the doubled-up structure."""
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)])).astype(complex)


def split_blocks(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Upper row blocks (U, V) of an even-dimensioned matrix."""
    x = _as_complex_matrix(x)
    rows, cols = x.shape
    if rows % 2 or cols % 2:
        raise DimensionError(f"matrix shape {x.shape} is not even-dimensioned")
    r, k = rows // 2, cols // 2
    return x[:r, :k], x[:r, k:]


def flat(x) -> np.ndarray | DoubledUpMatrix:
    """The structure adjoint J_k X^dag J_r of a 2r x 2k matrix.

    Accepts either a raw even-dimensioned array (returns an array) or a
    DoubledUpMatrix (returns a DoubledUpMatrix).
    """
    if isinstance(x, DoubledUpMatrix):
        return x.flat()
    x = _as_complex_matrix(x)
    rows, cols = x.shape
    if rows % 2 or cols % 2:
        raise DimensionError(f"matrix shape {x.shape} is not even-dimensioned")
    r, k = rows // 2, cols // 2
    y = x.conj().T
    out = y.copy()
    out[:k, r:] = -y[:k, r:]
    out[k:, :r] = -y[k:, :r]
    return out


class RealizabilityReport(NamedTuple):
    """Frobenius norms of the two realizability defects."""

    commutation_residual: float
    demolition_residual: float

    def ok(self, tol: float = PR_TOL) -> bool:
        return self.commutation_residual < tol and self.demolition_residual < tol


def realizability_residuals(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> RealizabilityReport:
    """Residuals of A + A^b + B B^b = 0 and B = -C^b for raw full matrices."""
    res_comm = np.linalg.norm(a + flat(a) + b @ flat(b))
    res_demo = np.linalg.norm(b + flat(c))
    return RealizabilityReport(float(res_comm), float(res_demo))


@dataclass(frozen=True)
class LinearSystemModel:
    """Quantum linear system with n internal modes and m field channels.

    Physical parameters are the Hamiltonian blocks (omega_minus, omega_plus)
    and coupling blocks (c_minus, c_plus); the derived state-space matrices
    a, b, c satisfy the realizability conditions by construction.
    """

    omega_minus: np.ndarray
    omega_plus: np.ndarray
    c_minus: np.ndarray
    c_plus: np.ndarray
    a: DoubledUpMatrix
    b: DoubledUpMatrix
    c: DoubledUpMatrix

    @property
    def n(self) -> int:
        return self.omega_minus.shape[0]

    @property
    def m(self) -> int:
        return self.c_minus.shape[0]

    @property
    def passive(self) -> bool:
        """No creation-operator content: omega_plus = 0 and c_plus = 0."""
        return not (np.any(self.omega_plus) or np.any(self.c_plus))


def build_state_space(
    omega_minus,
    omega_plus=None,
    c_minus=None,
    c_plus=None,
    *,
    tol: float = PR_TOL,
) -> LinearSystemModel:
    """Construct the state-space model from physical parameters.

    C = delta(C-, C+), B = -C^b, and A = -i J Omega - (1/2) C^b C, which is
    the unique drift consistent with the realizability conditions. Both
    residuals are verified after construction.
    """
    om = _as_complex_matrix(omega_minus, "omega_minus")
    n = om.shape[0]
    if om.shape != (n, n):
        raise DimensionError(f"omega_minus must be square, got {om.shape}")
    op = (
        np.zeros((n, n), dtype=complex)
        if omega_plus is None or np.isscalar(omega_plus) and omega_plus == 0
        else _as_complex_matrix(omega_plus, "omega_plus")
    )
    if op.shape != (n, n):
        raise DimensionError(f"omega_plus must be {n}x{n}, got {op.shape}")
    cm = (
        np.zeros((0, n), dtype=complex)
        if c_minus is None
        else _as_complex_matrix(c_minus, "c_minus")
    )
    m = cm.shape[0]
    if cm.shape != (m, n):
        raise DimensionError(f"c_minus must have {n} columns, got {cm.shape}")
    cp = (
        np.zeros((m, n), dtype=complex)
        if c_plus is None or np.isscalar(c_plus) and c_plus == 0
        else _as_complex_matrix(c_plus, "c_plus")
    )
    if cp.shape != (m, n):
        raise DimensionError(f"c_plus must be {m}x{n}, got {cp.shape}")

    if n > 0:
        omega_full = delta(om, op).full()
        dev = np.linalg.norm(omega_full - omega_full.conj().T, ord=np.inf)
        if dev > 1e-10 * max(1.0, np.linalg.norm(omega_full, ord=np.inf)):
            raise ModelError(
                f"delta(omega_minus, omega_plus) must be Hermitian; deviation {dev:.3e}"
            )

    c = delta(cm, cp)
    c_flat = c.flat()
    b = -c_flat
    # -i J Omega is doubled-up: upper row (-i Om-, -i Om+).
    minus_i_j_omega = delta(-1j * om, -1j * op)
    a = minus_i_j_omega - 0.5 * (c_flat @ c)

    model = LinearSystemModel(
        omega_minus=om, omega_plus=op, c_minus=cm, c_plus=cp, a=a, b=b, c=c
    )
    report = check_realizability(model)
    if not report.ok(tol):
        raise ConsistencyError(
            "realizability residuals exceed tolerance: "
            f"{report.commutation_residual:.3e}, {report.demolition_residual:.3e}"
        )
    return model


def check_realizability(model: LinearSystemModel) -> RealizabilityReport:
    """Measure the two realizability defects of a constructed model."""
    return realizability_residuals(model.a.full(), model.b.full(), model.c.full())


def cavity_linear_model(omega_c: float, kappa: float) -> LinearSystemModel:
    """Single-mode cavity: detuning omega_c, linewidth kappa."""
    if kappa <= 0:
        raise ModelError(f"kappa must be positive, got {kappa}")
    return build_state_space([[omega_c]], 0, [[np.sqrt(kappa)]], 0)


def static_model(m: int = 1) -> LinearSystemModel:
    """Zero-mode pass-through system; its transfer function is the identity."""
    return build_state_space(
        np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((m, 0)), np.zeros((m, 0))
    )


def random_model(rng: np.random.Generator, n: int, m: int, *, passive: bool = False) -> LinearSystemModel:
    """Random realizable model, used by diagnostics and tests.

    omega_minus is drawn Hermitian and omega_plus symmetric so that the
    doubled-up Hamiltonian matrix is Hermitian; couplings are unconstrained.
    """

    def cmat(rows, cols):
        return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))

    m_minus = cmat(n, n)
    om = 0.5 * (m_minus + m_minus.conj().T)
    cm = cmat(m, n)
    if passive:
        op = np.zeros((n, n), dtype=complex)
        cp = np.zeros((m, n), dtype=complex)
    else:
        m_plus = cmat(n, n)
        op = 0.5 * (m_plus + m_plus.T)
        cp = cmat(m, n)
    return build_state_space(om, op, cm, cp)
