"""Truncated Fock-space operator algebra.

Everything in this package lives on the first ``dim`` number states
|0>, ..., |dim-1> as dense complex matrices.  Antilinear maps are stored as a
linear matrix composed with entrywise complex conjugation in the Fock basis,
so operator equations involving them reduce to matrix equations with explicit
conj() insertions.  Units: hbar = 1, frequencies in units of the unmodulated
cavity frequency unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import InvalidDimensionError, MetricViolationError, NumericError

__all__ = [
    "FockOperator",
    "AntilinearOperator",
    "FockState",
    "ladder_ops",
    "number_op",
    "parity_op",
    "identity_op",
    "basis_state",
    "vacuum_state",
    "matrix_exp",
    "hermitian_sqrt",
    "apply_antilinear",
]


def _check_dims(*dims):
    if len(set(dims)) != 1:
        raise InvalidDimensionError(f"dimension mismatch: {dims}")


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on the truncated Fock space.

    The matrix is fully populated; there is no implicit sparsity contract.
    Truncation artifacts concentrate in the top levels, so comparisons against
    infinite-dimensional identities should mask or avoid the highest quarter.
    """

    dim: int
    entries: np.ndarray

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidDimensionError(f"need dim >= 2, got {self.dim}")
        arr = np.ascontiguousarray(self.entries, dtype=complex)
        if arr.shape != (self.dim, self.dim):
            raise InvalidDimensionError(
                f"entries shape {arr.shape} does not match dim {self.dim}"
            )
        object.__setattr__(self, "entries", arr)

    def dagger(self) -> "FockOperator":
        return FockOperator(self.dim, self.entries.conj().T)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            _check_dims(self.dim, other.dim)
            return FockOperator(self.dim, self.entries @ other.entries)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, FockOperator):
            _check_dims(self.dim, other.dim)
            return FockOperator(self.dim, self.entries + other.entries)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, FockOperator):
            _check_dims(self.dim, other.dim)
            return FockOperator(self.dim, self.entries - other.entries)
        return NotImplemented

    def __mul__(self, c):
        if np.isscalar(c):
            return FockOperator(self.dim, c * self.entries)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return FockOperator(self.dim, -self.entries)


@dataclass(frozen=True)
class FockState:
    """State vector on the truncated Fock space."""

    dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidDimensionError(f"need dim >= 2, got {self.dim}")
        arr = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if arr.shape != (self.dim,):
            raise InvalidDimensionError(
                f"amplitudes shape {arr.shape} does not match dim {self.dim}"
            )
        object.__setattr__(self, "amplitudes", arr)


@dataclass(frozen=True)
class AntilinearOperator:
    """Antilinear map v -> linear_part @ conj(v) in the Fock basis.

    The linear part must be invertible; symmetry operators are assumed
    invertible throughout.  Composing two antilinear maps cancels the
    conjugations and yields a plain linear operator.
    """

    linear_part: FockOperator

    def __post_init__(self):
        sv = np.linalg.svd(self.linear_part.entries, compute_uv=False)
        if not np.all(np.isfinite(sv)) or sv[-1] <= 1e-12 * max(sv[0], 1.0):
            raise NumericError("antilinear operator needs an invertible linear part")

    @property
    def dim(self) -> int:
        return self.linear_part.dim

    def compose(self, other: "AntilinearOperator") -> FockOperator:
        """Linear operator equal to self applied after other."""
        _check_dims(self.dim, other.dim)
        return FockOperator(
            self.dim, self.linear_part.entries @ other.linear_part.entries.conj()
        )


def ladder_ops(dim: int) -> tuple[FockOperator, FockOperator]:
    """Annihilation and creation matrices a, a^dag on dim levels.

    a|n> = sqrt(n)|n-1>, a^dag|n> = sqrt(n+1)|n+1> with the top row/column
    truncated.  [a, a^dag] = 1 holds exactly except in the last diagonal entry.
    """
    if dim < 2:
        raise InvalidDimensionError(f"need dim >= 2, got {dim}")
    n = np.arange(1, dim)
    a = np.zeros((dim, dim), dtype=complex)
    a[n - 1, n] = np.sqrt(n)
    return FockOperator(dim, a), FockOperator(dim, a.conj().T)


def number_op(dim: int) -> FockOperator:
    return FockOperator(dim, np.diag(np.arange(dim)).astype(complex))


def parity_op(dim: int) -> FockOperator:
    """diag((-1)^n), the photon-number parity."""
    return FockOperator(dim, np.diag((-1.0) ** np.arange(dim)).astype(complex))


def identity_op(dim: int) -> FockOperator:
    return FockOperator(dim, np.eye(dim, dtype=complex))


def basis_state(dim: int, n: int) -> FockState:
    if not 0 <= n < dim:
        raise InvalidDimensionError(f"level {n} outside 0..{dim - 1}")
    amp = np.zeros(dim, dtype=complex)
    amp[n] = 1.0
    return FockState(dim, amp)


def vacuum_state(dim: int) -> FockState:
    return basis_state(dim, 0)


def matrix_exp(A: FockOperator) -> FockOperator:
    """exp(A) by scaling and squaring, reliable to ~1e-12 relative accuracy."""
    if not np.all(np.isfinite(A.entries)):
        raise NumericError("non-finite entries in matrix exponential input")
    return FockOperator(A.dim, expm(A.entries))


def hermitian_sqrt(A: FockOperator, tol: float = 1e-10) -> FockOperator:
    """Hermitian square root of a Hermitian positive-definite matrix.

    Eigenvalues are allowed to graze zero within tol (they are clamped);
    anything more negative, or a non-Hermitian input, is a metric violation.
    """
    H = A.entries
    scale = np.linalg.norm(H, ord="fro")
    if np.linalg.norm(H - H.conj().T, ord="fro") > tol * max(scale, 1.0):
        raise MetricViolationError("hermitian_sqrt input is not Hermitian")
    w, V = np.linalg.eigh(H)
    if w[0] <= -tol * max(abs(w[-1]), 1.0):
        raise MetricViolationError(
            f"hermitian_sqrt input is not positive definite (min eigenvalue {w[0]:.3e})"
        )
    B = (V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T
    B = 0.5 * (B + B.conj().T)
    return FockOperator(A.dim, B)


def apply_antilinear(K: AntilinearOperator, v: FockState) -> FockState:
    if K.dim != v.dim:
        raise InvalidDimensionError(f"dimension mismatch: {K.dim} vs {v.dim}")
    return FockState(v.dim, K.linear_part.entries @ v.amplitudes.conj())
