"""Metric operators, Dyson maps, and pseudo-Hermiticity residual checks.

A Hamiltonian H(t) is pseudo-Hermitian with respect to a positive-definite
metric rho(t) when H(t)^dag rho - rho H(t) = i hbar d(rho)/dt.  The Dyson map
eta = rho^(1/2) carries the dynamics to an equivalent Hermitian problem via
h = eta H eta^(-1) - i hbar eta d(eta^(-1))/dt.  All residuals here are
Frobenius-normalized so pass/fail thresholds are scale free.

Truncation note: identities that hold in infinite dimension can acquire
errors in the top Fock levels because a^dag^2 couples out of the retained
space.  Residual checks therefore accept ``mask_top_quarter`` to restrict the
comparison to the trusted lower block.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidDimensionError, MetricViolationError
from .fock_algebra import FockOperator, FockState, hermitian_sqrt

HBAR = 1.0

__all__ = [
    "HBAR",
    "Metric",
    "DysonMap",
    "pseudo_inner",
    "pseudo_norm",
    "pseudo_expectation",
    "pseudo_hermiticity_residual",
    "schrodinger_op_pseudo_hermiticity_residual",
    "hermitian_counterpart",
    "pseudo_unitarity_residual",
]


def _trusted(M: np.ndarray) -> np.ndarray:
    k = M.shape[0] - M.shape[0] // 4
    return M[:k, :k]


@dataclass(frozen=True)
class Metric:
    """Metric rho(t) at one instant, optionally with its analytic derivative.

    rho_dot = None means the metric is time independent.
    """

    rho: FockOperator
    rho_dot: Optional[FockOperator] = None

    def __post_init__(self):
        R = self.rho.entries
        scale = np.linalg.norm(R, ord="fro")
        if np.linalg.norm(R - R.conj().T, ord="fro") > 1e-12 * max(scale, 1.0):
            raise MetricViolationError("metric must be Hermitian")
        if np.linalg.eigvalsh(R)[0] <= 0.0:
            raise MetricViolationError("metric must be positive definite")
        if self.rho_dot is not None and self.rho_dot.dim != self.rho.dim:
            raise InvalidDimensionError("rho_dot dimension differs from rho")

    @property
    def dim(self) -> int:
        return self.rho.dim


@dataclass(frozen=True)
class DysonMap:
    eta: FockOperator
    eta_inv: FockOperator

    def __post_init__(self):
        if self.eta.dim != self.eta_inv.dim:
            raise InvalidDimensionError("eta and eta_inv dimensions differ")
        I = np.eye(self.eta.dim)
        if np.linalg.norm(self.eta.entries @ self.eta_inv.entries - I) > 1e-10 * sqrt(
            self.eta.dim
        ):
            raise MetricViolationError("eta_inv is not the inverse of eta")

    @classmethod
    def from_metric(cls, m: Metric) -> "DysonMap":
        eta = hermitian_sqrt(m.rho)
        return cls(eta, FockOperator(eta.dim, np.linalg.inv(eta.entries)))


def pseudo_inner(u: FockState, v: FockState, m: Metric) -> complex:
    """<u|rho|v>; conjugate symmetric for Hermitian rho."""
    if u.dim != v.dim or u.dim != m.dim:
        raise InvalidDimensionError("dimension mismatch in pseudo inner product")
    return complex(u.amplitudes.conj() @ (m.rho.entries @ v.amplitudes))


def pseudo_norm(v: FockState, m: Metric) -> float:
    return sqrt(max(pseudo_inner(v, v, m).real, 0.0))


def pseudo_expectation(op: FockOperator, v: FockState, m: Metric) -> complex:
    """<v|rho O|v> / <v|rho|v>."""
    num = complex(v.amplitudes.conj() @ (m.rho.entries @ (op.entries @ v.amplitudes)))
    return num / pseudo_inner(v, v, m)


def pseudo_hermiticity_residual(
    H_fn: Callable[[float], FockOperator],
    m: Metric,
    t: float,
    mask_top_quarter: bool = False,
) -> float:
    """||H(t)^dag rho - rho H(t) - i hbar rho_dot||_F / ||rho||_F."""
    H = H_fn(t).entries
    rho = m.rho.entries
    R = H.conj().T @ rho - rho @ H
    if m.rho_dot is not None:
        R = R - 1j * HBAR * m.rho_dot.entries
    if mask_top_quarter:
        R = _trusted(R)
        rho = _trusted(rho)
    return np.linalg.norm(R, ord="fro") / np.linalg.norm(rho, ord="fro")


def schrodinger_op_pseudo_hermiticity_residual(
    H_fn: Callable[[float], FockOperator],
    m: Metric,
    times: np.ndarray,
    trajectories: Sequence[Sequence[FockState]],
) -> float:
    """Observability check for L = H - i hbar d/dt against test trajectories.

    For each pair (u, v) of supplied trajectories evaluates
    <u|rho (L v)> - <(L u)|rho|v> at interior grid points, with time
    derivatives by central differences, and returns the largest magnitude.
    The relation holds for any smooth test trajectories when rho L = L^dag rho.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise ValueError("need at least 3 grid points for central differences")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0.0):
        raise ValueError("grid must be uniform")
    dt = dts[0]
    rho = m.rho.entries

    mats = [np.stack([s.amplitudes for s in traj], axis=0) for traj in trajectories]
    worst = 0.0
    for k in range(1, times.size - 1):
        H = H_fn(times[k]).entries
        Lv = [
            H @ U[k] - 1j * HBAR * (U[k + 1] - U[k - 1]) / (2.0 * dt) for U in mats
        ]
        for iu, U in enumerate(mats):
            ru = rho @ U[k]
            for iv in range(len(mats)):
                val = ru.conj() @ Lv[iv] - Lv[iu].conj() @ (rho @ mats[iv][k])
                worst = max(worst, abs(val))
    return worst


def hermitian_counterpart(
    H_fn: Callable[[float], FockOperator],
    d: DysonMap,
    eta_inv_dot: Optional[FockOperator],
    t: float,
) -> FockOperator:
    """h(t) = eta H(t) eta^(-1) - i hbar eta d(eta^(-1))/dt.

    Pass eta_inv_dot = None for a time-independent Dyson map.  The caller may
    assert Hermiticity of the result; it holds whenever (eta, rho, H) satisfy
    the pseudo-Hermiticity relation.
    """
    h = d.eta.entries @ H_fn(t).entries @ d.eta_inv.entries
    if eta_inv_dot is not None:
        if eta_inv_dot.dim != d.eta.dim:
            raise InvalidDimensionError("eta_inv_dot dimension differs from eta")
        h = h - 1j * HBAR * (d.eta.entries @ eta_inv_dot.entries)
    return FockOperator(d.eta.dim, h)


def pseudo_unitarity_residual(
    S: FockOperator, m: Metric, mask_top_quarter: bool = False
) -> float:
    """||S^dag rho S - rho||_F / ||rho||_F."""
    if S.dim != m.dim:
        raise InvalidDimensionError("dimension mismatch in pseudo-unitarity check")
    rho = m.rho.entries
    R = S.entries.conj().T @ rho @ S.entries - rho
    if mask_top_quarter:
        R = _trusted(R)
        rho = _trusted(rho)
    return np.linalg.norm(R, ord="fro") / np.linalg.norm(rho, ord="fro")
