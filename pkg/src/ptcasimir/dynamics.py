"""Schrodinger integration for nonautonomous (possibly non-Hermitian) H(t),
phase extraction for invariant mode bases, and solution assembly.

Solutions are written as |psi(t)> = sum_n c_n exp(-i alpha_n(t)/hbar) |n,t>
over modes |n,t> that diagonalize the Schrodinger operator L = H - i hbar d/dt
with respect to the metric, alpha_dot_n = <n,t|L|n,t>_rho.  Phases are always
accumulated by integrating alpha_dot, never by taking arguments of overlaps,
so no 2 pi unwrapping ambiguity arises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import expm

from .casimir_model import CasimirParams, squeeze_params, xi_phase
from .errors import (
    IntegrationOverflowError,
    InvariantBasisError,
    ProjectionDeficitError,
)
from .fock_algebra import FockOperator, FockState
from .metric_dyson import HBAR, Metric, pseudo_inner, pseudo_norm

__all__ = [
    "Trajectory",
    "PhaseExtraction",
    "integrate",
    "lr_phase_extract",
    "expansion_coefficients",
    "assemble_solution",
    "phase_parity_check",
    "mode_phase_projection",
]


@dataclass(frozen=True)
class Trajectory:
    """Time grid, states, and metric norms of one integration or assembly.

    times is strictly monotonic (decreasing for backward runs); rho_norms[0]
    is 1 for integrate() output because the initial state is normalized in
    the metric.  phases optionally carries tracked alpha_n(t), one row per
    tracked mode.
    """

    times: np.ndarray
    states: list[FockState]
    rho_norms: np.ndarray
    phases: Optional[np.ndarray] = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(
            self, "rho_norms", np.asarray(self.rho_norms, dtype=float)
        )
        if times.size != len(self.states) or times.size != self.rho_norms.size:
            raise ValueError("times, states, rho_norms lengths disagree")
        d = np.diff(times)
        if times.size > 1 and not (np.all(d > 0.0) or np.all(d < 0.0)):
            raise ValueError("times must be strictly monotonic")


def _rho_norm(vec: np.ndarray, rho: Optional[np.ndarray]) -> float:
    if rho is None:
        return float(np.linalg.norm(vec))
    return float(np.sqrt(max((vec.conj() @ (rho @ vec)).real, 0.0)))


def integrate(
    H_fn: Callable[[float], FockOperator],
    psi0: FockState,
    grid: np.ndarray,
    tol: Optional[float] = None,
    m: Optional[Metric] = None,
    method: str = "rk4",
    norm_cap: float = 1e6,
) -> Trajectory:
    """Integrate i hbar d|psi>/dt = H(t)|psi> through the given time grid.

    Fixed-step integration between consecutive grid points, forward or
    backward.  method "rk4" is the classical Runge-Kutta step; "expmid" is
    the exponential midpoint rule exp(-i h H(t+h/2)) which preserves metric
    norms to machine precision whenever H is pseudo-Hermitian with a
    time-independent metric.  tol, if given, bounds the local error per step
    by subdividing grid intervals (step length (120 tol)^(1/5) / ||H||).

    The initial state is normalized to unit metric norm.  Growth past
    norm_cap (plain or metric norm, hyperbolic regimes) raises
    IntegrationOverflowError carrying the partial trajectory.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise ValueError("grid needs at least 2 points")
    if tol is not None and tol <= 0.0:
        raise ValueError("tol must be positive")
    if method not in ("rk4", "expmid"):
        raise ValueError(f"unknown method {method!r}")

    rho = m.rho.entries if m is not None else None
    y = psi0.amplitudes.copy()
    n0 = _rho_norm(y, rho)
    if n0 <= 0.0:
        raise ValueError("initial state has nonpositive metric norm")
    y = y / n0

    dt_max = np.inf
    if tol is not None:
        Hnorm = np.linalg.norm(H_fn(grid[0]).entries, ord=2)
        if Hnorm > 0.0:
            dt_max = (120.0 * tol) ** 0.2 / Hnorm

    dim = psi0.dim
    states = [FockState(dim, y.copy())]
    norms = [1.0]

    def fail(k: int, why: str) -> IntegrationOverflowError:
        partial = Trajectory(
            grid[: k + 1], states, np.asarray(norms, dtype=float)
        )
        return IntegrationOverflowError(
            f"integration stopped at t = {grid[k]:g}: {why}", partial=partial
        )

    for k in range(grid.size - 1):
        t0, t1 = grid[k], grid[k + 1]
        span = t1 - t0
        nsub = max(1, int(np.ceil(abs(span) / dt_max))) if np.isfinite(dt_max) else 1
        if nsub > 10_000_000:
            raise fail(k, "step size underflow for requested tolerance")
        h = span / nsub
        t = t0
        for _ in range(nsub):
            if method == "rk4":
                Ht = H_fn(t).entries
                Hm = H_fn(t + 0.5 * h).entries
                He = H_fn(t + h).entries
                c = -1j / HBAR
                k1 = c * (Ht @ y)
                k2 = c * (Hm @ (y + 0.5 * h * k1))
                k3 = c * (Hm @ (y + 0.5 * h * k2))
                k4 = c * (He @ (y + h * k3))
                y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            else:
                Hm = H_fn(t + 0.5 * h).entries
                y = expm((-1j * h / HBAR) * Hm) @ y
            t += h
        if not np.all(np.isfinite(y)):
            raise fail(k, "state became non-finite")
        rn = _rho_norm(y, rho)
        if rn > norm_cap or np.linalg.norm(y) > norm_cap:
            raise fail(k, f"norm exceeded cap {norm_cap:g}")
        states.append(FockState(dim, y.copy()))
        norms.append(rn)

    return Trajectory(grid, states, np.asarray(norms, dtype=float))


@dataclass(frozen=True)
class PhaseExtraction:
    """Extracted phases alpha_n(t) with their dynamical/geometric split.

    rates holds alpha_dot_n(t) = <n,t|H - i hbar d/dt|n,t>_rho; alphas is its
    cumulative trapezoid integral anchored at t = 0 (grid start if 0 is not
    on the grid).  offdiag_residual is the largest off-diagonal matrix
    element of the Schrodinger operator in the supplied basis.
    """

    times: np.ndarray
    alphas: np.ndarray
    rates: np.ndarray
    dynamical: np.ndarray
    geometric: np.ndarray
    offdiag_residual: float


def _anchor_index(times: np.ndarray) -> int:
    k0 = int(np.argmin(np.abs(times)))
    scale = max(float(np.max(np.abs(times))), 1.0)
    return k0 if abs(times[k0]) <= 1e-12 * scale else 0


def lr_phase_extract(
    traj_basis: Sequence[Trajectory],
    H_fn: Callable[[float], FockOperator],
    m: Metric,
    offdiag_tol: float = 1e-6,
    basis_fn: Optional[Callable[[float], Sequence[FockState]]] = None,
    fd_step: float = 1e-5,
) -> PhaseExtraction:
    """Phases of an invariant mode basis supplied as trajectories.

    All trajectories must share one uniform time grid.  Off-diagonal elements
    <m,t|L|n,t>_rho above offdiag_tol mean the basis does not diagonalize the
    Schrodinger operator and raise InvariantBasisError.

    Mode derivatives default to gradients of the sampled trajectories, so the
    rate accuracy is tied to the grid spacing.  When the basis comes from a
    closed-form factory, pass it as basis_fn: derivatives are then central
    differences of the factory with step fd_step, decoupled from the grid.
    """
    times = traj_basis[0].times
    for tr in traj_basis[1:]:
        if tr.times.shape != times.shape or not np.allclose(
            tr.times, times, rtol=0.0, atol=1e-12
        ):
            raise ValueError("basis trajectories must share one time grid")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0.0):
        raise ValueError("grid must be uniform")

    nb = len(traj_basis)
    nt = times.size
    rho = m.rho.entries
    V = np.stack(
        [[s.amplitudes for s in tr.states] for tr in traj_basis], axis=0
    )  # (nb, nt, dim)
    if basis_fn is None:
        Vdot = np.gradient(V, times, axis=1)
    else:
        if fd_step <= 0.0:
            raise ValueError("fd_step must be positive")
        Vdot = np.empty_like(V)
        for k in range(nt):
            bp = basis_fn(times[k] + fd_step)
            bm = basis_fn(times[k] - fd_step)
            for n in range(nb):
                Vdot[n, k, :] = (bp[n].amplitudes - bm[n].amplitudes) / (
                    2.0 * fd_step
                )

    rate_dyn = np.empty((nb, nt), dtype=complex)
    rate_geo = np.empty((nb, nt), dtype=complex)
    offdiag = 0.0
    for k in range(nt):
        H = H_fn(times[k]).entries
        rv = V[:, k, :].conj() @ rho  # (nb, dim) rows <n| rho
        Hv = (H @ V[:, k, :].T).T
        Lv = Hv - 1j * HBAR * Vdot[:, k, :]
        M = rv @ Lv.T  # (nb, nb) pairings <m|rho L|n>
        rate_dyn[:, k] = np.einsum("nd,nd->n", rv, Hv)
        rate_geo[:, k] = -1j * HBAR * np.einsum("nd,nd->n", rv, Vdot[:, k, :])
        if 0 < k < nt - 1:
            off = M - np.diag(np.diag(M))
            offdiag = max(offdiag, float(np.max(np.abs(off))))
    if offdiag > offdiag_tol:
        raise InvariantBasisError(
            f"off-diagonal Schrodinger-operator element {offdiag:.3e} exceeds "
            f"{offdiag_tol:.1e}; the supplied basis is not an invariant basis"
        )

    rates = rate_dyn + rate_geo
    k0 = _anchor_index(times)

    def accumulate(r: np.ndarray) -> np.ndarray:
        out = cumulative_trapezoid(r, times, axis=1, initial=0.0)
        return out - out[:, k0][:, None]

    return PhaseExtraction(
        times=times,
        alphas=accumulate(rates),
        rates=rates,
        dynamical=accumulate(rate_dyn),
        geometric=accumulate(rate_geo),
        offdiag_residual=offdiag,
    )


def expansion_coefficients(
    psi0: FockState,
    basis0: Sequence[FockState],
    m: Metric,
    deficit_tol: float = 1e-6,
) -> np.ndarray:
    """c_n = <n,0|rho|psi0> for a metric-orthonormal mode basis at t = 0.

    Raises ProjectionDeficitError when psi0 is not in the span of the
    supplied modes to within deficit_tol (relative metric norm).
    """
    c = np.array([pseudo_inner(b, psi0, m) for b in basis0], dtype=complex)
    recon = np.zeros(psi0.dim, dtype=complex)
    for cn, b in zip(c, basis0):
        recon += cn * b.amplitudes
    deficit = _rho_norm(psi0.amplitudes - recon, m.rho.entries)
    ref = pseudo_norm(psi0, m)
    if deficit > deficit_tol * max(ref, 1e-300):
        raise ProjectionDeficitError(
            f"initial state has relative projection deficit {deficit / ref:.3e} "
            f"on the supplied {len(basis0)} modes"
        )
    return c


def assemble_solution(
    coeffs: np.ndarray,
    phases: PhaseExtraction,
    basis_fn: Callable[[float], Sequence[FockState]],
    t: float,
) -> FockState:
    """|psi(t)> = sum_n c_n exp(-i alpha_n(t)/hbar) |n,t>.

    t must lie on the extraction grid.
    """
    k = int(np.argmin(np.abs(phases.times - t)))
    scale = max(float(np.max(np.abs(phases.times))), 1.0)
    if abs(phases.times[k] - t) > 1e-9 * scale:
        raise ValueError(f"t = {t:g} is not on the phase-extraction grid")
    modes = basis_fn(t)
    dim = modes[0].dim
    out = np.zeros(dim, dtype=complex)
    for n, cn in enumerate(coeffs):
        out += cn * np.exp(-1j * phases.alphas[n, k] / HBAR) * modes[n].amplitudes
    return FockState(dim, out)


def phase_parity_check(times: np.ndarray, alphas: np.ndarray) -> float:
    """max over n, t of |conj(alpha_n(-t)) + alpha_n(t)| on a symmetric grid."""
    times = np.asarray(times, dtype=float)
    scale = max(float(np.max(np.abs(times))), 1.0)
    if not np.allclose(times + times[::-1], 0.0, atol=1e-12 * scale):
        raise ValueError("grid must be symmetric about t = 0")
    alphas = np.atleast_2d(np.asarray(alphas, dtype=complex))
    return float(np.max(np.abs(np.conj(alphas[:, ::-1]) + alphas)))


def mode_phase_projection(
    traj: Trajectory, p: CasimirParams, n: int = 0
) -> np.ndarray:
    """alpha_n(t) extracted from a single evolved state by mode projection.

    Projects the trajectory onto mode n through the inverse squeeze in the
    rotating frame, d_n(t) = [S(-r) U(t) psi(t)]_n, and integrates
    alpha_dot_n = i hbar d_dot_n / d_n by trapezoid.  Unlike the pairing
    route this stays convergent in the broken regime, where the mode basis
    columns grow with level and truncated pairings do not converge.
    """
    from .casimir_model import squeeze_operator  # local import to keep module load light

    r, _ = squeeze_params(p)
    dim = traj.states[0].dim
    S_inv = squeeze_operator(p, dim, r=-r).entries
    half = np.arange(dim) + 0.5

    times = traj.times
    d = np.empty(times.size, dtype=complex)
    for k, tk in enumerate(times):
        u = np.exp(1j * xi_phase(p, tk) * half) * traj.states[k].amplitudes
        d[k] = (S_inv @ u)[n]
    if np.min(np.abs(d)) <= 0.0:
        raise ProjectionDeficitError(f"mode {n} amplitude vanishes along the trajectory")
    rates = 1j * HBAR * np.gradient(d, times) / d
    alpha = cumulative_trapezoid(rates, times, initial=0.0)
    return alpha - alpha[_anchor_index(times)]
