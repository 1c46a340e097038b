"""Time-dependent antilinear symmetries: construction, residuals, regime
classification.

An antilinear operator K(t) (stored as a linear matrix composed with
entrywise conjugation) is a symmetry of a nonautonomous H(t) when

    i hbar dK/dt + H(-t) K - K H(t) = 0,

which on the linear part L(t) reads
i hbar dL/dt + H(-t) L - L conj(H(t)) = 0.  For the modulated-cavity model the
basic such symmetry is parity times conjugation; its product with the
squeeze-rotated C operator built here is a symmetry as well.  Whether that
symmetry is spontaneously broken is decided by the spectrum of the averaged
generator together with the pairing of its modes under the symmetry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .casimir_model import (
    CasimirParams,
    Regime,
    hamiltonian,
    rwa_hamiltonian,
    squeeze_params,
    with_param,
    xi_phase,
)
from .errors import ExceptionalPointError
from .fock_algebra import (
    AntilinearOperator,
    FockOperator,
    FockState,
    ladder_ops,
    matrix_exp,
    parity_op,
)
from .metric_dyson import HBAR, Metric

__all__ = [
    "SymmetryVerdict",
    "LRInvariant",
    "pt_symmetry",
    "cpt_symmetry",
    "build_C_operator",
    "casimir_invariant",
    "antilinear_symmetry_residual",
    "linear_invariant_residual",
    "schrodinger_symmetry_residual",
    "mode_pairing_residual",
    "classify_regime",
    "symmetry_eigenphase",
    "antilinear_metric_residual",
    "find_exceptional_point",
    "ep_coalescence_overlap",
]


@dataclass(frozen=True)
class SymmetryVerdict:
    """Outcome of regime classification.

    eigenvalue_pairs matches each eps_n with its partner under complex
    conjugation (the time-independent reduction of the pairing rule);
    unbroken_residuals are the per-mode pairing residuals of the symmetry
    acting on the modes.
    """

    regime: Regime
    eigenvalue_pairs: list[tuple[complex, complex]]
    unbroken_residuals: list[float]
    ep_parameter: Optional[float] = None


@dataclass(frozen=True)
class LRInvariant:
    """A dynamical invariant I(t), satisfying i hbar dI/dt + [I, H] = 0."""

    I_fn: Callable[[float], FockOperator]


def pt_symmetry(dim: int) -> AntilinearOperator:
    """Parity times conjugation; maps |n> to (-1)^n |n>."""
    return AntilinearOperator(parity_op(dim))


def build_C_operator(p: CasimirParams, dim: int, t: float) -> FockOperator:
    """The squeeze-rotated phase operator

    C(t) = exp[i phi (N + 1/2) - i mu (alpha a^dag^2 e^{i theta} + beta a^2 e^{-i theta})]

    with phi = pi cosh(2 sqrt(alpha beta) r), theta = 2 xi(t), and
    mu = -pi sinh(2 sqrt(alpha beta) r) / (2 sqrt(alpha beta)).  The generator
    parameters satisfy phi^2 - 4 alpha beta mu^2 = pi^2, so C is a half-turn
    of the underlying su(1,1) structure and equals i times parity for every r
    and theta; it is built by explicit exponentiation anyway so downstream
    checks do not assume that.
    """
    r, regime = squeeze_params(p)
    if regime != Regime.UNBROKEN:
        warnings.warn(
            "C operator built from a complex squeeze strength (broken regime)",
            stacklevel=2,
        )
    return _c_operator_raw(p, dim, t, r, mu_scale=1.0)


def _c_operator_raw(
    p: CasimirParams, dim: int, t: float, r: complex, mu_scale: float
) -> FockOperator:
    s = 2.0 * np.sqrt(p.alpha * p.beta)
    phi = np.pi * np.cosh(s * r)
    mu = -np.pi * np.sinh(s * r) / s if s != 0.0 else 0.0
    mu = mu_scale * mu
    theta = 2.0 * xi_phase(p, t)
    a, ad = ladder_ops(dim)
    gen = 1j * phi * np.diag(np.arange(dim) + 0.5).astype(complex)
    gen -= 1j * mu * (
        p.alpha * np.exp(1j * theta) * (ad @ ad).entries
        + p.beta * np.exp(-1j * theta) * (a @ a).entries
    )
    return matrix_exp(FockOperator(dim, gen))


def cpt_symmetry(p: CasimirParams, dim: int, t: float) -> AntilinearOperator:
    """C(t) composed with parity and conjugation."""
    C = build_C_operator(p, dim, t)
    return AntilinearOperator(C @ parity_op(dim))


def casimir_invariant(p: CasimirParams, dim: int) -> LRInvariant:
    """The model's nonlinear invariant I(t) = U^dag(t) S e^{i pi (N+1/2)} S^{-1} U(t).

    The squeeze similarity of the half-turn phase rotation is built by
    explicit matrix products.  S^{-1} amplifies the top Fock levels when r is
    complex, so in the broken regime keep dim modest (the conditioning grows
    like |tanh|^dim).
    """
    r, _ = squeeze_params(p)
    S = _squeeze_matrix(p, dim, r)
    core = np.diag(np.exp(1j * np.pi * (np.arange(dim) + 0.5)))
    E = S @ core @ np.linalg.inv(S)
    half = np.arange(dim) + 0.5

    def I_fn(t: float) -> FockOperator:
        ph = np.exp(1j * xi_phase(p, t) * half)
        # U^dag E U with diagonal U: conjugate columns/rows by phases
        return FockOperator(dim, (E * ph[None, :]) / ph[:, None])

    return LRInvariant(I_fn)


def _squeeze_matrix(p: CasimirParams, dim: int, r: complex) -> np.ndarray:
    a, ad = ladder_ops(dim)
    gen = 0.5 * r * (p.alpha * (ad @ ad).entries - p.beta * (a @ a).entries)
    return matrix_exp(FockOperator(dim, gen)).entries


def antilinear_symmetry_residual(
    I_fn: Callable[[float], AntilinearOperator],
    H_fn: Callable[[float], FockOperator],
    t: float,
    dt: float = 1e-4,
) -> float:
    """Frobenius norm of i hbar dL/dt + H(-t) L - L conj(H(t)) on the linear part."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    Lp = I_fn(t + dt).linear_part.entries
    Lm = I_fn(t - dt).linear_part.entries
    L = I_fn(t).linear_part.entries
    R = (
        1j * HBAR * (Lp - Lm) / (2.0 * dt)
        + H_fn(-t).entries @ L
        - L @ H_fn(t).entries.conj()
    )
    return float(np.linalg.norm(R, ord="fro"))


def linear_invariant_residual(
    inv: LRInvariant,
    H_fn: Callable[[float], FockOperator],
    t: float,
    dt: float = 1e-4,
) -> float:
    """Frobenius norm of i hbar dI/dt + I H - H I."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    Ip = inv.I_fn(t + dt).entries
    Im = inv.I_fn(t - dt).entries
    I = inv.I_fn(t).entries
    H = H_fn(t).entries
    R = 1j * HBAR * (Ip - Im) / (2.0 * dt) + I @ H - H @ I
    return float(np.linalg.norm(R, ord="fro"))


def _check_symmetric_grid(times: np.ndarray) -> None:
    scale = max(float(np.max(np.abs(times))), 1.0)
    if not np.allclose(times + times[::-1], 0.0, atol=1e-12 * scale):
        raise ValueError("grid must be symmetric about t = 0")


def schrodinger_symmetry_residual(
    I_fn: Callable[[float], AntilinearOperator],
    H_fn: Callable[[float], FockOperator],
    times: np.ndarray,
    trajectories: Sequence[Sequence[FockState]],
) -> float:
    """State-level residual of the symmetry condition in Schrodinger-operator form.

    For test trajectories u(t) on a symmetric grid, compares
    K(t)[conj applied to (H(t)u - i hbar u_dot)] against
    H(-t) w + i hbar w_dot with w(t) = K(t) applied to u(t).  The two agree
    for arbitrary smooth trajectories exactly when the symmetry condition
    holds.  Returns the largest state-vector residual norm.
    """
    times = np.asarray(times, dtype=float)
    if times.size < 3:
        raise ValueError("need at least 3 grid points")
    _check_symmetric_grid(times)
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0.0):
        raise ValueError("grid must be uniform")
    dt = dts[0]

    Ls = [I_fn(tk).linear_part.entries for tk in times]
    worst = 0.0
    for traj in trajectories:
        U = np.stack([s.amplitudes for s in traj], axis=0)
        W = np.stack([Ls[k] @ U[k].conj() for k in range(times.size)], axis=0)
        for k in range(1, times.size - 1):
            u_dot = (U[k + 1] - U[k - 1]) / (2.0 * dt)
            w_dot = (W[k + 1] - W[k - 1]) / (2.0 * dt)
            Lu = H_fn(times[k]).entries @ U[k] - 1j * HBAR * u_dot
            lhs = Ls[k] @ Lu.conj()
            rhs = H_fn(-times[k]).entries @ W[k] + 1j * HBAR * w_dot
            worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def _pairing_residual(
    K_lin: np.ndarray, v_t: np.ndarray, v_mt: np.ndarray, fixed_phase: Optional[complex]
) -> float:
    """Residual of K v(t) = lambda v(-t) as normalized vectors.

    With fixed_phase = None, lambda is taken as the phase of the overlap
    (phase-minimized residual, invariant under rescaling either vector).
    """
    w = K_lin @ v_t.conj()
    w = w / np.linalg.norm(w)
    u = v_mt / np.linalg.norm(v_mt)
    if fixed_phase is None:
        ov = u.conj() @ w
        lam = ov / abs(ov) if abs(ov) > 0.0 else 1.0
    else:
        lam = fixed_phase
    return float(np.linalg.norm(w - lam * u))


def mode_pairing_residual(
    I_fn: Callable[[float], AntilinearOperator],
    times: np.ndarray,
    traj: Sequence[FockState],
    expected_phase: Optional[complex] = None,
) -> float:
    """Worst residual of K(t) v(t) = lambda v(-t) along one mode trajectory.

    With expected_phase = None the pairing phase is minimized per time (the
    classification criterion); pinning it instead makes the check sensitive
    to sign or phase errors in the symmetry that phase minimization is
    deliberately blind to.
    """
    times = np.asarray(times, dtype=float)
    _check_symmetric_grid(times)
    V = np.stack([s.amplitudes for s in traj], axis=0)
    nt = times.size
    worst = 0.0
    for k in range(nt):
        K_lin = I_fn(times[k]).linear_part.entries
        worst = max(
            worst, _pairing_residual(K_lin, V[k], V[nt - 1 - k], expected_phase)
        )
    return worst


def classify_regime(
    eigendata: Sequence[tuple[complex, Sequence[FockState]]],
    I_fn: Callable[[float], AntilinearOperator],
    times: np.ndarray,
    tol: float = 1e-6,
    im_tol: float = 1e-8,
    ep_parameter: Optional[float] = None,
) -> SymmetryVerdict:
    """Classify the symmetry regime from eigendata on a symmetric time grid.

    eigendata pairs each eigenvalue eps_n with the trajectory of its mode
    |n,t>.  Unbroken needs all |Im eps_n| <= im_tol and all phase-minimized
    pairing residuals of I_fn acting on the modes <= tol; a spectrum that has
    collapsed below tol in magnitude is classified as the exceptional point;
    anything else is broken, with eigenvalues matched into conjugate pairs.
    """
    times = np.asarray(times, dtype=float)
    _check_symmetric_grid(times)
    eps = np.array([e for e, _ in eigendata], dtype=complex)

    K_lins = [I_fn(tk).linear_part.entries for tk in times]
    residuals: list[float] = []
    for _, traj in eigendata:
        V = np.stack([s.amplitudes for s in traj], axis=0)
        worst = 0.0
        for k in range(times.size):
            worst = max(
                worst,
                _pairing_residual(K_lins[k], V[k], V[times.size - 1 - k], None),
            )
        residuals.append(worst)

    pairs: list[tuple[complex, complex]] = []
    for e in eps:
        j = int(np.argmin(np.abs(eps - np.conj(e))))
        pairs.append((complex(e), complex(eps[j])))

    scale = float(np.max(np.abs(eps))) if eps.size else 0.0
    if scale <= tol:
        regime = Regime.EXCEPTIONAL_POINT
    elif float(np.max(np.abs(eps.imag))) <= im_tol and max(residuals) <= tol:
        regime = Regime.UNBROKEN
    else:
        regime = Regime.BROKEN
    return SymmetryVerdict(
        regime=regime,
        eigenvalue_pairs=pairs,
        unbroken_residuals=residuals,
        ep_parameter=ep_parameter,
    )


def symmetry_eigenphase(
    I_fn: Callable[[float], AntilinearOperator],
    traj: Sequence[FockState],
    times: np.ndarray,
    m: Optional[Metric] = None,
) -> np.ndarray:
    """lambda_n(t) = <n,-t|rho K(t)|n,t> / <n,-t|rho|n,-t>.

    Measures the pairing eigenvalue instead of assuming it; time-constancy
    and unimodularity are then checkable facts.  With m = None the plain
    inner product is used.
    """
    times = np.asarray(times, dtype=float)
    _check_symmetric_grid(times)
    V = np.stack([s.amplitudes for s in traj], axis=0)
    nt = times.size
    out = np.empty(nt, dtype=complex)
    for k in range(nt):
        w = I_fn(times[k]).linear_part.entries @ V[k].conj()
        u = V[nt - 1 - k]
        if m is not None:
            u_w = u.conj() @ (m.rho.entries @ w)
            u_u = u.conj() @ (m.rho.entries @ u)
        else:
            u_w = u.conj() @ w
            u_u = u.conj() @ u
        out[k] = u_w / u_u
    return out


def antilinear_metric_residual(
    p: CasimirParams,
    dim: int,
    t: float,
    dt: float = 1e-4,
    mu_scale: float = 1.0,
    H_fn: Optional[Callable[[float], FockOperator]] = None,
    trusted_levels: Optional[int] = None,
) -> float:
    """Residual of the antilinear-metric relation for Xi(t) = rho C(t) P conj.

    On the linear part X = rho C(t) P the relation reads
    i hbar dX/dt = X conj(H(t)) - H(-t)^dag X; the Frobenius norm of the
    difference, relative to ||X||_F, is returned.  Both norms are taken on a
    trusted lower block (default the first dim // 4 levels): the exponential
    of the truncated half-turn generator is corrupted near the truncation
    edge with an amplification that grows with the squeeze weight
    |tanh(2 sqrt(alpha beta) r)|, and the metric weights grow fast enough
    with n that edge rows would dominate an unmasked norm.  At strong
    coupling choose dim so the two-photon headroom between trusted_levels and
    dim is large (2 g sqrt(alpha beta)/Delta = 0.5 needs roughly dim = 128
    over a 16-level block).  mu_scale != 1 deliberately detunes the squeeze
    amplitude in C and serves as the negative control (it breaks the
    half-turn quantization, so Xi stops being time independent); the control
    stays orders of magnitude above any sensible tolerance on the trusted
    block.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if H_fn is None:
        H_fn = lambda tau: hamiltonian(p, dim, tau)
    k = dim // 4 if trusted_levels is None else trusted_levels
    if not 2 <= k <= dim:
        raise ValueError("trusted_levels must lie in [2, dim]")
    r, _ = squeeze_params(p)
    P = parity_op(dim).entries
    rho = np.asarray(
        np.exp(0.5 * np.log(p.beta / p.alpha) * (np.arange(dim) + 0.5)), dtype=complex
    )

    def X_at(tau: float) -> np.ndarray:
        C = _c_operator_raw(p, dim, tau, r, mu_scale).entries
        return rho[:, None] * (C @ P)

    X = X_at(t)
    Xdot = (X_at(t + dt) - X_at(t - dt)) / (2.0 * dt)
    R = 1j * HBAR * Xdot - (X @ H_fn(t).entries.conj() - H_fn(-t).entries.conj().T @ X)
    return float(
        np.linalg.norm(R[:k, :k], ord="fro") / np.linalg.norm(X[:k, :k], ord="fro")
    )


def find_exceptional_point(
    p: CasimirParams, param: str, lo: float, hi: float, tol: float = 1e-6
) -> Optional[float]:
    """Bisect the discriminant Delta^2 - 4 g^2 alpha beta for a sign change.

    Returns the critical value of the swept parameter to within tol, or None
    when the discriminant does not change sign on [lo, hi].
    """
    if not hi > lo:
        raise ValueError("need hi > lo")

    def disc(x: float) -> float:
        q = with_param(p, param, x)
        return q.Delta**2 - 4.0 * q.g**2 * q.alpha * q.beta

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d_lo, d_hi = disc(lo), disc(hi)
        if d_lo == 0.0:
            return lo
        if d_hi == 0.0:
            return hi
        if d_lo * d_hi > 0.0:
            return None
        a, b = lo, hi
        while b - a > tol:
            mid = 0.5 * (a + b)
            d_mid = disc(mid)
            if d_mid == 0.0:
                return mid
            if (d_mid > 0.0) == (d_lo > 0.0):
                a = mid
            else:
                b = mid
    return 0.5 * (a + b)


def ep_coalescence_overlap(p: CasimirParams, dim: int = 32) -> float:
    """Overlap of the two lowest even-sector modes of the averaged generator.

    The generator preserves photon-number parity, so the two lowest modes of
    the full matrix live in different sectors and are orthogonal by symmetry;
    the pair that actually coalesces lies within one sector.  The overlap
    grows toward 1 as the parameters approach the exceptional point (0.99 at
    dim = 64 for a relative distance of 1e-7) and is small deep in the
    unbroken regime; at fixed dim truncation caps it slightly below 1.

    Informative only for a tilted drive (alpha != beta): with alpha = beta
    the truncated sector block is real symmetric, its eigenvectors stay
    orthogonal at any distance, and the overlap sits at machine zero.
    """
    V = rwa_hamiltonian(p, dim).entries
    idx = np.arange(0, dim, 2)
    Ve = V[np.ix_(idx, idx)]
    w, vecs = np.linalg.eig(Ve)
    order = np.argsort(w.real)
    v0 = vecs[:, order[0]]
    v1 = vecs[:, order[1]]
    return float(
        abs(v0.conj() @ v1) / (np.linalg.norm(v0) * np.linalg.norm(v1))
    )
