"""Physical outputs of the driven-cavity model: photon numbers from the
moment system and its closed forms, field quadratures in the metric inner
product, rotated variances, and the squeezing degree.

Conventions: x1 = (a + a†)/2 so the vacuum variance is 1/4 and the
uncertainty floor of a variance product is 1/16.  Metric quadratures are
X_j = eta^{-1} x_j eta, which maps a -> c a with c = (beta/alpha)^(1/4).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .casimir_model import CasimirParams, xi_phase
from .dynamics import Trajectory
from .errors import IntegrationOverflowError
from .metric_dyson import Metric

__all__ = [
    "PhotonRecord",
    "QuadratureRecord",
    "photon_ode_solve",
    "photon_closed_form",
    "photon_series",
    "photon_constant_drift",
    "photon_second_order_residual",
    "quadrature_stats",
    "quadrature_from_moments",
    "oscillation_amplitude",
]

N_OVERFLOW_CAP = 1e6


@dataclass(frozen=True)
class PhotonRecord:
    """One time sample of the second-moment system.

    N is the metric photon number <a†a>_rho; A and B are the complex
    auxiliary pair moments (rotating frame).  The reduced parameters the
    sample was generated with ride along so series-level identities
    (conserved combination, second-order law) can be checked from the
    records alone.
    """

    t: float
    N: float
    A: complex
    B: complex
    Delta: float
    g: float
    alpha: float
    beta: float

    def __post_init__(self):
        if self.N < -1e-10 * max(1.0, abs(self.N)):
            raise ValueError(f"negative photon number {self.N:g} at t = {self.t:g}")


@dataclass(frozen=True)
class QuadratureRecord:
    """Metric-quadrature variances at one time, fixed and rotated frames.

    var_Y1, var_Y2 are along the squeeze direction set by the pair-moment
    phase phi(t) = pi/2 - kappa t; the axes themselves sit at phi/2, since a
    quadrature rotation by theta shifts the phase of <a^2> by 2 theta.
    squeeze_degree is s = 2 sqrt(alpha beta) g t.
    """

    t: float
    var_X1: float
    var_X2: float
    var_Y1: float
    var_Y2: float
    squeeze_degree: float

    def __post_init__(self):
        if self.var_Y1 * self.var_Y2 < 1.0 / 16.0 - 1e-8:
            raise ValueError(
                f"variance product {self.var_Y1 * self.var_Y2:.12g} below the "
                f"uncertainty floor 1/16 at t = {self.t:g}"
            )


def _moment_rates(p: CasimirParams, y: np.ndarray) -> np.ndarray:
    # y = (N, A, B); i Ndot = 2g(beta A - alpha B), etc.
    N, A, B = y
    d, g, al, be = p.Delta, p.g, p.alpha, p.beta
    return np.array(
        [
            -2j * g * (be * A - al * B),
            -1j * (2.0 * d * A - 4.0 * al * g * (N + 0.5)),
            -1j * (-2.0 * d * B + 4.0 * be * g * (N + 0.5)),
        ]
    )


def photon_series(records: list[PhotonRecord]):
    """Stack a record list into (t, N, A, B) arrays."""
    t = np.array([r.t for r in records])
    N = np.array([r.N for r in records])
    A = np.array([r.A for r in records], dtype=complex)
    B = np.array([r.B for r in records], dtype=complex)
    return t, N, A, B


def photon_constant_drift(records: list[PhotonRecord]) -> float:
    """Drift of the conserved combination N - g(alpha B + beta A)/Delta.

    Zero along exact solutions with vacuum initial conditions; requires
    Delta > 0.
    """
    d, g = records[0].Delta, records[0].g
    al, be = records[0].alpha, records[0].beta
    if d <= 0.0:
        raise ValueError("conserved combination needs Delta > 0")
    _, N, A, B = photon_series(records)
    K = N - g * (al * B + be * A).real / d
    scale = max(1.0, float(np.max(np.abs(N))))
    return float(np.max(np.abs(K - K[0]))) / scale


def photon_ode_solve(
    p: CasimirParams, t_grid: np.ndarray, overflow_cap: float = N_OVERFLOW_CAP
) -> list[PhotonRecord]:
    """RK4 solution of the coupled (N, A, B) moment system from vacuum.

    Grid intervals are subdivided so the step resolves the fastest rate in
    the system.  Hyperbolic growth past overflow_cap raises
    IntegrationOverflowError carrying the partial record list.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size < 2:
        raise ValueError("grid needs at least 2 points")
    om = np.sqrt(abs(p.Omega_sq))
    wmax = max(
        1.0, om, 2.0 * p.Delta, 4.0 * p.g * max(p.alpha, p.beta, 1.0)
    )
    dt_sub = 1e-3 / max(1.0, wmax / 2.0)

    y = np.zeros(3, dtype=complex)
    out = [_record(p, t_grid[0], y)]
    for k in range(t_grid.size - 1):
        span = t_grid[k + 1] - t_grid[k]
        nsub = max(1, int(np.ceil(abs(span) / dt_sub)))
        h = span / nsub
        t = t_grid[k]
        for _ in range(nsub):
            k1 = _moment_rates(p, y)
            k2 = _moment_rates(p, y + 0.5 * h * k1)
            k3 = _moment_rates(p, y + 0.5 * h * k2)
            k4 = _moment_rates(p, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        if not np.all(np.isfinite(y)) or y[0].real > overflow_cap:
            raise IntegrationOverflowError(
                f"photon number exceeded {overflow_cap:g} at t = {t_grid[k + 1]:g}",
                partial=out,
            )
        out.append(_record(p, t_grid[k + 1], y))

    if abs(y[0].imag) > 1e-8 * max(1.0, abs(y[0].real)):
        raise ArithmeticError("photon number developed an imaginary part")
    if p.Delta > 0.0 and photon_constant_drift(out) > 1e-8:
        raise ArithmeticError("conserved moment combination drifted")
    return out


def _record(p: CasimirParams, t: float, y: np.ndarray) -> PhotonRecord:
    return PhotonRecord(
        t=float(t),
        N=float(y[0].real),
        A=complex(y[1]),
        B=complex(y[2]),
        Delta=p.Delta,
        g=p.g,
        alpha=p.alpha,
        beta=p.beta,
    )


def _snc(u: complex) -> complex:
    # sin(u)/u with series near 0; complex-safe, exact at the EP
    if abs(u) < 1e-4:
        u2 = u * u
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0
    return np.sin(u) / u


def photon_closed_form(p: CasimirParams, t: float) -> PhotonRecord:
    """Closed-form (N, A, B) at time t from vacuum initial conditions.

    One complex expression covers all regimes: oscillation for Omega^2 > 0
    continues to hyperbolic growth for Omega^2 < 0 and to the quadratic
    degenerate limit at Omega = 0.
    """
    g, al, be, d = p.g, p.alpha, p.beta, p.Delta
    Om = np.sqrt(complex(p.Omega_sq))
    u = 0.5 * Om * t
    tsnc = t * _snc(u)  # t sin(u)/u, entire in u
    N = 4.0 * g * g * al * be * tsnc * tsnc
    osc = tsnc * np.cos(u)
    A = 2.0 * al * g * (d * tsnc * tsnc + 1j * osc)
    B = 2.0 * be * g * (d * tsnc * tsnc - 1j * osc)
    return PhotonRecord(
        t=float(t),
        N=float(N.real),
        A=complex(A),
        B=complex(B),
        Delta=d,
        g=g,
        alpha=al,
        beta=be,
    )


def photon_second_order_residual(records: list[PhotonRecord]) -> float:
    """max |Ndd + Omega^2 N - 8 g^2 alpha beta| by central differences.

    Requires a uniform grid of at least 5 points; interior points only.
    """
    if len(records) < 5:
        raise ValueError("grid too coarse: need at least 5 points")
    t, N, _, _ = photon_series(records)
    dts = np.diff(t)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0.0):
        raise ValueError("grid must be uniform")
    dt = dts[0]
    r0 = records[0]
    om2 = 4.0 * (r0.Delta**2 - 4.0 * r0.g**2 * r0.alpha * r0.beta)
    src = 8.0 * r0.g**2 * r0.alpha * r0.beta
    Ndd = (N[2:] - 2.0 * N[1:-1] + N[:-2]) / dt**2
    return float(np.max(np.abs(Ndd + om2 * N[1:-1] - src)))


def _variances_from(N: float, c2M2: complex):
    v1 = (1.0 + 2.0 * N + 2.0 * c2M2.real) / 4.0
    v2 = (1.0 + 2.0 * N - 2.0 * c2M2.real) / 4.0
    cov = c2M2.imag / 2.0
    return v1, v2, cov


def _rotated(v1: float, v2: float, cov: float, phi: float):
    cph, sph = np.cos(phi), np.sin(phi)
    vy1 = cph * cph * v1 + sph * sph * v2 + 2.0 * cph * sph * cov
    vy2 = sph * sph * v1 + cph * cph * v2 - 2.0 * cph * sph * cov
    return float(vy1), float(vy2)


def quadrature_stats(
    psi_traj: Trajectory,
    p: CasimirParams,
    m: Metric,
    mean_tol: float = 1e-6,
) -> list[QuadratureRecord]:
    """Metric-quadrature variances along an integrated lab-frame trajectory.

    Means <X1>_rho, <X2>_rho are asserted ~ 0 (vacuum-seeded evolutions keep
    them exactly zero by parity).  Variances use the moment relations
    var_X1/2 = (1 + 2N ± 2 Re(c² <a²>_rho))/4 with c = (beta/alpha)^(1/4).
    A lab-frame state carries the exact drive phase, so the rotated pair uses
    the half-angle of pi/2 - 2 xi(t); to leading order in epsilon that is the
    pi/2 - kappa t direction of the averaged description, but keeping xi
    removes an angle wiggle that the strongly squeezed variance would amplify
    exponentially.
    """
    if p.alpha <= 0.0 or p.beta <= 0.0:
        raise ValueError("quadratures need alpha, beta > 0")
    dim = psi_traj.states[0].dim
    n = np.arange(dim)
    rho = m.rho.entries
    offdiag = rho - np.diag(np.diag(rho))
    rho_diag = np.diag(rho).copy() if not np.any(offdiag) else None
    c2 = np.sqrt(p.beta / p.alpha)
    c = c2**0.5

    out = []
    for t, st in zip(psi_traj.times, psi_traj.states):
        psi = st.amplitudes
        w = rho_diag * psi if rho_diag is not None else rho @ psi
        denom = np.vdot(psi, w)
        apsi = np.zeros_like(psi)
        apsi[:-1] = np.sqrt(n[1:]) * psi[1:]
        adpsi = np.zeros_like(psi)
        adpsi[1:] = np.sqrt(n[1:]) * psi[:-1]
        x1 = np.vdot(w, (c * apsi + adpsi / c) / 2.0) / denom
        x2 = np.vdot(w, (c * apsi - adpsi / c) / 2.0j) / denom
        if max(abs(x1), abs(x2)) > mean_tol:
            raise ValueError(
                f"quadrature means not null at t = {t:g}: "
                f"|<X1>| = {abs(x1):.3e}, |<X2>| = {abs(x2):.3e}"
            )
        a2psi = np.zeros_like(psi)
        a2psi[:-2] = np.sqrt((n[:-2] + 1.0) * (n[:-2] + 2.0)) * psi[2:]
        Nm = np.vdot(w, n * psi) / denom
        M2 = np.vdot(w, a2psi) / denom
        v1, v2, cov = _variances_from(float(Nm.real), c2 * M2)
        vy1, vy2 = _rotated(v1, v2, cov, np.pi / 4.0 - xi_phase(p, t))
        out.append(
            QuadratureRecord(
                t=float(t),
                var_X1=float(v1),
                var_X2=float(v2),
                var_Y1=vy1,
                var_Y2=vy2,
                squeeze_degree=2.0 * np.sqrt(p.alpha * p.beta) * p.g * t,
            )
        )
    return out


def quadrature_from_moments(
    records: list[PhotonRecord], p: CasimirParams
) -> list[QuadratureRecord]:
    """Quadrature records from the moment system instead of a state.

    The rotating-frame pair moment maps to the lab frame with the drive
    phase, <a²>_rho = e^{-i kappa t} A(t), consistent with the averaging
    that produced the moment equations.
    """
    if p.alpha <= 0.0 or p.beta <= 0.0:
        raise ValueError("quadratures need alpha, beta > 0")
    c2 = np.sqrt(p.beta / p.alpha)
    out = []
    for r in records:
        A_lab = np.exp(-1j * p.kappa * r.t) * r.A
        v1, v2, cov = _variances_from(r.N, c2 * A_lab)
        vy1, vy2 = _rotated(v1, v2, cov, 0.5 * (np.pi / 2.0 - p.kappa * r.t))
        out.append(
            QuadratureRecord(
                t=r.t,
                var_X1=float(v1),
                var_X2=float(v2),
                var_Y1=vy1,
                var_Y2=vy2,
                squeeze_degree=2.0 * np.sqrt(p.alpha * p.beta) * p.g * r.t,
            )
        )
    return out


def oscillation_amplitude(p: CasimirParams) -> tuple[float, bool]:
    """Peak photon number 16 g² alpha beta / Omega² in the oscillatory regime.

    Returns (amplitude, flagged) where flagged marks the band
    4 g² alpha beta < Delta² <= 8 g² alpha beta: symmetry unbroken yet the
    peak reaches or exceeds one photon.
    """
    if p.Omega_sq <= 0.0:
        raise ValueError("peak amplitude is only defined for Omega^2 > 0")
    amp = 16.0 * p.g**2 * p.alpha * p.beta / p.Omega_sq
    gab = 4.0 * p.g**2 * p.alpha * p.beta
    flagged = gab < p.Delta**2 <= 2.0 * gab
    return float(amp), bool(flagged)
