"""Closed-form constructions for a cavity mode with modulated frequency and
unbalanced parametric amplification.

The model Hamiltonian on the truncated Fock space is

    H(t) = omega(t) (a^dag a + 1/2) + i chi(t) (alpha a^dag^2 - beta a^2)

with omega(t) = omega0 [1 - epsilon cos(kappa t)] and chi = omega_dot/(4 omega).
For alpha != beta the Hamiltonian is non-Hermitian but pseudo-Hermitian with
respect to the time-independent diagonal metric rho built here.  Moving to the
rotating frame generated by U(t) = exp[i xi(t) (a^dag a + 1/2)] and dropping
counter-rotating terms leaves the time-independent quadratic form

    V = Delta (a^dag a + 1/2) - g (alpha a^dag^2 + beta a^2),

Delta = omega0 - kappa/2, g = epsilon kappa / 8, which a generalized squeeze
similarity S(r) = exp[(r/2)(alpha a^dag^2 - beta a^2)] brings to harmonic
form.  The discriminant Delta^2 - 4 g^2 alpha beta separates the regime with a
real spectrum from the one with an imaginary spectrum; the two meet at the
exceptional point Delta = 2 g sqrt(alpha beta).
"""

from __future__ import annotations

import dataclasses
import enum
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import ExceptionalPointError, MetricViolationError, NumericError
from .fock_algebra import FockOperator, FockState, ladder_ops, matrix_exp
from .metric_dyson import Metric

__all__ = [
    "Regime",
    "CasimirParams",
    "SpectralResult",
    "reduced_params",
    "with_param",
    "angular_frequency",
    "pump_strength",
    "xi_phase",
    "hamiltonian",
    "drive_frame_op",
    "interaction_hamiltonian",
    "rwa_hamiltonian",
    "effective_hamiltonian",
    "metric",
    "squeeze_params",
    "squeeze_operator",
    "spectral_solve",
]


class Regime(str, enum.Enum):
    UNBROKEN = "unbroken"
    BROKEN = "broken"
    EXCEPTIONAL_POINT = "exceptional_point"


@dataclass(frozen=True)
class CasimirParams:
    """Physical parameters of the modulated cavity.

    Derived quantities (Delta, g, Omega_sq, r) are always recomputed from the
    primary fields, never stored.  epsilon above 0.1 triggers a warning since
    the averaged description assumes a weak drive; epsilon >= 1 is rejected
    because the instantaneous frequency would change sign.
    """

    omega0: float = 1.0
    kappa: float = 1.2
    epsilon: float = 0.05
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.omega0 <= 0.0 or self.kappa <= 0.0:
            raise ValueError("omega0 and kappa must be positive")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must lie in [0, 1)")
        if self.epsilon > 0.1:
            warnings.warn(
                f"epsilon = {self.epsilon:g} exceeds 0.1; the averaged "
                "description assumes a weak drive",
                stacklevel=2,
            )
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("alpha and beta must be nonnegative")
        if self.omega0 - 0.5 * self.kappa < 0.0:
            raise ValueError("detuning omega0 - kappa/2 must be nonnegative")

    @property
    def Delta(self) -> float:
        return self.omega0 - 0.5 * self.kappa

    @property
    def g(self) -> float:
        return self.epsilon * self.kappa / 8.0

    @property
    def Omega_sq(self) -> float:
        return 4.0 * (self.Delta**2 - 4.0 * self.g**2 * self.alpha * self.beta)

    @property
    def r(self) -> complex:
        return squeeze_params(self)[0]

    def regime(self) -> Regime:
        disc = self.Delta**2 - 4.0 * self.g**2 * self.alpha * self.beta
        scale = max(self.Delta**2, 4.0 * self.g**2 * self.alpha * self.beta, 1e-300)
        if abs(disc) <= 1e-12 * scale:
            return Regime.EXCEPTIONAL_POINT
        return Regime.UNBROKEN if disc > 0.0 else Regime.BROKEN


def reduced_params(
    Delta: float, g: float, alpha: float = 1.0, beta: float = 1.0
) -> CasimirParams:
    """Parameters realizing given (Delta, g) with a weak physical drive.

    The rotating-frame quantities fix only Delta and g; the drive frequency is
    chosen as kappa = max(1.2, 80 g) so epsilon = 8 g / kappa stays at or
    below 0.1.
    """
    if g < 0.0:
        raise ValueError("g must be nonnegative")
    kappa = max(1.2, 80.0 * g)
    return CasimirParams(
        omega0=Delta + 0.5 * kappa,
        kappa=kappa,
        epsilon=8.0 * g / kappa,
        alpha=alpha,
        beta=beta,
    )


def with_param(p: CasimirParams, name: str, value: float) -> CasimirParams:
    """Copy of p with one primary or reduced parameter replaced.

    "g" is realized by rescaling epsilon at fixed kappa; "Delta" by shifting
    omega0 at fixed kappa, so the other reduced parameter is untouched.
    """
    if name in ("omega0", "kappa", "epsilon", "alpha", "beta"):
        return dataclasses.replace(p, **{name: value})
    if name == "g":
        return dataclasses.replace(p, epsilon=8.0 * value / p.kappa)
    if name == "Delta":
        return dataclasses.replace(p, omega0=value + 0.5 * p.kappa)
    raise ValueError(f"unknown parameter {name!r}")


def angular_frequency(p: CasimirParams, t: float) -> float:
    return p.omega0 * (1.0 - p.epsilon * np.cos(p.kappa * t))


def pump_strength(p: CasimirParams, t: float) -> float:
    """chi(t) = omega_dot / (4 omega), the parametric amplification strength."""
    return (
        p.omega0
        * p.epsilon
        * p.kappa
        * np.sin(p.kappa * t)
        / (4.0 * angular_frequency(p, t))
    )


def xi_phase(p: CasimirParams, t):
    """Accumulated rotating-frame phase xi(t) = kappa t/2 - (omega0 eps/kappa) sin(kappa t).

    Equals (kappa t / 2)[1 - (2 omega0 eps / kappa) sin(kappa t)/(kappa t)]
    with the t = 0 limit built in; |xi - kappa t/2| <= omega0 eps / kappa.
    """
    return 0.5 * p.kappa * t - (p.omega0 * p.epsilon / p.kappa) * np.sin(p.kappa * t)


@lru_cache(maxsize=8)
def _ladder_squares(dim: int):
    # a^2 and a^dag^2 are rebuilt thousands of times by the integrators
    a, ad = ladder_ops(dim)
    A2 = (a @ a).entries
    AD2 = (ad @ ad).entries
    A2.setflags(write=False)
    AD2.setflags(write=False)
    return A2, AD2


def _quadratic_form(
    dim: int, diag_coeff: complex, up_coeff: complex, down_coeff: complex
) -> np.ndarray:
    """diag_coeff (N + 1/2) + up_coeff a^dag^2 + down_coeff a^2."""
    A2, AD2 = _ladder_squares(dim)
    M = np.diag(diag_coeff * (np.arange(dim) + 0.5)).astype(complex)
    if up_coeff != 0.0:
        M += up_coeff * AD2
    if down_coeff != 0.0:
        M += down_coeff * A2
    return M


def hamiltonian(p: CasimirParams, dim: int, t: float) -> FockOperator:
    """Lab-frame H(t) = omega(t)(N + 1/2) + i chi(t)(alpha a^dag^2 - beta a^2)."""
    chi = pump_strength(p, t)
    return FockOperator(
        dim,
        _quadratic_form(
            dim, angular_frequency(p, t), 1j * chi * p.alpha, -1j * chi * p.beta
        ),
    )


def drive_frame_op(p: CasimirParams, dim: int, t: float) -> FockOperator:
    """U(t) = exp[i xi(t) (N + 1/2)], the rotating-frame map."""
    ph = np.exp(1j * xi_phase(p, t) * (np.arange(dim) + 0.5))
    return FockOperator(dim, np.diag(ph))


def interaction_hamiltonian(p: CasimirParams, dim: int, t: float) -> FockOperator:
    """Rotating-frame V(t) = Delta(N+1/2) + i chi(alpha a^dag^2 e^{2i xi} - beta a^2 e^{-2i xi})."""
    chi = pump_strength(p, t)
    phase = np.exp(2j * xi_phase(p, t))
    return FockOperator(
        dim,
        _quadratic_form(
            dim, p.Delta, 1j * chi * p.alpha * phase, -1j * chi * p.beta / phase
        ),
    )


def rwa_hamiltonian(p: CasimirParams, dim: int) -> FockOperator:
    """Time-independent averaged form V = Delta(N+1/2) - g(alpha a^dag^2 + beta a^2)."""
    return FockOperator(
        dim, _quadratic_form(dim, p.Delta, -p.g * p.alpha, -p.g * p.beta)
    )


def effective_hamiltonian(p: CasimirParams, dim: int, t: float) -> FockOperator:
    """Lab-frame counterpart of the averaged dynamics.

    H_eff(t) = omega(t)(N+1/2) - g(alpha a^dag^2 e^{-2i xi} + beta a^2 e^{2i xi});
    transforming it with drive_frame_op reproduces rwa_hamiltonian exactly, so
    it carries the averaged physics without the counter-rotating wiggle.
    """
    phase = np.exp(-2j * xi_phase(p, t))
    return FockOperator(
        dim,
        _quadratic_form(
            dim,
            angular_frequency(p, t),
            -p.g * p.alpha * phase,
            -p.g * p.beta / phase,
        ),
    )


def metric(p: CasimirParams, dim: int) -> Metric:
    """Time-independent diagonal metric rho = diag(exp[(1/2) ln(beta/alpha) (n+1/2)]).

    Reduces to the identity for alpha = beta.  Requires alpha, beta > 0.
    """
    if p.alpha <= 0.0 or p.beta <= 0.0:
        raise MetricViolationError("metric requires alpha > 0 and beta > 0")
    n = np.arange(dim) + 0.5
    rho = np.diag(np.exp(0.5 * np.log(p.beta / p.alpha) * n)).astype(complex)
    return Metric(FockOperator(dim, rho), rho_dot=None)


def squeeze_params(p: CasimirParams) -> tuple[complex, Regime]:
    """Squeezing strength r and the regime it signals.

    r = arctanh(2 g sqrt(alpha beta) / Delta) / (2 sqrt(alpha beta)).  Beyond
    the threshold the principal branch arctanh(x) = arctanh(1/x) + i pi/2 is
    used, so Im r > 0 in the broken regime.  Exact resonance Delta = 0 gives
    the flagged broken value r = i pi / (4 sqrt(alpha beta)).
    """
    s = 2.0 * np.sqrt(p.alpha * p.beta)
    if p.g == 0.0:
        return 0.0 + 0.0j, Regime.UNBROKEN
    if s == 0.0:
        # one-sided interaction: V is triangular with unshifted harmonic diagonal
        if p.Delta > 0.0:
            return complex(p.g / p.Delta), Regime.UNBROKEN
        raise ExceptionalPointError("alpha*beta = 0 with Delta = 0 is defective")
    if p.Delta == 0.0:
        return 0.5j * np.pi / s, Regime.BROKEN
    x = s * p.g / p.Delta
    if abs(x - 1.0) <= 1e-12:
        raise ExceptionalPointError(
            "squeeze strength diverges at the exceptional point "
            f"2 g sqrt(alpha beta) / Delta = {x:.17g}"
        )
    if x < 1.0:
        return complex(np.arctanh(x) / s), Regime.UNBROKEN
    return complex((np.arctanh(1.0 / x) + 0.5j * np.pi) / s), Regime.BROKEN


def squeeze_operator(
    p: CasimirParams, dim: int, r: Optional[complex] = None
) -> FockOperator:
    """S(r) = exp[(r/2)(alpha a^dag^2 - beta a^2)]."""
    if r is None:
        r, _ = squeeze_params(p)
    gen = _quadratic_form(dim, 0.0, 0.5 * r * p.alpha, -0.5 * r * p.beta)
    return matrix_exp(FockOperator(dim, gen))


@dataclass(frozen=True)
class SpectralResult:
    """Closed-form eigendata of the averaged rotating-frame generator.

    eigenvectors_fn(t) returns the lab-frame modes |n,t> as the columns of
    U^dag(t) S(r) applied to the number basis.
    """

    eigenvalues: np.ndarray
    r: complex
    regime_hint: Regime
    eigenvectors_fn: Callable[[float], list[FockState]]


def dense_check_supported(p: CasimirParams, dim: int) -> bool:
    """Whether a truncated dense eigensolve can resolve the closed form.

    The squeeze similarity spreads each mode over the number basis with
    weight |tanh(s r)| per two-photon step, so the truncated dense spectrum
    converges to the closed form like |tanh(s r)|^dim.  The comparison is
    trusted at 1e-8 only when that reach is comfortably below it (and only
    in the unbroken regime, where the closed form is real like every
    truncated dense spectrum).
    """
    try:
        r, regime = squeeze_params(p)
    except ExceptionalPointError:
        return False
    if regime != Regime.UNBROKEN:
        return False
    s = 2.0 * np.sqrt(p.alpha * p.beta)
    lam = abs(np.tanh(s * r)) if s != 0.0 else 0.0
    return lam == 0.0 or dim * np.log(lam) <= np.log(1e-13)


def _dense_check(p: CasimirParams, dim: int, closed: np.ndarray) -> None:
    V = rwa_hamiltonian(p, dim).entries
    if np.linalg.norm(V - V.conj().T, ord="fro") <= 1e-12 * np.linalg.norm(V, "fro"):
        w = np.linalg.eigvalsh(V).astype(complex)
    else:
        w = np.linalg.eigvals(V)
        w = w[np.argsort(w.real)]
    n_trust = dim // 4 + 1
    err = np.max(np.abs(w[:n_trust] - closed[:n_trust]))
    if err > 1e-8:
        raise NumericError(
            f"dense spectrum disagrees with closed form by {err:.3e} "
            f"on the trusted block (dim={dim})"
        )


def spectral_solve(
    p: CasimirParams, dim: int, verify_dense: Optional[bool] = None
) -> SpectralResult:
    """Eigenvalues eps_n and mode factory for the averaged dynamics.

    The eigenvalues are computed from the same squeeze similarity that builds
    the modes: eps_n = c_r (n + 1/2) with
    c_r = Delta cosh(s r) - 2 g sqrt(alpha beta) sinh(s r), s = 2 sqrt(alpha beta).
    In the unbroken regime c_r equals sqrt(Delta^2 - 4 g^2 alpha beta); beyond
    it c_r is imaginary on the branch consistent with eigenvectors_fn (for the
    principal arctanh branch this makes Im c_r < 0 when Delta > 0).

    By default the closed form is additionally verified against a dense
    eigendecomposition on the trusted lower quarter of the spectrum whenever
    dense_check_supported says the comparison is meaningful: the truncated
    dense spectrum is similar to a real symmetric problem for alpha, beta > 0
    and is therefore real in every regime, and it converges to the closed
    form only when the squeeze reach |tanh(s r)|^dim is small.  Pass
    verify_dense explicitly to override the default policy.
    """
    r, regime = squeeze_params(p)
    s = 2.0 * np.sqrt(p.alpha * p.beta)
    if s == 0.0:
        c_r = complex(p.Delta)
    else:
        c_r = p.Delta * np.cosh(s * r) - s * p.g * np.sinh(s * r)
    eigenvalues = c_r * (np.arange(dim) + 0.5)

    S = squeeze_operator(p, dim, r=r)
    half = np.arange(dim) + 0.5

    def eigenvectors_fn(t: float) -> list[FockState]:
        cols = np.exp(-1j * xi_phase(p, t) * half)[:, None] * S.entries
        return [FockState(dim, cols[:, n].copy()) for n in range(dim)]

    do_verify = dense_check_supported(p, dim) if verify_dense is None else verify_dense
    if do_verify:
        _dense_check(p, dim, eigenvalues)

    return SpectralResult(
        eigenvalues=eigenvalues, r=r, regime_hint=regime, eigenvectors_fn=eigenvectors_fn
    )
