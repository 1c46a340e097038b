"""Property-based checks of the algebraic identities the rest of the package
leans on: exponential inverses, antilinearity, metric inner-product structure,
the squeeze-phase bound, and the regime trichotomy."""

import numpy as np
from hypothesis import given, settings, strategies as st

from ptcasimir.casimir_model import (
    CasimirParams,
    Regime,
    reduced_params,
    xi_phase,
)
from ptcasimir.fock_algebra import (
    AntilinearOperator,
    FockOperator,
    FockState,
    apply_antilinear,
    hermitian_sqrt,
    identity_op,
    ladder_ops,
    matrix_exp,
    parity_op,
)
from ptcasimir.metric_dyson import Metric, pseudo_inner
from ptcasimir.observables import photon_closed_form, photon_ode_solve

DIMS = st.integers(min_value=2, max_value=12)


def _rng(seed):
    return np.random.default_rng(seed)


def _random_matrix(rng, dim, scale):
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return A * (scale / max(np.linalg.norm(A, 2), 1e-300))


def _random_state(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return FockState(dim, v)


@given(DIMS, st.integers(min_value=0, max_value=2**32 - 1),
       st.floats(min_value=0.1, max_value=5.0))
@settings(max_examples=40, deadline=None)
def test_matrix_exp_inverts(dim, seed, scale):
    A = _random_matrix(_rng(seed), dim, scale)
    prod = matrix_exp(FockOperator(dim, A)).entries @ matrix_exp(
        FockOperator(dim, -A)
    ).entries
    assert np.linalg.norm(prod - np.eye(dim), 2) < 1e-10 * np.exp(2 * scale)


@given(DIMS, st.integers(min_value=0, max_value=2**32 - 1),
       st.complex_numbers(max_magnitude=10.0, allow_nan=False, allow_infinity=False))
@settings(max_examples=60, deadline=None)
def test_antilinear_conjugates_scalars(dim, seed, c):
    rng = _rng(seed)
    K = AntilinearOperator(FockOperator(dim, _random_matrix(rng, dim, 1.0)))
    v = _random_state(rng, dim)
    scaled = apply_antilinear(K, FockState(dim, c * v.amplitudes))
    direct = apply_antilinear(K, v)
    assert np.allclose(scaled.amplitudes, np.conj(c) * direct.amplitudes,
                       atol=1e-12)


@given(DIMS, st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_pseudo_inner_structure(dim, seed):
    rng = _rng(seed)
    # random positive diagonal metric, the shape the model actually uses
    w = np.exp(rng.uniform(-2.0, 2.0, dim))
    m = Metric(FockOperator(dim, np.diag(w)))
    u, v = _random_state(rng, dim), _random_state(rng, dim)
    lhs = pseudo_inner(u, v, m)
    rhs = np.conj(pseudo_inner(v, u, m))
    assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)
    nv = pseudo_inner(v, v, m)
    assert abs(nv.imag) < 1e-12 * abs(nv)
    assert nv.real > 0.0


@given(DIMS, st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_hermitian_sqrt_squares_back(dim, seed):
    rng = _rng(seed)
    B = _random_matrix(rng, dim, 1.0)
    A = B @ B.conj().T + 0.1 * np.eye(dim)
    R = hermitian_sqrt(FockOperator(dim, A)).entries
    assert np.linalg.norm(R - R.conj().T, 2) < 1e-10
    assert np.linalg.norm(R @ R - A, 2) < 1e-8


@given(st.integers(min_value=3, max_value=24))
@settings(max_examples=20, deadline=None)
def test_ladder_commutator_below_truncation(dim):
    # sqrt(n)^2 reproduces n only to rounding, so compare with a few ulp slack
    a, adag = ladder_ops(dim)
    comm = (a.entries @ adag.entries - adag.entries @ a.entries)
    body = comm[: dim - 1, : dim - 1]
    assert np.allclose(body, np.eye(dim - 1), atol=1e-13)
    assert abs(comm[dim - 1, dim - 1] - (1.0 - dim)) < 1e-13 * dim


@given(st.integers(min_value=2, max_value=24))
@settings(max_examples=20, deadline=None)
def test_parity_squares_to_identity(dim):
    P = parity_op(dim).entries
    assert np.array_equal(P @ P, identity_op(dim).entries)


@given(
    st.floats(min_value=0.0, max_value=10.0),
    st.floats(min_value=0.5, max_value=30.0),
    st.floats(min_value=0.0, max_value=0.1),
    st.floats(min_value=-50.0, max_value=50.0),
)
@settings(max_examples=80, deadline=None)
def test_phase_stays_near_half_drive(Delta, kappa, epsilon, t):
    p = CasimirParams(omega0=Delta + 0.5 * kappa, kappa=kappa,
                      epsilon=epsilon, alpha=1.0, beta=1.0)
    bound = p.omega0 * epsilon / kappa
    assert abs(xi_phase(p, t) - 0.5 * kappa * t) <= bound + 1e-12 * max(1.0, bound)


@given(
    st.floats(min_value=0.05, max_value=2.0),
    st.floats(min_value=0.01, max_value=0.45),
    st.floats(min_value=0.25, max_value=4.0),
)
@settings(max_examples=15, deadline=None)
def test_photon_ode_agrees_with_closed_form(Delta, g, beta):
    p = reduced_params(Delta=Delta, g=g, alpha=1.0, beta=beta)
    if p.Omega_sq <= 1e-4:  # keep clear of the collapse point
        return
    tg = np.linspace(0.0, 5.0, 41)
    recs = photon_ode_solve(p, tg)
    worst = max(
        abs(rec.N - photon_closed_form(p, float(t)).N)
        for rec, t in zip(recs, tg)
    )
    scale = max(1.0, max(rec.N for rec in recs))
    assert worst / scale < 1e-7


@given(
    st.floats(min_value=0.0, max_value=2.0),
    st.floats(min_value=0.0, max_value=0.45),
    st.floats(min_value=0.25, max_value=4.0),
)
@settings(max_examples=60, deadline=None)
def test_regime_follows_discriminant_sign(Delta, g, beta):
    # the stored drive parameters reconstruct Delta and g only to rounding,
    # so judge the trichotomy from the reconstructed values
    p = reduced_params(Delta=Delta, g=g, alpha=1.0, beta=beta)
    disc = p.Delta**2 - 4.0 * p.g**2 * p.alpha * p.beta
    scale = max(p.Delta**2, 4.0 * p.g**2 * p.alpha * p.beta, 1e-300)
    if abs(disc) <= 1e-12 * scale:
        assert p.regime() == Regime.EXCEPTIONAL_POINT
    elif disc > 0:
        assert p.regime() == Regime.UNBROKEN
    else:
        assert p.regime() == Regime.BROKEN
    assert p.Omega_sq == 4.0 * disc
