"""Operator algebra layer: ladder matrices, matrix functions, antilinear maps."""

import numpy as np
import pytest

from ptcasimir.errors import InvalidDimensionError, MetricViolationError, NumericError
from ptcasimir.fock_algebra import (
    AntilinearOperator,
    FockOperator,
    FockState,
    apply_antilinear,
    basis_state,
    hermitian_sqrt,
    identity_op,
    ladder_ops,
    matrix_exp,
    number_op,
    parity_op,
    vacuum_state,
)


def test_ladder_dim2_is_smallest_ladder():
    a, adag = ladder_ops(2)
    assert np.array_equal(a.entries, [[0, 1], [0, 0]])
    assert np.array_equal(adag.entries, [[0, 0], [1, 0]])


def test_ladder_entries_are_sqrt_n():
    a, _ = ladder_ops(3)
    assert a.entries[1, 2] == pytest.approx(np.sqrt(2))
    assert a.entries[0, 1] == 1.0


def test_ladder_adjoint_pair():
    a, adag = ladder_ops(9)
    assert np.array_equal(adag.entries, a.entries.conj().T)


def test_commutator_exact_below_top_level():
    a, adag = ladder_ops(16)
    comm = (a @ adag - adag @ a).entries
    # truncation breaks [a, a^dag] = 1 only in the very last diagonal entry;
    # below it the identity holds to the last bit (sqrt(n)^2 rounds once)
    assert np.abs(comm[:15, :15] - np.eye(15)).max() <= 1e-14
    assert comm[15, 15] == pytest.approx(-15.0, abs=1e-13)


def test_ladder_rejects_dim_below_two():
    with pytest.raises(InvalidDimensionError):
        ladder_ops(1)


def test_number_and_parity_diagonals():
    n = number_op(5).entries
    p = parity_op(5).entries
    assert np.array_equal(np.diag(n).real, [0, 1, 2, 3, 4])
    assert np.array_equal(np.diag(p).real, [1, -1, 1, -1, 1])


def test_basis_state_bounds():
    v = basis_state(4, 2)
    assert v.amplitudes[2] == 1.0 and np.count_nonzero(v.amplitudes) == 1
    with pytest.raises(InvalidDimensionError):
        basis_state(4, 4)


def test_operator_shape_mismatch_rejected():
    with pytest.raises(InvalidDimensionError):
        FockOperator(3, np.zeros((2, 2)))
    with pytest.raises(InvalidDimensionError):
        FockState(3, np.zeros(2))


def test_matrix_exp_of_zero_is_identity():
    Z = FockOperator(6, np.zeros((6, 6)))
    assert np.array_equal(matrix_exp(Z).entries, np.eye(6))


def test_matrix_exp_half_integer_phase():
    # exp(i pi (n + 1/2)) = i (-1)^n entrywise on the diagonal
    dim = 10
    gen = FockOperator(dim, 1j * np.pi * np.diag(np.arange(dim) + 0.5))
    expected = 1j * (-1.0) ** np.arange(dim)
    assert np.allclose(np.diag(matrix_exp(gen).entries), expected, atol=1e-14)


def test_matrix_exp_matches_taylor_sum():
    dim = 32
    a, adag = ladder_ops(dim)
    A = 0.05 * (adag @ adag - a @ a)  # r/2 with r = 0.1
    E = matrix_exp(A).entries
    term = np.eye(dim, dtype=complex)
    total = term.copy()
    for k in range(1, 21):
        term = term @ A.entries / k
        total += term
    assert np.linalg.norm(E - total) <= 1e-12 * np.linalg.norm(E)


def test_matrix_exp_rejects_nonfinite():
    bad = np.zeros((2, 2))
    bad[0, 1] = np.inf
    with pytest.raises(NumericError):
        matrix_exp(FockOperator(2, bad))


def test_hermitian_sqrt_identity_and_diagonal():
    assert np.allclose(hermitian_sqrt(identity_op(4)).entries, np.eye(4))
    B = hermitian_sqrt(FockOperator(2, np.diag([4.0, 9.0])))
    assert np.allclose(B.entries, np.diag([2.0, 3.0]))


def test_hermitian_sqrt_of_casimir_metric():
    # metric for alpha=4, beta=1 is diag((1/4)^{(n+1/2)/2}); its square root
    # has entries (1/4)^{(n+1/2)/4}
    n = np.arange(8)
    rho = FockOperator(8, np.diag(0.25 ** ((n + 0.5) / 2)))
    eta = hermitian_sqrt(rho).entries
    assert np.allclose(np.diag(eta), 0.25 ** ((n + 0.5) / 4), atol=1e-12)


def test_hermitian_sqrt_squares_back():
    rng = np.random.default_rng(7)
    M = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    A = FockOperator(12, M @ M.conj().T + 0.1 * np.eye(12))
    B = hermitian_sqrt(A)
    res = np.linalg.norm((B @ B).entries - A.entries) / np.linalg.norm(A.entries)
    assert res <= 1e-10


def test_hermitian_sqrt_rejects_indefinite_input():
    with pytest.raises(MetricViolationError):
        hermitian_sqrt(FockOperator(2, np.diag([1.0, -1.0])))
    with pytest.raises(MetricViolationError):
        hermitian_sqrt(FockOperator(2, np.array([[0.0, 1.0], [0.0, 0.0]])))


def test_parity_conjugation_on_number_states():
    dim = 7
    K = AntilinearOperator(parity_op(dim))
    for n in range(dim):
        w = apply_antilinear(K, basis_state(dim, n))
        assert np.allclose(w.amplitudes, (-1.0) ** n * basis_state(dim, n).amplitudes)


def test_pure_conjugation_flips_phase():
    K = AntilinearOperator(identity_op(2))
    v = FockState(2, np.array([1j, 0.0]))
    assert np.allclose(apply_antilinear(K, v).amplitudes, [-1j, 0.0])


def test_parity_conjugation_is_involution():
    dim = 6
    K = AntilinearOperator(parity_op(dim))
    rng = np.random.default_rng(3)
    v = FockState(dim, rng.normal(size=dim) + 1j * rng.normal(size=dim))
    w = apply_antilinear(K, apply_antilinear(K, v))
    assert np.allclose(w.amplitudes, v.amplitudes, atol=1e-14)
    # composition of two antilinear maps is a plain linear operator
    KK = K.compose(K)
    assert isinstance(KK, FockOperator)
    assert np.allclose(KK.entries, np.eye(dim))


def test_antilinear_rejects_singular_linear_part():
    sing = np.zeros((3, 3))
    sing[0, 0] = 1.0
    with pytest.raises(NumericError):
        AntilinearOperator(FockOperator(3, sing))


def test_antilinear_dimension_mismatch():
    K = AntilinearOperator(identity_op(3))
    with pytest.raises(InvalidDimensionError):
        apply_antilinear(K, vacuum_state(4))
