"""Tensor helpers: shapes, axis conventions, budgets, tolerances."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multitime_qsim.errors import CapacityExceeded, ShapeError
from multitime_qsim.tensors import (
    DEFAULT_TOLERANCE,
    MAX_TENSOR_ENTRIES,
    Tolerance,
    adjoint,
    as_tensor,
    contract,
    frobenius_norm_sq,
    frozen,
    is_hermitian,
    is_unitary,
    kron,
    matrix_kron,
    prod,
)

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)


def complex_arrays(*shape: int):
    n = int(np.prod(shape))
    return st.tuples(
        st.lists(finite, min_size=n, max_size=n),
        st.lists(finite, min_size=n, max_size=n),
    ).map(lambda rb: (np.array(rb[0]) + 1j * np.array(rb[1])).reshape(shape))


def test_as_tensor_reshapes_and_checks_count():
    t = as_tensor([1, 2, 3, 4], (2, 2))
    assert t.shape == (2, 2) and t.dtype == complex
    with pytest.raises(ShapeError):
        as_tensor([1, 2, 3], (2, 2))
    with pytest.raises(ShapeError):
        as_tensor([1, 2], (0, 2))


def test_as_tensor_rejects_non_finite():
    with pytest.raises(ShapeError):
        as_tensor([1.0, np.inf])
    with pytest.raises(ShapeError):
        as_tensor([complex(0, np.nan), 0])


def test_as_tensor_handles_transposed_views():
    # a non-contiguous view must not trip the finiteness check
    mat = np.arange(6, dtype=complex).reshape(2, 3)
    t = as_tensor(mat.T)
    assert t.shape == (3, 2)


def test_kron_keeps_axes_separate():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([5, 6], dtype=complex)
    t = kron(a, b)
    assert t.shape == (2, 2, 2)
    assert t[1, 0, 1] == a[1, 0] * b[1]


def test_matrix_kron_is_block_kronecker():
    a = np.array([[0, 1], [1, 0]], dtype=complex)
    b = np.diag([1, -1]).astype(complex)
    assert np.array_equal(matrix_kron(a, b), np.kron(a, b))
    with pytest.raises(ShapeError):
        matrix_kron(a, np.array([1, 2], dtype=complex))


def test_kron_and_matrix_kron_agree_after_regrouping():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    b = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    regrouped = kron(a, b).transpose(0, 2, 1, 3).reshape(8, 6)
    assert np.allclose(regrouped, np.kron(a, b))


def test_capacity_budget_enforced():
    big = np.ones(2**13)
    with pytest.raises(CapacityExceeded):
        kron(big, big)
    with pytest.raises(CapacityExceeded):
        as_tensor(np.ones(MAX_TENSOR_ENTRIES + 1))


def test_adjoint_requires_matrices():
    with pytest.raises(ShapeError):
        adjoint(np.zeros((2, 2, 2)))


def test_contract_is_matrix_product_on_matching_axes():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    b = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    assert np.allclose(contract(a, b, [1], [0]), a @ b)


def test_contract_validates_axes():
    a = np.zeros((2, 3), dtype=complex)
    b = np.zeros((4, 2), dtype=complex)
    with pytest.raises(ShapeError):
        contract(a, b, [1], [0])  # 3 vs 4
    with pytest.raises(ShapeError):
        contract(a, b, [1], [0, 1])
    with pytest.raises(ShapeError):
        contract(a, b, [5], [0])


def test_prod_and_norm():
    assert prod([2, 3, 4]) == 24
    assert prod([]) == 1
    v = np.array([3, 4j])
    assert frobenius_norm_sq(v) == pytest.approx(25.0)


def test_hermitian_and_unitary_checks():
    h = np.array([[1, 1j], [-1j, 0]])
    assert is_hermitian(h)
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))
    u = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert is_unitary(u)
    assert not is_unitary(np.array([[1, 0], [0, 0]]))
    assert not is_unitary(np.zeros((2, 3)))


def test_frozen_copies_are_read_only():
    src = np.zeros((2, 2))
    out = frozen(src)
    with pytest.raises(ValueError):
        out[0, 0] = 1.0
    src[0, 0] = 5.0  # the copy must be unaffected
    assert out[0, 0] == 0.0


def test_tolerance_bounds():
    with pytest.raises(ValueError):
        Tolerance(eq_tol=0.0)
    with pytest.raises(ValueError):
        Tolerance(prob_tol=1e-3)
    assert DEFAULT_TOLERANCE.eq_tol < DEFAULT_TOLERANCE.prob_tol


@settings(deadline=None, max_examples=60)
@given(a=complex_arrays(2, 2), b=complex_arrays(3, 2))
def test_kron_norm_is_multiplicative(a, b):
    assert frobenius_norm_sq(kron(a, b)) == pytest.approx(
        frobenius_norm_sq(a) * frobenius_norm_sq(b), abs=1e-9, rel=1e-9
    )


@settings(deadline=None, max_examples=60)
@given(a=complex_arrays(3, 3), b=complex_arrays(3, 3))
def test_adjoint_reverses_products(a, b):
    assert np.allclose(adjoint(a @ b), adjoint(b) @ adjoint(a))
    assert np.allclose(adjoint(adjoint(a)), a)


@settings(deadline=None, max_examples=60)
@given(a=complex_arrays(2, 3), b=complex_arrays(3, 4), c=complex_arrays(3, 4))
def test_contract_is_bilinear(a, b, c):
    lhs = contract(a, b + 2j * c, [1], [0])
    rhs = contract(a, b, [1], [0]) + 2j * contract(a, c, [1], [0])
    assert np.allclose(lhs, rhs)
