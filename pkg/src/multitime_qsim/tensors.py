"""Dense complex tensor helpers and shared tolerances.

Tensors are plain numpy arrays with dtype complex128.  The helpers here are
deliberately thin: they add shape/finite/capacity validation around numpy
and fix the axis conventions the rest of the package relies on (tensor
products concatenate axes, contraction keeps remaining axes of the first
operand before those of the second).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityExceeded, ShapeError

# Hard budget on tensor entries; anything bigger is a bug at desk scale.
MAX_TENSOR_ENTRIES = 2**24


@dataclass(frozen=True)
class Tolerance:
    """Numerical comparison thresholds used across the package.

    eq_tol bounds algebraic identities (completeness, unitarity, alternation
    of exact structure); prob_tol bounds agreement between independently
    computed probability distributions.
    """

    eq_tol: float = 1e-10
    prob_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not (0.0 < self.eq_tol <= 1e-6):
            raise ValueError(f"eq_tol out of range: {self.eq_tol!r}")
        if not (0.0 < self.prob_tol <= 1e-6):
            raise ValueError(f"prob_tol out of range: {self.prob_tol!r}")


DEFAULT_TOLERANCE = Tolerance()


def as_tensor(data: object, dims: Sequence[int] | None = None) -> np.ndarray:
    """Coerce input to a complex tensor, optionally reshaping to dims.

    Raises ShapeError when the entry count does not match dims or when the
    data contains non-finite values.
    """
    arr = np.asarray(data, dtype=complex)
    if dims is not None:
        dims = tuple(int(d) for d in dims)
        if any(d < 1 for d in dims):
            raise ShapeError(f"dimensions must be positive, got {dims}")
        expected = int(np.prod(dims, dtype=np.int64)) if dims else 1
        if arr.size != expected:
            raise ShapeError(f"expected {expected} entries for dims {dims}, got {arr.size}")
        arr = arr.reshape(dims)
    if arr.size > MAX_TENSOR_ENTRIES:
        raise CapacityExceeded(f"tensor with {arr.size} entries exceeds budget {MAX_TENSOR_ENTRIES}")
    ensure_finite(arr)
    return arr


def ensure_finite(arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        raise ShapeError("tensor contains non-finite entries")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor product: result dims are a.shape + b.shape, entries products.

    Note this keeps the factors' axes separate; it is the outer product, not
    the matrix Kronecker product (use matrix_kron for the latter).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    total = a.size * b.size
    if total > MAX_TENSOR_ENTRIES:
        raise CapacityExceeded(f"kron would create {total} entries, budget {MAX_TENSOR_ENTRIES}")
    return np.multiply.outer(a, b)


def matrix_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of matrices (block convention)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError("matrix_kron expects rank-2 operands")
    total = a.size * b.size
    if total > MAX_TENSOR_ENTRIES:
        raise CapacityExceeded(f"kron would create {total} entries, budget {MAX_TENSOR_ENTRIES}")
    return np.kron(a, b)


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose of a rank-2 tensor."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ShapeError(f"adjoint requires a rank-2 tensor, got rank {a.ndim}")
    return a.conj().T


def contract(a: np.ndarray, b: np.ndarray, axes_a: Sequence[int], axes_b: Sequence[int]) -> np.ndarray:
    """Contract paired axes of a and b; remaining axes keep a-then-b order."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    axes_a = tuple(axes_a)
    axes_b = tuple(axes_b)
    if len(axes_a) != len(axes_b):
        raise ShapeError("contract requires equally many axes on both operands")
    for ax_a, ax_b in zip(axes_a, axes_b):
        if not (-a.ndim <= ax_a < a.ndim) or not (-b.ndim <= ax_b < b.ndim):
            raise ShapeError("contraction axis out of range")
        if a.shape[ax_a] != b.shape[ax_b]:
            raise ShapeError(
                f"cannot contract axis of size {a.shape[ax_a]} with axis of size {b.shape[ax_b]}"
            )
    return np.tensordot(a, b, axes=(axes_a, axes_b))


def frobenius_norm_sq(a: np.ndarray) -> float:
    """Sum of squared magnitudes of all entries."""
    a = np.asarray(a, dtype=complex)
    return float(np.sum(np.abs(a) ** 2))


def is_hermitian(a: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    a = np.asarray(a, dtype=complex)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and bool(
        np.max(np.abs(a - a.conj().T), initial=0.0) <= tol.eq_tol
    )


def is_unitary(a: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    dev = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])), initial=0.0)
    return bool(dev <= tol.eq_tol)


def frozen(arr: np.ndarray) -> np.ndarray:
    """Return a read-only copy; stored tensors are immutable by convention."""
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def prod(dims: Iterable[int]) -> int:
    out = 1
    for d in dims:
        out *= int(d)
    return out
