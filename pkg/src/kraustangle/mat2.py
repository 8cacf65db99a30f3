"""Complex 2x2 matrix arithmetic and the g-function.

Matrices are plain ``numpy`` arrays of shape ``(..., 2, 2)`` with dtype
``complex128``. Every function here broadcasts over leading axes, so a stack
of matrices can be processed in one call.
"""

from __future__ import annotations

import numpy as np

#: Absolute tolerance for algebraic identities between order-unity quantities.
ATOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
ZERO = np.zeros((2, 2), dtype=complex)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def cmat2(a00, a01, a10, a11) -> np.ndarray:
    """Build a 2x2 complex matrix from its four entries (row-major)."""
    return as_cmat2([[a00, a01], [a10, a11]])


def as_cmat2(a) -> np.ndarray:
    """Coerce ``a`` to a complex ``(..., 2, 2)`` array with finite entries."""
    a = np.asarray(a, dtype=complex)
    if a.shape[-2:] != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def det2(a: np.ndarray) -> np.ndarray:
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def trace(a: np.ndarray) -> np.ndarray:
    return a[..., 0, 0] + a[..., 1, 1]


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a, b)


def add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a + b


def scale(lam, a: np.ndarray) -> np.ndarray:
    return np.asarray(lam)[..., None, None] * a


def gfun(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``Tr(A) Tr(B) - Tr(AB)``.

    The result is symmetric, bilinear and invariant under a common similarity
    transform of both arguments. For 2x2 matrices it also equals
    ``det(A + B) - det(A) - det(B)``.
    """
    # Tr(AB) without forming the product
    tr_ab = np.einsum("...ij,...ji->...", a, b)
    return trace(a) * trace(b) - tr_ab


def is_close(a, b, atol: float = ATOL) -> bool:
    return bool(np.all(np.abs(np.asarray(a) - np.asarray(b)) <= atol))
