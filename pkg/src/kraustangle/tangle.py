"""The 3-tangle, computed three independent ways.

``three_tangle_direct`` works on raw amplitudes, ``three_tangle_simplified``
on the coefficient matrices ``C0``/``C1`` and ``three_tangle_kraus`` on the
Kraus pair and the initial S-S' tangle alone.
"""

from __future__ import annotations

import numpy as np

from . import mat2
from .channels import NORM_ATOL, KrausPair
from .errors import ConsistencyError, DomainError

#: Values above 1 by more than this are treated as a bug rather than rounding.
CLAMP_ATOL = 1e-12


def as_three_qubit(c) -> np.ndarray:
    """Validate a normalized 3-qubit state, flat index ``4n + 2l + m``."""
    c = np.asarray(c, dtype=complex).reshape(-1)
    if c.shape != (8,):
        raise ValueError(f"expected 8 amplitudes, got {c.size}")
    norm = float(np.vdot(c, c).real)
    if abs(norm - 1.0) > NORM_ATOL:
        raise ValueError(f"state is not normalized: <c|c> = {norm!r}")
    return c


def _clamp(tau: float) -> float:
    tau = float(tau)
    if tau > 1.0 + CLAMP_ATOL:
        raise ConsistencyError(f"3-tangle {tau!r} exceeds 1")
    return min(max(tau, 0.0), 1.0)


def three_tangle_direct(c) -> float:
    """Coffman-Kundu-Wootters hyperdeterminant form ``4|d1 - 2 d2 + 4 d3|``."""
    c = as_three_qubit(c).reshape(2, 2, 2)
    a, b = c[0], c[1]
    d1 = (
        a[0, 0] ** 2 * b[1, 1] ** 2
        + a[0, 1] ** 2 * b[1, 0] ** 2
        + a[1, 0] ** 2 * b[0, 1] ** 2
        + a[1, 1] ** 2 * b[0, 0] ** 2
    )
    d2 = (
        a[0, 0] * a[1, 1] * b[0, 0] * b[1, 1]
        + a[0, 1] * a[1, 0] * b[1, 0] * b[0, 1]
        + (a[1, 0] * b[0, 1] + a[0, 1] * b[1, 0]) * (a[0, 0] * b[1, 1] + a[1, 1] * b[0, 0])
    )
    d3 = a[0, 0] * a[1, 1] * b[1, 0] * b[0, 1] + a[0, 1] * a[1, 0] * b[0, 0] * b[1, 1]
    return _clamp(4.0 * abs(d1 - 2.0 * d2 + 4.0 * d3))


def three_tangle_simplified(c0: np.ndarray, c1: np.ndarray) -> float:
    """``4 |4 det(C0 C1) - g(C0, C1)^2|``."""
    c0 = mat2.as_cmat2(c0)
    c1 = mat2.as_cmat2(c1)
    val = 4.0 * mat2.det2(c0 @ c1) - mat2.gfun(c0, c1) ** 2
    return _clamp(4.0 * abs(complex(val)))


def kraus_invariants(kp: KrausPair) -> tuple[complex, complex]:
    """Return ``u = 4 det(K0 K1)`` and ``v = g(K0, K1)^2``."""
    k0, k1 = kp.ops
    u = 4.0 * complex(mat2.det2(k0 @ k1))
    v = complex(mat2.gfun(k0, k1)) ** 2
    return u, v


def three_tangle_kraus(kp: KrausPair, e0sq: float) -> float:
    """``E0^2 |4 det(K0 K1) - g(K0, K1)^2|``; linear in the initial tangle."""
    e0sq = float(e0sq)
    if not 0.0 <= e0sq <= 1.0:
        raise DomainError(f"initial tangle must lie in [0, 1], got {e0sq!r}")
    u, v = kraus_invariants(kp)
    return _clamp(e0sq * abs(u - v))
