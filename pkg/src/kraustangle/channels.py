"""Kraus pairs for a qubit S coupled to a qubit E that starts in |0>.

Basis conventions used throughout the package:

* two-qubit S'S amplitudes ``(alpha, beta, gamma, delta)`` multiply
  ``|11>, |10>, |01>, |00>`` (S' first);
* the S-E unitary is indexed by ``2*s + e``;
* three-qubit amplitudes ``c[n, l, m]`` carry n = S', l = S, m = E, i.e. flat
  index ``4n + 2l + m``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mat2
from .errors import KrausError

#: Entrywise tolerance of the completeness relation sum_mu K_mu^dag K_mu = I.
COMPLETENESS_ATOL = 1e-9
#: Entrywise tolerance of U^dag U = I for S-E unitaries.
UNITARY_ATOL = 1e-9
#: Tolerance on the norm of a two-qubit pure state.
NORM_ATOL = 1e-12


def completeness_residual(k0: np.ndarray, k1: np.ndarray) -> float:
    """Largest entry of ``|K0^dag K0 + K1^dag K1 - I|``."""
    s = mat2.adjoint(k0) @ k0 + mat2.adjoint(k1) @ k1
    return float(np.max(np.abs(s - mat2.IDENTITY)))


@dataclass(frozen=True, eq=False)
class KrausPair:
    """Two Kraus operators ``K_mu = <mu|_E U_SE |0>_E`` of a qubit channel."""

    k0: np.ndarray
    k1: np.ndarray

    def __post_init__(self):
        k0 = mat2.as_cmat2(self.k0)
        k1 = mat2.as_cmat2(self.k1)
        if k0.shape != (2, 2) or k1.shape != (2, 2):
            raise KrausError("KrausPair holds exactly one pair of 2x2 operators")
        res = completeness_residual(k0, k1)
        if res > COMPLETENESS_ATOL:
            raise KrausError(
                f"Kraus pair violates completeness: max |K0'K0 + K1'K1 - I| = {res:.3e}"
                f" > {COMPLETENESS_ATOL:g}"
            )
        k0.flags.writeable = False
        k1.flags.writeable = False
        object.__setattr__(self, "k0", k0)
        object.__setattr__(self, "k1", k1)

    @property
    def ops(self) -> tuple[np.ndarray, np.ndarray]:
        return self.k0, self.k1

    def tensor(self) -> np.ndarray:
        """Kraus operators stacked as ``T[mu, out, in]``."""
        return np.stack([self.k0, self.k1])

    def conjugated(self, v: np.ndarray, w: np.ndarray) -> "KrausPair":
        """Return ``(V K0 W, V K1 W)`` for unitaries V (output) and W (input)."""
        return KrausPair(v @ self.k0 @ w, v @ self.k1 @ w)

    def mixed(self, o: np.ndarray) -> "KrausPair":
        """Return ``K'_mu = sum_nu O[mu, nu] K_nu``, a unitary change of E basis."""
        k = np.einsum("mn,nij->mij", o, self.tensor())
        return KrausPair(k[0], k[1])

    def __repr__(self):
        return f"KrausPair(k0={self.k0.tolist()}, k1={self.k1.tolist()})"


@dataclass(frozen=True)
class TwoQubitPure:
    """Pure S'S state ``alpha|11> + beta|10> + gamma|01> + delta|00>``."""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        amps = [complex(x) for x in (self.alpha, self.beta, self.gamma, self.delta)]
        if not all(math.isfinite(abs(a)) for a in amps):
            raise ValueError("amplitudes must be finite")
        norm = sum(abs(a) ** 2 for a in amps)
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm!r}")
        for name, a in zip(("alpha", "beta", "gamma", "delta"), amps):
            object.__setattr__(self, name, a)

    @classmethod
    def from_matrix(cls, psi) -> "TwoQubitPure":
        """Inverse of :meth:`matrix`; normalizes the input."""
        psi = np.asarray(psi, dtype=complex).reshape(2, 2)
        psi = psi / np.linalg.norm(psi)
        return cls(alpha=psi[1, 1], beta=psi[1, 0], gamma=psi[0, 1], delta=psi[0, 0])

    def matrix(self) -> np.ndarray:
        """Amplitudes as ``psi[s', s]``."""
        return np.array([[self.delta, self.gamma], [self.beta, self.alpha]], dtype=complex)

    def vector(self) -> np.ndarray:
        """Amplitudes in the flat basis ``2 s' + s``."""
        return self.matrix().reshape(4)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise KrausError(f"channel strength p must lie in [0, 1], got {p!r}")
    return p


def ad_channel(p: float) -> KrausPair:
    """Amplitude damping: |1> decays to |0> with probability p."""
    p = _check_p(p)
    return KrausPair(
        mat2.cmat2(1.0, 0.0, 0.0, math.sqrt(1.0 - p)),
        mat2.cmat2(0.0, math.sqrt(p), 0.0, 0.0),
    )


def dephasing_channel(p: float) -> KrausPair:
    p = _check_p(p)
    return KrausPair(
        mat2.cmat2(1.0, 0.0, 0.0, math.sqrt(1.0 - p)),
        mat2.cmat2(0.0, 0.0, 0.0, math.sqrt(p)),
    )


def phase_flip_channel(p: float) -> KrausPair:
    """Phase flip with flip probability p/2."""
    p = _check_p(p)
    return KrausPair(
        math.sqrt(1.0 - p / 2) * mat2.IDENTITY,
        math.sqrt(p / 2) * mat2.SIGMA_Z,
    )


CHANNELS = {
    "ad": ad_channel,
    "dephasing": dephasing_channel,
    "phase_flip": phase_flip_channel,
}


def identity_channel() -> KrausPair:
    return KrausPair(mat2.IDENTITY, mat2.ZERO)


def unitary_residual(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def as_cmat4(u) -> np.ndarray:
    """Validate a 4x4 unitary on S-E (basis index ``2s + e``)."""
    u = np.asarray(u, dtype=complex)
    if u.shape == (16,):
        u = u.reshape(4, 4)
    if u.shape != (4, 4):
        raise KrausError(f"expected a 4x4 unitary, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise KrausError("unitary has non-finite entries")
    res = unitary_residual(u)
    if res > UNITARY_ATOL:
        raise KrausError(
            f"matrix is not unitary: max |U'U - I| = {res:.3e} > {UNITARY_ATOL:g}"
        )
    return u


def kraus_from_unitary(u) -> KrausPair:
    """Extract ``K_mu[s', s] = U[2s' + mu, 2s]`` from an S-E unitary."""
    u = as_cmat4(u)
    # rows 2s'+mu, columns 2s+0
    block = u[:, 0::2].reshape(2, 2, 2)  # [s', mu, s]
    return KrausPair(block[:, 0, :], block[:, 1, :])


def dilation(kp: KrausPair) -> np.ndarray:
    """A unitary on S-E whose Kraus pair (E starting in |0>) is ``kp``.

    Columns ``2s + 0`` are fixed by the pair; the two remaining columns are an
    orthonormal completion.
    """
    fixed = np.zeros((4, 2), dtype=complex)
    for s in range(2):
        for mu, k in enumerate(kp.ops):
            fixed[mu::2, s] = k[:, s]
    q, _ = np.linalg.qr(np.hstack([fixed, np.eye(4)]), mode="complete")
    u = np.empty((4, 4), dtype=complex)
    u[:, 0] = fixed[:, 0]
    u[:, 2] = fixed[:, 1]
    u[:, 1] = q[:, 2]
    u[:, 3] = q[:, 3]
    return u


def _m0(x, y) -> np.ndarray:
    return np.array([[x, 0], [y, 0]], dtype=complex)


def _m1(x, y) -> np.ndarray:
    return np.array([[0, x], [0, y]], dtype=complex)


def evolved_coeffs(kp: KrausPair, psi0: TwoQubitPure) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient matrices ``C_n[l, m] = c_{nlm}`` of the evolved S'SE state."""
    k0, k1 = kp.ops
    d, g, b, a = psi0.delta, psi0.gamma, psi0.beta, psi0.alpha
    c0 = k0 @ _m0(d, g) + k1 @ _m1(d, g)
    c1 = k0 @ _m0(b, a) + k1 @ _m1(b, a)
    return c0, c1
