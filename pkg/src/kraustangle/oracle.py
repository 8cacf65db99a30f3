"""Brute-force ground truth for the closed forms.

Everything here works on dense state vectors and density matrices and knows
nothing about the Kraus-operator formulas: states are evolved amplitude by
amplitude, reduced states come from explicit partial traces, pairwise
entanglement from the Wootters concurrence, and eigenproblems are solved by
cyclic Jacobi rotations. Most routines accept stacks of inputs along leading
axes.

Qubit order in flat state vectors is big-endian: (S', S, E) for three qubits
and (S', S, E, E') for four.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausPair, TwoQubitPure, kraus_from_unitary
from .errors import ConsistencyError, ConvergenceError
from .tangle import three_tangle_direct

S_PRIME, S, E, E_PRIME = 0, 1, 2, 3
QUBIT_NAMES = ("S'", "S", "E", "E'")

#: Hermiticity / trace / positivity tolerance for density matrices.
DENSITY_ATOL = 1e-10
#: Eigenvalues of a reduced state below this are treated as exact zeros.
RANK_CUTOFF = 1e-12

_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


# --- eigen-solver -----------------------------------------------------------

def hermitian_eigh(a, tol: float = 1e-15, max_sweeps: int = 60):
    """Eigen-decomposition of Hermitian matrices by cyclic Jacobi rotations.

    Args:
        a: array of shape ``(..., n, n)``; only needs to be Hermitian up to
            rounding.
        tol: convergence threshold on the off-diagonal Frobenius norm,
            relative to the Frobenius norm of the input.
        max_sweeps: sweeps over all (p, q) pairs before giving up.

    Returns:
        ``(w, v)`` with eigenvalues ``w`` in ascending order and the matching
        orthonormal eigenvectors in the columns of ``v``, as ``numpy.linalg.eigh``.

    Raises:
        ConvergenceError: if the off-diagonal part does not fall below ``tol``.
    """
    a = np.array(a, dtype=complex)
    shape = a.shape
    n = shape[-1]
    a = a.reshape(-1, n, n)
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    scale = np.maximum(np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1))), 1e-300)
    offmask = ~np.eye(n, dtype=bool)

    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=-1))
        if np.all(off <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > 1e-300
                phase = np.where(active, apq / np.where(active, mag, 1.0), 1.0)
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                theta = np.where(active, (aqq - app) / (2.0 * np.where(active, mag, 1.0)), 0.0)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t**2 + 1.0)
                s = t * c
                ph = np.conj(phase)  # e^{-i arg a_pq}
                # columns: A <- A J
                ap = a[:, :, p].copy()
                aq = a[:, :, q].copy()
                a[:, :, p] = c[:, None] * ap - (s * ph)[:, None] * aq
                a[:, :, q] = s[:, None] * ap + (c * ph)[:, None] * aq
                # rows: A <- J^dag A
                ap = a[:, p, :].copy()
                aq = a[:, q, :].copy()
                a[:, p, :] = c[:, None] * ap - (s * phase)[:, None] * aq
                a[:, q, :] = s[:, None] * ap + (c * phase)[:, None] * aq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                vp = v[:, :, p].copy()
                vq = v[:, :, q].copy()
                v[:, :, p] = c[:, None] * vp - (s * ph)[:, None] * vq
                v[:, :, q] = s[:, None] * vp + (c * ph)[:, None] * vq
    else:
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=-1))
        if not np.all(off <= tol * scale):
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(max relative off-diagonal norm {np.max(off / scale):.3e})"
            )

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    order = np.argsort(w, axis=-1)
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w.reshape(shape[:-1]), v.reshape(shape)


def psd_sqrt(rho):
    """Square root of positive semidefinite Hermitian matrices."""
    w, v = hermitian_eigh(rho)
    root = np.sqrt(np.clip(w, 0.0, None))
    return (v * root[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


# --- random instances -------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_unitary(seed, n: int = 4) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    rng = _rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_psi0(seed) -> TwoQubitPure:
    rng = _rng(seed)
    z = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return TwoQubitPure.from_matrix(z.reshape(2, 2))


def random_kraus_pair(seed) -> KrausPair:
    return kraus_from_unitary(random_unitary(seed))


def random_w_pair(seed) -> KrausPair:
    """Random pair with ``4 det(K0 K1) = g(K0, K1)^2`` (no 3-tangle).

    An amplitude-damping pair with random strength, dressed by random unitaries
    on the input and output of S and a random unitary change of E basis. None
    of these can create 3-tangle.
    """
    from .channels import ad_channel

    rng = _rng(seed)
    p = rng.uniform(0.02, 0.98)
    kp = ad_channel(p)
    kp = kp.conjugated(random_unitary(rng, 2), random_unitary(rng, 2))
    return kp.mixed(random_unitary(rng, 2))


# --- states -----------------------------------------------------------------

def evolve3(kp: KrausPair, psi0: TwoQubitPure) -> np.ndarray:
    """Evolve ``|psi0>_{S'S}|0>_E`` amplitude by amplitude.

    ``|s>_S|0>_E -> sum_mu (K_mu|s>)|mu>``, S' untouched. Returns 8 amplitudes.
    """
    t = kp.tensor()  # [m, l, s]
    psi = psi0.matrix()  # [n, s]
    c = np.zeros((2, 2, 2), dtype=complex)
    for n in range(2):
        for s in range(2):
            for l in range(2):
                for m in range(2):
                    c[n, l, m] += t[m, l, s] * psi[n, s]
    return c.reshape(8)


def evolve3_unitary(u: np.ndarray, psi0: TwoQubitPure) -> np.ndarray:
    """Same evolution through the full unitary ``I_{S'} (x) U_SE``."""
    phi0 = np.kron(psi0.vector(), [1.0, 0.0])
    return np.kron(np.eye(2), u) @ phi0


def n_qubits(state) -> int:
    n = int(np.log2(np.shape(state)[-1]))
    if 2**n != np.shape(state)[-1]:
        raise ValueError("state length is not a power of two")
    return n


def reduced_density(state, keep) -> np.ndarray:
    """Partial trace of pure states onto the qubits in ``keep`` (in that order).

    ``state`` may carry leading batch axes. Returns ``(..., 2^k, 2^k)``.
    """
    state = np.asarray(state, dtype=complex)
    n = n_qubits(state)
    keep = list(keep)
    rest = [q for q in range(n) if q not in keep]
    batch = state.shape[:-1]
    nb = len(batch)
    psi = state.reshape(batch + (2,) * n)
    psi = np.transpose(psi, list(range(nb)) + [nb + q for q in keep + rest])
    psi = psi.reshape(batch + (2 ** len(keep), 2 ** len(rest)))
    return psi @ np.conj(np.swapaxes(psi, -1, -2))


def partial_trace(state, keep) -> np.ndarray:
    """Reduced density matrix of one or two named subsystems."""
    if isinstance(keep, int):
        keep = [keep]
    if len(keep) not in (1, 2):
        raise ValueError("keep one or two subsystems")
    return reduced_density(state, keep)


def check_density(rho) -> None:
    rho = np.asarray(rho)
    herm = np.max(np.abs(rho - np.conj(np.swapaxes(rho, -1, -2))))
    tr = np.max(np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0))
    if herm > DENSITY_ATOL or tr > DENSITY_ATOL:
        raise ConsistencyError(f"not a density matrix: hermiticity {herm:.2e}, trace {tr:.2e}")


def purity_tangle(rho) -> np.ndarray | float:
    """``4 det(rho)`` of a one-qubit reduced state, cross-checked with ``2(1 - Tr rho^2)``."""
    rho = np.asarray(rho, dtype=complex)
    det = (rho[..., 0, 0] * rho[..., 1, 1] - rho[..., 0, 1] * rho[..., 1, 0]).real
    linear = 2.0 * (1.0 - np.einsum("...ij,...ji->...", rho, rho).real)
    if np.max(np.abs(4.0 * det - linear)) > 1e-12:
        raise ConsistencyError("4 det(rho) and 2(1 - Tr rho^2) disagree")
    out = np.clip(4.0 * det, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def bipartition_tangle(state, part) -> np.ndarray | float:
    """``2(1 - Tr rho_A^2)`` for the qubits ``part`` of a pure state."""
    rho = reduced_density(state, list(part))
    out = 2.0 * (1.0 - np.einsum("...ij,...ji->...", rho, rho).real)
    out = np.clip(out, 0.0, None)
    return float(out) if out.ndim == 0 else out


def wootters_concurrence_sq(rho) -> np.ndarray | float:
    """Squared Wootters concurrence of two-qubit density matrices.

    With ``rho = sum_i |x_i><x_i|`` (subnormalized eigenvectors) the
    ``lambda_i`` of the Wootters formula are the singular values of the
    symmetric matrix ``T_ij = x_i^T (Y (x) Y) x_j``; they coincide with the
    square roots of the eigenvalues of ``sqrt(rho) (Y(x)Y) rho* (Y(x)Y) sqrt(rho)``.
    For rank <= 2 the result ``(s1 - s2)^2 = ||T||_F^2 - 2|det T|`` needs no
    square root at all, which keeps it accurate to rounding level.
    """
    rho = np.asarray(rho, dtype=complex)
    scalar = rho.ndim == 2
    rho = rho.reshape(-1, 4, 4)
    w, v = hermitian_eigh(rho)
    w = w[:, ::-1]
    v = v[:, :, ::-1]
    if np.any(w[:, -1] < -1e-9):
        raise ConsistencyError(f"density matrix has eigenvalue {w[:, -1].min():.3e}")
    w = np.where(w > RANK_CUTOFF, w, 0.0)
    x = v * np.sqrt(w)[:, None, :]
    t = np.swapaxes(x, -1, -2) @ _YY @ x
    rank = np.count_nonzero(w, axis=-1)

    c2 = np.empty(len(rho))
    low = rank <= 2
    t2 = t[low, :2, :2]
    det = t2[:, 0, 0] * t2[:, 1, 1] - t2[:, 0, 1] * t2[:, 1, 0]
    c2[low] = np.sum(np.abs(t2) ** 2, axis=(-2, -1)) - 2.0 * np.abs(det)
    if np.any(~low):
        th = t[~low]
        sv2, _ = hermitian_eigh(th @ np.conj(np.swapaxes(th, -1, -2)))
        sv = np.sqrt(np.clip(sv2[:, ::-1], 0.0, None))
        c = np.maximum(0.0, sv[:, 0] - sv[:, 1] - sv[:, 2] - sv[:, 3])
        c2[~low] = c**2
    c2 = np.clip(c2, 0.0, 1.0)
    return float(c2[0]) if scalar else c2


def wootters_congruence_sq(rho) -> float:
    """Textbook route: square roots of the spectrum of the Hermitian congruence.

    Kept as a cross-check of :func:`wootters_concurrence_sq`; it loses about
    half the digits on rank-deficient states.
    """
    sq = psd_sqrt(rho)
    r = sq @ _YY @ np.conj(rho) @ _YY @ sq
    lam2, _ = hermitian_eigh(r)
    lam = np.sqrt(np.clip(lam2[..., ::-1], 0.0, None))
    c = np.maximum(0.0, lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3])
    return c**2


# --- reports ----------------------------------------------------------------

@dataclass(frozen=True)
class DirectReport:
    """Entanglement quantities of a pure 3-qubit state from brute force.

    Attribute names follow ``EntanglementReport``; ``ckw_residuals`` holds
    ``C^2_{i|jk} - C^2_{ij} - C^2_{ik} - tau`` for i = S', S, E.
    """

    tau: float
    c2_sp_se: float
    c2_s_spe: float
    c2_e_ssp: float
    c2_sps: float
    c2_spe: float
    c2_se: float
    ckw_residuals: tuple[float, float, float]


def full_report_direct(state) -> DirectReport:
    state = np.asarray(state, dtype=complex).reshape(8)
    tau = three_tangle_direct(state)
    one = [purity_tangle(reduced_density(state, [q])) for q in (S_PRIME, S, E)]
    rhos = np.stack([reduced_density(state, pair) for pair in ([0, 1], [0, 2], [1, 2])])
    sps, spe, se = (float(x) for x in wootters_concurrence_sq(rhos))
    res = (
        one[0] - sps - spe - tau,
        one[1] - sps - se - tau,
        one[2] - spe - se - tau,
    )
    return DirectReport(tau, one[0], one[1], one[2], sps, spe, se, res)

