"""Closed-form bipartite entanglement of the evolved S'SE state.

All quantities are functions of the Kraus pair and of the initial reduced
state ``rho0`` of S:

    C^2_{S'|SE} = E0^2
    C^2_{S|S'E} = E0^2 D_S + G
    C^2_{E|SS'} = E0^2 D_E + G

with ``D_S``, ``D_E`` independent of the initial state and
``G = -4 g(K0 rho0 K1^dag, K1 rho0 K0^dag)`` carrying the dependence on it.
Pairwise tangles follow from the CKW relation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import mat2
from .channels import KrausPair, TwoQubitPure
from .errors import ConsistencyError, DomainError
from .tangle import kraus_invariants

#: Negative tangles down to -ERROR_ATOL are rounding noise and are clamped to
#: zero; anything lower (or an imaginary residue of G that large) is a bug.
ERROR_ATOL = 1e-8
#: Distance from the square-root branch point refused by :func:`dc2_de0sq`.
BRANCH_GAP = 1e-6
#: Coherences smaller than this have no defined phase; phi is reported as 0.
PHASE_CUTOFF = 1e-14
#: W-family test used as a precondition of :func:`dc2_de0sq`.
W_TOL = 1e-9


def rho_ee_bounds(e0sq: float) -> tuple[float, float]:
    """Roots of ``4 rho_ee (1 - rho_ee) = E0^2``; feasible rho_ee lie between them."""
    r = math.sqrt(max(0.0, 1.0 - e0sq))
    return 0.5 * (1.0 - r), 0.5 * (1.0 + r)


@dataclass(frozen=True)
class InitialReduced:
    """Initial state of S, ``[[1 - rho_ee, |rho_ge| e^{i phi}], [c.c., rho_ee]]``."""

    rho_ee: float
    phi: float = 0.0
    rho_ge_abs: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.rho_ee <= 1.0:
            raise DomainError(f"rho_ee must lie in [0, 1], got {self.rho_ee!r}")
        if self.rho_ge_abs < 0.0:
            raise DomainError("|rho_ge| must be non-negative")
        if self.rho_ge_abs**2 > self.rho_ee * (1.0 - self.rho_ee) + 1e-12:
            raise DomainError(
                f"|rho_ge|^2 = {self.rho_ge_abs**2!r} exceeds rho_ee(1 - rho_ee) = "
                f"{self.rho_ee * (1.0 - self.rho_ee)!r}; rho0 would not be positive"
            )

    @classmethod
    def from_e0sq(cls, rho_ee: float, phi: float, e0sq: float) -> "InitialReduced":
        """Trade ``|rho_ge|`` for the initial tangle E0^2 at fixed population."""
        x = 4.0 * rho_ee * (1.0 - rho_ee)
        if not 0.0 <= e0sq <= 1.0:
            raise DomainError(f"E0^2 must lie in [0, 1], got {e0sq!r}")
        if e0sq > x + 1e-12:
            lo, hi = rho_ee_bounds(e0sq)
            raise DomainError(
                f"E0^2 = {e0sq!r} is infeasible at rho_ee = {rho_ee!r}: "
                f"need rho_ee in [{lo!r}, {hi!r}]"
            )
        return cls(rho_ee, phi, 0.5 * math.sqrt(max(0.0, x - e0sq)))

    @classmethod
    def from_density(cls, rho) -> "InitialReduced":
        rho = np.asarray(rho, dtype=complex)
        coh = rho[0, 1]
        mag = abs(coh)
        phi = 0.0 if mag < PHASE_CUTOFF else math.atan2(coh.imag, coh.real) % (2 * math.pi)
        rho_ee = min(max(float(rho[1, 1].real), 0.0), 1.0)
        mag = min(mag, math.sqrt(rho_ee * (1.0 - rho_ee)))
        return cls(rho_ee, phi, 0.0 if mag < PHASE_CUTOFF else mag)

    @property
    def e0sq(self) -> float:
        """Initial S-S' tangle ``4 det rho0``."""
        val = 4.0 * self.rho_ee * (1.0 - self.rho_ee) - 4.0 * self.rho_ge_abs**2
        return min(max(val, 0.0), 1.0)

    def matrix(self) -> np.ndarray:
        c = self.rho_ge_abs * np.exp(1j * self.phi)
        return np.array([[1.0 - self.rho_ee, c], [np.conj(c), self.rho_ee]], dtype=complex)


def reduced_from_state(psi0: TwoQubitPure) -> InitialReduced:
    """Reduced state of S obtained by tracing S' out of ``psi0``."""
    psi = psi0.matrix()  # [s', s]
    rho = psi.T @ psi.conj()
    return InitialReduced.from_density(rho)


def purification(r0: InitialReduced) -> TwoQubitPure:
    """A two-qubit pure state whose S marginal is ``r0``.

    Uses ``psi[s', s] = sqrt(rho0)[s, s']`` with the closed-form square root of
    a 2x2 positive matrix.
    """
    rho = r0.matrix()
    sd = math.sqrt(max(0.0, float(mat2.det2(rho).real)))
    root = (rho + sd * mat2.IDENTITY) / math.sqrt(1.0 + 2.0 * sd)
    return TwoQubitPure.from_matrix(root.T)


def _real(z, what: str) -> float:
    z = complex(z)
    if abs(z.imag) > ERROR_ATOL:
        raise ConsistencyError(f"{what} has imaginary part {z.imag:.3e}")
    return z.real


def _tangle(x: float, what: str) -> float:
    if x < -ERROR_ATOL:
        raise ConsistencyError(f"{what} = {x:.3e} is negative")
    return max(float(x), 0.0)


def g_term(kp: KrausPair, r0: InitialReduced) -> float:
    """``G = -4 g(K0 rho0 K1^dag, K1 rho0 K0^dag)``; real by construction."""
    k0, k1 = kp.ops
    rho = r0.matrix()
    a = k0 @ rho @ mat2.adjoint(k1)
    return _real(-4.0 * mat2.gfun(a, mat2.adjoint(a)), "G")


def ds_de(kp: KrausPair) -> tuple[float, float]:
    k0, k1 = kp.ops
    _, v = kraus_invariants(kp)
    d_s = abs(mat2.det2(k0)) ** 2 + abs(mat2.det2(k1)) ** 2 + abs(v)
    d_e = _real(mat2.gfun(mat2.adjoint(k0) @ k0, mat2.adjoint(k1) @ k1), "D_E")
    return float(d_s), d_e


def ds_de_relation_residual(kp: KrausPair) -> float:
    """``|D_S - (1 - D_E + |g(K0, K1)^2|)|``, zero for a complete pair."""
    d_s, d_e = ds_de(kp)
    _, v = kraus_invariants(kp)
    return abs(d_s - (1.0 - d_e + abs(v)))


def bipartition_tangles(kp: KrausPair, r0: InitialReduced) -> tuple[float, float, float]:
    """``(C^2_{S'|SE}, C^2_{S|S'E}, C^2_{E|SS'})``."""
    e0sq = r0.e0sq
    d_s, d_e = ds_de(kp)
    g = g_term(kp, r0)
    return (
        float(e0sq),
        _tangle(e0sq * d_s + g, "C^2_{S|S'E}"),
        _tangle(e0sq * d_e + g, "C^2_{E|SS'}"),
    )


def _dets(kp: KrausPair) -> tuple[float, float]:
    return abs(mat2.det2(kp.k0)), abs(mat2.det2(kp.k1))


def pairwise_tangles(kp: KrausPair, r0: InitialReduced) -> tuple[float, float, float]:
    """``(C^2_{S'S}, C^2_{S'E}, C^2_{SE})``."""
    e0sq = r0.e0sq
    u, v = kraus_invariants(kp)
    au, av, auv = abs(u), abs(v), abs(u - v)
    d0, d1 = _dets(kp)
    ssum = (d0 + d1) ** 2
    g = g_term(kp, r0)
    sps = e0sq * ssum - 0.5 * e0sq * (au - av + auv)
    spe = e0sq * (1.0 - ssum) - 0.5 * e0sq * (av - au + auv)
    se = g + 0.5 * e0sq * (av - auv)
    return (
        _tangle(sps, "C^2_{S'S}"),
        _tangle(spe, "C^2_{S'E}"),
        _tangle(se, "C^2_{SE}"),
    )


def lower_bounds(kp: KrausPair, r0: InitialReduced) -> tuple[float, float, float]:
    """Kraus-only lower bounds on ``(C^2_{S'S}, C^2_{S'E}, C^2_{SE})``.

    They are tight whenever ``|u - v| = |u| + |v|``, in particular when
    ``u = 0`` or ``v = 0``.
    """
    e0sq = r0.e0sq
    _, v = kraus_invariants(kp)
    d0, d1 = _dets(kp)
    return (
        e0sq * (d0 - d1) ** 2,
        e0sq * (1.0 - (d0 + d1) ** 2 - abs(v)),
        g_term(kp, r0) - 2.0 * e0sq * d0 * d1,
    )


def environment_state(kp: KrausPair, r0: InitialReduced) -> np.ndarray:
    """Reduced state of E, ``rho_E[mu, nu] = Tr(K_mu rho0 K_nu^dag)``."""
    rho = r0.matrix()
    out = np.empty((2, 2), dtype=complex)
    for mu, km in enumerate(kp.ops):
        for nu, kn in enumerate(kp.ops):
            out[mu, nu] = mat2.trace(km @ rho @ mat2.adjoint(kn))
    return out


def _mn(kp: KrausPair, rho_ee: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    k0, k1 = kp.ops
    sigma_ee = np.diag([1.0 - rho_ee, rho_ee]).astype(complex)
    sigma_phi = np.array([[0.0, np.exp(1j * phi)], [np.exp(-1j * phi), 0.0]])
    k1d = mat2.adjoint(k1)
    return k0 @ sigma_ee @ k1d, k0 @ sigma_phi @ k1d


def _branch(rho_ee: float, e0sq: float) -> float:
    x = 4.0 * rho_ee * (1.0 - rho_ee)
    if e0sq > x + 1e-12:
        lo, hi = rho_ee_bounds(e0sq)
        raise DomainError(
            f"E0^2 = {e0sq!r} needs rho_ee in [{lo!r}, {hi!r}], got {rho_ee!r}"
        )
    return math.sqrt(max(0.0, x - e0sq))


def g_decomposition(
    kp: KrausPair, rho_ee: float, phi: float, e0sq: float
) -> tuple[float, float, float, float]:
    """Split G as ``G1 + G2 sqrt(4 rho_ee (1 - rho_ee) - E0^2) + G3 E0^2``.

    Returns ``(G1, G2, G3, G)``.
    """
    root = _branch(rho_ee, e0sq)
    m, n = _mn(kp, rho_ee, phi)
    gnn = _real(mat2.gfun(n, mat2.adjoint(n)), "g(N, N^dag)")
    gmm = _real(mat2.gfun(m, mat2.adjoint(m)), "g(M, M^dag)")
    g1 = -4.0 * (gmm + rho_ee * (1.0 - rho_ee) * gnn)
    g2 = -4.0 * complex(mat2.gfun(m, mat2.adjoint(n))).real
    g3 = gnn
    return g1, g2, g3, g1 + g2 * root + g3 * e0sq


def dc2_de0sq(kp: KrausPair, rho_ee: float, phi: float, e0sq: float, which: str) -> float:
    """Derivative of ``C^2_{S|S'E}`` (``which="S"``) or ``C^2_{E|SS'}`` (``"E"``)
    with respect to E0^2 at fixed ``rho_ee`` and ``phi``.

    Only defined for pairs that produce no 3-tangle.
    """
    if which not in ("S", "E"):
        raise ValueError(f"which must be 'S' or 'E', got {which!r}")
    u, v = kraus_invariants(kp)
    if abs(u - v) > W_TOL * max(1.0, abs(u), abs(v)):
        raise DomainError(
            f"pair generates 3-tangle (|u - v| = {abs(u - v):.3e}); derivative needs u = v"
        )
    root = _branch(rho_ee, e0sq)
    if root**2 < BRANCH_GAP:
        raise DomainError(
            f"E0^2 = {e0sq!r} is within {BRANCH_GAP:g} of the branch point "
            f"4 rho_ee (1 - rho_ee) = {4.0 * rho_ee * (1.0 - rho_ee)!r}"
        )
    d0, d1 = _dets(kp)
    d_s = (d0 + d1) ** 2
    d_i = d_s if which == "S" else 1.0 - d_s
    m, n = _mn(kp, rho_ee, phi)
    gnn = _real(mat2.gfun(n, mat2.adjoint(n)), "g(N, N^dag)")
    re_mn = complex(mat2.gfun(m, mat2.adjoint(n))).real
    return d_i + 2.0 * d0 * d1 + gnn + 2.0 * re_mn / root


@dataclass(frozen=True)
class EntanglementReport:
    """All tangles of one evolved state plus its family.

    ``c2_sp_se`` is ``C^2_{S'|SE}``, ``c2_sps`` is ``C^2_{S'S}`` and so on;
    ``dS``, ``dE`` and ``G`` are the Kraus-pair decomposition terms.
    """

    tau: float
    c2_sp_se: float
    c2_s_spe: float
    c2_e_ssp: float
    c2_sps: float
    c2_spe: float
    c2_se: float
    dS: float
    dE: float
    G: float
    class_label: Optional[str] = None
    tier: Optional[str] = None

    def ckw_residuals(self) -> tuple[float, float, float]:
        return (
            self.c2_sp_se - self.c2_sps - self.c2_spe - self.tau,
            self.c2_s_spe - self.c2_sps - self.c2_se - self.tau,
            self.c2_e_ssp - self.c2_spe - self.c2_se - self.tau,
        )
