"""Two local channels: S interacts with E, S' with E'.

The 4-qubit state is ``(U'_{S'E'} (x) U_{SE}) |psi0>_{S'S} |00>_{EE'}`` with
qubit order (S', S, E, E'). Quantities that only involve the S-E side (or the
S'-E' side) coincide numerically with the 3-qubit closed forms evaluated at
the matching Kraus pair; :func:`correspondence_check` measures how well.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import bipartite, mat2, oracle
from .bipartite import InitialReduced
from .channels import KrausPair, TwoQubitPure, identity_channel
from .classify import DEFAULT_TOL, is_ghz_pair, is_w_sufficient
from .errors import ConsistencyError
from .oracle import E, E_PRIME, S, S_PRIME
from .tangle import three_tangle_direct, three_tangle_kraus

#: Eigenvalues of a two-qubit block above this count towards its rank.
SUPPORT_CUTOFF = 1e-9
#: Third eigenvalues above this (but below the cutoff) trigger a warning.
SUPPORT_WARN = 1e-12


def evolve4(kp: KrausPair, kp_prime: KrausPair, psi0: TwoQubitPure) -> np.ndarray:
    """16 amplitudes ``c[n, l, m, m']`` of the evolved S'SEE' state."""
    t = kp.tensor()  # [m, l, s]
    tp = kp_prime.tensor()  # [m', n, n0]
    c = np.einsum("qna,mls,as->nlmq", tp, t, psi0.matrix())
    return c.reshape(16)


def _wootters(state, pair) -> float:
    return oracle.wootters_concurrence_sq(oracle.reduced_density(state, list(pair)))


def residual(state, i: int) -> float:
    """``R_i = C^2_{i|jkl} - sum_{j != i} C^2_{ij}`` by brute force."""
    state = np.asarray(state, dtype=complex).reshape(16)
    one = oracle.purity_tangle(oracle.reduced_density(state, [i]))
    return one - sum(_wootters(state, (i, j)) for j in range(4) if j != i)


def all_bipartition_tangles(state) -> dict[tuple[int, ...], float]:
    """Linear-entropy tangle ``2(1 - Tr rho_A^2)`` of all seven cuts of 4 qubits."""
    cuts = [(q,) for q in range(4)] + [(0, 1), (0, 2), (0, 3)]
    return {cut: oracle.bipartition_tangle(state, cut) for cut in cuts}


def _support(state, block) -> np.ndarray:
    """Orthonormal basis (4x2) of the support of the reduced state of ``block``."""
    rho = oracle.reduced_density(state, list(block))
    w, v = oracle.hermitian_eigh(rho)
    w, v = w[::-1], v[:, ::-1]
    if w[2] > SUPPORT_CUTOFF:
        raise ConsistencyError(
            f"block {block} has rank > 2 (third eigenvalue {w[2]:.3e}); "
            "it cannot act as an effective qubit"
        )
    if w[2] > SUPPORT_WARN:
        warnings.warn(f"block {block}: third eigenvalue {w[2]:.3e} above rounding level")
    return v[:, :2]


def _grouped(state, order) -> np.ndarray:
    psi = np.asarray(state, dtype=complex).reshape(2, 2, 2, 2)
    return np.transpose(psi, order)


def effective_qubit_tangle(state, pair, block, rotation=None) -> float:
    """3-tangle among qubits ``pair`` and the two-qubit ``block`` as one qubit.

    The block is projected onto the support of its reduced state; ``rotation``
    (a 2x2 unitary) changes the basis chosen inside that support.
    """
    basis = _support(state, block)
    if rotation is not None:
        basis = basis @ rotation
    psi = _grouped(state, list(pair) + list(block)).reshape(2, 2, 4)
    eff = (psi @ np.conj(basis)).reshape(8)
    return three_tangle_direct(eff / np.linalg.norm(eff))


def block_concurrence_sq(state, i: int, block) -> float:
    """Squared concurrence between qubit ``i`` and the effective qubit ``block``."""
    basis = _support(state, block)
    rho = oracle.reduced_density(state, [i] + list(block))
    proj = np.kron(np.eye(2), basis)  # 8x4
    rho_eff = proj.conj().T @ rho @ proj
    rho_eff /= np.trace(rho_eff).real
    return oracle.wootters_concurrence_sq(rho_eff)


class Identity(NamedTuple):
    name: str
    brute: float
    closed: float

    @property
    def residual(self) -> float:
        return abs(self.brute - self.closed)


def _side(state, kp, rho0, sys_q, env_q, partner, env_partner, label):
    """Five density-matrix identities plus the tau identity for one side."""
    r0 = InitialReduced.from_density(rho0)
    c2_sp_se, c2_sys, c2_env = bipartite.bipartition_tangles(kp, r0)
    sps, spe, se = bipartite.pairwise_tangles(kp, r0)
    s, e, sp, ep = label
    block = (partner, env_partner)
    return [
        Identity(f"C2_{s}|{e}{sp}{ep}", oracle.purity_tangle(oracle.reduced_density(state, [sys_q])), c2_sys),
        Identity(f"C2_{e}|{s}{sp}{ep}", oracle.purity_tangle(oracle.reduced_density(state, [env_q])), c2_env),
        Identity(f"C2_{s}{e}", _wootters(state, (sys_q, env_q)), se),
        Identity(f"C2_{s}|{sp}{ep}", block_concurrence_sq(state, sys_q, block), sps),
        Identity(f"C2_{e}|{sp}{ep}", block_concurrence_sq(state, env_q, block), spe),
        Identity(
            f"tau_{s}{e}({sp}{ep})",
            effective_qubit_tangle(state, (sys_q, env_q), block),
            three_tangle_kraus(kp, r0.e0sq),
        ),
    ]


def correspondence_check(
    kp: KrausPair, kp_prime: KrausPair, psi0: TwoQubitPure
) -> list[Identity]:
    """Brute-force 4-qubit values against the 3-qubit closed forms.

    The first six identities use ``(K0, K1)`` and the reduced state of S; the
    last six use ``(K0', K1')`` and the reduced state of S'. Within each group
    the sixth entry is the tau identity.
    """
    state = evolve4(kp, kp_prime, psi0)
    psi = psi0.matrix()  # [s', s]
    rho_s = psi.T @ psi.conj()
    rho_sp = psi @ psi.conj().T
    return _side(state, kp, rho_s, S, E, S_PRIME, E_PRIME, ("S", "E", "S'", "E'")) + _side(
        state, kp_prime, rho_sp, S_PRIME, E_PRIME, S, E, ("S'", "E'", "S", "E")
    )


@dataclass(frozen=True)
class ConditionReport:
    ghz: bool
    ghz_prime: bool
    w: bool
    w_prime: bool

    @property
    def residuals_nonzero(self) -> bool:
        """Both pairs create 3-tangle, so every ``R_i`` is nonzero."""
        return self.ghz and self.ghz_prime

    @property
    def all_bipartitions_entangled(self) -> bool:
        """Both pairs satisfy the W-type conditions, so the 4-qubit state is
        entangled across every cut."""
        return self.w and self.w_prime


def genuine_conditions(kp: KrausPair, kp_prime: KrausPair, tol: float = DEFAULT_TOL) -> ConditionReport:
    def w_type(k):
        return not is_ghz_pair(k, tol) and is_w_sufficient(k, tol)

    return ConditionReport(
        ghz=is_ghz_pair(kp, tol),
        ghz_prime=is_ghz_pair(kp_prime, tol),
        w=w_type(kp),
        w_prime=w_type(kp_prime),
    )
