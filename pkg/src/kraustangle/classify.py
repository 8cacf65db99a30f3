"""Entanglement family of the evolved state.

The first tier reads the family off the Kraus pair (and G for the
biseparable cases). The test for W-type genuine entanglement there is only
sufficient, so when it is inconclusive the second tier evolves the state and
computes the bipartition tangles directly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import bipartite, mat2, oracle
from .bipartite import EntanglementReport, InitialReduced
from .channels import KrausPair
from .tangle import kraus_invariants, three_tangle_direct, three_tangle_kraus

DEFAULT_TOL = 1e-9


class Family(str, enum.Enum):
    GHZ = "GHZ"
    W_GENUINE = "W_GENUINE"
    W_GENUINE_BY_DIRECT = "W_GENUINE_BY_DIRECT"
    BISEP_S = "BISEP_S"
    BISEP_E = "BISEP_E"
    # only reachable from classify_direct: the Kraus setting keeps S' entangled
    BISEP_SP = "BISEP_SP"
    FULLY_SEPARABLE = "FULLY_SEPARABLE"
    DEGENERATE_E0_ZERO = "DEGENERATE_E0_ZERO"

    def __str__(self):
        return self.value


class Tier(str, enum.Enum):
    KRAUS_CRITERION = "KRAUS_CRITERION"
    DIRECT_COMPUTATION = "DIRECT_COMPUTATION"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Classification:
    """Family label with the raw numbers it was decided from.

    ``gap`` is ``|u - v|`` with ``u = 4 det(K0 K1)`` and ``v = g(K0, K1)^2``;
    it is reported even when it falls inside the tolerance, since values
    between rounding level and ``tol`` cannot be resolved.
    """

    family: Family
    tier: Tier
    u: complex = 0j
    v: complex = 0j
    gap: float = 0.0
    det_sum: float = 0.0
    G: float = 0.0
    bisep_s_residual: float = 0.0
    bisep_e_residual: float = 0.0


def is_ghz_pair(kp: KrausPair, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``4 det(K0 K1) != g(K0, K1)^2`` at relative tolerance ``tol``."""
    u, v = kraus_invariants(kp)
    return abs(u - v) > tol * max(1.0, abs(u), abs(v))


def is_w_sufficient(kp: KrausPair, tol: float = DEFAULT_TOL) -> bool:
    """``0 < |det K0| + |det K1| < 1`` with margin ``tol`` on both sides."""
    s = abs(mat2.det2(kp.k0)) + abs(mat2.det2(kp.k1))
    return tol < s < 1.0 - tol


def _by_bipartitions(c2_s: float, c2_e: float, tol: float) -> Family:
    if c2_s <= tol:
        return Family.BISEP_S
    if c2_e <= tol:
        return Family.BISEP_E
    return Family.W_GENUINE_BY_DIRECT


def classify(kp: KrausPair, r0: InitialReduced, tol: float = DEFAULT_TOL) -> Classification:
    e0sq = r0.e0sq
    u, v = kraus_invariants(kp)
    d0 = abs(complex(mat2.det2(kp.k0)))
    d1 = abs(complex(mat2.det2(kp.k1)))
    g = bipartite.g_term(kp, r0)
    res_s = max(d0, d1, abs(g))
    res_e = abs(g - e0sq * (d0**2 + d1**2 - 1.0))
    info = dict(
        u=u, v=v, gap=abs(u - v), det_sum=d0 + d1, G=g,
        bisep_s_residual=res_s, bisep_e_residual=res_e,
    )
    kraus = Tier.KRAUS_CRITERION

    if e0sq <= tol:
        return Classification(Family.DEGENERATE_E0_ZERO, kraus, **info)
    if is_ghz_pair(kp, tol):
        return Classification(Family.GHZ, kraus, **info)
    if res_s <= tol:
        return Classification(Family.BISEP_S, kraus, **info)
    if res_e <= tol:
        return Classification(Family.BISEP_E, kraus, **info)
    if is_w_sufficient(kp, tol):
        return Classification(Family.W_GENUINE, kraus, **info)

    # the sufficient W test failed and neither biseparable test fired
    state = oracle.evolve3(kp, bipartite.purification(r0))
    c2_s = oracle.purity_tangle(oracle.reduced_density(state, [oracle.S]))
    c2_e = oracle.purity_tangle(oracle.reduced_density(state, [oracle.E]))
    return Classification(_by_bipartitions(c2_s, c2_e, tol), Tier.DIRECT_COMPUTATION, **info)


def classify_direct(state, tol: float = DEFAULT_TOL) -> Family:
    """Family of an arbitrary pure 3-qubit state (order S', S, E) by brute force."""
    state = np.asarray(state, dtype=complex).reshape(8)
    if three_tangle_direct(state) > tol:
        return Family.GHZ
    c2 = [oracle.purity_tangle(oracle.reduced_density(state, [q])) for q in range(3)]
    zero = [x <= tol for x in c2]
    if sum(zero) >= 2:
        return Family.FULLY_SEPARABLE
    if zero[0]:
        return Family.BISEP_SP
    if zero[1]:
        return Family.BISEP_S
    if zero[2]:
        return Family.BISEP_E
    return Family.W_GENUINE_BY_DIRECT


def same_family(a: Family, b: Family) -> bool:
    """Compare labels, treating the two W-genuine tags as one family."""
    w = {Family.W_GENUINE, Family.W_GENUINE_BY_DIRECT}
    return a == b or (a in w and b in w)


def entanglement_report(
    kp: KrausPair, r0: InitialReduced, tol: float = DEFAULT_TOL
) -> EntanglementReport:
    """Closed-form report of every tangle together with the family label."""
    c2_sp_se, c2_s_spe, c2_e_ssp = bipartite.bipartition_tangles(kp, r0)
    sps, spe, se = bipartite.pairwise_tangles(kp, r0)
    d_s, d_e = bipartite.ds_de(kp)
    cls = classify(kp, r0, tol)
    return EntanglementReport(
        tau=three_tangle_kraus(kp, r0.e0sq),
        c2_sp_se=c2_sp_se,
        c2_s_spe=c2_s_spe,
        c2_e_ssp=c2_e_ssp,
        c2_sps=sps,
        c2_spe=spe,
        c2_se=se,
        dS=d_s,
        dE=d_e,
        G=cls.G,
        class_label=cls.family.value,
        tier=cls.tier.value,
    )
