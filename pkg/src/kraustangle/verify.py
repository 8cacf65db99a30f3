"""Differential test of every closed form against the brute-force oracle."""

from __future__ import annotations

from collections import OrderedDict

import numpy as np

from . import bipartite, channels, classify, fourqubit, oracle
from .tangle import kraus_invariants, three_tangle_direct, three_tangle_kraus, three_tangle_simplified

FAMILIES = ("ad", "dephasing", "phase_flip")
#: |u| or |v| below this counts as an exact zero for the tightness check.
ZERO_ATOL = 1e-12


def random_instance(rng: np.random.Generator, i: int):
    """Kraus pair, a unitary realizing it, and an initial state for instance ``i``.

    Instances cycle through Haar-random S-E unitaries, random W-family pairs
    and the built-in channels at random strength.
    """
    kind = i % 3
    if kind == 0:
        u = oracle.random_unitary(rng)
        kp = channels.kraus_from_unitary(u)
    elif kind == 1:
        kp = oracle.random_w_pair(rng)
        u = channels.dilation(kp)
    else:
        name = FAMILIES[int(rng.integers(len(FAMILIES)))]
        kp = channels.CHANNELS[name](float(rng.uniform(0.0, 1.0)))
        u = channels.dilation(kp)
    return kp, u, oracle.random_psi0(rng)


CHECKS = (
    "evolve3 vs unitary",
    "evolved_coeffs vs evolve3",
    "tau direct vs simplified",
    "tau direct vs kraus",
    "C2_S'|SE closed vs oracle",
    "C2_S|S'E closed vs oracle",
    "C2_E|SS' closed vs oracle",
    "C2_S'S closed vs oracle",
    "C2_S'E closed vs oracle",
    "C2_SE closed vs oracle",
    "CKW residual (oracle)",
    "D_S = 1 - D_E + |g^2|",
    "rho_E vs Tr(K rho0 K^dag)",
    "lower bound violation",
    "lower bound tightness (u=0 or v=0)",
    "G decomposition vs G",
    "classification mismatch",
    "4q density-matrix identities",
    "4q tau identities",
)


class Table(OrderedDict):
    """Running maximum and number of samples per check, in ``CHECKS`` order."""

    def __init__(self):
        super().__init__((name, [0.0, 0]) for name in CHECKS)

    def worst(self) -> "OrderedDict[str, float]":
        return OrderedDict((k, v[0]) for k, v in self.items())


def _max(table, key, value):
    entry = table[key]
    entry[0] = max(entry[0], float(value))
    entry[1] += 1


def three_qubit_residuals(kp, u, psi0, table):
    r0 = bipartite.reduced_from_state(psi0)
    state = oracle.evolve3(kp, psi0)
    direct = oracle.full_report_direct(state)

    _max(table, "evolve3 vs unitary", np.max(np.abs(state - oracle.evolve3_unitary(u, psi0))))
    c0, c1 = channels.evolved_coeffs(kp, psi0)
    _max(table, "evolved_coeffs vs evolve3", np.max(np.abs(np.stack([c0, c1]).reshape(8) - state)))

    tau_d = three_tangle_direct(state)
    _max(table, "tau direct vs simplified", abs(tau_d - three_tangle_simplified(c0, c1)))
    _max(table, "tau direct vs kraus", abs(tau_d - three_tangle_kraus(kp, r0.e0sq)))

    bip = bipartite.bipartition_tangles(kp, r0)
    pair = bipartite.pairwise_tangles(kp, r0)
    for name, closed, brute in zip(
        ("C2_S'|SE", "C2_S|S'E", "C2_E|SS'", "C2_S'S", "C2_S'E", "C2_SE"),
        bip + pair,
        (direct.c2_sp_se, direct.c2_s_spe, direct.c2_e_ssp, direct.c2_sps, direct.c2_spe, direct.c2_se),
    ):
        _max(table, f"{name} closed vs oracle", abs(closed - brute))
    _max(table, "CKW residual (oracle)", max(abs(x) for x in direct.ckw_residuals))

    _max(table, "D_S = 1 - D_E + |g^2|", bipartite.ds_de_relation_residual(kp))
    rho_e = oracle.reduced_density(state, [oracle.E])
    _max(table, "rho_E vs Tr(K rho0 K^dag)", np.max(np.abs(rho_e - bipartite.environment_state(kp, r0))))

    lbs = bipartite.lower_bounds(kp, r0)
    _max(table, "lower bound violation", max(max(0.0, lb - val) for lb, val in zip(lbs, pair)))
    uu, vv = kraus_invariants(kp)
    if abs(uu) < ZERO_ATOL or abs(vv) < ZERO_ATOL:
        _max(table, "lower bound tightness (u=0 or v=0)", max(abs(lb - val) for lb, val in zip(lbs, pair)))

    if 4.0 * r0.rho_ee * (1.0 - r0.rho_ee) >= r0.e0sq:
        *_, g = bipartite.g_decomposition(kp, r0.rho_ee, r0.phi, r0.e0sq)
        _max(table, "G decomposition vs G", abs(g - bipartite.g_term(kp, r0)))

    label = classify.classify(kp, r0)
    if label.tier is classify.Tier.KRAUS_CRITERION and label.family is not classify.Family.DEGENERATE_E0_ZERO:
        agree = classify.same_family(label.family, classify.classify_direct(state))
        _max(table, "classification mismatch", 0.0 if agree else 1.0)


def four_qubit_residuals(kp, kp_prime, psi0, table):
    ids = fourqubit.correspondence_check(kp, kp_prime, psi0)
    _max(table, "4q density-matrix identities", max(x.residual for x in ids if not x.name.startswith("tau")))
    _max(table, "4q tau identities", max(x.residual for x in ids if x.name.startswith("tau")))


def run(n: int, seed: int) -> Table:
    """Max residual and sample count per identity over ``n`` seeded random instances."""
    if n < 1:
        raise ValueError("need at least one instance")
    rng = np.random.default_rng(seed)
    table = Table()
    for i in range(n):
        kp, u, psi0 = random_instance(rng, i)
        three_qubit_residuals(kp, u, psi0, table)
        kp_prime = oracle.random_kraus_pair(rng) if i % 2 == 0 else oracle.random_w_pair(rng)
        four_qubit_residuals(kp, kp_prime, psi0, table)
    return table
