"""Acceptance gate: eleven criteria at their stated tolerances.

Each check returns ``(ok, detail)``; the pytest hook in conftest prints one
PASS/FAIL line per criterion. Running this file directly prints the same lines.
"""

import io
import math
import time

import numpy as np
import pytest

from kraustangle import bipartite, channels, classify, cli, fourqubit, oracle
from kraustangle.bipartite import InitialReduced
from kraustangle.classify import Family
from kraustangle.tangle import (
    kraus_invariants,
    three_tangle_direct,
    three_tangle_kraus,
    three_tangle_simplified,
)

N = 10_000
P_GRID = np.linspace(0, 1, 101)
RESULTS = {}


def record(n, ok, detail):
    RESULTS[n] = (bool(ok), detail)
    return bool(ok), detail


def random_case(rng):
    u = oracle.random_unitary(rng)
    psi = oracle.random_psi0(rng)
    return channels.kraus_from_unitary(u), psi


def criterion_1():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    d_simp = d_kraus = 0.0
    for _ in range(N):
        kp, psi = random_case(rng)
        c0, c1 = channels.evolved_coeffs(kp, psi)
        tau = three_tangle_direct(oracle.evolve3(kp, psi))
        e0sq = bipartite.reduced_from_state(psi).e0sq
        d_simp = max(d_simp, abs(tau - three_tangle_simplified(c0, c1)))
        d_kraus = max(d_kraus, abs(tau - three_tangle_kraus(kp, e0sq)))
    elapsed = time.perf_counter() - start
    ok = d_simp < 1e-9 and d_kraus < 1e-9 and elapsed < 10
    return record(1, ok, f"direct-simplified {d_simp:.1e}, direct-kraus {d_kraus:.1e}, {elapsed:.1f} s")


def criterion_2():
    r0 = InitialReduced.from_e0sq(0.5, 0.0, 0.4)
    psi = bipartite.purification(r0)
    tau_err = closed_err = oracle_err = 0.0
    labels_ok = True
    for p in P_GRID:
        kp = channels.ad_channel(p)
        tau_err = max(tau_err, three_tangle_kraus(kp, r0.e0sq))
        closed = bipartite.pairwise_tangles(kp, r0)
        expect = (0.4 * (1 - p), 0.4 * p, 4 * 0.25 * p * (1 - p))
        closed_err = max(closed_err, max(abs(a - b) for a, b in zip(closed, expect)))
        rep = oracle.full_report_direct(oracle.evolve3(kp, psi))
        brute = (rep.c2_sps, rep.c2_spe, rep.c2_se)
        oracle_err = max(oracle_err, max(abs(a - b) for a, b in zip(brute, expect)))
        fam = classify.classify(kp, r0).family
        want = Family.BISEP_E if p == 0 else Family.BISEP_S if p == 1 else Family.W_GENUINE
        labels_ok &= fam is want
    ok = tau_err < 1e-12 and closed_err < 1e-12 and oracle_err < 1e-9 and labels_ok
    return record(2, ok, f"tau {tau_err:.1e}, closed {closed_err:.1e}, oracle {oracle_err:.1e}, labels {labels_ok}")


def criterion_3():
    tau_err = spe_err = 0.0
    for rho_ee in np.linspace(*bipartite.rho_ee_bounds(0.4), 11):
        r0 = InitialReduced.from_e0sq(rho_ee, 0.0, 0.4)
        for p in P_GRID:
            kp = channels.dephasing_channel(p)
            tau_err = max(tau_err, abs(three_tangle_kraus(kp, 0.4) - 0.4 * p))
            spe_err = max(spe_err, abs(bipartite.pairwise_tangles(kp, r0)[1]))
    # |rho_ge| = 0 at E0^2 = 0.4 forces rho_ee to a bound
    r0 = InitialReduced.from_e0sq(bipartite.rho_ee_bounds(0.4)[0], 0.0, 0.4)
    kp = channels.dephasing_channel(1)
    pair = max(abs(x) for x in bipartite.pairwise_tangles(kp, r0))
    rep = oracle.full_report_direct(oracle.evolve3(kp, bipartite.purification(r0)))
    pair = max(pair, rep.c2_sps, rep.c2_spe, rep.c2_se)
    tau1 = three_tangle_kraus(kp, r0.e0sq)
    ok = tau_err < 1e-12 and spe_err < 1e-12 and pair < 1e-10 and abs(tau1 - 0.4) < 1e-12
    return record(3, ok, f"tau {tau_err:.1e}, C2_S'E {spe_err:.1e}, p=1 pairwise {pair:.1e}, tau(1) {tau1:.12g}")


def criterion_4():
    r0 = InitialReduced.from_e0sq(0.5, 0.0, 0.4)
    tau_err = sps_err = 0.0
    larger = True
    for p in P_GRID:
        kp = channels.phase_flip_channel(p)
        tau = three_tangle_kraus(kp, 0.4)
        tau_err = max(tau_err, abs(tau - 0.4 * p * (2 - p)))
        sps_err = max(sps_err, abs(bipartite.pairwise_tangles(kp, r0)[0] - 0.4 * (1 - p) ** 2))
        larger &= tau >= three_tangle_kraus(channels.dephasing_channel(p), 0.4)
    ok = tau_err < 1e-12 and sps_err < 1e-12 and larger
    return record(4, ok, f"tau {tau_err:.1e}, C2_SS' {sps_err:.1e}, PF >= D {larger}")


def criterion_5():
    rng = np.random.default_rng(5)
    states, taus = [], []
    for _ in range(N):
        kp, psi = random_case(rng)
        states.append(oracle.evolve3(kp, psi))
        taus.append(three_tangle_kraus(kp, bipartite.reduced_from_state(psi).e0sq))
    states, taus = np.array(states), np.array(taus)
    one = [oracle.purity_tangle(oracle.reduced_density(states, [q])) for q in range(3)]
    two = {pair: oracle.wootters_concurrence_sq(oracle.reduced_density(states, list(pair)))
           for pair in ((0, 1), (0, 2), (1, 2))}
    res = [
        np.max(np.abs(one[0] - two[0, 1] - two[0, 2] - taus)),
        np.max(np.abs(one[1] - two[0, 1] - two[1, 2] - taus)),
        np.max(np.abs(one[2] - two[0, 2] - two[1, 2] - taus)),
    ]
    ok = max(res) < 1e-8
    return record(5, ok, "S' {:.1e}, S {:.1e}, E {:.1e}".format(*res))


def criterion_6():
    rng = np.random.default_rng(6)
    worst = max(bipartite.ds_de_relation_residual(oracle.random_kraus_pair(rng)) for _ in range(N))
    return record(6, worst < 1e-10, f"max residual {worst:.1e}")


def criterion_7():
    rng = np.random.default_rng(7)
    names = sorted(channels.CHANNELS)
    violation = tight = 0.0
    n_tight = 0
    for i in range(N):
        if i % 2:
            kp = oracle.random_kraus_pair(rng)
        else:
            # built-in channels dressed by local unitaries keep u = 0 or v = 0
            kp = channels.CHANNELS[names[i // 2 % 3]](rng.uniform())
            kp = kp.conjugated(oracle.random_unitary(rng, 2), oracle.random_unitary(rng, 2))
        r0 = bipartite.reduced_from_state(oracle.random_psi0(rng))
        lbs = bipartite.lower_bounds(kp, r0)
        vals = bipartite.pairwise_tangles(kp, r0)
        violation = max(violation, max(lb - v for lb, v in zip(lbs, vals)))
        u, v = kraus_invariants(kp)
        if abs(u) < 1e-12 or abs(v) < 1e-12:
            n_tight += 1
            tight = max(tight, max(abs(lb - x) for lb, x in zip(lbs, vals)))
    ok = violation <= 1e-10 and tight < 1e-10 and n_tight > 0
    return record(7, ok, f"max bound - value {violation:.1e}, equality gap {tight:.1e} on {n_tight} cases")


def oracle_c2(kp, rho_ee, phi, e0sq, q):
    psi = bipartite.purification(InitialReduced.from_e0sq(rho_ee, phi, e0sq))
    return oracle.purity_tangle(oracle.reduced_density(oracle.evolve3(kp, psi), [q]))


def criterion_8():
    rng = np.random.default_rng(8)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        kp = oracle.random_w_pair(rng)
        rho_ee = rng.uniform(0.15, 0.85)
        x = 4 * rho_ee * (1 - rho_ee)
        e0sq = rng.uniform(0.05, 0.95) * x
        phi = rng.uniform(0, 2 * math.pi)
        for which, q in (("S", oracle.S), ("E", oracle.E)):
            fd = (oracle_c2(kp, rho_ee, phi, e0sq + h, q) - oracle_c2(kp, rho_ee, phi, e0sq - h, q)) / (2 * h)
            worst = max(worst, abs(bipartite.dc2_de0sq(kp, rho_ee, phi, e0sq, which) - fd))
    return record(8, worst < 1e-6, f"max |analytic - finite difference| {worst:.1e}")


def criterion_9():
    rng = np.random.default_rng(9)
    dm = tau = 0.0
    for i in range(500):
        kp = oracle.random_kraus_pair(rng) if i % 2 else oracle.random_w_pair(rng)
        kpp = oracle.random_kraus_pair(rng) if i % 3 else oracle.random_w_pair(rng)
        ids = fourqubit.correspondence_check(kp, kpp, oracle.random_psi0(rng))
        dm = max(dm, max(x.residual for x in ids if not x.name.startswith("tau")))
        tau = max(tau, max(x.residual for x in ids if x.name.startswith("tau")))
    r_min = math.inf
    for _ in range(50):
        kp, kpp = oracle.random_kraus_pair(rng), oracle.random_kraus_pair(rng)
        assert fourqubit.genuine_conditions(kp, kpp).residuals_nonzero
        state = fourqubit.evolve4(kp, kpp, oracle.random_psi0(rng))
        r_min = min(r_min, min(fourqubit.residual(state, q) for q in range(4)))
    ok = dm < 1e-9 and tau < 1e-8 and r_min > 1e-6
    return record(9, ok, f"density identities {dm:.1e}, tau identities {tau:.1e}, min R_i {r_min:.1e}")


def criterion_10():
    rng = np.random.default_rng(10)
    worst = 0.0
    for name in sorted(channels.CHANNELS):
        for p in P_GRID:
            for rho_ee in (0.2, 0.5, 0.8):
                for e0sq in np.linspace(0, 4 * rho_ee * (1 - rho_ee), 5):
                    r0 = InitialReduced.from_e0sq(rho_ee, 0.3, e0sq)
                    c2 = bipartite.bipartition_tangles(channels.CHANNELS[name](p), r0)[0]
                    worst = max(worst, abs(c2 - e0sq))
    for _ in range(200):
        r0 = bipartite.reduced_from_state(oracle.random_psi0(rng))
        c2 = bipartite.bipartition_tangles(oracle.random_kraus_pair(rng), r0)[0]
        worst = max(worst, abs(c2 - r0.e0sq))
    r0 = InitialReduced.from_e0sq(0.5, 0.0, 0.4)
    kp = oracle.random_kraus_pair(rng)
    base = classify.classify(kp, r0).family
    stable = base is Family.GHZ and all(
        classify.classify(kp.conjugated(oracle.random_unitary(rng, 2), oracle.random_unitary(rng, 2)), r0).family
        is base
        for _ in range(100)
    )
    ok = worst < 1e-12 and stable
    return record(10, ok, f"max |C2_S'|SE - E0^2| {worst:.1e}, GHZ stable under 100 conjugations {stable}")


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out=out, err=err)
    return code, out.getvalue()


def criterion_11():
    runs = [
        ("verify", "--n", "20", "--seed", "11"),
        ("sweep", "--figure", "4", "--grid", "20"),
        ("sweep", "--channel", "unitary", "--unitary",
         ",".join(repr(complex(x)) for x in oracle.random_unitary(11).reshape(16)),
         "--rho-ee-grid", "0.1", "0.9", "9", "--e0sq-grid", "0", "1", "9"),
    ]
    same = all(_cli(*argv) == _cli(*argv) for argv in runs)
    codes = [_cli(*argv)[0] for argv in runs]
    ok = same and codes == [0, 0, 0]
    return record(11, ok, f"byte-identical {same}, exit codes {codes}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 12)])
def test_criterion(check):
    ok, detail = check()
    assert ok, detail


if __name__ == "__main__":
    for check in CRITERIA:
        check()
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
