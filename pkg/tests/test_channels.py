import numpy as np
import pytest

from kraustangle import channels, mat2, oracle
from kraustangle.channels import KrausPair, TwoQubitPure
from kraustangle.errors import KrausError

from conftest import S2, bell

PS = np.linspace(0, 1, 21)


def test_ad_endpoints():
    k0, k1 = channels.ad_channel(0).ops
    np.testing.assert_array_equal(k0, np.eye(2))
    np.testing.assert_array_equal(k1, np.zeros((2, 2)))
    k0, k1 = channels.ad_channel(1).ops
    np.testing.assert_array_equal(k0, np.diag([1, 0]))
    np.testing.assert_array_equal(k1, [[0, 1], [0, 0]])


@pytest.mark.parametrize("name", sorted(channels.CHANNELS))
def test_builtin_channels_complete(name):
    for p in PS:
        kp = channels.CHANNELS[name](p)
        assert channels.completeness_residual(*kp.ops) < 1e-15


def test_dephasing():
    k0, k1 = channels.dephasing_channel(0).ops
    np.testing.assert_array_equal(k1, np.zeros((2, 2)))
    k0, k1 = channels.dephasing_channel(1).ops
    np.testing.assert_array_equal(k0, np.diag([1, 0]))
    np.testing.assert_array_equal(k1, np.diag([0, 1]))
    for p in PS:
        g = mat2.gfun(*channels.dephasing_channel(p).ops)
        assert abs(g**2 - p) < 1e-15


def test_phase_flip():
    k0, k1 = channels.phase_flip_channel(0).ops
    np.testing.assert_array_equal(k0, np.eye(2))
    np.testing.assert_array_equal(k1, np.zeros((2, 2)))
    for p in PS:
        k0, k1 = channels.phase_flip_channel(p).ops
        assert abs(4 * mat2.det2(k0 @ k1) - p * (p - 2)) < 1e-15
        assert abs(mat2.gfun(k0, k1)) < 1e-15


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_strength_out_of_range(p):
    with pytest.raises(KrausError):
        channels.ad_channel(p)


def test_incomplete_pair_rejected():
    with pytest.raises(KrausError, match="completeness"):
        KrausPair(np.eye(2), np.eye(2))


def test_pair_is_read_only():
    kp = channels.ad_channel(0.3)
    with pytest.raises(ValueError):
        kp.k0[0, 0] = 2


def test_from_identity_and_cnot():
    k0, k1 = channels.kraus_from_unitary(np.eye(4)).ops
    np.testing.assert_array_equal(k0, np.eye(2))
    np.testing.assert_array_equal(k1, np.zeros((2, 2)))
    # S controls E, basis index 2s + e
    cnot = np.eye(4)[[0, 1, 3, 2]]
    k0, k1 = channels.kraus_from_unitary(cnot).ops
    np.testing.assert_array_equal(k0, np.diag([1, 0]))
    np.testing.assert_array_equal(k1, np.diag([0, 1]))


def test_random_unitaries_complete(rng):
    worst = max(
        channels.completeness_residual(*channels.kraus_from_unitary(oracle.random_unitary(rng)).ops)
        for _ in range(1000)
    )
    assert worst < 1e-9


def test_non_unitary_rejected():
    with pytest.raises(KrausError, match="not unitary"):
        channels.kraus_from_unitary(2 * np.eye(4))
    with pytest.raises(KrausError):
        channels.kraus_from_unitary(np.eye(3))


def test_dilation_round_trip(rng):
    for _ in range(200):
        kp = oracle.random_kraus_pair(rng)
        u = channels.dilation(kp)
        assert channels.unitary_residual(u) < 1e-12
        back = channels.kraus_from_unitary(u)
        for a, b in zip(kp.ops, back.ops):
            np.testing.assert_allclose(a, b, atol=1e-14)
        # the induced channel is the same, checked through K_mu^dag K_nu
        for m in range(2):
            for n in range(2):
                np.testing.assert_allclose(
                    kp.ops[m].conj().T @ kp.ops[n], back.ops[m].conj().T @ back.ops[n], atol=1e-12
                )


def test_mixed_and_conjugated_keep_channel(rng):
    kp = oracle.random_kraus_pair(rng)
    o = oracle.random_unitary(rng, 2)
    mixed = kp.mixed(o)
    rho = np.array([[0.3, 0.2 - 0.1j], [0.2 + 0.1j, 0.7]])
    out = sum(k @ rho @ k.conj().T for k in kp.ops)
    np.testing.assert_allclose(out, sum(k @ rho @ k.conj().T for k in mixed.ops), atol=1e-14)
    conj = kp.conjugated(o, np.eye(2))
    assert channels.completeness_residual(*conj.ops) < 1e-12


def test_two_qubit_pure():
    psi = TwoQubitPure(alpha=0.5, beta=0.5j, gamma=-0.5, delta=0.5)
    np.testing.assert_array_equal(psi.matrix(), [[0.5, -0.5], [0.5j, 0.5]])
    np.testing.assert_array_equal(psi.vector(), [0.5, -0.5, 0.5j, 0.5])
    assert TwoQubitPure.from_matrix(psi.matrix()) == psi
    with pytest.raises(ValueError):
        TwoQubitPure(1, 1, 0, 0)


def test_evolved_coeffs_identity():
    psi = TwoQubitPure(alpha=0.5, beta=0.5j, gamma=-0.5, delta=0.5)
    c0, c1 = channels.evolved_coeffs(channels.identity_channel(), psi)
    np.testing.assert_array_equal(c0, [[0.5, 0], [-0.5, 0]])
    np.testing.assert_array_equal(c1, [[0.5j, 0], [0.5, 0]])


def test_evolved_coeffs_bell_dephasing():
    c0, c1 = channels.evolved_coeffs(channels.dephasing_channel(1), bell())
    np.testing.assert_allclose(c0, [[S2, 0], [0, 0]])
    np.testing.assert_allclose(c1, [[0, 0], [0, S2]])


def test_evolved_coeffs_match_oracle(rng):
    for _ in range(200):
        kp, psi = oracle.random_kraus_pair(rng), oracle.random_psi0(rng)
        c0, c1 = channels.evolved_coeffs(kp, psi)
        c = oracle.evolve3(kp, psi).reshape(2, 2, 2)
        np.testing.assert_allclose(c0, c[0], atol=1e-14)
        np.testing.assert_allclose(c1, c[1], atol=1e-14)
