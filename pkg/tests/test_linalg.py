import numpy as np
import pytest
import scipy.sparse as sp

from hubbard_lax.linalg import (
    DimensionMismatch,
    KronOverflow,
    PAULI,
    commutator,
    anticommutator,
    compose,
    dagger,
    kron,
    kron_chain,
    local4,
    norms,
)

TOL = 1e-12


def test_pauli_algebra():
    assert np.allclose(commutator(PAULI["+"], PAULI["-"]), PAULI["z"])
    assert np.allclose(anticommutator(PAULI["+"], PAULI["-"]), PAULI["0"])
    assert np.allclose(PAULI["z"] @ PAULI["+"], PAULI["+"])


def test_kron_row_major_convention():
    # basis vector ordering |a> (x) |b| -> index a*db + b
    a = np.diag([1.0, 2.0])
    b = np.diag([3.0, 5.0])
    k = kron(a, b)
    assert np.allclose(np.diag(k), [3, 5, 6, 10])


def test_kron_chain_matches_repeated_kron():
    rng = np.random.default_rng(0)
    mats = [rng.normal(size=(2, 2)) for _ in range(3)]
    expect = np.kron(np.kron(mats[0], mats[1]), mats[2])
    assert np.allclose(kron_chain(mats), expect, atol=TOL)


def test_kron_overflow_refused():
    big = np.eye(1 << 11)
    with pytest.raises(KronOverflow):
        kron(big, big)


def test_compose_keeps_sparse():
    a = sp.eye(4, format="csr") * 2.0
    b = sp.eye(4, format="csr") * 3.0
    c = compose(a, b)
    assert sp.issparse(c)
    assert np.allclose(c.toarray(), 6 * np.eye(4))


def test_compose_dimension_check():
    with pytest.raises(DimensionMismatch):
        compose(np.eye(2), np.eye(3))


def test_dagger():
    m = np.array([[1.0, 2.0j], [0.0, 1.0 - 1.0j]])
    assert np.allclose(dagger(m), m.conj().T)


def test_norms_pair():
    m = np.array([[3.0, 0.0], [0.0, 4.0]])
    fro, mx = norms(m)
    assert abs(fro - 5.0) < TOL
    assert abs(mx - 4.0) < TOL


def test_local4_factors():
    # sigma acts on the first qubit of the 4-dim site, tau on the second
    assert np.allclose(local4("z", "0"), np.kron(PAULI["z"], np.eye(2)))
    assert np.allclose(local4("0", "+"), np.kron(np.eye(2), PAULI["+"]))
    assert np.allclose(local4("z", "z"), np.diag([1.0, -1.0, -1.0, 1.0]))
