import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupaccess import (
    GeneratorSpec,
    Representation,
    StochasticMatrix,
    affine_dimension,
    close_group,
    gell_mann_affine,
    hs_distance,
    kolmogorov_check,
    limit_projector,
    mixture,
    mixture_spectrum,
    realize,
    super_decoherence,
    tn_commutes,
    unitary_superoperator,
)
from groupaccess.builtins import BUILTIN_NAMES, builtin_representation, builtin_table
from groupaccess.channels import (
    decoherence_superoperator,
    gell_mann_basis,
    gell_mann_matrix,
    kraus_superoperator,
)
from groupaccess.errors import (
    HomomorphismViolation,
    InvalidInput,
    LengthMismatch,
    NotTracePreserving,
    NotUnitary,
    ShapeMismatch,
)

D = GeneratorSpec.diagonal


def random_unitary(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus(rng, n, k=3):
    """Kraus operators of a random channel from a random isometry."""
    z = rng.normal(size=(n * k, n)) + 1j * rng.normal(size=(n * k, n))
    V, _ = np.linalg.qr(z)
    return [V[i * n:(i + 1) * n] for i in range(k)]


def apply(S, rho):
    n = rho.shape[0]
    return (S @ rho.reshape(-1)).reshape(n, n)


def test_unitary_superoperator_examples():
    assert np.array_equal(unitary_superoperator(np.eye(2)), np.eye(4))
    S = unitary_superoperator(np.diag([1, -1]))
    assert np.allclose(S, np.diag([1, -1, -1, 1]))
    S4 = unitary_superoperator(np.diag([1, 1j]))
    ev = np.linalg.eigvals(S4)
    for z, count in ((1, 2), (1j, 1), (-1j, 1)):
        assert np.sum(np.abs(ev - z) < 1e-12) == count
    assert np.min(np.abs(ev + 1)) > 0.5
    with pytest.raises(NotUnitary):
        unitary_superoperator([[1, 1], [0, 1]])
    with pytest.raises(ShapeMismatch):
        unitary_superoperator(np.ones((2, 3)))


def test_superoperator_acts_as_conjugation(rng):
    U = random_unitary(rng, 3)
    rho = random_kraus(rng, 3, 1)[0]
    rho = rho @ rho.conj().T
    assert np.allclose(apply(unitary_superoperator(U), rho), U @ rho @ U.conj().T)
    ks = random_kraus(rng, 3)
    out = sum(k @ rho @ k.conj().T for k in ks)
    assert np.allclose(apply(kraus_superoperator(ks), rho), out)


def test_superoperator_spectrum(rng):
    U = random_unitary(rng, 3)
    lam = np.linalg.eigvals(U)
    expect = np.sort_complex((lam[:, None] * lam.conj()[None, :]).ravel())
    got = np.sort_complex(np.linalg.eigvals(unitary_superoperator(U)))
    assert np.allclose(np.abs(got), 1)
    assert np.allclose(np.sort(np.angle(got)), np.sort(np.angle(expect)), atol=1e-8)


def test_realize_examples():
    z2 = realize([D(["0", "1/2"])])
    assert z2.order == 2 and z2.dim == 4
    assert np.allclose(z2.matrices[1], np.kron(np.diag([1, -1]), np.diag([1, -1])))
    reg = realize([D(["0", "1/2"])], kind="regular")
    assert np.array_equal(reg.matrices[1], [[0, 1], [1, 0]])
    w3 = builtin_representation("weyl-3")
    assert w3.matrices.shape == (9, 9, 9)
    gram = np.einsum("aij,bij->ab", w3.matrices, w3.matrices.conj())
    assert np.allclose(gram, 9 * np.eye(9))


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_representations_homomorphic(name):
    rep = builtin_representation(name)
    m = rep.matrices
    c = rep.group.cayley
    assert np.allclose(m[0], np.eye(rep.dim))
    for a, b in itertools.product(range(rep.order), repeat=2):
        assert np.linalg.norm(m[c[a, b]] - m[a] @ m[b]) <= 1e-12 * rep.dim
    if rep.kind == "unitary-superoperator":
        for M in m:
            assert np.allclose(np.abs(np.linalg.eigvals(M)), 1)


def test_representation_errors():
    t = builtin_table("z2")
    with pytest.raises(HomomorphismViolation):
        Representation(t, np.array([np.eye(2), 2 * np.eye(2)]), "regular")
    with pytest.raises(ShapeMismatch):
        Representation(t, np.ones((3, 2, 2)), "regular")
    with pytest.raises(InvalidInput):
        Representation(t, np.array([np.eye(2)] * 2), "bogus")
    with pytest.raises(InvalidInput):
        realize([D(["0", "1/2"])], kind="classical-permutation")


def test_unistochastic_kind():
    rep = realize([GeneratorSpec.permutation([1, 2, 0])], kind="unistochastic")
    assert rep.dim == 3
    assert np.allclose(rep.matrices[1].sum(axis=0), 1)


def test_mixture_examples():
    z2 = builtin_representation("z2")
    assert np.allclose(mixture(z2, [1, 0]), np.eye(4))
    reg = realize([D(["0", "1/2"])], kind="regular")
    assert np.allclose(mixture(reg, [0.5, 0.5]), np.full((2, 2), 0.5))
    for name in ("z3", "pauli", "s3", "weyl-3"):
        rep = builtin_representation(name)
        P = mixture(rep, np.full(rep.order, 1 / rep.order))
        assert np.allclose(P @ P, P, atol=1e-12)
        assert np.allclose(P, limit_projector(rep))
    with pytest.raises(LengthMismatch):
        mixture(z2, [1, 0, 0])
    with pytest.raises(InvalidInput):
        mixture(z2, [0.7, 0.7])


def test_mixture_spectrum_examples(rng):
    z3 = builtin_representation("z3")
    assert np.allclose(mixture_spectrum(z3, [1, 0, 0]), 1)
    ev = mixture_spectrum(z3, [1 / 3] * 3)
    assert np.isclose(ev[0], 1) and np.sum(np.abs(ev) < 1e-12) == 2
    z4 = builtin_representation("z4")
    ev = mixture_spectrum(z4, [0, 1, 0, 0])
    for z in (1, 1j, -1j):
        assert np.min(np.abs(ev - z)) < 1e-12
    for name in ("z5", "pauli", "s3", "noncyclic4"):
        rep = builtin_representation(name)
        for _ in range(20):
            ev = mixture_spectrum(rep, rng.dirichlet(np.ones(rep.order)))
            assert np.all(np.abs(ev) <= 1 + 1e-10)
            assert np.min(np.abs(ev - 1)) < 1e-10


def test_hs_distance_examples():
    A = np.eye(3)
    assert hs_distance(A, A) == 0
    # qutrit diag(1, -1, i): r+ = r- = i+ = 1
    S = [unitary_superoperator(np.linalg.matrix_power(np.diag([1, -1, 1j]), k)) for k in range(4)]
    assert np.isclose(hs_distance(S[0], S[1]), 16)
    assert np.isclose(hs_distance(S[0], S[2]), 16)
    G = [unitary_superoperator(np.linalg.matrix_power(np.diag([1, 1, 1j, -1j]), k))
         for k in range(4)]
    assert np.isclose(hs_distance(G[0], G[1]), 24)
    assert np.isclose(hs_distance(G[0], G[2]), 32)
    with pytest.raises(ShapeMismatch):
        hs_distance(np.eye(2), np.eye(3))


def _dist4_configs(nmax):
    for N in range(1, nmax + 1):
        for rp, rm, ip in itertools.product(range(N + 1), repeat=3):
            im = N - rp - rm - ip
            if im >= 0:
                yield rp, rm, ip, im


@pytest.mark.parametrize("cfg", list(_dist4_configs(5)))
def test_hs_distance_order4_closed_forms(cfg):
    rp, rm, ip, im = cfg
    N = sum(cfg)
    U = np.diag([1] * rp + [-1] * rm + [1j] * ip + [-1j] * im)
    S = [unitary_superoperator(np.linalg.matrix_power(U, k)) for k in range(4)]
    d01 = 8 * rp * rm + 8 * ip * im + 4 * (rp + rm) * (ip + im)
    d02 = 8 * (rp + rm) * (ip + im)
    for a, b in ((0, 1), (0, 3), (1, 2), (2, 3)):
        assert np.isclose(hs_distance(S[a], S[b]), d01)
    for a, b in ((0, 2), (1, 3)):
        assert np.isclose(hs_distance(S[a], S[b]), d02)
    # trace form of the distance between unitary channels
    tr = 2 * N * N - np.trace(S[0] @ S[1].conj().T) - np.trace(S[0].conj().T @ S[1])
    assert np.isclose(tr.real, d01)


def test_affine_dimension_examples():
    assert affine_dimension(builtin_representation("z4")) == 2
    z4 = builtin_representation("z4")
    m = z4.matrices
    assert np.allclose(m[0] + m[z4.group.power(1, 2)], m[1] + m[z4.group.power(1, 3)])
    assert affine_dimension(builtin_representation("z4-independent")) == 3
    assert affine_dimension(builtin_representation("z4-nonregular")) == 3
    assert affine_dimension(builtin_representation("trivial")) == 0
    assert affine_dimension(builtin_representation("s3")) == 4
    assert affine_dimension(builtin_representation("z3")) == 2


@pytest.mark.parametrize("gens", [
    [["0", "0", "1/2"], ["0", "1/2", "0"]],
    [["0", "1/2", "1/2", "0"], ["0", "0", "1/2", "1/2"]],
    [["0", "1/2", "1/2"], ["0", "1/2", "0"]],
])
def test_noncyclic4_affine_dim_three(gens):
    rep = realize([D(g) for g in gens])
    assert rep.order == 4 and affine_dimension(rep) == 3
    assert affine_dimension(builtin_representation("pauli")) == 3


def test_gell_mann_basis_orthonormal():
    for N in (2, 3, 4):
        B = gell_mann_basis(N)
        gram = np.einsum("aij,bij->ab", B.conj(), B)
        assert np.allclose(gram, np.eye(N * N), atol=1e-14)
        assert all(np.allclose(b, b.conj().T) for b in B)
        assert all(np.allclose(np.diag(np.diag(b)), b) for b in B[:N])


def test_gell_mann_examples():
    blk = gell_mann_affine(np.eye(4))
    assert np.allclose(blk.D, 1) and np.allclose(blk.Dp, np.eye(2))
    for x in (blk.k, blk.kp, blk.Q, blk.Qp):
        assert np.allclose(x, 0, atol=1e-15)
    dec = gell_mann_affine(decoherence_superoperator(2))
    assert np.allclose(dec.D, np.eye(1)) and np.allclose(dec.Dp, 0)
    for x in (dec.k, dec.kp, dec.Q, dec.Qp):
        assert np.allclose(x, 0)
    sz = gell_mann_affine(unitary_superoperator(np.diag([1, -1])))
    assert np.allclose(sz.D, np.eye(1)) and np.allclose(sz.Dp, -np.eye(2))
    with pytest.raises(NotTracePreserving):
        gell_mann_affine(2 * np.eye(4))


def test_gell_mann_round_trip(rng):
    for N in (2, 3, 4):
        for _ in range(5):
            S = kraus_superoperator(random_kraus(rng, N))
            blk = gell_mann_affine(S)
            assert np.abs(blk.assemble() - gell_mann_matrix(S).real).max() <= 1e-12
            assert np.abs(blk.superoperator() - S).max() <= 1e-12
            assert blk.k.shape == (N - 1,) and blk.kp.shape == (N * N - N,)
            assert blk.Q.shape == (N - 1, N * N - N) and blk.Qp.shape == (N * N - N, N - 1)
        # unital channels have no translation part
        U = unitary_superoperator(random_unitary(rng, N))
        blk = gell_mann_affine(U)
        assert np.allclose(blk.k, 0) and np.allclose(blk.kp, 0)


def test_super_decoherence_examples():
    assert np.allclose(super_decoherence(np.eye(9)).matrix, np.eye(3))
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    T = super_decoherence(unitary_superoperator(H))
    assert np.allclose(T.matrix, 0.5)
    P = np.eye(4)[[2, 0, 3, 1]].T
    assert np.allclose(super_decoherence(unitary_superoperator(P)).matrix, P)
    # Kraus list input
    assert np.allclose(super_decoherence([H]).matrix, 0.5)


def test_super_decoherence_properties(rng):
    for N in (2, 3, 4):
        Dn = decoherence_superoperator(N)
        for _ in range(5):
            U = random_unitary(rng, N)
            T = super_decoherence(unitary_superoperator(U))
            assert T.matrix.min() >= 0 and T.is_bistochastic()
            assert np.allclose(T.matrix, np.abs(U) ** 2)
            S = kraus_superoperator(random_kraus(rng, N))
            T = super_decoherence(S).matrix
            assert np.allclose(T.sum(axis=0), 1)
            assert np.allclose(super_decoherence(Dn @ S @ Dn).matrix, T)
            # direct definition T_ij = <i|E(|j><j|)|i>
            j = rng.integers(N)
            rho = np.zeros((N, N))
            rho[j, j] = 1
            assert np.allclose(np.diag(apply(S, rho)).real, T[:, j])


def _tn_direct(S, r):
    T1 = super_decoherence(S).matrix
    return all(np.allclose(np.linalg.matrix_power(T1, n),
                           super_decoherence(np.linalg.matrix_power(S, n)).matrix, atol=1e-10)
               for n in range(2, r + 1))


def test_tn_commutes_examples(rng):
    ident = gell_mann_affine(np.eye(9))
    assert tn_commutes(ident, 2) and tn_commutes(ident, 6)
    # diagonal unitaries have Q = Q' = 0 and k' = 0
    S = unitary_superoperator(np.diag(np.exp(1j * rng.uniform(0, 6, 3))))
    blk = gell_mann_affine(S)
    assert np.allclose(blk.Q, 0) and np.allclose(blk.Qp, 0)
    assert tn_commutes(blk, 8)
    H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    SH = unitary_superoperator(H)
    assert not tn_commutes(gell_mann_affine(SH), 2)
    assert not _tn_direct(SH, 2)
    with pytest.raises(InvalidInput):
        tn_commutes(ident, 1)


def test_tn_commutes_matches_direct(rng):
    for N in (2, 3):
        for _ in range(10):
            S = kraus_superoperator(random_kraus(rng, N))
            blk = gell_mann_affine(S)
            assert tn_commutes(blk, 4) == _tn_direct(S, 4)
        # dephased channels followed by a permutation satisfy the identity
        P = np.eye(N)[rng.permutation(N)]
        S = unitary_superoperator(P) @ decoherence_superoperator(N) @ kraus_superoperator(
            random_kraus(rng, N))
        blk = gell_mann_affine(S)
        assert tn_commutes(blk, 4) and _tn_direct(S, 4)


def test_kolmogorov_check(rng):
    for _ in range(5):
        P = np.eye(4)[rng.permutation(4)]
        assert kolmogorov_check(P - np.eye(4))
    assert kolmogorov_check(np.zeros((3, 3)))
    K = np.array([[-1.0, -0.5], [1.0, 0.5]])
    assert not kolmogorov_check(K)
    assert not kolmogorov_check(np.array([[-1.0, 0.0], [0.5, 0.0]]))
    with pytest.raises(ShapeMismatch):
        kolmogorov_check(np.zeros((2, 3)))


def test_stochastic_matrix_validation():
    StochasticMatrix([[0.5, 1], [0.5, 0]])
    with pytest.raises(InvalidInput):
        StochasticMatrix([[0.5, 1], [0.6, 0]])
    with pytest.raises(InvalidInput):
        StochasticMatrix([[1.1, 0], [-0.1, 1]])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4))
def test_super_decoherence_semigroup_property(seed, N):
    """exp(t K) stays stochastic for K = sum c_i (P_i - 1), c_i >= 0."""
    rng = np.random.default_rng(seed)
    from groupaccess import expm

    K = sum(c * (np.eye(N)[rng.permutation(N)] - np.eye(N)) for c in rng.uniform(0, 1, 3))
    assert kolmogorov_check(K)
    T = expm(K)
    StochasticMatrix(T)
