"""Matrix representations of groups and channel-level quantities.

Superoperators act on row-major vectorized operators, ``vec(X)[i*N + j] =
X[i, j]``, so that a unitary channel ``X -> U X U^dagger`` has matrix
``U (x) conj(U)`` and a Kraus map has ``sum_a K_a (x) conj(K_a)``.
Stochastic matrices are column stochastic (``p' = T p``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    HomomorphismViolation,
    InvalidInput,
    LengthMismatch,
    NotTracePreserving,
    NotUnitary,
    ShapeMismatch,
)
from .groups import GroupTable, close_group, regular_matrices

KINDS = ("regular", "unitary-superoperator", "classical-permutation", "unistochastic")
WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Representation:
    """Per-element matrices of a finite group.

    Parameters
    ----------
    group : GroupTable
    matrices : array_like, shape (g, d, d)
    kind : str
        One of ``regular``, ``unitary-superoperator``,
        ``classical-permutation``, ``unistochastic``.
    check : bool
        Verify ``R_0 = 1`` and the homomorphism property.  The tolerance is
        ``1e-12 * d`` in the Frobenius norm.
    """

    group: GroupTable
    matrices: np.ndarray
    kind: str = "unitary-superoperator"
    check: bool = True

    def __post_init__(self):
        m = np.asarray(self.matrices)
        m = m.astype(np.float64 if np.isrealobj(m) else np.complex128)
        if m.ndim != 3 or m.shape[1] != m.shape[2] or m.shape[0] != self.group.order:
            raise ShapeMismatch(
                f"expected ({self.group.order}, d, d) matrices, got {m.shape}")
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown representation kind {self.kind!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrices", m)
        if self.check:
            self.verify()

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def order(self) -> int:
        return self.group.order

    def verify(self, tol: float = 1e-12) -> None:
        d = self.dim
        m = self.matrices
        if np.linalg.norm(m[0] - np.eye(d)) > tol * d:
            raise HomomorphismViolation("element 0 is not represented by the identity")
        c = self.group.cayley
        g = self.order
        for a in range(g):
            prod = m[a] @ m  # R_a R_b for all b
            err = np.linalg.norm(prod - m[c[a]], axis=(1, 2)).max()
            if err > tol * d:
                raise HomomorphismViolation(
                    f"R(ab) != R(a)R(b) for a={a} (error {err:.3g})")

    def vectors(self) -> np.ndarray:
        """``(g, d*d)`` array of row-major vectorized matrices."""
        return self.matrices.reshape(self.order, -1)


# ---------------------------------------------------------------------------
# constructors


def unitary_superoperator(U) -> np.ndarray:
    """Superoperator ``U (x) conj(U)`` of the unitary channel of ``U``."""
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {U.shape}")
    if np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) > 1e-10:
        raise NotUnitary("matrix is not unitary within 1e-10")
    return np.kron(U, U.conj())


def kraus_superoperator(kraus: Sequence) -> np.ndarray:
    """Superoperator ``sum_a K_a (x) conj(K_a)``."""
    ks = [np.asarray(k, dtype=complex) for k in kraus]
    if not ks:
        raise InvalidInput("empty Kraus list")
    return sum(np.kron(k, k.conj()) for k in ks)


def realize(generators, table: GroupTable | None = None, kind: str | None = None) -> Representation:
    """Concrete matrices for a group given by generators.

    Parameters
    ----------
    generators : list of GeneratorSpec or dict
    table : GroupTable, optional
        Table the matrices must follow.  Defaults to the closure of
        ``generators``; when given it has to use the same element order.
    kind : str, optional
        ``unitary-superoperator`` (default), ``regular``,
        ``classical-permutation`` (permutation generators only, the bare
        permutation matrices) or ``unistochastic`` (``U * conj(U)`` entrywise).

    Raises
    ------
    HomomorphismViolation
        The matrices do not reproduce the table.
    """
    closed = close_group(generators)
    if table is None:
        table = closed
    kind = kind or "unitary-superoperator"
    if kind == "regular":
        return Representation(table, regular_matrices(table), "regular")
    if closed.order != table.order or not np.array_equal(closed.cayley, table.cayley):
        raise HomomorphismViolation("generators do not produce the given table")
    if closed.algebra is None:
        # trivial group without any matrix content
        return Representation(table, np.ones((1, 1, 1)), kind)
    us = [closed.algebra.matrix(x) for x in closed.elements]
    if kind == "unitary-superoperator":
        mats = np.array([np.kron(u, u.conj()) for u in us])
    elif kind == "classical-permutation":
        if closed.algebra.key[0] != "perm":
            raise InvalidInput("classical-permutation needs permutation generators")
        mats = np.array(us, dtype=float)
    elif kind == "unistochastic":
        mats = np.array([np.abs(u) ** 2 for u in us])
    else:
        raise InvalidInput(f"unknown representation kind {kind!r}")
    return Representation(table, mats, kind)


def as_weights(p, g: int) -> np.ndarray:
    """Validate a probability vector of length ``g``."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.shape[0] != g:
        raise LengthMismatch(f"weight vector has shape {p.shape}, expected ({g},)")
    if not np.all(np.isfinite(p)) or p.min() < -WEIGHT_TOL or abs(p.sum() - 1) > 1e-12 * max(1, g):
        raise InvalidInput("weights must be nonnegative and sum to 1")
    return p


def mixture(rep: Representation, p) -> np.ndarray:
    """The point ``sum_mu p_mu R_mu`` of the group polytope."""
    p = as_weights(p, rep.order)
    return np.tensordot(p, rep.matrices, axes=1)


def mixture_spectrum(rep: Representation, p) -> np.ndarray:
    """Eigenvalues of ``mixture(rep, p)`` sorted by decreasing real part."""
    ev = np.linalg.eigvals(mixture(rep, p))
    return ev[np.lexsort((-ev.imag, -ev.real))]


def hs_distance(A, B) -> float:
    """Squared Hilbert-Schmidt distance ``||A - B||_F^2``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ShapeMismatch(f"shapes {A.shape} and {B.shape} differ")
    return float(np.sum(np.abs(A - B) ** 2))


def affine_dimension(rep: Representation) -> int:
    """Dimension of the affine hull of the represented group elements."""
    v = rep.vectors()
    diff = v[1:] - v[0]
    if diff.size == 0:
        return 0
    s = np.linalg.svd(diff, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > 1e-8 * s[0]))


# ---------------------------------------------------------------------------
# Gell-Mann affine form


@lru_cache(maxsize=32)
def gell_mann_basis(N: int) -> np.ndarray:
    """Orthonormal Hermitian basis, shape ``(N*N, N, N)``.

    Order: ``1/sqrt(N)``, the ``N-1`` diagonal generators, then symmetric and
    antisymmetric off-diagonal generators, each in lexicographic ``(i, j)``.
    """
    B = [np.eye(N, dtype=complex) / np.sqrt(N)]
    for l in range(1, N):
        m = np.zeros((N, N), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1
        m[l, l] = -l
        B.append(m / np.sqrt(l * (l + 1)))
    pairs = [(i, j) for i in range(N) for j in range(i + 1, N)]
    for i, j in pairs:
        m = np.zeros((N, N), dtype=complex)
        m[i, j] = m[j, i] = 1 / np.sqrt(2)
        B.append(m)
    for i, j in pairs:
        m = np.zeros((N, N), dtype=complex)
        m[i, j] = -1j / np.sqrt(2)
        m[j, i] = 1j / np.sqrt(2)
        B.append(m)
    out = np.array(B)
    out.setflags(write=False)
    return out


def gell_mann_matrix(superop) -> np.ndarray:
    """Real matrix ``M_ab = Tr(B_a^dagger Phi(B_b))`` of a superoperator."""
    S = np.asarray(superop, dtype=complex)
    N = int(round(np.sqrt(S.shape[0])))
    if S.shape != (N * N, N * N):
        raise ShapeMismatch(f"superoperator shape {S.shape} is not (N^2, N^2)")
    V = gell_mann_basis(N).reshape(N * N, -1).T  # columns are vec(B_b)
    return V.conj().T @ S @ V


@dataclass(frozen=True)
class AffineBlocks:
    """Blocks of a trace preserving map in the Gell-Mann basis.

    With diagonal generators first the matrix reads::

        [[1,  0,  0 ],
         [k,  D,  Q ],
         [k', Q', D']]
    """

    k: np.ndarray
    kp: np.ndarray
    D: np.ndarray
    Dp: np.ndarray
    Q: np.ndarray
    Qp: np.ndarray

    @property
    def N(self) -> int:
        return self.D.shape[0] + 1

    def assemble(self) -> np.ndarray:
        """Gell-Mann matrix rebuilt from the blocks."""
        N = self.N
        M = np.zeros((N * N, N * N))
        M[0, 0] = 1
        M[1:N, 0] = self.k
        M[N:, 0] = self.kp
        M[1:N, 1:N] = self.D
        M[1:N, N:] = self.Q
        M[N:, 1:N] = self.Qp
        M[N:, N:] = self.Dp
        return M

    def superoperator(self) -> np.ndarray:
        """Superoperator rebuilt from the blocks."""
        N = self.N
        V = gell_mann_basis(N).reshape(N * N, -1).T
        return V @ self.assemble() @ V.conj().T


def gell_mann_affine(superop, tol: float = 1e-10) -> AffineBlocks:
    """Split a trace preserving superoperator into its affine blocks.

    Raises
    ------
    NotTracePreserving
        The first Gell-Mann row differs from ``e_0`` by more than ``tol``.
    """
    M = gell_mann_matrix(superop)
    e0 = np.zeros(M.shape[0])
    e0[0] = 1
    if np.abs(M[0] - e0).max() > tol:
        raise NotTracePreserving("first Gell-Mann row is not e_0")
    if np.abs(M.imag).max() > 1e-8:
        raise InvalidInput("map is not Hermiticity preserving")
    M = M.real
    N = int(round(np.sqrt(M.shape[0])))
    return AffineBlocks(
        k=M[1:N, 0].copy(), kp=M[N:, 0].copy(),
        D=M[1:N, 1:N].copy(), Dp=M[N:, N:].copy(),
        Q=M[1:N, N:].copy(), Qp=M[N:, 1:N].copy())


def tn_commutes(blocks: AffineBlocks, r: int, tol: float = 1e-10) -> bool:
    """Whether ``T^n(E) = T(E^n)`` for every ``n <= r``, tested via blocks.

    The identity holds iff ``Q D'^(n-2) k' = 0`` and ``Q D'^(n-2) Q' = 0``
    for ``n = 2..r``.
    """
    if r < 2:
        raise InvalidInput("r must be at least 2")
    P = np.eye(blocks.Dp.shape[0])
    for _ in range(2, r + 1):
        QP = blocks.Q @ P
        if np.abs(QP @ blocks.kp).max(initial=0) > tol or np.abs(QP @ blocks.Qp).max(initial=0) > tol:
            return False
        P = P @ blocks.Dp
    return True


# ---------------------------------------------------------------------------
# classical side


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Column stochastic matrix, ``T[i, j] = P(j -> i)``."""

    matrix: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.matrix, dtype=float)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise ShapeMismatch(f"stochastic matrix must be square, got {T.shape}")
        if T.min() < -1e-14 or np.abs(T.sum(axis=0) - 1).max() > 1e-12:
            raise InvalidInput("matrix is not column stochastic")
        T.setflags(write=False)
        object.__setattr__(self, "matrix", T)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def is_bistochastic(self, tol=1e-12) -> bool:
        return bool(np.abs(self.matrix.sum(axis=1) - 1).max() <= tol)


def decoherence_superoperator(N: int) -> np.ndarray:
    """Superoperator of the full dephasing map (keeps the diagonal)."""
    v = np.zeros(N * N)
    v[np.arange(N) * (N + 1)] = 1
    return np.diag(v).astype(complex)


def super_decoherence(channel) -> StochasticMatrix:
    """Classical matrix ``T_ij = <i|E(|j><j|)|i>`` of a channel.

    ``channel`` is a superoperator (2-d array) or a Kraus list.  For a unitary
    channel the result is the unistochastic matrix ``U * conj(U)``.
    """
    if isinstance(channel, (list, tuple)) or np.ndim(channel) == 3:
        S = kraus_superoperator(channel)
    else:
        S = np.asarray(channel, dtype=complex)
    N = int(round(np.sqrt(S.shape[0])))
    if S.shape != (N * N, N * N):
        raise ShapeMismatch(f"superoperator shape {S.shape} is not (N^2, N^2)")
    d = np.arange(N) * (N + 1)
    T = S[np.ix_(d, d)].real
    T = np.where(np.abs(T) < 1e-15, 0.0, T)
    return StochasticMatrix(T)


def kolmogorov_check(K, tol: float = 1e-12) -> bool:
    """Whether ``K`` generates a classical Markov semigroup.

    Off-diagonal entries must be nonnegative and columns must sum to zero.
    """
    K = np.asarray(K)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {K.shape}")
    if np.iscomplexobj(K):
        if np.abs(K.imag).max() > tol:
            return False
        K = K.real
    off = K - np.diag(np.diag(K))
    return bool(off.min(initial=0) >= -tol and np.abs(K.sum(axis=0)).max() <= tol)
