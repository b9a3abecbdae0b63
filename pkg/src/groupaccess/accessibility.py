"""Deciding whether a map lies in the accessible set.

A map ``M`` of the group polytope is accessible when ``M = expm(L)`` with
``L = sum_{mu >= 1} r_mu (R_mu - 1)`` and ``r >= 0``.  The test takes the
principal logarithm and fits it by a nonnegative combination of the
generators.  Only the principal branch decides the verdict.  When its fit
fails, a bounded search over other branches runs as a diagnostic; maps it
finds reachable that way stay not accessible but get ``log_ok = False``.
"""
from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .channels import Representation, as_weights
from .dynamics import RateSchedule, expm, weights
from .errors import (
    NegativeRealEigenvalue,
    NonFinite,
    NotAbelian,
    NotInAffineHull,
    NumericFailure,
    ShapeMismatch,
    SingularMatrix,
)
from .groups import GroupTable, enumerate_subgroups, regular_representation

SINGULAR_TOL = 1e-12
NEG_AXIS_TOL = 1e-12
HULL_TOL = 1e-8


# ---------------------------------------------------------------------------
# logarithm


@dataclass(frozen=True)
class LogDiagnostics:
    eigenvalues: np.ndarray
    reconstruction_error: float
    real: bool


def _log_eig_check(ev, scale):
    a = np.abs(ev)
    if a.min() <= SINGULAR_TOL * max(1.0, scale):
        raise SingularMatrix(f"eigenvalue of modulus {a.min():.3g}")
    neg = (ev.real < 0) & (np.abs(ev.imag) <= NEG_AXIS_TOL * a)
    if neg.any():
        raise NegativeRealEigenvalue(
            f"eigenvalue {ev[neg][0]:.6g} on the negative real axis; principal log undefined")


def principal_log(M):
    """Principal matrix logarithm with diagnostics.

    Parameters
    ----------
    M : array_like, shape (d, d)

    Returns
    -------
    L : ndarray
        Real when ``M`` is real (its principal log is then real).
    diag : LogDiagnostics

    Raises
    ------
    SingularMatrix
        An eigenvalue is (numerically) zero.
    NegativeRealEigenvalue
        An eigenvalue lies on the closed negative real axis.
    NumericFailure
        ``expm(L)`` misses ``M`` by more than ``1e-9 ||M||``, or ``M`` has
        non-finite entries.
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has non-finite entries")
    nrm = np.linalg.norm(M)
    ev = np.linalg.eigvals(M)
    _log_eig_check(ev, nrm)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        L = scipy.linalg.logm(M, disp=False)[0]
    if np.isrealobj(M) and np.iscomplexobj(L):
        if np.abs(L.imag).max(initial=0) <= 1e-10 * max(1.0, np.abs(L).max()):
            L = L.real
    err = float(np.linalg.norm(expm(L) - M))
    if not np.isfinite(err) or err > 1e-9 * max(nrm, 1.0):
        raise NumericFailure(f"logarithm reconstruction error {err:.3g}")
    return L, LogDiagnostics(ev, err, bool(np.isrealobj(L)))


# ---------------------------------------------------------------------------
# cone fit


def _stack(v):
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return np.concatenate([v.real, v.imag], axis=-1)
    return np.concatenate([v, np.zeros_like(v)], axis=-1)


def generator_columns(rep: Representation) -> np.ndarray:
    """Real ``(2 d^2, g-1)`` matrix whose columns are ``vec(R_mu - 1)``."""
    d = rep.dim
    G = rep.matrices[1:] - np.eye(d)
    return _stack(G.reshape(rep.order - 1, -1)).T


@dataclass(frozen=True)
class ConeFit:
    rates: np.ndarray
    residual: float


def cone_fit(L_target, rep: Representation, tol: float | None = None) -> ConeFit:
    """Nonnegative least squares fit ``L ~ sum_{mu >= 1} r_mu (R_mu - 1)``.

    Returns
    -------
    ConeFit
        ``rates`` has length ``g`` with ``rates[0] = 0``; ``residual`` is the
        Frobenius misfit.
    """
    L_target = np.asarray(L_target)
    if L_target.shape != (rep.dim, rep.dim):
        raise ShapeMismatch(f"target shape {L_target.shape} does not match d={rep.dim}")
    rates = np.zeros(rep.order)
    b = _stack(L_target.ravel())
    if rep.order == 1:
        return ConeFit(rates, float(np.linalg.norm(b)))
    A = generator_columns(rep)
    x, res = _kernels.nnls(A, b, tol)
    rates[1:] = x
    return ConeFit(rates, res)


MAX_BRANCH_COMBOS = 4096


def _eig_clusters(ev, scale):
    reps, labels = [], np.empty(len(ev), dtype=int)
    for i, z in enumerate(ev):
        for j, c in enumerate(reps):
            if abs(z - c) <= 1e-8 * scale:
                labels[i] = j
                break
        else:
            labels[i] = len(reps)
            reps.append(z)
    return np.array(reps), labels


def other_branch_fit(M, rep: Representation, tol: float = 1e-8,
                     max_combos: int = MAX_BRANCH_COMBOS) -> ConeFit | None:
    """Look for a non-principal logarithm of ``M`` inside the generator cone.

    Every cluster of equal eigenvalues is shifted by ``2 pi i k``, with a
    cluster and its complex conjugate shifted oppositely.  The range of ``k``
    comes from the cone itself: the total rate is bounded by the trace of
    any cone logarithm, and that bounds its spectrum.

    Returns
    -------
    ConeFit or None
        The first fit (in order of increasing ``sum |k|``) with residual at
        most ``tol * d``; ``None`` if there is none, ``M`` is not
        diagonalizable to working accuracy, or the search would exceed
        ``max_combos`` candidates.
    """
    M = np.asarray(M)
    d = rep.dim
    if rep.order == 1:
        return None
    ev, V = np.linalg.eig(M)
    if np.abs(ev).min() == 0 or np.linalg.cond(V) > 1e8:
        return None
    Vinv = np.linalg.inv(V)
    reps, labels = _eig_clusters(ev, max(1.0, np.abs(ev).max()))
    gaps = d - np.trace(rep.matrices[1:], axis1=1, axis2=2).real
    if gaps.min() <= 1e-12:
        return None
    total = max(0.0, -np.sum(np.log(np.abs(ev)))) / gaps.min()
    spread = max(np.linalg.norm(R - np.eye(d), 2) for R in rep.matrices[1:])
    K = int((total * spread + np.pi) // (2 * np.pi))
    free, partner = [], {}
    for j, c in enumerate(reps):
        if abs(c.imag) <= 1e-10 * max(1.0, abs(c)) or j in partner:
            continue
        conj = [i for i, z in enumerate(reps)
                if i != j and i not in partner and abs(z - np.conj(c)) <= 1e-8 * max(1.0, abs(c))]
        if conj:
            partner[conj[0]] = j
        free.append(j)
    if K == 0 or not free or (2 * K + 1) ** len(free) > max_combos:
        return None
    logs = np.log(reps.astype(complex))
    combos = sorted(itertools.product(range(-K, K + 1), repeat=len(free)),
                    key=lambda ks: sum(map(abs, ks)))
    for ks in combos[1:]:
        shift = np.zeros(len(reps))
        for j, k in zip(free, ks):
            shift[j] = k
        for i, j in partner.items():
            shift[i] = -shift[j]
        lam = logs + 2j * np.pi * shift
        L = (V * lam[labels]) @ Vinv
        if np.isrealobj(rep.matrices):
            if np.abs(L.imag).max() > 1e-8 * max(1.0, np.abs(L).max()):
                continue
            L = L.real
        fit = cone_fit(L, rep)
        if fit.residual <= tol * d:
            return fit
    return None


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class AccessVerdict:
    """Outcome of an accessibility test.

    ``rates`` are the recovered ``t q_mu`` (entry 0 is 0) or ``None`` when no
    logarithm was available.  ``det_sign`` is the sign of ``det M``
    (0 when singular).
    """

    accessible: bool
    rates: np.ndarray | None
    residual: float
    log_ok: bool
    det_sign: int
    reason: str = field(default="", compare=False)

    def to_dict(self) -> dict:
        res = self.residual if np.isfinite(self.residual) else None
        return {
            "accessible": bool(self.accessible),
            "residual": res,
            "rates": None if self.rates is None else [float(r) for r in self.rates],
            "det_sign": int(self.det_sign),
            "log_ok": bool(self.log_ok),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def det_sign(M) -> int:
    ev = np.linalg.eigvals(np.asarray(M))
    if np.abs(ev).min() <= SINGULAR_TOL * max(1.0, np.abs(ev).max()):
        return 0
    s = np.prod(ev / np.abs(ev))
    return 1 if s.real > 0 else -1


def affine_hull_residual(M, rep: Representation) -> float:
    """Distance of ``M`` from the affine hull of the represented elements."""
    v = rep.vectors()
    diff = (v[1:] - v[0]).T
    b = np.asarray(M).ravel() - v[0]
    if diff.size == 0:
        return float(np.linalg.norm(b))
    coef = np.linalg.lstsq(diff, b, rcond=None)[0]
    return float(np.linalg.norm(diff @ coef - b))


def is_accessible_map(M, rep: Representation, tol: float = 1e-8) -> AccessVerdict:
    """Test whether ``M`` equals ``expm(L)`` for ``L`` in the generator cone.

    The pipeline is: affine hull check, determinant sign, principal
    logarithm, nonnegative cone fit.  ``M`` is accessible when the fit
    residual is at most ``tol * d`` and no rate is below ``-tol``.

    Raises
    ------
    NotInAffineHull
        ``M`` is farther than ``1e-8`` (relative) from the affine hull.
    NonFinite
        ``M`` has NaN or infinite entries.
    """
    M = np.asarray(M)
    d = rep.dim
    if M.shape != (d, d):
        raise ShapeMismatch(f"matrix shape {M.shape} does not match d={d}")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has non-finite entries")
    if affine_hull_residual(M, rep) > HULL_TOL * max(1.0, np.linalg.norm(M)):
        raise NotInAffineHull("matrix is not in the affine hull of the group")
    sgn = det_sign(M)
    if sgn <= 0:
        why = "singular" if sgn == 0 else "negative determinant"
        return AccessVerdict(False, None, float("inf"), False, sgn, why)
    try:
        L, diag = principal_log(M)
    except (SingularMatrix, NegativeRealEigenvalue, NumericFailure) as exc:
        return AccessVerdict(False, None, float("inf"), False, sgn, str(exc))
    real_expected = np.isrealobj(rep.matrices)
    log_ok = diag.real or not real_expected
    fit = cone_fit(L, rep)
    ok = fit.residual <= tol * d and fit.rates.min() >= -tol
    rates = np.where(fit.rates < 0, 0.0, fit.rates)
    reason = "" if ok else "logarithm outside the generator cone"
    if not ok and other_branch_fit(M, rep, tol) is not None:
        log_ok = False
        reason = "principal logarithm outside the cone; another branch lies inside"
    return AccessVerdict(bool(ok), rates, fit.residual, bool(log_ok), sgn, reason)


def is_accessible_weights(table: GroupTable, p, tol: float = 1e-8) -> AccessVerdict:
    """Accessibility of ``sum_mu p_mu R_mu`` in the regular representation."""
    p = as_weights(p, table.order)
    rep = regular_representation(table)
    return is_accessible_map(np.tensordot(p, rep.matrices, axes=1), rep, tol)


# ---------------------------------------------------------------------------
# structure results


def accessible_ranks(table: GroupTable) -> list[int]:
    """Orders of all subgroups of an abelian group.

    For groups represented by mutually orthogonal unitary channels these are
    the possible Choi ranks of accessible maps.
    """
    if not table.is_abelian():
        raise NotAbelian("accessible ranks are defined here for abelian groups only")
    return sorted({h.order for h in enumerate_subgroups(table)})


def star_segment(p, s: float) -> np.ndarray:
    """Point ``s p + (1 - s) u`` on the segment from ``p`` to the centre ``u``."""
    p = np.asarray(p, dtype=float)
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    return s * p + (1 - s) / p.size


@dataclass(frozen=True)
class BoundaryCurve:
    support: tuple
    samples: list


def boundary_curves(table: GroupTable, support_patterns, t_grid) -> list[BoundaryCurve]:
    """Weight curves for rates spread evenly over the given supports.

    Parameters
    ----------
    support_patterns : iterable of iterable of int
        Element indices with nonzero rate.  Index 0 is ignored.  A pattern
        covering every element gives the central line.
    t_grid : sequence of float
    """
    g = table.order
    out = []
    for pat in support_patterns:
        sup = tuple(sorted({int(i) for i in pat if int(i) != 0}))
        if not sup or max(sup) >= g:
            raise ValueError(f"bad support pattern {pat!r}")
        q = np.zeros(g)
        q[list(sup)] = 1.0 / len(sup)
        sched = RateSchedule(q)
        samples = [(float(t), weights(table, sched.at(float(t)))) for t in t_grid]
        out.append(BoundaryCurve(sup, samples))
    return out


def b3_odd_matrix(alpha, beta, gamma) -> np.ndarray:
    """``alpha P_23 + beta P_13 + gamma P_12`` as a 3x3 matrix."""
    P23 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], float)
    P13 = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], float)
    P12 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], float)
    return alpha * P23 + beta * P13 + gamma * P12


def odd_subspace_spectrum(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Spectrum ``{1, m, -m}`` of a mixture of the three transpositions.

    ``m = |alpha + beta w + gamma conj(w)|`` with ``w = exp(2 pi i / 3)``.
    """
    if min(alpha, beta, gamma) < 0 or abs(alpha + beta + gamma - 1) > 1e-12:
        raise ValueError("coefficients must be nonnegative and sum to 1")
    w = np.exp(2j * np.pi / 3)
    m = abs(alpha + beta * w + gamma * np.conj(w))
    return np.array([1.0, m, -m])


# ---------------------------------------------------------------------------
# batch classification


def _joint_diagonalizer(mats, rng_seed=12345):
    """Unitary ``W`` diagonalizing commuting normal matrices, or ``None``."""
    rng = np.random.default_rng(rng_seed)
    c = rng.normal(size=len(mats)) + 1j * rng.normal(size=len(mats))
    C = np.tensordot(c, mats, axes=1)
    _, W = scipy.linalg.schur(C.astype(complex), output="complex")
    D = np.einsum("ij,mjk,kl->mil", W.conj().T, mats, W)
    off = D - np.einsum("mii->mi", D)[:, :, None] * np.eye(mats.shape[1])
    scale = max(1.0, np.abs(mats).max())
    if np.abs(off).max() > 1e-9 * scale:
        return None, None
    return W, np.einsum("mii->mi", D)


class AccessClassifier:
    """Vectorized accessibility tests for many mixtures of one representation.

    For abelian groups of normal matrices the elements are diagonalized
    jointly once, and each mixture reduces to a vector of eigenvalues; the
    Frobenius misfit is unchanged by the unitary change of basis.  Otherwise
    each chunk of mixtures is diagonalized with a batched eigensolver.

    Results agree with :func:`is_accessible_map` (without the affine hull
    check, which holds by construction for mixtures).
    """

    def __init__(self, rep: Representation, tol: float = 1e-8, chunk: int = 20000,
                 use_numba: bool | None = None):
        self.rep = rep
        self.tol = tol
        self.chunk = chunk
        self.use_numba = use_numba
        g, d = rep.order, rep.dim
        self.d = d
        self.eig = None
        if rep.group.is_abelian() and g > 1:
            W, E = _joint_diagonalizer(rep.matrices)
            if W is not None:
                # merge repeated joint eigenvalue columns, weighting by multiplicity
                key = np.round(np.concatenate([E.real, E.imag]).T, 9)
                _, first, inv, counts = np.unique(
                    key, axis=0, return_index=True, return_inverse=True, return_counts=True)
                self.eig = E[:, first]  # (g, k)
                self.W, self.first = W, first
                self.mult = counts.astype(float)
        if self.eig is not None:
            w = np.sqrt(self.mult)
            A = (self.eig[1:] - 1).T * w[:, None]  # (k, g-1) complex
            A = np.concatenate([A.real, A.imag])
            self.row_weight = w
        else:
            A = generator_columns(rep) if g > 1 else np.zeros((2 * d * d, 0))
        # orthonormal basis of the generator span
        if A.shape[1]:
            U, s, _ = np.linalg.svd(A, full_matrices=False)
            r = int(np.sum(s > 1e-10 * s[0])) if s.size and s[0] > 0 else 0
            self.basis = U[:, :r]
        else:
            self.basis = np.zeros((A.shape[0], 0))
        self.A_red = self.basis.T @ A

    # --- logarithms -------------------------------------------------------
    def _log_abelian(self, P=None, M=None):
        if M is None:
            lam = P @ self.eig  # (n, k)
        else:
            D = np.einsum("ij,njk,kl->nil", self.W.conj().T, M, self.W)
            lam = np.einsum("nii->ni", D)[:, self.first]
        a = np.abs(lam)
        bad = (a <= SINGULAR_TOL) | ((lam.real < 0) & (np.abs(lam.imag) <= NEG_AXIS_TOL * a))
        bad = bad.any(axis=1)
        lam = np.where(bad[:, None], 1.0, lam)
        ell = np.log(lam) * self.row_weight
        return np.concatenate([ell.real, ell.imag], axis=1), bad

    def _log_general(self, P=None, M=None):
        if M is None:
            M = np.tensordot(P, self.rep.matrices, axes=1)
        n, d = M.shape[0], self.d
        lam, V = np.linalg.eig(M)
        a = np.abs(lam)
        bad = (a <= SINGULAR_TOL) | ((lam.real < 0) & (np.abs(lam.imag) <= NEG_AXIS_TOL * a))
        bad = bad.any(axis=1)
        lam = np.where(bad[:, None], 1.0, lam)
        cond = np.linalg.cond(V)
        with np.errstate(all="ignore"):
            Vi = np.linalg.inv(V)
        L = np.einsum("nij,nj,njk->nik", V, np.log(lam), Vi)
        redo = (~bad) & ~(cond < 1e6)
        for i in np.flatnonzero(redo):
            try:
                L[i] = principal_log(M[i])[0]
            except (SingularMatrix, NegativeRealEigenvalue, NumericFailure):
                bad[i] = True
        return _stack(L.reshape(n, d * d)), bad

    def classify(self, P, return_details: bool = False):
        """Classify rows of ``P`` (shape ``(n, g)``) as accessible.

        Returns
        -------
        ndarray of bool, or ``(accessible, residuals, rates)`` when
        ``return_details`` is set; ``rates`` has one column per
        non-identity element.
        """
        P = np.atleast_2d(np.asarray(P, dtype=float))
        return self._run(P.shape[0], lambda sl: {"P": P[sl]}, return_details)

    def classify_matrices(self, M, return_details: bool = False):
        """Classify maps given directly as matrices (shape ``(n, d, d)``).

        The maps are assumed to lie in the affine hull of the group.
        """
        M = np.asarray(M)
        if M.ndim == 2:
            M = M[None]
        return self._run(M.shape[0], lambda sl: {"M": M[sl]}, return_details)

    def _run(self, n, get, return_details):
        ok = np.zeros(n, bool)
        res_all = np.full(n, np.inf)
        rates_all = np.zeros((n, max(self.rep.order - 1, 0)))
        for lo in range(0, n, self.chunk):
            sl = slice(lo, min(n, lo + self.chunk))
            if self.rep.order == 1:
                ok[sl] = True
                res_all[sl] = 0.0
                continue
            if self.eig is not None:
                b, bad = self._log_abelian(**get(sl))
            else:
                b, bad = self._log_general(**get(sl))
            br = b @ self.basis
            e = b - br @ self.basis.T
            perp2 = np.einsum("ij,ij->i", e, e)
            if self.A_red.shape[1]:
                x, r = _kernels.nnls_batch(self.A_red, br, use_numba=self.use_numba)
            else:
                x, r = np.zeros((br.shape[0], 0)), np.sqrt(np.einsum("ij,ij->i", br, br))
            res = np.sqrt(perp2 + r * r)
            res[bad] = np.inf
            ok[sl] = (~bad) & (res <= self.tol * self.d)
            res_all[sl] = res
            rates_all[sl] = x
        if return_details:
            return ok, res_all, rates_all
        return ok
