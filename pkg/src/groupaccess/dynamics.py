"""Lindblad semigroups generated by group elements.

For rates ``q`` (with ``q_0 = 0``) the generator is
``L = sum_{mu >= 1} q_mu (R_mu - 1)``.  Because the ``R_mu`` form a group,
``expm(t L)`` is again a mixture ``sum_mu w_mu(t) R_mu`` and the weights can
be read off in the regular representation, where
``w_mu(t) = Tr(R_mu^T expm(t L_reg)) / g``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .channels import Representation, as_weights
from .errors import InvalidInput, LengthMismatch, NonFinite
from .groups import GroupTable, regular_matrices

# Pade(13) scaling and squaring (Higham 2005)
_THETA13 = 5.371920351148152
_B13 = np.array([
    64764752532480000., 32382376266240000., 7771770303897600.,
    1187353796428800., 129060195264000., 10559470521600.,
    670442572800., 33522128640., 1323241920., 40840800., 960960.,
    16380., 182., 1.])


def expm(A) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a [13/13] Pade kernel.

    Parameters
    ----------
    A : array_like, shape (n, n)

    Returns
    -------
    ndarray
        ``exp(A)``, real when ``A`` is real.

    Raises
    ------
    NonFinite
        ``A`` contains NaN or infinite entries.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"expm needs a square matrix, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has non-finite entries")
    A = A.astype(complex if np.iscomplexobj(A) else float)
    n = A.shape[0]
    ident = np.eye(n, dtype=A.dtype)
    if n == 0:
        return A.copy()
    norm = np.linalg.norm(A, 1)
    if norm == 0:
        return ident
    s = 0
    if norm > _THETA13:
        s = int(np.ceil(np.log2(norm / _THETA13)))
        A = A / 2.0 ** s
    b = _B13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    X = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        X = X @ X
    return X


@dataclass(frozen=True)
class RateSchedule:
    """Nonnegative rates ``q`` (``q[0] = 0``) and a total time ``t``."""

    q: np.ndarray
    t: float = 1.0

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 1 or q.size < 1:
            raise InvalidInput("rates must be a non-empty 1-d vector")
        if not np.all(np.isfinite(q)) or q.min() < 0:
            raise InvalidInput("rates must be finite and nonnegative")
        if q[0] != 0:
            raise InvalidInput("rate of the identity element must be 0")
        if not np.isfinite(self.t) or self.t < 0:
            raise InvalidInput("time must be finite and nonnegative")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def uniform(cls, g: int, t: float = 1.0) -> "RateSchedule":
        """Equal rates on every non-identity element, summing to 1."""
        q = np.full(g, 1.0 / max(g - 1, 1))
        q[0] = 0
        return cls(q, t)

    @classmethod
    def from_times(cls, times) -> "RateSchedule":
        """Schedule with ``t_mu = times[mu-1]``, normalized to unit total rate."""
        tm = np.concatenate([[0.0], np.asarray(times, dtype=float)])
        tot = tm.sum()
        if tot == 0:
            return cls(tm, 0.0)
        return cls(tm / tot, tot)

    def normalized(self) -> "RateSchedule":
        tot = self.q.sum()
        if tot == 0:
            return self
        return RateSchedule(self.q / tot, self.t * tot)

    @property
    def times(self) -> np.ndarray:
        """Interaction times ``t_mu = t q_mu``."""
        return self.t * self.q

    def at(self, t: float) -> "RateSchedule":
        return RateSchedule(self.q, t)


def _check_rates(q: RateSchedule, g: int):
    if q.q.shape[0] != g:
        raise LengthMismatch(f"{q.q.shape[0]} rates for a group of order {g}")


def generator(rep: Representation, q: RateSchedule) -> np.ndarray:
    """``L = sum_{mu >= 1} q_mu (R_mu - 1)``."""
    _check_rates(q, rep.order)
    d = rep.dim
    qs = q.q
    return np.tensordot(qs, rep.matrices, axes=1) - qs.sum() * np.eye(d)


def _clean(w: np.ndarray) -> np.ndarray:
    w = np.where((w < 0) & (w > -1e-12), 0.0, w)
    return w / w.sum()


def weights(table: GroupTable, q: RateSchedule) -> np.ndarray:
    """Mixture weights ``w(t)`` of ``expm(t L)`` over the group elements.

    Computed in the regular representation, so the result depends on the
    group alone.  Entries in ``(-1e-12, 0)`` are clamped to zero and the
    vector renormalized.
    """
    g = table.order
    _check_rates(q, g)
    if q.t == 0 or g == 1:
        w = np.zeros(g)
        w[0] = 1
        return w
    R = regular_matrices(table)
    L = np.tensordot(q.q, R, axes=1) - q.q.sum() * np.eye(g)
    E = expm(q.t * L)
    # (1/g) Tr(R_mu^T E) = (1/g) sum_b E[cayley[mu, b], b]
    b = np.arange(g)
    w = E[table.cayley, b[None, :]].sum(axis=1) / g
    return _clean(w)


def cyclic_weights(h: int, t: float) -> np.ndarray:
    """Weights ``p_r(t)`` of ``expm(t (Phi - 1))`` for ``Phi`` of order ``h``.

    ``p_r(t) = (1/h) sum_s w^(-s r) exp(t (w^s - 1))`` with
    ``w = exp(2 pi i / h)``.
    """
    if h < 1:
        raise InvalidInput("order must be positive")
    if t < 0:
        raise InvalidInput("time must be nonnegative")
    s = np.arange(h)
    om = np.exp(2j * np.pi * s / h)
    z = np.exp(t * (om - 1))
    # p = (1/h) * conj-DFT of z
    p = (np.fft.fft(z) / h).real
    return _clean(p)


def cyclic_product_weights(h: int, t_list) -> np.ndarray:
    """Weights of ``prod_i expm(t_i (Phi^i - 1))`` over powers of ``Phi``.

    Parameters
    ----------
    h : int
        Order of the cyclic group, at least 2.
    t_list : sequence of float
        Times ``t_1..t_{h-1}`` attached to the powers ``Phi^1..Phi^{h-1}``.
    """
    if h < 2:
        raise InvalidInput("order must be at least 2")
    t_list = np.asarray(t_list, dtype=float)
    if t_list.shape != (h - 1,):
        raise LengthMismatch(f"need {h - 1} times, got {t_list.shape}")
    out = np.zeros(h)
    out[0] = 1
    for i, ti in enumerate(t_list, start=1):
        p = cyclic_weights(h, ti)
        # Phi^(i j) carries weight p_j; fold into the running convolution
        step = np.zeros(h)
        np.add.at(step, (i * np.arange(h)) % h, p)
        out = np.real(np.fft.ifft(np.fft.fft(out) * np.fft.fft(step)))
    return _clean(out)


def limit_projector(rep: Representation) -> np.ndarray:
    """Uniform average ``(1/g) sum_mu R_mu``."""
    return rep.matrices.mean(axis=0)


def trajectory(rep: Representation, q: RateSchedule, t_grid):
    """Evaluate ``expm(t L)`` and ``w(t)`` along a time grid.

    Returns
    -------
    list of (float, ndarray, ndarray)
        ``(t, matrix, weights)`` per grid point.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.ndim != 1 or (ts.size and (ts.min() < 0 or np.any(np.diff(ts) < 0))):
        raise InvalidInput("time grid must be nondecreasing and nonnegative")
    L = generator(rep, q.at(1.0))
    out = []
    for t in ts:
        out.append((float(t), expm(t * L), weights(rep.group, q.at(float(t)))))
    return out


def weight_table(table: GroupTable, q: RateSchedule, t_grid) -> np.ndarray:
    """``(len(t_grid), g)`` array of weights along a time grid."""
    return np.array([weights(table, q.at(float(t))) for t in t_grid])


def trajectory_csv(table: GroupTable, q: RateSchedule, t_grid) -> str:
    """CSV text with columns ``t, w_0..w_{g-1}``."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["t"] + [f"w_{i}" for i in range(table.order)])
    for t, w in zip(t_grid, weight_table(table, q, t_grid)):
        wr.writerow([repr(float(t))] + [repr(float(x)) for x in w])
    return buf.getvalue()


def check_weights(p, g: int) -> np.ndarray:
    """Validate a mixture weight vector; see :func:`channels.as_weights`."""
    return as_weights(p, g)
