"""Group polytopes in Euclidean coordinates, uniform sampling and volume ratios.

Points of the polytope are parameterized by weight vectors over the group
elements.  The embedding uses an orthonormal basis of the affine hull of the
real-stacked, vectorized representation matrices, so Euclidean distances
equal Hilbert-Schmidt distances.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .accessibility import AccessClassifier
from .channels import Representation
from .errors import (
    DegeneratePolytope,
    InvalidInput,
    OffsetOutsidePolytope,
    RatioOverflow,
    TriangulationOverflow,
)

MAX_TRIANGULATION_VERTICES = 8
SAMPLE_CHUNK = 50000


def make_rng(seed: int, worker: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``seed XOR worker``."""
    key = (int(seed) ^ int(worker)) & (2 ** 64 - 1)
    return np.random.Generator(np.random.Philox(key=key))


# ---------------------------------------------------------------------------
# embedding


@dataclass(frozen=True, eq=False)
class EmbeddedPolytope:
    """Vertices of a group polytope in coordinates of its affine hull.

    Attributes
    ----------
    vertices : ndarray, shape (g, D)
        Vertex 0 (the identity) sits at the origin.
    affine_dim : int
    basis : ndarray, shape (2 d^2, D)
        Orthonormal basis mapping coordinates back to stacked matrices.
    origin : int
        Index of the identity vertex (always 0).
    """

    vertices: np.ndarray
    affine_dim: int
    basis: np.ndarray
    offset: np.ndarray
    origin: int = 0

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    def is_simplex(self) -> bool:
        return self.n_vertices == self.affine_dim + 1

    def point(self, p) -> np.ndarray:
        """Coordinates of the mixture with weights ``p``."""
        return np.asarray(p) @ self.vertices


def _stacked(rep: Representation) -> np.ndarray:
    v = rep.vectors()
    return np.concatenate([v.real, v.imag], axis=1) if np.iscomplexobj(v) else v


def embed(rep: Representation) -> EmbeddedPolytope:
    """Isometric coordinates of the group polytope.

    Raises
    ------
    DegeneratePolytope
        All elements coincide although ``g > 1``.
    """
    v = _stacked(rep)
    diff = v[1:] - v[0]
    g = rep.order
    if g == 1:
        return EmbeddedPolytope(np.zeros((1, 0)), 0, np.zeros((v.shape[1], 0)), v[0])
    U, s, Vt = np.linalg.svd(diff, full_matrices=False)
    r = int(np.sum(s > 1e-8 * s[0])) if s[0] > 0 else 0
    if r == 0:
        raise DegeneratePolytope("all group elements coincide in this representation")
    basis = Vt[:r].T
    verts = (v - v[0]) @ basis
    verts[0] = 0.0
    return EmbeddedPolytope(verts, r, basis, v[0])


# ---------------------------------------------------------------------------
# simplices and triangulation


def cayley_menger_volume(points) -> float:
    """Volume of the simplex spanned by ``k + 1`` points (any ambient dim)."""
    P = np.asarray(points, dtype=float)
    k = P.shape[0] - 1
    if k == 0:
        return 1.0
    d2 = np.sum((P[:, None, :] - P[None, :, :]) ** 2, axis=-1)
    cm = np.ones((k + 2, k + 2))
    cm[0, 0] = 0
    cm[1:, 1:] = d2
    det = np.linalg.det(cm)
    v2 = (-1) ** (k + 1) * det / (2 ** k * math.factorial(k) ** 2)
    return float(np.sqrt(max(v2, 0.0)))


def _local_frame(X):
    """Affine dimension and local coordinates of a point set."""
    D = X - X[0]
    if len(X) == 1:
        return 0, np.zeros((1, 0))
    U, s, Vt = np.linalg.svd(D, full_matrices=False)
    tol = 1e-9 * max(1.0, s[0])
    r = int(np.sum(s > tol))
    return r, D @ Vt[:r].T


def _facets(Y, idx):
    """Vertex sets of the facets of ``conv(Y)`` (``Y`` full dimensional)."""
    n, k = Y.shape
    scale = max(1.0, np.abs(Y).max())
    found = {}
    for sub in itertools.combinations(range(n), k):
        S = Y[list(sub)]
        Dm = S[1:] - S[0]
        if k == 1:
            normal = np.ones(1)
        else:
            _, sv, Vt = np.linalg.svd(Dm)
            if sv.size < k - 1 or sv[-1] <= 1e-9 * scale:
                continue
            normal = Vt[-1]
        h = (Y - S[0]) @ normal
        tol = 1e-9 * scale
        if np.all(h <= tol) or np.all(h >= -tol):
            on = tuple(sorted(idx[i] for i in np.flatnonzero(np.abs(h) <= tol)))
            found[on] = True
    return list(found)


def pulling_triangulation(poly: EmbeddedPolytope, apex: int | None = None) -> list[tuple]:
    """Triangulate ``conv(vertices)`` by recursive pulling from the lowest vertex.

    Each facet not containing the apex is triangulated recursively (pulling
    from its own lowest vertex) and coned to the apex.

    Returns
    -------
    list of tuple of int
        Vertex index sets of full dimensional simplices.

    Raises
    ------
    TriangulationOverflow
        More than 8 vertices and not a simplex.
    """
    X = poly.vertices
    g = X.shape[0]
    if poly.is_simplex():
        return [tuple(range(g))]
    if g > MAX_TRIANGULATION_VERTICES:
        raise TriangulationOverflow(
            f"brute-force triangulation supports at most {MAX_TRIANGULATION_VERTICES} vertices")
    order = list(range(g))
    if apex is not None:
        order.remove(apex)
        order.insert(0, apex)
    return _pull(X, order)


def _pull(X, idx):
    r, Y = _local_frame(X[idx])
    if len(idx) == r + 1:
        return [tuple(idx)]
    apex = idx[0]
    out = []
    for f in _facets(Y, idx):
        if apex in f:
            continue
        sub = [i for i in idx if i in f]
        for simplex in _pull(X, sub):
            out.append((apex,) + simplex)
    return out


def simplex_volumes(poly: EmbeddedPolytope, simplices) -> np.ndarray:
    return np.array([cayley_menger_volume(poly.vertices[list(s)]) for s in simplices])


def hull_volume(poly: EmbeddedPolytope) -> float:
    """Volume of the polytope from qhull (independent of the triangulation)."""
    from scipy.spatial import ConvexHull

    if poly.affine_dim == 1:
        return float(np.ptp(poly.vertices[:, 0]))
    return float(ConvexHull(poly.vertices).volume)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class SampleBatch:
    points: np.ndarray
    weights: np.ndarray
    method: str


class PolytopeSampler:
    """Uniform sampler bound to one polytope.

    Simplices are sampled with Dirichlet(1, ..., 1) barycentric weights.
    Other polytopes with at most 8 vertices use a pulling triangulation with
    Cayley-Menger volumes; larger ones fall back to hit-and-run.
    """

    def __init__(self, poly: EmbeddedPolytope, method: str = "auto",
                 burn_in: int = 200, thin: int = 10):
        if poly.affine_dim < 1:
            raise DegeneratePolytope("cannot sample a zero-dimensional polytope")
        self.poly = poly
        self.burn_in = burn_in
        self.thin = thin
        g = poly.n_vertices
        if method == "auto":
            if poly.is_simplex() or g <= MAX_TRIANGULATION_VERTICES:
                method = "triangulation"
            else:
                method = "hit-and-run"
        if method == "triangulation":
            self.simplices = pulling_triangulation(poly)
            vols = simplex_volumes(poly, self.simplices)
            self.volumes = vols
            self.probs = vols / vols.sum()
            self.simplex_index = np.array(self.simplices)
        elif method == "hit-and-run":
            self._prepare_har()
        else:
            raise InvalidInput(f"unknown sampling method {method!r}")
        self.method = method

    def _prepare_har(self):
        from scipy.spatial import ConvexHull

        V = self.poly.vertices
        if self.poly.affine_dim == 1:
            lo, hi = V[:, 0].min(), V[:, 0].max()
            self.H = np.array([[1.0], [-1.0]])
            self.c = np.array([hi, -lo])
        else:
            eq = ConvexHull(V).equations
            self.H = eq[:, :-1]
            self.c = -eq[:, -1]
        self.center = V.mean(axis=0)
        g = V.shape[0]
        # weights from coordinates: V^T p = x, sum p = 1, p >= 0
        self.A_bary = np.vstack([V.T, np.ones((1, g))])

    def sample(self, n: int, rng: np.random.Generator) -> SampleBatch:
        g = self.poly.n_vertices
        if self.method == "triangulation":
            k = self.simplex_index.shape[1]
            which = rng.choice(len(self.simplices), size=n, p=self.probs)
            bary = rng.dirichlet(np.ones(k), size=n)
            W = np.zeros((n, g))
            rows = np.repeat(np.arange(n), k)
            np.add.at(W, (rows, self.simplex_index[which].ravel()), bary.ravel())
        else:
            W = self._har(n, rng)
        return SampleBatch(W @ self.poly.vertices, W, self.method)

    def _har(self, n, rng):
        D = self.poly.affine_dim
        chains = min(n, 64)
        per = -(-n // chains)
        burn = -(-self.burn_in // self.thin)  # burn-in in units of thin
        steps = (burn + per) * self.thin
        dirs = rng.standard_normal((steps, chains, D))
        us = rng.random((steps, chains))
        out = _kernels.hit_and_run_chains(
            self.H, self.c, np.tile(self.center, (chains, 1)), dirs, us, thin=self.thin)
        X = out[burn:].reshape(-1, D)[:n]
        B = np.hstack([X, np.ones((n, 1))])
        W, _ = _kernels.nnls_batch(self.A_bary, B)
        W = np.maximum(W, 0)
        return W / W.sum(axis=1, keepdims=True)


def uniform_sample(poly: EmbeddedPolytope, n: int, seed: int = 0, method: str = "auto",
                   rng: np.random.Generator | None = None) -> SampleBatch:
    """``n`` uniform points of the polytope with representing weight vectors.

    Hit-and-run (``method="hit-and-run"``) runs 64 chains from the vertex
    centroid, discards 200 burn-in steps and keeps every 10th state.
    """
    if rng is None:
        rng = make_rng(seed)
    return PolytopeSampler(poly, method).sample(int(n), rng)


# ---------------------------------------------------------------------------
# Monte Carlo volume fraction


@dataclass(frozen=True)
class VolumeEstimate:
    fraction: float
    std_error: float
    n_samples: int
    n_accessible: int
    seed: int
    method: str
    workers: int = 1

    @classmethod
    def from_counts(cls, n_acc, n, seed, method, workers=1):
        f = n_acc / n
        return cls(f, math.sqrt(f * (1 - f) / n), int(n), int(n_acc), int(seed), method, workers)

    def to_dict(self) -> dict:
        return {"fraction": self.fraction, "std_error": self.std_error, "n": self.n_samples,
                "n_accessible": self.n_accessible, "seed": self.seed, "method": self.method,
                "workers": self.workers}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def partition(n: int, workers: int) -> list[int]:
    base, extra = divmod(n, workers)
    return [base + (i < extra) for i in range(workers)]


def mc_accessible_fraction(rep: Representation, n: int, seed: int = 0, tol: float = 1e-8,
                           workers: int = 1, method: str = "auto") -> VolumeEstimate:
    """Monte Carlo estimate of the accessible fraction of the group polytope.

    Sample counts are split across workers up front and worker ``i`` draws
    from ``make_rng(seed, i)``, so the result is reproducible for fixed
    ``(seed, n, workers)``.
    """
    n = int(n)
    if n < 1000:
        raise InvalidInput("need at least 1000 samples")
    if workers < 1:
        raise InvalidInput("workers must be positive")
    poly = embed(rep)
    sampler = PolytopeSampler(poly, method)
    clf = AccessClassifier(rep, tol)

    def run(i, count):
        rng = make_rng(seed, i)
        acc = 0
        left = count
        while left > 0:
            m = min(SAMPLE_CHUNK, left)
            acc += int(clf.classify(sampler.sample(m, rng).weights).sum())
            left -= m
        return acc

    counts = partition(n, workers)
    if workers == 1:
        total = run(0, n)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            total = sum(ex.map(run, range(workers), counts))
    return VolumeEstimate.from_counts(total, n, seed, sampler.method, workers)


# ---------------------------------------------------------------------------
# analytic ratios


def polygon_ratio(g: int) -> float:
    """Accessible fraction of the regular ``g``-gon of a cyclic group."""
    if g < 3:
        raise InvalidInput("polygon ratio needs g >= 3")
    a = math.pi / g
    return (1 - math.exp(-2 * math.pi * math.tan(a))) / (2 * g * math.sin(a) ** 2)


def z2n_ratio(n: int) -> float:
    """Accessible fraction ``(2^n)! / 2^(n 2^n)`` for the group ``Z_2^n``."""
    if n < 1:
        raise InvalidInput("n must be positive")
    if n > 8:
        raise RatioOverflow("z2n_ratio is limited to n <= 8")
    m = 2 ** n
    return float(Fraction(math.factorial(m), 2 ** (n * m)))


def z4_cyclic_ratio() -> float:
    """Accessible fraction of a linearly independent cyclic group of order 4."""
    return 3 / 32 * (1 - math.exp(-4 * math.pi))


def noncyclic4_ratio() -> float:
    """Accessible fraction of the non-cyclic group of order 4."""
    return 3 / 32


def r_star(g: int) -> float:
    """Radius ``exp(-pi tan(pi/g))`` for the cyclic polygon of order ``g``."""
    if g < 3:
        raise InvalidInput("r_star needs g >= 3")
    return math.exp(-math.pi * math.tan(math.pi / g))


# ---------------------------------------------------------------------------
# Birkhoff polytope B_3


def _perm(p):
    m = np.zeros((3, 3))
    m[list(p), [0, 1, 2]] = 1
    return m


B3_EVEN = (_perm((0, 1, 2)), _perm((1, 2, 0)), _perm((2, 0, 1)))
B3_ODD = (_perm((0, 2, 1)), _perm((2, 1, 0)), _perm((1, 0, 2)))  # P23, P13, P12
B3_CENTER = np.full((3, 3), 1 / 3)


def _plane(mats):
    a = (mats[0] - B3_CENTER).ravel()
    b = (mats[1] - B3_CENTER).ravel()
    e1 = a / np.linalg.norm(a)
    b = b - (b @ e1) * e1
    return np.array([e1, b / np.linalg.norm(b)])


EVEN_PLANE = _plane(B3_EVEN)
ODD_PLANE = _plane(B3_ODD)


def b3_projections(samples):
    """Orthogonal projections of 3x3 bistochastic matrices onto two planes.

    Returns
    -------
    even, odd : ndarray, shape (n, 2)
        Coordinates in the plane of the even permutations and in the plane
        of the transpositions, both centred at the uniform matrix.
    """
    X = np.asarray(samples, dtype=float).reshape(-1, 9) - B3_CENTER.ravel()
    return X @ EVEN_PLANE.T, X @ ODD_PLANE.T


@dataclass(frozen=True)
class CrossSection:
    plane: str
    offset: np.ndarray
    coords: np.ndarray
    accessible: np.ndarray
    n_drawn: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "accessible"])
        for (x, y), a in zip(self.coords, self.accessible):
            w.writerow([repr(float(x)), repr(float(y)), int(a)])
        return buf.getvalue()


def b3_cross_sections(offset, n: int, seed: int = 0, plane: str = "odd",
                      tol: float = 1e-8, max_draws: int | None = None) -> CrossSection:
    """Sample and classify the section of B_3 by a plane parallel to one of the two.

    Parameters
    ----------
    offset : array_like
        Either 2 coordinates in the complementary plane or a 3x3 matrix whose
        projection onto the complementary plane is used.
    n : int
        Number of section points wanted.
    plane : {"odd", "even"}
        The plane the section is parallel to.
    max_draws : int, optional
        Cap on bounding-box draws (default ``200 n``); fewer than ``n``
        points are returned when the section is thin.

    Raises
    ------
    OffsetOutsidePolytope
        The offset point itself is not in B_3.
    """
    from .builtins import builtin_representation

    if plane not in ("odd", "even"):
        raise InvalidInput("plane must be 'odd' or 'even'")
    basis, other = (ODD_PLANE, EVEN_PLANE) if plane == "odd" else (EVEN_PLANE, ODD_PLANE)
    off = np.asarray(offset, dtype=float)
    if off.shape == (3, 3):
        off = (off.ravel() - B3_CENTER.ravel()) @ other.T
    if off.shape != (2,):
        raise InvalidInput("offset must be 2 coordinates or a 3x3 matrix")
    base = B3_CENTER.ravel() + off @ other
    if base.min() < -1e-12:
        raise OffsetOutsidePolytope("offset point lies outside B_3")
    rng = make_rng(seed)
    r = math.sqrt(2.0)
    pts = []
    drawn = 0
    max_draws = 200 * n if max_draws is None else max_draws
    while sum(len(p) for p in pts) < n and drawn < max_draws:
        m = min(max(2 * n, 1000), max_draws - drawn)
        ab = rng.uniform(-r, r, size=(m, 2))
        X = base + ab @ basis
        keep = X.min(axis=1) >= 0
        pts.append(ab[keep])
        drawn += m
    coords = np.concatenate(pts)[:n] if pts else np.zeros((0, 2))
    mats = (base + coords @ basis).reshape(-1, 3, 3)
    rep = builtin_representation("birkhoff3")
    acc = AccessClassifier(rep, tol).classify_matrices(mats) if len(mats) else np.zeros(0, bool)
    return CrossSection(plane, off, coords, acc, drawn)
