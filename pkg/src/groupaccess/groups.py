"""Finite groups given by generator descriptions.

Groups are closed exactly: permutations are integer tuples, diagonal
unitaries are tuples of rational phases (``m/n`` meaning ``exp(2 pi i m/n)``)
compared up to a global phase, and Weyl operators ``X^k Z^l`` are pairs of
integers modulo ``N``.  No floating point enters the closure, so the Cayley
table is exact.

Elements are numbered by breadth-first discovery starting at the identity,
which always receives index 0.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import (
    ClosureOverflow,
    GroupTooLarge,
    IncompatibleGenerators,
    IndexOutOfRange,
    InvalidInput,
    InvalidTable,
)

MAX_ORDER = 4096
MAX_SUBGROUP_ORDER = 64
KINDS = ("permutation", "diagonal-unitary", "weyl", "pauli", "product", "cyclic-rotation")


# ---------------------------------------------------------------------------
# generator specifications


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise InvalidInput(f"phase {x!r} must be an integer or a 'm/n' string")


@dataclass(frozen=True)
class GeneratorSpec:
    """One generator entry of a group description.

    Parameters
    ----------
    kind : str
        One of ``permutation``, ``diagonal-unitary``, ``weyl``, ``pauli``,
        ``product`` or ``cyclic-rotation``.
    perm : tuple of int, optional
        0-based image list for ``permutation``.
    phases : tuple of Fraction, optional
        Phase fractions for ``diagonal-unitary``.
    dim : int, optional
        Dimension ``N`` for ``weyl`` and ``pauli``.
    order : int, optional
        Rotation order ``l`` for ``cyclic-rotation``.
    factors : tuple of two tuples of GeneratorSpec, optional
        Generator lists of the two factors for ``product``.
    """

    kind: str
    perm: tuple | None = None
    phases: tuple | None = None
    dim: int | None = None
    order: int | None = None
    factors: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown generator kind {self.kind!r}")
        if self.kind == "permutation":
            p = tuple(int(i) for i in (self.perm or ()))
            if sorted(p) != list(range(len(p))) or not p:
                raise InvalidInput(f"{self.perm!r} is not a permutation of 0..n-1")
            object.__setattr__(self, "perm", p)
        elif self.kind == "diagonal-unitary":
            if not self.phases:
                raise InvalidInput("diagonal-unitary needs a non-empty phase list")
            object.__setattr__(self, "phases", tuple(_frac(x) % 1 for x in self.phases))
        elif self.kind in ("weyl", "pauli"):
            n = 2 if (self.kind == "pauli" and self.dim is None) else self.dim
            if n is None or int(n) < 2:
                raise InvalidInput(f"{self.kind} needs dim >= 2")
            object.__setattr__(self, "dim", int(n))
        elif self.kind == "cyclic-rotation":
            if self.order is None or int(self.order) < 1:
                raise InvalidInput("cyclic-rotation needs order >= 1")
            object.__setattr__(self, "order", int(self.order))
        elif self.kind == "product":
            if self.factors is None or len(self.factors) != 2:
                raise InvalidInput("product needs exactly two factor lists")
            fs = tuple(tuple(_as_spec(s) for s in f) for f in self.factors)
            object.__setattr__(self, "factors", fs)

    # convenience constructors
    @classmethod
    def permutation(cls, perm):
        return cls("permutation", perm=tuple(perm))

    @classmethod
    def diagonal(cls, phases):
        return cls("diagonal-unitary", phases=tuple(phases))

    @classmethod
    def weyl(cls, n: int):
        return cls("weyl", dim=n)

    @classmethod
    def pauli(cls):
        return cls("pauli", dim=2)

    @classmethod
    def rotation(cls, order: int):
        return cls("cyclic-rotation", order=order)

    @classmethod
    def product(cls, a, b):
        return cls("product", factors=(tuple(a), tuple(b)))

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise InvalidInput(f"generator entry {d!r} lacks a 'kind'")
        kind = d["kind"]
        try:
            if kind == "permutation":
                return cls(kind, perm=tuple(d["perm"]))
            if kind == "diagonal-unitary":
                return cls(kind, phases=tuple(d["phases"]))
            if kind in ("weyl", "pauli"):
                return cls(kind, dim=d.get("dim", 2 if kind == "pauli" else None))
            if kind == "cyclic-rotation":
                return cls(kind, order=d["order"])
            if kind == "product":
                fs = d["factors"]
                return cls(kind, factors=tuple(tuple(cls.from_dict(s) for s in f) for f in fs))
        except KeyError as exc:
            raise InvalidInput(f"generator of kind {kind!r} is missing field {exc}") from None
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"bad {kind!r} generator: {exc}") from None
        raise InvalidInput(f"unknown generator kind {kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "permutation":
            return {"kind": self.kind, "perm": list(self.perm)}
        if self.kind == "diagonal-unitary":
            return {"kind": self.kind, "phases": [str(p) for p in self.phases]}
        if self.kind in ("weyl", "pauli"):
            return {"kind": self.kind, "dim": self.dim}
        if self.kind == "cyclic-rotation":
            return {"kind": self.kind, "order": self.order}
        return {"kind": self.kind, "factors": [[s.to_dict() for s in f] for f in self.factors]}


def _as_spec(s) -> GeneratorSpec:
    return s if isinstance(s, GeneratorSpec) else GeneratorSpec.from_dict(s)


def parse_group_document(doc: dict) -> list[GeneratorSpec]:
    """Generator list from a ``{"generators": [...]}`` document."""
    if not isinstance(doc, dict) or not isinstance(doc.get("generators"), list):
        raise InvalidInput("group document must be an object with a 'generators' list")
    return [GeneratorSpec.from_dict(g) for g in doc["generators"]]


# ---------------------------------------------------------------------------
# exact element algebras


class _PermAlgebra:
    def __init__(self, n):
        self.n = n
        self.key = ("perm", n)

    def identity(self):
        return tuple(range(self.n))

    def mul(self, a, b):
        return tuple(a[j] for j in b)

    def matrix(self, a):
        m = np.zeros((self.n, self.n))
        m[list(a), list(range(self.n))] = 1.0
        return m

    def label(self, a):
        seen, cycles = set(), []
        for s in range(self.n):
            if s in seen or a[s] == s:
                continue
            c, j = [], s
            while j not in seen:
                seen.add(j)
                c.append(j)
                j = a[j]
            cycles.append("(" + " ".join(map(str, c)) + ")")
        return "".join(cycles) or "()"


class _DiagAlgebra:
    def __init__(self, d):
        self.d = d
        self.key = ("diag", d)

    @staticmethod
    def normalize(ph):
        # projective equality: the first phase is pinned to 0
        return tuple((p - ph[0]) % 1 for p in ph)

    def identity(self):
        return tuple(Fraction(0) for _ in range(self.d))

    def mul(self, a, b):
        return self.normalize(tuple(x + y for x, y in zip(a, b)))

    def matrix(self, a):
        return np.diag(np.exp(2j * np.pi * np.array([float(p) for p in a])))

    def label(self, a):
        return "diag[" + ",".join(str(p) for p in a) + "]"


class _WeylAlgebra:
    """``X^k Z^l`` modulo phases; X|j> = |j+1>, Z|j> = w^j |j>."""

    def __init__(self, n, pauli=False):
        self.n = n
        self.pauli = pauli and n == 2
        self.key = ("weyl", n)

    def identity(self):
        return (0, 0)

    def mul(self, a, b):
        return ((a[0] + b[0]) % self.n, (a[1] + b[1]) % self.n)

    def matrix(self, a):
        n = self.n
        x = np.roll(np.eye(n), 1, axis=0)
        z = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
        return np.linalg.matrix_power(x, a[0]) @ np.linalg.matrix_power(z, a[1])

    def label(self, a):
        if self.pauli:
            return {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}[a]
        return f"X^{a[0]}Z^{a[1]}"


class _ProductAlgebra:
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.key = ("prod", a.key, b.key)

    def identity(self):
        return (self.a.identity(), self.b.identity())

    def mul(self, x, y):
        return (self.a.mul(x[0], y[0]), self.b.mul(x[1], y[1]))

    def matrix(self, x):
        return np.kron(self.a.matrix(x[0]), self.b.matrix(x[1]))

    def label(self, x):
        la, lb = self.a.label(x[0]), self.b.label(x[1])
        if getattr(self.a, "pauli", False) or isinstance(self.a, _ProductAlgebra):
            return la + lb
        return f"({la}, {lb})"


def _lower(spec: GeneratorSpec):
    """Return ``(algebra, [generator elements])`` for one spec."""
    k = spec.kind
    if k == "permutation":
        return _PermAlgebra(len(spec.perm)), [spec.perm]
    if k == "diagonal-unitary":
        alg = _DiagAlgebra(len(spec.phases))
        return alg, [alg.normalize(spec.phases)]
    if k == "cyclic-rotation":
        # exp(i theta sigma_z / 2) equals diag(1, exp(-i theta)) up to phase
        l = spec.order
        alg = _DiagAlgebra(2)
        return alg, [alg.normalize((Fraction(0), Fraction(l - 1, l)))]
    if k in ("weyl", "pauli"):
        return _WeylAlgebra(spec.dim, pauli=(k == "pauli")), [(1, 0), (0, 1)]
    # product
    (alg_a, gens_a), (alg_b, gens_b) = (_lower_list(list(f)) for f in spec.factors)
    alg = _ProductAlgebra(alg_a, alg_b)
    gens = [(x, alg_b.identity()) for x in gens_a] + [(alg_a.identity(), y) for y in gens_b]
    return alg, gens


def _lower_list(specs):
    if not specs:
        return None, []
    alg, gens = None, []
    for s in specs:
        a, gs = _lower(_as_spec(s))
        if alg is None:
            alg = a
        elif a.key != alg.key:
            raise IncompatibleGenerators(
                f"generator {s.kind!r} acts on {a.key}, expected {alg.key}")
        gens.extend(gs)
    return alg, gens


# ---------------------------------------------------------------------------
# group tables


@dataclass(frozen=True, eq=False)
class GroupTable:
    """Abstract finite group.

    Attributes
    ----------
    order : int
        Number of elements ``g``.
    cayley : ndarray of int, shape (g, g)
        ``cayley[a, b]`` is the index of the product ``a b``.
    inverse : ndarray of int, shape (g,)
    element_order : ndarray of int, shape (g,)
    labels : tuple of str
    elements : tuple, optional
        Canonical exact descriptors, present when built by :func:`close_group`.
    """

    order: int
    cayley: np.ndarray
    inverse: np.ndarray
    element_order: np.ndarray
    labels: tuple
    elements: tuple | None = None
    algebra: Any = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("cayley", "inverse", "element_order"):
            arr = np.array(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_cayley(cls, cayley, labels=None, elements=None, algebra=None, check=True):
        """Build and validate a table from a Cayley array alone."""
        c = np.asarray(cayley, dtype=np.int64)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] < 1:
            raise InvalidTable("cayley table must be a non-empty square array")
        g = c.shape[0]
        if check:
            validate_cayley(c)
        inv = np.argmax(c == 0, axis=1)
        orders = _orders(c)
        if labels is None:
            labels = ["e"] + [f"g{i}" for i in range(1, g)]
        return cls(g, c, inv, orders, tuple(labels), elements, algebra)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.cayley, self.cayley.T))

    def power(self, mu: int, r: int) -> int:
        x = 0
        for _ in range(r % int(self.element_order[mu])):
            x = int(self.cayley[x, mu])
        return x

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"GroupTable(order={self.order}, labels={list(self.labels)[:8]}{'...' if self.order > 8 else ''})"


def _orders(c):
    g = c.shape[0]
    orders = np.zeros(g, dtype=np.int64)
    cur = np.arange(g)
    for h in range(1, g + 1):
        hit = (cur == 0) & (orders == 0)
        orders[hit] = h
        if orders.all():
            break
        cur = c[cur, np.arange(g)]
    return orders


def validate_cayley(c: np.ndarray) -> None:
    """Raise :class:`InvalidTable` unless ``c`` is a group multiplication table.

    Associativity is checked exhaustively for ``g <= 64`` and on a fixed
    pseudo-random sample of triples above that.
    """
    g = c.shape[0]
    ar = np.arange(g)
    if c.min() < 0 or c.max() >= g:
        raise InvalidTable("cayley entries out of range")
    if not (np.array_equal(c[0], ar) and np.array_equal(c[:, 0], ar)):
        raise InvalidTable("element 0 is not the identity")
    srt = np.sort(c, axis=1)
    if not np.array_equal(srt, np.broadcast_to(ar, (g, g))):
        raise InvalidTable("a row of the cayley table is not a permutation")
    srt = np.sort(c, axis=0)
    if not np.array_equal(srt, np.broadcast_to(ar[:, None], (g, g))):
        raise InvalidTable("a column of the cayley table is not a permutation")
    if g <= MAX_SUBGROUP_ORDER:
        left = c[c[:, :, None], ar[None, None, :]]  # (ab)c
        right = c[ar[:, None, None], c[None, :, :]]  # a(bc)
        ok = np.array_equal(left, right)
    else:
        rng = np.random.default_rng(0)
        a, b, d = rng.integers(0, g, size=(3, 20000))
        ok = np.array_equal(c[c[a, b], d], c[a, c[b, d]])
    if not ok:
        raise InvalidTable("cayley table is not associative")


def close_group(generators: Sequence[GeneratorSpec | dict]) -> GroupTable:
    """Close a list of generators into a finite group.

    Parameters
    ----------
    generators : sequence of GeneratorSpec or dict
        All entries must act on the same space.  An empty list gives the
        trivial group.

    Returns
    -------
    GroupTable
        With ``elements`` holding the canonical descriptors.

    Raises
    ------
    ClosureOverflow
        More than 4096 elements are reached.
    IncompatibleGenerators
        Generators act on different spaces.
    """
    alg, gens = _lower_list(list(generators))
    if alg is None:
        return GroupTable(1, [[0]], [0], [1], ("e",))
    e = alg.identity()
    index = {e: 0}
    elems = [e]
    queue = deque([e])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = alg.mul(x, s)
            if y not in index:
                if len(elems) >= MAX_ORDER:
                    raise ClosureOverflow(f"closure exceeds {MAX_ORDER} elements")
                index[y] = len(elems)
                elems.append(y)
                queue.append(y)
    g = len(elems)
    # right multiplication by generators gives a word for every element;
    # fill the table row by row from those words
    cayley = np.empty((g, g), dtype=np.int64)
    for i, x in enumerate(elems):
        cayley[i] = [index[alg.mul(x, y)] for y in elems]
    table = GroupTable.from_cayley(
        cayley, labels=[alg.label(x) for x in elems], elements=tuple(elems), algebra=alg,
        check=g <= MAX_SUBGROUP_ORDER)
    return table


def element_order(table: GroupTable, mu: int) -> int:
    """Order ``h_mu`` of element ``mu``."""
    _check_index(table, mu)
    return int(table.element_order[mu])


def cyclic_subgroup(table: GroupTable, mu: int) -> frozenset:
    """Index set ``{mu^r}`` of the cyclic subgroup generated by ``mu``."""
    _check_index(table, mu)
    out, x = {0}, int(mu)
    while x != 0:
        out.add(x)
        x = int(table.cayley[x, mu])
    return frozenset(out)


def _check_index(table, mu):
    if not isinstance(mu, (int, np.integer)) or not 0 <= mu < table.order:
        raise IndexOutOfRange(f"element index {mu!r} outside 0..{table.order - 1}")


@dataclass(frozen=True)
class Subgroup:
    elements: tuple
    order: int
    cyclic: bool


@dataclass(frozen=True)
class SubgroupSet:
    subgroups: tuple

    def orders(self) -> list[int]:
        return sorted(h.order for h in self.subgroups)

    def __iter__(self):
        return iter(self.subgroups)

    def __len__(self):
        return len(self.subgroups)


def _close_mask(c: np.ndarray, mask: np.ndarray) -> np.ndarray:
    while True:
        idx = np.flatnonzero(mask)
        new = mask.copy()
        new[c[np.ix_(idx, idx)].ravel()] = True
        if new.sum() == mask.sum():
            return mask
        mask = new


def enumerate_subgroups(table: GroupTable) -> SubgroupSet:
    """All subgroups of a group of order at most 64.

    Every subgroup is generated by the cyclic subgroups it contains, so the
    lattice is built by joining known subgroups with cyclic ones until no
    new set appears.
    """
    g = table.order
    if g > MAX_SUBGROUP_ORDER:
        raise GroupTooLarge(f"subgroup enumeration is limited to order {MAX_SUBGROUP_ORDER}")
    c = table.cayley
    cyc = {}
    for mu in range(g):
        m = np.zeros(g, bool)
        m[list(cyclic_subgroup(table, mu))] = True
        cyc.setdefault(m.tobytes(), (mu, m))
    gens = list(cyc.values())
    found = {k: m for k, (_, m) in cyc.items()}
    frontier = list(found.values())
    while frontier:
        nxt = []
        for h in frontier:
            for mu, _ in gens:
                if h[mu]:
                    continue
                m = h.copy()
                m[mu] = True
                m = _close_mask(c, m)
                k = m.tobytes()
                if k not in found:
                    found[k] = m
                    nxt.append(m)
        frontier = nxt
    subs = []
    for m in found.values():
        els = tuple(int(i) for i in np.flatnonzero(m))
        h = len(els)
        subs.append(Subgroup(els, h, bool(np.any(table.element_order[list(els)] == h))))
    subs.sort(key=lambda s: (s.order, s.elements))
    return SubgroupSet(tuple(subs))


def regular_matrices(table: GroupTable) -> np.ndarray:
    """Regular permutation matrices, ``R_a[cayley[a, b], b] = 1``."""
    g = table.order
    R = np.zeros((g, g, g))
    a = np.repeat(np.arange(g), g)
    b = np.tile(np.arange(g), g)
    R[a, table.cayley[a, b], b] = 1.0
    return R


def regular_representation(table: GroupTable):
    """Regular representation of ``table`` as a :class:`Representation`."""
    from .channels import Representation

    return Representation(table, regular_matrices(table), "regular")


def direct_product(a: GroupTable, b: GroupTable) -> GroupTable:
    """Direct product; element ``(i, j)`` gets index ``i * b.order + j``."""
    ga, gb = a.order, b.order
    if ga * gb > MAX_ORDER:
        raise ClosureOverflow(f"product order {ga * gb} exceeds {MAX_ORDER}")
    i = np.arange(ga * gb) // gb
    j = np.arange(ga * gb) % gb
    cayley = a.cayley[i[:, None], i[None, :]] * gb + b.cayley[j[:, None], j[None, :]]
    labels = [f"({a.labels[x]}, {b.labels[y]})" for x, y in zip(i, j)]
    elements = alg = None
    if a.elements is not None and b.elements is not None:
        elements = tuple((a.elements[x], b.elements[y]) for x, y in zip(i, j))
        alg = _ProductAlgebra(a.algebra, b.algebra)
    t = GroupTable.from_cayley(cayley, labels, elements, alg, check=False)
    return t

