import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupaccess import (
    GeneratorSpec,
    GroupTable,
    close_group,
    cyclic_subgroup,
    direct_product,
    element_order,
    enumerate_subgroups,
    regular_representation,
)
from groupaccess.builtins import BUILTIN_NAMES, builtin_table
from groupaccess.errors import (
    ClosureOverflow,
    GroupTooLarge,
    IncompatibleGenerators,
    IndexOutOfRange,
    InvalidInput,
    InvalidTable,
)
from groupaccess.groups import parse_group_document, regular_matrices, validate_cayley

D = GeneratorSpec.diagonal


def _is_group_table(t):
    g = t.order
    c = t.cayley
    assert np.array_equal(c[0], np.arange(g)) and np.array_equal(c[:, 0], np.arange(g))
    for row in c:
        assert sorted(row) == list(range(g))
    for col in c.T:
        assert sorted(col) == list(range(g))
    assert np.all(c[np.arange(g), t.inverse] == 0)
    for mu in range(g):
        h = int(t.element_order[mu])
        assert g % h == 0
        assert t.power(mu, h) == 0
        assert all(t.power(mu, r) != 0 for r in range(1, h))


def test_close_group_examples():
    t = close_group([D(["0", "1/2"])])
    assert t.order == 2
    assert close_group([]).order == 1
    w3 = close_group([GeneratorSpec.weyl(3)])
    assert w3.order == 9
    order3 = [s for s in enumerate_subgroups(w3) if s.order == 3]
    assert len(order3) == 4 and all(s.cyclic for s in order3)


def test_projective_normalization():
    # diag(i, -i) equals diag(1, -1) up to a phase
    a = close_group([D(["1/4", "3/4"])])
    b = close_group([D(["0", "1/2"])])
    assert a.order == b.order == 2
    assert a.elements == b.elements


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_tables_are_groups(name):
    _is_group_table(builtin_table(name))


def test_builtin_orders():
    orders = {"trivial": 1, "z2": 2, "z3": 3, "z5": 5, "z7": 7, "z4-independent": 4,
              "z4-nonregular": 4, "noncyclic4": 4, "pauli": 4, "s3": 6, "weyl-3": 9,
              "weyl-5": 25, "pauli-tensor-2": 16}
    for name, g in orders.items():
        assert builtin_table(name).order == g, name


def test_element_orders():
    z4 = builtin_table("z4")
    assert element_order(z4, 0) == 1
    gen = 1
    assert element_order(z4, gen) == 4
    assert element_order(z4, z4.power(gen, 2)) == 2
    pauli = builtin_table("pauli")
    assert [element_order(pauli, mu) for mu in range(1, 4)] == [2, 2, 2]
    with pytest.raises(IndexOutOfRange):
        element_order(z4, 4)
    with pytest.raises(IndexOutOfRange):
        element_order(z4, -1)


def test_subgroup_examples():
    assert enumerate_subgroups(builtin_table("z3")).orders() == [1, 3]
    assert enumerate_subgroups(builtin_table("noncyclic4")).orders() == [1, 2, 2, 2, 4]
    assert enumerate_subgroups(builtin_table("z4")).orders() == [1, 2, 4]
    # S_3: trivial, three of order 2, A_3, whole group
    assert enumerate_subgroups(builtin_table("s3")).orders() == [1, 2, 2, 2, 3, 6]


def test_subgroups_closed():
    for name in ("s3", "pauli-tensor-2", "weyl-3", "z6"):
        t = builtin_table(name)
        for s in enumerate_subgroups(t):
            els = set(s.elements)
            assert 0 in els
            assert all(int(t.cayley[a, b]) in els for a in els for b in els)
            assert all(int(t.inverse[a]) in els for a in els)
            assert s.cyclic == any(t.element_order[a] == s.order for a in els)


def test_subgroup_limit():
    big = close_group([GeneratorSpec.rotation(65)])
    with pytest.raises(GroupTooLarge):
        enumerate_subgroups(big)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_weyl_prime_subgroup_orders(n):
    t = close_group([GeneratorSpec.weyl(n)])
    assert sorted(set(enumerate_subgroups(t).orders())) == [1, n, n * n]
    # N + 1 subgroups of order N for prime N
    assert enumerate_subgroups(t).orders().count(n) == n + 1


def test_cyclic_subgroup():
    z4 = builtin_table("z4")
    assert cyclic_subgroup(z4, 0) == frozenset({0})
    assert cyclic_subgroup(z4, 1) == frozenset(range(4))
    sq = z4.power(1, 2)
    assert cyclic_subgroup(z4, sq) == frozenset({0, sq})
    with pytest.raises(IndexOutOfRange):
        cyclic_subgroup(z4, 9)


@pytest.mark.parametrize("name", ["s3", "weyl-3", "pauli-tensor-2", "z6", "noncyclic4"])
def test_cyclic_subgroups_in_lattice(name):
    t = builtin_table(name)
    subs = {frozenset(s.elements) for s in enumerate_subgroups(t)}
    for mu in range(t.order):
        c = cyclic_subgroup(t, mu)
        assert len(c) == element_order(t, mu)
        assert c in subs


def test_regular_representation_examples():
    z2 = builtin_table("z2")
    R = regular_representation(z2).matrices
    assert np.array_equal(R[1], [[0, 1], [1, 0]])
    z3 = builtin_table("z3")
    R1 = regular_matrices(z3)[1]
    # a cyclic shift: a permutation matrix without fixed points, cube is identity
    assert np.trace(R1) == 0
    assert np.array_equal(np.linalg.matrix_power(R1, 3), np.eye(3))
    z4 = builtin_table("z4")
    R = regular_matrices(z4)
    gram = np.einsum("aij,bij->ab", R, R)
    assert np.array_equal(gram, 4 * np.eye(4))


@pytest.mark.parametrize("name", ["s3", "weyl-3", "z5", "pauli-tensor-2"])
def test_regular_homomorphism_exact(name):
    t = builtin_table(name)
    R = regular_matrices(t)
    for a, b in itertools.product(range(t.order), repeat=2):
        assert np.array_equal(R[t.cayley[a, b]], R[a] @ R[b])


def test_direct_product():
    z2 = builtin_table("z2")
    v4 = direct_product(z2, z2)
    assert v4.order == 4 and v4.is_abelian()
    assert enumerate_subgroups(v4).orders() == [1, 2, 2, 2, 4]
    assert list(v4.element_order) == [1, 2, 2, 2]
    s3 = builtin_table("s3")
    triv = builtin_table("trivial")
    p = direct_product(s3, triv)
    assert np.array_equal(p.cayley, s3.cayley)
    pp = direct_product(builtin_table("pauli"), builtin_table("pauli"))
    assert pp.order == 16
    assert set(enumerate_subgroups(pp).orders()) <= {1, 2, 4, 8, 16}


def test_direct_product_element_orders():
    a, b = builtin_table("z3"), builtin_table("z4")
    p = direct_product(a, b)
    for i in range(a.order):
        for j in range(b.order):
            k = i * b.order + j
            assert p.element_order[k] == math.lcm(int(a.element_order[i]), int(b.element_order[j]))


def test_closure_errors():
    with pytest.raises(IncompatibleGenerators):
        close_group([D(["0", "1/2"]), D(["0", "1/2", "1/4"])])
    with pytest.raises(IncompatibleGenerators):
        close_group([GeneratorSpec.permutation([1, 0]), GeneratorSpec.weyl(2)])
    with pytest.raises(ClosureOverflow):
        close_group([GeneratorSpec.rotation(5000)])
    with pytest.raises(ClosureOverflow):
        direct_product(close_group([GeneratorSpec.rotation(100)]),
                       close_group([GeneratorSpec.rotation(100)]))


def test_bad_tables():
    with pytest.raises(InvalidTable):
        validate_cayley(np.array([[0, 1], [1, 1]]))
    with pytest.raises(InvalidTable):
        GroupTable.from_cayley(np.zeros((2, 3), int))
    # Latin square that is not associative
    nonassoc = np.array([[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3],
                         [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]])
    with pytest.raises(InvalidTable):
        validate_cayley(nonassoc)


def test_group_document_round_trip():
    specs = [D(["0", "1/2", "1/4"]), GeneratorSpec.permutation([1, 2, 0]), GeneratorSpec.weyl(3),
             GeneratorSpec.rotation(5),
             GeneratorSpec.product([GeneratorSpec.pauli()], [GeneratorSpec.pauli()])]
    doc = json.loads(json.dumps({"generators": [s.to_dict() for s in specs]}))
    assert parse_group_document(doc) == specs


@pytest.mark.parametrize("doc", [
    {}, {"generators": 3}, {"generators": [{"perm": [0]}]},
    {"generators": [{"kind": "unknown"}]}, {"generators": [{"kind": "permutation"}]},
    {"generators": [{"kind": "diagonal-unitary", "phases": ["1/0"]}]},
    {"generators": [{"kind": "permutation", "perm": [0, 0]}]},
])
def test_group_document_errors(doc):
    with pytest.raises(InvalidInput):
        specs = parse_group_document(doc)
        close_group(specs)


@settings(max_examples=40, deadline=None)
@given(st.permutations(list(range(5))), st.permutations(list(range(5))))
def test_permutation_closure_property(p, q):
    t = close_group([GeneratorSpec.permutation(p), GeneratorSpec.permutation(q)])
    _is_group_table(t)
    assert 120 % t.order == 0
    R = regular_matrices(t)
    assert np.array_equal(np.einsum("aij,bij->ab", R, R), t.order * np.eye(t.order))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 11), min_size=2, max_size=4))
def test_diagonal_closure_property(nums):
    phases = [f"{k}/12" for k in nums]
    t = close_group([D(phases)])
    _is_group_table(t)
    assert t.is_abelian()
    # cyclic: some element generates the group
    assert max(t.element_order) == t.order
