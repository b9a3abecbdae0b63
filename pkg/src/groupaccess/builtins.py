"""Named groups with fixed unitary realizations.

===================  ==========================================================
name                 realization
===================  ==========================================================
trivial              identity only
z2 .. z7             qubit rotations ``exp(i theta_j sigma_z / 2)``, regular polygons
                     (z2 is ``diag(1, -1)``)
z4-dependent         alias of z4: ``diag(1, i)``, a square
z4-independent       qutrit ``diag(1, -1, i)``, regular tetrahedron
z4-nonregular        ``diag(1, 1, i, -i)``, non-regular tetrahedron
noncyclic4           qutrit ``diag(1, 1, -1)`` and ``diag(1, -1, 1)``
pauli                qubit Pauli channels
weyl-N               Weyl channels ``X^k Z^l`` in dimension N
s3, birkhoff3        3x3 permutation matrices (classical representation)
pauli-tensor-K       K-fold tensor product of Pauli channels
===================  ==========================================================
"""
from __future__ import annotations

import re
from functools import lru_cache

from .channels import Representation, realize
from .errors import InvalidInput
from .groups import GeneratorSpec, GroupTable

FIXED = ("trivial", "z2", "z3", "z4", "z5", "z6", "z7", "z4-dependent", "z4-independent",
         "z4-nonregular", "noncyclic4", "pauli", "s3", "birkhoff3")
# representative instances of the parameterized families
BUILTIN_NAMES = FIXED + ("weyl-2", "weyl-3", "weyl-5", "pauli-tensor-2")


def builtin_specs(name: str) -> tuple[list[GeneratorSpec], str | None]:
    """Generators and representation kind of a builtin group."""
    D = GeneratorSpec.diagonal
    m = re.fullmatch(r"z([2-7])", name)
    if m:
        return [GeneratorSpec.rotation(int(m.group(1)))], None
    if name == "trivial":
        return [], None
    if name == "z4-dependent":
        return [D(["0", "1/4"])], None
    if name == "z4-independent":
        return [D(["0", "1/2", "1/4"])], None
    if name == "z4-nonregular":
        return [D(["0", "0", "1/4", "3/4"])], None
    if name == "noncyclic4":
        return [D(["0", "0", "1/2"]), D(["0", "1/2", "0"])], None
    if name == "pauli":
        return [GeneratorSpec.pauli()], None
    if name in ("s3", "birkhoff3"):
        return [GeneratorSpec.permutation([1, 0, 2]), GeneratorSpec.permutation([1, 2, 0])], \
            "classical-permutation"
    m = re.fullmatch(r"weyl-(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 2:
            raise InvalidInput("weyl-N needs N >= 2")
        return [GeneratorSpec.weyl(n)], None
    m = re.fullmatch(r"pauli-tensor-(\d+)", name)
    if m:
        k = int(m.group(1))
        if k < 1:
            raise InvalidInput("pauli-tensor-K needs K >= 1")
        spec = GeneratorSpec.pauli()
        for _ in range(k - 1):
            spec = GeneratorSpec.product([GeneratorSpec.pauli()], [spec])
        return [spec], None
    raise InvalidInput(f"unknown builtin group {name!r}")


@lru_cache(maxsize=64)
def builtin_representation(name: str) -> Representation:
    specs, kind = builtin_specs(name)
    return realize(specs, kind=kind)


def builtin_table(name: str) -> GroupTable:
    return builtin_representation(name).group


def analytic_ratio(name: str) -> float | None:
    """Closed-form accessible volume fraction of a builtin, if one is known."""
    from . import geometry as geo

    m = re.fullmatch(r"z([3-7])", name)
    if m:
        return geo.polygon_ratio(int(m.group(1)))
    if name == "z4-dependent":
        return geo.polygon_ratio(4)
    if name == "z2":
        return geo.z2n_ratio(1)
    if name in ("z4-independent", "z4-nonregular"):
        return geo.z4_cyclic_ratio()
    if name in ("noncyclic4", "pauli"):
        return geo.noncyclic4_ratio()
    m = re.fullmatch(r"pauli-tensor-(\d+)", name)
    if m and 2 * int(m.group(1)) <= 8:
        return geo.z2n_ratio(2 * int(m.group(1)))
    return None


# Monte Carlo reference for B_3 (no closed form is known)
REFERENCE_FRACTIONS = {"birkhoff3": (0.04398, 0.00004), "s3": (0.04398, 0.00004)}
