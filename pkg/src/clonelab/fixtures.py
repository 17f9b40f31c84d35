"""Shared example presentations and finite algebras used by tests and docs.

All fixtures are deterministic values: group presentations in three
axiomatizations, a semilattice presentation, and small concrete models
(Z2, Z3, the symmetric group on three points, the two-element meet
semilattice) plus a deliberately broken non-model.
"""
from __future__ import annotations

import itertools
from typing import Dict, Tuple

from .algebras import FiniteAlgebra
from .terms import Equation, Presentation, Signature, parse_term

GRP_SIG = Signature.of({0: ["e"], 1: ["i"], 2: ["m"]})
GRP2_SIG = Signature.of({0: ["e", "ep"], 1: ["i"], 2: ["m"]})
SEMILATTICE_SIG = Signature.of({2: ["m"]})


def _eq(sig: Signature, n: int, lhs: str, rhs: str) -> Equation:
    return Equation(parse_term(sig, n, lhs), parse_term(sig, n, rhs))


def grp_presentation() -> Presentation:
    """Groups: right unit, right inverse, associativity."""
    s = GRP_SIG
    return Presentation(s, (
        _eq(s, 1, "m(x1,e)", "x1"),
        _eq(s, 1, "m(x1,i(x1))", "e"),
        _eq(s, 3, "m(m(x1,x2),x3)", "m(x1,m(x2,x3))"),
    ), name="grp")


def grp_prime_presentation() -> Presentation:
    """Groups again, with the redundant left unit and left inverse added."""
    s = GRP_SIG
    return Presentation(s, (
        _eq(s, 1, "m(x1,e)", "x1"),
        _eq(s, 1, "m(e,x1)", "x1"),
        _eq(s, 1, "m(x1,i(x1))", "e"),
        _eq(s, 1, "m(i(x1),x1)", "e"),
        _eq(s, 3, "m(m(x1,x2),x3)", "m(x1,m(x2,x3))"),
    ), name="grpPrime")


def grp_double_prime_presentation() -> Presentation:
    """Groups with a second unit symbol ep forced equal to e."""
    s = GRP2_SIG
    return Presentation(s, (
        _eq(s, 0, "e", "ep"),
        _eq(s, 1, "m(x1,e)", "x1"),
        _eq(s, 1, "m(x1,i(x1))", "e"),
        _eq(s, 3, "m(m(x1,x2),x3)", "m(x1,m(x2,x3))"),
    ), name="grpDoublePrime")


def semilattice_presentation() -> Presentation:
    s = SEMILATTICE_SIG
    return Presentation(s, (
        _eq(s, 3, "m(m(x1,x2),x3)", "m(x1,m(x2,x3))"),
        _eq(s, 2, "m(x1,x2)", "m(x2,x1)"),
        _eq(s, 1, "m(x1,x1)", "x1"),
    ), name="semilattice")


def _cyclic(m: int, name: str) -> FiniteAlgebra:
    tables = {
        (0, "e"): (0,),
        (1, "i"): tuple((-a) % m for a in range(m)),
        (2, "m"): tuple((a + b) % m for a in range(m) for b in range(m)),
    }
    return FiniteAlgebra(GRP_SIG, m, tables, name=name)


def z2_algebra() -> FiniteAlgebra:
    """The two-element group: addition mod 2 (exclusive or)."""
    return _cyclic(2, "z2")


def z3_algebra() -> FiniteAlgebra:
    return _cyclic(3, "z3")


_S3_PERMS: Tuple[Tuple[int, ...], ...] = tuple(
    sorted(itertools.permutations(range(3)))
)


def s3_algebra() -> FiniteAlgebra:
    """The symmetric group on three points; elements are the six
    permutations in lexicographic order, composition applies the right
    factor first."""
    perms = _S3_PERMS
    index = {p: i for i, p in enumerate(perms)}

    def compose(a, b):
        return tuple(a[b[x]] for x in range(3))

    def invert(a):
        out = [0, 0, 0]
        for x in range(3):
            out[a[x]] = x
        return tuple(out)

    tables = {
        (0, "e"): (index[(0, 1, 2)],),
        (1, "i"): tuple(index[invert(p)] for p in perms),
        (2, "m"): tuple(index[compose(a, b)] for a in perms for b in perms),
    }
    return FiniteAlgebra(GRP_SIG, 6, tables, name="s3")


def semilattice_algebra() -> FiniteAlgebra:
    """Meet on {0, 1}: the two-element semilattice."""
    return FiniteAlgebra(SEMILATTICE_SIG, 2,
                         {(2, "m"): (0, 0, 0, 1)}, name="meet2")


def broken_algebra() -> FiniteAlgebra:
    """Not a group: m is constantly 0, so the unit axiom fails at 1."""
    tables = {
        (0, "e"): (0,),
        (1, "i"): (0, 1),
        (2, "m"): (0, 0, 0, 0),
    }
    return FiniteAlgebra(GRP_SIG, 2, tables, name="broken")


def group_fixtures() -> Dict[str, FiniteAlgebra]:
    return {"z2": z2_algebra(), "z3": z3_algebra(), "s3": s3_algebra()}
