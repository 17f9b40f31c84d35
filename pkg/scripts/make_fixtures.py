#!/usr/bin/env python3
"""Regenerate the golden fixture files under fixtures/ from the canonical
in-library definitions.  Run from anywhere; writes relative to the repo root.
"""
from __future__ import annotations

from pathlib import Path

from clonelab import fixtures as fx
from clonelab.clones import TupleFunction, generated_subclone
from clonelab.equational import prove_bounded
from clonelab.formats import (
    serialize_algebra,
    serialize_explicit_clone,
    serialize_presentation,
    serialize_proof,
)
from clonelab.limits import Limits
from clonelab.terms import Equation, parse_term

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures"


def main() -> None:
    OUT.mkdir(exist_ok=True)
    presentations = {
        "grp": fx.grp_presentation(),
        "grpPrime": fx.grp_prime_presentation(),
        "grpDoublePrime": fx.grp_double_prime_presentation(),
        "semilattice": fx.semilattice_presentation(),
    }
    for name, pres in presentations.items():
        (OUT / f"{name}.pres").write_text(serialize_presentation(pres),
                                          encoding="utf-8")
    algebras = {
        "z2": fx.z2_algebra(),
        "z3": fx.z3_algebra(),
        "s3": fx.s3_algebra(),
        "meet2": fx.semilattice_algebra(),
        "broken": fx.broken_algebra(),
    }
    for name, alg in algebras.items():
        (OUT / f"{name}.alg").write_text(serialize_algebra(alg),
                                         encoding="utf-8")

    # a known-good sample proof: the left-unit law over grp
    grp = presentations["grp"]
    goal = Equation(parse_term(grp.signature, 1, "m(e,x1)"),
                    parse_term(grp.signature, 1, "x1"))
    proof = prove_bounded(grp, goal, Limits(max_term_size=9))
    assert proof is not None
    (OUT / "left_unit.proof").write_text(serialize_proof(proof, grp),
                                         encoding="utf-8")

    # explicit clone files: projections-only on {0,1}, and the xor-generated
    # subclone of End(2)
    proj_only = generated_subclone(2, [], arity_cap=2)
    (OUT / "proj2.clone").write_text(serialize_explicit_clone(proj_only),
                                     encoding="utf-8")
    xor = TupleFunction(2, 2, (0, 1, 1, 0))
    (OUT / "xor2.clone").write_text(
        serialize_explicit_clone(generated_subclone(2, [xor], arity_cap=2)),
        encoding="utf-8")
    print(f"wrote fixtures to {OUT}")


if __name__ == "__main__":
    main()
