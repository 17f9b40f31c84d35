import random

import pytest

from clonelab import fixtures as fx
from clonelab.algebras import satisfies
from clonelab.errors import ContextMismatch, InvalidAxiom, RuleMismatch
from clonelab.proofs import (
    Proof,
    TRANS,
    ax,
    check_proof,
    cong,
    refl,
    sym,
    trans,
    trans_chain,
)
from clonelab.terms import Equation, parse_term

from _proofgen import random_proofs

GRP = fx.grp_presentation()
SL = fx.semilattice_presentation()


def _t(n, text, pres=GRP):
    return parse_term(pres.signature, n, text)


def test_axiom_and_refl_accepted():
    assert check_proof(GRP, ax(GRP.axioms[0])) == GRP.axioms[0]
    t = _t(1, "m(x1,i(x1))")
    assert check_proof(GRP, refl(t)) == Equation(t, t)


def test_non_axiom_rejected():
    bogus = Equation(_t(1, "x1"), _t(1, "e"))
    with pytest.raises(InvalidAxiom):
        check_proof(GRP, ax(bogus))


def test_sym_trans_shapes():
    p = ax(GRP.axioms[0])                      # m(x1,e) = x1
    q = sym(p)                                 # x1 = m(x1,e)
    assert check_proof(GRP, trans(p, q)) == Equation(_t(1, "m(x1,e)"),
                                                     _t(1, "m(x1,e)"))
    # swapped premises no longer share the middle term
    bad = Proof(TRANS, Equation(_t(1, "x1"), _t(1, "m(x1,e)")), (q, p))
    with pytest.raises(RuleMismatch) as exc:
        check_proof(GRP, bad)
    assert exc.value.path == ()


def test_error_path_points_into_the_tree():
    bogus = ax(Equation(_t(1, "x1"), _t(1, "e")))
    nested = trans(sym(sym(ax(GRP.axioms[0]))), sym(bogus))
    with pytest.raises(InvalidAxiom) as exc:
        check_proof(GRP, nested)
    assert exc.value.path == (1, 0)


def test_cong_substitution_instance():
    # instantiate the right-unit axiom at x1 := i(x1)
    p = cong(GRP.axioms[0].lhs, GRP.axioms[0].rhs, ax(GRP.axioms[0]),
             [refl(_t(1, "i(x1)"))])
    assert check_proof(GRP, p) == Equation(_t(1, "m(i(x1),e)"), _t(1, "i(x1)"))


def test_cong_nullary_context_shift():
    gdp = fx.grp_double_prime_presentation()
    e_ep = gdp.axioms[0]
    p = cong(e_ep.lhs, e_ep.rhs, ax(e_ep), [], context=2)
    concl = check_proof(gdp, p)
    assert concl.context == 2
    assert concl == Equation(parse_term(gdp.signature, 2, "e"),
                             parse_term(gdp.signature, 2, "ep"))


def test_cong_premise_count_enforced():
    p = Proof("Cong", Equation(_t(1, "m(x1,e)"), _t(1, "x1")),
              (ax(GRP.axioms[0]),), GRP.axioms[0].lhs, GRP.axioms[0].rhs)
    with pytest.raises(RuleMismatch):
        check_proof(GRP, p)


def test_cong_mixed_argument_contexts_rejected():
    p = Proof(
        "Cong",
        Equation(_t(2, "m(x1,e)"), _t(2, "x1")),
        (ax(GRP.axioms[0]), refl(_t(2, "x1"))),
        GRP.axioms[0].lhs, GRP.axioms[0].rhs,
    )
    # hand-built node whose stored conclusion doesn't match the premise context
    bad = Proof("Trans", Equation(_t(2, "m(x1,e)"), _t(2, "x1")),
                (p, refl(_t(1, "x1"))))
    with pytest.raises((ContextMismatch, RuleMismatch)):
        check_proof(GRP, bad)


def test_trans_chain_balanced():
    p = ax(GRP.axioms[0])
    chain = trans_chain([p, sym(p), p, sym(p), p])
    concl = check_proof(GRP, chain)
    assert concl == GRP.axioms[0]
    with pytest.raises(ValueError):
        trans_chain([])


def test_shared_subtrees_checked_once():
    p = ax(GRP.axioms[0])
    big = p
    for _ in range(200):
        big = trans(big, trans(sym(big), big))
    # exponential node count as a tree; linear as a DAG
    assert check_proof(GRP, big) == GRP.axioms[0]


def test_random_accepted_proofs_are_sound():
    rng = random.Random(20260823)
    fixtures = {id(GRP): [fx.z2_algebra(), fx.s3_algebra()],
                id(SL): [fx.semilattice_algebra()]}
    for pres in (GRP, SL):
        for proof in random_proofs(rng, pres, 120):
            concl = check_proof(pres, proof)
            for alg in fixtures[id(pres)]:
                assert satisfies(alg, concl)
