import itertools
import random

import pytest

from clonelab import fixtures as fx
from clonelab.algebras import interpret
from clonelab.equational import (
    FreeModel,
    TheoremSet,
    completeness_witness,
    eval_in_free_model,
    free_model,
    prove_bounded,
    saturate_theorems,
)
from clonelab.errors import IncompleteFreeModel
from clonelab.limits import Limits
from clonelab.proofs import check_proof
from clonelab.terms import Equation, enum_terms, parse_term, print_term, subst, used_vars

GRP = fx.grp_presentation()
SL = fx.semilattice_presentation()
SMALL = Limits(max_term_size=7)


def _eq(pres, n, l, r):
    return Equation(parse_term(pres.signature, n, l),
                    parse_term(pres.signature, n, r))


# --- theorem sets -----------------------------------------------------------


def test_theorem_set_contains_commutativity():
    ts = saturate_theorems(SL, 2, SMALL)
    assert _eq(SL, 2, "m(x1,x2)", "m(x2,x1)") in ts
    assert _eq(SL, 2, "m(x1,m(x1,x2))", "m(x1,x2)") in ts
    assert _eq(SL, 2, "x1", "x2") not in ts
    assert _eq(SL, 1, "x1", "x1") not in ts  # wrong context


def test_theorem_set_is_sym_closed_and_reflexive():
    ts = saturate_theorems(SL, 2, Limits(max_term_size=5))
    for eq in ts.equations:
        assert eq.flipped() in ts.equations
    for t in enum_terms(SL.signature, 2, 5):
        assert Equation(t, t) in ts.equations


def test_theorem_set_closed_under_axiom_instances():
    ts = saturate_theorems(SL, 2, SMALL)
    args_pool = enum_terms(SL.signature, 2, 3)
    for axm in SL.axioms:
        for args in itertools.product(args_pool, repeat=axm.context):
            inst = Equation(subst(axm.lhs, args), subst(axm.rhs, args))
            if max(inst.lhs.size, inst.rhs.size) <= ts.max_term_size:
                assert inst in ts


def test_saturate_verifies_extracted_proofs():
    # verify=True re-checks every canonical link; just exercise it
    ts = saturate_theorems(GRP, 1, Limits(max_term_size=5), verify=True)
    assert isinstance(ts, TheoremSet)


# --- free models ------------------------------------------------------------


def test_semilattice_free_models_exact():
    expected = {
        1: ["x1"],
        2: ["x1", "x2", "m(x1,x2)"],
        3: ["x1", "x2", "x3", "m(x1,x2)", "m(x1,x3)", "m(x2,x3)",
            "m(x1,m(x2,x3))"],
    }
    for n, reps in expected.items():
        fm = free_model(SL, n)
        assert fm.complete
        assert [print_term(r) for r in fm.class_reps] == reps


def test_free_model_classes_are_subset_normal_forms():
    # oracle: a semilattice term's class is the set of variables it uses
    fm = free_model(SL, 3)
    for c, members in enumerate(fm.classes):
        vars_seen = {used_vars(fm.universe[i]) for i in members}
        assert len(vars_seen) == 1
    sets = [used_vars(r) for r in fm.class_reps]
    assert len(set(sets)) == 7  # all nonempty subsets of {1,2,3}


def test_grp_free_model_incomplete_at_small_budget():
    fm = free_model(GRP, 1, SMALL)
    assert not fm.complete
    assert fm.tables is None
    assert fm.class_count() == 156
    with pytest.raises(IncompleteFreeModel):
        eval_in_free_model(fm, parse_term(GRP.signature, 1, "x1"), [0])


def test_eval_in_free_model_agrees_with_class_of():
    fm = free_model(SL, 2)
    gens = fm.generator_classes()
    for t in enum_terms(SL.signature, 2, 5):
        assert eval_in_free_model(fm, t, gens) == fm.class_of(t)


def test_free_model_universal_property():
    """Any assignment of the generators into a model factors through the
    class map: evaluation is constant on classes."""
    fm = free_model(SL, 2)
    alg = fx.semilattice_algebra()
    for assign in itertools.product(range(2), repeat=2):
        for members in fm.classes:
            values = {interpret(alg, fm.universe[i]).apply(assign)
                      for i in members[:20]}
            assert len(values) == 1


# --- bounded proof search ---------------------------------------------------


def test_prove_left_unit_and_check():
    goal = _eq(GRP, 1, "m(e,x1)", "x1")
    p = prove_bounded(GRP, goal, Limits(max_term_size=9))
    assert p is not None
    assert check_proof(GRP, p) == goal


def test_prove_underivable_returns_none():
    assert prove_bounded(GRP, _eq(GRP, 1, "x1", "e"), SMALL) is None


def test_prove_trivial_goal_is_refl():
    p = prove_bounded(GRP, _eq(GRP, 1, "x1", "x1"), SMALL)
    assert p.rule == "Refl"


def test_completeness_witness_semilattice():
    rng = random.Random(11)
    pool = enum_terms(SL.signature, 2, 5)
    for _ in range(15):
        eq = Equation(rng.choice(pool), rng.choice(pool))
        witness = completeness_witness(SL, eq)
        valid = used_vars(eq.lhs) == used_vars(eq.rhs)
        assert (witness is not None) == valid
        if witness is not None:
            assert check_proof(SL, witness) == eq


def test_completeness_witness_needs_complete_model():
    with pytest.raises(IncompleteFreeModel):
        completeness_witness(GRP, _eq(GRP, 1, "x1", "x1"), SMALL)
