"""End-to-end acceptance checks, one test per criterion.

Run with ``pytest -v`` to get one pass/fail line per criterion; each test
additionally prints ``criterion N: PASS`` on success.
"""
import itertools
import random
import time
from pathlib import Path

import pytest

from clonelab import fixtures as fx
from clonelab.algebras import (
    FiniteAlgebra,
    TupleFunction,
    interpret,
    is_model,
    satisfies,
    enumerate_algebras,
)
from clonelab.cli import (
    EXIT_OK,
    EXIT_REFUTED,
    Workspace,
    cmd_check_model,
    cmd_check_proof,
    cmd_prove,
)
from clonelab.clones import (
    CloneEqual,
    CloneSeparated,
    check_clone_axioms,
    clone_semantic_consequence,
    end_clone,
    extend_to_clone_hom,
    factor_through_quotient,
    generated_subclone,
    kernel_presentation,
    product_embedding,
    quotient_clone,
    verify_kernel_reconstruction,
)
from clonelab.equational import completeness_witness, free_model, prove_bounded
from clonelab.errors import HypothesisViolated
from clonelab.limits import Limits
from clonelab.proofs import check_proof
from clonelab.terms import Equation, enum_terms, parse_term, subst, used_vars

from _proofgen import random_proofs

FIX = Path(__file__).resolve().parent.parent / "fixtures"
GRP = fx.grp_presentation()
GRP_P = fx.grp_prime_presentation()
GRP_PP = fx.grp_double_prime_presentation()
SL = fx.semilattice_presentation()


def _ok(n):
    print(f"criterion {n}: PASS")


def _eq(pres, n, l, r):
    return Equation(parse_term(pres.signature, n, l),
                    parse_term(pres.signature, n, r))


def test_criterion_01_group_fixtures_check_model():
    ws = Workspace()
    t0 = time.perf_counter()
    for name in ("z2", "z3", "s3"):
        rep = cmd_check_model(ws, str(FIX / "grp.pres"), str(FIX / f"{name}.alg"))
        assert rep.verdict == "model" and rep.exit_code == EXIT_OK
    rep = cmd_check_model(ws, str(FIX / "grp.pres"), str(FIX / "broken.alg"))
    assert rep.verdict == "not-a-model" and rep.exit_code == EXIT_REFUTED
    failed = [e["axiom"] for e in rep.witnesses["per_axiom"] if not e["holds"]]
    assert failed == [0]  # exactly the right-unit axiom
    assert time.perf_counter() - t0 < 1.0
    _ok(1)


def test_criterion_02_derived_theorems_proved_and_rechecked(tmp_path):
    goals = [
        "m(e,x1) = x1 @1",
        "m(i(x1),x1) = e @1",
        "i(i(x1)) = x1 @1",
        "i(m(x1,x2)) = m(i(x2),i(x1)) @2",
    ]
    ws = Workspace()  # default limits
    t0 = time.perf_counter()
    for k, goal in enumerate(goals):
        rep = cmd_prove(ws, str(FIX / "grp.pres"), goal)
        assert rep.verdict == "proved", goal
        script = tmp_path / f"goal{k}.proof"
        script.write_text(rep.witnesses["proof_script"], encoding="utf-8")
        rep2 = cmd_check_proof(ws, str(FIX / "grp.pres"), str(script))
        assert rep2.verdict == "accepted"
        assert rep2.details["conclusion"] == goal.replace("  ", " ")
    assert time.perf_counter() - t0 < 120.0
    _ok(2)


def test_criterion_03_soundness_harness_1000_proofs():
    rng = random.Random(42)
    suites = [
        (GRP, [fx.z2_algebra(), fx.z3_algebra(), fx.s3_algebra()]),
        (SL, [fx.semilattice_algebra()]),
    ]
    for pres, models in suites:
        for proof in random_proofs(rng, pres, 500):
            concl = check_proof(pres, proof)
            for alg in models:
                assert satisfies(alg, concl)
    _ok(3)


def test_criterion_04_completeness_at_desk_scale():
    for n, count in ((1, 1), (2, 3), (3, 7)):
        fm = free_model(SL, n)
        assert fm.complete and fm.class_count() == count
    rng = random.Random(4)
    for _ in range(20):
        n = rng.randint(1, 3)
        pool = enum_terms(SL.signature, n, 5)
        eq = Equation(rng.choice(pool), rng.choice(pool))
        witness = completeness_witness(SL, eq)
        # oracle: semilattice terms denote the nonempty set of used variables
        valid = used_vars(eq.lhs) == used_vars(eq.rhs)
        assert (witness is not None) == valid
        if witness is not None:
            assert check_proof(SL, witness) == eq
    _ok(4)


def test_criterion_05_presentation_equivalence():
    t0 = time.perf_counter()
    for m in (1, 2):
        for alg in enumerate_algebras(GRP.signature, m):
            assert is_model(alg, GRP) == is_model(alg, GRP_P)
    # forgetting ep is a bijection from models of the two-unit presentation
    for m in (1, 2):
        grp_models = {tuple(sorted(a.tables.items()))
                      for a in enumerate_algebras(GRP.signature, m)
                      if is_model(a, GRP)}
        images = []
        for alg in enumerate_algebras(GRP_PP.signature, m):
            if not is_model(alg, GRP_PP):
                continue
            t = dict(alg.tables)
            assert t.pop((0, "ep")) == t[(0, "e")]  # forced by e = ep
            images.append(tuple(sorted(t.items())))
        assert len(images) == len(set(images))      # injective
        assert set(images) == grp_models            # surjective
    assert time.perf_counter() - t0 < 60.0
    _ok(5)


def test_criterion_06_clone_axioms_exhaustive():
    rep2 = check_clone_axioms(end_clone(2, 2))
    assert rep2.ok and rep2.exhaustive
    rep3 = check_clone_axioms(end_clone(3, 1))
    assert rep3.ok and rep3.exhaustive
    assert [len(end_clone(2, 2).carrier(n)) for n in range(3)] == [2, 4, 16]
    assert [len(end_clone(3, 1).carrier(n)) for n in range(2)] == [3, 27]
    _ok(6)


def test_criterion_07_free_clone_universal_property():
    end = end_clone(2, 2)
    sig = GRP.signature
    terms = {n: enum_terms(sig, n, 3) for n in range(3)}
    eta = {(k, s): parse_term(sig, k, s if k == 0 else
                              f"{s}({','.join(f'x{i+1}' for i in range(k))})")
           for k, s in sig.symbols()}
    choices = {key: end.carrier(k) for key in eta for k in [key[0]]}
    keys = list(eta)
    for combo in itertools.product(*(choices[k] for k in keys)):
        f = dict(zip(keys, combo))
        g = extend_to_clone_hom(sig, end, f)
        # g o eta = f
        for (k, s), val in f.items():
            assert g.apply(k, eta[(k, s)]) == val
        # g preserves projections
        for n in range(3):
            for i in range(1, n + 1):
                assert g.apply(n, parse_term(sig, n, f"x{i}")) == end.proj(n, i)
        # g preserves composition on all terms of size <= 3
        for k in range(3):
            for phi in terms[k]:
                for n in range(3):
                    if k > 0 and not terms[n]:
                        continue
                    for thetas in itertools.product(terms[n], repeat=k):
                        lhs = g.apply(n, subst(phi, thetas, n))
                        rhs = end.compose(g.apply(k, phi),
                                          [g.apply(n, t) for t in thetas], n)
                        assert lhs == rhs
        # the special case: g is interpretation in the induced algebra
        alg = FiniteAlgebra(sig, 2, {k: fn.table for k, fn in f.items()})
        for n in range(3):
            for t in terms[n]:
                assert g.apply(n, t).table == interpret(alg, t).table
    _ok(7)


def test_criterion_08_quotient_universal_property():
    lim = Limits(max_term_size=7)
    for alg in (fx.z2_algebra(), fx.z3_algebra()):
        m = alg.carrier_size
        end = end_clone(m, 2)
        f = {(k, s): TupleFunction(k, m, alg.table(s, k))
             for k, s in GRP.signature.symbols()}
        g = extend_to_clone_hom(GRP.signature, end, f)
        h = factor_through_quotient(GRP, g, lim)
        q = h.source
        for n in range(3):
            for t in enum_terms(GRP.signature, n, 4):
                assert h.apply(n, q.rep_of(t)) == g.apply(n, t)
    broken = fx.broken_algebra()
    fb = {(k, s): TupleFunction(k, 2, broken.table(s, k))
          for k, s in GRP.signature.symbols()}
    gb = extend_to_clone_hom(GRP.signature, end_clone(2, 2), fb)
    with pytest.raises(HypothesisViolated) as exc:
        factor_through_quotient(GRP, gb, lim)
    assert exc.value.axiom_index == 0
    _ok(8)


def test_criterion_09_clone_semantics_matches_derivability():
    lim = Limits(max_term_size=7)
    fixtures = [fx.z2_algebra(), fx.z3_algebra(), fx.s3_algebra()]
    rng = random.Random(9)
    pools = {n: enum_terms(GRP.signature, n, 5) for n in (1, 2)}
    for _ in range(30):
        n = rng.choice((1, 2))
        eq = Equation(rng.choice(pools[n]), rng.choice(pools[n]))
        verdict = clone_semantic_consequence(GRP, eq, lim, fixtures=fixtures)
        proof = prove_bounded(GRP, eq, lim)
        assert isinstance(verdict, CloneEqual) == (proof is not None)
        if isinstance(verdict, CloneEqual):
            assert check_proof(GRP, verdict.proof) == eq
        if isinstance(verdict, CloneSeparated):
            cert = verdict.certificate
            if cert.kind == "model":
                assert is_model(cert.algebra, GRP)
                lt = interpret(cert.algebra, eq.lhs)
                rt = interpret(cert.algebra, eq.rhs)
                assert lt.apply(cert.witness) != rt.apply(cert.witness)
            else:
                fm = free_model(GRP, eq.context, lim)
                assert fm.complete
                assert cert.lhs_class != cert.rhs_class
    _ok(9)


def _criterion_10_clones():
    proj_only = generated_subclone(2, [], arity_cap=2)
    q = quotient_clone(SL, Limits(max_term_size=7))
    return proj_only, q


def test_criterion_10_kernel_reconstruction():
    for clone in _criterion_10_clones():
        kp = kernel_presentation(clone, arity_cap=2)
        assert verify_kernel_reconstruction(clone, kp, arity_cap=2)
    _ok(10)


def test_criterion_11_bounded_product_embedding():
    for clone in _criterion_10_clones():
        emb = product_embedding(clone, arity_cap=2)
        assert emb.injective_at == {0: True, 1: True, 2: True}
        assert not emb.collisions
    _ok(11)
