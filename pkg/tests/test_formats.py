import pytest

from clonelab import fixtures as fx
from clonelab.clones import TupleFunction, generated_subclone
from clonelab.equational import prove_bounded
from clonelab.errors import FormatError
from clonelab.formats import (
    parse_algebra,
    parse_explicit_clone,
    parse_presentation,
    parse_proof,
    serialize_algebra,
    serialize_explicit_clone,
    serialize_presentation,
    serialize_proof,
)
from clonelab.limits import Limits
from clonelab.proofs import check_proof
from clonelab.terms import Equation, parse_term

GRP = fx.grp_presentation()


@pytest.mark.parametrize("pres", [
    fx.grp_presentation(), fx.grp_prime_presentation(),
    fx.grp_double_prime_presentation(), fx.semilattice_presentation(),
])
def test_presentation_round_trip(pres):
    back = parse_presentation(serialize_presentation(pres), name=pres.name)
    assert back.signature == pres.signature
    assert back.axioms == pres.axioms


def test_presentation_comments_and_blank_lines():
    text = "# a group\n\nsig e 0  # the unit\nsig m 2\naxiom @1 m(x1,e) = x1\n"
    pres = parse_presentation(text)
    assert len(pres.axioms) == 1
    assert pres.signature.has("m", 2)


@pytest.mark.parametrize("bad,line", [
    ("sig e\n", 1),
    ("sig e zero\n", 1),
    ("sig m 2\naxiom m(x1,x2) = x1\n", 2),
    ("garbage here\n", 1),
    ("sig m 2\naxiom @1 m(x1) = x1\n", 2),
])
def test_presentation_errors_carry_line_numbers(bad, line):
    with pytest.raises(FormatError) as exc:
        parse_presentation(bad)
    assert f"line {line}:" in str(exc.value)


@pytest.mark.parametrize("alg", [
    fx.z2_algebra(), fx.z3_algebra(), fx.s3_algebra(),
    fx.semilattice_algebra(), fx.broken_algebra(),
])
def test_algebra_round_trip(alg):
    text = serialize_algebra(alg)
    with_sig = parse_algebra(text, sig=alg.signature, name=alg.name)
    inferred = parse_algebra(text)
    assert with_sig.tables == alg.tables == inferred.tables
    assert with_sig.carrier_size == alg.carrier_size


def test_algebra_errors():
    with pytest.raises(FormatError):
        parse_algebra("table m 0 0 0 0\n")  # table before carrier
    with pytest.raises(FormatError):
        parse_algebra("carrier 2\ntable m 0 0 0\n")  # 3 is not a power of 2
    with pytest.raises(FormatError):
        parse_algebra("carrier 1\ntable m 0\n")  # arity ambiguous at size 1
    with pytest.raises(FormatError):
        parse_algebra("carrier 2\ntable f 0 0\n", sig=GRP.signature)


def test_proof_round_trip_all_rules():
    goal = Equation(parse_term(GRP.signature, 1, "m(e,x1)"),
                    parse_term(GRP.signature, 1, "x1"))
    proof = prove_bounded(GRP, goal, Limits(max_term_size=9))
    text = serialize_proof(proof, GRP)
    assert check_proof(GRP, parse_proof(text, GRP)) == goal


def test_proof_nullary_cong_carries_context():
    gdp = fx.grp_double_prime_presentation()
    goal = Equation(parse_term(gdp.signature, 1, "m(x1,ep)"),
                    parse_term(gdp.signature, 1, "x1"))
    proof = prove_bounded(gdp, goal, Limits(max_term_size=7))
    text = serialize_proof(proof, gdp)
    assert check_proof(gdp, parse_proof(text, gdp)) == goal


def test_proof_script_hand_written():
    text = '(trans (ax 0) (sym (refl @1 "x1")))'
    proof = parse_proof(text, GRP)
    assert check_proof(GRP, proof) == GRP.axioms[0]


def test_proof_script_def_and_ref():
    text = '(def a (ax 0))\n(trans (ref a) (sym (ref a)))'
    proof = parse_proof(text, GRP)
    eq = check_proof(GRP, proof)
    assert eq.lhs == eq.rhs == GRP.axioms[0].lhs


def test_large_shared_proof_uses_def_form():
    from clonelab.proofs import sym, trans
    # a 25-level doubling DAG: tiny as a DAG, astronomical as a tree
    p = trans(parse_proof("(ax 0)", GRP), sym(parse_proof("(ax 0)", GRP)))
    for _ in range(25):
        p = trans(p, p)
    text = serialize_proof(p, GRP)
    assert text.startswith("(def ")
    back = parse_proof(text, GRP)
    eq = check_proof(GRP, back)
    assert eq.lhs == eq.rhs == GRP.axioms[0].lhs


@pytest.mark.parametrize("bad", [
    "(ax 99)",
    "(ax nope)",
    "(frobnicate)",
    "(sym (ax 0)",                       # unbalanced
    '(trans (ax 0) (ax 1)) trailing',
    '(cong "m(x1,e)" "x1" (ax 0))',      # 1-ary outer term, no argument proof
    '(ref nowhere)',
    '(def a (ax 0))',                    # bindings but no final expression
    '(sym (def a (ax 0)))',              # def below the top level
    '(ax 0) (def a (ax 0))',             # binding after the final expression
])
def test_proof_script_errors(bad):
    with pytest.raises(FormatError):
        parse_proof(bad, GRP)


def test_explicit_clone_round_trip():
    sub = generated_subclone(2, [TupleFunction(2, 2, (0, 1, 1, 0))],
                             arity_cap=2)
    text = serialize_explicit_clone(sub)
    back = parse_explicit_clone(text, name=sub.name)
    assert back.carriers == sub.carriers
    assert back.projections == sub.projections
    assert back.compose_table == sub.compose_table


def test_explicit_clone_errors():
    with pytest.raises(FormatError):
        parse_explicit_clone("arity\n")
    with pytest.raises(FormatError):
        parse_explicit_clone("arity 1 a\ncompose b 1 a a\n")  # unknown element
    with pytest.raises(FormatError):
        parse_explicit_clone("nonsense\n")
