import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clonelab.errors import NotAnEquivalence, SourceTargetMismatch
from clonelab.graded import (
    GradedMorphism,
    GradedRelation,
    GradedSet,
    gm_compose,
    gm_identity,
    gs_is_subset,
    gs_product,
    gs_quotient,
    rel_is_equivalence,
)


def test_level_normalization_drops_empty():
    g = GradedSet({0: frozenset(), 2: frozenset({"a", "b"})})
    assert g.arities() == (2,)
    assert g.level(0) == frozenset()
    assert g.level(2) == {"a", "b"}
    assert not g.is_empty()


def test_negative_arity_rejected():
    with pytest.raises(ValueError):
        GradedSet({-1: frozenset({"a"})})


def test_elements_deterministic_order():
    g = GradedSet({1: frozenset({"b", "a"}), 0: frozenset({"z"})})
    assert list(g.elements()) == [(0, "z"), (1, "a"), (1, "b")]


def test_product_sizes_multiply():
    g = GradedSet({1: frozenset({"a", "b"}), 2: frozenset({"c"})})
    h = GradedSet({1: frozenset({"x", "y", "z"}), 3: frozenset({"w"})})
    p = gs_product(g, h)
    assert len(p.level(1)) == 6
    assert p.level(2) == frozenset()  # missing in h
    assert p.level(3) == frozenset()  # missing in g


def test_subset_and_identity_composition():
    g = GradedSet({1: frozenset({"a", "b"})})
    sub = GradedSet({1: frozenset({"a"})})
    assert gs_is_subset(sub, g)
    assert not gs_is_subset(g, sub)
    ident = gm_identity(g)
    assert gm_compose(ident, ident).maps == ident.maps


def test_compose_source_target_mismatch():
    g = GradedSet({1: frozenset({"a"})})
    h = GradedSet({1: frozenset({"b"})})
    f = GradedMorphism(g, h, {1: {"a": "b"}})
    with pytest.raises(SourceTargetMismatch):
        gm_compose(f, f)


# --- equivalence detection against a matrix-closure oracle ----------------


def _closure_oracle(elems, pairs):
    """Reflexive-symmetric-transitive closure via boolean matrix powers."""
    idx = {x: i for i, x in enumerate(elems)}
    n = len(elems)
    mat = [[i == j for j in range(n)] for i in range(n)]
    for a, b in pairs:
        mat[idx[a]][idx[b]] = True
        mat[idx[b]][idx[a]] = True
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if not mat[i][j] and any(mat[i][k] and mat[k][j] for k in range(n)):
                    mat[i][j] = True
                    changed = True
    return {(a, b) for a in elems for b in elems if mat[idx[a]][idx[b]]}


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 12 - 1), st.integers(0, 10 ** 6))
def test_rel_is_equivalence_matches_oracle(mask, seed):
    elems = ["p", "q", "r", "s"]
    all_pairs = [(a, b) for a in elems for b in elems]
    chosen = {all_pairs[i] for i in range(16) if mask >> i & 1}
    base = GradedSet({2: frozenset(elems)})
    rel = GradedRelation(base, {2: frozenset(chosen)})
    expected = chosen == _closure_oracle(elems, chosen)
    assert rel_is_equivalence(rel) == expected
    del seed  # only there to vary the example stream


def test_quotient_against_closure_oracle():
    rng = random.Random(7)
    elems = ["a", "b", "c", "d", "e"]
    for _ in range(25):
        links = {(rng.choice(elems), rng.choice(elems)) for _ in range(4)}
        closed = _closure_oracle(elems, links)
        base = GradedSet({1: frozenset(elems)})
        rel = GradedRelation(base, {1: frozenset(closed)})
        quot, proj = gs_quotient(base, rel)
        # the projection identifies exactly the oracle-closed pairs
        for a in elems:
            for b in elems:
                same = proj.apply(1, a) == proj.apply(1, b)
                assert same == ((a, b) in closed)
        # representatives are least members of their class
        for x in elems:
            assert proj.apply(1, x) == min(y for y in elems if (x, y) in closed)
        assert quot.level(1) == frozenset(proj.maps[1].values())


def test_quotient_rejects_non_equivalence():
    base = GradedSet({1: frozenset({"a", "b", "c"})})
    rel = GradedRelation(base, {1: frozenset({("a", "b")})})  # not reflexive
    with pytest.raises(NotAnEquivalence):
        gs_quotient(base, rel)


def test_quotient_rejects_foreign_base():
    base = GradedSet({1: frozenset({"a"})})
    other = GradedSet({1: frozenset({"a", "b"})})
    rel = GradedRelation(other, {1: frozenset({("a", "a"), ("b", "b")})})
    with pytest.raises(NotAnEquivalence):
        gs_quotient(base, rel)
