"""Arity-graded finite sets and their morphisms, relations and quotients.

A graded set stores one finite set of identifiers per arity.  Only finitely
many arities are nonempty; everything above ``arity_bound`` (when set) is
empty by convention.  An element is conceptually the pair (arity, identifier),
so the same identifier may appear at several arities.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Hashable, Mapping, Optional, Set, Tuple

from .errors import NotAnEquivalence, SourceTargetMismatch

Ident = Hashable


@dataclass(frozen=True)
class GradedSet:
    levels: Mapping[int, FrozenSet[Ident]] = field(default_factory=dict)
    arity_bound: Optional[int] = None

    def __post_init__(self):
        norm = {}
        for n, ids in self.levels.items():
            if n < 0:
                raise ValueError(f"negative arity {n}")
            ids = frozenset(ids)
            if ids:
                norm[n] = ids
        object.__setattr__(self, "levels", norm)

    def level(self, n: int) -> FrozenSet[Ident]:
        return self.levels.get(n, frozenset())

    def arities(self) -> Tuple[int, ...]:
        return tuple(sorted(self.levels))

    def elements(self):
        """Iterate (arity, identifier) pairs in deterministic order."""
        for n in self.arities():
            for x in sorted(self.level(n), key=repr):
                yield (n, x)

    def is_empty(self) -> bool:
        return not self.levels


@dataclass(frozen=True)
class GradedMorphism:
    source: GradedSet
    target: GradedSet
    maps: Mapping[int, Mapping[Ident, Ident]]

    def __post_init__(self):
        for n in self.source.arities():
            level_map = self.maps.get(n, {})
            for x in self.source.level(n):
                if x not in level_map:
                    raise ValueError(f"morphism not total at arity {n}: {x!r}")
                if level_map[x] not in self.target.level(n):
                    raise ValueError(
                        f"image of {x!r} at arity {n} not in target level"
                    )

    def apply(self, n: int, x: Ident) -> Ident:
        return self.maps[n][x]


@dataclass(frozen=True)
class GradedRelation:
    base: GradedSet
    pairs: Mapping[int, FrozenSet[Tuple[Ident, Ident]]] = field(default_factory=dict)

    def __post_init__(self):
        norm = {}
        for n, ps in self.pairs.items():
            ps = frozenset(ps)
            level = self.base.level(n)
            for a, b in ps:
                if a not in level or b not in level:
                    raise ValueError(f"pair ({a!r},{b!r}) not in base level {n}")
            if ps:
                norm[n] = ps
        object.__setattr__(self, "pairs", norm)

    def level(self, n: int) -> FrozenSet[Tuple[Ident, Ident]]:
        return self.pairs.get(n, frozenset())


def gm_identity(g: GradedSet) -> GradedMorphism:
    return GradedMorphism(g, g, {n: {x: x for x in g.level(n)} for n in g.arities()})


def gs_product(g: GradedSet, h: GradedSet) -> GradedSet:
    """Levelwise cartesian product; elements are identifier pairs."""
    levels = {}
    for n in set(g.arities()) & set(h.arities()):
        levels[n] = frozenset((a, b) for a in g.level(n) for b in h.level(n))
    if g.arity_bound is not None and h.arity_bound is not None:
        bound = min(g.arity_bound, h.arity_bound)
    else:
        bound = g.arity_bound if g.arity_bound is not None else h.arity_bound
    return GradedSet(levels, bound)


def gs_is_subset(g2: GradedSet, g: GradedSet) -> bool:
    return all(g2.level(n) <= g.level(n) for n in g2.arities())


def rel_is_equivalence(r: GradedRelation) -> bool:
    """Reflexive, symmetric and transitive at every level of the base."""
    for n in set(r.base.arities()) | set(r.pairs):
        level = r.base.level(n)
        pairs = r.level(n)
        for x in level:
            if (x, x) not in pairs:
                return False
        for a, b in pairs:
            if (b, a) not in pairs:
                return False
        for a, b in pairs:
            for c, d in pairs:
                if b == c and (a, d) not in pairs:
                    return False
    return True


def gs_quotient(g: GradedSet, r: GradedRelation) -> Tuple[GradedSet, GradedMorphism]:
    """Quotient by an equivalence relation.

    Class representatives are the least identifier of the class under the
    default ordering (lexicographic for strings), which keeps output
    deterministic.  Raises NotAnEquivalence if ``r`` is not one.
    """
    if r.base != g:
        raise NotAnEquivalence("relation base differs from the quotiented set")
    if not rel_is_equivalence(r):
        raise NotAnEquivalence("relation is not an equivalence")
    levels: Dict[int, FrozenSet[Ident]] = {}
    maps: Dict[int, Dict[Ident, Ident]] = {}
    for n in g.arities():
        classes: Dict[Ident, Set[Ident]] = {}
        # union-find over the level
        parent = {x: x for x in g.level(n)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in r.level(n):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        for x in g.level(n):
            classes.setdefault(find(x), set()).add(x)
        rep_of = {}
        for members in classes.values():
            try:
                rep = min(members)
            except TypeError:
                rep = min(members, key=repr)
            for x in members:
                rep_of[x] = rep
        levels[n] = frozenset(rep_of.values())
        maps[n] = rep_of
    quot = GradedSet(levels, g.arity_bound)
    proj = GradedMorphism(g, quot, maps)
    return quot, proj


def gm_compose(f: GradedMorphism, g: GradedMorphism) -> GradedMorphism:
    """Levelwise composition g after f (apply ``f`` first)."""
    if f.target != g.source:
        raise SourceTargetMismatch("target of first morphism differs from source of second")
    maps = {
        n: {x: g.apply(n, f.apply(n, x)) for x in f.source.level(n)}
        for n in f.source.arities()
    }
    return GradedMorphism(f.source, g.target, maps)
