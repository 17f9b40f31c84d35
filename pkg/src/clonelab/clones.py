"""Abstract clones: projections and superposition over a graded carrier.

Implementations: End(A) (all finitary operations on a finite set), the term
clone (substitution), quotient clones (saturated classes per arity), explicit
finite clones (lookup tables), and finite products.  On top of those: clone
homomorphisms and models, the free and quotient universal properties, clone
generation, kernel presentations, clone-valued consequence, and the bounded
embedding into a product of End clones.

Every clone is queried under an explicit arity cap; no level is ever
enumerated unboundedly.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebras import (
    Countermodel,
    FiniteAlgebra,
    TupleFunction,
    is_model,
    satisfies,
    semantic_consequence_bounded,
)
from .equational import FreeModel, completeness_witness, eval_in_free_model, free_model
from .errors import (
    ArityCapExceeded,
    BudgetExceeded,
    HypothesisViolated,
    IncompleteFreeModel,
    NotAModel,
    NotATotalMap,
    UniverseEscape,
)
from .limits import DEFAULT_LIMITS, Limits
from .proofs import Proof
from .saturation import get_engine
from .terms import (
    Equation,
    Presentation,
    Signature,
    Term,
    enum_terms,
    mk_app,
    mk_var,
    print_term,
    subst,
    term_key,
)

EXPLICIT_TABLE_THRESHOLD = 512


class Clone:
    """Interface: a graded carrier with projections and superposition.

    ``carrier(n, size_bound)`` is a finite duplicate-free list;
    ``compose(phi, thetas, n)`` superposes a k-ary element with k n-ary ones
    (``n`` is only needed when k = 0 and cannot be read off the arguments);
    ``equal`` defaults to structural equality.
    """

    def carrier(self, n: int, size_bound: Optional[int] = None) -> list:
        raise NotImplementedError

    def proj(self, n: int, i: int):
        raise NotImplementedError

    def compose(self, phi, thetas: Sequence, n: Optional[int] = None):
        raise NotImplementedError

    def equal(self, a, b) -> bool:
        return a == b

    def _check_cap(self, n: int):
        if not 0 <= n <= self.arity_cap:
            raise ArityCapExceeded(f"arity {n} beyond the cap {self.arity_cap} of {self.name}")


def _result_arity(thetas: Sequence, n: Optional[int], arity_of) -> int:
    if thetas:
        m = arity_of(thetas[0])
        if any(arity_of(t) != m for t in thetas):
            raise ValueError("superposition arguments have mixed arities")
        if n is not None and n != m:
            raise ValueError("explicit arity differs from argument arity")
        return m
    if n is None:
        raise ValueError("target arity required when superposing a nullary element")
    return n


# ---------------------------------------------------------------------------
# End(A)


class EndClone(Clone):
    """All finitary operations on the carrier 0..m-1."""

    def __init__(self, m: int, arity_cap: int = 2):
        if m < 0:
            raise ValueError("carrier size must be nonnegative")
        self.m = m
        self.arity_cap = arity_cap
        self.name = f"End({m})"

    def carrier(self, n: int, size_bound: Optional[int] = None) -> List[TupleFunction]:
        self._check_cap(n)
        m = self.m
        return [TupleFunction(n, m, t)
                for t in itertools.product(range(m), repeat=m ** n)]

    def proj(self, n: int, i: int) -> TupleFunction:
        if not 1 <= i <= n:
            raise ValueError(f"projection index {i} out of 1..{n}")
        m = self.m
        shift = m ** (n - i)
        return TupleFunction(n, m, tuple((idx // shift) % m for idx in range(m ** n)))

    def compose(self, phi: TupleFunction, thetas: Sequence[TupleFunction],
                n: Optional[int] = None) -> TupleFunction:
        if len(thetas) != phi.domain_arity:
            raise ValueError(f"{phi.domain_arity}-ary element got {len(thetas)} arguments")
        n = _result_arity(thetas, n, lambda t: t.domain_arity)
        m = self.m
        ts = [t.table for t in thetas]
        table = tuple(phi.apply([t[idx] for t in ts]) for idx in range(m ** n))
        return TupleFunction(n, m, table)


def end_clone(m: int, arity_cap: int = 2) -> EndClone:
    return EndClone(m, arity_cap)


# ---------------------------------------------------------------------------
# term clone and quotient clone


class FreeTermClone(Clone):
    """Terms under substitution; projections are the context variables."""

    def __init__(self, sig: Signature, arity_cap: int = 8, default_size_bound: int = 4):
        self.signature = sig
        self.arity_cap = arity_cap
        self.default_size_bound = default_size_bound
        self.name = "T(sig)"

    def carrier(self, n: int, size_bound: Optional[int] = None) -> List[Term]:
        self._check_cap(n)
        return enum_terms(self.signature, n, size_bound or self.default_size_bound)

    def proj(self, n: int, i: int) -> Term:
        return mk_var(n, i)

    def compose(self, phi: Term, thetas: Sequence[Term], n: Optional[int] = None) -> Term:
        n = _result_arity(thetas, n, lambda t: t.context)
        return subst(phi, thetas, n)


def free_term_clone(sig: Signature, arity_cap: int = 8,
                    default_size_bound: int = 4) -> FreeTermClone:
    return FreeTermClone(sig, arity_cap, default_size_bound)


class QuotientClone(Clone):
    """Terms modulo derivable equality, one saturation run per arity.

    Elements are minimal class representatives.  ``size_bound`` arguments are
    ignored: the partition is fixed by the construction limits.
    """

    def __init__(self, pres: Presentation, limits: Limits = DEFAULT_LIMITS,
                 arity_cap: Optional[int] = None):
        self.presentation = pres
        self.limits = limits
        self.arity_cap = limits.arity_cap if arity_cap is None else arity_cap
        self.name = f"T<{pres.name or 'pres'}>"
        self._fms: Dict[int, FreeModel] = {}

    def model_at(self, n: int) -> FreeModel:
        fm = self._fms.get(n)
        if fm is None:
            fm = free_model(self.presentation, n, self.limits)
            self._fms[n] = fm
        return fm

    def complete_at(self, n: int) -> bool:
        return self.model_at(n).complete

    def carrier(self, n: int, size_bound: Optional[int] = None) -> List[Term]:
        self._check_cap(n)
        return list(self.model_at(n).class_reps)

    def proj(self, n: int, i: int) -> Term:
        fm = self.model_at(n)
        return fm.class_reps[fm.class_of(mk_var(n, i))]

    def compose(self, phi: Term, thetas: Sequence[Term], n: Optional[int] = None) -> Term:
        n = _result_arity(thetas, n, lambda t: t.context)
        fm = self.model_at(n)
        t = subst(phi, thetas, n)
        i = fm._engine.index.get(t)
        if i is not None:
            return fm.class_reps[fm._class_of_root[fm._engine.find(i)]]
        if fm.complete:
            c = eval_in_free_model(fm, phi, [fm.class_of(th) for th in thetas])
            return fm.class_reps[c]
        raise UniverseEscape(
            f"superposition result {t!r} exceeds the budget at an incomplete arity"
        )

    def rep_of(self, t: Term) -> Term:
        fm = self.model_at(t.context)
        return fm.class_reps[fm.class_of(t)]


def quotient_clone(pres: Presentation, limits: Limits = DEFAULT_LIMITS) -> QuotientClone:
    return QuotientClone(pres, limits)


# ---------------------------------------------------------------------------
# explicit and product clones


@dataclass
class ExplicitClone(Clone):
    """A finite clone given by per-arity element lists and a superposition
    table (or function, above the memory threshold).

    ``payload`` optionally maps (arity, element) to an underlying object
    (e.g. the TupleFunction an element name stands for); it is not part of
    the clone structure.
    """

    name: str
    carriers: Dict[int, Tuple[object, ...]]
    projections: Dict[Tuple[int, int], object]
    compose_table: Optional[Dict[tuple, object]] = None
    compose_fn: Optional[Callable] = None
    payload: Dict[Tuple[int, object], object] = field(default_factory=dict)

    def __post_init__(self):
        self.arity_cap = max(self.carriers, default=0)
        for n, elems in self.carriers.items():
            if len(set(elems)) != len(elems):
                raise ValueError(f"duplicate elements at arity {n}")

    def carrier(self, n: int, size_bound: Optional[int] = None) -> list:
        self._check_cap(n)
        return list(self.carriers.get(n, ()))

    def proj(self, n: int, i: int):
        try:
            return self.projections[(n, i)]
        except KeyError:
            raise ArityCapExceeded(f"no stored projection p_{i} at arity {n}")

    def _arity_of(self, x) -> int:
        for n, elems in self.carriers.items():
            if x in elems:
                return n
        raise ValueError(f"element {x!r} not in any stored level")

    def compose(self, phi, thetas: Sequence, n: Optional[int] = None):
        n = _result_arity(thetas, n, self._arity_of)
        key = (phi, tuple(thetas), n)
        if self.compose_table is not None:
            try:
                return self.compose_table[key]
            except KeyError:
                raise ArityCapExceeded(f"superposition {key!r} outside the stored table")
        return self.compose_fn(phi, tuple(thetas), n)


class ProductClone(Clone):
    """Componentwise clone structure on tuples over finitely many factors."""

    def __init__(self, factors: Sequence[Clone], name: str = ""):
        self.factors = list(factors)
        self.arity_cap = min((f.arity_cap for f in self.factors), default=0)
        self.name = name or "x".join(f.name for f in self.factors)

    def carrier(self, n: int, size_bound: Optional[int] = None) -> list:
        self._check_cap(n)
        return [tuple(xs) for xs in
                itertools.product(*[f.carrier(n, size_bound) for f in self.factors])]

    def proj(self, n: int, i: int):
        return tuple(f.proj(n, i) for f in self.factors)

    def compose(self, phi, thetas: Sequence, n: Optional[int] = None):
        return tuple(
            f.compose(phi[j], [th[j] for th in thetas], n)
            for j, f in enumerate(self.factors)
        )

    def equal(self, a, b) -> bool:
        return all(f.equal(x, y) for f, x, y in zip(self.factors, a, b))


# ---------------------------------------------------------------------------
# graded hom-sets


@dataclass(frozen=True)
class GradedHomSet:
    """Level n holds all functions A^n -> B for finite carriers A, B."""

    source_size: int
    target_size: int

    def level_count(self, n: int) -> int:
        return self.target_size ** (self.source_size ** n)

    def level(self, n: int) -> List[Tuple[int, ...]]:
        return list(itertools.product(range(self.target_size),
                                      repeat=self.source_size ** n))


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass
class CloneHom:
    source: Clone
    target: Clone
    fn: Callable[[int, object], object]
    name: str = ""

    def apply(self, n: int, x):
        return self.fn(n, x)


def _axiom_instance_counts(sizes: Dict[int, int], cap: int):
    """(ca1, ca2, ca3) instance counts for the given per-arity carrier sizes."""
    ns = range(cap + 1)
    ca1 = sum(k * sizes[n] ** k for n in ns for k in range(1, cap + 1))
    ca2 = sum(sizes[n] for n in ns)
    ca3 = sum(
        sizes[k] * sizes[n] ** k * sizes[p] ** n
        for k in ns for n in ns for p in ns
    )
    return ca1, ca2, ca3


@dataclass
class CloneAxiomReport:
    clone_name: str
    arity_cap: int
    exhaustive: bool
    instances_checked: int
    violations: List[tuple]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_clone_axioms(c: Clone, arity_cap: Optional[int] = None,
                       sample_budget: int = 20000, seed: int = 0,
                       exhaustive_threshold: int = 2_000_000) -> CloneAxiomReport:
    """Verify the three clone laws: projections select their argument,
    superposition with projections is the identity, and superposition is
    associative.  Exhaustive when the instance count fits the threshold,
    otherwise seeded sampling."""
    cap = c.arity_cap if arity_cap is None else arity_cap
    carriers = {n: c.carrier(n) for n in range(cap + 1)}
    sizes = {n: len(carriers[n]) for n in carriers}
    memo: Dict[tuple, object] = {}

    def comp(phi, thetas: tuple, n: int):
        key = (phi, thetas, n)
        v = memo.get(key)
        if v is None:
            v = c.compose(phi, thetas, n)
            memo[key] = v
        return v

    violations: List[tuple] = []
    checked = 0

    def check_ca1(k, j, thetas, n):
        nonlocal checked
        checked += 1
        got = comp(c.proj(k, j), thetas, n)
        if not c.equal(got, thetas[j - 1]):
            violations.append(("CA1", k, j, thetas, got))

    def check_ca2(theta, n):
        nonlocal checked
        checked += 1
        projs = tuple(c.proj(n, i) for i in range(1, n + 1))
        got = comp(theta, projs, n)
        if not c.equal(got, theta):
            violations.append(("CA2", theta, got))

    def check_ca3(phi, thetas, psis, k, n, p):
        nonlocal checked
        checked += 1
        left = comp(comp(phi, thetas, n), psis, p)
        right = comp(phi, tuple(comp(th, psis, p) for th in thetas), p)
        if not c.equal(left, right):
            violations.append(("CA3", phi, thetas, psis, left, right))

    ca1, ca2, ca3 = _axiom_instance_counts(sizes, cap)
    exhaustive = ca1 + ca2 + ca3 <= exhaustive_threshold
    if exhaustive:
        for n in range(cap + 1):
            for k in range(1, cap + 1):
                for thetas in itertools.product(carriers[n], repeat=k):
                    for j in range(1, k + 1):
                        check_ca1(k, j, thetas, n)
        for n in range(cap + 1):
            for theta in carriers[n]:
                check_ca2(theta, n)
        for k in range(cap + 1):
            for n in range(cap + 1):
                if sizes[n] == 0 and k > 0:
                    continue
                for p in range(cap + 1):
                    if sizes[p] == 0 and n > 0:
                        continue
                    for phi in carriers[k]:
                        for thetas in itertools.product(carriers[n], repeat=k):
                            for psis in itertools.product(carriers[p], repeat=n):
                                check_ca3(phi, thetas, psis, k, n, p)
    else:
        rng = random.Random(seed)
        nonempty = [n for n in range(cap + 1) if sizes[n] > 0]
        for _ in range(sample_budget):
            law = rng.randrange(3)
            if law == 0 and nonempty:
                n = rng.choice(nonempty)
                k = rng.randrange(1, cap + 1)
                thetas = tuple(rng.choice(carriers[n]) for _ in range(k))
                check_ca1(k, rng.randrange(1, k + 1), thetas, n)
            elif law == 1 and nonempty:
                n = rng.choice(nonempty)
                check_ca2(rng.choice(carriers[n]), n)
            else:
                ks = [k for k in range(cap + 1) if sizes[k] > 0]
                if not ks:
                    continue
                k = rng.choice(ks)
                n = rng.choice(nonempty) if k > 0 else rng.randrange(cap + 1)
                if k > 0 and sizes[n] == 0:
                    continue
                p = rng.choice(nonempty) if n > 0 else rng.randrange(cap + 1)
                if n > 0 and sizes[p] == 0:
                    continue
                phi = rng.choice(carriers[k])
                thetas = tuple(rng.choice(carriers[n]) for _ in range(k))
                psis = tuple(rng.choice(carriers[p]) for _ in range(n))
                check_ca3(phi, thetas, psis, k, n, p)
    return CloneAxiomReport(c.name, cap, exhaustive, checked, violations)


def is_clone_hom(h: CloneHom, arity_cap: Optional[int] = None,
                 sample_budget: int = 20000, seed: int = 0,
                 exhaustive_threshold: int = 200_000,
                 size_bound: Optional[int] = None) -> bool:
    """Projection and superposition preservation on all (or sampled)
    instances under the cap."""
    cap = min(h.source.arity_cap, h.target.arity_cap) if arity_cap is None else arity_cap
    carriers = {n: h.source.carrier(n, size_bound) for n in range(cap + 1)}
    sizes = {n: len(carriers[n]) for n in carriers}
    for n in range(cap + 1):
        for i in range(1, n + 1):
            if not h.target.equal(h.apply(n, h.source.proj(n, i)), h.target.proj(n, i)):
                return False

    def check(phi, thetas, k, n) -> bool:
        lhs = h.apply(n, h.source.compose(phi, thetas, n))
        rhs = h.target.compose(h.apply(k, phi), [h.apply(n, t) for t in thetas], n)
        return h.target.equal(lhs, rhs)

    total = sum(sizes[k] * sizes[n] ** k for k in range(cap + 1) for n in range(cap + 1))
    if total <= exhaustive_threshold:
        for k in range(cap + 1):
            for n in range(cap + 1):
                if k > 0 and sizes[n] == 0:
                    continue
                for phi in carriers[k]:
                    for thetas in itertools.product(carriers[n], repeat=k):
                        if not check(phi, thetas, k, n):
                            return False
    else:
        rng = random.Random(seed)
        ks = [k for k in range(cap + 1) if sizes[k] > 0]
        ns = [n for n in range(cap + 1) if sizes[n] > 0]
        for _ in range(sample_budget):
            k = rng.choice(ks)
            n = rng.choice(ns) if k > 0 else rng.randrange(cap + 1)
            if k > 0 and sizes[n] == 0:
                continue
            phi = rng.choice(carriers[k])
            thetas = tuple(rng.choice(carriers[n]) for _ in range(k))
            if not check(phi, thetas, k, n):
                return False
    return True


# ---------------------------------------------------------------------------
# free and quotient universal properties


def extend_to_clone_hom(sig: Signature, target: Clone,
                        f: Dict[Tuple[int, str], object]) -> CloneHom:
    """The unique extension of a symbol assignment along the term clone:
    variables to projections, applications to superpositions."""
    for k, name in sig.symbols():
        if (k, name) not in f:
            raise NotATotalMap(f"no target element assigned to {name!r}/{k}")
    memo: Dict[Term, object] = {}

    def go(n: int, t: Term):
        v = memo.get(t)
        if v is not None:
            return v
        if t.var is not None:
            v = target.proj(n, t.var)
        else:
            k = len(t.args)
            v = target.compose(f[(k, t.sym)], [go(n, a) for a in t.args], n)
        memo[t] = v
        return v

    return CloneHom(free_term_clone(sig), target, go, name="extension")


def factor_through_quotient(pres: Presentation, g: CloneHom,
                            limits: Limits = DEFAULT_LIMITS,
                            verify_size: int = 4) -> CloneHom:
    """Factor a term-clone homomorphism through the quotient clone.

    Requires every axiom of ``pres`` to be collapsed by ``g``; raises
    HypothesisViolated with the first failing axiom index otherwise.  The
    factorization h([t]) = g(t) is then verified to commute with the quotient
    map on all terms up to ``verify_size``.
    """
    for idx, axm in enumerate(pres.axioms):
        if not g.target.equal(g.apply(axm.context, axm.lhs),
                              g.apply(axm.context, axm.rhs)):
            raise HypothesisViolated(
                f"axiom {idx} ({axm!r}) is not collapsed by the map", idx)
    q = QuotientClone(pres, limits)
    h = CloneHom(q, g.target, lambda n, rep: g.apply(n, rep), name="factorization")
    for n in range(q.arity_cap + 1):
        for t in enum_terms(pres.signature, n, verify_size):
            if not g.target.equal(h.apply(n, q.rep_of(t)), g.apply(n, t)):
                raise ValueError(
                    f"factorization does not commute at {t!r}; "
                    "the given map is not a clone homomorphism"
                )
    return h


@dataclass
class CloneModel:
    """A clone homomorphism from a quotient clone into some End(A)."""

    presentation: Presentation
    carrier_size: int
    hom: CloneHom
    algebra: Optional[FiniteAlgebra] = None

    def op_table(self, sym: str, arity: int) -> Tuple[int, ...]:
        """Recover the interpretation of a symbol from the model."""
        q: QuotientClone = self.hom.source
        eta = mk_app(self.presentation.signature, sym,
                     [mk_var(arity, i) for i in range(1, arity + 1)], context=arity)
        return self.hom.apply(arity, q.rep_of(eta)).table


def clone_model_of_algebra(pres: Presentation, alg: FiniteAlgebra,
                           arity_cap: int = 2,
                           limits: Limits = DEFAULT_LIMITS) -> CloneModel:
    if not is_model(alg, pres):
        raise NotAModel(f"{alg.name or 'algebra'} does not satisfy the presentation")
    end = EndClone(alg.carrier_size, arity_cap)
    f = {(k, s): TupleFunction(k, alg.carrier_size, alg.table(s, k))
         for k, s in pres.signature.symbols()}
    g = extend_to_clone_hom(pres.signature, end, f)
    h = factor_through_quotient(pres, g, limits)
    return CloneModel(pres, alg.carrier_size, h, alg)


def is_model_hom(f: Sequence[int], ma: CloneModel, mb: CloneModel,
                 arity_cap: int = 2) -> bool:
    """Does the carrier map commute with every clone element's action?"""
    mA, mB = ma.carrier_size, mb.carrier_size
    try:
        fmap = [f[x] for x in range(mA)]
    except (KeyError, IndexError):
        raise NotATotalMap(f"map is not total on 0..{mA - 1}")
    if any(not 0 <= y < mB for y in fmap):
        raise NotATotalMap("map has values outside the target carrier")
    for n in range(arity_cap + 1):
        for theta in ma.hom.source.carrier(n):
            alpha: TupleFunction = ma.hom.apply(n, theta)
            beta: TupleFunction = mb.hom.apply(n, theta)
            for args in itertools.product(range(mA), repeat=n):
                if fmap[alpha.apply(args)] != beta.apply([fmap[a] for a in args]):
                    return False
    return True


# ---------------------------------------------------------------------------
# generated subclones and explicit packaging


def _explicit_from_functions(name: str, m: int,
                             levels: Dict[int, List[TupleFunction]]) -> ExplicitClone:
    """Package per-arity TupleFunction sets as a named ExplicitClone."""
    ordered = {n: sorted(fs, key=lambda f: f.table) for n, fs in levels.items()}
    names: Dict[int, Tuple[str, ...]] = {}
    to_name: Dict[Tuple[int, TupleFunction], str] = {}
    payload: Dict[Tuple[int, str], TupleFunction] = {}
    for n, fs in ordered.items():
        lvl = []
        for i, fn in enumerate(fs):
            nm = f"f{n}_{i}"
            lvl.append(nm)
            to_name[(n, fn)] = nm
            payload[(n, nm)] = fn
        names[n] = tuple(lvl)
    projections = {}
    for n in ordered:
        for i in range(1, n + 1):
            shift = m ** (n - i)
            p = TupleFunction(n, m, tuple((idx // shift) % m for idx in range(m ** n)))
            if (n, p) in to_name:
                projections[(n, i)] = to_name[(n, p)]
    end = EndClone(m, max(ordered, default=0))

    def comp_fn(phi_name, theta_names, n):
        k = next(a for a, lv in names.items() if phi_name in lv)
        phi = payload[(k, phi_name)]
        thetas = [payload[(n, t)] for t in theta_names]
        res = end.compose(phi, thetas, n)
        try:
            return to_name[(n, res)]
        except KeyError:
            raise ArityCapExceeded("superposition leaves the stored carrier")

    total = sum(len(v) for v in names.values())
    table = None
    fn = comp_fn
    if total <= EXPLICIT_TABLE_THRESHOLD:
        table = {}
        for k, lvl_k in names.items():
            for n in names:
                if k > 0 and not names[n]:
                    continue
                for phi_name in lvl_k:
                    for theta_names in itertools.product(names[n], repeat=k):
                        table[(phi_name, theta_names, n)] = comp_fn(phi_name, theta_names, n)
        fn = None
    return ExplicitClone(name, names, projections, table, fn, payload)


def generated_subclone(m: int, ops: Sequence[TupleFunction], arity_cap: int = 2,
                       size_budget: int = 4096) -> ExplicitClone:
    """Least sub-structure of End(m) containing all projections up to the cap
    and the given operations, closed under superposition."""
    if m < 1:
        raise ValueError("carrier size must be at least 1")
    end = EndClone(m, arity_cap)
    levels: Dict[int, set] = {n: set() for n in range(arity_cap + 1)}
    for n in range(1, arity_cap + 1):
        for i in range(1, n + 1):
            levels[n].add(end.proj(n, i))
    for op in ops:
        if op.carrier_size != m:
            raise ValueError("operation lives on a different carrier")
        if op.domain_arity > arity_cap:
            raise ArityCapExceeded(f"generator arity {op.domain_arity} beyond the cap")
        levels[op.domain_arity].add(op)
    changed = True
    while changed:
        changed = False
        snapshot = {n: list(fs) for n, fs in levels.items()}
        for k, phis in snapshot.items():
            for phi in phis:
                for n, args in snapshot.items():
                    if k > 0 and not args:
                        continue
                    for thetas in itertools.product(args, repeat=k):
                        res = end.compose(phi, thetas, n)
                        if res not in levels[n]:
                            levels[n].add(res)
                            changed = True
                            if sum(len(fs) for fs in levels.values()) > size_budget:
                                raise BudgetExceeded(
                                    f"generated clone exceeds {size_budget} elements"
                                )
    return _explicit_from_functions(f"gen({m})", m,
                                    {n: list(fs) for n, fs in levels.items()})


# ---------------------------------------------------------------------------
# kernel presentations


def _element_names(s: Clone, cap: int):
    carriers = {n: s.carrier(n) for n in range(cap + 1)}
    names: Dict[int, List[str]] = {}
    elem_of: Dict[Tuple[int, str], object] = {}
    for n, elems in carriers.items():
        lvl = []
        for i, x in enumerate(elems):
            nm = x if isinstance(x, str) else f"s{n}_{i}"
            lvl.append(nm)
            elem_of[(n, nm)] = x
        names[n] = lvl
    return names, elem_of


def kernel_presentation(s: Clone, arity_cap: Optional[int] = None,
                        size_budget: int = 3) -> Presentation:
    """The equations satisfied by a finite clone: one symbol per element.

    Axioms are the pairs of small terms whose evaluations in ``s`` agree —
    each group of evaluation-equal terms contributes its links to the least
    member, which presents the same congruence as the full pair set — plus
    one superposition-table equation phi(theta_1(x..), ..) = (phi o thetas)(x..)
    per composable tuple of elements under the cap.  The table equations make
    the bounded reconstruction of ``s`` from this presentation saturate.
    """
    cap = s.arity_cap if arity_cap is None else arity_cap
    names, elem_of = _element_names(s, cap)
    sig = Signature.of({n: lvl for n, lvl in names.items() if lvl})
    eps = extend_to_clone_hom(sig, s, {(n, nm): x for (n, nm), x in elem_of.items()})
    name_of = {(n, x): nm for (n, nm), x in elem_of.items()}
    axioms: List[Equation] = []
    seen = set()

    def add(a: Term, b: Term):
        if a != b and (a, b) not in seen:
            seen.add((a, b))
            axioms.append(Equation(a, b))

    for n in range(cap + 1):
        groups: Dict[object, List[Term]] = {}
        for t in enum_terms(sig, n, size_budget):
            groups.setdefault(eps.apply(n, t), []).append(t)
        for ts in groups.values():
            ts.sort(key=term_key)
            for t in ts[1:]:
                add(t, ts[0])
    for k in range(cap + 1):
        for phi_name in names[k]:
            phi = elem_of[(k, phi_name)]
            for n in range(cap + 1):
                if k > 0 and not names[n]:
                    continue
                xs = [mk_var(n, i) for i in range(1, n + 1)]
                for theta_names in itertools.product(names[n], repeat=k):
                    args = [mk_app(sig, tn, xs, context=n) for tn in theta_names]
                    lhs = mk_app(sig, phi_name, args, context=n)
                    res = s.compose(phi, [elem_of[(n, tn)] for tn in theta_names], n)
                    rhs = mk_app(sig, name_of[(n, res)], xs, context=n)
                    add(lhs, rhs)
    return Presentation(sig, tuple(axioms), name=f"E_{s.name}")


def verify_kernel_reconstruction(s: Clone, kp: Presentation,
                                 arity_cap: Optional[int] = None,
                                 limits: Optional[Limits] = None) -> bool:
    """Does the quotient clone of the kernel presentation reproduce ``s`` on
    the bounded carrier, via the canonical evaluation bijection?

    The kernel signature has one symbol per clone element, so its term
    universe grows fast; the default budget stays small (the superposition-
    table axioms make size 7 enough for caps up to 2).
    """
    cap = s.arity_cap if arity_cap is None else arity_cap
    if limits is None:
        limits = DEFAULT_LIMITS.with_(max_term_size=7)
    names, elem_of = _element_names(s, cap)
    eps = extend_to_clone_hom(kp.signature, s, {(n, nm): x
                                                for (n, nm), x in elem_of.items()})
    for n in range(cap + 1):
        fm = free_model(kp, n, limits)
        images = [eps.apply(n, rep) for rep in fm.class_reps]
        target = s.carrier(n)
        if len(images) != len(target):
            return False
        if len(set(images)) != len(images):
            return False
        if set(images) != set(target):
            return False
    return True


# ---------------------------------------------------------------------------
# clone-valued consequence


@dataclass(frozen=True)
class SeparationCertificate:
    """Replayable evidence that two terms denote distinct clone elements."""

    kind: str                       # "model" or "free_model"
    algebra: Optional[FiniteAlgebra] = None
    witness: Optional[Tuple[int, ...]] = None
    context: Optional[int] = None
    lhs_class: Optional[int] = None
    rhs_class: Optional[int] = None
    class_count: Optional[int] = None


@dataclass(frozen=True)
class CloneEqual:
    proof: Proof
    verdict: str = field(default="equal", init=False)


@dataclass(frozen=True)
class CloneSeparated:
    certificate: SeparationCertificate
    verdict: str = field(default="separated", init=False)


@dataclass(frozen=True)
class CloneUnknown:
    reason: str
    verdict: str = field(default="unknown", init=False)


def _first_violation(alg: FiniteAlgebra, eq: Equation) -> Optional[Tuple[int, ...]]:
    from .algebras import interpret
    memo: dict = {}
    lt = interpret(alg, eq.lhs, memo).table
    rt = interpret(alg, eq.rhs, memo).table
    m, n = alg.carrier_size, eq.context
    for idx in range(m ** n):
        if lt[idx] != rt[idx]:
            args = []
            rest = idx
            for i in range(n):
                shift = m ** (n - 1 - i)
                args.append(rest // shift)
                rest %= shift
            return tuple(args)
    return None


def clone_semantic_consequence(pres: Presentation, eq: Equation,
                               limits: Limits = DEFAULT_LIMITS,
                               fixtures: Sequence[FiniteAlgebra] = ()
                               ) -> "CloneEqual | CloneSeparated | CloneUnknown":
    """Decide an equation at the canonical quotient clone: same class means
    derivable (with an extractable proof); distinct classes are only claimed
    separated when a certificate confirms it (a separating finite model, or a
    complete free model at that context); otherwise Unknown."""
    n = eq.context
    eng = get_engine(pres, n, limits)
    in_universe = True
    try:
        ia = eng.term_index(eq.lhs)
        ib = eng.term_index(eq.rhs)
    except UniverseEscape:
        in_universe = False
    if in_universe and eng.find(ia) == eng.find(ib):
        return CloneEqual(eng.explain(ia, ib))
    if not in_universe:
        try:
            p = completeness_witness(pres, eq, limits)
        except IncompleteFreeModel:
            return CloneUnknown("goal exceeds the universe and the free model "
                                "is incomplete at this context")
        if p is not None:
            return CloneEqual(p)
    # distinct classes within the budget: look for a certificate
    fm = free_model(pres, n, limits)
    if fm.complete:
        gens = fm.generator_classes()
        cl = eval_in_free_model(fm, eq.lhs, gens)
        cr = eval_in_free_model(fm, eq.rhs, gens)
        if cl != cr:
            return CloneSeparated(SeparationCertificate(
                "free_model", context=n, lhs_class=cl, rhs_class=cr,
                class_count=fm.class_count()))
    for alg in fixtures:
        if alg.signature != pres.signature or not is_model(alg, pres):
            continue
        wit = _first_violation(alg, eq)
        if wit is not None:
            return CloneSeparated(SeparationCertificate(
                "model", algebra=alg, witness=wit, context=n))
    found = semantic_consequence_bounded(pres, eq, max(1, limits.max_model_size))
    if isinstance(found, Countermodel):
        return CloneSeparated(SeparationCertificate(
            "model", algebra=found.algebra, witness=found.witness, context=n))
    return CloneUnknown("classes stay distinct within the budget, but no "
                        "separating certificate was found")


# ---------------------------------------------------------------------------
# product embedding


@dataclass
class ProductEmbedding:
    hom: CloneHom
    arity_cap: int
    injective_at: Dict[int, bool]
    collisions: List[tuple]

    @property
    def injective(self) -> bool:
        return all(self.injective_at.values())


def product_embedding(s: Clone, arity_cap: Optional[int] = None) -> ProductEmbedding:
    """The canonical map into the product of End(carrier(n)) for n up to the
    cap: an element acts on tuples of carrier elements by superposition.
    The injectivity report covers the bounded carrier only."""
    cap = s.arity_cap if arity_cap is None else arity_cap
    ns = list(range(cap + 1))
    carriers = {n: s.carrier(n) for n in ns}
    index = {n: {x: i for i, x in enumerate(carriers[n])} for n in ns}
    sizes = {n: len(carriers[n]) for n in ns}
    factors = [EndClone(sizes[n], cap) for n in ns]
    memo: Dict[Tuple[int, object], tuple] = {}

    def act(k: int, theta) -> tuple:
        key = (k, theta)
        v = memo.get(key)
        if v is not None:
            return v
        parts = []
        for n in ns:
            C = sizes[n]
            table = []
            for args in itertools.product(range(C), repeat=k):
                res = s.compose(theta, [carriers[n][a] for a in args], n)
                table.append(index[n][res])
            parts.append(TupleFunction(k, C, tuple(table)))
        v = tuple(parts)
        memo[key] = v
        return v

    target = ProductClone(factors, name=f"prod-End({s.name})")
    hom = CloneHom(s, target, act, name="product-embedding")
    injective_at: Dict[int, bool] = {}
    collisions: List[tuple] = []
    for k in ns:
        seen: Dict[tuple, object] = {}
        inj = True
        for theta in carriers[k]:
            img = act(k, theta)
            if img in seen and not s.equal(seen[img], theta):
                inj = False
                collisions.append((k, seen[img], theta))
            else:
                seen[img] = theta
        injective_at[k] = inj
    return ProductEmbedding(hom, cap, injective_at, collisions)
