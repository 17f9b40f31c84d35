"""Bounded proof search, theorem sets, and the free-model construction.

Everything here is a thin layer over ``SaturationEngine``: the engine owns the
term universe, the congruence partition and the proof forest; this module
packages its output as theorem sets, free models and checkable proofs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from .errors import IncompleteFreeModel, UniverseEscape
from .limits import DEFAULT_LIMITS, Limits
from .proofs import Proof, check_proof, cong, refl, sym, trans
from .saturation import SaturationEngine, get_engine
from .terms import Equation, Presentation, Term, mk_var, subst


# ---------------------------------------------------------------------------
# theorem sets


@dataclass(frozen=True)
class TheoremSet:
    """Derivable equations at one context, as found by bounded saturation.

    ``equations`` holds a Sym-closed canonical generating set: the diagonal of
    the universe plus every (term, class representative) link both ways.  Full
    membership, i.e. "are these two terms in one congruence class", is what
    ``contains`` answers.
    """

    presentation: Presentation
    context: int
    equations: FrozenSet[Equation]
    max_term_size: int
    _engine: SaturationEngine = field(repr=False, compare=False)

    def contains(self, eq: Equation) -> bool:
        if eq.context != self.context:
            return False
        try:
            return self._engine.same_class(eq.lhs, eq.rhs)
        except UniverseEscape:
            return False

    def __contains__(self, eq: Equation) -> bool:
        return self.contains(eq)


def saturate_theorems(pres: Presentation, n: int, limits: Limits = DEFAULT_LIMITS,
                      verify: bool = True) -> TheoremSet:
    """Saturate at context ``n`` and package the result.

    With ``verify`` every canonical non-diagonal equation gets its extracted
    proof re-checked before the set is returned.
    """
    eng = get_engine(pres, n, limits)
    eqs: List[Equation] = []
    for members in eng.class_partition():
        rep = eng.universe[members[0]]
        eqs.append(Equation(rep, rep))
        for j in members[1:]:
            t = eng.universe[j]
            eqs.append(Equation(t, t))
            link = Equation(t, rep)
            if verify:
                p = eng.explain(j, members[0])
                assert check_proof(pres, p) == link
            eqs.append(link)
            eqs.append(link.flipped())
    return TheoremSet(pres, n, frozenset(eqs), limits.max_term_size, eng)


# ---------------------------------------------------------------------------
# free models


@dataclass
class FreeModel:
    """The bounded free model at ``n`` generators: the enumerated term slice
    quotiented by derivable equality.

    ``classes`` lists universe indices per block, sorted, blocks ordered by
    their representative; ``complete`` means every operation applied to
    representatives stays inside the universe, making the partition a genuine
    finite model of the presentation.
    """

    presentation: Presentation
    n: int
    universe: List[Term]
    classes: List[List[int]]
    class_reps: List[Term]
    complete: bool
    tables: Optional[Dict[Tuple[int, str], Tuple[int, ...]]]
    _engine: SaturationEngine = field(repr=False)
    _class_of_root: Dict[int, int] = field(repr=False)

    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, t: Term) -> int:
        """Class id of a universe term."""
        i = self._engine.term_index(t)
        return self._class_of_root[self._engine.find(i)]

    def generator_classes(self) -> List[int]:
        return [self.class_of(mk_var(self.n, i)) for i in range(1, self.n + 1)]


def free_model(pres: Presentation, n: int, limits: Limits = DEFAULT_LIMITS) -> FreeModel:
    eng = get_engine(pres, n, limits)
    partition = eng.class_partition()
    reps = [eng.universe[ms[0]] for ms in partition]
    class_of_root = {eng.find(ms[0]): c for c, ms in enumerate(partition)}
    C = len(partition)

    def class_id(t: Term) -> Optional[int]:
        i = eng.index.get(t)
        return None if i is None else class_of_root[eng.find(i)]

    # quick escape test: the largest representatives are the first to overflow
    biggest = sorted(reps, key=lambda t: -t.size)
    complete = True
    for k, sym_name in pres.signature.symbols():
        if k > 0 and C == 0:
            continue
        probe = Term(context=n, sym=sym_name,
                     args=tuple(biggest[0] for _ in range(k)),
                     size=1 + k * biggest[0].size) if k and biggest else None
        if probe is not None and probe not in eng.index:
            complete = False
            break
    tables: Optional[Dict[Tuple[int, str], Tuple[int, ...]]] = {}
    if complete:
        for k, sym_name in pres.signature.symbols():
            if k > 0 and C == 0:
                tables[(k, sym_name)] = ()
                continue
            flat: List[int] = []
            idx = [0] * k
            while True:
                args = tuple(reps[i] for i in idx)
                t = Term(context=n, sym=sym_name, args=args,
                         size=1 + sum(a.size for a in args))
                c = class_id(t)
                if c is None:
                    complete = False
                    break
                flat.append(c)
                j = k - 1
                while j >= 0:
                    idx[j] += 1
                    if idx[j] < C:
                        break
                    idx[j] = 0
                    j -= 1
                if j < 0 or k == 0:
                    break
            if not complete:
                break
            tables[(k, sym_name)] = tuple(flat)
    if not complete:
        tables = None
    return FreeModel(pres, n, eng.universe, partition, reps, complete, tables,
                     eng, class_of_root)


def eval_in_free_model(fm: FreeModel, t: Term, args: List[int]) -> int:
    """Interpret ``t`` (a term at context k) at the given k class ids."""
    if not fm.complete:
        raise IncompleteFreeModel("free model is not complete within the budget")
    if len(args) != t.context:
        raise ValueError(f"term has context {t.context}, got {len(args)} arguments")
    C = fm.class_count()
    if any(not 0 <= a < C for a in args):
        raise ValueError("class id out of range")

    def go(u: Term) -> int:
        if u.var is not None:
            return args[u.var - 1]
        vals = [go(a) for a in u.args]
        flat = fm.tables[(len(u.args), u.sym)]
        i = 0
        for v in vals:
            i = i * C + v
        return flat[i]

    return go(t)


def _reduce_to_rep(fm: FreeModel, t: Term) -> Tuple[Proof, int]:
    """Proof that ``t`` (at context fm.n) equals its class representative,
    following the evaluation recursion; returns (proof, class id)."""
    eng = fm._engine

    def go(u: Term) -> Tuple[Proof, int]:
        if u.var is not None:
            i = eng.term_index(u)
            c = fm._class_of_root[eng.find(i)]
            rep_i = eng.index[fm.class_reps[c]]
            return eng.explain(i, rep_i), c
        sub = [go(a) for a in u.args]
        k = len(u.args)
        head = Term(context=k, sym=u.sym,
                    args=tuple(mk_var(k, i) for i in range(1, k + 1)),
                    size=k + 1)
        # u = sym(rep_1, ..., rep_k) by congruence on the argument proofs
        p = cong(head, head, refl(head), [q for q, _ in sub], context=fm.n)
        folded = p.conclusion.rhs
        i = eng.term_index(folded)
        c = fm._class_of_root[eng.find(i)]
        rep_i = eng.index[fm.class_reps[c]]
        q = eng.explain(i, rep_i)
        if u == folded:
            return q, c
        return trans(p, q), c

    return go(t)


def completeness_witness(pres: Presentation, eq: Equation,
                         limits: Limits = DEFAULT_LIMITS) -> Optional[Proof]:
    """Decide ``eq`` in the free model at its context and, when both sides
    land in one class, extract a checkable proof."""
    fm = free_model(pres, eq.context, limits)
    if not fm.complete:
        raise IncompleteFreeModel(
            f"free model at context {eq.context} is incomplete within the budget"
        )
    pl, cl = _reduce_to_rep(fm, eq.lhs)
    pr, cr = _reduce_to_rep(fm, eq.rhs)
    if cl != cr:
        return None
    if eq.lhs == eq.rhs:
        return refl(eq.lhs)
    return trans(pl, sym(pr))


def prove_bounded(pres: Presentation, goal: Equation,
                  limits: Limits = DEFAULT_LIMITS) -> Optional[Proof]:
    """Saturation-based proof search; absence of a result is not a refutation."""
    eng = get_engine(pres, goal.context, limits)
    try:
        ia = eng.term_index(goal.lhs)
        ib = eng.term_index(goal.rhs)
    except UniverseEscape:
        # goal terms exceed the universe; a complete free model still decides
        try:
            return completeness_witness(pres, goal, limits)
        except (IncompleteFreeModel, UniverseEscape):
            return None
    if eng.find(ia) != eng.find(ib):
        return None
    return eng.explain(ia, ib)
