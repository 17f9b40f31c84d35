"""Proof trees for the five rules of equational logic, and their checker.

A proof is a finite rooted tree; every node carries the equation it
concludes.  Cong nodes additionally store the two outer terms being
congruence-substituted, because a conclusion does not decompose uniquely.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from .errors import ContextMismatch, InvalidAxiom, RuleMismatch
from .terms import Equation, Presentation, Term, subst

AX, REFL, SYM, TRANS, CONG = "Ax", "Refl", "Sym", "Trans", "Cong"


@dataclass(frozen=True)
class Proof:
    rule: str
    conclusion: Equation
    premises: Tuple["Proof", ...] = ()
    outer_lhs: Optional[Term] = None    # Cong only: the outer term s
    outer_rhs: Optional[Term] = None    # Cong only: the outer term s'

    def __repr__(self):
        return f"Proof({self.rule}, {self.conclusion!r}, {len(self.premises)} premises)"


def ax(eq: Equation) -> Proof:
    return Proof(AX, eq)


def refl(t: Term) -> Proof:
    return Proof(REFL, Equation(t, t))


def sym(p: Proof) -> Proof:
    return Proof(SYM, p.conclusion.flipped(), (p,))


def trans(p1: Proof, p2: Proof) -> Proof:
    return Proof(TRANS, Equation(p1.conclusion.lhs, p2.conclusion.rhs), (p1, p2))


def trans_chain(proofs: Sequence[Proof]) -> Proof:
    """Fold a chain of proofs t0=t1, t1=t2, ... into a balanced Trans tree."""
    proofs = list(proofs)
    if not proofs:
        raise ValueError("empty proof chain")
    while len(proofs) > 1:
        nxt = []
        for i in range(0, len(proofs) - 1, 2):
            nxt.append(trans(proofs[i], proofs[i + 1]))
        if len(proofs) % 2:
            nxt.append(proofs[-1])
        proofs = nxt
    return proofs[0]


def cong(outer_lhs: Term, outer_rhs: Term, head: Proof, arg_proofs: Sequence[Proof],
         context: Optional[int] = None) -> Proof:
    """Cong node: ``head`` proves outer_lhs = outer_rhs at context k, the k
    ``arg_proofs`` prove the substituted arguments pairwise equal."""
    arg_proofs = tuple(arg_proofs)
    ts = [p.conclusion.lhs for p in arg_proofs]
    ts2 = [p.conclusion.rhs for p in arg_proofs]
    concl = Equation(subst(outer_lhs, ts, context), subst(outer_rhs, ts2, context))
    return Proof(CONG, concl, (head,) + arg_proofs, outer_lhs, outer_rhs)


def check_proof(pres: Presentation, p: Proof) -> Equation:
    """Validate every node of ``p`` against the five rules; returns the root
    conclusion.  Shared subtrees (DAGs) are validated once.  Iterative, so
    deeply nested proofs do not hit the interpreter recursion limit."""
    seen: dict = {}
    stack = [(p, (), False)]
    while stack:
        node, path, ready = stack.pop()
        if id(node) in seen:
            continue
        if not ready:
            stack.append((node, path, True))
            for j in range(len(node.premises) - 1, -1, -1):
                q = node.premises[j]
                if id(q) not in seen:
                    stack.append((q, path + (j,), False))
            continue
        _check_node(pres, node, path, seen)
    return seen[id(p)]


def _check_node(pres: Presentation, node: Proof, path: Tuple[int, ...],
                seen: dict) -> None:
    """Validate one node whose premises are already in ``seen``."""
    def go(q: Proof, _path=None) -> Equation:
        return seen[id(q)]

    if True:
        rule = node.rule
        concl = node.conclusion
        if rule == AX:
            if node.premises:
                raise RuleMismatch("Ax takes no premises", path)
            if concl not in pres.axioms:
                raise InvalidAxiom(f"{concl!r} is not an axiom of {pres.name or 'the presentation'}", path)
        elif rule == REFL:
            if node.premises:
                raise RuleMismatch("Refl takes no premises", path)
            if concl.lhs != concl.rhs:
                raise RuleMismatch("Refl conclusion sides differ", path)
        elif rule == SYM:
            if len(node.premises) != 1:
                raise RuleMismatch("Sym takes one premise", path)
            prem = go(node.premises[0], path + (0,))
            if concl != prem.flipped():
                raise RuleMismatch("Sym conclusion is not the flipped premise", path)
        elif rule == TRANS:
            if len(node.premises) != 2:
                raise RuleMismatch("Trans takes two premises", path)
            p1 = go(node.premises[0], path + (0,))
            p2 = go(node.premises[1], path + (1,))
            if p1.context != p2.context:
                raise ContextMismatch("Trans premises live at different contexts", path)
            if p1.rhs != p2.lhs:
                raise RuleMismatch("Trans premises do not share the middle term", path)
            if concl != Equation(p1.lhs, p2.rhs):
                raise RuleMismatch("Trans conclusion does not match premises", path)
        elif rule == CONG:
            if not node.premises:
                raise RuleMismatch("Cong needs a head premise", path)
            if node.outer_lhs is None or node.outer_rhs is None:
                raise RuleMismatch("Cong node is missing its outer terms", path)
            if node.outer_lhs.context != node.outer_rhs.context:
                raise ContextMismatch("Cong outer terms live at different contexts", path)
            k = node.outer_lhs.context
            if len(node.premises) != 1 + k:
                raise RuleMismatch(f"Cong at outer context {k} takes {1 + k} premises", path)
            head = go(node.premises[0], path + (0,))
            if head != Equation(node.outer_lhs, node.outer_rhs):
                raise RuleMismatch("Cong head premise does not prove the outer equation", path)
            args = [go(q, path + (j + 1,)) for j, q in enumerate(node.premises[1:])]
            n = concl.context
            if any(a.context != n for a in args):
                raise ContextMismatch("Cong argument premises do not share the conclusion context", path)
            expect = Equation(
                subst(node.outer_lhs, [a.lhs for a in args], n),
                subst(node.outer_rhs, [a.rhs for a in args], n),
            )
            if concl != expect:
                raise RuleMismatch("Cong conclusion does not match the substitution", path)
        else:
            raise RuleMismatch(f"unknown rule {rule!r}", path)
        seen[id(node)] = concl
