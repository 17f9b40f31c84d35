"""Random generator of *accepted* proof trees, shared by the proof-checker
unit tests and the soundness harness.

Every move below is validity-preserving, so the output is always a correct
proof; the point is to exercise the checker and the soundness of the rule
set on many shapes.
"""
from __future__ import annotations

import random
from typing import List

from clonelab.proofs import Proof, ax, cong, refl, sym, trans
from clonelab.terms import Presentation, enum_terms


def random_proofs(rng: random.Random, pres: Presentation, count: int,
                  max_context: int = 3) -> List[Proof]:
    """Grow pools of valid proofs per context, one new proof per move."""
    term_pool = {n: enum_terms(pres.signature, n, 4)
                 for n in range(max_context + 1)}
    pools: dict = {n: [] for n in range(max_context + 1)}
    for eq in pres.axioms:
        if eq.context <= max_context:
            pools[eq.context].append(ax(eq))
    for n, terms in term_pool.items():
        if terms:
            pools[n].append(refl(rng.choice(terms)))
    grounded = [n for n in pools if term_pool[n]]
    live = [n for n in pools if pools[n]]
    out: List[Proof] = []
    while len(out) < count:
        move = rng.randrange(4)
        n = rng.choice(live)
        p = rng.choice(pools[n])
        if move == 0:
            q = sym(p)
        elif move == 1:
            # p proves l = r, sym(p) proves r = l, so the chain proves l = l
            q = trans(p, sym(p))
        elif move == 2:
            q = trans(refl(p.conclusion.lhs), p)
        else:
            # congruence: substitute argument proofs into the outer equation
            k = p.conclusion.context
            m = rng.choice(grounded)
            args = [rng.choice(pools[m]) if rng.random() < 0.5
                    else refl(rng.choice(term_pool[m]))
                    for _ in range(k)]
            q = cong(p.conclusion.lhs, p.conclusion.rhs, p, args, context=m)
            n = m
        if q.conclusion.lhs.size + q.conclusion.rhs.size > 300:
            continue  # keep conclusions cheap to evaluate in models
        pools[n].append(q)
        if n not in live:
            live.append(n)
        out.append(q)
    return out
