"""Bounded congruence saturation over the term universe of one context.

The engine enumerates every term of context ``n`` up to ``max_term_size``
nodes, instantiates the presentation's axioms with tuples of universe terms
(keeping both instantiated sides inside the size budget), and closes the
resulting ground equations under congruence with a union-find plus signature
table.  Small equalities discovered along the way are promoted to new
rewrite-free "lemma rules" and re-instantiated, up to ``max_rounds`` rounds.

Every merge records a proof-forest edge, so any two terms in one class can be
explained by a checkable proof tree built from the five rules.
"""
from __future__ import annotations

from array import array
from typing import Dict, List, Optional, Tuple

from .errors import UniverseEscape
from .limits import Limits
from .proofs import Proof, ax, cong, refl, sym, trans_chain
from .terms import (
    Equation,
    Presentation,
    Term,
    enum_terms,
    mk_var,
    used_vars,
    var_occurrences,
)

LEMMA_SIZE_CAP = 7
MAX_RULES = 4000
# On very large universes, lemma rules are instantiated only with small
# substituents; congruence propagation recovers the deep consequences.
LEMMA_SUBST_CAP = 3
LARGE_UNIVERSE = 100_000
_ENGINE_CACHE_SIZE = 8


class _Rule:
    """An equation scheme to instantiate: two terms over context k, with a
    lazily built proof of the scheme itself."""

    __slots__ = ("lhs", "rhs", "origin", "instances")

    def __init__(self, lhs: Term, rhs: Term, origin):
        self.lhs = lhs
        self.rhs = rhs
        self.origin = origin        # ("ax", index) or ("lemma", idx, rep_idx)
        self.instances = None       # cached flat array [l0, r0, l1, r1, ...]


def _canon_pattern(lhs: Term, rhs: Term) -> str:
    """Render the pair with variables renamed in order of first occurrence,
    so alpha-equivalent rules get one key."""
    names: Dict[int, str] = {}

    def go(t: Term, out: List[str]):
        if t.var is not None:
            if t.var not in names:
                names[t.var] = f"v{len(names) + 1}"
            out.append(names[t.var])
        else:
            out.append(t.sym)
            if t.args:
                out.append("(")
                for a in t.args:
                    go(a, out)
                    out.append(",")
                out.append(")")

    buf: List[str] = []
    go(lhs, buf)
    buf.append("=")
    go(rhs, buf)
    return "".join(buf)


def _rule_key(lhs: Term, rhs: Term) -> str:
    return min(_canon_pattern(lhs, rhs), _canon_pattern(rhs, lhs))


class SaturationEngine:
    def __init__(self, pres: Presentation, context: int, limits: Limits):
        self.pres = pres
        self.n = context
        self.limits = limits
        sig = pres.signature
        self.universe: List[Term] = enum_terms(sig, context, limits.max_term_size)
        self.index: Dict[Term, int] = {t: i for i, t in enumerate(self.universe)}
        N = len(self.universe)
        self.by_size: List[List[int]] = [[] for _ in range(limits.max_term_size + 1)]
        for i, t in enumerate(self.universe):
            self.by_size[t.size].append(i)

        self.parent = list(range(N))
        self.csize = [1] * N
        self.members: List[Optional[List[int]]] = [[i] for i in range(N)]
        self.children: List[Optional[Tuple[int, ...]]] = [None] * N
        self.parents_of: List[List[int]] = [[] for _ in range(N)]
        self.sigtab: Dict[tuple, int] = {}
        for i, t in enumerate(self.universe):
            if t.var is None:
                kids = tuple(self.index[a] for a in t.args)
                self.children[i] = kids
                for c in set(kids):
                    self.parents_of[c].append(i)
                self.sigtab[(t.sym, kids)] = i
        # immutable (symbol, child indices) -> index map for fast instancing;
        # sigtab itself mutates during congruence propagation
        self._app_index = dict(self.sigtab)

        # proof forest: pf_parent[i] -> tree parent; pf_edge[i] = (u, v, reason)
        # with {u, v} == {i, pf_parent[i]} and the reason proving u = v
        self.pf_parent: Dict[int, int] = {}
        self.pf_edge: Dict[int, tuple] = {}

        self.rules: List[_Rule] = []
        self.rule_keys = set()
        for i, axiom in enumerate(pres.axioms):
            self._add_rule(axiom.lhs, axiom.rhs, ("ax", i))
        self._rule_proofs: Dict[int, Proof] = {}
        self._explain_memo: Dict[Tuple[int, int], Proof] = {}
        self.rounds_used = 0
        self._ran = False

    # ---------------------------------------------------------------- basics

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def term_index(self, t: Term) -> int:
        i = self.index.get(t)
        if i is None:
            raise UniverseEscape(
                f"{t!r} exceeds the term universe (size budget {self.limits.max_term_size})"
            )
        return i

    def same_class(self, s: Term, t: Term) -> bool:
        self.run()
        return self.find(self.term_index(s)) == self.find(self.term_index(t))

    # ----------------------------------------------------------------- rules

    def _add_rule(self, lhs: Term, rhs: Term, origin) -> bool:
        if lhs == rhs or len(self.rules) >= MAX_RULES:
            return False
        key = _rule_key(lhs, rhs)
        if key in self.rule_keys:
            return False
        self.rule_keys.add(key)
        self.rules.append(_Rule(lhs, rhs, origin))
        return True

    def _compile_pattern(self, t: Term):
        """Pattern -> function from index tuples (one per context variable)
        to the universe index of the substituted term."""
        app_index = self._app_index
        if t.var is not None:
            i = t.var - 1
            return lambda ts: ts[i]
        if not t.args:
            j = app_index[(t.sym, ())]
            return lambda ts: j
        kids = [self._compile_pattern(a) for a in t.args]
        sym_name = t.sym
        return lambda ts: app_index[(sym_name, tuple(f(ts) for f in kids))]

    def _rule_instances(self, rule: _Rule):
        if rule.instances is not None:
            return rule.instances
        out = array("i")
        lhs, rhs = rule.lhs, rule.rhs
        k = lhs.context
        occ_l = var_occurrences(lhs)
        occ_r = var_occurrences(rhs)
        used = sorted(used_vars(lhs) | used_vars(rhs))
        base_l = lhs.size - sum(occ_l.values())
        base_r = rhs.size - sum(occ_r.values())
        M = self.limits.max_term_size
        if not self.universe or base_l > M or base_r > M:
            rule.instances = out
            return out
        vcap = M
        if rule.origin[0] == "lemma" and len(self.universe) > LARGE_UNIVERSE:
            vcap = LEMMA_SUBST_CAP
        f_l = self._compile_pattern(lhs)
        f_r = self._compile_pattern(rhs)
        # unused positions get the smallest term; heaviest variables first
        weight = {v: occ_l.get(v, 0) + occ_r.get(v, 0) for v in used}
        order = sorted(used, key=lambda v: -weight[v])
        chosen: Dict[int, int] = {}

        def assign(pos: int, size_l: int, size_r: int):
            if pos == len(order):
                ts = tuple(chosen.get(v, 0) for v in range(1, k + 1))
                out.append(f_l(ts))
                out.append(f_r(ts))
                return
            v = order[pos]
            wl, wr = occ_l.get(v, 0), occ_r.get(v, 0)
            # remaining variables still need at least one node each
            min_rest_l = sum(occ_l.get(u, 0) for u in order[pos + 1:])
            min_rest_r = sum(occ_r.get(u, 0) for u in order[pos + 1:])
            cap = vcap
            if wl:
                cap = min(cap, (M - size_l - min_rest_l) // wl)
            if wr:
                cap = min(cap, (M - size_r - min_rest_r) // wr)
            for s in range(1, cap + 1):
                for i in self.by_size[s]:
                    chosen[v] = i
                    assign(pos + 1, size_l + wl * s, size_r + wr * s)
            chosen.pop(v, None)

        assign(0, base_l, base_r)
        rule.instances = out
        return out

    # ---------------------------------------------------------------- merges

    def _pf_link(self, a: int, b: int, reason: tuple):
        # reverse a's path to its tree root, then hang a under b
        chain = [a]
        while chain[-1] in self.pf_parent:
            chain.append(self.pf_parent[chain[-1]])
        for i in range(len(chain) - 1, 0, -1):
            self.pf_parent[chain[i]] = chain[i - 1]
            self.pf_edge[chain[i]] = self.pf_edge[chain[i - 1]]
        self.pf_parent[a] = b
        self.pf_edge[a] = (a, b, reason)

    def _merge(self, a: int, b: int, reason: tuple) -> bool:
        work = [(a, b, reason)]
        did = False
        while work:
            a, b, reason = work.pop()
            ra, rb = self.find(a), self.find(b)
            if ra == rb:
                continue
            did = True
            self._pf_link(a, b, reason)
            if self.csize[ra] < self.csize[rb]:
                ra, rb = rb, ra
            small = self.members[rb]
            self.parent[rb] = ra
            self.csize[ra] += self.csize[rb]
            self.members[ra].extend(small)
            self.members[rb] = None
            touched = set()
            for t in small:
                for p in self.parents_of[t]:
                    if p in touched:
                        continue
                    touched.add(p)
                    key = (self.universe[p].sym,
                           tuple(self.find(c) for c in self.children[p]))
                    q = self.sigtab.get(key)
                    if q is None:
                        self.sigtab[key] = p
                    elif self.find(q) != self.find(p):
                        work.append((p, q, ("cong",)))
        return did

    # ------------------------------------------------------------ saturation

    def run(self) -> "SaturationEngine":
        if self._ran:
            return self
        self._ran = True
        changed = True
        while changed and self.rounds_used < max(1, self.limits.max_rounds):
            self.rounds_used += 1
            changed = False
            for ridx, rule in enumerate(list(self.rules)):
                pairs = self._rule_instances(rule)
                for j in range(0, len(pairs), 2):
                    ia, ib = pairs[j], pairs[j + 1]
                    if self.find(ia) != self.find(ib):
                        if self._merge(ia, ib, ("rule", ridx)):
                            changed = True
            if self._promote_lemmas():
                changed = True
        return self

    def _promote_lemmas(self) -> bool:
        new = False
        for root in range(len(self.universe)):
            members = self.members[root]
            if members is None or len(members) < 2:
                continue
            rep = min(members)  # universe index order is the term order
            rep_t = self.universe[rep]
            if rep_t.size > LEMMA_SIZE_CAP:
                continue
            for j in members:
                if j == rep or self.universe[j].size > LEMMA_SIZE_CAP:
                    continue
                if self._add_rule(self.universe[j], rep_t, ("lemma", j, rep)):
                    new = True
        return new

    # --------------------------------------------------------------- classes

    def class_partition(self) -> List[List[int]]:
        """Classes as sorted index lists, ordered by representative."""
        self.run()
        out = []
        for root in range(len(self.universe)):
            members = self.members[root]
            if members is not None:
                out.append(sorted(members))
        out.sort(key=lambda ms: ms[0])
        return out

    def rep_term(self, t: Term) -> Term:
        self.run()
        root = self.find(self.term_index(t))
        return self.universe[min(self.members[root])]

    # ---------------------------------------------------------------- proofs

    def _rule_proof(self, ridx: int) -> Proof:
        p = self._rule_proofs.get(ridx)
        if p is None:
            origin = self.rules[ridx].origin
            if origin[0] == "ax":
                p = ax(self.pres.axioms[origin[1]])
            else:
                p = self.explain(origin[1], origin[2])
            self._rule_proofs[ridx] = p
        return p

    def _match(self, pat: Term, idx: int, out: Dict[int, int]):
        """Recover the substitution indices from an exact rule instance."""
        if pat.var is not None:
            out[pat.var] = idx
            return
        for p_arg, c in zip(pat.args, self.children[idx]):
            self._match(p_arg, c, out)

    def _edge_proof(self, u: int, v: int, reason: tuple) -> Proof:
        """Proof that universe[u] = universe[v] for one forest edge."""
        if reason[0] == "rule":
            ridx = reason[1]
            rule = self.rules[ridx]
            chosen: Dict[int, int] = {}
            self._match(rule.lhs, u, chosen)
            self._match(rule.rhs, v, chosen)
            ts = [chosen.get(x, 0) for x in range(1, rule.lhs.context + 1)]
            return cong(rule.lhs, rule.rhs, self._rule_proof(ridx),
                        [refl(self.universe[i]) for i in ts], context=self.n)
        # congruence edge: same symbol, argument-wise equal children
        tu, tv = self.universe[u], self.universe[v]
        k = len(tu.args)
        head_l = Term(context=k, sym=tu.sym,
                      args=tuple(mk_var(k, i) for i in range(1, k + 1)),
                      size=k + 1)
        arg_proofs = [self.explain(self.index[tu.args[i]], self.index[tv.args[i]])
                      for i in range(k)]
        return cong(head_l, head_l, refl(head_l), arg_proofs, context=self.n)

    def explain(self, a: int, b: int) -> Proof:
        """A checkable proof that universe[a] = universe[b]; they must have
        been merged already."""
        if a == b:
            return refl(self.universe[a])
        key = (a, b)
        memo = self._explain_memo.get(key)
        if memo is not None:
            return memo
        # walk both to the forest root, cut at the lowest common ancestor
        up_a = [a]
        while up_a[-1] in self.pf_parent:
            up_a.append(self.pf_parent[up_a[-1]])
        seen = {x: d for d, x in enumerate(up_a)}
        up_b = [b]
        while up_b[-1] not in seen:
            if up_b[-1] not in self.pf_parent:
                raise ValueError("terms are not in one class")
            up_b.append(self.pf_parent[up_b[-1]])
        lca = up_b[-1]
        steps: List[Proof] = []
        for x in up_a[: seen[lca]]:
            steps.append(self._oriented_edge(x))
        for x in reversed(up_b[:-1]):
            steps.append(sym(self._oriented_edge(x)))
        proof = trans_chain(steps)
        assert proof.conclusion == Equation(self.universe[a], self.universe[b])
        self._explain_memo[key] = proof
        return proof

    def _oriented_edge(self, x: int) -> Proof:
        """Proof of universe[x] = universe[pf_parent[x]]."""
        u, v, reason = self.pf_edge[x]
        p = self._edge_proof(u, v, reason)
        if x == u:
            return p
        return sym(p)


_engine_cache: "dict[tuple, SaturationEngine]" = {}


def get_engine(pres: Presentation, context: int, limits: Limits) -> SaturationEngine:
    """Saturated engines are expensive; reuse them across queries."""
    key = (pres.signature.symbols(), pres.axioms, context, limits)
    eng = _engine_cache.get(key)
    if eng is None:
        eng = SaturationEngine(pres, context, limits).run()
        while len(_engine_cache) >= _ENGINE_CACHE_SIZE:
            _engine_cache.pop(next(iter(_engine_cache)))
        _engine_cache[key] = eng
    return eng
