"""Signatures, context-indexed terms and simultaneous substitution.

Terms carry their context arity ``n`` explicitly: ``x1`` in one variable and
``x1`` in two variables are distinct values.  Variables are positional
(1-based), so structural equality is the only term equality.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    ArityMismatch,
    IndexOutOfContext,
    MixedContexts,
    TermSyntaxError,
    UnknownSymbol,
)
from .graded import GradedSet

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_VAR_RE = re.compile(r"x[0-9]+\Z")


@dataclass(frozen=True)
class Signature:
    """A graded set of operation symbols; level n holds the n-ary symbols."""

    operations: GradedSet

    def __post_init__(self):
        for n, name in self.operations.elements():
            if not isinstance(name, str) or not _IDENT_RE.match(name):
                raise ValueError(f"operation name {name!r} is not a valid identifier")
            if _VAR_RE.match(name):
                raise ValueError(f"operation name {name!r} clashes with variable syntax")

    @staticmethod
    def of(symbols: Dict[int, Iterable[str]]) -> "Signature":
        levels = {n: frozenset(names) for n, names in symbols.items()}
        bound = max(levels, default=0)
        return Signature(GradedSet(levels, bound))

    def has(self, name: str, arity: int) -> bool:
        return name in self.operations.level(arity)

    def arities_of(self, name: str) -> Tuple[int, ...]:
        return tuple(n for n in self.operations.arities() if name in self.operations.level(n))

    def symbols(self) -> Tuple[Tuple[int, str], ...]:
        return tuple(self.operations.elements())


@dataclass(frozen=True)
class Term:
    context: int
    var: Optional[int] = None              # 1-based index when a variable
    sym: Optional[str] = None              # operation name when an application
    args: Tuple["Term", ...] = ()
    size: int = field(default=1, compare=False)

    def is_var(self) -> bool:
        return self.var is not None

    def __repr__(self):
        return f"Term({print_term(self)}@{self.context})"


def mk_var(n: int, i: int) -> Term:
    if not 1 <= i <= n:
        raise IndexOutOfContext(f"variable x{i} does not fit context {n}")
    return Term(context=n, var=i)


def _app(n: int, sym: str, args: Tuple[Term, ...]) -> Term:
    return Term(context=n, sym=sym, args=args, size=1 + sum(a.size for a in args))


def mk_app(sig: Signature, sym: str, args: Sequence[Term], context: Optional[int] = None) -> Term:
    """Apply ``sym`` to ``args``.

    For nullary symbols the context cannot be inferred from arguments and must
    be supplied.  All arguments must share one context.
    """
    args = tuple(args)
    k = len(args)
    if not sig.has(sym, k):
        if sig.arities_of(sym):
            raise ArityMismatch(f"symbol {sym!r} has arities {sig.arities_of(sym)}, got {k} arguments")
        raise UnknownSymbol(f"unknown symbol {sym!r}")
    if k == 0:
        if context is None:
            raise MixedContexts("context required for nullary application")
        return _app(context, sym, ())
    n = args[0].context
    if any(a.context != n for a in args):
        raise MixedContexts(f"arguments of {sym!r} have differing contexts")
    if context is not None and context != n:
        raise MixedContexts(f"explicit context {context} differs from argument context {n}")
    return _app(n, sym, args)


def subst(s: Term, ts: Sequence[Term], context: Optional[int] = None) -> Term:
    """Simultaneous substitution of ``ts`` for the context variables of ``s``.

    ``len(ts)`` must equal ``s.context``; for a closed context (k = 0) the
    target context must be passed explicitly.
    """
    ts = tuple(ts)
    if len(ts) != s.context:
        raise ArityMismatch(f"term has context {s.context}, got {len(ts)} substitutes")
    if ts:
        n = ts[0].context
        if any(t.context != n for t in ts):
            raise MixedContexts("substitutes have differing contexts")
        if context is not None and context != n:
            raise MixedContexts("explicit context differs from substitute context")
    else:
        if context is None:
            raise MixedContexts("context required to substitute into a closed term")
        n = context

    def go(t: Term) -> Term:
        if t.var is not None:
            return ts[t.var - 1]
        return _app(n, t.sym, tuple(go(a) for a in t.args))

    return go(s)


def retag(t: Term, n: int) -> Term:
    """Reinterpret ``t`` at a wider context ``n`` (all variables must fit)."""
    if t.context == n:
        return t
    if t.var is not None:
        return mk_var(n, t.var)
    return _app(n, t.sym, tuple(retag(a, n) for a in t.args))


def used_vars(t: Term) -> FrozenSet[int]:
    if t.var is not None:
        return frozenset((t.var,))
    out = frozenset()
    for a in t.args:
        out |= used_vars(a)
    return out


def var_occurrences(t: Term) -> Dict[int, int]:
    occ: Dict[int, int] = {}

    def go(u: Term):
        if u.var is not None:
            occ[u.var] = occ.get(u.var, 0) + 1
        else:
            for a in u.args:
                go(a)

    go(t)
    return occ


def term_key(t: Term):
    """Total order on terms of one context: node count, then preorder tokens
    with variables (ordered by index) before operation symbols."""
    tokens: List[Tuple[int, object]] = []

    def go(u: Term):
        if u.var is not None:
            tokens.append((0, u.var))
        else:
            tokens.append((1, u.sym))
            for a in u.args:
                go(a)

    go(t)
    return (t.size, tuple(tokens))


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def __post_init__(self):
        if self.lhs.context != self.rhs.context:
            raise MixedContexts("equation sides have differing contexts")

    @property
    def context(self) -> int:
        return self.lhs.context

    def flipped(self) -> "Equation":
        return Equation(self.rhs, self.lhs)

    def __repr__(self):
        return f"Equation({print_term(self.lhs)} = {print_term(self.rhs)} @{self.context})"


@dataclass(frozen=True)
class Presentation:
    signature: Signature
    axioms: Tuple[Equation, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        for eq in self.axioms:
            for side in (eq.lhs, eq.rhs):
                _check_over(side, self.signature)


def _check_over(t: Term, sig: Signature):
    if t.var is not None:
        return
    if not sig.has(t.sym, len(t.args)):
        raise UnknownSymbol(f"term uses {t.sym!r}/{len(t.args)} outside the signature")
    for a in t.args:
        _check_over(a, sig)


def enum_terms(sig: Signature, n: int, max_size: int) -> List[Term]:
    """All well-formed terms of context ``n`` with at most ``max_size`` nodes.

    Returned sorted by ``term_key``; duplicate-free by construction.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    by_size: List[List[Term]] = [[] for _ in range(max_size + 1)]
    by_size[1] = [mk_var(n, i) for i in range(1, n + 1)]
    symbols = sig.symbols()
    for k, name in symbols:
        if k == 0:
            by_size[1].append(_app(n, name, ()))
    for size in range(2, max_size + 1):
        bucket = by_size[size]
        for k, name in symbols:
            if k == 0:
                continue
            budget = size - 1
            if budget < k:
                continue
            for combo in _size_splits(budget, k):
                for args in _arg_product(by_size, combo):
                    bucket.append(_app(n, name, args))
    out = [t for b in by_size for t in b]
    out.sort(key=term_key)
    return out


def _size_splits(total: int, parts: int):
    """Compositions of ``total`` into ``parts`` positive integers."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _size_splits(total - first, parts - 1):
            yield (first,) + rest


def _arg_product(by_size, combo):
    pools = [by_size[s] for s in combo]
    if any(not p for p in pools):
        return
    idx = [0] * len(pools)
    while True:
        yield tuple(pools[j][idx[j]] for j in range(len(pools)))
        j = len(pools) - 1
        while j >= 0:
            idx[j] += 1
            if idx[j] < len(pools[j]):
                break
            idx[j] = 0
            j -= 1
        if j < 0:
            return


# ---------------------------------------------------------------------------
# concrete syntax: term := var | sym | sym "(" term ("," term)* ")"

def print_term(t: Term) -> str:
    if t.var is not None:
        return f"x{t.var}"
    if not t.args:
        return t.sym
    return f"{t.sym}({','.join(print_term(a) for a in t.args)})"


class _Tokens:
    def __init__(self, text: str):
        self.toks = re.findall(r"[A-Za-z_][A-Za-z0-9_]*|[(),]|\S", text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise TermSyntaxError("unexpected end of input")
        self.pos += 1
        return tok


def parse_term(sig: Signature, n: int, text: str) -> Term:
    toks = _Tokens(text)
    term = _parse(toks, sig, n)
    if toks.peek() is not None:
        raise TermSyntaxError(f"trailing input at {toks.peek()!r}")
    return term


def _parse(toks: _Tokens, sig: Signature, n: int) -> Term:
    tok = toks.next()
    if _VAR_RE.match(tok):
        i = int(tok[1:])
        return mk_var(n, i)
    if not _IDENT_RE.match(tok):
        raise TermSyntaxError(f"unexpected token {tok!r}")
    if toks.peek() == "(":
        toks.next()
        args = [_parse(toks, sig, n)]
        while toks.peek() == ",":
            toks.next()
            args.append(_parse(toks, sig, n))
        if toks.next() != ")":
            raise TermSyntaxError("expected ')'")
        return mk_app(sig, tok, args, context=n)
    # bare symbol: nullary application
    if not sig.has(tok, 0):
        if sig.arities_of(tok):
            raise ArityMismatch(f"symbol {tok!r} is not nullary; arguments required")
        raise UnknownSymbol(f"unknown symbol {tok!r}")
    return mk_app(sig, tok, (), context=n)
