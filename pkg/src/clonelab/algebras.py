"""Finite algebras as flat operation tables, term interpretation, model and
homomorphism checks, and bounded countermodel search.

Carrier elements are 0..m-1.  A k-ary table is a flat tuple of length m**k in
row-major order of the argument tuple (last argument varies fastest).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import EmptyCarrierWithNullary, NotATotalMap, SignatureMismatch
from .terms import Equation, Presentation, Signature, Term


@dataclass(frozen=True)
class TupleFunction:
    """A function A^n -> A on the carrier 0..m-1, stored as a flat table."""

    domain_arity: int
    carrier_size: int
    table: Tuple[int, ...]

    def __post_init__(self):
        m, n = self.carrier_size, self.domain_arity
        if len(self.table) != m ** n:
            raise ValueError(f"table length {len(self.table)} != {m}**{n}")
        if any(not 0 <= v < m for v in self.table):
            raise ValueError("table entry out of carrier range")

    def apply(self, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.carrier_size + a
        return self.table[idx]


@dataclass(frozen=True)
class FiniteAlgebra:
    signature: Signature
    carrier_size: int
    tables: Dict[Tuple[int, str], Tuple[int, ...]]
    name: str = ""

    def __post_init__(self):
        m = self.carrier_size
        norm = {}
        for k, sym in self.signature.symbols():
            if (k, sym) not in self.tables:
                raise SignatureMismatch(f"missing table for {sym!r}/{k}")
            table = tuple(self.tables[(k, sym)])
            if k == 0 and m == 0:
                raise EmptyCarrierWithNullary(
                    f"nullary symbol {sym!r} has no interpretation on the empty carrier"
                )
            if len(table) != m ** k:
                raise ValueError(f"table for {sym!r}/{k} has wrong length")
            if any(not 0 <= v < m for v in table):
                raise ValueError(f"table for {sym!r}/{k} has out-of-range entries")
            norm[(k, sym)] = table
        extra = set(self.tables) - set(norm)
        if extra:
            raise SignatureMismatch(f"tables for symbols outside the signature: {sorted(extra)}")
        object.__setattr__(self, "tables", norm)

    def table(self, sym: str, arity: int) -> Tuple[int, ...]:
        return self.tables[(arity, sym)]

    def op(self, sym: str, arity: int) -> TupleFunction:
        return TupleFunction(arity, self.carrier_size, self.table(sym, arity))


def _check_signature(alg: FiniteAlgebra, t: Term):
    if t.var is None:
        if (len(t.args), t.sym) not in alg.tables:
            raise SignatureMismatch(f"term symbol {t.sym!r}/{len(t.args)} not in algebra signature")
        for a in t.args:
            _check_signature(alg, a)


def interpret(alg: FiniteAlgebra, t: Term, _memo: Optional[dict] = None) -> TupleFunction:
    """Interpretation of a term as a TupleFunction, by structural recursion
    with memoization of subterm tables."""
    _check_signature(alg, t)
    m, n = alg.carrier_size, t.context
    memo = {} if _memo is None else _memo

    def go(u: Term) -> Tuple[int, ...]:
        cached = memo.get(u)
        if cached is not None:
            return cached
        if u.var is not None:
            # i-th projection: digit i of the row-major index
            i = u.var
            shift = m ** (n - i)
            table = tuple((idx // shift) % m for idx in range(m ** n))
        else:
            sym_table = alg.table(u.sym, len(u.args))
            child = [go(a) for a in u.args]
            out = []
            for idx in range(m ** n):
                j = 0
                for tab in child:
                    j = j * m + tab[idx]
                out.append(sym_table[j])
            table = tuple(out)
        memo[u] = table
        return table

    return TupleFunction(n, m, go(t))


def satisfies(alg: FiniteAlgebra, eq: Equation) -> bool:
    memo: dict = {}
    return interpret(alg, eq.lhs, memo).table == interpret(alg, eq.rhs, memo).table


def is_model(alg: FiniteAlgebra, pres: Presentation) -> bool:
    if alg.signature != pres.signature:
        raise SignatureMismatch("algebra and presentation signatures differ")
    return all(satisfies(alg, eq) for eq in pres.axioms)


def is_homomorphism(
    f: Union[Sequence[int], Dict[int, int]],
    a: FiniteAlgebra,
    b: FiniteAlgebra,
) -> bool:
    if a.signature != b.signature:
        raise SignatureMismatch("algebras have different signatures")
    mA, mB = a.carrier_size, b.carrier_size
    try:
        fmap = [f[x] for x in range(mA)]
    except (KeyError, IndexError):
        raise NotATotalMap(f"map is not total on 0..{mA - 1}")
    if any(not 0 <= y < mB for y in fmap):
        raise NotATotalMap("map has values outside the target carrier")
    for (k, sym), ta in a.tables.items():
        tb = b.tables[(k, sym)]
        for args in itertools.product(range(mA), repeat=k):
            ia = 0
            for x in args:
                ia = ia * mA + x
            ib = 0
            for x in args:
                ib = ib * mB + fmap[x]
            if fmap[ta[ia]] != tb[ib]:
                return False
    return True


def _sorted_symbols(sig: Signature) -> List[Tuple[int, str]]:
    return sorted(sig.symbols())


def _enum_tables(sig: Signature, m: int) -> Iterator[Dict[Tuple[int, str], Tuple[int, ...]]]:
    """Raw table assignments in lexicographic order of concatenated tables,
    symbols ordered by (arity, name)."""
    symbols = _sorted_symbols(sig)
    if m == 0 and any(k == 0 for k, _ in symbols):
        raise EmptyCarrierWithNullary("no nullary operation exists on the empty carrier")
    pools = [
        list(itertools.product(range(m), repeat=m ** k)) if m > 0 else [()]
        for k, _ in symbols
    ]
    # m = 0, k = 0 cannot happen (guarded above); m = 0, k >= 1 gives the empty table
    if m == 0:
        pools = [[()] for _ in symbols]
    for assignment in itertools.product(*pools):
        yield {key: table for key, table in zip(symbols, assignment)}


def enumerate_algebras(sig: Signature, m: int) -> Iterator[FiniteAlgebra]:
    """All algebras on carrier 0..m-1 in lexicographic table order."""
    for tables in _enum_tables(sig, m):
        yield FiniteAlgebra(sig, m, tables, name=f"enum{m}")


# ---------------------------------------------------------------------------
# bounded semantic consequence


@dataclass(frozen=True)
class Countermodel:
    algebra: FiniteAlgebra
    witness: Tuple[int, ...]

    holds: bool = field(default=False, init=False)


@dataclass(frozen=True)
class HoldsUpTo:
    max_size: int

    holds: bool = field(default=True, init=False)


Verdict = Union[Countermodel, HoldsUpTo]


def _compile_eval(t: Term):
    """Compile a term to eval(tables, m, args) -> value for fast scanning."""
    if t.var is not None:
        i = t.var - 1
        return lambda tables, m, args: args[i]
    key = (len(t.args), t.sym)
    child = [_compile_eval(a) for a in t.args]
    if not child:
        return lambda tables, m, args: tables[key][0]

    def ev(tables, m, args):
        idx = 0
        for c in child:
            idx = idx * m + c(tables, m, args)
        return tables[key][idx]

    return ev


def _eq_violation(tables, m: int, eq: Equation, lhs_ev, rhs_ev) -> Optional[Tuple[int, ...]]:
    for args in itertools.product(range(m), repeat=eq.context):
        if lhs_ev(tables, m, args) != rhs_ev(tables, m, args):
            return args
    return None


def semantic_consequence_bounded(pres: Presentation, eq: Equation, max_size: int) -> Verdict:
    """Search all models of ``pres`` on carriers 1..max_size for one violating
    ``eq``.  Sound refuter, bounded verifier: HoldsUpTo is not a proof."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    # cheapest axioms first: fewer argument tuples to check
    axioms = sorted(pres.axioms, key=lambda a: a.context)
    compiled = [(ax, _compile_eval(ax.lhs), _compile_eval(ax.rhs)) for ax in axioms]
    goal = (eq, _compile_eval(eq.lhs), _compile_eval(eq.rhs))
    for m in range(1, max_size + 1):
        for tables in _enum_tables(pres.signature, m):
            if any(_eq_violation(tables, m, ax, le, re) is not None for ax, le, re in compiled):
                continue
            witness = _eq_violation(tables, m, goal[0], goal[1], goal[2])
            if witness is not None:
                alg = FiniteAlgebra(pres.signature, m, tables, name=f"countermodel{m}")
                return Countermodel(alg, witness)
    return HoldsUpTo(max_size)
