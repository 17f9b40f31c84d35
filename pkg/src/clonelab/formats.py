"""Plain-text file formats: presentations, algebras, proof scripts, and
explicit clones.

All formats are line-oriented UTF-8 with '#' comments, designed to diff
cleanly:

* presentation::

    sig m 2
    axiom @1 m(x1,e) = x1

* algebra::

    carrier 2
    table m 0 1 1 0        # row-major, last argument varies fastest

* proof scripts are s-expression trees, term literals double-quoted::

    (trans (ax 1) (sym (ax 0)))
    (refl @1 "x1")
    (cong "m(x1,x2)" "m(x1,x2)" (refl @2 "m(x1,x2)") (ax 0) (refl @1 "e"))

  ``refl`` carries the context of its term; ``cong`` infers the outer context
  from its premise count and the inner context from its argument premises,
  with an explicit ``@N`` marker when there are none.

* explicit clone::

    arity 1 f1_0
    proj 1 1 f1_0
    compose f1_0 1 f1_0 f1_0   # phi, target arity, thetas..., result
"""
from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .algebras import FiniteAlgebra
from .errors import CloneLabError, FormatError
from .proofs import AX, CONG, REFL, SYM, TRANS, Proof, ax, cong, refl, sym, trans
from .terms import (
    Equation,
    Presentation,
    Signature,
    Term,
    parse_term,
    print_term,
)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


# ---------------------------------------------------------------------------
# presentations

_AXIOM_RE = re.compile(r"axiom\s+@(\d+)\s+(.*?)\s*=\s*(.*)\Z")


def parse_presentation(text: str, name: str = "") -> Presentation:
    symbols: Dict[int, List[str]] = {}
    axiom_lines: List[Tuple[int, int, str, str]] = []
    for lineno, line in _content_lines(text):
        if line.startswith("sig "):
            parts = line.split()
            if len(parts) != 3:
                raise FormatError("expected 'sig NAME ARITY'", lineno)
            try:
                arity = int(parts[2])
            except ValueError:
                raise FormatError(f"bad arity {parts[2]!r}", lineno)
            symbols.setdefault(arity, []).append(parts[1])
        elif line.startswith("axiom "):
            m = _AXIOM_RE.match(line)
            if not m:
                raise FormatError("expected 'axiom @N LHS = RHS'", lineno)
            axiom_lines.append((lineno, int(m.group(1)), m.group(2), m.group(3)))
        else:
            raise FormatError(f"unrecognized line {line!r}", lineno)
    try:
        sig = Signature.of(symbols)
    except (CloneLabError, ValueError) as ex:
        raise FormatError(str(ex))
    axioms = []
    for lineno, n, lhs, rhs in axiom_lines:
        try:
            axioms.append(Equation(parse_term(sig, n, lhs), parse_term(sig, n, rhs)))
        except CloneLabError as ex:
            raise FormatError(str(ex), lineno)
    return Presentation(sig, tuple(axioms), name=name)


def serialize_presentation(pres: Presentation) -> str:
    out = [f"sig {name} {arity}" for arity, name in pres.signature.symbols()]
    for eq in pres.axioms:
        out.append(f"axiom @{eq.context} {print_term(eq.lhs)} = {print_term(eq.rhs)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# algebras


def parse_algebra(text: str, sig: Optional[Signature] = None,
                  name: str = "") -> FiniteAlgebra:
    """Parse an algebra file.  Arities are taken from ``sig`` when given, else
    inferred from table lengths (unambiguous for carrier sizes >= 2)."""
    carrier: Optional[int] = None
    raw_tables: List[Tuple[int, str, Tuple[int, ...]]] = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        if parts[0] == "carrier":
            if len(parts) != 2:
                raise FormatError("expected 'carrier M'", lineno)
            try:
                carrier = int(parts[1])
            except ValueError:
                raise FormatError(f"bad carrier size {parts[1]!r}", lineno)
        elif parts[0] == "table":
            if carrier is None:
                raise FormatError("table before carrier declaration", lineno)
            if len(parts) < 2:
                raise FormatError("expected 'table NAME v0 v1 ...'", lineno)
            try:
                values = tuple(int(v) for v in parts[2:])
            except ValueError:
                raise FormatError("non-integer table entry", lineno)
            raw_tables.append((lineno, parts[1], values))
        else:
            raise FormatError(f"unrecognized line {line!r}", lineno)
    if carrier is None:
        raise FormatError("missing 'carrier M' line")
    tables: Dict[Tuple[int, str], Tuple[int, ...]] = {}
    symbols: Dict[int, List[str]] = {}
    for lineno, sym_name, values in raw_tables:
        arity = _table_arity(sym_name, len(values), carrier, sig, lineno)
        tables[(arity, sym_name)] = values
        symbols.setdefault(arity, []).append(sym_name)
    use_sig = sig if sig is not None else Signature.of(symbols)
    try:
        return FiniteAlgebra(use_sig, carrier, tables, name=name)
    except (CloneLabError, ValueError) as ex:
        raise FormatError(str(ex))


def _table_arity(sym_name: str, length: int, m: int,
                 sig: Optional[Signature], lineno: int) -> int:
    if sig is not None:
        arities = sig.arities_of(sym_name)
        if not arities:
            raise FormatError(f"symbol {sym_name!r} not in the signature", lineno)
        for k in arities:
            if m ** k == length:
                return k
        raise FormatError(
            f"table for {sym_name!r} has {length} entries; expected m^k", lineno)
    if m >= 2:
        k, size = 0, 1
        while size < length:
            size *= m
            k += 1
        if size != length:
            raise FormatError(f"table length {length} is not a power of {m}", lineno)
        return k
    raise FormatError(
        f"cannot infer arity of {sym_name!r} on carrier {m} without a signature",
        lineno)


def serialize_algebra(alg: FiniteAlgebra) -> str:
    out = [f"carrier {alg.carrier_size}"]
    for (arity, sym_name), table in sorted(alg.tables.items()):
        out.append("table " + " ".join([sym_name] + [str(v) for v in table]))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# proof scripts


def _sexp_tokens(text: str) -> List[str]:
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    return re.findall(r'"[^"]*"|[()]|[^()\s"]+', body)


class _SexpParser:
    def __init__(self, tokens: List[str], pres: Presentation):
        self.toks = tokens
        self.pos = 0
        self.pres = pres
        self.env: dict = {}     # (def NAME EXPR) bindings

    def peek(self) -> Optional[str]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self) -> str:
        tok = self.peek()
        if tok is None:
            raise FormatError("unexpected end of proof script")
        self.pos += 1
        return tok

    def expect(self, tok: str):
        got = self.next()
        if got != tok:
            raise FormatError(f"expected {tok!r}, got {got!r}")

    def _context_marker(self) -> int:
        tok = self.next()
        if not tok.startswith("@"):
            raise FormatError(f"expected context marker @N, got {tok!r}")
        try:
            return int(tok[1:])
        except ValueError:
            raise FormatError(f"bad context marker {tok!r}")

    def parse(self, top: bool = False) -> Optional[Proof]:
        self.expect("(")
        head = self.next()
        if head == "def":
            if not top:
                raise FormatError("def is only allowed at the top level")
            name = self.next()
            if name in ("(", ")"):
                raise FormatError("def needs a name")
            self.env[name] = self.parse()
            self.expect(")")
            return None
        if head == "ref":
            name = self.next()
            node = self.env.get(name)
            if node is None:
                raise FormatError(f"undefined proof reference {name!r}")
        elif head == "ax":
            idx_tok = self.next()
            try:
                idx = int(idx_tok)
            except ValueError:
                raise FormatError(f"bad axiom index {idx_tok!r}")
            if not 0 <= idx < len(self.pres.axioms):
                raise FormatError(f"axiom index {idx} out of range")
            node = ax(self.pres.axioms[idx])
        elif head == "refl":
            n = self._context_marker()
            term_tok = self.next()
            node = refl(self._term(n, term_tok))
        elif head == "sym":
            node = sym(self.parse())
        elif head == "trans":
            node = trans(self.parse(), self.parse())
        elif head == "cong":
            node = self._parse_cong()
        else:
            raise FormatError(f"unknown proof rule {head!r}")
        self.expect(")")
        return node

    def _parse_cong(self) -> Proof:
        inner: Optional[int] = None
        if self.peek() is not None and self.peek().startswith("@"):
            inner = self._context_marker()
        s_tok = self.next()
        s2_tok = self.next()
        head = self.parse()
        args = []
        while self.peek() == "(":
            args.append(self.parse())
        k = len(args)
        s = self._term(k, s_tok)
        s2 = self._term(k, s2_tok)
        if args:
            inner = args[0].conclusion.context
        if inner is None:
            raise FormatError("cong with no argument premises needs an @N marker")
        return cong(s, s2, head, args, context=inner)

    def _term(self, n: int, tok: str) -> Term:
        if tok.startswith('"') and tok.endswith('"'):
            tok = tok[1:-1]
        try:
            return parse_term(self.pres.signature, n, tok)
        except CloneLabError as ex:
            raise FormatError(str(ex))


def parse_proof(text: str, pres: Presentation) -> Proof:
    """Parse a proof script: optional (def NAME EXPR) bindings, then one
    expression.  (ref NAME) reuses a binding, so shared subproofs parse back
    into a shared DAG."""
    parser = _SexpParser(_sexp_tokens(text), pres)
    node: Optional[Proof] = None
    while parser.peek() is not None:
        node = parser.parse(top=True)
        if node is not None:
            break
    if node is None:
        raise FormatError("proof script has no final expression")
    if parser.peek() is not None:
        raise FormatError(f"trailing input at {parser.peek()!r}")
    return node


# A proof whose fully expanded tree stays under this many nodes is written as
# one plain s-expression; larger proofs (shared DAGs blow up exponentially
# when inlined) are written as (def NAME EXPR) bindings plus a final (ref _).
PLAIN_TREE_CAP = 20_000


def _leaf_text(node: Proof, pres: Presentation) -> str:
    if node.rule == AX:
        try:
            idx = pres.axioms.index(node.conclusion)
        except ValueError:
            raise FormatError(f"{node.conclusion!r} is not an axiom")
        return f"(ax {idx})"
    if node.rule == REFL:
        t = node.conclusion.lhs
        return f'(refl @{t.context} "{print_term(t)}")'
    raise FormatError(f"unknown rule {node.rule!r}")


def _cong_prefix(node: Proof) -> str:
    k = len(node.premises) - 1
    marker = f"@{node.conclusion.context} " if k == 0 else ""
    return (f'(cong {marker}"{print_term(node.outer_lhs)}" '
            f'"{print_term(node.outer_rhs)}" ')


def _serialize_tree(p: Proof, pres: Presentation) -> str:
    out: List[str] = []
    stack: List[tuple] = [("node", p)]
    while stack:
        kind, x = stack.pop()
        if kind == "text":
            out.append(x)
            continue
        node = x
        if node.rule in (AX, REFL):
            out.append(_leaf_text(node, pres))
        elif node.rule == SYM:
            out.append("(sym ")
            stack.append(("text", ")"))
            stack.append(("node", node.premises[0]))
        elif node.rule == TRANS:
            out.append("(trans ")
            stack.append(("text", ")"))
            stack.append(("node", node.premises[1]))
            stack.append(("text", " "))
            stack.append(("node", node.premises[0]))
        elif node.rule == CONG:
            out.append(_cong_prefix(node))
            stack.append(("text", ")"))
            for q in reversed(node.premises[1:]):
                stack.append(("node", q))
                stack.append(("text", " "))
            stack.append(("node", node.premises[0]))
        else:
            raise FormatError(f"unknown rule {node.rule!r}")
    return "".join(out) + "\n"


def serialize_proof(p: Proof, pres: Presentation) -> str:
    # iterative post-order: topological node order plus saturating tree sizes
    order: List[Proof] = []
    size: dict = {}
    stack: List[tuple] = [(p, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in size:
            continue
        if not ready:
            stack.append((node, True))
            for q in node.premises:
                if id(q) not in size:
                    stack.append((q, False))
        else:
            s = 1 + sum(size[id(q)] for q in node.premises)
            size[id(node)] = min(s, PLAIN_TREE_CAP + 1)
            order.append(node)
    if size[id(p)] <= PLAIN_TREE_CAP:
        return _serialize_tree(p, pres)

    names: dict = {}

    def part(q: Proof) -> str:
        name = names.get(id(q))
        return f"(ref {name})" if name is not None else _leaf_text(q, pres)

    lines: List[str] = []
    for node in order:
        if not node.premises:
            continue
        if node.rule == SYM:
            body = f"(sym {part(node.premises[0])})"
        elif node.rule == TRANS:
            body = f"(trans {part(node.premises[0])} {part(node.premises[1])})"
        elif node.rule == CONG:
            body = (_cong_prefix(node)
                    + " ".join(part(q) for q in node.premises) + ")")
        else:
            raise FormatError(f"unknown rule {node.rule!r}")
        name = f"p{len(names)}"
        names[id(node)] = name
        lines.append(f"(def {name} {body})")
    lines.append(part(p))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# explicit clones


def parse_explicit_clone(text: str, name: str = "clone"):
    from .clones import ExplicitClone
    carriers: Dict[int, Tuple[str, ...]] = {}
    projections: Dict[Tuple[int, int], str] = {}
    compose_lines: List[Tuple[int, List[str]]] = []
    for lineno, line in _content_lines(text):
        parts = line.split()
        if parts[0] == "arity":
            if len(parts) < 2:
                raise FormatError("expected 'arity N NAMES...'", lineno)
            carriers[int(parts[1])] = tuple(parts[2:])
        elif parts[0] == "proj":
            if len(parts) != 4:
                raise FormatError("expected 'proj N I NAME'", lineno)
            projections[(int(parts[1]), int(parts[2]))] = parts[3]
        elif parts[0] == "compose":
            compose_lines.append((lineno, parts[1:]))
        else:
            raise FormatError(f"unrecognized line {line!r}", lineno)
    arity_of = {nm: n for n, lvl in carriers.items() for nm in lvl}
    table: Dict[tuple, str] = {}
    for lineno, parts in compose_lines:
        if len(parts) < 3:
            raise FormatError("expected 'compose PHI N THETAS... RESULT'", lineno)
        phi = parts[0]
        if phi not in arity_of:
            raise FormatError(f"unknown element {phi!r}", lineno)
        try:
            n = int(parts[1])
        except ValueError:
            raise FormatError(f"bad arity {parts[1]!r}", lineno)
        k = arity_of[phi]
        thetas = tuple(parts[2:2 + k])
        rest = parts[2 + k:]
        if len(thetas) != k or len(rest) != 1:
            raise FormatError(
                f"compose for {k}-ary {phi!r} needs {k} arguments and a result",
                lineno)
        table[(phi, thetas, n)] = rest[0]
    return ExplicitClone(name, carriers, projections, table, None)


def serialize_explicit_clone(c) -> str:
    out: List[str] = []
    for n in sorted(c.carriers):
        out.append("arity " + " ".join([str(n)] + list(c.carriers[n])))
    for (n, i), nm in sorted(c.projections.items()):
        out.append(f"proj {n} {i} {nm}")
    if c.compose_table is not None:
        for (phi, thetas, n), res in sorted(c.compose_table.items()):
            out.append("compose " + " ".join([phi, str(n), *thetas, res]))
    return "\n".join(out) + "\n"
