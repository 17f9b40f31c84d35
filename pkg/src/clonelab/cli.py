"""Batch command-line front end.

One command per invocation; every verdict comes with a replayable witness
(proof script, countermodel algebra file, class tables).  Exit codes:
0 = affirmative/found, 1 = input error, 2 = refuted, 3 = budget exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .algebras import (
    Countermodel,
    FiniteAlgebra,
    HoldsUpTo,
    TupleFunction,
    interpret,
    is_model,
    semantic_consequence_bounded,
)
from .clones import (
    Clone,
    CloneEqual,
    CloneSeparated,
    check_clone_axioms,
    clone_model_of_algebra,
    clone_semantic_consequence,
    end_clone,
    extend_to_clone_hom,
    generated_subclone,
    is_clone_hom,
    kernel_presentation,
    product_embedding,
    quotient_clone,
    verify_kernel_reconstruction,
)
from .equational import free_model, prove_bounded
from .errors import CloneLabError, FormatError, NotAModel
from .formats import (
    parse_algebra,
    parse_explicit_clone,
    parse_presentation,
    parse_proof,
    serialize_algebra,
    serialize_explicit_clone,
    serialize_presentation,
    serialize_proof,
)
from .limits import DEFAULT_LIMITS, Limits
from .proofs import check_proof
from .terms import Equation, Presentation, enum_terms, parse_term, print_term

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REFUTED = 2
EXIT_BUDGET = 3


@dataclass
class Workspace:
    """Loaded inputs plus global limits shared by every command."""

    limits: Limits = DEFAULT_LIMITS
    format: str = "human"
    fixtures: List[FiniteAlgebra] = field(default_factory=list)
    presentations: Dict[str, Presentation] = field(default_factory=dict)
    algebras: Dict[str, FiniteAlgebra] = field(default_factory=dict)

    def load_presentation(self, path: str) -> Presentation:
        name = Path(path).stem
        if name not in self.presentations:
            self.presentations[name] = parse_presentation(
                Path(path).read_text(encoding="utf-8"), name=name)
        return self.presentations[name]

    def load_algebra(self, path: str, pres: Optional[Presentation] = None) -> FiniteAlgebra:
        name = Path(path).stem
        if name not in self.algebras:
            sig = pres.signature if pres is not None else None
            self.algebras[name] = parse_algebra(
                Path(path).read_text(encoding="utf-8"), sig=sig, name=name)
        return self.algebras[name]

    def load_clone(self, path: str) -> Clone:
        return parse_explicit_clone(Path(path).read_text(encoding="utf-8"),
                                    name=Path(path).stem)


@dataclass
class Report:
    """One structured document per run; the machine form carries every
    witness needed to replay the verdict offline."""

    command: List[str]
    verdict: str
    details: Dict[str, object] = field(default_factory=dict)
    witnesses: Dict[str, object] = field(default_factory=dict)
    timing_s: float = 0.0
    budget_exhausted: bool = False
    exit_code: int = EXIT_OK

    def machine(self) -> str:
        doc = {
            "command": self.command,
            "verdict": self.verdict,
            "details": self.details,
            "witnesses": self.witnesses,
            "timing_s": round(self.timing_s, 3),
            "budget_exhausted": self.budget_exhausted,
            "exit_code": self.exit_code,
        }
        return json.dumps(doc, sort_keys=True, indent=2, default=str)

    def human(self) -> str:
        out = [f"command: {' '.join(self.command)}", f"verdict: {self.verdict}"]
        for k in sorted(self.details):
            out.append(f"{k}: {self.details[k]}")
        for k in sorted(self.witnesses):
            v = self.witnesses[k]
            if isinstance(v, str) and "\n" in v:
                out.append(f"{k}:")
                out.extend("  " + ln for ln in v.rstrip("\n").split("\n"))
            else:
                out.append(f"{k}: {v}")
        if self.budget_exhausted:
            out.append("budget exhausted: yes")
        out.append(f"time: {self.timing_s:.3f}s")
        return "\n".join(out) + "\n"


def parse_goal(pres: Presentation, text: str) -> Equation:
    """Goal syntax: 'LHS = RHS @N'."""
    body, at, ctx = text.rpartition("@")
    if not at:
        raise FormatError("goal must end with a context marker '@N'")
    try:
        n = int(ctx.strip())
    except ValueError:
        raise FormatError(f"bad goal context {ctx.strip()!r}")
    lhs_txt, eq, rhs_txt = body.partition("=")
    if not eq:
        raise FormatError("goal must contain '='")
    return Equation(parse_term(pres.signature, n, lhs_txt.strip()),
                    parse_term(pres.signature, n, rhs_txt.strip()))


def parse_limits(text: Optional[str]) -> Limits:
    if not text:
        return DEFAULT_LIMITS
    kw = {}
    for piece in text.split(","):
        key, sep, val = piece.partition("=")
        key = key.strip()
        if not sep or key not in ("max_term_size", "max_rounds", "arity_cap",
                                  "max_model_size"):
            raise FormatError(f"bad limits entry {piece.strip()!r}")
        try:
            kw[key] = int(val)
        except ValueError:
            raise FormatError(f"limits value for {key} must be an integer")
    return DEFAULT_LIMITS.with_(**kw)


def _axiom_violation(alg: FiniteAlgebra, eq: Equation):
    """First argument tuple where the two sides disagree, or None."""
    memo: dict = {}
    lt = interpret(alg, eq.lhs, memo).table
    rt = interpret(alg, eq.rhs, memo).table
    m, n = alg.carrier_size, eq.context
    for idx in range(m ** n):
        if lt[idx] != rt[idx]:
            args, rest = [], idx
            for i in range(n):
                shift = m ** (n - 1 - i)
                args.append(rest // shift)
                rest %= shift
            return tuple(args)
    return None


def _eq_str(eq: Equation) -> str:
    return f"{print_term(eq.lhs)} = {print_term(eq.rhs)} @{eq.context}"


# ---------------------------------------------------------------------------
# commands


def cmd_check_model(ws: Workspace, pres_path: str, alg_path: str) -> Report:
    pres = ws.load_presentation(pres_path)
    alg = ws.load_algebra(alg_path, pres)
    per_axiom = []
    all_ok = True
    for i, axm in enumerate(pres.axioms):
        wit = _axiom_violation(alg, axm)
        ok = wit is None
        all_ok = all_ok and ok
        entry = {"axiom": i, "equation": _eq_str(axm), "holds": ok}
        if not ok:
            entry["failing_tuple"] = list(wit)
        per_axiom.append(entry)
    return Report(
        command=["check-model", pres_path, alg_path],
        verdict="model" if all_ok else "not-a-model",
        details={"carrier": alg.carrier_size, "axioms": len(pres.axioms)},
        witnesses={"per_axiom": per_axiom},
        exit_code=EXIT_OK if all_ok else EXIT_REFUTED,
    )


def cmd_check_proof(ws: Workspace, pres_path: str, proof_path: str) -> Report:
    pres = ws.load_presentation(pres_path)
    proof = parse_proof(Path(proof_path).read_text(encoding="utf-8"), pres)
    try:
        concl = check_proof(pres, proof)
    except CloneLabError as ex:
        path = getattr(ex, "path", ())
        return Report(
            command=["check-proof", pres_path, proof_path],
            verdict="rejected",
            details={"error": str(ex), "path": list(path)},
            exit_code=EXIT_REFUTED,
        )
    return Report(
        command=["check-proof", pres_path, proof_path],
        verdict="accepted",
        details={"conclusion": _eq_str(concl)},
        exit_code=EXIT_OK,
    )


def cmd_prove(ws: Workspace, pres_path: str, goal_text: str) -> Report:
    pres = ws.load_presentation(pres_path)
    goal = parse_goal(pres, goal_text)
    proof = prove_bounded(pres, goal, ws.limits)
    if proof is None:
        return Report(
            command=["prove", pres_path, goal_text],
            verdict="not-found",
            details={
                "goal": _eq_str(goal),
                "max_term_size": ws.limits.max_term_size,
                "suggestion": "run 'consequence' to search for a countermodel",
            },
            budget_exhausted=True,
            exit_code=EXIT_BUDGET,
        )
    assert check_proof(pres, proof) == goal
    return Report(
        command=["prove", pres_path, goal_text],
        verdict="proved",
        details={"goal": _eq_str(goal)},
        witnesses={"proof_script": serialize_proof(proof, pres)},
        exit_code=EXIT_OK,
    )


def cmd_consequence(ws: Workspace, pres_path: str, goal_text: str,
                    mode: str) -> Report:
    pres = ws.load_presentation(pres_path)
    goal = parse_goal(pres, goal_text)
    cmd = ["consequence", pres_path, goal_text, "--mode", mode]
    if mode == "finite":
        for alg in ws.fixtures:
            if alg.signature != pres.signature or not is_model(alg, pres):
                continue
            wit = _axiom_violation(alg, goal)
            if wit is not None:
                return Report(
                    command=cmd, verdict="countermodel",
                    details={"goal": _eq_str(goal), "source": "fixture"},
                    witnesses={"algebra": serialize_algebra(alg),
                               "algebra_name": alg.name,
                               "witness_tuple": list(wit)},
                    exit_code=EXIT_REFUTED,
                )
        found = semantic_consequence_bounded(pres, goal, ws.limits.max_model_size)
        if isinstance(found, Countermodel):
            return Report(
                command=cmd, verdict="countermodel",
                details={"goal": _eq_str(goal), "source": "enumeration"},
                witnesses={"algebra": serialize_algebra(found.algebra),
                           "witness_tuple": list(found.witness)},
                exit_code=EXIT_REFUTED,
            )
        return Report(
            command=cmd, verdict=f"holds-up-to-{found.max_size}",
            details={"goal": _eq_str(goal), "max_model_size": found.max_size},
            budget_exhausted=True,
            exit_code=EXIT_BUDGET,
        )
    res = clone_semantic_consequence(pres, goal, ws.limits, fixtures=ws.fixtures)
    if isinstance(res, CloneEqual):
        return Report(
            command=cmd, verdict="equal",
            details={"goal": _eq_str(goal)},
            witnesses={"proof_script": serialize_proof(res.proof, pres)},
            exit_code=EXIT_OK,
        )
    if isinstance(res, CloneSeparated):
        cert = res.certificate
        wit: Dict[str, object] = {"certificate_kind": cert.kind}
        if cert.kind == "model":
            wit["algebra"] = serialize_algebra(cert.algebra)
            wit["algebra_name"] = cert.algebra.name
            wit["witness_tuple"] = list(cert.witness)
        else:
            wit["context"] = cert.context
            wit["lhs_class"] = cert.lhs_class
            wit["rhs_class"] = cert.rhs_class
            wit["class_count"] = cert.class_count
        return Report(
            command=cmd, verdict="separated",
            details={"goal": _eq_str(goal)},
            witnesses=wit,
            exit_code=EXIT_REFUTED,
        )
    return Report(
        command=cmd, verdict="unknown",
        details={"goal": _eq_str(goal), "reason": res.reason},
        budget_exhausted=True,
        exit_code=EXIT_BUDGET,
    )


def cmd_free_model(ws: Workspace, pres_path: str, n: int) -> Report:
    pres = ws.load_presentation(pres_path)
    fm = free_model(pres, n, ws.limits)
    details = {
        "context": n,
        "classes": fm.class_count(),
        "complete": fm.complete,
        "representatives": [print_term(r) for r in fm.class_reps],
    }
    witnesses: Dict[str, object] = {}
    exit_code = EXIT_OK
    if fm.complete:
        if fm.class_count() == 0 and any(
                k == 0 for k, _ in pres.signature.symbols()):
            details["note"] = "empty model with nullary symbols; no export"
        elif fm.class_count() > 0:
            alg = FiniteAlgebra(pres.signature, fm.class_count(), fm.tables,
                                name=f"{pres.name}-free{n}")
            witnesses["algebra"] = serialize_algebra(alg)
    else:
        exit_code = EXIT_BUDGET
    return Report(
        command=["free-model", pres_path, str(n)],
        verdict="complete" if fm.complete else "incomplete",
        details=details,
        witnesses=witnesses,
        budget_exhausted=not fm.complete,
        exit_code=exit_code,
    )


# ---------------------------------------------------------------------------
# clone subcommands


def _axiom_report(c: Clone, cap: int) -> Report:
    rep = check_clone_axioms(c, arity_cap=cap)
    details = {
        "clone": rep.clone_name,
        "arity_cap": rep.arity_cap,
        "exhaustive": rep.exhaustive,
        "instances_checked": rep.instances_checked,
        "carrier_sizes": {n: len(c.carrier(n)) for n in range(cap + 1)},
    }
    return Report(
        command=[], verdict="axioms-pass" if rep.ok else "axioms-fail",
        details=details,
        witnesses={"violations": [repr(v) for v in rep.violations]},
        exit_code=EXIT_OK if rep.ok else EXIT_REFUTED,
    )


def cmd_clone(ws: Workspace, sub: str, args: argparse.Namespace) -> Report:
    cap = ws.limits.arity_cap
    if sub == "end":
        c = end_clone(args.m, cap)
        if args.check_axioms:
            rep = _axiom_report(c, cap)
            rep.command = ["clone", "end", str(args.m), "--check-axioms"]
            return rep
        return Report(
            command=["clone", "end", str(args.m)],
            verdict="ok",
            details={"carrier_sizes": {n: args.m ** (args.m ** n)
                                       for n in range(cap + 1)}},
            exit_code=EXIT_OK,
        )
    if sub == "axioms":
        c = ws.load_clone(args.clone_file)
        rep = _axiom_report(c, min(cap, c.arity_cap))
        rep.command = ["clone", "axioms", args.clone_file]
        return rep
    if sub == "hom":
        pres = ws.load_presentation(args.pres_file)
        alg = ws.load_algebra(args.alg_file, pres)
        cmd = ["clone", "hom", args.pres_file, args.alg_file]
        try:
            model = clone_model_of_algebra(pres, alg, arity_cap=cap,
                                           limits=ws.limits)
        except NotAModel as ex:
            return Report(command=cmd, verdict="not-a-model",
                          details={"error": str(ex)}, exit_code=EXIT_REFUTED)
        # verify the hom laws on the term clone, where superposition never
        # leaves the (bounded) carrier
        end = end_clone(alg.carrier_size, cap)
        f = {(k, s): TupleFunction(k, alg.carrier_size, alg.table(s, k))
             for k, s in pres.signature.symbols()}
        g = extend_to_clone_hom(pres.signature, end, f)
        ok = is_clone_hom(g, arity_cap=cap, size_bound=3)
        tables = {f"{s}/{k}": list(model.op_table(s, k))
                  for k, s in pres.signature.symbols()}
        return Report(
            command=cmd,
            verdict="clone-hom" if ok else "not-a-clone-hom",
            details={"carrier": alg.carrier_size},
            witnesses={"op_tables": tables},
            exit_code=EXIT_OK if ok else EXIT_REFUTED,
        )
    if sub == "quotient":
        pres = ws.load_presentation(args.pres_file)
        q = quotient_clone(pres, ws.limits)
        sizes, complete = {}, {}
        for n in range(cap + 1):
            sizes[n] = len(q.carrier(n))
            complete[n] = q.complete_at(n)
        all_complete = all(complete.values())
        return Report(
            command=["clone", "quotient", args.pres_file],
            verdict="complete" if all_complete else "incomplete",
            details={"carrier_sizes": sizes, "complete_at": complete},
            budget_exhausted=not all_complete,
            exit_code=EXIT_OK if all_complete else EXIT_BUDGET,
        )
    if sub == "generate":
        alg = ws.load_algebra(args.alg_file)
        ops = [TupleFunction(k, alg.carrier_size, table)
               for (k, _), table in sorted(alg.tables.items()) if k <= cap]
        sub_clone = generated_subclone(alg.carrier_size, ops, arity_cap=cap)
        sizes = {n: len(sub_clone.carrier(n)) for n in range(cap + 1)}
        cross = _interpret_closure_sizes(alg, cap)
        return Report(
            command=["clone", "generate", args.alg_file],
            verdict="ok" if sizes == cross else "cross-check-mismatch",
            details={"carrier_sizes": sizes, "interpret_closure_sizes": cross},
            witnesses={"clone": serialize_explicit_clone(sub_clone)},
            exit_code=EXIT_OK if sizes == cross else EXIT_REFUTED,
        )
    if sub == "kernel":
        c = ws.load_clone(args.clone_file)
        kp = kernel_presentation(c, arity_cap=min(cap, c.arity_cap))
        ok = verify_kernel_reconstruction(c, kp, arity_cap=min(cap, c.arity_cap))
        return Report(
            command=["clone", "kernel", args.clone_file],
            verdict="reconstructs" if ok else "reconstruction-failed",
            details={"axioms": len(kp.axioms)},
            witnesses={"presentation": serialize_presentation(kp)},
            exit_code=EXIT_OK if ok else EXIT_REFUTED,
        )
    if sub == "embed":
        c = ws.load_clone(args.clone_file)
        emb = product_embedding(c, arity_cap=min(cap, c.arity_cap))
        return Report(
            command=["clone", "embed", args.clone_file],
            verdict="injective" if emb.injective else "not-injective",
            details={"arity_cap": emb.arity_cap,
                     "injective_at": emb.injective_at},
            witnesses={"collisions": [repr(x) for x in emb.collisions]},
            exit_code=EXIT_OK if emb.injective else EXIT_REFUTED,
        )
    raise FormatError(f"unknown clone subcommand {sub!r}")


def _interpret_closure_sizes(alg: FiniteAlgebra, cap: int) -> Dict[int, int]:
    """Distinct term operations of the algebra per arity: the interpret-
    enumeration cross-check for the generated subclone.  Term size grows
    until the distinct-table count is stable for one full round."""
    sizes: Dict[int, int] = {}
    for n in range(cap + 1):
        prev = -1
        bound = max(2, n + 1)
        while True:
            tabs = {interpret(alg, t).table
                    for t in enum_terms(alg.signature, n, bound)}
            if len(tabs) == prev:
                break
            prev = len(tabs)
            bound += 2
        sizes[n] = prev
    return sizes


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--limits", default=None,
                        help="comma-separated overrides, e.g. max_term_size=9")
    common.add_argument("--format", choices=["human", "machine"], default="human")
    common.add_argument("--fixtures", default=None,
                        help="directory of extra .alg files used as certificates")

    p = argparse.ArgumentParser(prog="clonelab",
                                description="equational logic and clone workbench")
    subs = p.add_subparsers(dest="command", required=True)

    s = subs.add_parser("check-model", parents=[common])
    s.add_argument("pres_file")
    s.add_argument("alg_file")

    s = subs.add_parser("check-proof", parents=[common])
    s.add_argument("pres_file")
    s.add_argument("proof_file")

    s = subs.add_parser("prove", parents=[common])
    s.add_argument("pres_file")
    s.add_argument("goal")

    s = subs.add_parser("consequence", parents=[common])
    s.add_argument("pres_file")
    s.add_argument("goal")
    s.add_argument("--mode", choices=["finite", "clone"], default="finite")

    s = subs.add_parser("free-model", parents=[common])
    s.add_argument("pres_file")
    s.add_argument("n", type=int)

    s = subs.add_parser("clone", parents=[common])
    csubs = s.add_subparsers(dest="clone_command", required=True)
    c = csubs.add_parser("end", parents=[common])
    c.add_argument("m", type=int)
    c.add_argument("--check-axioms", action="store_true")
    c = csubs.add_parser("axioms", parents=[common])
    c.add_argument("clone_file")
    c = csubs.add_parser("hom", parents=[common])
    c.add_argument("pres_file")
    c.add_argument("alg_file")
    c = csubs.add_parser("quotient", parents=[common])
    c.add_argument("pres_file")
    c = csubs.add_parser("generate", parents=[common])
    c.add_argument("alg_file")
    c = csubs.add_parser("kernel", parents=[common])
    c.add_argument("clone_file")
    c = csubs.add_parser("embed", parents=[common])
    c.add_argument("clone_file")
    return p


def run(argv: Optional[List[str]] = None) -> "tuple[Report, str]":
    args = build_parser().parse_args(argv)
    ws = Workspace(limits=parse_limits(args.limits), format=args.format)
    if args.fixtures:
        for path in sorted(Path(args.fixtures).glob("*.alg")):
            ws.fixtures.append(parse_algebra(
                path.read_text(encoding="utf-8"), name=path.stem))
    t0 = time.perf_counter()
    if args.command == "check-model":
        rep = cmd_check_model(ws, args.pres_file, args.alg_file)
    elif args.command == "check-proof":
        rep = cmd_check_proof(ws, args.pres_file, args.proof_file)
    elif args.command == "prove":
        rep = cmd_prove(ws, args.pres_file, args.goal)
    elif args.command == "consequence":
        rep = cmd_consequence(ws, args.pres_file, args.goal, args.mode)
    elif args.command == "free-model":
        rep = cmd_free_model(ws, args.pres_file, args.n)
    else:
        rep = cmd_clone(ws, args.clone_command, args)
    rep.timing_s = time.perf_counter() - t0
    return rep, ws.format


def main(argv: Optional[List[str]] = None) -> int:
    try:
        rep, fmt = run(argv)
    except FileNotFoundError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_INPUT
    except CloneLabError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_INPUT
    print(rep.machine() if fmt == "machine" else rep.human(), end="\n")
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
