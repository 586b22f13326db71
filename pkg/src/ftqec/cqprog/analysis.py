"""Static checks: well-formedness and the structural loop-class conditions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .ast import (
    CONSERVATIVE,
    LOOP_CLASSES,
    MEMORYLESS,
    Assign,
    BinOp,
    Gate,
    IfElse,
    Index,
    Init,
    Measure,
    Not,
    OracleCall,
    Program,
    Repeat,
    Stmt,
    Var,
    expr_vars,
    pauli_only,
    qubits_of,
    walk,
)


def _expr_refs(e) -> List[Tuple[str, Optional[int]]]:
    if isinstance(e, Var):
        return [(e.name, None)]
    if isinstance(e, Index):
        return [(e.name, e.index)]
    if isinstance(e, Not):
        return _expr_refs(e.arg)
    if isinstance(e, BinOp):
        return _expr_refs(e.left) + _expr_refs(e.right)
    return []


def check_well_formed(p: Program) -> List[str]:
    """List of well-formedness violations (empty when the program is fine)."""
    errs: List[str] = []
    widths: Dict[str, int] = {}

    def use(e, assigned: Set[str], where: str) -> None:
        for name, idx in _expr_refs(e):
            if name not in assigned:
                errs.append(f"{where}: variable {name!r} read before assignment")
                continue
            w = widths.get(name, 1)
            if idx is None and w > 1:
                errs.append(f"{where}: vector variable {name!r} used without index")
            if idx is not None and (w == 1 or idx >= w):
                errs.append(f"{where}: bad index {name}[{idx}]")

    def block(stmts: Sequence[Stmt], assigned: Set[str]) -> Set[str]:
        assigned = set(assigned)
        for s in stmts:
            where = f"line {s.line}" if s.line else f"stmt {s.sid}"
            for q in qubits_of(s):
                if not 0 <= q < p.n_qubits:
                    errs.append(f"{where}: qubit {q} out of range")
            if isinstance(s, Gate) and len(set(s.qubits)) != len(s.qubits):
                errs.append(f"{where}: repeated gate qubit")
            if isinstance(s, Measure):
                widths[s.var] = 1
                assigned.add(s.var)
            elif isinstance(s, Assign):
                use(s.expr, assigned, where)
                widths[s.var] = 1
                assigned.add(s.var)
            elif isinstance(s, OracleCall):
                spec = p.oracles.get(s.oracle)
                if spec is None:
                    errs.append(f"{where}: oracle {s.oracle!r} not declared")
                else:
                    if len(s.args) != spec.arity:
                        errs.append(f"{where}: oracle {s.oracle!r} arity mismatch")
                    widths[s.var] = spec.out_width
                for a in s.args:
                    use(a, assigned, where)
                assigned.add(s.var)
            elif isinstance(s, IfElse):
                use(s.cond, assigned, where)
                a1 = block(s.then, assigned)
                a2 = block(s.orelse, assigned)
                assigned = a1 & a2
            elif isinstance(s, Repeat):
                if s.loop_class not in LOOP_CLASSES:
                    errs.append(f"{where}: repeat without a valid loop class")
                a1 = block(s.body, assigned)
                use(s.cond, a1, where)
                assigned = a1
        return assigned

    block(p.body, set())
    return errs


# -- loop classes ---------------------------------------------------------------


@dataclass
class LoopReport:
    ok: bool
    violations: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _flow(stmts: Sequence[Stmt], wq: Set[int], wv: Set[str], bad: List[str], check_qubits: bool = True) -> Tuple[Set[int], Set[str]]:
    wq, wv = set(wq), set(wv)
    for s in stmts:
        where = f"stmt {s.sid}" + (f" (line {s.line})" if s.line else "")
        if isinstance(s, Init):
            wq.add(s.qubit)
        elif isinstance(s, (Gate, Measure)):
            if check_qubits:
                for q in qubits_of(s):
                    if q not in wq:
                        bad.append(f"{where}: qubit q{q} used before reset in loop body")
            if isinstance(s, Measure):
                wv.add(s.var)
        elif isinstance(s, Assign):
            for v in expr_vars(s.expr):
                if v not in wv:
                    bad.append(f"{where}: variable {v!r} read before written in loop body")
            wv.add(s.var)
        elif isinstance(s, OracleCall):
            for a in s.args:
                for v in expr_vars(a):
                    if v not in wv:
                        bad.append(f"{where}: variable {v!r} read before written in loop body")
            wv.add(s.var)
        elif isinstance(s, IfElse):
            for v in expr_vars(s.cond):
                if v not in wv:
                    bad.append(f"{where}: variable {v!r} read before written in loop body")
            q1, v1 = _flow(s.then, wq, wv, bad, check_qubits)
            q2, v2 = _flow(s.orelse, wq, wv, bad, check_qubits)
            wq, wv = q1 & q2, v1 & v2
        elif isinstance(s, Repeat):
            q1, v1 = _flow(s.body, wq, wv, bad, check_qubits)
            for v in expr_vars(s.cond):
                if v not in v1:
                    bad.append(f"{where}: until-condition variable {v!r} not written in body")
            wq, wv = q1, v1
    return wq, wv


def memoryless_report(body: Sequence[Stmt], cond=None) -> LoopReport:
    bad: List[str] = []
    _, wv = _flow(body, set(), set(), bad)
    if cond is not None:
        for v in expr_vars(cond):
            if v not in wv:
                bad.append(f"until-condition variable {v!r} not written in body")
    return LoopReport(not bad, bad)


def check_memoryless(body: Sequence[Stmt], cond=None) -> bool:
    """True iff every qubit and variable in the body is reset/written before use."""
    return memoryless_report(body, cond).ok


def check_conservative_structure(body: Sequence[Stmt], cond=None) -> LoopReport:
    """Structural side conditions for a conservative loop body.

    Classical variables must be written before read within the body, and the
    body must be non-adaptive: the only conditionals allowed are Pauli-only
    recoveries, and nested loops must be memoryless (treated as black-box
    ancilla preparations).
    """
    bad: List[str] = []
    _, wv = _flow(body, set(), set(), bad, check_qubits=False)
    if cond is not None:
        for v in expr_vars(cond):
            if v not in wv:
                bad.append(f"until-condition variable {v!r} not written in body")
    for s in walk(body):
        if isinstance(s, IfElse) and not (pauli_only(s.then) and pauli_only(s.orelse)):
            bad.append(f"stmt {s.sid}: adaptive conditional (branches are not Pauli-only recoveries)")
        if isinstance(s, Repeat):
            if s.loop_class != MEMORYLESS:
                bad.append(f"stmt {s.sid}: nested loop must be memoryless")
            elif not check_memoryless(s.body, s.cond):
                bad.append(f"stmt {s.sid}: nested loop annotated memoryless but is not")
    return LoopReport(not bad, bad)


def ancilla_split(body: Sequence[Stmt]) -> Tuple[Set[int], Set[int]]:
    """(data, ancilla) qubits of a loop body: ancillas are reset before first use."""
    first: Dict[int, str] = {}
    for s in walk(body):
        for q in qubits_of(s):
            if q not in first:
                first[q] = "init" if isinstance(s, Init) else "use"
    anc = {q for q, k in first.items() if k == "init"}
    data = {q for q, k in first.items() if k == "use"}
    return data, anc


def transversality_report(body: Sequence[Stmt]) -> LoopReport:
    """Every two-qubit gate touches at most one data qubit, and each ancilla
    couples to at most one data qubit over the whole body."""
    data, anc = ancilla_split(body)
    bad: List[str] = []
    coupled: Dict[int, Set[int]] = {}
    for s in walk(body):
        if isinstance(s, Gate) and len(s.qubits) == 2:
            a, b = s.qubits
            if a in data and b in data:
                bad.append(f"stmt {s.sid}: two-qubit gate between data qubits q{a}, q{b}")
                continue
            for x, y in ((a, b), (b, a)):
                if x in anc and y in data:
                    coupled.setdefault(x, set()).add(y)
    for a, ds in sorted(coupled.items()):
        if len(ds) > 1:
            bad.append(f"ancilla q{a} couples to {len(ds)} data qubits {sorted(ds)}")
    return LoopReport(not bad, bad)


def output_qubits(body: Sequence[Stmt]) -> List[int]:
    """Qubits initialized in the body whose last operation is not a measurement."""
    last: Dict[int, Stmt] = {}
    inited: Set[int] = set()
    for s in walk(body):
        for q in qubits_of(s):
            last[q] = s
        if isinstance(s, Init):
            inited.add(s.qubit)
    return sorted(q for q in inited if not isinstance(last[q], Measure))
