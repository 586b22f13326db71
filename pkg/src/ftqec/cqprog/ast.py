"""Abstract syntax of classical-quantum programs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from ..gf2_pauli import GF2Matrix, PauliOp

MEMORYLESS = "memoryless"
CONSERVATIVE = "conservative"
LOOP_CLASSES = (MEMORYLESS, CONSERVATIVE)


# -- classical expressions ----------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Index:
    name: str
    index: int


@dataclass(frozen=True)
class Not:
    arg: "CExpr"


BINOPS = ("||", "&&", "==", "!=", ">=", "<=", ">", "<", "^", "+")


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "CExpr"
    right: "CExpr"


CExpr = object  # Const | Var | Index | Not | BinOp


def expr_vars(e) -> List[str]:
    if isinstance(e, (Var, Index)):
        return [e.name]
    if isinstance(e, Not):
        return expr_vars(e.arg)
    if isinstance(e, BinOp):
        return expr_vars(e.left) + expr_vars(e.right)
    return []


def xor_all(items: Sequence) -> object:
    items = list(items)
    if not items:
        return Const(0)
    e = items[0]
    for it in items[1:]:
        e = BinOp("^", e, it)
    return e


def and_all(items: Sequence) -> object:
    items = list(items)
    if not items:
        return Const(1)
    e = items[0]
    for it in items[1:]:
        e = BinOp("&&", e, it)
    return e


def sum_all(items: Sequence) -> object:
    items = list(items)
    if not items:
        return Const(0)
    e = items[0]
    for it in items[1:]:
        e = BinOp("+", e, it)
    return e


# -- statements ---------------------------------------------------------------


@dataclass(eq=False)
class Stmt:
    sid: int = field(default=-1, init=False, compare=False)
    line: int = field(default=0, init=False, compare=False)


@dataclass(eq=False)
class Init(Stmt):
    qubit: int = 0


@dataclass(eq=False)
class Gate(Stmt):
    name: str = "H"
    qubits: Tuple[int, ...] = ()


@dataclass(eq=False)
class Measure(Stmt):
    var: str = ""
    qubit: int = 0


@dataclass(eq=False)
class Assign(Stmt):
    var: str = ""
    expr: object = None


@dataclass(eq=False)
class OracleCall(Stmt):
    var: str = ""
    oracle: str = ""
    args: Tuple[object, ...] = ()


@dataclass(eq=False)
class IfElse(Stmt):
    cond: object = None
    then: List[Stmt] = field(default_factory=list)
    orelse: List[Stmt] = field(default_factory=list)


@dataclass(eq=False)
class Repeat(Stmt):
    body: List[Stmt] = field(default_factory=list)
    cond: object = None
    loop_class: str = MEMORYLESS


# -- oracles --------------------------------------------------------------------


@dataclass
class OracleSpec:
    """A classical function callable from programs, with its behavioural contract.

    ``kind`` is ``decoder`` (params: ``code`` name or None, ``gens`` as a list
    of PauliOps, ``t``), ``majority`` (params: ``k``) or ``table`` (params:
    ``table`` mapping input tuples to output tuples, missing entries map to 0).
    """

    name: str
    kind: str
    arity: int
    out_width: int
    params: Dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.params["gens"][0].n if self.kind == "decoder" else 0

    def check_matrix(self) -> GF2Matrix:
        return GF2Matrix.from_paulis(self.params["gens"])


def decoder_spec(name: str, gens: Sequence[PauliOp], t: int, code: Optional[str] = None, part: str = "all") -> OracleSpec:
    gens = [g.unsigned() for g in gens]
    n = gens[0].n
    for g in gens:
        if g.n != n:
            raise ValueError("decoder generators must share qubit count")
    return OracleSpec(name, "decoder", len(gens), 2 * n, {"gens": gens, "t": t, "code": code, "part": part})


def majority_spec(name: str, k: int) -> OracleSpec:
    return OracleSpec(name, "majority", k, 1, {"k": k})


def table_spec(name: str, arity: int, out_width: int, table: Dict[Tuple[int, ...], Tuple[int, ...]]) -> OracleSpec:
    return OracleSpec(name, "table", arity, out_width, {"table": dict(table)})


# -- programs -------------------------------------------------------------------


@dataclass
class Program:
    n_qubits: int
    body: List[Stmt]
    oracles: Dict[str, OracleSpec] = field(default_factory=dict)
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        number(self)

    def walk(self) -> Iterator[Stmt]:
        yield from walk(self.body)

    def stmt(self, sid: int) -> Stmt:
        for s in self.walk():
            if s.sid == sid:
                return s
        raise KeyError(sid)


def walk(stmts: Sequence[Stmt]) -> Iterator[Stmt]:
    for s in stmts:
        yield s
        if isinstance(s, IfElse):
            yield from walk(s.then)
            yield from walk(s.orelse)
        elif isinstance(s, Repeat):
            yield from walk(s.body)


def number(p: Program) -> None:
    """Assign preorder statement indices."""
    for i, s in enumerate(walk(p.body)):
        s.sid = i


def qubits_of(s: Stmt) -> Tuple[int, ...]:
    if isinstance(s, Init):
        return (s.qubit,)
    if isinstance(s, Gate):
        return tuple(s.qubits)
    if isinstance(s, Measure):
        return (s.qubit,)
    return ()


def pauli_only(stmts: Sequence[Stmt]) -> bool:
    return all(isinstance(s, Gate) and s.name in ("X", "Y", "Z") for s in stmts)


def pauli_of_block(stmts: Sequence[Stmt], n: int) -> PauliOp:
    """Product (up to phase) of a block of Pauli gates."""
    x = z = 0
    for s in stmts:
        q = s.qubits[0]
        if s.name in ("X", "Y"):
            x ^= 1 << q
        if s.name in ("Z", "Y"):
            z ^= 1 << q
    return PauliOp(n, x, z)
