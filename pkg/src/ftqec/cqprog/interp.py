"""Concrete interpreter: ideal runs, scripted replays and exhaustive fault enumeration."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from ..gf2_pauli import PauliOp
from .ast import (
    Assign,
    BinOp,
    Const,
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
)
from .oracles import concrete_oracle
from .stabsim import ConcreteState


class InterpError(RuntimeError):
    pass


class IterationCapExceeded(InterpError):
    pass


class EnumerationCapExceeded(InterpError):
    pass


def eval_cexpr(e, store: Mapping[str, object]):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        try:
            return store[e.name]
        except KeyError:
            raise InterpError(f"variable {e.name!r} unassigned") from None
    if isinstance(e, Index):
        return store[e.name][e.index]
    if isinstance(e, Not):
        return 1 - _bit(eval_cexpr(e.arg, store))
    if isinstance(e, BinOp):
        a = eval_cexpr(e.left, store)
        b = eval_cexpr(e.right, store)
        op = e.op
        if op == "^":
            return _bit(a) ^ _bit(b)
        if op == "&&":
            return _bit(a) & _bit(b)
        if op == "||":
            return _bit(a) | _bit(b)
        if op == "+":
            return int(a) + int(b)
        if op == "==":
            return int(a == b)
        if op == "!=":
            return int(a != b)
        if op == ">=":
            return int(a >= b)
        if op == "<=":
            return int(a <= b)
        if op == ">":
            return int(a > b)
        if op == "<":
            return int(a < b)
    raise InterpError(f"bad expression {e!r}")


def _bit(v) -> int:
    if v not in (0, 1):
        raise InterpError(f"value {v!r} used as a bit")
    return int(v)


@dataclass
class Fault:
    """One fault: ``pauli`` applied at (statement, role).  For measurements the
    role is ``m`` and ``pre``/``pauli`` are the errors before/after."""

    sid: int
    role: str
    pauli: PauliOp
    pre: Optional[PauliOp] = None

    def describe(self) -> str:
        if self.role == "m":
            return f"stmt {self.sid} measurement: before {self.pre} after {self.pauli}"
        return f"stmt {self.sid} {self.role}: {self.pauli}"


@dataclass
class Run:
    state: ConcreteState
    store: Dict[str, object]
    prob: Fraction = Fraction(1)
    faults: Tuple[Fault, ...] = ()
    budget: int = 0
    outcomes: Tuple[Tuple[int, int], ...] = ()
    loop_retries: int = 0

    def fork(self) -> "Run":
        return Run(self.state.copy(), dict(self.store), self.prob, self.faults, self.budget, self.outcomes, self.loop_retries)

    @property
    def n_faults(self) -> int:
        return len(self.faults)


@dataclass
class Script:
    """Fault placement and random choices for a replay."""

    faults: Dict[Tuple[int, str], PauliOp] = field(default_factory=dict)
    outcomes: Dict[int, int] = field(default_factory=dict)
    oracle_out: Dict[int, Tuple[int, ...]] = field(default_factory=dict)


def _local_paulis(n: int, qubits: Sequence[int]) -> List[PauliOp]:
    out = []
    for letters in product("IXYZ", repeat=len(qubits)):
        if all(l == "I" for l in letters):
            continue
        x = z = 0
        for q, l in zip(qubits, letters):
            if l in "XY":
                x |= 1 << q
            if l in "ZY":
                z |= 1 << q
        out.append(PauliOp(n, x, z))
    return out


class Interpreter:
    """Executes a program concretely.

    mode ``ideal``: random outcomes from ``outcomes`` (iterable of bits) or
    exhaustively when ``outcomes`` is None; no faults.  mode ``enumerate``: all
    placements of at most ``budget`` faults and all measurement branches.
    mode ``script``: faults/outcomes/oracle outputs taken from a Script.
    """

    def __init__(self, prog: Program, mode: str = "ideal", outcomes: Optional[Iterable[int]] = None,
                 script: Optional[Script] = None, iteration_cap: int = 1000, run_cap: int = 2_000_000):
        self.prog = prog
        self.mode = mode
        self.outcomes = iter(outcomes) if outcomes is not None else None
        self.script = script or Script()
        self.iteration_cap = iteration_cap
        self.run_cap = run_cap
        self.n = prog.n_qubits
        self.oracles = {name: concrete_oracle(spec) for name, spec in prog.oracles.items()}
        self._loop_seen: set = set()
        self._count = 0

    # -- public --------------------------------------------------------------

    def runs(self, state: ConcreteState, store: Optional[Dict] = None, budget: int = 0) -> Iterator[Run]:
        self._loop_seen = set()
        self._count = 0
        run = Run(state.copy(), dict(store or {}), budget=budget)
        yield from self._block(self.prog.body, run)

    # -- statements ------------------------------------------------------------

    def _block(self, stmts: Sequence[Stmt], run: Run) -> Iterator[Run]:
        if not stmts:
            yield run
            return
        head, rest = stmts[0], stmts[1:]
        for r in self._stmt(head, run):
            yield from self._block(rest, r)

    def _fault_options(self, run: Run, sid: int, role: str, qubits: Sequence[int]) -> Iterator[Run]:
        """The unfaulted run plus, budget permitting, one run per local Pauli fault."""
        if self.mode == "script":
            p = self.script.faults.get((sid, role))
            if p is not None and not p.is_identity():
                run.state.apply_pauli(p)
                run.faults = run.faults + (Fault(sid, role, p),)
            yield run
            return
        if self.mode != "enumerate" or run.budget <= 0:
            yield run
            return
        opts = _local_paulis(self.n, qubits)
        yield run.fork()
        for p in opts:
            r = run.fork()
            r.state.apply_pauli(p)
            r.faults = r.faults + (Fault(sid, role, p),)
            r.budget -= 1
            yield r

    def _stmt(self, s: Stmt, run: Run) -> Iterator[Run]:
        self._count += 1
        if self._count > self.run_cap:
            raise EnumerationCapExceeded(f"more than {self.run_cap} interpreter steps; shrink the instance")
        if isinstance(s, Init):
            run.state.reset(s.qubit)
            yield from self._fault_options(run, s.sid, "in", [s.qubit])
        elif isinstance(s, Gate):
            run.state.apply_gate(s.name, s.qubits)
            yield from self._fault_options(run, s.sid, "ut", s.qubits)
        elif isinstance(s, Measure):
            yield from self._measure(s, run)
        elif isinstance(s, Assign):
            run.store[s.var] = eval_cexpr(s.expr, run.store)
            yield run
        elif isinstance(s, OracleCall):
            args = [_bit(eval_cexpr(a, run.store)) for a in s.args]
            if self.mode == "script" and s.sid in self.script.oracle_out:
                out = tuple(self.script.oracle_out[s.sid])
            else:
                out = self.oracles[s.oracle](args)
            run.store[s.var] = out[0] if len(out) == 1 else tuple(out)
            yield run
        elif isinstance(s, IfElse):
            c = _bit(eval_cexpr(s.cond, run.store))
            yield from self._block(s.then if c else s.orelse, run)
        elif isinstance(s, Repeat):
            yield from self._repeat(s, run, 0)
        else:  # pragma: no cover
            raise InterpError(f"unknown statement {s!r}")

    def _measure(self, s: Measure, run: Run) -> Iterator[Run]:
        q = s.qubit
        if self.mode == "script":
            pre = self.script.faults.get((s.sid, "mpre"))
            post = self.script.faults.get((s.sid, "mpost"))
            pairs = [(pre, post)]
        elif self.mode == "enumerate" and run.budget > 0:
            locs = [None] + _local_paulis(self.n, [q])
            pairs = [(a, b) for a in locs for b in locs]
        else:
            pairs = [(None, None)]
        for pre, post in pairs:
            r = run.fork() if len(pairs) > 1 else run
            faulty = (pre is not None and not pre.is_identity()) or (post is not None and not post.is_identity())
            if faulty:
                if self.mode == "script":
                    if pre is not None and not pre.is_identity():
                        r.faults = r.faults + (Fault(s.sid, "mpre", pre),)
                    if post is not None and not post.is_identity():
                        r.faults = r.faults + (Fault(s.sid, "mpost", post),)
                else:
                    r.faults = r.faults + (Fault(s.sid, "m", post or PauliOp(self.n), pre or PauliOp(self.n)),)
                    r.budget -= 1
            if pre is not None:
                r.state.apply_pauli(pre)
            for outcome_run in self._project(s, r):
                if post is not None:
                    outcome_run.state.apply_pauli(post)
                yield outcome_run

    def _project(self, s: Measure, run: Run) -> Iterator[Run]:
        q = s.qubit
        if run.state.random_row(q) is None:
            out, _ = run.state.measure(q)
            run.store[s.var] = out
            run.outcomes = run.outcomes + ((s.sid, out),)
            yield run
            return
        if self.mode == "script":
            choices = [self.script.outcomes.get(s.sid, 0)]
        elif self.mode == "ideal" and self.outcomes is not None:
            try:
                choices = [next(self.outcomes) & 1]
            except StopIteration:
                raise InterpError("outcome stream exhausted") from None
        else:
            choices = [0, 1]
        for b in choices:
            r = run.fork() if len(choices) > 1 else run
            r.state.measure(q, forced=b)
            r.store[s.var] = b
            r.prob = r.prob / 2
            r.outcomes = r.outcomes + ((s.sid, b),)
            yield r

    def _repeat(self, s: Repeat, run: Run, it: int) -> Iterator[Run]:
        if it >= self.iteration_cap:
            raise IterationCapExceeded(f"loop at stmt {s.sid} exceeded {self.iteration_cap} iterations")
        if self.mode == "enumerate" or (self.mode == "ideal" and self.outcomes is None):
            key = (s.sid, run.state.key(), tuple(sorted(run.store.items())), run.budget)
            if key in self._loop_seen:
                return
            self._loop_seen.add(key)
        for r in self._block(s.body, run):
            if _bit(eval_cexpr(s.cond, r.store)):
                yield r
            else:
                r.loop_retries += 1
                if self.mode == "script":
                    # replay models a single successful iteration
                    yield r
                    continue
                yield from self._repeat(s, r, it + 1)


def run_ideal(prog: Program, state: Optional[ConcreteState] = None, store: Optional[Dict] = None,
              outcomes: Optional[Iterable[int]] = None, iteration_cap: int = 1000) -> Run:
    """Fault-free execution with random outcomes drawn from ``outcomes`` (default all 0)."""
    if state is None:
        state = ConcreteState.zero(prog.n_qubits)
    if outcomes is None:
        outcomes = _zeros()
    it = Interpreter(prog, "ideal", outcomes=outcomes, iteration_cap=iteration_cap)
    return next(iter(it.runs(state, store)))


def _zeros():
    while True:
        yield 0


def ideal_branches(prog: Program, state: Optional[ConcreteState] = None, store: Optional[Dict] = None) -> List[Run]:
    """All fault-free terminal runs (every measurement branch)."""
    if state is None:
        state = ConcreteState.zero(prog.n_qubits)
    it = Interpreter(prog, "ideal", outcomes=None)
    return list(it.runs(state, store))


def enumerate_pauli_fault_runs(prog: Program, state: Optional[ConcreteState] = None, budget: int = 1,
                               store: Optional[Dict] = None, run_cap: int = 2_000_000) -> Iterator[Run]:
    """Every terminal run with at most ``budget`` Pauli faults.

    Repeated loop-head configurations are visited once, so the stream covers
    the set of reachable terminals (not their multiplicities).
    """
    if state is None:
        state = ConcreteState.zero(prog.n_qubits)
    it = Interpreter(prog, "enumerate", run_cap=run_cap)
    yield from it.runs(state, store, budget=budget)


def replay(prog: Program, script: Script, state: Optional[ConcreteState] = None, store: Optional[Dict] = None) -> Run:
    if state is None:
        state = ConcreteState.zero(prog.n_qubits)
    it = Interpreter(prog, "script", script=script)
    return next(iter(it.runs(state, store)))
