"""Symbolic execution of programs under Pauli fault injection.

Every gate, reset and measurement location gets guarded X/Z flips whose guards
are fresh fault symbols; each location contributes one term to the execution
fault counter.  Loops are executed once and post-selected on their until
condition after their class has been checked.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import symbool as sb
from .cqprog.analysis import (
    check_conservative_structure,
    memoryless_report,
    transversality_report,
)
from .cqprog.ast import (
    CONSERVATIVE,
    MEMORYLESS,
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
    pauli_of_block,
    pauli_only,
    walk,
)
from .smt import oracle_assertion
from .symbool import Expr, IntExpr, SymbolPool
from .tableau import SymTableau

RULES = ("SF-IN", "SF-UT", "SF-M", "SF-AS", "SF-CO", "SF-CT", "SF-CF", "SF-CP", "RU'")


class EngineError(RuntimeError):
    """Verification cannot proceed (loop-class violation, cap exceeded, ...)."""


class LoopClassError(EngineError):
    pass


class PathCapExceeded(EngineError):
    pass


@dataclass(frozen=True)
class TraceEvent:
    sid: int
    rule: str
    symbols: Tuple[str, ...] = ()


@dataclass
class Config:
    """One symbolic execution state (program counter is implicit in the walker)."""

    tab: SymTableau
    store: Dict[str, object]
    prob: Fraction = Fraction(1)
    phi: List[Expr] = field(default_factory=list)
    f_in: List[sb.FaultCounter] = field(default_factory=list)
    f_exec: List[Expr] = field(default_factory=list)
    trace: List[TraceEvent] = field(default_factory=list)
    branch: Tuple[Tuple[int, int], ...] = ()
    guards: Dict[int, Expr] = field(default_factory=dict)  # sid -> guard of a Pauli-only branch

    def fork(self) -> "Config":
        return Config(self.tab.copy(), dict(self.store), self.prob, list(self.phi), list(self.f_in),
                      list(self.f_exec), list(self.trace), self.branch, dict(self.guards))

    @property
    def exec_counter(self) -> sb.FaultCounter:
        return sb.FaultCounter(self.f_exec)

    def fingerprint(self) -> str:
        text = ";".join(f"{s}:{b}" for s, b in self.branch)
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def path_condition(self) -> Expr:
        return sb.and_(*self.phi)


# -- symbolic classical evaluation ---------------------------------------------


def eval_sym(e, store: Dict[str, object]):
    """Value of a classical expression: bit Expr, IntExpr or tuple of Exprs."""
    if isinstance(e, Const):
        return sb.const(e.value & 1) if e.value in (0, 1) else IntExpr((), e.value)
    if isinstance(e, Var):
        return store[e.name]
    if isinstance(e, Index):
        return store[e.name][e.index]
    if isinstance(e, Not):
        return sb.not_(_as_bit(eval_sym(e.arg, store)))
    if isinstance(e, BinOp):
        a = eval_sym(e.left, store)
        b = eval_sym(e.right, store)
        op = e.op
        if op == "^":
            return sb.xor2(_as_bit(a), _as_bit(b))
        if op == "&&":
            return sb.and_(_as_bit(a), _as_bit(b))
        if op == "||":
            return sb.or_(_as_bit(a), _as_bit(b))
        if op == "+":
            return IntExpr.of(a) + IntExpr.of(b)
        if isinstance(a, Expr) and isinstance(b, Expr) and op in ("==", "!="):
            d = sb.xor2(a, b)
            return sb.not_(d) if op == "==" else d
        a, b = IntExpr.of(a), IntExpr.of(b)
        if op == ">=":
            return sb.int_ge(a, b)
        if op == "<=":
            return sb.int_ge(b, a)
        if op == ">":
            return sb.int_ge(a, b + 1)
        if op == "<":
            return sb.int_ge(b, a + 1)
        if op == "==":
            return sb.int_eq(a, b)
        if op == "!=":
            return sb.not_(sb.int_eq(a, b))
    raise EngineError(f"cannot evaluate expression {e!r}")


def _as_bit(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, IntExpr) and v.is_const() and v.const in (0, 1):
        return sb.const(v.const)
    if isinstance(v, IntExpr) and v.const == 0 and len(v.terms) == 1:
        return v.terms[0]
    raise EngineError("integer value used as a bit")


# -- engine -----------------------------------------------------------------------


SubVerifier = Callable[[Program, Repeat, int], Tuple[bool, str]]
SatChecker = Callable[[Sequence[Expr]], Optional[bool]]


class Engine:
    """Explores all symbolic paths of ``prog``.

    ``t`` is the fault budget used for nested sub-gadget checks.
    ``inject`` = False disables execution-fault injection (ideal-case mode).
    ``subverify(prog, loop, t)`` decides whether a nested memoryless loop
    (a cat-state preparation) is itself fault tolerant.
    ``sat_check(exprs)`` returns True/False/None (unknown) for satisfiability
    of a conjunction and is used only when the cheap fault-free-termination
    check of a conservative loop is inconclusive.
    """

    def __init__(self, prog: Program, t: int = 1, inject: bool = True, pool: Optional[SymbolPool] = None,
                 subverify: Optional[SubVerifier] = None, sat_check: Optional[SatChecker] = None,
                 path_cap: int = 1_000_000):
        self.prog = prog
        self.t = t
        self.inject = inject
        self.pool = pool if pool is not None else SymbolPool()
        self.subverify = subverify
        self.sat_check = sat_check
        self.path_cap = path_cap
        self.paths = 0
        self.diagnostics: List[str] = []
        self._loop_ok: Dict[int, bool] = {}

    # -- symbols ----------------------------------------------------------------

    def _sym(self, kind: str, *origin) -> Expr:
        return self.pool.get_or_create(kind, origin).expr

    def _ei(self, cfg: Config, sid: int, q: int, role: str, guard: Expr = sb.TRUE) -> Tuple[Expr, List[str]]:
        """Inject a guarded X/Z error on ``q``; returns the fault flag."""
        ex = self._sym("fault-X", f"s{sid}", f"q{q}", role)
        ez = self._sym("fault-Z", f"s{sid}", f"q{q}", role)
        names = [ex.value, ez.value]
        if guard is not sb.TRUE:
            cfg.guards[sid] = guard
            ex, ez = sb.and_(guard, ex), sb.and_(guard, ez)
        cfg.tab._inject(q, ex, ez)
        return sb.or_(ex, ez), names

    # -- driver -----------------------------------------------------------------

    def initial(self, tab: SymTableau, f_in: Sequence[sb.FaultCounter] = (), phi: Sequence[Expr] = (),
                store: Optional[Dict[str, object]] = None) -> Config:
        if tab.n != self.prog.n_qubits:
            raise EngineError(f"initial tableau has {tab.n} qubits, program uses {self.prog.n_qubits}")
        return Config(tab.copy(), dict(store or {}), Fraction(1), list(phi), list(f_in))

    def run(self, init: Config) -> List[Config]:
        """All terminal configurations, in canonical order."""
        self.paths = 0
        out = self.exec_block(self.prog.body, [init])
        out.sort(key=lambda c: c.branch)
        return out

    def exec_block(self, stmts: Sequence[Stmt], cfgs: List[Config]) -> List[Config]:
        for s in stmts:
            nxt: List[Config] = []
            for c in cfgs:
                nxt.extend(self.step(s, c))
            cfgs = nxt
            if len(cfgs) > self.path_cap:
                raise PathCapExceeded(f"more than {self.path_cap} symbolic paths at stmt {s.sid}")
            if not cfgs:
                break
        self.paths = max(self.paths, len(cfgs))
        return cfgs

    # -- transitions --------------------------------------------------------------

    def step(self, s: Stmt, cfg: Config) -> List[Config]:
        """Apply one statement to ``cfg`` (mutated in place) and return the children."""
        if isinstance(s, Init):
            cfg.tab._initialize(s.qubit)
            names: List[str] = []
            if self.inject:
                flag, names = self._ei(cfg, s.sid, s.qubit, "in")
                cfg.f_exec.append(flag)
            cfg.trace.append(TraceEvent(s.sid, "SF-IN", tuple(names)))
            return [cfg]
        if isinstance(s, Gate):
            cfg.tab._apply(s.name.upper(), tuple(s.qubits))
            names = []
            if self.inject:
                flags = []
                for q in s.qubits:
                    f, nm = self._ei(cfg, s.sid, q, "ut")
                    flags.append(f)
                    names += nm
                cfg.f_exec.append(sb.or_(*flags))
            cfg.trace.append(TraceEvent(s.sid, "SF-UT", tuple(names)))
            return [cfg]
        if isinstance(s, Measure):
            return [self._measure(s, cfg)]
        if isinstance(s, Assign):
            cfg.store[s.var] = eval_sym(s.expr, cfg.store)
            cfg.trace.append(TraceEvent(s.sid, "SF-AS"))
            return [cfg]
        if isinstance(s, OracleCall):
            spec = self.prog.oracles[s.oracle]
            args = [_as_bit(eval_sym(a, cfg.store)) for a in s.args]
            outs = [self._sym("decoder-output", f"s{s.sid}", f"b{i}") for i in range(spec.out_width)]
            cfg.phi.append(oracle_assertion(spec, args, outs))
            cfg.store[s.var] = outs[0] if spec.out_width == 1 else tuple(outs)
            cfg.trace.append(TraceEvent(s.sid, "SF-CO", tuple(o.value for o in outs)))
            return [cfg]
        if isinstance(s, IfElse):
            return self._if(s, cfg)
        if isinstance(s, Repeat):
            return self.step_ru(s, cfg)
        raise EngineError(f"unknown statement {s!r}")  # pragma: no cover

    def _measure(self, s: Measure, cfg: Config) -> Config:
        q = s.qubit
        names: List[str] = []
        e1 = e2 = sb.FALSE
        if self.inject:
            e1, nm = self._ei(cfg, s.sid, q, "mpre")
            names += nm
        mname = self.pool.get_or_create("measurement-outcome", (f"s{s.sid}", f"q{q}")).name
        out, prob = cfg.tab._measure(q, lambda: sb.var(mname))
        if prob != 1:
            names.append(mname)
        cfg.prob *= prob
        if self.inject:
            e2, nm = self._ei(cfg, s.sid, q, "mpost")
            names += nm
            cfg.f_exec.append(sb.or_(e1, e2))
        cfg.store[s.var] = out
        cfg.trace.append(TraceEvent(s.sid, "SF-M", tuple(names)))
        return cfg

    def _if(self, s: IfElse, cfg: Config) -> List[Config]:
        c = _as_bit(eval_sym(s.cond, cfg.store))
        if c.is_const():
            branch = s.then if c.value else s.orelse
            cfg.trace.append(TraceEvent(s.sid, "SF-CT" if c.value else "SF-CF"))
            return self.exec_block(branch, [cfg])
        if pauli_only(s.then) and pauli_only(s.orelse):
            n = cfg.tab.n
            names: List[str] = []
            for body, guard in ((s.then, c), (s.orelse, sb.not_(c))):
                p = pauli_of_block(body, n)
                cfg.tab._xor_phases_if(p.x, p.z, guard)
                if self.inject:
                    for g in body:
                        f, nm = self._ei(cfg, g.sid, g.qubits[0], "ut", guard)
                        cfg.f_exec.append(f)
                        names += nm
            cfg.trace.append(TraceEvent(s.sid, "SF-CP", tuple(names)))
            return [cfg]
        other = cfg.fork()
        cfg.phi.append(c)
        cfg.branch = cfg.branch + ((s.sid, 1),)
        cfg.trace.append(TraceEvent(s.sid, "SF-CT"))
        other.phi.append(sb.not_(c))
        other.branch = other.branch + ((s.sid, 0),)
        other.trace.append(TraceEvent(s.sid, "SF-CF"))
        return self.exec_block(s.then, [cfg]) + self.exec_block(s.orelse, [other])

    # -- loops ------------------------------------------------------------------------

    def check_loop(self, s: Repeat) -> None:
        """Raise LoopClassError unless the annotated class is established."""
        if s.sid in self._loop_ok:
            return
        if s.loop_class == MEMORYLESS:
            rep = memoryless_report(s.body, s.cond)
            if not rep.ok:
                raise LoopClassError(f"loop at stmt {s.sid} is not memoryless: " + "; ".join(rep.violations))
        elif s.loop_class == CONSERVATIVE:
            rep = check_conservative_structure(s.body, s.cond)
            if not rep.ok:
                raise LoopClassError(f"loop at stmt {s.sid} is not conservative: " + "; ".join(rep.violations))
            ok, why = self.check_non_propagation(s.body)
            if not ok:
                raise LoopClassError(f"loop at stmt {s.sid} fails the error non-propagation condition: {why}")
        else:
            raise LoopClassError(f"loop at stmt {s.sid} has no supported class")
        self._loop_ok[s.sid] = True

    def check_non_propagation(self, body: Sequence[Stmt]) -> Tuple[bool, str]:
        """Nested cat-state preparations are FT and the body couples transversally."""
        for st in walk(body):
            if isinstance(st, Repeat) and st.loop_class == MEMORYLESS:
                if self.subverify is None:
                    return False, f"no sub-gadget verifier configured for nested loop at stmt {st.sid}"
                ok, why = self.subverify(self.prog, st, self.t)
                if not ok:
                    return False, f"nested preparation at stmt {st.sid} is not fault tolerant ({why})"
        rep = transversality_report(body)
        if not rep.ok:
            return False, "; ".join(rep.violations)
        return True, ""

    def step_ru(self, s: Repeat, cfg: Config) -> List[Config]:
        self.check_loop(s)
        children = self.exec_block(s.body, [cfg])
        out = []
        for ch in children:
            b = _as_bit(eval_sym(s.cond, ch.store))
            if s.loop_class == CONSERVATIVE:
                self._check_fault_free_exit(s, ch, b)
            if b is sb.FALSE:
                continue
            ch.phi.append(b)
            ch.trace.append(TraceEvent(s.sid, "RU'"))
            out.append(ch)
        if not out:
            self.diagnostics.append(f"loop at stmt {s.sid}: until-condition unsatisfiable on every path")
        return out

    def _check_fault_free_exit(self, s: Repeat, cfg: Config, cond: Expr) -> None:
        """A conservative loop must exit after one iteration when no execution fault occurs."""
        if not self.inject:
            return
        zero = {}
        for name in sb.symbols(cond, *cfg.phi):
            sym = self.pool.symbols.get(name)
            if sym is not None and sym.kind in sb.FAULT_KINDS:
                zero[name] = 0
        c0 = sb.substitute(cond, zero)
        if c0 is sb.TRUE:
            return
        if self.sat_check is not None:
            phi0 = [sb.substitute(e, zero) for e in cfg.phi]
            res = self.sat_check(phi0 + [sb.not_(c0)])
            if res is False:
                return
            if res is None:
                raise LoopClassError(f"loop at stmt {s.sid}: could not establish single-iteration termination")
        raise LoopClassError(f"loop at stmt {s.sid} may repeat in the fault-free case (not conservative)")


def run_program(prog: Program, tab: Optional[SymTableau] = None, **kwargs) -> List[Config]:
    """Convenience wrapper: run from ``tab`` (default |0...0>)."""
    eng = Engine(prog, **kwargs)
    if tab is None:
        tab = SymTableau.zero_state(prog.n_qubits)
    return eng.run(eng.initial(tab))
