"""End-to-end fault-tolerance verification of gadget programs."""

from __future__ import annotations

import copy
import json
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import symbool as sb
from .codes import StabilizerCode
from .cqprog.analysis import output_qubits
from .cqprog.ast import Program, Repeat, walk
from .cqprog.interp import InterpError, Interpreter, Script, enumerate_pauli_fault_runs, replay as concrete_replay
from .cqprog.parser import pretty
from .cqprog.stabsim import ConcreteState
from .engine import Config, Engine, EngineError
from .gadgets import GadgetSpec
from .gf2_pauli import PauliOp
from .smt import (
    DistanceData,
    FTQuery,
    GeneratorMismatch,
    SolverResult,
    build_ft_query,
    check_sat_expr,
    distance_data,
    dump_script,
    emit_smtlib,
    min_block_weight,
    solve,
)
from .symbool import SymbolPool
from .tableau import SymTableau

FAULT_TOLERANT = "fault_tolerant"
NOT_FAULT_TOLERANT = "not_fault_tolerant"
INCONCLUSIVE = "inconclusive"
REPORT_VERSION = 1

DEFAULT_ENCODING = "table"


@dataclass
class VerificationJob:
    gadget: GadgetSpec
    t: int
    bases: Tuple[str, ...] = ("z", "x")
    mode: str = "ft"  # ft | ideal
    solver: Optional[str] = None
    timeout: Optional[float] = None
    jobs: int = 1
    dump_smt: Optional[str] = None
    encoding: str = DEFAULT_ENCODING

    def effective_bases(self) -> Tuple[str, ...]:
        if self.gadget.kind == "prep":
            return ("z",)  # no logical input
        if self.gadget.kind == "measure":
            return ("z",)
        return tuple(self.bases)

    @property
    def ideal_case(self) -> bool:
        return self.mode == "ideal" or self.gadget.kind == "ideal_ec"


@dataclass
class Counterexample:
    basis: str
    path: str
    violated_condition: str
    faults: List[Dict] = field(default_factory=list)
    input_errors: List[Dict] = field(default_factory=list)
    outcomes: Dict[str, int] = field(default_factory=dict)
    decoder_outputs: Dict[str, List[int]] = field(default_factory=dict)
    logical: Dict[str, int] = field(default_factory=dict)
    phase_difference: List[int] = field(default_factory=list)
    replay_ok: bool = False
    replay_detail: str = ""

    @property
    def n_faults(self) -> int:
        return len({(f["stmt"], "m" if f["role"] in ("mpre", "mpost") else f["role"]) for f in self.faults})

    def summary(self) -> str:
        lines = [f"counterexample ({self.basis} basis, path {self.path}): {self.violated_condition}"]
        for f in self.faults:
            lines.append(f"  fault at stmt {f['stmt']} (line {f['line']}, {f['role']}): {f['pauli']} on q{f['qubit']}")
        for e in self.input_errors:
            lines.append(f"  input error {e['pauli']} on q{e['qubit']}")
        if self.logical:
            lines.append("  logical input phases: " + ", ".join(f"{k}={v}" for k, v in sorted(self.logical.items())))
        lines.append(f"  replay: {'confirmed' if self.replay_ok else 'NOT confirmed'} ({self.replay_detail})")
        return "\n".join(lines)


@dataclass
class Verdict:
    status: str
    counterexample: Optional[Counterexample] = None
    reason: str = ""
    paths: int = 0
    queries: int = 0
    solver_time: float = 0.0
    wall_time: float = 0.0
    per_basis: Dict[str, int] = field(default_factory=dict)

    def to_json(self) -> Dict:
        out = {
            "version": REPORT_VERSION,
            "status": self.status,
            "reason": self.reason,
            "paths": self.paths,
            "queries": self.queries,
            "solver_time": round(self.solver_time, 3),
            "wall_time": round(self.wall_time, 3),
            "per_basis_paths": self.per_basis,
            "counterexample": None,
        }
        if self.counterexample is not None:
            out["counterexample"] = asdict(self.counterexample)
        return out


# -- inputs -------------------------------------------------------------------------------


def make_inputs(code: StabilizerCode, blocks: int = 1, pool: Optional[SymbolPool] = None) -> Dict[str, SymTableau]:
    """Symbolic logical-basis inputs: ``z`` carries a phase symbol per logical Z."""
    pool = pool if pool is not None else SymbolPool()
    out = {}
    for basis in ("z", "x"):
        parts = []
        for b in range(blocks):
            gens = [g.unsigned() for g in code.generators]
            phases = [sb.FALSE] * len(gens)
            if basis == "z":
                for k, zl in enumerate(code.logical_z):
                    gens.append(zl)
                    phases.append(pool.get_or_create("logical-phase", (f"b{b}", f"k{k}")).expr)
            else:
                gens += list(code.logical_x)
                phases += [sb.FALSE] * len(code.logical_x)
            parts.append((SymTableau.from_generators(gens, phases), list(range(b * code.n, (b + 1) * code.n))))
        if blocks == 1:
            out[basis] = parts[0][0]
        else:
            from .tableau import tensor

            out[basis] = tensor(parts, blocks * code.n)
    return out


def inject_input_errors(tab: SymTableau, blocks: Sequence[Sequence[int]], pool: Optional[SymbolPool] = None) -> Tuple[SymTableau, List[sb.FaultCounter]]:
    """Guarded X/Z on every listed qubit; one counter per block, one flag per qubit."""
    pool = pool if pool is not None else SymbolPool()
    tab = tab.copy()
    counters = []
    for blk in blocks:
        flags = []
        for q in blk:
            ex = pool.get_or_create("input-error-X", (f"q{q}",)).expr
            ez = pool.get_or_create("input-error-Z", (f"q{q}",)).expr
            tab._inject(q, ex, ez)
            flags.append(sb.or_(ex, ez))
        counters.append(sb.FaultCounter(flags))
    return tab, counters


def _local_blocks(spec: GadgetSpec) -> List[List[int]]:
    pos = {q: i for i, q in enumerate(spec.out_qubits)}
    return [[pos[q] for q in b] for b in spec.blocks]


def _ideal_state(spec: GadgetSpec, clean_input: Optional[SymTableau]) -> SymTableau:
    if spec.kind == "prep":
        return SymTableau.from_generators(spec.target)
    tab = clean_input.copy()
    if spec.kind == "gate":
        pos = {q: i for i, q in enumerate(spec.out_qubits)}
        for name, qs in spec.ideal_gates:
            tab._apply(name.upper(), tuple(pos[q] for q in qs))
    return tab


# -- nested cat-preparation checks ------------------------------------------------------------


def standalone_loop(prog: Program, loop: Repeat) -> Tuple[Program, List[int]]:
    """The loop as its own program over its qubits renumbered 0..k-1."""
    qs: List[int] = []
    for s in walk([loop]):
        for q in _qubits(s):
            if q not in qs:
                qs.append(q)
    remap = {q: i for i, q in enumerate(qs)}
    clone = copy.deepcopy(loop)
    for s in walk([clone]):
        if hasattr(s, "qubit"):
            s.qubit = remap[s.qubit]
        if hasattr(s, "qubits"):
            s.qubits = tuple(remap[q] for q in s.qubits)
    sub = Program(len(qs), [clone], {k: v for k, v in prog.oracles.items()}, {"gadget": "prep"})
    return sub, output_qubits(clone.body)


def _qubits(s) -> Tuple[int, ...]:
    from .cqprog.ast import qubits_of

    return qubits_of(s)


class _SubVerifier:
    def __init__(self, job: VerificationJob):
        self.job = job
        self.cache: Dict[Tuple[str, int], Tuple[bool, str]] = {}

    def __call__(self, prog: Program, loop: Repeat, t: int) -> Tuple[bool, str]:
        sub, outs = standalone_loop(prog, loop)
        key = (pretty(sub), t)
        if key in self.cache:
            return self.cache[key]
        res = self._verify(sub, outs, t)
        self.cache[key] = res
        return res

    def _verify(self, sub: Program, outs: List[int], t: int) -> Tuple[bool, str]:
        if not outs:
            return True, ""
        eng = Engine(sub, t=t, inject=False)
        terms = eng.run(eng.initial(SymTableau.zero_state(sub.n_qubits)))
        if not terms:
            return False, "preparation never succeeds"
        rt = terms[0].tab.restrict(outs)
        if rt is None:
            return False, "prepared qubits are entangled with the rest"
        zero = {name: 0 for name in rt.symbols()}
        target = []
        for g, ph in zip(rt.generators(), rt.phases):
            bit = sb.eval_expr(ph, zero)
            target.append(g.negate() if bit else g)
        spec = GadgetSpec("nested", "prep", sub, None, [outs], target)
        sub_job = VerificationJob(spec, t, solver=self.job.solver, timeout=self.job.timeout, encoding=self.job.encoding)
        v = verify(sub_job, _sub=self)
        if v.status == FAULT_TOLERANT:
            return True, ""
        return False, v.reason or v.status


def _sat_checker(job: VerificationJob):
    def check(exprs):
        res = check_sat_expr(list(exprs), job.solver, job.timeout)
        if res.status == "sat":
            return True
        if res.status == "unsat":
            return False
        return None

    return check


# -- pipeline -----------------------------------------------------------------------------------


@dataclass
class _PathQuery:
    basis: str
    cfg: Config
    query: Optional[FTQuery]
    mismatch: str = ""
    script: str = ""


def _build_queries(job: VerificationJob, basis: str, pool: SymbolPool, sub: _SubVerifier) -> Tuple[List[_PathQuery], Engine]:
    spec = job.gadget
    prog = spec.program
    kind = spec.kind
    out_q = spec.out_qubits
    local_blocks = _local_blocks(spec)
    clean = None
    f_in: List[sb.FaultCounter] = []
    if kind == "prep":
        start = SymTableau.zero_state(prog.n_qubits)
    else:
        if spec.code is None:
            raise EngineError("gadget needs a code to construct inputs")
        inputs = make_inputs(spec.code, len(spec.blocks), pool)
        clean = inputs[basis]
        dirty, f_in = inject_input_errors(clean, local_blocks, pool)
        start = dirty.embed(prog.n_qubits, out_q)
    inject = not job.ideal_case
    eng = Engine(prog, t=job.t, inject=inject, pool=pool, subverify=sub, sat_check=_sat_checker(job))
    terminals = eng.run(eng.initial(start, f_in))
    qkind = "ideal_ec" if job.ideal_case else kind
    ideal = _ideal_state(spec, clean) if kind != "measure" else None
    out = []
    for cfg in terminals:
        label = f"{spec.name}/{basis}/{cfg.fingerprint()}"
        try:
            if kind == "measure":
                outs = [sb.lift(cfg.store[v]) for v in spec.results]
                ideal_outs = [pool.get_or_create("logical-phase", ("b0", f"k{k}")).expr for k in range(len(outs))]
                q = build_ft_query("measure", job.t, cfg.phi, f_in, cfg.exec_counter,
                                   outcome=sb.or_(*[sb.xor2(a, b) for a, b in zip(outs, ideal_outs)]),
                                   ideal_outcome=sb.FALSE, label=label)
            else:
                q = build_ft_query(qkind, job.t, cfg.phi, f_in, cfg.exec_counter, terminal=cfg.tab, ideal=ideal,
                                   out_qubits=out_q, blocks=local_blocks, label=label)
            out.append(_PathQuery(basis, cfg, q))
        except GeneratorMismatch as exc:
            out.append(_PathQuery(basis, cfg, None, mismatch=str(exc)))
    return out, eng


def verify(job: VerificationJob, _sub: Optional[_SubVerifier] = None) -> Verdict:
    """Run every required input through the engine and discharge each path."""
    start = time.monotonic()
    sub = _sub if _sub is not None else _SubVerifier(job)
    pool = SymbolPool()
    all_q: List[_PathQuery] = []
    per_basis = {}
    try:
        for basis in job.effective_bases():
            qs, eng = _build_queries(job, basis, pool, sub)
            per_basis[basis] = len(qs)
            all_q += qs
    except EngineError as exc:
        return Verdict(INCONCLUSIVE, reason=str(exc), wall_time=time.monotonic() - start)
    for pq in all_q:
        if pq.mismatch:
            return Verdict(NOT_FAULT_TOLERANT, reason=f"output stabilizer group differs from the ideal one on path "
                           f"{pq.cfg.fingerprint()} ({pq.basis} basis): {pq.mismatch}", paths=len(all_q),
                           wall_time=time.monotonic() - start, per_basis=per_basis)
    for pq in all_q:
        pq.script = emit_smtlib(pq.query, job.encoding)
    if job.dump_smt:
        for i, pq in enumerate(all_q):
            dump_script(pq.script, job.dump_smt, f"{job.gadget.name}_{pq.basis}_{i:04d}.smt2")

    def run(pq: _PathQuery) -> SolverResult:
        return solve(pq.script, job.solver, job.timeout)

    if job.jobs > 1 and len(all_q) > 1:
        with ThreadPoolExecutor(max_workers=job.jobs) as ex:
            results = list(ex.map(run, all_q))
    else:
        results = [run(pq) for pq in all_q]
    solver_time = sum(r.time for r in results)
    stats = dict(paths=len(all_q), queries=len(all_q), solver_time=solver_time, per_basis=per_basis)
    for pq, res in zip(all_q, results):
        if res.status == "sat":
            cex = model_to_counterexample(res.model, pq, job, pool)
            return Verdict(NOT_FAULT_TOLERANT, cex, reason=cex.violated_condition,
                           wall_time=time.monotonic() - start, **stats)
    bad = [r for r in results if r.status != "unsat"]
    if bad:
        return Verdict(INCONCLUSIVE, reason=f"{len(bad)} path(s) undecided: {bad[0].status} {bad[0].reason}".strip(),
                       wall_time=time.monotonic() - start, **stats)
    return Verdict(FAULT_TOLERANT, wall_time=time.monotonic() - start, **stats)


# -- counterexamples --------------------------------------------------------------------------------

_FAULT_RE = re.compile(r"^f([xz])_s(\d+)_q(\d+)_(in|ut|mpre|mpost)$")
_INPUT_RE = re.compile(r"^i([xz])_q(\d+)$")
_MEAS_RE = re.compile(r"^m_s(\d+)_q(\d+)$")
_DEC_RE = re.compile(r"^r_s(\d+)_b(\d+)$")


def model_to_counterexample(model: Dict[str, int], pq: _PathQuery, job: VerificationJob, pool: SymbolPool) -> Counterexample:
    """Decode a violating model and confirm it by concrete replay."""
    q = pq.query
    declared = q.symbols()
    full = {name: model.get(name, 0) for name in declared}
    spec = job.gadget
    prog = spec.program
    n = prog.n_qubits
    faults: Dict[Tuple[int, str], List[int]] = {}
    inputs: Dict[int, List[int]] = {}
    outcomes: Dict[int, int] = {}
    dec: Dict[int, Dict[int, int]] = {}
    logical: Dict[str, int] = {}
    for name, v in full.items():
        m = _FAULT_RE.match(name)
        if m:
            if v:
                xz, sid, qb, role = m.groups()
                e = faults.setdefault((int(sid), role), [0, 0])
                e[0 if xz == "x" else 1] |= 1 << int(qb)
            continue
        m = _INPUT_RE.match(name)
        if m:
            if v:
                xz, qb = m.groups()
                e = inputs.setdefault(int(qb), [0, 0])
                e[0 if xz == "x" else 1] = 1
            continue
        m = _MEAS_RE.match(name)
        if m:
            outcomes[int(m.group(1))] = v
            continue
        m = _DEC_RE.match(name)
        if m:
            dec.setdefault(int(m.group(1)), {})[int(m.group(2))] = v
            continue
        if name.startswith("L_"):
            logical[name] = v
    for sym in pool.of_kind("logical-phase"):
        logical.setdefault(sym.name, full.get(sym.name, 0))
    # guarded faults in untaken branches have no effect; keep only those on the executed path
    executed = _executed_sids(pq.cfg)
    faults = {k: v for k, v in faults.items() if k[0] in executed and _guard_holds(pq.cfg, k[0], full)}
    fault_list = []
    for (sid, role), (x, z) in sorted(faults.items()):
        p = PauliOp(n, x, z)
        for qb in range(n):
            letter = p.letter(qb)
            if letter != "I":
                fault_list.append({"stmt": sid, "line": prog.stmt(sid).line, "role": role, "qubit": qb, "pauli": letter})
    out_q = spec.out_qubits
    input_list = []
    for local, (x, z) in sorted(inputs.items()):
        letter = "Y" if x and z else ("X" if x else "Z")
        input_list.append({"qubit": out_q[local], "pauli": letter})
    diff = []
    if q.distance is not None:
        diff = [sb.eval_expr(e, full) for e in q.distance.diff]
    cex = Counterexample(
        basis=pq.basis,
        path=pq.cfg.fingerprint(),
        violated_condition=_describe_violation(q, full),
        faults=fault_list,
        input_errors=input_list,
        outcomes={str(k): v for k, v in sorted(outcomes.items())},
        decoder_outputs={str(k): [bits.get(i, 0) for i in range(max(bits) + 1)] for k, bits in sorted(dec.items())},
        logical=logical,
        phase_difference=diff,
    )
    script = Script(
        faults={k: PauliOp(n, x, z) for k, (x, z) in faults.items()},
        outcomes=outcomes,
        oracle_out={k: tuple(bits.get(i, 0) for i in range(max(bits) + 1)) for k, bits in dec.items()},
    )
    ok, detail = replay_counterexample(job, pq.basis, script, inputs, logical, pool)
    cex.replay_ok = ok
    cex.replay_detail = detail
    return cex


def _guard_holds(cfg: Config, sid: int, full: Dict[str, int]) -> bool:
    g = cfg.guards.get(sid)
    if g is None:
        return True
    env = {name: full.get(name, 0) for name in sb.symbols(g)}
    return bool(sb.eval_expr(g, env))


def _executed_sids(cfg: Config) -> set:
    out = set()
    for ev in cfg.trace:
        out.add(ev.sid)
        for name in ev.symbols:
            m = _FAULT_RE.match(name)
            if m:
                out.add(int(m.group(2)))
    return out


def _describe_violation(q: FTQuery, full: Dict[str, int]) -> str:
    budget = sum(sb.eval_expr(e, full) for e in q.budget_terms)
    if q.kind == "measure":
        return f"measurement outcome differs from the ideal one with {budget} fault(s)"
    bound = sum(sb.eval_expr(e, full) for e in q.bound_terms)
    diff = [sb.eval_expr(e, full) for e in q.distance.diff]
    p = 0
    for b, e in enumerate(q.distance.p_bits()):
        if sb.eval_expr(e, full):
            p |= 1 << b
    d = min_block_weight(q.distance, p)
    if q.exact:
        return f"output differs from the ideal state (distance {d}) with {budget} input error(s)"
    return f"{budget} fault(s) leave {d} output error(s) (allowed {bound})"


def replay_counterexample(job: VerificationJob, basis: str, script: Script, inputs: Dict[int, List[int]],
                          logical: Dict[str, int], pool: SymbolPool) -> Tuple[bool, str]:
    """Re-run the fault pattern concretely and check that the gadget condition fails."""
    spec = job.gadget
    prog = spec.program
    n = prog.n_qubits
    out_q = spec.out_qubits
    clean_sym = None
    if spec.kind == "prep":
        state = ConcreteState.zero(n)
    else:
        clean_sym = make_inputs(spec.code, len(spec.blocks), pool)[basis]
        state = _concrete_input(clean_sym, logical, out_q, n)
        for local, (x, z) in inputs.items():
            state.apply_pauli(PauliOp(n, x << out_q[local], z << out_q[local]))
    try:
        run = concrete_replay(prog, script, state)
    except (InterpError, KeyError) as exc:
        return False, f"replay failed: {exc}"
    n_exec = len({(f.sid, "m" if f.role in ("mpre", "mpost") else f.role) for f in run.faults})
    n_in = len(inputs)
    if run.loop_retries:
        return False, f"replayed run fails a loop exit condition ({run.loop_retries} time(s))"
    if spec.kind == "measure":
        got = [int(run.store[v]) for v in spec.results]
        want = [logical.get(pool.get_or_create("logical-phase", ("b0", f"k{k}")).name, 0) for k in range(len(got))]
        if n_in + n_exec <= job.t and got != want:
            return True, f"outcome {got} vs ideal {want} with {n_in} input error(s) and {n_exec} fault(s)"
        return False, f"no violation: outcome {got}, ideal {want}, {n_in + n_exec} fault(s)"
    ideal = _ideal_state(spec, clean_sym)
    ideal_gens = ideal.concretize(logical)
    d = concrete_distance(run.state, ideal_gens, out_q, _local_blocks(spec))
    if d is None:
        return True, "output stabilizer group differs from the ideal one"
    if job.ideal_case:
        ok = n_in <= job.t and d > 0
        return ok, f"{n_in} input error(s) leave distance {d} from the ideal output"
    if spec.kind == "prep":
        budget, bound = n_exec, n_exec
    elif spec.kind == "gate":
        budget, bound = n_in + n_exec, n_in + n_exec
    else:
        budget, bound = n_in + n_exec, n_exec
    ok = budget <= job.t and d > bound
    return ok, f"{n_in} input error(s) and {n_exec} fault(s) leave {d} output error(s) (allowed {bound})"


def _concrete_input(tab: SymTableau, logical: Dict[str, int], out_q: Sequence[int], n: int) -> ConcreteState:
    gens = [g.embed(n, out_q) for g in tab.concretize(logical)]
    used = set(out_q)
    for q in range(n):
        if q not in used:
            gens.append(PauliOp.single(n, q, "Z"))
    return ConcreteState.from_stabilizers(gens)


def concrete_distance(state: ConcreteState, ideal_gens: Sequence[PauliOp], out_q: Sequence[int],
                      blocks: Sequence[Sequence[int]]) -> Optional[int]:
    """Minimal (max-per-block) weight of a Pauli mapping the output qubits to the ideal state.

    None when some ideal stabilizer is not determined on the output.
    """
    n = state.n
    unsigned = [g.unsigned() for g in ideal_gens]
    ideal_tab = SymTableau.from_generators(unsigned)
    dd = distance_data(ideal_tab, ideal_tab, blocks)
    p = 0
    for j, g in enumerate(ideal_gens):
        e = state.expectation(g.unsigned().embed(n, out_q))
        if e is None:
            return None
        if e ^ g.sign:
            p ^= dd.destab[j]
    return min_block_weight(dd, p)


# -- brute-force reference ------------------------------------------------------------------------------


def oracle_verdict(spec: GadgetSpec, t: int, mode: str = "ft", run_cap: int = 2_000_000) -> Tuple[str, str]:
    """Verdict by exhaustive enumeration of Pauli faults (small programs only).

    Inputs: every logical basis state of both bases with every Pauli input
    error pattern allowed by the budget.  Returns (status, explanation).
    """
    from .cqprog.interp import _local_paulis  # noqa: WPS450
    from .gf2_pauli import iter_paulis

    prog = spec.program
    n = prog.n_qubits
    out_q = spec.out_qubits
    blocks = _local_blocks(spec)
    ideal_case = mode == "ideal" or spec.kind == "ideal_ec"
    cases = []  # (state, ideal_gens, n_in, logical bits)
    if spec.kind == "prep":
        cases.append((ConcreteState.zero(n), list(spec.target), 0, ()))
    else:
        code = spec.code
        k = len(code.logical_z)
        nb = len(spec.blocks)
        pool = SymbolPool()
        tabs = make_inputs(code, nb, pool)
        bases = ("z",) if spec.kind == "measure" else ("z", "x")
        for basis in bases:
            assigns = [()]
            if basis == "z":
                names = [pool.get_or_create("logical-phase", (f"b{b}", f"k{j}")).name for b in range(nb) for j in range(k)]
                assigns = [tuple(((i >> j) & 1) for j in range(len(names))) for i in range(1 << len(names))]
            else:
                names = []
            for bits in assigns:
                logical = dict(zip(names, bits))
                clean = tabs[basis]
                base = _concrete_input(clean, logical, out_q, n)
                ideal = _ideal_state(spec, clean).concretize(logical)
                for e in iter_paulis(len(out_q), t):
                    st = base.copy()
                    st.apply_pauli(e.embed(n, out_q))
                    cases.append((st, ideal, e.weight(), bits))
    for st, ideal, n_in, bits in cases:
        budget = 0 if ideal_case else t - n_in
        if budget < 0:
            continue
        if ideal_case and n_in > t:
            continue
        for run in enumerate_pauli_fault_runs(prog, st, budget=budget, run_cap=run_cap):
            n_exec = len(run.faults)
            if spec.kind == "measure":
                got = [int(run.store[v]) for v in spec.results]
                want = list(bits[: len(got)])
                if got != want:
                    return NOT_FAULT_TOLERANT, f"outcome {got} vs {want} with {n_in} input error(s), faults {[f.describe() for f in run.faults]}"
                continue
            d = concrete_distance(run.state, ideal, out_q, blocks)
            if ideal_case:
                bound = 0
            elif spec.kind == "prep":
                bound = n_exec
            elif spec.kind == "gate":
                bound = n_in + n_exec
            else:
                bound = n_exec
            if d is None or d > bound:
                return NOT_FAULT_TOLERANT, (f"{n_in} input error(s), faults {[f.describe() for f in run.faults]} "
                                            f"leave {'an unrelated state' if d is None else d} (allowed {bound})")
    return FAULT_TOLERANT, ""


def verdict_json(v: Verdict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(v.to_json(), fh, indent=2, sort_keys=True)
        fh.write("\n")
