"""Lowering of per-path fault-tolerance conditions to SMT-LIB2 and solver driving.

A path is fault tolerant when ``phi AND budget AND NOT post`` is
unsatisfiable; a model of that formula is a counterexample.

The post-condition "the output is within distance ``bound`` of the ideal
state" is encoded from the phase-difference vector ``diff`` between the
terminal and ideal generators.  Three encodings are available:

``quantified``
    ``forall w. wt(N w + p) > bound`` with ``w`` a bit-vector of size
    ``dim ker(M Lambda)``, popcounts as bit-vector sums.
``expanded``
    The same formula with ``w`` expanded over all its values (small outputs).
``table``
    Quantifier-free: ``diff`` must equal the syndrome of some Pauli whose
    (per-block) weight is at most ``bound``.  Because the budget caps the
    bound at ``t``, only Paulis of weight ``<= t`` are needed, which makes
    this exact.
"""

from __future__ import annotations

import functools
import os
import re
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import symbool as sb
from .cqprog.ast import OracleSpec
from .gf2_pauli import (
    GF2Matrix,
    PauliOp,
    check_matrix_lambda,
    iter_paulis,
    nullspace_vectors,
    popcount,
    solve as gf2_solve,
    syndrome,
)
from .symbool import Expr, FaultCounter
from .tableau import SymTableau

ENCODINGS = ("quantified", "expanded", "table")


# ---------------------------------------------------------------------------
# Oracle contracts


def syndrome_set(gens: Sequence[PauliOp], t: int) -> List[int]:
    """Sorted distinct syndromes (bit j = generator j) of all Paulis of weight <= t."""
    n = gens[0].n
    g = GF2Matrix.from_paulis(gens, n)
    seen = set()
    for p in iter_paulis(n, t):
        seen.add(syndrome(g, p))
    return sorted(seen)


def _bits_equal(exprs: Sequence[Expr], value: int) -> Expr:
    return sb.and_(*[e if (value >> j) & 1 else sb.not_(e) for j, e in enumerate(exprs)])


def build_decoder_assertion(spec: OracleSpec, m: Sequence[sb.ExprLike], r: Sequence[sb.ExprLike]) -> Expr:
    """``(m is the syndrome of some weight<=t Pauli) -> wt(r) <= t and syn(r) = m``."""
    gens = spec.params["gens"]
    t = spec.params["t"]
    n = gens[0].n
    m = [sb.lift(e) for e in m]
    r = [sb.lift(e) for e in r]
    if len(m) != len(gens) or len(r) != 2 * n:
        raise ValueError("decoder assertion arity mismatch")
    antecedent = sb.or_(*[_bits_equal(m, s) for s in syndrome_set(gens, t)])
    weight_ok = sb.at_most(t, [sb.or_(r[i], r[n + i]) for i in range(n)])
    syn_ok = []
    for j, g in enumerate(gens):
        terms = [r[i] for i in range(n) if (g.z >> i) & 1] + [r[n + i] for i in range(n) if (g.x >> i) & 1]
        syn_ok.append(sb.iff(sb.xor(*terms), m[j]))
    return sb.implies(antecedent, sb.and_(weight_ok, *syn_ok))


def oracle_assertion(spec: OracleSpec, args: Sequence[sb.ExprLike], outs: Sequence[sb.ExprLike]) -> Expr:
    args = [sb.lift(a) for a in args]
    outs = [sb.lift(o) for o in outs]
    if spec.kind == "decoder":
        return build_decoder_assertion(spec, args, outs)
    if spec.kind == "majority":
        return sb.iff(outs[0], sb.at_least(spec.params["k"] // 2 + 1, args))
    if spec.kind == "table":
        table = spec.params["table"]
        parts = []
        for b, y in enumerate(outs):
            rows = [k for k, v in sorted(table.items()) if v[b]]
            fires = sb.or_(*[sb.and_(*[a if bit else sb.not_(a) for a, bit in zip(args, row)]) for row in rows])
            parts.append(sb.iff(y, fires))
        return sb.and_(*parts)
    raise ValueError(f"unknown oracle kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Queries


class GeneratorMismatch(Exception):
    """The terminal state's unsigned stabilizer group differs from the ideal one."""


@dataclass
class DistanceData:
    """Everything needed to express ``D(terminal, ideal) <= bound``."""

    n: int  # output qubits
    ideal_gens: List[PauliOp]
    diff: List[Expr]  # phase differences, one per ideal generator
    null_basis: List[int]  # columns of N as 2n-bit vectors
    destab: List[int]  # d_j with M Lambda d_j = e_j
    blocks: List[List[int]]  # indices into the n output qubits

    def p_bits(self) -> List[Expr]:
        """Particular solution p = sum_j diff_j d_j, one expression per coordinate."""
        out = []
        for b in range(2 * self.n):
            out.append(sb.xor(*[self.diff[j] for j, d in enumerate(self.destab) if (d >> b) & 1]))
        return out


def distance_data(terminal: SymTableau, ideal: SymTableau, blocks: Optional[Sequence[Sequence[int]]] = None) -> DistanceData:
    """Align a (restricted) terminal with the ideal tableau on the same qubits."""
    if terminal.n != ideal.n:
        raise ValueError("terminal and ideal act on different qubit counts")
    n = ideal.n
    gens = ideal.generators()
    diff = []
    for g, h in zip(gens, ideal.phases):
        e = terminal.deterministic_phase_of(g)
        if e is None:
            raise GeneratorMismatch(f"ideal generator {g} is not in the terminal stabilizer group")
        diff.append(sb.xor2(e, h))
    ml = check_matrix_lambda(GF2Matrix.from_paulis(gens, n), n)
    null = nullspace_vectors(ml)
    destab = []
    for j in range(n):
        d = gf2_solve(ml, 1 << j)
        if d is None:  # pragma: no cover - ideal is full rank
            raise ValueError("ideal generators dependent")
        destab.append(d)
    if blocks is None:
        blocks = [list(range(n))]
    return DistanceData(n, gens, diff, null, destab, [list(b) for b in blocks])


def pauli_distance(dd: DistanceData, assignment: Mapping[str, int]) -> int:
    """Concrete minimum over w of the maximum block weight of N w + p (test/diagnostic)."""
    p = 0
    for b, e in enumerate(dd.p_bits()):
        if sb.eval_expr(e, assignment):
            p |= 1 << b
    return min_block_weight(dd, p)


def min_block_weight(dd: DistanceData, p: int) -> int:
    n = dd.n
    best = None
    k = len(dd.null_basis)
    for w in range(1 << k):
        v = p
        for j in range(k):
            if (w >> j) & 1:
                v ^= dd.null_basis[j]
        sup = (v | (v >> n)) & ((1 << n) - 1)
        wt = max(sum((sup >> q) & 1 for q in blk) for blk in dd.blocks)
        if best is None or wt < best:
            best = wt
    return best


@dataclass
class FTQuery:
    """Negated fault-tolerance condition of one terminal path."""

    kind: str
    t: int
    phi: List[Expr]
    budget_terms: List[Expr]  # the fault count constrained by <= t
    bound_terms: List[Expr]  # the count D (or outcome) is compared to
    distance: Optional[DistanceData] = None
    outcome: Optional[Expr] = None  # measurement: actual outcome
    ideal_outcome: Optional[Expr] = None
    exact: bool = False  # post-condition D = 0 (ideal-case correctness)
    label: str = ""

    def symbols(self) -> List[str]:
        roots = list(self.phi) + list(self.budget_terms) + list(self.bound_terms)
        if self.distance is not None:
            roots += self.distance.diff
        if self.outcome is not None:
            roots += [self.outcome, self.ideal_outcome]
        return sorted(sb.symbols(*roots))


def build_ft_query(kind: str, t: int, phi: Sequence[Expr], f_in: Sequence[FaultCounter], f_exec: FaultCounter,
                   terminal: Optional[SymTableau] = None, ideal: Optional[SymTableau] = None,
                   out_qubits: Optional[Sequence[int]] = None, blocks: Optional[Sequence[Sequence[int]]] = None,
                   outcome: Optional[Expr] = None, ideal_outcome: Optional[Expr] = None, label: str = "") -> FTQuery:
    """Assemble the query for one terminal.

    ``kind`` selects budget and bound: prep (F_exec <= t, bound F_exec),
    gate (F_in+F_exec <= t, bound F_in+F_exec per block), ec (F_in+F_exec <= t,
    bound F_exec), ideal_ec (F_in <= t, exact recovery), measure (F_in+F_exec
    <= t, outcome equality).  Raises GeneratorMismatch when the unsigned groups
    differ.
    """
    fin = [term for c in f_in for term in c.terms]
    fex = list(f_exec.terms)
    if kind == "prep":
        budget, bound = fex, fex
    elif kind == "gate":
        budget, bound = fin + fex, fin + fex
    elif kind == "ec":
        budget, bound = fin + fex, fex
    elif kind == "ideal_ec":
        budget, bound = fin + fex, []
    elif kind == "measure":
        budget, bound = fin + fex, []
    else:
        raise ValueError(f"unknown gadget kind {kind!r}")
    q = FTQuery(kind, t, list(phi), budget, bound, label=label, exact=(kind == "ideal_ec"))
    if kind == "measure":
        if outcome is None or ideal_outcome is None:
            raise ValueError("measurement query needs outcome expressions")
        q.outcome = outcome
        q.ideal_outcome = ideal_outcome
        return q
    if terminal is None or ideal is None:
        raise ValueError("state query needs terminal and ideal tableaus")
    restricted = terminal if out_qubits is None else terminal.restrict(out_qubits)
    if restricted is None:
        raise GeneratorMismatch("output qubits are entangled with the rest of the register")
    q.distance = distance_data(restricted, ideal, blocks)
    return q


# ---------------------------------------------------------------------------
# Emission


class _Emitter:
    def __init__(self):
        self.lines: List[str] = []
        self.names: Dict[int, str] = {}
        self.count = 0

    def ref(self, e: Expr) -> str:
        if e.op == sb.CONST:
            return "true" if e.value else "false"
        if e.op == sb.VAR:
            return _sym(e.value)
        return self.names[id(e)]

    def define(self, roots: Iterable[Expr]) -> None:
        for node in sb.iter_nodes(list(roots)):
            if node.op in (sb.CONST, sb.VAR) or id(node) in self.names:
                continue
            kids = [self.ref(a) for a in node.kids]
            if node.op == sb.XOR:
                body = kids[0] if len(kids) == 1 else f"(xor {' '.join(kids)})"
                if node.value:
                    body = f"(not {body})"
            elif node.op == sb.AND:
                body = f"(and {' '.join(kids)})"
            else:
                body = f"(or {' '.join(kids)})"
            name = f"_n{self.count}"
            self.count += 1
            self.lines.append(f"(define-fun {name} () Bool {body})")
            self.names[id(node)] = name


@functools.lru_cache(maxsize=None)
def _sym(name: str) -> str:
    return name if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) else f"|{name}|"


def _table_post(q: FTQuery) -> Expr:
    """``D <= bound`` via the finite table of low-weight Paulis."""
    dd = q.distance
    t = q.t
    n = dd.n
    cost: Dict[int, int] = {}
    g = GF2Matrix.from_paulis(dd.ideal_gens, n)
    cap = 0 if q.exact else t
    for p in _block_paulis(n, dd.blocks, cap):
        s = syndrome(g, p)
        c = max(sum(((p.x | p.z) >> qq) & 1 for qq in blk) for blk in dd.blocks)
        if s not in cost or c < cost[s]:
            cost[s] = c
    parts = []
    for s in sorted(cost):
        c = cost[s]
        eq = _bits_equal(dd.diff, s)
        parts.append(sb.and_(eq, sb.at_least(c, q.bound_terms)) if c else eq)
    return sb.or_(*parts)


def _block_paulis(n: int, blocks: Sequence[Sequence[int]], t: int) -> Iterable[PauliOp]:
    """Paulis with weight <= t inside every block (and identity elsewhere)."""
    per_block = [list(iter_paulis(n, t, qubits=blk)) for blk in blocks]
    for combo in iproduct(*per_block):
        x = z = 0
        for p in combo:
            x |= p.x
            z |= p.z
        yield PauliOp(n, x, z)


def _expanded_post_negation(q: FTQuery) -> Expr:
    """``forall w: some block weight of N w + p exceeds bound`` expanded over w."""
    dd = q.distance
    n = dd.n
    p = dd.p_bits()
    k = len(dd.null_basis)
    if k > 16:
        raise ValueError("expanded encoding limited to small outputs")
    maxb = max(len(b) for b in dd.blocks)
    cap = 0 if q.exact else min(q.t, maxb)
    conj = []
    for w in range(1 << k):
        c = 0
        for j in range(k):
            if (w >> j) & 1:
                c ^= dd.null_basis[j]
        bits = [sb.xor(p[b], (c >> b) & 1) for b in range(2 * n)]
        exceeds = []
        for blk in dd.blocks:
            qb = [sb.or_(bits[qq], bits[n + qq]) for qq in blk]
            # wt > bound  <=>  AND_k (bound >= k -> wt >= k+1)  given bound <= cap
            clauses = []
            for kk in range(cap + 1):
                ge = sb.at_least(kk, q.bound_terms)
                clauses.append(sb.implies(ge, sb.at_least(kk + 1, qb)))
            exceeds.append(sb.and_(*clauses))
        conj.append(sb.or_(*exceeds))
    return sb.and_(*conj)


def emit_smtlib(q: FTQuery, encoding: str = "quantified", produce_model: bool = True) -> str:
    """Deterministic SMT-LIB2 script whose satisfiability means a violation."""
    if encoding not in ENCODINGS:
        raise ValueError(f"unknown encoding {encoding!r}")
    em = _Emitter()
    out = [f"; fault-tolerance query {q.label}".rstrip(), f"; kind={q.kind} t={q.t} encoding={encoding}"]
    quantified = encoding == "quantified" and q.distance is not None and not q.exact
    out.append("(set-logic BV)" if quantified else "(set-logic QF_BV)")
    if produce_model:
        out.append("(set-option :produce-models true)")
    for name in q.symbols():
        out.append(f"(declare-fun {_sym(name)} () Bool)")
    budget = sb.at_most(q.t, q.budget_terms)
    roots = list(q.phi) + [budget]
    if q.kind == "measure":
        neg_post = sb.xor(q.outcome, q.ideal_outcome)
        roots.append(neg_post)
        tail = [f"(assert {{{len(roots) - 1}}})"]
    elif q.exact:
        neg_post = sb.or_(*q.distance.diff)
        roots.append(neg_post)
    elif encoding == "table":
        neg_post = sb.not_(_table_post(q))
        roots.append(neg_post)
    elif encoding == "expanded":
        neg_post = _expanded_post_negation(q)
        roots.append(neg_post)
    else:
        neg_post = None
        roots += q.distance.p_bits()
    em.define(roots)
    out += em.lines
    for e in q.phi:
        if e is not sb.TRUE:
            out.append(f"(assert {em.ref(e)})")
    out.append(f"(assert {em.ref(budget)})")
    if neg_post is not None:
        out.append(f"(assert {em.ref(neg_post)})")
    else:
        out += _quantified_lines(q, em)
    out.append("(check-sat)")
    if produce_model:
        out.append("(get-model)")
    return "\n".join(out) + "\n"


def _bv(v: int, w: int) -> str:
    return "#b" + format(v, f"0{w}b")


def _bv_sum(terms: Sequence[str], w: int) -> str:
    if not terms:
        return _bv(0, w)
    items = [f"(ite {t} {_bv(1, w)} {_bv(0, w)})" for t in terms]
    if len(items) == 1:
        return items[0]
    return f"(bvadd {' '.join(items)})"


def _quantified_lines(q: FTQuery, em: _Emitter) -> List[str]:
    dd = q.distance
    n = dd.n
    k = len(dd.null_basis)
    width = max(len(q.bound_terms), n, 1).bit_length() + 1
    lines = [f"(define-fun _bound () (_ BitVec {width}) {_bv_sum([em.ref(e) for e in q.bound_terms], width)})"]
    p = dd.p_bits()
    if k == 0:
        wbits = []
    else:
        wbits = [f"(= ((_ extract {j} {j}) w) #b1)" for j in range(k)]
    coords = []
    for b in range(2 * n):
        cols = [wbits[j] for j in range(k) if (dd.null_basis[j] >> b) & 1]
        pb = em.ref(p[b])
        if not cols:
            coords.append(pb)
        else:
            coords.append(f"(xor {pb} {' '.join(cols)})")
    exceeds = []
    for blk in dd.blocks:
        qs = [f"(or {coords[qq]} {coords[n + qq]})" for qq in blk]
        exceeds.append(f"(bvugt {_bv_sum(qs, width)} _bound)")
    body = exceeds[0] if len(exceeds) == 1 else f"(or {' '.join(exceeds)})"
    if k == 0:
        lines.append(f"(assert {body})")
    else:
        lines.append(f"(assert (forall ((w (_ BitVec {k}))) {body}))")
    return lines


# ---------------------------------------------------------------------------
# Solver


@dataclass
class SolverResult:
    status: str  # sat | unsat | unknown | error
    model: Dict[str, int] = field(default_factory=dict)
    time: float = 0.0
    reason: str = ""


def find_solver(path: Optional[str] = None) -> Optional[str]:
    """Explicit path, then ``FTQEC_SOLVER``, then z3/cvc5 on PATH."""
    for cand in (path, os.environ.get("FTQEC_SOLVER")):
        if cand:
            return cand
    for name in ("z3", "cvc5"):
        found = shutil.which(name)
        if found:
            return found
    return None


def _solver_argv(solver: str, timeout: Optional[float]) -> List[str]:
    base = os.path.basename(solver)
    if "z3" in base:
        argv = [solver, "-in", "-smt2"]
        if timeout:
            argv.append(f"-t:{max(1, int(timeout * 1000))}")
        return argv
    if "cvc5" in base:
        argv = [solver, "--lang=smt2", "--produce-models"]
        if timeout:
            argv.append(f"--tlimit={int(timeout * 1000)}")
        return argv
    if "bitwuzla" in base:
        argv = [solver, "--lang", "smt2", "-m"]
        if timeout:
            argv += ["-t", str(int(timeout * 1000))]
        return argv
    return [solver]


_MODEL_RE = re.compile(r"\(define-fun\s+(\|[^|]*\||[^\s()]+)\s+\(\)\s+Bool\s+(true|false)\s*\)")


def parse_model(text: str) -> Dict[str, int]:
    out = {}
    for name, val in _MODEL_RE.findall(text):
        out[name.strip("|")] = 1 if val == "true" else 0
    return out


def solve(script: str, solver: Optional[str] = None, timeout: Optional[float] = None) -> SolverResult:
    """Run an external solver on a script; never raises on solver failure."""
    exe = find_solver(solver)
    if exe is None:
        return SolverResult("error", reason="no SMT solver found (use --solver or FTQEC_SOLVER)")
    start = time.monotonic()
    try:
        proc = subprocess.run(
            _solver_argv(exe, timeout),
            input=script,
            capture_output=True,
            text=True,
            timeout=None if timeout is None else timeout + 2,
        )
    except subprocess.TimeoutExpired:
        return SolverResult("unknown", time=time.monotonic() - start, reason="timeout")
    except OSError as exc:
        return SolverResult("error", time=time.monotonic() - start, reason=str(exc))
    elapsed = time.monotonic() - start
    text = proc.stdout.strip()
    first = text.split("\n", 1)[0].strip() if text else ""
    if first == "unsat":
        return SolverResult("unsat", time=elapsed)
    if first == "sat":
        return SolverResult("sat", parse_model(text), time=elapsed)
    if first == "unknown" or first == "timeout":
        hit = first == "timeout" or (timeout is not None and elapsed >= timeout)
        return SolverResult("unknown", time=elapsed, reason="timeout" if hit else (text[:200] or "unknown"))
    reason = (text + "\n" + proc.stderr).strip()[:500] or f"solver exited with code {proc.returncode}"
    if "timeout" in reason:
        return SolverResult("unknown", time=elapsed, reason="timeout")
    return SolverResult("error", time=elapsed, reason=reason)


def check_sat_expr(roots: Sequence[Expr], solver: Optional[str] = None, timeout: Optional[float] = None) -> SolverResult:
    """Satisfiability of a conjunction of plain Boolean expressions."""
    em = _Emitter()
    lines = ["(set-logic QF_UF)", "(set-option :produce-models true)"]
    for name in sorted(sb.symbols(*roots)):
        lines.append(f"(declare-fun {_sym(name)} () Bool)")
    em.define(roots)
    lines += em.lines
    for e in roots:
        lines.append(f"(assert {em.ref(e)})")
    lines += ["(check-sat)", "(get-model)"]
    return solve("\n".join(lines) + "\n", solver, timeout)


def dump_script(script: str, directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    with open(path, "w") as fh:
        fh.write(script)
    return path
