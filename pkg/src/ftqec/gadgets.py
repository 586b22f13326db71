"""Program generators for preparation, CNOT, measurement and error-correction gadgets.

Qubit layout of every generated program: data blocks first (block b holds
qubits ``b*n .. b*n+n-1``), then ancillas in allocation order.  Every
multi-qubit Pauli measurement uses a freshly prepared, checked cat state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .codes import StabilizerCode, builtin, code_names
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
    OracleSpec,
    Program,
    Repeat,
    Stmt,
    Var,
    and_all,
    decoder_spec,
    sum_all,
    xor_all,
)
from .gf2_pauli import GF2Matrix, PauliOp, check_matrix_lambda, commutes, solve

GADGET_KINDS = ("prep", "gate", "measure", "ec", "ideal_ec")
PREP_TARGETS = ("zero", "one", "plus", "minus", "y")


@dataclass
class GadgetSpec:
    """A gadget program plus what the verifier needs to know about it."""

    name: str
    kind: str  # one of GADGET_KINDS
    program: Program
    code: Optional[StabilizerCode] = None
    blocks: List[List[int]] = field(default_factory=list)
    target: List[PauliOp] = field(default_factory=list)  # prep: ideal stabilizers on the output qubits
    ideal_gates: List[Tuple[str, Tuple[int, ...]]] = field(default_factory=list)
    results: List[str] = field(default_factory=list)  # measure: one outcome variable per logical qubit

    @property
    def out_qubits(self) -> List[int]:
        return [q for b in self.blocks for q in b]


def default_checks(size: int) -> List[Tuple[int, int]]:
    """Check pairs (1-based) used when a cat state is prepared inside a gadget."""
    if size <= 3:
        return []
    if size == 4:
        return [(3, 4)]
    return [(i, i + 1) for i in range(1, size)]


class _Builder:
    def __init__(self, n_data: int):
        self.n = n_data
        self.oracles: Dict[str, OracleSpec] = {}
        self._vars: Dict[str, int] = {}

    def qubit(self) -> int:
        q = self.n
        self.n += 1
        return q

    def var(self, stem: str) -> str:
        k = self._vars.get(stem, 0) + 1
        self._vars[stem] = k
        return f"{stem}{k}"

    def cat_prep(self, size: int, checks: Optional[Sequence[Tuple[int, int]]] = None) -> Tuple[List[int], Repeat]:
        """Fresh cat qubits and the memoryless loop preparing them."""
        if checks is None:
            checks = default_checks(size)
        cat = [self.qubit() for _ in range(size)]
        body: List[Stmt] = [Init(q) for q in cat]
        if size >= 2:
            body.append(Gate("H", (cat[0],)))
            for q in cat[1:]:
                body.append(Gate("CNOT", (cat[0], q)))
        flags = []
        for i, j in checks:
            a = self.qubit()
            f = self.var("f")
            body += [Init(a), Gate("CNOT", (cat[i - 1], a)), Gate("CNOT", (cat[j - 1], a)), Measure(f, a)]
            flags.append(Var(f))
        if size == 1:
            body.append(Gate("H", (cat[0],)))
        cond = Not(_or_all(flags)) if flags else Const(1)
        return cat, Repeat(body, cond, MEMORYLESS)

    def measure_pauli(self, p: PauliOp, qubits: Sequence[int], out: str) -> List[Stmt]:
        """Cat-state measurement of ``p`` (over ``len(qubits)`` positions) into ``out``."""
        support = [i for i in range(p.n) if ((p.x | p.z) >> i) & 1]
        cat, loop = self.cat_prep(len(support))
        stmts: List[Stmt] = [loop]
        for a, i in zip(cat, support):
            d = qubits[i]
            letter = p.letter(i)
            if letter == "X":
                stmts.append(Gate("CNOT", (a, d)))
            elif letter == "Z":
                stmts.append(Gate("CZ", (a, d)))
            else:  # controlled-Y = S . CNOT . S^dagger on the target
                stmts += [Gate("S", (d,)), Gate("S", (d,)), Gate("S", (d,)), Gate("CNOT", (a, d)), Gate("S", (d,))]
        bits = []
        for a in cat:
            m = self.var("m")
            stmts += [Gate("H", (a,)), Measure(m, a)]
            bits.append(Var(m))
        stmts.append(Assign(out, xor_all(bits + ([Const(1)] if p.sign else []))))
        return stmts

    def decoder(self, code: StabilizerCode, gens: Sequence[PauliOp], part: str) -> str:
        name = "dec" if part == "all" else f"dec{part}"
        if name not in self.oracles:
            cname = code.name if code.name in code_names() else None
            self.oracles[name] = decoder_spec(name, gens, code.t, code=cname, part=part)
        return name

    def program(self, body: List[Stmt], meta: Dict) -> Program:
        return Program(self.n, body, dict(self.oracles), meta)


def _or_all(items: Sequence) -> object:
    e = items[0]
    for it in items[1:]:
        e = BinOp("||", e, it)
    return e


def _agree(rounds: Sequence[Sequence[str]]) -> object:
    """All rounds equal the first one."""
    terms = []
    for later in rounds[1:]:
        for a, b in zip(rounds[0], later):
            terms.append(BinOp("==", Var(a), Var(b)))
    return and_all(terms) if terms else Const(1)


def _corrections(r: str, n: int, data: Sequence[int], x: bool = True, z: bool = True) -> List[Stmt]:
    out: List[Stmt] = []
    for i in range(n):
        if x:
            out.append(IfElse(Index(r, i), [Gate("X", (data[i],))], []))
        if z:
            out.append(IfElse(Index(r, n + i), [Gate("Z", (data[i],))], []))
    return out


def _code(code) -> StabilizerCode:
    return builtin(code) if isinstance(code, str) else code


# -- cat state preparation -------------------------------------------------------------


def build_cat_prep(size: int, check_pairs: Optional[Sequence[Tuple[int, int]]] = None, max_faults: int = 1,
                   name: Optional[str] = None) -> GadgetSpec:
    """Cat-state preparation: H + CNOT fan-out, one parity check per pair (1-based)."""
    if size < 2:
        raise ValueError("cat state needs at least 2 qubits")
    pairs = list(check_pairs) if check_pairs is not None else default_checks(size)
    for i, j in pairs:
        if not (1 <= i <= size and 1 <= j <= size and i != j):
            raise ValueError(f"bad check pair ({i}, {j})")
    b = _Builder(0)
    cat, loop = b.cat_prep(size, pairs)
    target = [PauliOp.from_string("X" * size)]
    for i in range(size - 1):
        target.append(PauliOp.from_support(size, "Z", [i, i + 1]))
    meta = {"gadget": "prep", "blocks": [cat], "target": target}
    prog = b.program([loop], meta)
    return GadgetSpec(name or f"cat{size}", "prep", prog, None, [cat], target)


# -- logical gadgets ---------------------------------------------------------------------


def _syndrome_rounds(b: _Builder, ops: Sequence[PauliOp], data: Sequence[int], rounds: int, stem: str) -> Tuple[List[Stmt], List[List[str]]]:
    body: List[Stmt] = []
    names: List[List[str]] = []
    for k in range(rounds):
        row = []
        for p in ops:
            v = b.var(stem)
            body += b.measure_pauli(p, data, v)
            row.append(v)
        names.append(row)
    return body, names


def _shor_ec(b: _Builder, code: StabilizerCode, data: Sequence[int], variant: str = "correct") -> List[Stmt]:
    gens = list(code.generators)
    rounds = code.t + 1
    out: List[Stmt] = []
    if variant == "correct":
        body, names = _syndrome_rounds(b, gens, data, rounds, "s")
        out.append(Repeat(body, _agree(names), CONSERVATIVE))
        first = names[0]
    elif variant == "bad_ordering":
        first = []
        for g in gens:
            body, names = _syndrome_rounds(b, [g], data, rounds, "s")
            out.append(Repeat(body, _agree(names), CONSERVATIVE))
            first.append(names[0][0])
    else:
        raise ValueError(f"unknown EC variant {variant!r}")
    dec = b.decoder(code, gens, "all")
    r = b.var("r")
    out.append(OracleCall(r, dec, tuple(Var(v) for v in first)))
    out += _corrections(r, code.n, data)
    return out


def build_shor_ec(code, variant: str = "correct") -> GadgetSpec:
    """Repeat full syndrome rounds until t+1 agree, then decode and correct.

    ``bad_ordering`` repeats each generator separately instead.
    """
    code = _code(code)
    data = list(range(code.n))
    b = _Builder(code.n)
    body = _shor_ec(b, code, data, variant)
    meta = {"gadget": "ec", "code": code.name, "blocks": [data]}
    name = f"{code.name}_ec" + ("" if variant == "correct" else f"_{variant}")
    return GadgetSpec(name, "ec", b.program(body, meta), code, [data])


def build_cnot(code) -> GadgetSpec:
    """Transversal CNOT from block 0 to block 1."""
    code = _code(code)
    if not code.is_css:
        raise ValueError("transversal CNOT needs a CSS code")
    n = code.n
    blocks = [list(range(n)), list(range(n, 2 * n))]
    body: List[Stmt] = [Gate("CNOT", (i, n + i)) for i in range(n)]
    ideal = [("CNOT", (i, n + i)) for i in range(n)]
    meta = {"gadget": "gate", "code": code.name, "blocks": blocks, "ideal": ideal}
    prog = Program(2 * n, body, {}, meta)
    return GadgetSpec(f"{code.name}_cnot", "gate", prog, code, blocks, ideal_gates=ideal)


def build_measure_z(code, repetitions: Optional[int] = None) -> GadgetSpec:
    """Repeated cat measurement of every logical Z with EC in between and a majority vote."""
    code = _code(code)
    reps = 2 * code.t + 1 if repetitions is None else repetitions
    if reps < 1:
        raise ValueError("need at least one repetition")
    data = list(range(code.n))
    b = _Builder(code.n)
    body: List[Stmt] = []
    outs: List[List[str]] = [[] for _ in code.logical_z]
    for k in range(reps):
        for j, zl in enumerate(code.logical_z):
            v = b.var("l")
            body += b.measure_pauli(zl, data, v)
            outs[j].append(v)
        if k < reps - 1:
            body += _shor_ec(b, code, data)
    results = []
    for j, vs in enumerate(outs):
        o = f"out{j}"
        body.append(Assign(o, BinOp(">=", sum_all([Var(v) for v in vs]), Const(reps // 2 + 1))))
        results.append(o)
    meta = {"gadget": "measure", "code": code.name, "blocks": [data], "result": results}
    name = f"{code.name}_meas" + ("" if repetitions is None else f"_r{reps}")
    return GadgetSpec(name, "measure", b.program(body, meta), code, [data], results=results)


def _target_paulis(code: StabilizerCode, target: str) -> List[Tuple[PauliOp, PauliOp]]:
    """Per logical qubit: (operator fixing the target, operator that flips it)."""
    out = []
    for zl, xl in zip(code.logical_z, code.logical_x):
        zl, xl = zl.unsigned(), xl.unsigned()
        if target in ("zero", "one"):
            t, flip = zl, xl
        elif target in ("plus", "minus"):
            t, flip = xl, zl
        elif target == "y":
            if (zl.x | zl.z) != (xl.x | xl.z):
                raise ValueError("y-type target needs logical X and Z on the same support")
            t, flip = PauliOp(code.n, xl.x, zl.z), zl
            if commutes(t, flip) == 0:
                raise ValueError("y-type logical does not anticommute with logical Z")
        elif target in ("h", "magic"):
            raise ValueError("non-stabilizer target states are not supported")
        else:
            raise ValueError(f"unknown preparation target {target!r}")
        if target in ("one", "minus"):
            t = t.negate()
        out.append((t, flip))
    return out


def _pure_errors(gens: Sequence[PauliOp], rows: Sequence[int], letter: str, n: int) -> Dict[int, PauliOp]:
    """For each generator index in ``rows``, a ``letter``-type Pauli anticommuting only with it."""
    m = GF2Matrix.from_paulis(gens, n)
    ml = check_matrix_lambda(m, n)
    out = {}
    for j in rows:
        v = solve(_restrict_letter(ml, letter, n), 1 << j)
        if v is None:
            raise ValueError("no pure error of the requested type")
        if letter == "Z":
            out[j] = PauliOp(n, 0, v)
        else:
            out[j] = PauliOp(n, v, 0)
    return out


def _restrict_letter(ml: GF2Matrix, letter: str, n: int) -> GF2Matrix:
    """Keep only the x (letter X) or z (letter Z) columns of a 2n-column matrix."""
    full = (1 << n) - 1
    rows = [(r & full) if letter == "X" else (r >> n) for r in ml.rows]
    return GF2Matrix(rows, n)


def build_prep(code, target: str = "zero") -> GadgetSpec:
    """Fault-tolerant logical preparation from |0...0>.

    Measures every generator and the target logical in t+1 cat-measurement
    rounds until they agree, then fixes random X-generator outcomes with a
    Z-type pure error, decodes the Z-generator syndrome, and applies the
    logical flip when the corrected logical outcome disagrees with the target.
    """
    code = _code(code)
    if not code.is_css:
        raise ValueError("preparation gadgets are generated for CSS codes")
    n = code.n
    data = list(range(n))
    targets = _target_paulis(code, target)
    gens = list(code.generators)
    xrows = [j for j, g in enumerate(gens) if g.z == 0]
    zrows = [j for j, g in enumerate(gens) if g.x == 0]
    b = _Builder(n)
    body: List[Stmt] = [Init(q) for q in data]
    ops = gens + [tl.unsigned() for tl, _ in targets]
    loop_body, names = _syndrome_rounds(b, ops, data, code.t + 1, "s")
    body.append(Repeat(loop_body, _agree(names), CONSERVATIVE))
    first = names[0]
    ells = first[len(gens):]
    pure = _pure_errors(gens, xrows, "Z", n)
    for j in xrows:
        e = pure[j]
        body.append(IfElse(Var(first[j]), [Gate("Z", (data[i],)) for i in range(n) if (e.z >> i) & 1], []))
    zgens = [gens[j] for j in zrows]
    dec = b.decoder(code, zgens, "z")
    r = b.var("r")
    body.append(OracleCall(r, dec, tuple(Var(first[j]) for j in zrows)))
    body += _corrections(r, n, data, x=True, z=False)
    for (tl, flip), ell in zip(targets, ells):
        # outcome of tl after the pure-error and decoder corrections
        fix_terms: List[object] = [Var(ell)]
        fix_terms += [Var(first[j]) for j in xrows if commutes(pure[j], tl)]
        fix_terms += [Index(r, i) for i in range(n) if commutes(PauliOp.single(n, i, "X"), tl)]
        if tl.sign:
            fix_terms.append(Const(1))
        body.append(IfElse(xor_all(fix_terms), [Gate(flip.letter(i), (data[i],)) for i in range(n) if flip.letter(i) != "I"], []))
    target_gens = [g.unsigned() for g in gens] + [tl for tl, _ in targets]
    meta = {"gadget": "prep", "code": code.name, "blocks": [data], "target": target_gens}
    return GadgetSpec(f"{code.name}_prep_{target}", "prep", b.program(body, meta), code, [data], target_gens)


# -- magic-state distillation checks ------------------------------------------------------


def build_single_ancilla_ec(code) -> GadgetSpec:
    """One round of single-ancilla syndrome extraction, decode, correct.

    Not fault tolerant against execution faults; used for ideal-case checks.
    """
    code = _code(code)
    n = code.n
    data = list(range(n))
    b = _Builder(n)
    body: List[Stmt] = []
    syn = []
    for g in code.generators:
        a = b.qubit()
        v = b.var("s")
        body += [Init(a), Gate("H", (a,))]
        for i in range(n):
            letter = g.letter(i)
            if letter == "X":
                body.append(Gate("CNOT", (a, i)))
            elif letter == "Z":
                body.append(Gate("CZ", (a, i)))
            elif letter == "Y":
                body += [Gate("S", (i,))] * 3 + [Gate("CNOT", (a, i)), Gate("S", (i,))]
        body += [Gate("H", (a,)), Measure(v, a)]
        syn.append(v)
    dec = b.decoder(code, list(code.generators), "all")
    r = b.var("r")
    body.append(OracleCall(r, dec, tuple(Var(v) for v in syn)))
    body += _corrections(r, n, data)
    meta = {"gadget": "ideal_ec", "code": code.name, "blocks": [data]}
    return GadgetSpec(f"{code.name}_ideal_ec", "ideal_ec", b.program(body, meta), code, [data])


def build_magic_suite(inner="color_7_1_3", distill="rm_15_1_3") -> Tuple[List[GadgetSpec], GadgetSpec]:
    """Gadgets the inner code must provide fault tolerantly, plus the distillation EC."""
    inner = _code(inner)
    bob = [build_prep(inner, "zero"), build_cnot(inner), build_measure_z(inner), build_shor_ec(inner)]
    return bob, build_single_ancilla_ec(_code(distill))


# -- registry -------------------------------------------------------------------------------


def _builtin_table():
    table = {
        "cat4_bad": lambda: build_cat_prep(4, [(2, 3)], name="cat4_bad"),
        "cat4_good": lambda: build_cat_prep(4, [(3, 4)], name="cat4_good"),
        "cat8": lambda: build_cat_prep(8, [(i, i + 1) for i in range(1, 8)], name="cat8"),
    }
    for code in code_names():
        for kind in ("prep", "cnot", "meas", "ec"):
            table[f"{code}_{kind}"] = (lambda c=code, k=kind: build_gadget(k, c))
        table[f"{code}_ec_bad_ordering"] = lambda c=code: build_shor_ec(c, "bad_ordering")
        table[f"{code}_ideal_ec"] = lambda c=code: build_single_ancilla_ec(c)
    return table


def build_gadget(kind: str, code, **kwargs) -> GadgetSpec:
    """Dispatch by kind: prep, cnot, meas, ec, ec_bad_ordering, ideal_ec."""
    if kind == "prep":
        return build_prep(code, kwargs.get("target", "zero"))
    if kind in ("cnot", "gate"):
        return build_cnot(code)
    if kind in ("meas", "measure"):
        return build_measure_z(code, kwargs.get("repetitions"))
    if kind == "ec":
        return build_shor_ec(code, kwargs.get("variant", "correct"))
    if kind == "ec_bad_ordering":
        return build_shor_ec(code, "bad_ordering")
    if kind == "ideal_ec":
        return build_single_ancilla_ec(code)
    raise ValueError(f"unknown gadget kind {kind!r}")


def builtin_gadget_names() -> List[str]:
    return sorted(_builtin_table())


def builtin_gadget(name: str) -> GadgetSpec:
    table = _builtin_table()
    if name not in table:
        raise KeyError(f"unknown built-in gadget {name!r}")
    return table[name]()


def spec_from_program(prog: Program, code: Optional[StabilizerCode] = None, name: str = "program") -> GadgetSpec:
    """Recover a GadgetSpec from a parsed program's header directives."""
    meta = prog.meta
    kind = meta.get("gadget")
    if kind not in GADGET_KINDS:
        raise ValueError("program header must declare 'gadget prep|gate|measure|ec|ideal_ec'")
    if code is None and meta.get("code"):
        code = builtin(meta["code"])
    blocks = [list(b) for b in meta.get("blocks", [])]
    if not blocks:
        raise ValueError("program header must declare at least one 'block'")
    return GadgetSpec(name, kind, prog, code, blocks, list(meta.get("target", [])),
                      list(meta.get("ideal", [])), list(meta.get("result", [])))
