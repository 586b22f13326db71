"""Text syntax for classical-quantum programs (``.cqp``) and its printer.

See the grammar in the README.  Newlines are not significant; statements
are self-delimiting and may be separated by ``;``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..gf2_pauli import PauliOp
from ..tableau import GATES, GATES_1Q
from .ast import (
    BINOPS,
    CONSERVATIVE,
    LOOP_CLASSES,
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
    decoder_spec,
    majority_spec,
    table_spec,
)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<op>:=|==|!=|>=|<=|&&|\|\||[{}()\[\],;:=<>!^+@-])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass
class Tok:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> List[Tok]:
    toks: List[Tok] = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        s = m.group()
        if kind not in ("ws", "comment"):
            toks.append(Tok(kind, s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    toks.append(Tok("eof", "", line, pos - line_start + 1))
    return toks


_QUBIT_RE = re.compile(r"^q(\d+)$")
_CMP = ("==", "!=", ">=", "<=", ">", "<")


class Parser:
    def __init__(self, text: str, code_lookup=None):
        self.toks = tokenize(text)
        self.i = 0
        self.n_qubits = 0
        self.oracles: Dict[str, OracleSpec] = {}
        self.meta: Dict = {}
        self.code_lookup = code_lookup

    # -- token helpers ---------------------------------------------------------

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Optional[Tok] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def advance(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        if self.tok.text != text:
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.tok.text == text:
            self.i += 1
            return True
        return False

    def ident(self) -> Tok:
        if self.tok.kind != "ident":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def number(self) -> int:
        if self.tok.kind != "num":
            self.error(f"expected number, found {self.tok.text or 'end of input'!r}")
        return int(self.advance().text)

    def qubit(self) -> int:
        t = self.tok
        m = _QUBIT_RE.match(t.text) if t.kind == "ident" else None
        if not m:
            self.error(f"expected qubit like q0, found {t.text or 'end of input'!r}")
        self.advance()
        q = int(m.group(1))
        if q >= self.n_qubits:
            self.error(f"qubit q{q} not declared (program has {self.n_qubits} qubits)", t)
        return q

    # -- program ---------------------------------------------------------------

    def program(self) -> Program:
        if self.tok.text != "qubits":
            self.error("program must start with 'qubits N'")
        self.advance()
        self.n_qubits = self.number()
        self.header()
        body = self.stmts(top=True)
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return Program(self.n_qubits, body, self.oracles, self.meta)

    def header(self) -> None:
        while True:
            t = self.tok
            if t.kind != "ident" or self.peek().text == ":=":
                return
            if t.text == "oracle":
                self.advance()
                self.oracle_decl()
            elif t.text == "gadget":
                self.advance()
                self.meta["gadget"] = self.ident().text
            elif t.text == "code":
                self.advance()
                self.meta["code"] = self.ident().text
            elif t.text == "block":
                self.advance()
                qs = []
                while _QUBIT_RE.match(self.tok.text or "-") and self.tok.kind == "ident":
                    qs.append(self.qubit())
                if not qs:
                    self.error("block needs at least one qubit")
                self.meta.setdefault("blocks", []).append(qs)
            elif t.text == "target":
                self.advance()
                self.meta.setdefault("target", []).append(self.pauli_literal())
            elif t.text == "result":
                self.advance()
                names = [self.ident().text]
                while self.accept(","):
                    names.append(self.ident().text)
                self.meta["result"] = names
            elif t.text == "ideal":
                self.advance()
                g = self.ident()
                name = g.text.upper()
                if name not in GATES:
                    self.error(f"unknown gate {g.text!r}", g)
                k = 1 if name in GATES_1Q else 2
                self.meta.setdefault("ideal", []).append((name, tuple(self.qubit() for _ in range(k))))
            else:
                return
            self.accept(";")

    def pauli_literal(self) -> PauliOp:
        sign = ""
        if self.accept("-"):
            sign = "-"
        elif self.accept("+"):
            pass
        t = self.ident()
        if not re.fullmatch(r"[IXYZ]+", t.text):
            self.error(f"bad Pauli string {t.text!r}", t)
        return PauliOp.from_string(sign + t.text)

    def oracle_decl(self) -> None:
        name = self.ident().text
        if name in self.oracles:
            self.error(f"oracle {name!r} declared twice")
        self.expect("=")
        kind = self.ident()
        self.expect("(")
        if kind.text == "decoder":
            spec = self.decoder_decl(name)
        elif kind.text == "majority":
            spec = majority_spec(name, self.number())
        elif kind.text == "table":
            arity = self.number()
            self.expect(",")
            width = self.number()
            table = {}
            while self.accept(","):
                lhs = self.advance()
                self.expect(":")
                rhs = self.advance()
                if not (re.fullmatch(r"[01]+", lhs.text) and re.fullmatch(r"[01]+", rhs.text)):
                    self.error("table entries look like 0101:1", lhs)
                if len(lhs.text) != arity or len(rhs.text) != width:
                    self.error("table entry width mismatch", lhs)
                table[tuple(int(c) for c in lhs.text)] = tuple(int(c) for c in rhs.text)
            spec = table_spec(name, arity, width, table)
        else:
            self.error(f"unknown oracle kind {kind.text!r}", kind)
        self.expect(")")
        self.oracles[name] = spec

    def decoder_decl(self, name: str) -> OracleSpec:
        code = None
        gens: List[PauliOp] = []
        if self.accept("["):
            while True:
                gens.append(self.pauli_literal())
                if not self.accept(","):
                    break
            self.expect("]")
        else:
            ct = self.ident()
            code = ct.text
            if self.code_lookup is None:
                self.error("named decoder codes need a code table", ct)
            try:
                c = self.code_lookup(code)
            except KeyError as exc:
                self.error(str(exc), ct)
            gens = list(c.generators)
        t = 1
        part = "all"
        while self.accept(","):
            key = self.ident().text
            self.expect("=")
            if key == "t":
                t = self.number()
            elif key == "gens":
                part = self.ident().text
                if part not in ("all", "x", "z"):
                    self.error("gens must be all, x or z")
            else:
                self.error(f"unknown decoder option {key!r}")
        sel = select_generators(gens, part)
        if not sel:
            self.error("decoder has no generators")
        return decoder_spec(name, sel, t, code=code, part=part)

    # -- statements ------------------------------------------------------------

    def stmts(self, top: bool = False) -> List[Stmt]:
        out: List[Stmt] = []
        while True:
            while self.accept(";"):
                pass
            t = self.tok
            if t.kind == "eof" or t.text == "}":
                return out
            out.append(self.stmt())

    def block(self) -> List[Stmt]:
        self.expect("{")
        body = self.stmts()
        self.expect("}")
        return body

    def stmt(self) -> Stmt:
        t = self.tok
        if t.kind != "ident":
            self.error(f"unexpected {t.text!r}")
        s: Stmt
        if self.peek().text == ":=":
            var = self.advance().text
            self.advance()
            if self.tok.text == "measure" and self.peek().kind == "ident" and _QUBIT_RE.match(self.peek().text):
                self.advance()
                s = Measure(var=var, qubit=self.qubit())
            elif self.tok.text == "oracle" and self.peek().kind == "ident":
                self.advance()
                nt = self.ident()
                if nt.text not in self.oracles:
                    self.error(f"oracle {nt.text!r} not declared", nt)
                self.expect("(")
                args = []
                if self.tok.text != ")":
                    args.append(self.expr())
                    while self.accept(","):
                        args.append(self.expr())
                self.expect(")")
                spec = self.oracles[nt.text]
                if len(args) != spec.arity:
                    self.error(f"oracle {nt.text} takes {spec.arity} arguments, got {len(args)}", nt)
                s = OracleCall(var=var, oracle=nt.text, args=tuple(args))
            else:
                s = Assign(var=var, expr=self.expr())
        elif t.text == "init":
            self.advance()
            s = Init(qubit=self.qubit())
        elif t.text == "if":
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.block()
            orelse: List[Stmt] = []
            if self.accept("else"):
                orelse = self.block()
            s = IfElse(cond=cond, then=then, orelse=orelse)
        elif t.text == "repeat":
            self.advance()
            if not self.accept("@"):
                self.error("repeat needs a loop class annotation (@memoryless or @conservative)")
            ct = self.ident()
            if ct.text not in LOOP_CLASSES:
                self.error(f"unknown loop class {ct.text!r}", ct)
            body = self.block()
            self.expect("until")
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            s = Repeat(body=body, cond=cond, loop_class=ct.text)
        elif t.text.upper() in GATES:
            name = self.advance().text.upper()
            k = 1 if name in GATES_1Q else 2
            qs = tuple(self.qubit() for _ in range(k))
            if len(set(qs)) != len(qs):
                self.error("gate qubits must be distinct", t)
            s = Gate(name=name, qubits=qs)
        else:
            self.error(f"unknown statement {t.text!r}")
        s.line = t.line
        return s

    # -- expressions -------------------------------------------------------------

    def expr(self):
        return self.or_expr()

    def or_expr(self):
        e = self.and_expr()
        while self.tok.text == "||":
            self.advance()
            e = BinOp("||", e, self.and_expr())
        return e

    def and_expr(self):
        e = self.cmp_expr()
        while self.tok.text == "&&":
            self.advance()
            e = BinOp("&&", e, self.cmp_expr())
        return e

    def cmp_expr(self):
        e = self.xor_expr()
        if self.tok.text in _CMP:
            op = self.advance().text
            e = BinOp(op, e, self.xor_expr())
        return e

    def xor_expr(self):
        e = self.sum_expr()
        while self.tok.text == "^":
            self.advance()
            e = BinOp("^", e, self.sum_expr())
        return e

    def sum_expr(self):
        e = self.unary()
        while self.tok.text == "+":
            self.advance()
            e = BinOp("+", e, self.unary())
        return e

    def unary(self):
        if self.accept("!"):
            return Not(self.unary())
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Const(int(t.text))
        if t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "ident":
            if t.text in ("measure", "oracle", "if", "repeat", "until", "init", "else"):
                self.error(f"keyword {t.text!r} in expression")
            self.advance()
            if self.accept("["):
                idx = self.number()
                self.expect("]")
                return Index(t.text, idx)
            return Var(t.text)
        self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def select_generators(gens: Sequence[PauliOp], part: str) -> List[PauliOp]:
    if part == "all":
        return list(gens)
    if part == "x":
        return [g for g in gens if g.z == 0]
    return [g for g in gens if g.x == 0]


def parse(text: str, code_lookup=None, check: bool = True) -> Program:
    """Parse ``.cqp`` text; by default also run the well-formedness checks."""
    if code_lookup is None:
        from ..codes import builtin as code_lookup  # noqa: F811
    prog = Parser(text, code_lookup).program()
    if check:
        from .analysis import check_well_formed

        errs = check_well_formed(prog)
        if errs:
            raise ParseError("; ".join(errs))
    return prog


# -- printer ----------------------------------------------------------------------

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, ">=": 3, "<=": 3, ">": 3, "<": 3, "^": 4, "+": 5}


def expr_to_text(e, parent: int = 0) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{e.name}[{e.index}]"
    if isinstance(e, Not):
        return "!" + expr_to_text(e.arg, 9)
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        # comparisons are non-associative; parenthesize nested ones
        lp = p + 1 if p == 3 else p
        s = f"{expr_to_text(e.left, lp)} {e.op} {expr_to_text(e.right, p + 1)}"
        return f"({s})" if p < parent else s
    raise TypeError(type(e))


def _oracle_text(spec: OracleSpec) -> str:
    if spec.kind == "decoder":
        if spec.params.get("code"):
            src = spec.params["code"]
        else:
            src = "[" + ", ".join(str(g) for g in spec.params["gens"]) + "]"
        extra = f", gens={spec.params['part']}" if spec.params.get("part", "all") != "all" else ""
        return f"oracle {spec.name} = decoder({src}, t={spec.params['t']}{extra})"
    if spec.kind == "majority":
        return f"oracle {spec.name} = majority({spec.params['k']})"
    entries = "".join(
        f", {''.join(map(str, k))}:{''.join(map(str, v))}" for k, v in sorted(spec.params["table"].items())
    )
    return f"oracle {spec.name} = table({spec.arity}, {spec.out_width}{entries})"


def pretty(p: Program) -> str:
    lines = [f"qubits {p.n_qubits}"]
    meta = p.meta
    if "gadget" in meta:
        lines.append(f"gadget {meta['gadget']}")
    if "code" in meta:
        lines.append(f"code {meta['code']}")
    for blk in meta.get("blocks", []):
        lines.append("block " + " ".join(f"q{q}" for q in blk))
    for tp in meta.get("target", []):
        lines.append(f"target {'-' if tp.sign else '+'}{tp.unsigned()}")
    for name, qs in meta.get("ideal", []):
        lines.append(f"ideal {name.lower()} " + " ".join(f"q{q}" for q in qs))
    if "result" in meta:
        lines.append("result " + ", ".join(meta["result"]))
    for spec in p.oracles.values():
        lines.append(_oracle_text(spec))
    _pretty_stmts(p.body, 0, lines)
    return "\n".join(lines) + "\n"


def _pretty_stmts(stmts: Sequence[Stmt], depth: int, out: List[str]) -> None:
    ind = "  " * depth
    for s in stmts:
        if isinstance(s, Init):
            out.append(f"{ind}init q{s.qubit}")
        elif isinstance(s, Gate):
            out.append(f"{ind}{s.name.lower()} " + " ".join(f"q{q}" for q in s.qubits))
        elif isinstance(s, Measure):
            out.append(f"{ind}{s.var} := measure q{s.qubit}")
        elif isinstance(s, Assign):
            out.append(f"{ind}{s.var} := {expr_to_text(s.expr)}")
        elif isinstance(s, OracleCall):
            out.append(f"{ind}{s.var} := oracle {s.oracle}(" + ", ".join(expr_to_text(a) for a in s.args) + ")")
        elif isinstance(s, IfElse):
            out.append(f"{ind}if ({expr_to_text(s.cond)}) {{")
            _pretty_stmts(s.then, depth + 1, out)
            if s.orelse:
                out.append(f"{ind}}} else {{")
                _pretty_stmts(s.orelse, depth + 1, out)
            out.append(f"{ind}}}")
        elif isinstance(s, Repeat):
            out.append(f"{ind}repeat @{s.loop_class} {{")
            _pretty_stmts(s.body, depth + 1, out)
            out.append(f"{ind}}} until ({expr_to_text(s.cond)})")
        else:  # pragma: no cover
            raise TypeError(type(s))
