"""Hash-consed Boolean expressions over named bit symbols.

Expressions are immutable DAG nodes built only through the constructor
functions below (``const``, ``var``, ``xor``, ``and_``, ``or_``, ``not_``).
Structurally equal expressions are the same Python object, so identity is
equality.  Negation is stored as XOR with the constant 1, which keeps the
phase expressions produced by tableau updates in XOR-affine normal form.
"""

from __future__ import annotations

import hashlib
import threading
import weakref
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

CONST = "const"
VAR = "var"
XOR = "xor"
AND = "and"
OR = "or"

_MASK64 = (1 << 64) - 1


def _mix(v: int) -> int:
    # splitmix64 finalizer
    v = (v + 0x9E3779B97F4A7C15) & _MASK64
    v = ((v ^ (v >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    v = ((v ^ (v >> 27)) * 0x94D049BB133111EB) & _MASK64
    return v ^ (v >> 31)


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.blake2b(name.encode(), digest_size=8).digest(), "little")


_OP_TAG = {CONST: 1, VAR: 2, XOR: 3, AND: 5, OR: 7}


class Expr:
    """A node of the expression DAG.  Do not instantiate directly."""

    __slots__ = ("op", "value", "args", "key", "kids", "__weakref__")

    def __init__(self, op: str, value, args: frozenset, key: int):
        self.op = op
        self.value = value  # const bit, symbol name, or xor constant
        self.args = args
        self.key = key
        self.kids = tuple(sorted(args, key=lambda a: a.sort_key)) if args else ()  # canonical child order

    def __repr__(self) -> str:
        return f"Expr({to_str(self)})"

    def __str__(self) -> str:
        return to_str(self)

    # Python operator sugar; all of them go through the canonical builders.
    def __xor__(self, other):
        return xor(self, other)

    __rxor__ = __xor__

    def __and__(self, other):
        return and_(self, other)

    __rand__ = __and__

    def __or__(self, other):
        return or_(self, other)

    __ror__ = __or__

    def __invert__(self):
        return not_(self)

    def is_const(self) -> bool:
        return self.op == CONST

    @property
    def sort_key(self):
        return (self.key, self.op, str(self.value))


_table: "weakref.WeakValueDictionary" = weakref.WeakValueDictionary()
_lock = threading.Lock()


def _intern(op: str, value, args: frozenset) -> Expr:
    k = (op, value, args)
    node = _table.get(k)
    if node is not None:
        return node
    if op == VAR:
        key = _mix(_name_key(value) ^ _OP_TAG[op])
    elif op == CONST:
        key = _mix(value + 11)
    else:
        s = 0
        x = 0
        for a in args:
            s = (s + a.key) & _MASK64
            x ^= a.key
        key = _mix(_mix(s ^ (_OP_TAG[op] << 56)) ^ x ^ (int(value or 0) << 1))
    with _lock:
        node = _table.get(k)
        if node is None:
            node = Expr(op, value, args, key)
            _table[k] = node
    return node


FALSE = _intern(CONST, 0, frozenset())
TRUE = _intern(CONST, 1, frozenset())
_EMPTY = frozenset()

ExprLike = Union[Expr, int, bool]


def const(b: int) -> Expr:
    return TRUE if b else FALSE


def var(name: str) -> Expr:
    if not name or not (name[0].isalpha() or name[0] == "_"):
        raise ValueError(f"invalid symbol name {name!r}")
    return _intern(VAR, name, _EMPTY)


def lift(e: ExprLike) -> Expr:
    if isinstance(e, Expr):
        return e
    if isinstance(e, (bool, int)):
        if e not in (0, 1):
            raise ValueError("only 0/1 constants are bits")
        return const(int(e))
    raise TypeError(f"cannot lift {type(e).__name__} to Expr")


def xor(*items: ExprLike) -> Expr:
    c = 0
    acc: set = set()
    for it in items:
        e = lift(it)
        if e.op == CONST:
            c ^= e.value
        elif e.op == XOR:
            c ^= e.value
            acc ^= e.args
        else:
            acc ^= {e}
    return _mk_xor(c, frozenset(acc))


def xor2(a: Expr, b: Expr) -> Expr:
    """Fast binary XOR used on hot paths."""
    if a.op == CONST:
        return b if a.value == 0 else not_(b)
    if b.op == CONST:
        return a if b.value == 0 else not_(a)
    ca, sa = (a.value, a.args) if a.op == XOR else (0, frozenset((a,)))
    cb, sb = (b.value, b.args) if b.op == XOR else (0, frozenset((b,)))
    return _mk_xor(ca ^ cb, sa ^ sb)


def _mk_xor(c: int, args: frozenset) -> Expr:
    if not args:
        return const(c)
    if len(args) == 1 and c == 0:
        return next(iter(args))
    return _intern(XOR, c, args)


def not_(e: ExprLike) -> Expr:
    e = lift(e)
    if e.op == CONST:
        return const(1 - e.value)
    if e.op == XOR:
        return _mk_xor(e.value ^ 1, e.args)
    return _intern(XOR, 1, frozenset((e,)))


def _negation_of(e: Expr) -> Optional[Expr]:
    if e.op == XOR and e.value == 1 and len(e.args) == 1:
        return next(iter(e.args))
    return None


def and_(*items: ExprLike) -> Expr:
    acc: set = set()
    for it in items:
        e = lift(it)
        if e.op == CONST:
            if e.value == 0:
                return FALSE
            continue
        if e.op == AND:
            acc |= e.args
        else:
            acc.add(e)
    return _mk_nary(AND, acc)


def or_(*items: ExprLike) -> Expr:
    acc: set = set()
    for it in items:
        e = lift(it)
        if e.op == CONST:
            if e.value == 1:
                return TRUE
            continue
        if e.op == OR:
            acc |= e.args
        else:
            acc.add(e)
    return _mk_nary(OR, acc)


def _mk_nary(op: str, acc: set) -> Expr:
    absorbing = FALSE if op == AND else TRUE
    if not acc:
        return TRUE if op == AND else FALSE
    for e in acc:
        ne = _negation_of(e)
        if ne is not None and ne in acc:
            return absorbing
    if len(acc) == 1:
        return next(iter(acc))
    return _intern(op, None, frozenset(acc))


def implies(a: ExprLike, b: ExprLike) -> Expr:
    return or_(not_(a), b)


def iff(a: ExprLike, b: ExprLike) -> Expr:
    return not_(xor(a, b))


def ite(c: ExprLike, a: ExprLike, b: ExprLike) -> Expr:
    c = lift(c)
    return or_(and_(c, a), and_(not_(c), b))


def at_least(k: int, terms: Sequence[ExprLike]) -> Expr:
    """``sum(terms) >= k`` as a shared threshold DAG of size O(len*k)."""
    terms = [lift(t) for t in terms]
    n = len(terms)
    if k <= 0:
        return TRUE
    if k > n:
        return FALSE
    # row[j] = at least j of terms[i:]
    row = [TRUE] + [FALSE] * k
    for i in range(n - 1, -1, -1):
        t = terms[i]
        new = [TRUE]
        for j in range(1, k + 1):
            new.append(or_(and_(t, row[j - 1]), row[j]))
        row = new
    return row[k]


def at_most(k: int, terms: Sequence[ExprLike]) -> Expr:
    return not_(at_least(k + 1, terms))


def iter_nodes(roots: Iterable[Expr]) -> List[Expr]:
    """Distinct nodes reachable from ``roots`` in a deterministic post-order."""
    seen = set()
    out: List[Expr] = []
    for root in roots:
        root = lift(root)
        if id(root) in seen:
            continue
        stack = [(root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                out.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            if node.args:
                for ch in reversed(node.kids):
                    if id(ch) not in seen:
                        stack.append((ch, False))
    return out


def symbols(*roots: Expr) -> set:
    return {n.value for n in iter_nodes(roots) if n.op == VAR}


def eval_expr(e: ExprLike, assignment: Mapping[str, int]) -> int:
    """Evaluate under a total assignment (missing symbol raises KeyError)."""
    e = lift(e)
    if e.op == CONST:
        return e.value
    if e.op == VAR:
        try:
            return int(assignment[e.value]) & 1
        except KeyError:
            raise KeyError(f"symbol {e.value!r} not assigned") from None
    vals: Dict[int, int] = {}
    for node in iter_nodes([e]):
        op = node.op
        if op == CONST:
            v = node.value
        elif op == VAR:
            try:
                v = int(assignment[node.value]) & 1
            except KeyError:
                raise KeyError(f"symbol {node.value!r} not assigned") from None
        elif op == XOR:
            v = node.value
            for a in node.args:
                v ^= vals[id(a)]
        elif op == AND:
            v = 1
            for a in node.args:
                if not vals[id(a)]:
                    v = 0
                    break
        else:
            v = 0
            for a in node.args:
                if vals[id(a)]:
                    v = 1
                    break
        vals[id(node)] = v
    return vals[id(e)]


def eval_many(exprs: Sequence[Expr], assignment: Mapping[str, int]) -> List[int]:
    return [eval_expr(e, assignment) for e in exprs]


def substitute(e: ExprLike, mapping: Mapping[str, ExprLike]) -> Expr:
    """Replace symbols by expressions (or 0/1) and re-simplify."""
    e = lift(e)
    memo: Dict[int, Expr] = {}
    for node in iter_nodes([e]):
        if node.op == CONST:
            r = node
        elif node.op == VAR:
            r = lift(mapping[node.value]) if node.value in mapping else node
        elif node.op == XOR:
            r = xor(node.value, *[memo[id(a)] for a in node.args])
        elif node.op == AND:
            r = and_(*[memo[id(a)] for a in node.args])
        else:
            r = or_(*[memo[id(a)] for a in node.args])
        memo[id(node)] = r
    return memo[id(e)]


def simplify(e: ExprLike) -> Expr:
    """Rebuild through the canonical constructors (idempotent)."""
    return substitute(e, {})


def as_affine(e: ExprLike) -> Optional[Tuple[int, frozenset]]:
    """``(c, names)`` when ``e`` equals ``c XOR (XOR of names)``, else None."""
    e = lift(e)
    if e.op == CONST:
        return (e.value, frozenset())
    if e.op == VAR:
        return (0, frozenset((e.value,)))
    if e.op == XOR and all(a.op == VAR for a in e.args):
        return (e.value, frozenset(a.value for a in e.args))
    return None


def to_str(e: ExprLike) -> str:
    e = lift(e)
    if e.op == CONST:
        return str(e.value)
    if e.op == VAR:
        return e.value
    parts = [to_str(a) for a in e.kids]
    if e.op == XOR:
        if e.value:
            if len(parts) == 1:
                return "!" + parts[0]
            parts.insert(0, "1")
        return "(" + " ^ ".join(parts) + ")"
    sep = " & " if e.op == AND else " | "
    return "(" + sep.join(parts) + ")"


# ---------------------------------------------------------------------------
# Symbols

SYMBOL_KINDS = (
    "input-error-X",
    "input-error-Z",
    "fault-X",
    "fault-Z",
    "measurement-outcome",
    "decoder-output",
    "logical-phase",
)

_KIND_PREFIX = {
    "input-error-X": "ix",
    "input-error-Z": "iz",
    "fault-X": "fx",
    "fault-Z": "fz",
    "measurement-outcome": "m",
    "decoder-output": "r",
    "logical-phase": "L",
}

FAULT_KINDS = ("fault-X", "fault-Z")
INPUT_KINDS = ("input-error-X", "input-error-Z")


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    origin: Tuple

    @property
    def expr(self) -> Expr:
        return var(self.name)


def _origin_text(origin: Tuple) -> str:
    out = []
    for part in origin:
        s = str(part)
        out.append("".join(ch if ch.isalnum() else "_" for ch in s))
    return "_".join(out)


@dataclass
class SymbolPool:
    """Issues symbols whose names are a deterministic function of their origin."""

    seed: str = ""
    symbols: Dict[str, Symbol] = field(default_factory=dict)
    order: List[str] = field(default_factory=list)
    _seen: Dict[Tuple, int] = field(default_factory=dict)

    def fresh(self, kind: str, origin: Tuple) -> Symbol:
        if kind not in _KIND_PREFIX:
            raise ValueError(f"unknown symbol kind {kind!r}")
        origin = tuple(origin)
        base = _KIND_PREFIX[kind] + ("_" + _origin_text(origin) if origin else "")
        if self.seed:
            base = f"{base}_{self.seed}"
        k = (kind, origin)
        count = self._seen.get(k, 0)
        self._seen[k] = count + 1
        name = base if count == 0 else f"{base}__{count}"
        while name in self.symbols:
            count += 1
            self._seen[k] = count + 1
            name = f"{base}__{count}"
        sym = Symbol(name, kind, origin)
        self.symbols[name] = sym
        self.order.append(name)
        return sym

    def get_or_create(self, kind: str, origin: Tuple) -> Symbol:
        """The symbol for ``(kind, origin)``; the same origin always yields the same name."""
        if kind not in _KIND_PREFIX:
            raise ValueError(f"unknown symbol kind {kind!r}")
        origin = tuple(origin)
        name = _KIND_PREFIX[kind] + ("_" + _origin_text(origin) if origin else "")
        if self.seed:
            name = f"{name}_{self.seed}"
        sym = self.symbols.get(name)
        if sym is None:
            sym = Symbol(name, kind, origin)
            self.symbols[name] = sym
            self.order.append(name)
        elif sym.kind != kind or sym.origin != origin:
            raise ValueError(f"symbol name clash for {name!r}")
        return sym

    def __contains__(self, name: str) -> bool:
        return name in self.symbols

    def get(self, name: str) -> Symbol:
        return self.symbols[name]

    def of_kind(self, *kinds: str) -> List[Symbol]:
        return [self.symbols[n] for n in self.order if self.symbols[n].kind in kinds]


# ---------------------------------------------------------------------------
# Integer-valued expressions and fault counters


class IntExpr:
    """``const + sum(bit terms)``; stays symbolic until compared."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: Sequence[Expr] = (), const_: int = 0):
        self.terms = tuple(lift(t) for t in terms)
        self.const = int(const_)

    @classmethod
    def of(cls, v) -> "IntExpr":
        if isinstance(v, IntExpr):
            return v
        if isinstance(v, Expr):
            if v.op == CONST:
                return cls((), v.value)
            return cls((v,), 0)
        if isinstance(v, (int, bool)):
            return cls((), int(v))
        raise TypeError(type(v))

    def __add__(self, other) -> "IntExpr":
        o = IntExpr.of(other)
        return IntExpr(self.terms + o.terms, self.const + o.const)

    __radd__ = __add__

    def is_const(self) -> bool:
        return not self.terms

    def upper(self) -> int:
        return self.const + len(self.terms)

    def value(self, assignment: Mapping[str, int]) -> int:
        return self.const + sum(eval_expr(t, assignment) for t in self.terms)

    def __repr__(self) -> str:
        inner = " + ".join([to_str(t) for t in self.terms] + ([str(self.const)] if self.const or not self.terms else []))
        return f"IntExpr({inner})"


def int_ge(a, b) -> Expr:
    """``a >= b`` for IntExpr/int/bit operands as a threshold expression."""
    a = IntExpr.of(a)
    b = IntExpr.of(b)
    # a - b >= 0  <=>  sum(a) + sum(!b_j) >= b.const - a.const + len(b)
    lits = list(a.terms) + [not_(t) for t in b.terms]
    k = b.const - a.const + len(b.terms)
    return at_least(k, lits)


def int_eq(a, b) -> Expr:
    return and_(int_ge(a, b), int_ge(b, a))


class FaultCounter:
    """Ordered list of bit terms whose value is the number of true terms."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Expr] = ()):
        self.terms: Tuple[Expr, ...] = tuple(lift(t) for t in terms)

    def copy(self) -> "FaultCounter":
        return FaultCounter(self.terms)

    def add(self, e: ExprLike) -> "FaultCounter":
        """Append one independent term."""
        e = lift(e)
        if e is FALSE:
            return self
        return FaultCounter(self.terms + (e,))

    def or_append(self, flags: Iterable[ExprLike]) -> "FaultCounter":
        """Append a single term: the OR of ``flags`` (a multi-qubit fault counts once)."""
        return self.add(or_(*flags))

    def __add__(self, other: "FaultCounter") -> "FaultCounter":
        return FaultCounter(self.terms + other.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def value(self, assignment: Mapping[str, int]) -> int:
        return sum(eval_expr(t, assignment) for t in self.terms)

    def as_int(self) -> IntExpr:
        return IntExpr(self.terms, 0)

    def at_most(self, k: int) -> Expr:
        return at_most(k, self.terms)

    def at_least(self, k: int) -> Expr:
        return at_least(k, self.terms)


def counter_value(f: FaultCounter, assignment: Mapping[str, int]) -> int:
    return f.value(assignment)


def counter_add(f: FaultCounter, e: ExprLike) -> FaultCounter:
    return f.add(e)


def counter_or_append(f: FaultCounter, flags: Iterable[ExprLike]) -> FaultCounter:
    return f.or_append(flags)
