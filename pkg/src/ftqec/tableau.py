"""Symbolic stabilizer states.

A :class:`SymTableau` holds ``n`` unsigned commuting generators (as x/z
bitmasks), a Boolean phase expression per generator, and a destabilizer
partner per generator.  The state it denotes under an assignment ``a`` is
stabilized by ``(-1)^{g_i(a)} P_i``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import symbool as sb
from .gf2_pauli import (
    GF2Matrix,
    PauliOp,
    anticommute_bits,
    check_matrix_lambda,
    parity,
    product_sign,
    rank,
    solve,
)
from .symbool import Expr

GATES_1Q = ("H", "S", "X", "Y", "Z")
GATES_2Q = ("CNOT", "CZ")
GATES = GATES_1Q + GATES_2Q


class TableauError(ValueError):
    pass


def conjugate_row(x: int, z: int, gate: str, qubits: Sequence[int]) -> Tuple[int, int, int]:
    """Conjugate the Hermitian Pauli ``(x, z)`` by a gate; returns (x', z', flip)."""
    if gate == "H":
        b = 1 << qubits[0]
        xb, zb = x & b, z & b
        flip = 1 if (xb and zb) else 0
        return (x & ~b) | zb, (z & ~b) | xb, flip
    if gate == "S":
        b = 1 << qubits[0]
        xb = x & b
        flip = 1 if (xb and z & b) else 0
        return x, z ^ xb, flip
    if gate == "X":
        return x, z, (z >> qubits[0]) & 1
    if gate == "Z":
        return x, z, (x >> qubits[0]) & 1
    if gate == "Y":
        return x, z, ((x ^ z) >> qubits[0]) & 1
    if gate == "CNOT":
        c, t = qubits
        xc, zc, xt, zt = (x >> c) & 1, (z >> c) & 1, (x >> t) & 1, (z >> t) & 1
        flip = xc & zt & (xt ^ zc ^ 1)
        return x ^ (xc << t), z ^ (zt << c), flip
    if gate == "CZ":
        a, b = qubits
        xa, za, xb, zb = (x >> a) & 1, (z >> a) & 1, (x >> b) & 1, (z >> b) & 1
        flip = xa & xb & (za ^ zb)
        return x, z ^ (xb << a) ^ (xa << b), flip
    raise TableauError(f"unknown gate {gate!r}")


def check_gate(n: int, gate: str, qubits: Sequence[int]) -> None:
    if gate not in GATES:
        raise TableauError(f"unknown gate {gate!r}")
    want = 1 if gate in GATES_1Q else 2
    if len(qubits) != want:
        raise TableauError(f"{gate} takes {want} qubit(s)")
    for q in qubits:
        if not 0 <= q < n:
            raise TableauError(f"qubit index {q} out of range for {n} qubits")
    if len(set(qubits)) != len(qubits):
        raise TableauError("gate qubits must be distinct")


class SymTableau:
    __slots__ = ("n", "gx", "gz", "dx", "dz", "phases")

    def __init__(self, n: int, gx, gz, dx, dz, phases):
        self.n = n
        self.gx = list(gx)
        self.gz = list(gz)
        self.dx = list(dx)
        self.dz = list(dz)
        self.phases: List[Expr] = list(phases)

    # -- construction -----------------------------------------------------

    @classmethod
    def zero_state(cls, n: int) -> "SymTableau":
        """|0...0>: generators Z_i with destabilizers X_i."""
        ones = [1 << i for i in range(n)]
        return cls(n, [0] * n, ones, ones, [0] * n, [sb.FALSE] * n)

    @classmethod
    def from_generators(cls, gens: Sequence[PauliOp], phases: Optional[Sequence[sb.ExprLike]] = None) -> "SymTableau":
        """Build from ``n`` commuting independent generators.

        A generator's own sign bit is folded into its phase expression.
        """
        if not gens:
            return cls(0, [], [], [], [], [])
        n = gens[0].n
        if len(gens) != n:
            raise TableauError(f"need exactly {n} generators for a pure state, got {len(gens)}")
        if phases is None:
            phases = [sb.FALSE] * n
        if len(phases) != n:
            raise TableauError("phase list length mismatch")
        for g in gens:
            if g.n != n:
                raise TableauError("generator dimension mismatch")
        for i in range(n):
            for j in range(i + 1, n):
                if anticommute_bits(gens[i].x, gens[i].z, gens[j].x, gens[j].z):
                    raise TableauError(f"generators {i} and {j} anticommute")
        m = GF2Matrix.from_paulis(gens, n)
        if rank(m) != n:
            raise TableauError("generators are dependent")
        ml = check_matrix_lambda(m, n)
        dx, dz = [], []
        full = (1 << n) - 1
        for j in range(n):
            d = solve(ml, 1 << j)
            if d is None:  # pragma: no cover - full rank guarantees a solution
                raise TableauError("cannot complete destabilizers")
            dx.append(d & full)
            dz.append(d >> n)
        ph = [sb.xor(sb.lift(p), g.sign) for g, p in zip(gens, phases)]
        return cls(n, [g.x for g in gens], [g.z for g in gens], dx, dz, ph)

    def copy(self) -> "SymTableau":
        return SymTableau(self.n, self.gx, self.gz, self.dx, self.dz, self.phases)

    # -- views --------------------------------------------------------------

    def generators(self) -> List[PauliOp]:
        return [PauliOp(self.n, x, z) for x, z in zip(self.gx, self.gz)]

    def destabilizers(self) -> List[PauliOp]:
        return [PauliOp(self.n, x, z) for x, z in zip(self.dx, self.dz)]

    def concretize(self, assignment: Mapping[str, int]) -> List[PauliOp]:
        return [
            PauliOp(self.n, x, z, sb.eval_expr(p, assignment))
            for x, z, p in zip(self.gx, self.gz, self.phases)
        ]

    def symbols(self) -> set:
        return sb.symbols(*self.phases)

    def validate(self) -> None:
        n = self.n
        for i in range(n):
            for j in range(n):
                if i < j and anticommute_bits(self.gx[i], self.gz[i], self.gx[j], self.gz[j]):
                    raise TableauError(f"generators {i},{j} anticommute")
                a = anticommute_bits(self.dx[i], self.dz[i], self.gx[j], self.gz[j])
                if a != (1 if i == j else 0):
                    raise TableauError(f"destabilizer {i} vs generator {j} relation broken")
        if rank(GF2Matrix([x | (z << n) for x, z in zip(self.gx, self.gz)], 2 * n)) != n:
            raise TableauError("generators dependent")

    def __repr__(self) -> str:
        rows = ", ".join(
            f"{'(-1)^' + sb.to_str(p) + ' ' if p is not sb.FALSE else ''}{PauliOp(self.n, x, z)}"
            for x, z, p in zip(self.gx, self.gz, self.phases)
        )
        return f"SymTableau<{rows}>"

    # -- Clifford gates -----------------------------------------------------

    def apply_clifford(self, gate: str, qubits: Sequence[int]) -> "SymTableau":
        check_gate(self.n, gate, qubits)
        t = self.copy()
        t._apply(gate, tuple(qubits))
        return t

    def _apply(self, gate: str, qubits: Tuple[int, ...]) -> None:
        gx, gz, ph = self.gx, self.gz, self.phases
        sup = 0
        for q in qubits:
            sup |= 1 << q
        for i in range(self.n):
            x, z = gx[i], gz[i]
            if not ((x | z) & sup):
                continue
            nx, nz, flip = conjugate_row(x, z, gate, qubits)
            gx[i], gz[i] = nx, nz
            if flip:
                ph[i] = sb.not_(ph[i])
        if gate in ("X", "Y", "Z"):
            return
        dx, dz = self.dx, self.dz
        for i in range(self.n):
            x, z = dx[i], dz[i]
            if (x | z) & sup:
                dx[i], dz[i], _ = conjugate_row(x, z, gate, qubits)

    # -- phase-only updates -------------------------------------------------

    def _xor_phases_if(self, px: int, pz: int, c: Expr) -> None:
        """Phase_i ^= c for every generator anticommuting with Pauli (px, pz)."""
        if c is sb.FALSE:
            return
        gx, gz, ph = self.gx, self.gz, self.phases
        for i in range(self.n):
            if parity((gx[i] & pz) ^ (gz[i] & px)):
                ph[i] = sb.xor2(ph[i], c)

    def conditional_pauli(self, p: PauliOp, c: sb.ExprLike) -> "SymTableau":
        if p.n != self.n:
            raise TableauError("dimension mismatch")
        t = self.copy()
        t._xor_phases_if(p.x, p.z, sb.lift(c))
        return t

    def inject_error(self, q: int, ex: Expr, ez: Expr) -> Tuple[Expr, "SymTableau"]:
        """Apply X_q^ex Z_q^ez; returns the fault flag ex | ez."""
        if not 0 <= q < self.n:
            raise TableauError("qubit out of range")
        t = self.copy()
        t._inject(q, ex, ez)
        return sb.or_(ex, ez), t

    def _inject(self, q: int, ex: Expr, ez: Expr) -> None:
        b = 1 << q
        gx, gz, ph = self.gx, self.gz, self.phases
        for i in range(self.n):
            zi = gz[i] & b
            xi = gx[i] & b
            if zi:
                ph[i] = sb.xor2(ph[i], ex)
            if xi:
                ph[i] = sb.xor2(ph[i], ez)

    # -- group membership ---------------------------------------------------

    def decompose(self, px: int, pz: int) -> Optional[Tuple[List[int], int]]:
        """Rows whose product equals unsigned (px, pz), with the product's sign bit."""
        for x, z in zip(self.gx, self.gz):
            if parity((x & pz) ^ (z & px)):
                return None
        rows = [
            j
            for j in range(self.n)
            if parity((self.dx[j] & pz) ^ (self.dz[j] & px))
        ]
        ax = az = 0
        sign = 0
        for j in rows:
            sign ^= product_sign(ax, az, self.gx[j], self.gz[j])
            ax ^= self.gx[j]
            az ^= self.gz[j]
        if ax != px or az != pz:  # pragma: no cover - guarded by invariants
            raise TableauError("destabilizer invariant broken")
        return rows, sign

    def deterministic_phase_of(self, p: PauliOp) -> Optional[Expr]:
        """``e`` such that ``(-1)^e P`` stabilizes the state, or None."""
        if p.n != self.n:
            raise TableauError("dimension mismatch")
        dec = self.decompose(p.x, p.z)
        if dec is None:
            return None
        rows, sign = dec
        return sb.xor(sign ^ p.sign, *[self.phases[j] for j in rows])

    # -- measurement and reset -----------------------------------------------

    def measure(self, q: int, fresh: Optional[Callable[[], Expr]] = None) -> Tuple[Expr, Fraction, "SymTableau"]:
        """Z-basis measurement; ``fresh`` supplies the outcome symbol when random."""
        if not 0 <= q < self.n:
            raise TableauError("qubit out of range")
        t = self.copy()
        out, prob = t._measure(q, fresh)
        return out, prob, t

    def _measure(self, q: int, fresh: Optional[Callable[[], Expr]]) -> Tuple[Expr, Fraction]:
        b = 1 << q
        anti = [i for i in range(self.n) if self.gx[i] & b]
        if not anti:
            rows, sign = self.decompose(0, b)
            return sb.xor(sign, *[self.phases[j] for j in rows]), Fraction(1)
        if fresh is None:
            raise TableauError("random measurement needs an outcome symbol")
        s = fresh()
        self._collapse(q, anti, s)
        return s, Fraction(1, 2)

    def _collapse(self, q: int, anti: List[int], s: Expr) -> None:
        b = 1 << q
        p = anti[0]
        gx, gz, ph = self.gx, self.gz, self.phases
        px, pz, pph = gx[p], gz[p], ph[p]
        for i in anti[1:]:
            sign = product_sign(gx[i], gz[i], px, pz)
            ph[i] = sb.xor(ph[i], pph, sign)
            gx[i] ^= px
            gz[i] ^= pz
        for i in range(self.n):
            if i != p and self.dx[i] & b:
                self.dx[i] ^= px
                self.dz[i] ^= pz
        self.dx[p], self.dz[p] = px, pz
        gx[p], gz[p] = 0, b
        ph[p] = s

    def initialize(self, q: int) -> "SymTableau":
        """Reset qubit ``q`` to |0>."""
        if not 0 <= q < self.n:
            raise TableauError("qubit out of range")
        t = self.copy()
        t._initialize(q)
        return t

    def _initialize(self, q: int) -> None:
        b = 1 << q
        anti = [i for i in range(self.n) if self.gx[i] & b]
        if not anti:
            rows, sign = self.decompose(0, b)
            r = sb.xor(sign, *[self.phases[j] for j in rows])
            self._xor_phases_if(b, 0, r)
        else:
            self._collapse(q, anti, sb.FALSE)

    # -- restriction -----------------------------------------------------------

    def restrict(self, keep: Sequence[int]) -> Optional["SymTableau"]:
        """State of the ``keep`` qubits if it factors off the rest, else None."""
        keep = list(keep)
        kset = set(keep)
        others = [q for q in range(self.n) if q not in kset]
        rows = [[x, z, p] for x, z, p in zip(self.gx, self.gz, self.phases)]
        used = [False] * self.n
        for q in others:
            for which in (0, 1):
                b = 1 << q
                piv = None
                for i in range(self.n):
                    if not used[i] and rows[i][which] & b:
                        piv = i
                        break
                if piv is None:
                    continue
                used[piv] = True
                px, pz, pp = rows[piv]
                for i in range(self.n):
                    if i != piv and rows[i][which] & b:
                        x, z, ph = rows[i]
                        sign = product_sign(x, z, px, pz)
                        rows[i] = [x ^ px, z ^ pz, sb.xor(ph, pp, sign)]
        omask = 0
        for q in others:
            omask |= 1 << q
        kept = [r for i, r in enumerate(rows) if not used[i]]
        if len(kept) != len(keep) or any((r[0] | r[1]) & omask for r in kept):
            return None
        gens = [PauliOp(self.n, r[0], r[1]).restrict(keep) for r in kept]
        try:
            return SymTableau.from_generators(gens, [r[2] for r in kept])
        except TableauError:
            return None

    def embed(self, n: int, qubits: Sequence[int]) -> "SymTableau":
        """Tensor with |0> on the other qubits of an ``n``-qubit register."""
        qubits = list(qubits)
        qset = set(qubits)

        def move(v: int) -> int:
            out = 0
            for j, q in enumerate(qubits):
                if (v >> j) & 1:
                    out |= 1 << q
            return out

        gx = [move(v) for v in self.gx]
        gz = [move(v) for v in self.gz]
        dx = [move(v) for v in self.dx]
        dz = [move(v) for v in self.dz]
        ph = list(self.phases)
        for q in range(n):
            if q not in qset:
                gx.append(0)
                gz.append(1 << q)
                dx.append(1 << q)
                dz.append(0)
                ph.append(sb.FALSE)
        return SymTableau(n, gx, gz, dx, dz, ph)


def tensor(parts: Sequence[Tuple[SymTableau, Sequence[int]]], n: int) -> SymTableau:
    """Combine tableaus on disjoint qubit sets, |0> elsewhere."""
    gx, gz, dx, dz, ph = [], [], [], [], []
    covered = set()
    for tab, qubits in parts:
        e = tab.embed(n, qubits)
        k = tab.n
        gx += e.gx[:k]
        gz += e.gz[:k]
        dx += e.dx[:k]
        dz += e.dz[:k]
        ph += e.phases[:k]
        covered |= set(qubits)
    for q in range(n):
        if q not in covered:
            gx.append(0)
            gz.append(1 << q)
            dx.append(1 << q)
            dz.append(0)
            ph.append(sb.FALSE)
    return SymTableau(n, gx, gz, dx, dz, ph)
