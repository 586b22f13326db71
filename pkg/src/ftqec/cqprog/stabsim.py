"""Concrete Aaronson-Gottesman stabilizer simulator.

Deliberately written independently of :mod:`ftqec.tableau`: the tableau is
stored column-major (one bitmask over the 2n rows per qubit) and row
products use the original ``g`` function.  Rows ``0..n-1`` are
destabilizers and rows ``n..2n-1`` stabilizers.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from ..gf2_pauli import GF2Matrix, PauliOp, solve


def _g(x1: int, z1: int, x2: int, z2: int) -> int:
    if x1 == 0 and z1 == 0:
        return 0
    if x1 == 1 and z1 == 1:
        return z2 - x2
    if x1 == 1 and z1 == 0:
        return z2 * (2 * x2 - 1)
    return x2 * (1 - 2 * z2)


class ConcreteState:
    __slots__ = ("n", "xs", "zs", "r")

    def __init__(self, n: int, xs: List[int], zs: List[int], r: int):
        self.n = n
        self.xs = xs
        self.zs = zs
        self.r = r

    @classmethod
    def zero(cls, n: int) -> "ConcreteState":
        xs = [1 << q for q in range(n)]  # destabilizer q is X_q
        zs = [1 << (n + q) for q in range(n)]  # stabilizer q is Z_q
        return cls(n, xs, zs, 0)

    @classmethod
    def from_stabilizers(cls, stabs: Sequence[PauliOp]) -> "ConcreteState":
        """Prepare the state stabilized by the given signed Paulis.

        Uses measurement: start from |0..0>, measure every stabilizer, then fix
        wrong signs with a Pauli that anticommutes with exactly that one.
        """
        n = stabs[0].n
        st = cls.zero(n)
        for p in stabs:
            st.measure_pauli(p.unsigned(), forced=p.sign)
        wrong = 0
        for i, p in enumerate(stabs):
            if st.expectation(p.unsigned()) != p.sign:
                wrong |= 1 << i
        if wrong:
            # e = ex | ez << n anticommutes with p iff p.z.ex + p.x.ez = 1
            rows = GF2Matrix([p.z | (p.x << n) for p in stabs], 2 * n)
            e = solve(rows, wrong)
            if e is None:
                raise ValueError("stabilizers inconsistent")
            st.apply_pauli(PauliOp(n, e & ((1 << n) - 1), e >> n))
            for p in stabs:
                if st.expectation(p.unsigned()) != p.sign:
                    raise ValueError("stabilizers inconsistent")
        return st

    def copy(self) -> "ConcreteState":
        return ConcreteState(self.n, list(self.xs), list(self.zs), self.r)

    def key(self) -> Tuple:
        return (tuple(self.xs), tuple(self.zs), self.r)

    # -- row access -------------------------------------------------------------

    def row(self, i: int) -> Tuple[int, int, int]:
        x = z = 0
        for q in range(self.n):
            if (self.xs[q] >> i) & 1:
                x |= 1 << q
            if (self.zs[q] >> i) & 1:
                z |= 1 << q
        return x, z, (self.r >> i) & 1

    def stabilizers(self) -> List[PauliOp]:
        out = []
        for i in range(self.n, 2 * self.n):
            x, z, s = self.row(i)
            out.append(PauliOp(self.n, x, z, s))
        return out

    def _set_row(self, i: int, x: int, z: int, s: int) -> None:
        b = 1 << i
        for q in range(self.n):
            if (x >> q) & 1:
                self.xs[q] |= b
            else:
                self.xs[q] &= ~b
            if (z >> q) & 1:
                self.zs[q] |= b
            else:
                self.zs[q] &= ~b
        if s:
            self.r |= b
        else:
            self.r &= ~b

    @staticmethod
    def _rowsum_vals(hx: int, hz: int, hs: int, ix: int, iz: int, is_: int, n: int) -> Tuple[int, int, int]:
        tot = 2 * hs + 2 * is_
        for q in range(n):
            tot += _g((ix >> q) & 1, (iz >> q) & 1, (hx >> q) & 1, (hz >> q) & 1)
        tot %= 4
        return hx ^ ix, hz ^ iz, 0 if tot == 0 else 1

    def _rowsum(self, h: int, i: int) -> None:
        hx, hz, hs = self.row(h)
        ix, iz, is_ = self.row(i)
        self._set_row(h, *self._rowsum_vals(hx, hz, hs, ix, iz, is_, self.n))

    # -- gates --------------------------------------------------------------------

    def h(self, a: int) -> None:
        self.r ^= self.xs[a] & self.zs[a]
        self.xs[a], self.zs[a] = self.zs[a], self.xs[a]

    def s(self, a: int) -> None:
        self.r ^= self.xs[a] & self.zs[a]
        self.zs[a] ^= self.xs[a]

    def cnot(self, a: int, b: int) -> None:
        xa, za, xb, zb = self.xs[a], self.zs[a], self.xs[b], self.zs[b]
        full = (1 << (2 * self.n)) - 1
        self.r ^= xa & zb & (~(xb ^ za) & full)
        self.xs[b] = xb ^ xa
        self.zs[a] = za ^ zb

    def apply_gate(self, name: str, qubits: Sequence[int]) -> None:
        name = name.upper()
        if name == "H":
            self.h(qubits[0])
        elif name == "S":
            self.s(qubits[0])
        elif name == "X":
            self.r ^= self.zs[qubits[0]]
        elif name == "Z":
            self.r ^= self.xs[qubits[0]]
        elif name == "Y":
            self.r ^= self.xs[qubits[0]] ^ self.zs[qubits[0]]
        elif name == "CNOT":
            self.cnot(qubits[0], qubits[1])
        elif name == "CZ":
            self.h(qubits[1])
            self.cnot(qubits[0], qubits[1])
            self.h(qubits[1])
        else:
            raise ValueError(f"unknown gate {name}")

    def apply_pauli(self, p: PauliOp) -> None:
        """Apply a Pauli (its sign is a global phase and is ignored)."""
        for q in range(self.n):
            if (p.x >> q) & 1:
                self.r ^= self.zs[q]
            if (p.z >> q) & 1:
                self.r ^= self.xs[q]

    # -- measurement --------------------------------------------------------------

    def random_row(self, a: int) -> Optional[int]:
        col = self.xs[a] >> self.n
        if not col:
            return None
        return self.n + ((col & -col).bit_length() - 1)

    def measure(self, a: int, forced: Optional[int] = None, rng=None) -> Tuple[int, bool]:
        """Measure Z_a.  Returns (outcome, was_random).

        A random outcome is taken from ``forced`` if given, else from ``rng``.
        """
        n = self.n
        p = self.random_row(a)
        if p is not None:
            for i in range(2 * n):
                if i != p and (self.xs[a] >> i) & 1:
                    self._rowsum(i, p)
            px, pz, ps = self.row(p)
            self._set_row(p - n, px, pz, ps)
            if forced is None:
                forced = rng.getrandbits(1) if rng is not None else 0
            self._set_row(p, 0, 1 << a, forced & 1)
            return forced & 1, True
        # deterministic: accumulate stabilizers selected by destabilizers
        sx = sz = ss = 0
        for i in range(n):
            if (self.xs[a] >> i) & 1:
                ix, iz, is_ = self.row(i + n)
                sx, sz, ss = self._rowsum_vals(sx, sz, ss, ix, iz, is_, n)
        return ss, False

    def reset(self, a: int, rng=None) -> None:
        out, _ = self.measure(a, forced=0 if rng is None else None, rng=rng)
        if out:
            self.apply_gate("X", [a])

    def expectation(self, p: PauliOp) -> Optional[int]:
        """Sign bit ``e`` with (-1)^e P a stabilizer, or None if P is not determined."""
        n = self.n
        for i in range(n, 2 * n):
            x, z, _ = self.row(i)
            if bin((x & p.z) ^ (z & p.x)).count("1") & 1:
                return None
        sx = sz = ss = 0
        for i in range(n):
            x, z, _ = self.row(i)
            if bin((x & p.z) ^ (z & p.x)).count("1") & 1:
                ix, iz, is_ = self.row(i + n)
                sx, sz, ss = self._rowsum_vals(sx, sz, ss, ix, iz, is_, n)
        if sx != p.x or sz != p.z:
            raise AssertionError("stabilizer decomposition failed")
        return ss ^ p.sign

    def measure_pauli(self, p: PauliOp, forced: Optional[int] = None, rng=None) -> int:
        """Projective measurement of a multi-qubit Pauli using an in-place basis change."""
        e = self.expectation(p)
        if e is not None:
            return e
        # Find a stabilizer anticommuting with P, multiply others into it, replace.
        n = self.n
        anti = []
        for i in range(n, 2 * n):
            x, z, _ = self.row(i)
            if bin((x & p.z) ^ (z & p.x)).count("1") & 1:
                anti.append(i)
        piv = anti[0]
        for i in range(2 * n):
            if i == piv:
                continue
            x, z, _ = self.row(i)
            if bin((x & p.z) ^ (z & p.x)).count("1") & 1:
                self._rowsum(i, piv)
        px, pz, ps = self.row(piv)
        self._set_row(piv - n, px, pz, ps)
        if forced is None:
            forced = rng.getrandbits(1) if rng is not None else 0
        self._set_row(piv, p.x, p.z, (forced ^ p.sign) & 1)
        return forced & 1
