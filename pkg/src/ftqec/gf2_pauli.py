"""Pauli operators in the symplectic representation and GF(2) linear algebra.

Bit vectors are stored as Python integers (bit ``i`` is coordinate ``i``).
A Pauli on ``n`` qubits is a pair of ``n``-bit masks ``(x, z)`` plus a sign
bit; qubit ``j`` (0-based) is bit ``j`` of both masks, and is printed as the
``j``-th character of the Pauli string.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

WORD_BITS = 64


def popcount(v: int) -> int:
    return bin(v).count("1")


def parity(v: int) -> int:
    return popcount(v) & 1


def to_words(v: int, nbits: int) -> List[int]:
    """Pack an integer bit vector into 64-bit little-endian words."""
    nwords = max(1, (nbits + WORD_BITS - 1) // WORD_BITS)
    mask = (1 << WORD_BITS) - 1
    return [(v >> (WORD_BITS * i)) & mask for i in range(nwords)]


def from_words(words: Sequence[int]) -> int:
    v = 0
    for i, w in enumerate(words):
        v |= (w & ((1 << WORD_BITS) - 1)) << (WORD_BITS * i)
    return v


def bits_of(v: int, n: int) -> List[int]:
    return [(v >> i) & 1 for i in range(n)]


def int_of_bits(bits: Iterable[int]) -> int:
    v = 0
    for i, b in enumerate(bits):
        if b:
            v |= 1 << i
    return v


def product_sign(x1: int, z1: int, x2: int, z2: int) -> int:
    """Sign bit picked up when multiplying Hermitian Paulis ``(x1,z1)(x2,z2)``.

    The product of two Hermitian Paulis equals ``i^k`` times the Hermitian
    Pauli with masks ``(x1^x2, z1^z2)``.  For commuting operands ``k`` is even
    and the returned bit is ``k/2 mod 2``.  For anticommuting operands the
    product is only meaningful up to a global phase and the bit is
    ``floor(k/2) mod 2`` of the odd exponent.
    """
    y1 = x1 & z1
    xo1 = x1 & ~z1
    zo1 = z1 & ~x1
    y2 = x2 & z2
    xo2 = x2 & ~z2
    zo2 = z2 & ~x2
    # Local factors: XY = iZ, YZ = iX, ZX = iY and the reverse orders give -i.
    pos = (xo1 & y2) | (y1 & zo2) | (zo1 & xo2)
    neg = (y1 & xo2) | (zo1 & y2) | (xo1 & zo2)
    k = (popcount(pos) - popcount(neg)) % 4
    return (k >> 1) & 1


@dataclass(frozen=True)
class PauliOp:
    """An n-qubit Hermitian Pauli operator ``(-1)^sign X^x Z^z`` (Y where both)."""

    n: int
    x: int = 0
    z: int = 0
    sign: int = 0

    def __post_init__(self):
        full = (1 << self.n) - 1
        if self.n < 0 or self.x & ~full or self.z & ~full:
            raise ValueError("Pauli masks exceed qubit count")
        if self.sign not in (0, 1):
            raise ValueError("sign must be 0 or 1")

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(n)

    @classmethod
    def from_string(cls, s: str) -> "PauliOp":
        s = s.strip()
        sign = 0
        if s.startswith("-"):
            sign = 1
            s = s[1:]
        elif s.startswith("+"):
            s = s[1:]
        x = z = 0
        for i, ch in enumerate(s):
            ch = ch.upper()
            if ch in ("I", "_", "."):
                continue
            if ch == "X":
                x |= 1 << i
            elif ch == "Z":
                z |= 1 << i
            elif ch == "Y":
                x |= 1 << i
                z |= 1 << i
            else:
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(len(s), x, z, sign)

    @classmethod
    def single(cls, n: int, q: int, letter: str) -> "PauliOp":
        letter = letter.upper()
        x = (1 << q) if letter in ("X", "Y") else 0
        z = (1 << q) if letter in ("Z", "Y") else 0
        return cls(n, x, z)

    @classmethod
    def from_support(cls, n: int, letter: str, qubits: Iterable[int]) -> "PauliOp":
        """Pauli with the same letter on every listed (0-based) qubit."""
        m = 0
        for q in qubits:
            m |= 1 << q
        letter = letter.upper()
        return cls(n, m if letter in ("X", "Y") else 0, m if letter in ("Z", "Y") else 0)

    @classmethod
    def from_vector(cls, v: int, n: int, sign: int = 0) -> "PauliOp":
        """Inverse of :meth:`vector`: low n bits are x, high n bits are z."""
        full = (1 << n) - 1
        return cls(n, v & full, (v >> n) & full, sign)

    def vector(self) -> int:
        return self.x | (self.z << self.n)

    def words(self) -> List[int]:
        """64-bit little-endian packing of the length-2n vector, then the sign."""
        return to_words(self.vector(), 2 * self.n) + [self.sign]

    def letter(self, q: int) -> str:
        return "IXZY"[((self.x >> q) & 1) | (((self.z >> q) & 1) << 1)]

    def to_string(self) -> str:
        return ("-" if self.sign else "") + "".join(self.letter(q) for q in range(self.n))

    __str__ = to_string

    def __repr__(self) -> str:
        return f"PauliOp({str(self)!r})"

    @property
    def support(self) -> int:
        return self.x | self.z

    def unsigned(self) -> "PauliOp":
        return PauliOp(self.n, self.x, self.z, 0) if self.sign else self

    def negate(self) -> "PauliOp":
        return PauliOp(self.n, self.x, self.z, self.sign ^ 1)

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return mul(self, other)

    def weight(self) -> int:
        return popcount(self.x | self.z)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def embed(self, n: int, qubits: Sequence[int]) -> "PauliOp":
        """Place this Pauli on the given qubits of an ``n``-qubit register."""
        if len(qubits) != self.n:
            raise ValueError("qubit map length mismatch")
        x = z = 0
        for j, q in enumerate(qubits):
            if (self.x >> j) & 1:
                x |= 1 << q
            if (self.z >> j) & 1:
                z |= 1 << q
        return PauliOp(n, x, z, self.sign)

    def restrict(self, qubits: Sequence[int]) -> "PauliOp":
        x = z = 0
        for j, q in enumerate(qubits):
            if (self.x >> q) & 1:
                x |= 1 << j
            if (self.z >> q) & 1:
                z |= 1 << j
        return PauliOp(len(qubits), x, z, self.sign)


def _check_dims(p: PauliOp, q: PauliOp) -> None:
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")


def weight(p: PauliOp) -> int:
    return p.weight()


def anticommute_bits(x1: int, z1: int, x2: int, z2: int) -> int:
    return parity((x1 & z2) ^ (z1 & x2))


def commutes(p: PauliOp, q: PauliOp) -> int:
    """0 if ``p`` and ``q`` commute, 1 if they anticommute."""
    _check_dims(p, q)
    return anticommute_bits(p.x, p.z, q.x, q.z)


def mul(p: PauliOp, q: PauliOp) -> PauliOp:
    """Product ``p*q``; exact for commuting operands, up to global phase otherwise."""
    _check_dims(p, q)
    s = p.sign ^ q.sign ^ product_sign(p.x, p.z, q.x, q.z)
    return PauliOp(p.n, p.x ^ q.x, p.z ^ q.z, s)


def iter_paulis(n: int, max_weight: int, qubits: Optional[Sequence[int]] = None) -> Iterator[PauliOp]:
    """All unsigned Paulis of weight <= max_weight, in order of increasing weight."""
    from itertools import combinations, product

    qs = list(range(n)) if qubits is None else list(qubits)
    for w in range(0, max_weight + 1):
        for sup in combinations(qs, w):
            for letters in product("XYZ", repeat=w):
                x = z = 0
                for q, l in zip(sup, letters):
                    if l != "Z":
                        x |= 1 << q
                    if l != "X":
                        z |= 1 << q
                yield PauliOp(n, x, z)


class GF2Matrix:
    """Dense binary matrix; each row is an integer whose bit ``j`` is column ``j``."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows: Iterable[int], ncols: int):
        self.rows = [int(r) for r in rows]
        self.ncols = ncols
        self.nrows = len(self.rows)
        full = (1 << ncols) - 1
        for r in self.rows:
            if r & ~full:
                raise ValueError("row wider than column count")

    @classmethod
    def from_lists(cls, data: Sequence[Sequence[int]], ncols: Optional[int] = None) -> "GF2Matrix":
        if ncols is None:
            ncols = len(data[0]) if data else 0
        return cls([int_of_bits(r) for r in data], ncols)

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls([1 << i for i in range(n)], n)

    @classmethod
    def from_paulis(cls, paulis: Sequence[PauliOp], n: Optional[int] = None) -> "GF2Matrix":
        if n is None:
            n = paulis[0].n if paulis else 0
        return cls([p.vector() for p in paulis], 2 * n)

    def to_lists(self) -> List[List[int]]:
        return [bits_of(r, self.ncols) for r in self.rows]

    def words(self) -> List[List[int]]:
        return [to_words(r, self.ncols) for r in self.rows]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def __eq__(self, other) -> bool:
        return isinstance(other, GF2Matrix) and self.ncols == other.ncols and self.rows == other.rows

    def __repr__(self) -> str:
        return f"GF2Matrix({self.nrows}x{self.ncols})"

    def get(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> int:
        v = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                v |= 1 << i
        return v

    def transpose(self) -> "GF2Matrix":
        return GF2Matrix([self.column(j) for j in range(self.ncols)], self.nrows)

    def mul_vec(self, v: int) -> int:
        """``M v`` with ``v`` a column vector given as an integer."""
        out = 0
        for i, r in enumerate(self.rows):
            if parity(r & v):
                out |= 1 << i
        return out

    def matmul(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = [other.column(j) for j in range(other.ncols)]
        out = []
        for r in self.rows:
            v = 0
            for j, c in enumerate(cols):
                if parity(r & c):
                    v |= 1 << j
            out.append(v)
        return GF2Matrix(out, other.ncols)


def rref(m: GF2Matrix) -> Tuple[GF2Matrix, int, List[int]]:
    """Reduced row-echelon form, rank and pivot columns."""
    rows = list(m.rows)
    pivots: List[int] = []
    r = 0
    for c in range(m.ncols):
        bit = 1 << c
        piv = None
        for i in range(r, len(rows)):
            if rows[i] & bit:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return GF2Matrix(rows, m.ncols), r, pivots


def rank(m: GF2Matrix) -> int:
    return rref(m)[1]


def nullspace(m: GF2Matrix) -> GF2Matrix:
    """Basis of ``ker M`` as the columns of a ``ncols x dim`` matrix."""
    basis = nullspace_vectors(m)
    cols = GF2Matrix(basis, m.ncols)  # rows are basis vectors
    return cols.transpose() if basis else GF2Matrix([0] * m.ncols, 0)


def nullspace_vectors(m: GF2Matrix) -> List[int]:
    red, rk, pivots = rref(m)
    pivset = set(pivots)
    out = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v = 1 << f
        for i, pc in enumerate(pivots):
            if (red.rows[i] >> f) & 1:
                v |= 1 << pc
        out.append(v)
    return out


def solve(m: GF2Matrix, b: int) -> Optional[int]:
    """A particular solution ``p`` of ``M p = b`` or ``None`` if inconsistent."""
    # Eliminate on the augmented matrix, tracking b in bit ``ncols``.
    aug_bit = 1 << m.ncols
    rows = [r | (aug_bit if (b >> i) & 1 else 0) for i, r in enumerate(m.rows)]
    if b >> m.nrows:
        raise ValueError("right-hand side longer than row count")
    red, rk, pivots = rref(GF2Matrix(rows, m.ncols + 1))
    if pivots and pivots[-1] == m.ncols:
        return None
    p = 0
    for i, pc in enumerate(pivots):
        if red.rows[i] & aug_bit:
            p |= 1 << pc
    return p


def symplectic_swap(v: int, n: int) -> int:
    """``Λ v``: swap the x and z halves of a length-2n vector."""
    full = (1 << n) - 1
    return ((v & full) << n) | ((v >> n) & full)


def check_matrix_lambda(m: GF2Matrix, n: int) -> GF2Matrix:
    """``M Λ`` for a matrix with 2n columns (rows of Pauli vectors)."""
    return GF2Matrix([symplectic_swap(r, n) for r in m.rows], 2 * n)


def syndrome(g: GF2Matrix, e: PauliOp) -> int:
    """Bit ``i`` is 1 iff row ``i`` of ``g`` anticommutes with ``e``."""
    if g.ncols != 2 * e.n:
        raise ValueError("dimension mismatch")
    return g.mul_vec(symplectic_swap(e.vector(), e.n))


def syndrome_bits(g: GF2Matrix, e: PauliOp) -> List[int]:
    return bits_of(syndrome(g, e), g.nrows)
