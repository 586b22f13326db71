"""Independent reference implementations used to check the package.

Nothing here imports the package's simulation or algebra code: Paulis and
Cliffords are dense matrices / state vectors, Boolean expressions are plain
nested tuples evaluated recursively.
"""

from __future__ import annotations

import itertools
import random
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
LETTERS = {"I": I2, "X": PX, "Y": PY, "Z": PZ}

H1 = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S1 = np.array([[1, 0], [0, 1j]], dtype=complex)
ONE_QUBIT = {"H": H1, "S": S1, "X": PX, "Y": PY, "Z": PZ}


# -- Paulis as matrices ---------------------------------------------------------------


def pauli_matrix(s: str) -> np.ndarray:
    """Matrix of a Pauli string such as ``-XZY`` (leftmost letter = qubit 0)."""
    sign = -1 if s.startswith("-") else 1
    body = s.lstrip("+-")
    return sign * reduce(np.kron, [LETTERS[c] for c in body])


def equal_up_to_phase(a: np.ndarray, b: np.ndarray) -> bool:
    idx = np.argmax(np.abs(a))
    if abs(b.flat[idx]) < 1e-9:
        return False
    ph = a.flat[idx] / b.flat[idx]
    return abs(abs(ph) - 1) < 1e-9 and np.allclose(a, ph * b)


def anticommute_bruteforce(a: str, b: str) -> int:
    A, B = pauli_matrix(a), pauli_matrix(b)
    return 0 if np.allclose(A @ B, B @ A) else 1


# -- state vectors ----------------------------------------------------------------------


def _bit(q: int, n: int) -> int:
    return 1 << (n - 1 - q)


def apply_1q(vec: np.ndarray, U: np.ndarray, q: int, n: int) -> np.ndarray:
    t = vec.reshape([2] * n)
    t = np.moveaxis(np.tensordot(U, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def apply_gate(vec: np.ndarray, gate: str, qubits: Sequence[int], n: int) -> np.ndarray:
    if gate in ONE_QUBIT:
        return apply_1q(vec, ONE_QUBIT[gate], qubits[0], n)
    a, b = qubits
    idx = np.arange(1 << n)
    ma, mb = _bit(a, n), _bit(b, n)
    if gate == "CNOT":
        src = np.where(idx & ma, idx ^ mb, idx)
        return vec[src]
    if gate == "CZ":
        return vec * np.where(((idx & ma) > 0) & ((idx & mb) > 0), -1, 1)
    raise ValueError(gate)


def apply_pauli_string(vec: np.ndarray, s: str) -> np.ndarray:
    n = len(s.lstrip("+-"))
    out = vec
    for q, c in enumerate(s.lstrip("+-")):
        if c != "I":
            out = apply_1q(out, LETTERS[c], q, n)
    return -out if s.startswith("-") else out


def zero_vector(n: int) -> np.ndarray:
    v = np.zeros(1 << n, dtype=complex)
    v[0] = 1
    return v


def stabilizer_vector(stabs: Sequence[str]) -> np.ndarray:
    """The unique state fixed by the given signed Pauli strings."""
    n = len(stabs[0].lstrip("+-"))
    dim = 1 << n
    proj = np.eye(dim, dtype=complex)
    for s in stabs:
        proj = proj @ (np.eye(dim) + pauli_matrix(s)) / 2
    for col in range(dim):
        v = proj[:, col]
        nv = np.linalg.norm(v)
        if nv > 1e-6:
            return v / nv
    raise ValueError("stabilizers admit no common +1 eigenvector")


def same_state(a: np.ndarray, b: np.ndarray) -> bool:
    return abs(abs(np.vdot(a, b)) - 1) < 1e-7


def is_stabilized(vec: np.ndarray, s: str) -> bool:
    return np.allclose(apply_pauli_string(vec, s), vec, atol=1e-7)


def all_pauli_strings(n: int, max_weight: Optional[int] = None):
    limit = n if max_weight is None else max_weight
    for w in range(limit + 1):
        for qs in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                s = ["I"] * n
                for q, c in zip(qs, letters):
                    s[q] = c
                yield w, "".join(s)


def pauli_distance_bruteforce(src: np.ndarray, dst: np.ndarray, n: int,
                              blocks: Optional[List[List[int]]] = None) -> Optional[int]:
    """Minimum (max-per-block) weight of a Pauli P with P|src> = |dst> up to phase."""
    if blocks is None:
        blocks = [list(range(n))]
    best = None
    for _, s in all_pauli_strings(n):
        if same_state(apply_pauli_string(src, s), dst):
            w = max(sum(1 for q in b if s[q] != "I") for b in blocks)
            if best is None or w < best:
                best = w
    return best


# -- Boolean expression trees -----------------------------------------------------------

# Tree shapes: ("c", bit) | ("v", name) | ("not", t) | ("and", t, ...) | ("or", t, ...) | ("xor", t, ...)


def random_tree(rng: random.Random, names: Sequence[str], depth: int = 4):
    if depth == 0 or rng.random() < 0.25:
        if rng.random() < 0.1:
            return ("c", rng.randint(0, 1))
        return ("v", rng.choice(names))
    op = rng.choice(["not", "and", "or", "xor", "xor"])
    if op == "not":
        return ("not", random_tree(rng, names, depth - 1))
    return (op,) + tuple(random_tree(rng, names, depth - 1) for _ in range(rng.randint(2, 3)))


def eval_tree(t, a: Dict[str, int]) -> int:
    tag = t[0]
    if tag == "c":
        return t[1]
    if tag == "v":
        return a[t[1]]
    vals = [eval_tree(c, a) for c in t[1:]]
    if tag == "not":
        return 1 - vals[0]
    if tag == "and":
        return int(all(vals))
    if tag == "or":
        return int(any(vals))
    return sum(vals) % 2


def assignments(names: Sequence[str]):
    for bits in itertools.product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))


# -- GF(2) by brute force -----------------------------------------------------------------


def gf2_rank_bruteforce(rows: Sequence[int]) -> int:
    """Rank as log2 of the size of the row span (enumerated)."""
    span = {0}
    for r in rows:
        span |= {v ^ r for v in span}
    return len(span).bit_length() - 1


# -- classical decoding table -----------------------------------------------------------


def min_weight_syndrome_table(gens: Sequence[str], t: int) -> Dict[Tuple[int, ...], str]:
    """Syndrome -> some minimum-weight Pauli string of weight <= t producing it."""
    n = len(gens[0])
    table: Dict[Tuple[int, ...], str] = {}
    for _, s in all_pauli_strings(n, t):
        syn = tuple(anticommute_letters(g, s) for g in gens)
        table.setdefault(syn, s)
    return table


def anticommute_letters(a: str, b: str) -> int:
    """Symplectic product of two unsigned strings by per-letter counting."""
    cnt = 0
    for p, q in zip(a.lstrip("+-"), b.lstrip("+-")):
        if p != "I" and q != "I" and p != q:
            cnt += 1
    return cnt % 2


def pauli_distance_scan(src: np.ndarray, dst: np.ndarray, n: int,
                        blocks: Optional[List[List[int]]] = None) -> Optional[int]:
    """Same minimum as :func:`pauli_distance_bruteforce`, scanning all 4^n Paulis
    with one Walsh-Hadamard product per X mask."""
    if blocks is None:
        blocks = [list(range(n))]
    dim = 1 << n
    idx = np.arange(dim)
    par = np.array([bin(v).count("1") & 1 for v in range(dim)])
    signs = 1 - 2 * par[np.bitwise_and.outer(idx, idx)]  # signs[zmask, basis index]
    # qubit q lives at bit n-1-q of a basis index
    bmasks = [sum(1 << (n - 1 - q) for q in b) for b in blocks]
    best = None
    for xm in range(dim):
        shifted = src[idx ^ xm]
        overlaps = np.abs(signs @ (np.conj(dst) * shifted))
        for zm in np.nonzero(np.abs(overlaps - 1) < 1e-7)[0]:
            sup = xm | int(zm)
            w = max(bin(sup & bm).count("1") for bm in bmasks)
            if best is None or w < best:
                best = w
    return best
