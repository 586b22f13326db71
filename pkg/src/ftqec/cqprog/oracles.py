"""Concrete implementations of the classical oracles."""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Dict, List, Sequence, Tuple

from ..gf2_pauli import GF2Matrix, PauliOp, iter_paulis, syndrome
from .ast import OracleSpec


def lookup_table(gens: Sequence[PauliOp], t: int) -> Dict[int, PauliOp]:
    """Minimum-weight Pauli for every syndrome reachable with weight <= t.

    Ties are broken by enumeration order (weight, then qubit support, then XYZ).
    """
    return dict(_lookup_cached(tuple((g.n, g.x, g.z) for g in gens), t))


@lru_cache(maxsize=64)
def _lookup_cached(key: Tuple, t: int) -> Tuple:
    gens = [PauliOp(n, x, z) for n, x, z in key]
    n = gens[0].n
    g = GF2Matrix.from_paulis(gens, n)
    table: Dict[int, PauliOp] = {}
    for p in iter_paulis(n, t):
        s = syndrome(g, p)
        if s not in table:
            table[s] = p
    return tuple(table.items())


def pauli_to_bits(p: PauliOp) -> Tuple[int, ...]:
    return tuple(((p.x >> i) & 1) for i in range(p.n)) + tuple(((p.z >> i) & 1) for i in range(p.n))


def bits_to_pauli(bits: Sequence[int]) -> PauliOp:
    n = len(bits) // 2
    x = sum(1 << i for i in range(n) if bits[i])
    z = sum(1 << i for i in range(n) if bits[n + i])
    return PauliOp(n, x, z)


def concrete_oracle(spec: OracleSpec) -> Callable[[Sequence[int]], Tuple[int, ...]]:
    if spec.kind == "decoder":
        table = lookup_table(spec.params["gens"], spec.params["t"])
        n = spec.n
        ident = tuple([0] * (2 * n))

        def dec(args: Sequence[int]) -> Tuple[int, ...]:
            s = sum(1 << j for j, b in enumerate(args) if b)
            p = table.get(s)
            return ident if p is None else pauli_to_bits(p)

        return dec
    if spec.kind == "majority":
        k = spec.params["k"]

        def maj(args: Sequence[int]) -> Tuple[int, ...]:
            return (1 if 2 * sum(args) > k else 0,)

        return maj
    if spec.kind == "table":
        table = spec.params["table"]
        zero = tuple([0] * spec.out_width)

        def tab(args: Sequence[int]) -> Tuple[int, ...]:
            return tuple(table.get(tuple(int(a) for a in args), zero))

        return tab
    raise ValueError(f"unknown oracle kind {spec.kind!r}")
