"""Built-in stabilizer codes and the ``.stab`` code file format.

Qubit indices are 0-based in code; Pauli strings list qubit 0 first.

Layouts:

* ``color_7_1_3``: the Steane/color code with faces {1,2,3,4}, {2,3,5,6},
  {3,4,5,7} (1-based) and Z_L = Z1 Z2 Z6.
* ``rsc_*``: rotated surface code on a d x d grid, qubit (r, c) -> r*d + c.
  Plaquette (r, c) with corners (r..r+1, c..c+1) is X-type when r + c is
  even and Z-type otherwise; weight-2 X plaquettes sit on the top and bottom
  edges, weight-2 Z plaquettes on the left and right edges.  Z_L is the
  first row, X_L the first column.
* ``toric_*``: L x L torus, horizontal edge (i, j) -> i*L + j, vertical edge
  (i, j) -> L*L + i*L + j.  Stars are X-type, plaquettes Z-type; the last of
  each is dropped.
* ``rm_15_1_3``: quantum Reed-Muller code on the nonzero vectors of GF(2)^4.
* ``color_17_1_5``: triangular 4.8.8 color code (one octagon, seven
  weight-4 faces).  Qubits 0, 1, 2 are the corners; the three sides are
  {0,1,3,4,5}, {1,2,6,7,8}, {2,0,9,10,11}; 12..16 are interior.  Z_L and X_L
  run along the first side.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .gf2_pauli import GF2Matrix, PauliOp, anticommute_bits, commutes, rank


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class StabilizerCode:
    name: str
    n: int
    k: int
    d: int
    generators: Tuple[PauliOp, ...]
    logical_z: Tuple[PauliOp, ...]
    logical_x: Tuple[PauliOp, ...]

    @property
    def t(self) -> int:
        return (self.d - 1) // 2

    @property
    def is_css(self) -> bool:
        return all(g.x == 0 or g.z == 0 for g in self.generators)

    def check_matrix(self) -> GF2Matrix:
        return GF2Matrix.from_paulis(self.generators, self.n)

    def x_generators(self) -> List[PauliOp]:
        return [g for g in self.generators if g.z == 0]

    def z_generators(self) -> List[PauliOp]:
        return [g for g in self.generators if g.x == 0]

    def validate(self, check_distance: bool = False) -> None:
        gens = list(self.generators)
        n = self.n
        if len(gens) != n - self.k:
            raise CodeError(f"{self.name}: expected {n - self.k} generators, got {len(gens)}")
        for g in gens + list(self.logical_z) + list(self.logical_x):
            if g.n != n:
                raise CodeError(f"{self.name}: operator on wrong number of qubits")
        for a, b in itertools.combinations(gens, 2):
            if commutes(a, b):
                raise CodeError(f"{self.name}: generators {a} and {b} anticommute")
        if rank(GF2Matrix.from_paulis(gens, n)) != len(gens):
            raise CodeError(f"{self.name}: generators are dependent")
        if len(self.logical_z) != self.k or len(self.logical_x) != self.k:
            raise CodeError(f"{self.name}: need {self.k} logical Z and X operators")
        for L in list(self.logical_z) + list(self.logical_x):
            for g in gens:
                if commutes(L, g):
                    raise CodeError(f"{self.name}: logical {L} anticommutes with generator {g}")
        for i, zi in enumerate(self.logical_z):
            for j, xj in enumerate(self.logical_x):
                if commutes(zi, xj) != (1 if i == j else 0):
                    raise CodeError(f"{self.name}: logical pairing broken at ({i},{j})")
        for i, j in itertools.combinations(range(self.k), 2):
            if commutes(self.logical_z[i], self.logical_z[j]) or commutes(self.logical_x[i], self.logical_x[j]):
                raise CodeError(f"{self.name}: logical operators of one type must commute")
        full = GF2Matrix.from_paulis(gens + list(self.logical_z) + list(self.logical_x), n)
        if rank(full) != len(gens) + 2 * self.k:
            raise CodeError(f"{self.name}: logical operators not independent of stabilizers")
        if check_distance:
            d = code_distance(self)
            if d != self.d:
                raise CodeError(f"{self.name}: distance is {d}, declared {self.d}")


def code_distance(code: StabilizerCode, max_weight: Optional[int] = None) -> int:
    """Exhaustive minimum weight of a nontrivial logical operator."""
    n = code.n
    limit = max_weight if max_weight is not None else n
    gens = list(code.generators)
    stab_rank = len(gens)
    stab_rows = [g.vector() for g in gens]

    def nontrivial_logical(x: int, z: int) -> bool:
        for g in gens:
            if anticommute_bits(x, z, g.x, g.z):
                return False
        v = x | (z << n)
        return rank(GF2Matrix(stab_rows + [v], 2 * n)) > stab_rank

    if code.is_css:
        xg = [g.x for g in code.x_generators()]
        zg = [g.z for g in code.z_generators()]
        best = None
        for kind in ("X", "Z"):
            other = zg if kind == "X" else xg
            own = xg if kind == "X" else zg
            own_rank = rank(GF2Matrix(own, n)) if own else 0
            for w in range(1, limit + 1):
                if best is not None and w >= best:
                    break
                hit = False
                for sup in itertools.combinations(range(n), w):
                    v = 0
                    for q in sup:
                        v |= 1 << q
                    if any(bin(v & o).count("1") & 1 for o in other):
                        continue
                    if rank(GF2Matrix(own + [v], n)) > own_rank:
                        hit = True
                        break
                if hit:
                    best = w
                    break
        if best is None:
            raise CodeError("no logical operator found within weight limit")
        return best
    for w in range(1, limit + 1):
        for sup in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                x = z = 0
                for q, l in zip(sup, letters):
                    if l != "Z":
                        x |= 1 << q
                    if l != "X":
                        z |= 1 << q
                if nontrivial_logical(x, z):
                    return w
    raise CodeError("no logical operator found within weight limit")


def _p(n: int, letter: str, qubits) -> PauliOp:
    return PauliOp.from_support(n, letter, qubits)


def _color_7_1_3() -> StabilizerCode:
    faces = [(0, 1, 2, 3), (1, 2, 4, 5), (2, 3, 4, 6)]
    gens = []
    for f in faces:
        gens.append(_p(7, "Z", f))
        gens.append(_p(7, "X", f))
    return StabilizerCode(
        "color_7_1_3", 7, 1, 3, tuple(gens),
        (_p(7, "Z", (0, 1, 5)),), (_p(7, "X", (0, 1, 5)),),
    )


_COLOR17_FACES = (
    (3, 5, 9, 10, 13, 14, 15, 16),
    (0, 4, 11, 12), (2, 6, 10, 15), (9, 11, 12, 16), (7, 8, 13, 14),
    (6, 8, 13, 15), (1, 5, 7, 14), (3, 4, 12, 16),
)


def _color_17_1_5() -> StabilizerCode:
    gens = []
    for f in _COLOR17_FACES:
        gens.append(_p(17, "Z", f))
        gens.append(_p(17, "X", f))
    side = (0, 1, 3, 4, 5)
    return StabilizerCode("color_17_1_5", 17, 1, 5, tuple(gens), (_p(17, "Z", side),), (_p(17, "X", side),))


def _rotated_surface(d: int) -> StabilizerCode:
    n = d * d
    xs, zs = [], []
    for r in range(-1, d):
        for c in range(-1, d):
            qs = [
                (rr * d + cc)
                for rr in (r, r + 1)
                for cc in (c, c + 1)
                if 0 <= rr < d and 0 <= cc < d
            ]
            typ = "X" if (r + c) % 2 == 0 else "Z"
            if len(qs) == 4:
                (xs if typ == "X" else zs).append(qs)
            elif len(qs) == 2:
                vertical_edge = r in (-1, d - 1)
                if vertical_edge and typ == "X":
                    xs.append(qs)
                elif not vertical_edge and typ == "Z" and c in (-1, d - 1):
                    zs.append(qs)
    gens = []
    for qs in xs:
        gens.append(_p(n, "X", qs))
    for qs in zs:
        gens.append(_p(n, "Z", qs))
    zl = _p(n, "Z", [r * d for r in range(d)])
    xl = _p(n, "X", list(range(d)))
    code = StabilizerCode(f"rsc_{n}_1_{d}", n, 1, d, tuple(gens), (zl,), (xl,))
    return _fix_logicals(code)


def _fix_logicals(code: StabilizerCode) -> StabilizerCode:
    """Swap the candidate logical row/column if the orientation is reversed."""
    zl, xl = code.logical_z[0], code.logical_x[0]
    ok = all(not commutes(zl, g) for g in code.generators)
    if not ok:
        n = code.n
        zl = PauliOp(n, 0, xl.x)
        xl = PauliOp(n, code.logical_z[0].z, 0)
    return StabilizerCode(code.name, code.n, code.k, code.d, code.generators, (zl,), (xl,))


def _toric(L: int) -> StabilizerCode:
    n = 2 * L * L

    def h(i, j):
        return (i % L) * L + (j % L)

    def v(i, j):
        return L * L + (i % L) * L + (j % L)

    stars, plaqs = [], []
    for i in range(L):
        for j in range(L):
            stars.append(_p(n, "X", [h(i, j), h(i, j - 1), v(i, j), v(i - 1, j)]))
            plaqs.append(_p(n, "Z", [h(i, j), h(i + 1, j), v(i, j), v(i, j + 1)]))
    gens = stars[:-1] + plaqs[:-1]
    # Non-contractible loops: Z on a row of horizontal edges / column of vertical
    # edges on the lattice; X on the dual loops.
    z1 = _p(n, "Z", [h(0, j) for j in range(L)])
    z2 = _p(n, "Z", [v(i, 0) for i in range(L)])
    x1 = _p(n, "X", [h(i, 0) for i in range(L)])
    x2 = _p(n, "X", [v(0, j) for j in range(L)])
    zs = [z1, z2]
    xs = [x1, x2]
    zs, xs = _pair(zs, xs, gens)
    return StabilizerCode(f"toric_{n}_2_{L}", n, 2, L, tuple(gens), tuple(zs), tuple(xs))


def _pair(zs: List[PauliOp], xs: List[PauliOp], gens) -> Tuple[List[PauliOp], List[PauliOp]]:
    """Order X candidates so that X_i anticommutes exactly with Z_i."""
    for perm in itertools.permutations(xs):
        if all(commutes(zs[i], perm[j]) == (1 if i == j else 0) for i in range(len(zs)) for j in range(len(zs))):
            return list(zs), list(perm)
    raise CodeError("cannot pair logical operators")


def _rm_15_1_3() -> StabilizerCode:
    n = 15
    vecs = list(range(1, 16))  # qubit v-1 <-> nonzero vector v
    xs = [[v - 1 for v in vecs if (v >> i) & 1] for i in range(4)]
    zs = list(xs) + [
        [v - 1 for v in vecs if (v >> i) & 1 and (v >> j) & 1] for i, j in itertools.combinations(range(4), 2)
    ]
    gens = [_p(n, "X", s) for s in xs] + [_p(n, "Z", s) for s in zs]
    return StabilizerCode(
        "rm_15_1_3", n, 1, 3, tuple(gens), (_p(n, "Z", range(n)),), (_p(n, "X", range(n)),)
    )


_BUILDERS = {
    "color_7_1_3": (_color_7_1_3, False),
    "rsc_9_1_3": (lambda: _rotated_surface(3), False),
    "toric_18_2_3": (lambda: _toric(3), False),
    "rm_15_1_3": (_rm_15_1_3, False),
    "color_17_1_5": (_color_17_1_5, True),
    "rsc_25_1_5": (lambda: _rotated_surface(5), True),
    "toric_50_2_5": (lambda: _toric(5), True),
}

LARGE_CODES = tuple(name for name, (_, large) in _BUILDERS.items() if large)


def code_names(include_large: bool = True) -> List[str]:
    return [name for name, (_, large) in _BUILDERS.items() if include_large or not large]


@lru_cache(maxsize=None)
def builtin(name: str) -> StabilizerCode:
    try:
        fn, _ = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown code {name!r}; known: {', '.join(_BUILDERS)}") from None
    code = fn()
    code.validate()
    return code


def is_large(name: str) -> bool:
    return name in LARGE_CODES


# -- .stab files --------------------------------------------------------------


def parse_stab(text: str, name: str = "custom") -> StabilizerCode:
    """Parse a code file: ``n k d`` header, generator lines, ``Z:``/``X:`` logicals."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise CodeError("empty code file")
    try:
        n, k, d = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise CodeError("first line must be 'n k d'") from None
    gens, lz, lx = [], [], []
    for line in lines[1:]:
        if line.startswith("Z:"):
            lz.append(PauliOp.from_string(line[2:].strip()))
        elif line.startswith("X:"):
            lx.append(PauliOp.from_string(line[2:].strip()))
        else:
            gens.append(PauliOp.from_string(line))
    code = StabilizerCode(name, n, k, d, tuple(gens), tuple(lz), tuple(lx))
    code.validate()
    return code


def format_stab(code: StabilizerCode) -> str:
    out = [f"# {code.name}", f"{code.n} {code.k} {code.d}"]
    out += [str(g) for g in code.generators]
    out += [f"Z: {z}" for z in code.logical_z]
    out += [f"X: {x}" for x in code.logical_x]
    return "\n".join(out) + "\n"


def load_code(spec: str) -> StabilizerCode:
    """A built-in name or a path to a ``.stab`` file."""
    if spec in _BUILDERS:
        return builtin(spec)
    import os

    if os.path.exists(spec):
        with open(spec) as fh:
            return parse_stab(fh.read(), name=os.path.splitext(os.path.basename(spec))[0])
    raise KeyError(f"unknown code {spec!r}")
