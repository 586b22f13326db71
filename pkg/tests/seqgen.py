"""Random Clifford/measurement sequences replayed symbolically and concretely."""

from __future__ import annotations

import random
from typing import Dict, List, Sequence

import numpy as np

from ftqec import symbool as sb
from ftqec.cqprog.stabsim import ConcreteState
from ftqec.gf2_pauli import PauliOp
from ftqec.tableau import SymTableau

from oracles import apply_gate, apply_pauli_string, eval_tree, random_tree, zero_vector

ONE_Q = ["H", "S", "X", "Y", "Z"]
TWO_Q = ["CNOT", "CZ"]


def tree_expr(t) -> sb.Expr:
    tag = t[0]
    if tag == "c":
        return sb.const(t[1])
    if tag == "v":
        return sb.var(t[1])
    kids = [tree_expr(c) for c in t[1:]]
    if tag == "not":
        return sb.not_(kids[0])
    return {"and": sb.and_, "or": sb.or_, "xor": sb.xor}[tag](*kids)


def random_sequence(rng: random.Random, n: int, n_symbols: int, length: int):
    """Ops over ``n`` qubits using at most ``n_symbols`` symbols in total.

    Measurement outcomes consume symbols; the remainder are free inputs used
    by conditional Paulis and injected errors.
    """
    n_meas = rng.randint(0, min(3, n_symbols))
    inputs = [f"s{i}" for i in range(n_symbols - n_meas)]
    ops = []
    meas_left = n_meas
    for _ in range(length):
        r = rng.random()
        if r < 0.45 or not inputs and r < 0.75:
            if n >= 2 and rng.random() < 0.4:
                a, b = rng.sample(range(n), 2)
                ops.append(("gate", rng.choice(TWO_Q), (a, b)))
            else:
                ops.append(("gate", rng.choice(ONE_Q), (rng.randrange(n),)))
        elif r < 0.75:
            if rng.random() < 0.5:
                p = "".join(rng.choice("IXYZ") for _ in range(n))
                ops.append(("cpauli", p, random_tree(rng, inputs, 2)))
            else:
                ops.append(("inject", rng.randrange(n), random_tree(rng, inputs, 1), random_tree(rng, inputs, 1)))
        elif r < 0.9 and meas_left:
            meas_left -= 1
            ops.append(("measure", rng.randrange(n), f"m{n_meas - meas_left - 1}"))
        else:
            ops.append(("init", rng.randrange(n)))
    names = inputs + [op[2] for op in ops if op[0] == "measure"]
    return ops, names


def run_symbolic(ops, n: int):
    tab = SymTableau.zero_state(n)
    outcomes = []
    for op in ops:
        kind = op[0]
        if kind == "gate":
            tab = tab.apply_clifford(op[1], op[2])
        elif kind == "cpauli":
            tab = tab.conditional_pauli(PauliOp.from_string(op[1]), tree_expr(op[2]))
        elif kind == "inject":
            _, tab = tab.inject_error(op[1], tree_expr(op[2]), tree_expr(op[3]))
        elif kind == "measure":
            name = op[2]
            out, _, tab = tab.measure(op[1], lambda name=name: sb.var(name))
            outcomes.append(out)
        else:
            tab = tab.initialize(op[1])
    return tab, outcomes


def run_concrete(ops, n: int, asg: Dict[str, int]):
    st = ConcreteState.zero(n)
    outcomes = []
    for op in ops:
        kind = op[0]
        if kind == "gate":
            st.apply_gate(op[1], op[2])
        elif kind == "cpauli":
            if eval_tree(op[2], asg):
                st.apply_pauli(PauliOp.from_string(op[1]))
        elif kind == "inject":
            if eval_tree(op[2], asg):
                st.apply_gate("X", [op[1]])
            if eval_tree(op[3], asg):
                st.apply_gate("Z", [op[1]])
        elif kind == "measure":
            out, _ = st.measure(op[1], forced=asg[op[2]])
            outcomes.append(out)
        else:
            st.reset(op[1])
    return st, outcomes


def _project(vec: np.ndarray, q: int, n: int, bit: int) -> np.ndarray:
    idx = np.arange(1 << n)
    keep = ((idx >> (n - 1 - q)) & 1) == bit
    return np.where(keep, vec, 0)


def run_vector(ops, n: int, asg: Dict[str, int]):
    """State-vector replay; random outcomes follow ``asg``, deterministic ones are read off."""
    vec = zero_vector(n)
    outcomes = []
    for op in ops:
        kind = op[0]
        if kind == "gate":
            vec = apply_gate(vec, op[1], op[2], n)
        elif kind == "cpauli":
            if eval_tree(op[2], asg):
                vec = apply_pauli_string(vec, op[1])
        elif kind == "inject":
            if eval_tree(op[2], asg):
                vec = apply_pauli_string(vec, "".join("X" if i == op[1] else "I" for i in range(n)))
            if eval_tree(op[3], asg):
                vec = apply_pauli_string(vec, "".join("Z" if i == op[1] else "I" for i in range(n)))
        elif kind in ("measure", "init"):
            q = op[1]
            p1 = np.linalg.norm(_project(vec, q, n, 1)) ** 2
            if p1 < 1e-9:
                bit = 0
            elif p1 > 1 - 1e-9:
                bit = 1
            else:
                bit = asg[op[2]] if kind == "measure" else 0
            vec = _project(vec, q, n, bit)
            vec = vec / np.linalg.norm(vec)
            if kind == "measure":
                outcomes.append(bit)
            elif bit:
                vec = apply_pauli_string(vec, "".join("X" if i == q else "I" for i in range(n)))
    return vec, outcomes


def concretization_holds(tab: SymTableau, outcomes: Sequence[sb.Expr], st: ConcreteState,
                         conc_out: Sequence[int], asg: Dict[str, int]) -> bool:
    for p in tab.concretize(asg):
        if st.expectation(p.unsigned()) != p.sign:
            return False
    return [sb.eval_expr(o, asg) for o in outcomes] == list(conc_out)


def random_clifford_tableau(rng: random.Random, n: int, depth: int) -> SymTableau:
    tab = SymTableau.zero_state(n)
    for _ in range(depth):
        if n >= 2 and rng.random() < 0.5:
            tab = tab.apply_clifford(rng.choice(TWO_Q), rng.sample(range(n), 2))
        else:
            tab = tab.apply_clifford(rng.choice(ONE_Q), [rng.randrange(n)])
    return tab


def random_distance_case(rng: random.Random, n: int, n_symbols: int = 3):
    """(ideal, terminal, blocks, symbol names); terminal = ideal hit by symbolic Paulis."""
    ideal = random_clifford_tableau(rng, n, 4 * n)
    names = [f"e{i}" for i in range(n_symbols)]
    term = ideal
    for _ in range(rng.randint(1, 4)):
        p = "".join(rng.choice("IIXYZ") for _ in range(n))
        term = term.conditional_pauli(PauliOp.from_string(p), tree_expr(random_tree(rng, names, 2)))
    if n >= 2 and rng.random() < 0.4:
        cut = rng.randint(1, n - 1)
        perm = rng.sample(range(n), n)
        blocks = [sorted(perm[:cut]), sorted(perm[cut:])]
    else:
        blocks = [list(range(n))]
    return ideal, term, blocks, names
