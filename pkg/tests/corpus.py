"""Generated small gadget programs for comparing the symbolic verifier with
exhaustive fault enumeration."""

from __future__ import annotations

import random
from typing import List, Tuple

from ftqec.codes import parse_stab
from ftqec.cqprog import parse
from ftqec.gadgets import spec_from_program

# [[4,2,2]]: small enough that two blocks fit in 8 qubits
CODE_422 = parse_stab("4 2 2\nXXXX\nZZZZ\nZ: ZZII\nZ: ZIZI\nX: XIXI\nX: XXII\n", "c422")


def _qs(qs) -> str:
    return " ".join(f"q{q}" for q in qs)


def cat_prep_text(rng: random.Random, size: int, n_checks: int) -> str:
    """Cat state on q0..q{size-1} built along a random tree, then ZZ parity
    checks on random pairs through fresh ancillas, retried until all pass."""
    order = list(range(size))
    rng.shuffle(order)
    body = [f"init q{q}" for q in range(size)]
    body.append(f"h q{order[0]}")
    for i in range(1, size):
        parent = order[rng.randrange(i)]
        body.append(f"cnot q{parent} q{order[i]}")
    flags = []
    for c in range(n_checks):
        a, b = rng.sample(range(size), 2)
        anc = size + c
        body += [f"init q{anc}", f"cnot q{a} q{anc}", f"cnot q{b} q{anc}", f"f{c} := measure q{anc}"]
        flags.append(f"!f{c}")
    cond = " && ".join(flags) if flags else "1"
    targets = ["+" + "X" * size] + ["+" + "".join("Z" if q in (i, i + 1) else "I" for q in range(size)) for i in range(size - 1)]
    lines = [f"qubits {size + n_checks}", "gadget prep", f"block {_qs(range(size))}"]
    lines += [f"target {t}" for t in targets]
    lines.append("repeat @memoryless {")
    lines += ["  " + s for s in body]
    lines.append(f"}} until ({cond})")
    return "\n".join(lines) + "\n"


def cnot_gate_text(rng: random.Random, spread: bool) -> str:
    """Transversal CNOT between two [[4,2,2]] blocks; ``spread`` inserts a
    self-cancelling CNOT pair inside one block, which lets one fault hit two qubits."""
    a, b = list(range(4)), list(range(4, 8))
    order = list(range(4))
    rng.shuffle(order)
    body = [f"cnot q{a[i]} q{b[i]}" for i in order]
    if spread:
        blk = rng.choice([a, b])
        x, y = rng.sample(blk, 2)
        pos = rng.randrange(len(body) + 1)
        body[pos:pos] = [f"cnot q{x} q{y}", f"cnot q{x} q{y}"]
    lines = ["qubits 8", "gadget gate", f"block {_qs(a)}", f"block {_qs(b)}"]
    lines += [f"ideal cnot q{a[i]} q{b[i]}" for i in range(4)]
    lines += body
    return "\n".join(lines) + "\n"


def generate(seed: int = 0, count: int = 60) -> List[Tuple[str, object, int]]:
    """(label, GadgetSpec, t) triples; at most 8 qubits, fault bound 1 or 2."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        r = rng.random()
        if r < 0.8:
            size = rng.randint(3, 6)
            checks = rng.randint(0, min(3, 8 - size))
            text = cat_prep_text(rng, size, checks)
            t = 1 if size <= 4 or rng.random() < 0.6 else 2
            code = None
        else:
            text = cnot_gate_text(rng, rng.random() < 0.5)
            t = 1
            code = CODE_422
        prog = parse(text)
        spec = spec_from_program(prog, code=code, name=f"gen{len(out)}")
        out.append((f"gen{len(out)}", spec, t, text))
    return out
