import random

import numpy as np
import pytest

from ftqec import symbool as sb
from ftqec.gf2_pauli import PauliOp
from ftqec.tableau import SymTableau, TableauError, conjugate_row, tensor

from oracles import assignments, is_stabilized, pauli_matrix, stabilizer_vector, ONE_QUBIT
from seqgen import concretization_holds, random_sequence, run_concrete, run_symbolic, run_vector


def gens(tab):
    return [p.to_string() for p in tab.generators()]


def signed(tab, asg=None):
    return [p.to_string() for p in tab.concretize(asg or {})]


def test_zero_state():
    t = SymTableau.zero_state(3)
    assert gens(t) == ["ZII", "IZI", "IIZ"]
    t.validate()


def test_cat_state_preparation():
    t = SymTableau.zero_state(4).apply_clifford("H", [0])
    for q in (1, 2, 3):
        t = t.apply_clifford("CNOT", [0, q])
    vec = stabilizer_vector(signed(t))
    cat = np.zeros(16, dtype=complex)
    cat[0] = cat[15] = 2 ** -0.5
    assert abs(abs(np.vdot(vec, cat)) - 1) < 1e-9
    assert t.deterministic_phase_of(PauliOp.from_string("XXXX")) is sb.FALSE
    assert t.deterministic_phase_of(PauliOp.from_string("ZIIZ")) is sb.FALSE
    assert t.deterministic_phase_of(PauliOp.from_string("XIII")) is None


@pytest.mark.parametrize("gate", ["H", "S", "X", "Y", "Z", "CNOT", "CZ"])
def test_conjugate_row_matches_matrices(gate):
    n = 2
    qubits = [0] if gate in ONE_QUBIT else [0, 1]
    if gate in ONE_QUBIT:
        U = np.kron(ONE_QUBIT[gate], np.eye(2))
    elif gate == "CNOT":
        U = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    else:
        U = np.diag([1, 1, 1, -1]).astype(complex)
    for x in range(4):
        for z in range(4):
            p = PauliOp(n, x, z)
            nx, nz, flip = conjugate_row(x, z, gate, qubits)
            q = PauliOp(n, nx, nz, flip)
            assert np.allclose(U @ pauli_matrix(p.to_string()) @ U.conj().T, pauli_matrix(q.to_string()))


def test_symbolic_error_flips_phase():
    t = SymTableau.zero_state(2)
    e = sb.var("e")
    flag, t2 = t.inject_error(0, e, sb.FALSE)
    assert flag is e
    assert t2.phases[0] is e and t2.phases[1] is sb.FALSE
    # conditional Z does nothing to a Z-basis state
    t3 = t.conditional_pauli(PauliOp.from_string("ZZ"), e)
    assert signed(t3, {"e": 1}) == ["ZI", "IZ"]


def test_measurement_random_and_deterministic():
    t = SymTableau.zero_state(2).apply_clifford("H", [0]).apply_clifford("CNOT", [0, 1])
    m = sb.var("m")
    out, prob, t2 = t.measure(0, lambda: m)
    assert out is m and prob == 0.5
    out2, prob2, _ = t2.measure(1, lambda: sb.var("unused"))
    assert out2 is m and prob2 == 1
    with pytest.raises(TableauError):
        t.measure(0)


def test_initialize_resets_to_zero():
    e = sb.var("e")
    _, t = SymTableau.zero_state(1).inject_error(0, e, sb.FALSE)
    t = t.initialize(0)
    assert signed(t, {"e": 1}) == ["Z"]
    t = SymTableau.zero_state(1).apply_clifford("H", [0]).initialize(0)
    assert signed(t) == ["Z"]


def test_from_generators_and_validate():
    t = SymTableau.from_generators([PauliOp.from_string(s) for s in ("XX", "ZZ")], [sb.var("a"), sb.FALSE])
    t.validate()
    assert signed(t, {"a": 1}) == ["-XX", "ZZ"]
    with pytest.raises(TableauError):
        SymTableau.from_generators([PauliOp.from_string(s) for s in ("XI", "ZI")])
    with pytest.raises(TableauError):
        SymTableau.from_generators([PauliOp.from_string("ZI")])


def test_restrict_and_tensor():
    bell = SymTableau.zero_state(2).apply_clifford("H", [0]).apply_clifford("CNOT", [0, 1])
    big = tensor([(bell, [1, 3])], 4)
    big.validate()
    r = big.restrict([1, 3])
    assert r is not None and sorted(gens(r)) == sorted(gens(bell))
    assert big.restrict([1]) is None
    assert gens(big.restrict([0])) == ["Z"]


def test_gate_validation():
    t = SymTableau.zero_state(2)
    with pytest.raises((TableauError, ValueError)):
        t.apply_clifford("CNOT", [0, 0])
    with pytest.raises((TableauError, ValueError)):
        t.apply_clifford("T", [0])
    with pytest.raises((TableauError, ValueError)):
        t.apply_clifford("H", [5])


def test_concretization_random_sequences():
    rng = random.Random(11)
    for i in range(400):
        n = rng.randint(1, 5)
        ops, names = random_sequence(rng, n, rng.randint(0, 6), rng.randint(1, 14))
        tab, outs = run_symbolic(ops, n)
        tab.validate()
        for asg in assignments(names):
            st, co = run_concrete(ops, n, asg)
            assert concretization_holds(tab, outs, st, co, asg), (ops, asg)


def test_concretization_against_state_vectors():
    rng = random.Random(12)
    for _ in range(120):
        n = rng.randint(1, 4)
        ops, names = random_sequence(rng, n, rng.randint(0, 4), rng.randint(1, 12))
        tab, outs = run_symbolic(ops, n)
        for asg in assignments(names):
            vec, vo = run_vector(ops, n, asg)
            assert [sb.eval_expr(o, asg) for o in outs] == vo
            for p in tab.concretize(asg):
                assert is_stabilized(vec, p.to_string())
