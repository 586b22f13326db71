import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ftqec.gf2_pauli import (
    GF2Matrix,
    PauliOp,
    commutes,
    iter_paulis,
    mul,
    nullspace,
    nullspace_vectors,
    rank,
    rref,
    solve,
    syndrome,
    syndrome_bits,
    weight,
)

from oracles import anticommute_bruteforce, equal_up_to_phase, gf2_rank_bruteforce, pauli_matrix

COLOR7 = ["ZZZZIII", "XXXXIII", "IZZIZZI", "IXXIXXI", "IIZZZIZ", "IIXXXIX"]


def pauli_strings(n):
    return st.tuples(st.sampled_from(["", "-"]), st.text("IXYZ", min_size=n, max_size=n)).map("".join)


# -- weight / strings -------------------------------------------------------------------


def test_weight_examples():
    assert weight(PauliOp.from_string("III")) == 0
    assert weight(PauliOp.from_string("XZY")) == 3
    assert weight(PauliOp.from_support(7, "Z", [0, 1, 5])) == 3
    assert weight(PauliOp.from_string("-XIZ")) == 2


def test_vector_representation_of_xzy():
    p = PauliOp.from_string("XZY")
    # x part then z part, qubit 0 first
    bits = [(p.x >> q) & 1 for q in range(3)] + [(p.z >> q) & 1 for q in range(3)]
    assert bits == [1, 0, 1, 0, 1, 1]


@given(pauli_strings(5))
def test_string_round_trip(s):
    assert PauliOp.from_string(s).to_string() == s


def test_from_string_rejects_bad_letters():
    with pytest.raises(ValueError):
        PauliOp.from_string("XQ")


# -- commutation ------------------------------------------------------------------------


def test_commutes_examples():
    x, z = PauliOp.from_string("X"), PauliOp.from_string("Z")
    assert commutes(x, x) == 0
    assert commutes(x, z) == 1
    assert commutes(PauliOp.from_string("ZZZZIII"), PauliOp.from_string("XXXXIII")) == 0


def test_commutes_dimension_mismatch():
    with pytest.raises(ValueError):
        commutes(PauliOp.from_string("X"), PauliOp.from_string("XX"))


@settings(max_examples=200)
@given(pauli_strings(3), pauli_strings(3))
def test_commutes_matches_matrices(a, b):
    assert commutes(PauliOp.from_string(a), PauliOp.from_string(b)) == anticommute_bruteforce(a, b)


@given(pauli_strings(6), pauli_strings(6), pauli_strings(6))
def test_commutation_is_bilinear(a, b, c):
    p, q, r = (PauliOp.from_string(s) for s in (a, b, c))
    assert commutes(p, q) == commutes(q, p)
    assert commutes(p, mul(q, r)) == commutes(p, q) ^ commutes(p, r)


# -- products ---------------------------------------------------------------------------


def test_mul_examples():
    p = PauliOp.from_string("XYZ")
    assert mul(p, PauliOp.identity(3)) == p
    zz = mul(PauliOp.from_string("Z"), PauliOp.from_string("Z"))
    assert zz.is_identity() and zz.sign == 0
    prod = mul(PauliOp.from_string("XXXXIII"), PauliOp.from_string("IXXIXXI"))
    assert prod.unsigned() == PauliOp.from_string("XIIXXXI")


@settings(max_examples=300)
@given(pauli_strings(3), pauli_strings(3))
def test_mul_matches_matrix_product_up_to_phase(a, b):
    p, q = PauliOp.from_string(a), PauliOp.from_string(b)
    r = mul(p, q)
    assert equal_up_to_phase(pauli_matrix(a) @ pauli_matrix(b), pauli_matrix(r.to_string()))
    if commutes(p, q) == 0:
        # exact, including the sign
        assert np.allclose(pauli_matrix(a) @ pauli_matrix(b), pauli_matrix(r.to_string()))


@given(pauli_strings(6), pauli_strings(6))
def test_weight_subadditive(a, b):
    p, q = PauliOp.from_string(a), PauliOp.from_string(b)
    assert weight(mul(p, q)) <= weight(p) + weight(q)


def test_iter_paulis_counts():
    assert sum(1 for _ in iter_paulis(4, 1)) == 1 + 4 * 3
    assert sum(1 for _ in iter_paulis(3, 3)) == 4 ** 3


# -- matrices ---------------------------------------------------------------------------


def test_rref_examples():
    m, rk, piv = rref(GF2Matrix.identity(4))
    assert rk == 4 and m.to_lists() == GF2Matrix.identity(4).to_lists() and piv == [0, 1, 2, 3]
    m, rk, _ = rref(GF2Matrix.from_lists([[1, 1], [1, 1]]))
    assert m.to_lists() == [[1, 1], [0, 0]] and rk == 1


def test_color7_check_matrix_rank():
    ops = [PauliOp.from_string(s) for s in COLOR7]
    m = GF2Matrix.from_paulis(ops)
    assert m.shape == (6, 14)
    assert rank(m) == 6 == gf2_rank_bruteforce(m.rows)


def random_matrix(rng, rows, cols):
    return GF2Matrix([rng.getrandbits(cols) for _ in range(rows)], cols)


def test_rref_idempotent_and_rank_bounds():
    rng = random.Random(1)
    for _ in range(200):
        r, c = rng.randint(1, 12), rng.randint(1, 12)
        m = random_matrix(rng, r, c)
        red, rk, _ = rref(m)
        assert rk <= min(r, c)
        assert rref(red)[0].to_lists() == red.to_lists()
        assert rk == gf2_rank_bruteforce(m.rows)


def test_nullspace_examples():
    assert nullspace(GF2Matrix.identity(3)).shape[1] == 0
    ns = nullspace(GF2Matrix.from_lists([[1, 1]]))
    assert ns.to_lists() == [[1], [1]]


def test_nullspace_and_solve_random():
    rng = random.Random(2)
    for _ in range(300):
        r, c = rng.randint(1, 20), rng.randint(1, 40)
        m = random_matrix(rng, r, c)
        basis = nullspace_vectors(m)
        assert len(basis) == c - rank(m)
        for b in basis:
            assert m.mul_vec(b) == 0
        x = rng.getrandbits(c)
        p = solve(m, m.mul_vec(x))
        assert p is not None and m.mul_vec(p) == m.mul_vec(x)


def test_solve_examples():
    m = GF2Matrix.from_lists([[1, 1]])
    assert solve(m, 0) == 0
    p = solve(m, 1)
    assert m.mul_vec(p) == 1
    assert solve(GF2Matrix.from_lists([[1, 0], [1, 0]]), 0b01) is None


def test_nullspace_dimension_for_25_qubit_state():
    from ftqec.codes import builtin
    from ftqec.gf2_pauli import check_matrix_lambda

    code = builtin("rsc_25_1_5")
    rows = list(code.generators) + [code.logical_z[0]]
    ml = check_matrix_lambda(GF2Matrix.from_paulis(rows, 25), 25)
    assert len(nullspace_vectors(ml)) == 25


# -- syndromes ---------------------------------------------------------------------------


def test_syndrome_examples():
    g = GF2Matrix.from_paulis([PauliOp.from_string(s) for s in COLOR7])
    assert syndrome(g, PauliOp.identity(7)) == 0
    assert syndrome_bits(g, PauliOp.single(7, 0, "X")) == [1, 0, 0, 0, 0, 0]
    assert syndrome_bits(g, PauliOp.single(7, 2, "Z")) == [0, 1, 0, 1, 0, 1]


@given(pauli_strings(7), pauli_strings(7))
def test_syndrome_is_linear(a, b):
    g = GF2Matrix.from_paulis([PauliOp.from_string(s) for s in COLOR7])
    p, q = PauliOp.from_string(a), PauliOp.from_string(b)
    assert syndrome(g, mul(p, q)) == syndrome(g, p) ^ syndrome(g, q)
    manual = 0
    for i, s in enumerate(COLOR7):
        cnt = sum(1 for u, v in zip(s, a.lstrip("-")) if u != "I" and v != "I" and u != v)
        manual |= (cnt & 1) << i
    assert syndrome(g, p) == manual
