import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from ftqec import symbool as sb

from oracles import assignments, eval_tree, random_tree

NAMES = ["a", "b", "c", "d"]


def build(t):
    tag = t[0]
    if tag == "c":
        return sb.const(t[1])
    if tag == "v":
        return sb.var(t[1])
    kids = [build(c) for c in t[1:]]
    if tag == "not":
        return sb.not_(kids[0])
    return {"and": sb.and_, "or": sb.or_, "xor": sb.xor}[tag](*kids)


def test_hash_consing_gives_identity():
    a, b = sb.var("a"), sb.var("b")
    assert sb.xor(a, b) is sb.xor(b, a)
    assert sb.and_(a, b, a) is sb.and_(b, a)
    assert sb.var("a") is a


def test_constant_folding():
    a = sb.var("a")
    assert sb.xor(a, a) is sb.FALSE
    assert sb.xor(a, 1) is sb.not_(a)
    assert sb.not_(sb.not_(a)) is a
    assert sb.and_(a, sb.not_(a)) is sb.FALSE
    assert sb.or_(a, sb.not_(a)) is sb.TRUE
    assert sb.and_(a, 0) is sb.FALSE and sb.or_(a, 1) is sb.TRUE
    assert sb.and_() is sb.TRUE and sb.or_() is sb.FALSE


def test_operator_overloads():
    a, b = sb.var("a"), sb.var("b")
    assert (a ^ b) is sb.xor(a, b)
    assert (a & b) is sb.and_(a, b)
    assert (a | b) is sb.or_(a, b)
    assert (~a) is sb.not_(a)


def test_random_trees_match_truth_tables():
    rng = random.Random(7)
    for _ in range(500):
        t = random_tree(rng, NAMES, depth=4)
        e = build(t)
        for asg in assignments(NAMES):
            assert sb.eval_expr(e, asg) == eval_tree(t, asg)


def test_simplify_is_idempotent_and_sound():
    rng = random.Random(8)
    for _ in range(200):
        e = build(random_tree(rng, NAMES, depth=5))
        s = sb.simplify(e)
        assert sb.simplify(s) is s
        for asg in assignments(NAMES):
            assert sb.eval_expr(s, asg) == sb.eval_expr(e, asg)


def test_substitute_matches_composed_evaluation():
    rng = random.Random(9)
    for _ in range(200):
        t = random_tree(rng, NAMES, depth=4)
        repl = {"a": random_tree(rng, ["c", "d"], depth=2)}
        e = sb.substitute(build(t), {"a": build(repl["a"])})
        for asg in assignments(["b", "c", "d"]):
            full = dict(asg, a=eval_tree(repl["a"], asg))
            assert sb.eval_expr(e, asg | {"a": 0}) == eval_tree(t, full)


def test_as_affine():
    a, b = sb.var("a"), sb.var("b")
    assert sb.as_affine(sb.xor(a, b, 1)) == (1, frozenset({"a", "b"}))
    assert sb.as_affine(sb.const(0)) == (0, frozenset())
    assert sb.as_affine(sb.and_(a, b)) is None


def test_symbols_collects_names():
    e = sb.or_(sb.xor(sb.var("p"), sb.var("q")), sb.and_(sb.var("r"), sb.var("p")))
    assert sb.symbols(e) == {"p", "q", "r"}


def test_deep_xor_chain_does_not_recurse():
    e = sb.FALSE
    for i in range(5000):
        e = sb.and_(sb.or_(e, sb.var(f"v{i}")), sb.var(f"w{i}"))
    asg = {f"v{i}": 0 for i in range(5000)} | {f"w{i}": 1 for i in range(5000)}
    asg["v4999"] = 1
    assert sb.eval_expr(e, asg) == 1
    assert len(sb.to_str(sb.xor(*[sb.var(f"v{i}") for i in range(50)]))) > 0


@pytest.mark.parametrize("n", range(0, 7))
def test_threshold_constraints_exhaustive(n):
    names = [f"x{i}" for i in range(n)]
    terms = [sb.var(x) for x in names]
    for k in range(-1, n + 2):
        ge, le = sb.at_least(k, terms), sb.at_most(k, terms)
        for asg in assignments(names):
            s = sum(asg.values())
            assert sb.eval_expr(ge, asg) == int(s >= k)
            assert sb.eval_expr(le, asg) == int(s <= k)


def test_int_comparisons():
    names = ["a", "b", "c", "d"]
    x = sb.IntExpr([sb.var("a"), sb.var("b")], 1)
    y = sb.IntExpr.of(sb.var("c")) + sb.var("d")
    ge, eq = sb.int_ge(x, y), sb.int_eq(x, y)
    for asg in assignments(names):
        xv, yv = x.value(asg), y.value(asg)
        assert sb.eval_expr(ge, asg) == int(xv >= yv)
        assert sb.eval_expr(eq, asg) == int(xv == yv)
    assert x.upper() == 3 and not x.is_const()


def test_fault_counter_example():
    # three possible faults, the second fires on two qubits but counts once
    f = sb.FaultCounter()
    f = f.add(sb.var("f1"))
    f = f.or_append([sb.var("f2a"), sb.var("f2b")])
    f = f.add(sb.var("f3"))
    assert len(f) == 3
    assert f.value({"f1": 1, "f2a": 1, "f2b": 1, "f3": 0}) == 2
    budget = f.at_most(1)
    assert sb.eval_expr(budget, {"f1": 0, "f2a": 1, "f2b": 1, "f3": 0}) == 1
    assert sb.eval_expr(budget, {"f1": 1, "f2a": 0, "f2b": 1, "f3": 0}) == 0
    assert f.add(0) is f


@settings(max_examples=100)
@given(st.lists(st.sampled_from(NAMES), min_size=0, max_size=8), st.integers(0, 5))
def test_counter_matches_sum(names, k):
    f = sb.FaultCounter(sb.var(x) for x in names)
    for asg in assignments(NAMES):
        v = sum(asg[x] for x in names)
        assert f.value(asg) == v
        assert sb.eval_expr(f.at_most(k), asg) == int(v <= k)


def test_symbol_pool_naming():
    pool = sb.SymbolPool()
    s1 = pool.fresh("fault-X", (3, "q2"))
    s2 = pool.fresh("fault-X", (3, "q2"))
    assert s1.name != s2.name
    g1 = pool.get_or_create("measurement-outcome", (5,))
    assert pool.get_or_create("measurement-outcome", (5,)) is g1
    assert g1.name in pool and pool.get(g1.name) is g1
    assert [s.name for s in pool.of_kind("fault-X")] == [s1.name, s2.name]
    with pytest.raises(ValueError):
        pool.fresh("bogus", ())
    # names are a function of the origin, so a second pool agrees
    other = sb.SymbolPool()
    assert other.fresh("fault-X", (3, "q2")).name == s1.name
