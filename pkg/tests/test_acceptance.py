"""Acceptance criteria, one check per criterion.

Each ``check_N`` returns ``(ok, detail)``.  The pytest wrappers record the
outcome so the terminal summary can print one PASS/FAIL line per criterion;
running this file directly prints the same lines.
"""

from __future__ import annotations

import os
import random
import re
import sys
import time
from typing import Dict, List, Tuple

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pytest  # noqa: E402

from ftqec import symbool as sb  # noqa: E402
from ftqec.codes import builtin, code_names, is_large  # noqa: E402
from ftqec.cqprog.ast import decoder_spec  # noqa: E402
from ftqec.cqprog.oracles import lookup_table  # noqa: E402
from ftqec.gadgets import build_measure_z, builtin_gadget  # noqa: E402
from ftqec.gf2_pauli import PauliOp  # noqa: E402
from ftqec.smt import build_decoder_assertion, check_sat_expr, distance_data, find_solver, pauli_distance  # noqa: E402
from ftqec.verifier import FAULT_TOLERANT, NOT_FAULT_TOLERANT, VerificationJob, oracle_verdict, verify  # noqa: E402

from oracles import (  # noqa: E402
    all_pauli_strings,
    anticommute_letters,
    assignments,
    is_stabilized,
    pauli_distance_scan,
    stabilizer_vector,
)
from seqgen import (  # noqa: E402
    concretization_holds,
    random_distance_case,
    random_sequence,
    run_concrete,
    run_symbolic,
    run_vector,
)

RESULTS: Dict[int, Tuple[bool, str]] = {}

CAT_LIMIT_S = 60.0
SLOWDOWN = 30

# Reported verification times in seconds (prep, cnot, meas, ec); the Reed-Muller row has EC only.
TABLE_TIMES = {
    "color_7_1_3": {"prep": 2.81, "cnot": 1.36, "meas": 3.65, "ec": 3.15},
    "rsc_9_1_3": {"prep": 2.96, "cnot": 1.27, "meas": 3.91, "ec": 3.10},
    "toric_18_2_3": {"prep": 4.42, "cnot": 2.37, "meas": 5.53, "ec": 4.51},
    "rm_15_1_3": {"ideal_ec": 4.89},
}

# Rows of the timing table that are not attempted here, with reported times.
NON_REPRODUCIBLE = [
    ("[[49,1,7]] rotated surface", "prep 250818 s, CNOT out of time, meas 82319 s, EC 435011 s"),
    ("[[25,1,5]] rotated surface CNOT", "181.72 s"),
    ("[[50,2,5]] toric CNOT", "12168.51 s"),
]

_ERR_RE = re.compile(r"(\d+) fault\(s\) leave (\d+) output error")


def _witness(v) -> Tuple[int, int, bool]:
    """(faults, output errors, replay confirmed) of a counterexample."""
    cx = v.counterexample
    m = _ERR_RE.search(cx.replay_detail)
    errors = int(m.group(2)) if m else -1
    return cx.n_faults, errors, cx.replay_ok


def _run(name_or_spec, t: int):
    spec = builtin_gadget(name_or_spec) if isinstance(name_or_spec, str) else name_or_spec
    start = time.monotonic()
    v = verify(VerificationJob(spec, t))
    return v, time.monotonic() - start


# -- 1 -------------------------------------------------------------------------------------


def check_1() -> Tuple[bool, str]:
    parts, ok = [], True
    v, dt = _run("cat4_bad", 1)
    good = v.status == NOT_FAULT_TOLERANT and v.counterexample is not None and _witness(v) == (1, 2, True)
    ok &= good and dt < CAT_LIMIT_S
    parts.append(f"4a t=1 {v.status} witness={_witness(v) if v.counterexample else None} {dt:.1f}s")
    v, dt = _run("cat4_good", 1)
    ok &= v.status == FAULT_TOLERANT and dt < CAT_LIMIT_S
    parts.append(f"4b t=1 {v.status} {dt:.1f}s")
    v, dt = _run("cat8", 2)
    ok &= v.status == FAULT_TOLERANT and dt < CAT_LIMIT_S
    parts.append(f"cat8 t=2 {v.status} {dt:.1f}s")
    v, dt = _run("cat8", 3)
    good = v.status == NOT_FAULT_TOLERANT and v.counterexample is not None and _witness(v) == (3, 4, True)
    ok &= good and dt < CAT_LIMIT_S
    parts.append(f"cat8 t=3 {v.status} witness={_witness(v) if v.counterexample else None} {dt:.1f}s")
    return ok, "; ".join(parts)


# -- 2 -------------------------------------------------------------------------------------


def check_2() -> Tuple[bool, str]:
    parts, ok = [], True
    for code, row in TABLE_TIMES.items():
        for kind, paper_s in row.items():
            v, dt = _run(f"{code}_{kind}", 1)
            limit = SLOWDOWN * paper_s
            good = v.status == FAULT_TOLERANT and dt <= limit
            ok &= good
            parts.append(f"{code}/{kind} {v.status} {dt:.1f}s<= {limit:.0f}s{'' if good else ' FAIL'}")
    return ok, "; ".join(parts)


# -- 3 -------------------------------------------------------------------------------------


def check_3() -> Tuple[bool, str]:
    v1, _ = _run("color_7_1_3_ec_bad_ordering", 1)
    v2, _ = _run(build_measure_z("rsc_9_1_3", repetitions=2), 1)
    v3, _ = _run(build_measure_z("rsc_9_1_3", repetitions=3), 1)
    ok = (v1.status == NOT_FAULT_TOLERANT and v1.counterexample.replay_ok
          and v2.status == NOT_FAULT_TOLERANT and v2.counterexample.replay_ok
          and v3.status == FAULT_TOLERANT)
    return ok, f"bad-ordering EC {v1.status}; meas x2 {v2.status}; meas x3 {v3.status}"


# -- 4 -------------------------------------------------------------------------------------


def check_4(count: int = 60) -> Tuple[bool, str]:
    from corpus import generate

    programs = generate(seed=2024, count=count)
    agree, tally, mismatches = 0, {}, []
    for label, spec, t, _text in programs:
        assert spec.program.n_qubits <= 8 and t <= 2
        sym = verify(VerificationJob(spec, t)).status
        brute, _ = oracle_verdict(spec, t)
        tally[sym] = tally.get(sym, 0) + 1
        if sym == brute:
            agree += 1
        else:
            mismatches.append(label)
    ok = agree == len(programs) and len(programs) >= 50
    return ok, f"{agree}/{len(programs)} agree {tally}" + (f" mismatches {mismatches}" if mismatches else "")


# -- 5 -------------------------------------------------------------------------------------


def check_5(count: int = 200) -> Tuple[bool, str]:
    rng = random.Random(55)
    checked = bad = 0
    for _ in range(count):
        n = rng.randint(1, 6)
        ideal, term, blocks, names = random_distance_case(rng, n)
        dd = distance_data(term, ideal, blocks)
        src = stabilizer_vector([p.to_string() for p in ideal.concretize({})])
        for asg in assignments(names):
            dst = stabilizer_vector([p.to_string() for p in term.concretize(asg)])
            checked += 1
            if pauli_distance(dd, asg) != pauli_distance_scan(src, dst, n, blocks):
                bad += 1
    return bad == 0, f"{count} tableaus, {checked} assignments, {bad} mismatches"


# -- 6 -------------------------------------------------------------------------------------


def check_6(count: int = 10_000) -> Tuple[bool, str]:
    rng = random.Random(66)
    total = bad = vec_checked = 0
    for i in range(count):
        n = rng.randint(1, 6)
        ops, names = random_sequence(rng, n, rng.randint(0, 8), rng.randint(1, 14))
        assert len(names) <= 8
        tab, outs = run_symbolic(ops, n)
        for asg in assignments(names):
            total += 1
            st, co = run_concrete(ops, n, asg)
            if not concretization_holds(tab, outs, st, co, asg):
                bad += 1
            if i % 50 == 0:
                vec, vo = run_vector(ops, n, asg)
                vec_checked += 1
                if vo != [sb.eval_expr(o, asg) for o in outs] or not all(
                        is_stabilized(vec, p.to_string()) for p in tab.concretize(asg)):
                    bad += 1
    return bad == 0, f"{count} sequences, {total} assignments ({vec_checked} also by state vector), {bad} mismatches"


# -- 7 -------------------------------------------------------------------------------------


def check_7(t: int = 1) -> Tuple[bool, str]:
    parts, ok = [], True
    for code in ("color_7_1_3", "rsc_9_1_3"):
        gens = list(builtin(code).generators)
        n = gens[0].n
        strs = [g.to_string() for g in gens]
        # reachable syndromes by enumerating every weight <= t Pauli string
        reach = {}
        for _, s in all_pauli_strings(n, t):
            syn = sum(anticommute_letters(g, s) << j for j, g in enumerate(strs))
            reach.setdefault(syn, s)
        spec = decoder_spec("dec", gens, t)
        m = [sb.var(f"m{j}") for j in range(len(gens))]
        r = [sb.var(f"r{i}") for i in range(2 * n)]
        assertion = build_decoder_assertion(spec, m, r)
        table = lookup_table(gens, t)
        sat_ok = lookup_ok = 0
        for syn in sorted(reach):
            fix = [v if (syn >> j) & 1 else sb.not_(v) for j, v in enumerate(m)]
            res = check_sat_expr([assertion] + fix)
            if res.status == "sat":
                bits = sum(res.model.get(v.value, 0) << i for i, v in enumerate(r))
                rp = PauliOp(n, bits & ((1 << n) - 1), bits >> n)
                got = sum(anticommute_letters(g, rp.to_string()) << j for j, g in enumerate(strs))
                if rp.weight() <= t and got == syn:
                    sat_ok += 1
            c = table[syn]
            asg = {v.value: (syn >> j) & 1 for j, v in enumerate(m)}
            asg |= {v.value: ((c.x | (c.z << n)) >> i) & 1 for i, v in enumerate(r)}
            lookup_ok += sb.eval_expr(assertion, asg)
        good = sat_ok == lookup_ok == len(reach)
        ok &= good
        parts.append(f"{code}: {len(reach)} syndromes, solver {sat_ok} ok, lookup {lookup_ok} ok")
    return ok, "; ".join(parts)


# -- 8 -------------------------------------------------------------------------------------


def check_8() -> Tuple[bool, str]:
    # the excluded rows are either absent (no [[49,1,7]] layout) or gated behind --large
    no_d7 = not any(builtin(c).n == 49 for c in code_names())
    gated = all(is_large(c) for c in ("rsc_25_1_5", "toric_50_2_5"))
    listed = "; ".join(f"{row} ({t})" for row, t in NON_REPRODUCIBLE)
    return no_d7 and gated, f"not reproduced, excluded from CI: {listed}; covered by criteria 4-7 instead"


CHECKS = {1: check_1, 2: check_2, 3: check_3, 4: check_4, 5: check_5, 6: check_6, 7: check_7, 8: check_8}
NEEDS_SOLVER = {1, 2, 3, 4, 7}


def _record(n: int) -> None:
    if n in NEEDS_SOLVER and find_solver() is None:
        RESULTS[n] = (False, "no SMT solver available")
        pytest.skip("no SMT solver")
    try:
        ok, detail = CHECKS[n]()
    except Exception as exc:  # report and fail, never hide
        RESULTS[n] = (False, f"error: {exc!r}")
        raise
    RESULTS[n] = (ok, detail)
    assert ok, detail


def test_criterion_1_cat_states():
    _record(1)


@pytest.mark.slow
def test_criterion_2_distance3_gadgets():
    _record(2)


def test_criterion_3_regressions():
    _record(3)


@pytest.mark.slow
def test_criterion_4_oracle_equivalence():
    _record(4)


def test_criterion_5_distance_equivalence():
    _record(5)


@pytest.mark.slow
def test_criterion_6_concretization():
    _record(6)


def test_criterion_7_decoder_soundness():
    _record(7)


def test_criterion_8_not_reproduced():
    _record(8)


def summary_lines() -> List[str]:
    return [f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'}: {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    wanted = [int(a) for a in sys.argv[1:]] or sorted(CHECKS)
    for n in wanted:
        try:
            RESULTS[n] = CHECKS[n]()
        except Exception as exc:
            RESULTS[n] = (False, f"error: {exc!r}")
        print(summary_lines()[-1] if len(RESULTS) == 1 else f"ACCEPTANCE {n} {'PASS' if RESULTS[n][0] else 'FAIL'}: {RESULTS[n][1]}", flush=True)
    sys.exit(0 if all(ok for ok, _ in RESULTS.values()) else 1)
