import json
import subprocess
import sys

import pytest

from conftest import needs_solver
from ftqec.cli import main
from ftqec.cqprog import pretty
from ftqec.gadgets import builtin_gadget


def test_list_codes(capsys):
    assert main(["list-codes"]) == 0
    out = capsys.readouterr().out
    assert "color_7_1_3" in out and "toric_50_2_5" in out
    assert main(["list-codes", "--gadgets"]) == 0
    assert "cat4_bad" in capsys.readouterr().out


@needs_solver
def test_verify_exit_codes(tmp_path):
    assert main(["verify", "--builtin", "cat4_good", "--t", "1"]) == 0
    out = tmp_path / "v.json"
    assert main(["verify", "--builtin", "cat4_bad", "--t", "1", "--json", str(out)]) == 1
    data = json.loads(out.read_text())
    assert data["status"] == "not_fault_tolerant" and data["counterexample"]["faults"]


@needs_solver
def test_verify_program_file(tmp_path):
    path = tmp_path / "cat.cqp"
    path.write_text(pretty(builtin_gadget("cat4_bad").program))
    assert main(["verify", str(path), "--t", "1"]) == 1
    assert main(["oracle-check", str(path), "--budget", "1"]) == 1


@needs_solver
def test_gen_gadget_then_verify(tmp_path):
    out = tmp_path / "cnot.cqp"
    assert main(["gen-gadget", "cnot", "--code", "color_7_1_3", "-o", str(out)]) == 0
    assert main(["verify", str(out), "--t", "1"]) == 0


def test_large_codes_need_flag(capsys):
    assert main(["verify", "--builtin", "rsc_25_1_5_cnot", "--t", "2"]) == 2
    assert "--large" in capsys.readouterr().err
    assert main(["gen-gadget", "ec", "--code", "toric_50_2_5"]) == 2


def test_usage_errors_exit_2(tmp_path):
    assert main(["verify", "--builtin", "no_such_gadget", "--t", "1"]) == 2
    bad = tmp_path / "bad.cqp"
    bad.write_text("qubits 1\nfrobnicate q0\n")
    assert main(["verify", str(bad), "--t", "1"]) == 2
    with pytest.raises(SystemExit):
        main(["verify"])


@needs_solver
def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ftqec.cli", "verify", "--builtin", "cat4_good", "--t", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "fault_tolerant" in proc.stdout
