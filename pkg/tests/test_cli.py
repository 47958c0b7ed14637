import io
import json
import subprocess
import sys

import pytest

from rumin.cli import Report, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue().strip(), err.getvalue()


def test_dims_text():
    assert call("dims", "--n", "2") == (0, "1 4 5 5 4 1", "")


def test_dims_csv():
    code, out, _ = call("dims", "--n", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["k,dim_R,formula", "0,1,1", "1,2,2", "2,2,2", "3,1,1"]


def test_dims_for_a_group():
    code, out, _ = call("dims", "--group", "heisenberg:1+heisenberg:1", "--format", "csv")
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()]
    assert [r[2] for r in rows[1:]] == ["0", "0", "0", "0", "4", "4", "1"]


def test_lemma32_table():
    code, out, _ = call("lemma32", "--n", "2")
    assert code == 0
    assert out.splitlines()[0].startswith("PASS")
    assert "pairing k=2: 5x5" in out


def test_rumin_d_worked_value():
    code, out, _ = call("rumin-d", "--n", "1", "--k", "1", "--alpha", "t*th[1]")
    assert code == 0
    assert out == "d_1(t*th[1]) = -3/2*th[1,3]"


def test_rumin_d_json_records():
    code, out, _ = call("rumin-d", "--n", "1", "--alpha", "t*th[1]", "--format", "json")
    report = json.loads(out)
    names = [r["name"] for r in report["records"]]
    assert code == 0 and names == ["d_1", "lift uniqueness", "d_2 d_1 = 0"]
    assert report["records"][1]["witness"]["kernel_dim"] == "0"


def test_chain_check_pass():
    code, out, _ = call("chain-check", "--n", "1", "--map", "shear:j=1,p=x^2", "--k", "1",
                        "--alpha", "t*th[1]", "--trials", "5")
    assert (code, out) == (0, "PASS residual=0 (5/5)")


@pytest.mark.parametrize("command,extra", [
    ("j-check", ["--k", "2"]),
    ("weak-check", ["--k", "0"]),
    ("chain-check", ["--k", "2"]),
])
def test_random_trials_pass(command, extra):
    code, out, _ = call(command, "--n", "1", "--trials", "4", "--seed", "7", *extra)
    assert code == 0 and out == "PASS residual=0 (4/4)"


def test_perturbed_gamma_fails_with_witness():
    code, out, _ = call("weak-check", "--n", "1", "--k", "1", "--alpha", "t*th[1]",
                        "--gamma", "th[1,3]", "--trials", "5")
    assert code == 1
    assert out.startswith("FAIL residual=")
    assert "  eta: " in out and "  residual: " in out


def test_pansu_numeric():
    code, out, _ = call("pansu-numeric", "--n", "1", "--map", "shear:j=1,p=x^2", "--point", "1/2,1,0")
    assert code == 0
    assert out.splitlines()[0] == "PASS D_P f(1/2,1,0) = H=[1,0;1,1] lam=1"


def test_pansu_numeric_linear_map_is_exact():
    code, out, _ = call("pansu-numeric", "--map", "dilate:3", "--point", "1,1,1")
    assert code == 0 and "order exact" in out


def test_json_round_trip_is_byte_identical():
    _, out, _ = call("lemma32", "--n", "1", "--format", "json")
    assert Report.from_json(out).to_json() == out


@pytest.mark.parametrize("argv", [
    ["dims"],
    ["dims", "--n", "0"],
    ["rumin-d", "--n", "1"],
    ["rumin-d", "--n", "1", "--alpha", "th[1"],
    ["rumin-d", "--n", "1", "--alpha", "th[1,2]"],
    ["rumin-d", "--n", "1", "--alpha", "th[1]", "--k", "2"],
    ["j-check", "--n", "1", "--alpha", "th[1,2]"],
    ["j-check", "--n", "1", "--k", "1"],
    ["chain-check", "--n", "1", "--k", "1", "--box", "[0,1]"],
    ["chain-check", "--n", "1", "--k", "1", "--map", "dilate:0"],
    ["pansu-numeric", "--n", "1", "--map", "identity", "--point", "1,2"],
    ["weak-check", "--n", "1", "--k", "1", "--format", "csv"],
    ["dims", "--group", "nilpotent:9"],
    ["no-such-command"],
])
def test_malformed_input_exits_2(argv):
    code, _, err = call(*argv)
    assert code == 2
    assert "error" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rumin.cli", "dims", "--n", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "1 2 2 1"
