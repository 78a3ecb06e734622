import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from appellode.cli import main
from appellode.fuchsode import Lode, kato, local_exponents, lode_equal, pullback_transform, euler
from appellode.exactnum import RatFunc

T = RatFunc.t()


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_taylor_harmonic(capsys):
    code, out, _ = run(capsys, "taylor", "pFq([1,1],[2]; t)", "--order", "3", "--json")
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == 1 and obj["coefficients"] == ["1", "1/2", "1/3", "1/4"]


def test_taylor_text_and_params(capsys):
    code, out, _ = run(capsys, "taylor", "(1-t)^(-a)", "--order", "2", "--params", "a=2")
    assert code == 0 and out.strip() == "1 + 2*t + 3*t^2 + O(degree 3)"


def test_taylor_bivariate(capsys):
    code, out, _ = run(capsys, "taylor", "F2(1/3; 1/5, 1/7; 1/2, 1/3; x, y)", "--order", "1", "--json")
    obj = json.loads(out)
    assert code == 0 and obj["variables"] == ["x", "y"]
    assert obj["coefficients"] == {"0,0": "1", "1,0": "2/15", "0,1": "1/7"}


def test_eval_terminating(capsys):
    code, out, _ = run(capsys, "eval", "F2(1/3;-1,-1;-2,-2)", "--at", "1/2,1/3", "--json")
    obj = json.loads(out)
    assert code == 0 and obj["value"] == "125/108" and obj["terms"] == 4


def test_eval_non_terminating_is_usage_error(capsys):
    code, _, err = run(capsys, "eval", "F2(1/3;1/2,-1;-2,-2)", "--at", "1/2,1/3")
    assert code == 2 and "terminate" in err


def test_derive_kato_round_trip(capsys, tmp_path):
    path = tmp_path / "kato.json"
    code, out, _ = run(capsys, "derive-ode", "--system", "F4", "--params", "a=1/3,b=1/5,c1=1/7,c2=1/11",
                       "--curve", "x=t^2;y=(1-t)^2", "--json", "--output", str(path))
    assert code == 0
    obj = json.loads(out)
    L = Lode.from_json(obj["ode"])
    K = kato(F(1, 3), F(1, 5), F(1, 7), F(1, 11))
    assert obj["found"] and L.order == 3 and lode_equal(L, K)
    # re-reading the emitted file gives the same exponents and pullbacks as in-process calls
    code, out, _ = run(capsys, "exponents", "--ode", str(path), "--point", "inf", "--json")
    assert json.loads(out)["exponents"][0] == local_exponents(K, "inf").to_json()
    code, out, _ = run(capsys, "pullback", "--ode", str(path), "--phi", "t/(t-1)", "--theta", "(1,1/2)", "--json")
    assert lode_equal(Lode.from_json(json.loads(out)["ode"]), pullback_transform(K, T / (T - 1), [(1, F(1, 2))]))


def test_derive_no_ode(capsys):
    code, out, _ = run(capsys, "derive-ode", "--system", "F2", "--params", "a=1/3,b1=1/5,b2=2/7,c1=1/9,c2=3/7",
                       "--curve", "x=t;y=2-t", "--max-order", "2")
    assert code == 0 and "no ODE found within bounds" in out


def test_derive_missing_parameter(capsys):
    code, _, err = run(capsys, "derive-ode", "--system", "F4", "--params", "a=1/3", "--curve", "x=t;y=t^2")
    assert code == 2 and "b" in err


def test_exponents_builtin_all_points(capsys):
    code, out, _ = run(capsys, "exponents", "--ode", "builtin:euler:1/3,1/5,1/7")
    assert code == 0
    assert out.splitlines() == ["t = 0: {0, 6/7}", "t = 1: {-41/105, 0}", "t = inf: {1/5, 1/3}"]


def test_pullback_builtin(capsys):
    code, out, _ = run(capsys, "pullback", "--ode", "builtin:euler:A=1/3,B=1/5,C=1/7", "--phi", "t^2",
                       "--theta", "(2,-1/3)", "--json")
    M = Lode.from_json(json.loads(out)["ode"])
    assert code == 0 and lode_equal(M, pullback_transform(euler(F(1, 3), F(1, 5), F(1, 7)), T * T, [(2, F(-1, 3))]))


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "bailey-separation", "--samples", "5")
    assert code == 0
    assert out.count("PASS") == 5 and "5 passed, 0 failed" in out


def test_verify_json_deterministic(capsys):
    _, first, _ = run(capsys, "verify", "dih12", "--samples", "3", "--seed", "7", "--json")
    _, second, _ = run(capsys, "verify", "dih12", "--samples", "3", "--seed", "7", "--json")
    strip = lambda text: [{k: v for k, v in json.loads(l).items() if k != "elapsed"} for l in text.splitlines()]
    assert strip(first) == strip(second)
    assert all(r["schema"] == 1 and r["outcome"] == "pass" for r in strip(first))


def test_verify_parallel_matches_serial(capsys):
    _, serial, _ = run(capsys, "verify", "kato-ode", "--samples", "4", "--json")
    _, parallel, _ = run(capsys, "verify", "kato-ode", "--samples", "4", "--json", "--jobs", "2")
    outcomes = lambda text: [(r["sample"], r["outcome"]) for r in map(json.loads, text.splitlines())]
    assert outcomes(serial) == outcomes(parallel)


def test_verify_failure_exit_code(capsys, monkeypatch):
    import appellode.cli as cli
    from appellode.catalog import VerificationReport
    monkeypatch.setattr(cli, "_verify_task", lambda task: VerificationReport(task[0], task[1], "fail", "forced"))
    code, out, _ = run(capsys, "verify", "bailey-separation", "--samples", "1")
    assert code == 1 and "FAIL" in out


def test_verify_unknown_id(capsys):
    code, _, err = run(capsys, "verify", "no-such-record")
    assert code == 2 and "no catalog record" in err


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and len(doc["records"]) >= 40


@pytest.mark.parametrize("argv", [
    ["taylor", "F2(1;2"],
    ["taylor", "t", "--order", "x"],
    ["pullback", "--ode", "builtin:euler:1,2,1/3", "--phi", "t", "--theta", "(2,1/3"],
    ["exponents", "--ode", "/nonexistent.json"],
    ["derive-ode", "--system", "F9", "--params", "a=1", "--curve", "x=t;y=t"],
    ["nosuchcommand"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("appellode:")


def test_parse_error_has_position(capsys):
    code, _, err = run(capsys, "taylor", "pFq([1,1],[2]; t) +")
    assert code == 2 and "position" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "appellode", "taylor", "(1-t)^(-1)", "--order", "2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "1 + 1*t + 1*t^2 + O(degree 3)"
