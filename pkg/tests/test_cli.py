import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from irlogic import corpus
from irlogic.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err.strip()


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv[:1], "--format", "json", *argv[1:])
    data = json.loads(out)
    schema = json.loads(resources.files("irlogic").joinpath("schemas", argv[0] + ".json").read_text())
    jsonschema.validate(data, schema)
    assert data["exit"] == code and data["command"] == argv[0]
    return code, data["result"]


def test_taut_l1(capsys):
    assert run(capsys, "taut", "x1 -> (x2 -> x1)")[:2] == (0, "tautology")


def test_taut_countermodel(capsys):
    assert run(capsys, "taut", "x1 -> x1 (.) x1")[:2] == (1, "countermodel x1=1/2, value 1/2")


def test_good_seq(capsys):
    assert run(capsys, "good-seq", "23/10")[:2] == (0, "1, 1, 3/10")


def test_parse_round_trip(capsys):
    assert run(capsys, "parse", "x1->(x2->x1)")[:2] == (0, "x1 -> x2 -> x1")
    code, out, _ = run(capsys, "parse", "--expand", "x1 \\/ x2")
    assert code == 0 and out == "(x1 -> x2) -> x2"


def test_eval(capsys):
    assert run(capsys, "eval", "x1 -> x2", "x1=3/4", "x2=1/2")[:2] == (0, "3/4")
    assert run(capsys, "eval", "x1 -> x2", "3/4", "1/2")[:2] == (0, "3/4")


@pytest.mark.parametrize(
    "argv",
    [["parse", "x1 ->"], ["eval", "x1", "x1=0.5"], ["taut", "nab(0.5, x1)"], ["eval", "x1"],
     ["limit-check", "x1", "x1"], ["good-seq", "-1/2"], ["approx", "x1", "-m", "0"], ["nope"]],
)
def test_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and err


def test_equiv_dist_conseq(capsys):
    assert run(capsys, "equiv", "x1", "!!x1")[:2] == (0, "equivalent")
    assert run(capsys, "equiv", "x1", "!x1")[0] == 1
    assert run(capsys, "dist", "x1", "!x1")[:2] == (0, "1 at x1=0")
    assert run(capsys, "conseq", "-p", "x1", "-p", "x1 -> x2", "x2")[:2] == (0, "consequence")
    assert run(capsys, "conseq", "-p", "x1 (+) x1", "x1")[0] == 1


def test_file_input(capsys, tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("x1 -> (x2 -> x1)\n")
    assert run(capsys, "taut", f"@{f}")[:2] == (0, "tautology")
    assert run(capsys, "taut", f"@{tmp_path / 'missing'}")[0] == 2


def test_json_taut(capsys):
    code, res = run_json(capsys, "taut", "x1 -> x1 (.) x1")
    assert code == 1 and res["verdict"] is False
    assert res["witness"] == ["1/2"] and res["value"] == "1/2"


@pytest.mark.parametrize(
    "argv",
    [
        ["parse", "V{x1; !x1}"],
        ["eval", "x1 (+) x2", "x1=1/3", "x2=1/3"],
        ["taut", "x1 -> x1"],
        ["equiv", "x1 /\\ x2", "!(!x1 \\/ !x2)"],
        ["dist", "x1", "x1 (.) x1"],
        ["conseq", "-p", "x1", "x1 \\/ x2"],
        ["approx", "x1", "-m", "2", "--at", "3/10", "--show-sets"],
        ["char-family", "1/2", "--mode", "ramp_below", "--at", "3/4"],
        ["limit-check", "V[del(@s, x1); seq=complement; mono=inc]", "x1",
         "--witness", "V[del(@s, 1); seq=complement; mono=inc]", "--indices", "1..4"],
        ["good-seq", "23/10", "3/2"],
    ],
)
def test_json_outputs_validate(capsys, argv):
    code, _ = run_json(capsys, *argv)
    assert code in (0, 1)


def test_approx_value(capsys):
    code, res = run_json(capsys, "approx", "x1", "-m", "2", "--at", "3/10")
    assert res["max_error"] == "1/4" and res["value_at"] == "1/4" and res["within_bound"]


def test_limit_check_rates(capsys):
    code, res = run_json(capsys, "limit-check", "V[del(@s, x1); seq=complement; mono=inc]", "x1",
                         "--witness", "V[del(@s, 1); seq=complement; mono=inc]", "--indices", "1..3")
    assert code == 0 and res["r"] == ["1/2", "3/4", "7/8"]


@pytest.mark.parametrize("name", corpus.names())
def test_prove_check_corpus(capsys, tmp_path, name):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(corpus.load_json(name)))
    code, res = run_json(capsys, "prove-check", str(path))
    assert code == 0 and res["ok"]


def test_prove_check_rejects_mutation(capsys, tmp_path):
    data = corpus.load_json("identity")
    data["steps"][2]["refs"] = [0, 0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "prove-check", str(path))
    assert code == 1 and "rejected" in out


def test_prove_check_malformed(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(capsys, "prove-check", str(path))[0] == 2


def test_deterministic_subprocess():
    argv = [sys.executable, "-m", "irlogic.cli", "dist", "--format", "json", "x1 (+) x2", "x1 (.) x2"]
    a = subprocess.run(argv, capture_output=True)
    b = subprocess.run(argv, capture_output=True)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout
