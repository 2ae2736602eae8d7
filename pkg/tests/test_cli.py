import csv
import io
import json
import os
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from cyclosieve.cli import run

SCHEMA = json.loads(resources.files("cyclosieve").joinpath("data/output.schema.json").read_text())


def _run(capsys, argv):
    code = run(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, argv, expect_code=0):
    code, out, err = _run(capsys, argv)
    assert code == expect_code, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return doc


# every command with representative flags, with its expected exit code
COMMANDS = [
    (["cyclo", "phi", "--m", "5", "--a", "3", "--b", "1"], 0),
    (["cyclo", "order", "--a", "2", "--q", "11"], 0),
    (["symbol", "--p", "5", "--q", "11", "--n", "5", "--alpha", "2"], 0),
    (["symbol", "--p", "5", "--q", "7", "--n", "3", "--alpha-coeffs", "1,2,0,3"], 0),
    (["criterion", "main", "--p", "5", "--q", "31", "--u", "1", "--v", "3"], 1),
    (["criterion", "main", "--p", "5", "--q", "31", "--n", "3", "--exclude-last"], None),
    (["criterion", "special", "--p", "5", "--q", "11", "--u", "3", "--v", "1"], 1),
    (["criterion", "twisted", "--p", "5", "--q", "31", "--n", "30", "--m", "1"], 0),
    (["criterion", "twisted", "--p", "7", "--q", "29", "--n", "28"], 0),
    (["criterion", "audit", "--p", "5", "--u", "3", "--v", "1", "--q", "11"], 1),
    (["criterion", "audit", "--p", "5", "--u", "3", "--v", "1", "--q", "3,11", "--q", "31"], 1),
    (["survey", "even-order", "--p", "491", "--bound", "491", "--compare", "paper"], 0),
    (["survey", "hypothesis", "--p", "5", "--q", "31"], 0),
    (["survey", "rank", "--p", "5", "--n", "12", "--trials", "20", "--q", "61"], 0),
    (["survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "200", "--format", "json"], 0),
    (["survey", "scan", "--p", "5", "--qmin", "3", "--qmax", "200", "--mode", "special-auto", "--format", "json"], 0),
    (["bounds", "--p", "5"], 0),
    (["bounds", "--p", "9973", "--no-regularity"], 0),
]


@pytest.mark.parametrize("argv,code", COMMANDS, ids=[" ".join(a[:2]) + f"-{i}" for i, (a, _) in enumerate(COMMANDS)])
def test_json_output_validates(capsys, argv, code):
    rc, out, err = _run(capsys, argv)
    if code is not None:
        assert rc == code, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["schema_version"] == 1
    assert doc["command"] == " ".join(a for a in argv[:2] if not a.startswith("--"))


@pytest.mark.parametrize("argv,code", COMMANDS[:6] + COMMANDS[9:14])
def test_determinism(capsys, argv, code):
    _, a, _ = _run(capsys, argv)
    _, b, _ = _run(capsys, argv)
    assert a == b


def test_audit_example(capsys):
    doc = _json(capsys, ["criterion", "audit", "--p", "5", "--u", "3", "--v", "1", "--q", "11", "--format", "json"], 1)
    entry = doc["result"]["dossier"][0]
    assert entry["first_violation"] == "special-n-p: q^f = 1 mod p^2"
    assert entry["verdicts"][0]["aux"]["q^f mod p^2"] == 11


def test_bounds_example(capsys):
    doc = _json(capsys, ["bounds", "--p", "5"])
    assert abs(doc["result"]["minkowski"] - 1.699) < 1e-3
    assert doc["result"]["regular"] is True


def test_even_order_compare(capsys):
    doc = _json(capsys, ["survey", "even-order", "--p", "491", "--bound", "491", "--compare", "paper"])
    res = doc["result"]
    assert res["primes"][:11] == [2, 7, 19, 23, 29, 47, 53, 59, 67, 73, 89]
    assert res["comparison"]["published_duplicates"] == [193, 439]
    code, _, err = _run(capsys, ["survey", "even-order", "--p", "5", "--bound", "50", "--compare", "paper"])
    assert code == 2 and "embedded list" in err


def test_big_numbers_are_strings(capsys):
    doc = _json(capsys, ["cyclo", "phi", "--m", "7", "--a", "10000000000", "--b", "3"])
    # Phi_7(a, b) = sum a^(6-i) b^i
    assert doc["result"]["value"] == str(sum((10**10) ** (6 - i) * 3**i for i in range(7)))
    doc = _json(capsys, ["symbol", "--p", "5", "--q", "7", "--n", "3", "--alpha", "2"])
    assert isinstance(doc["result"]["params"]["kappa"], str)


def test_symbol_example(capsys):
    doc = _json(capsys, ["symbol", "--p", "5", "--q", "11", "--u", "1", "--v", "3", "--alpha", "2"])
    assert doc["result"]["context"]["z"] == 3 and doc["result"]["mu"] == 4


def test_twisted_scan_lists_m(capsys):
    doc = _json(capsys, ["criterion", "twisted", "--p", "5", "--q", "31", "--n", "30"])
    assert doc["result"]["verdicts"] == []
    assert all(1 <= m <= 4 for m in doc["result"]["passing_m"])


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["bounds"],
    ["bounds", "--p", "5", "--nope"],
    ["bounds", "--p", "4"],
    ["symbol", "--p", "5", "--q", "5", "--n", "1", "--alpha", "2"],
    ["symbol", "--p", "5", "--q", "11", "--n", "5", "--alpha", "0"],
    ["symbol", "--p", "5", "--q", "11", "--n", "5"],
    ["symbol", "--p", "5", "--q", "11", "--alpha", "2"],
    ["criterion", "main", "--p", "5", "--q", "11", "--n", "10"],
    ["criterion", "special", "--p", "5", "--q", "31", "--n", "3"],
    ["criterion", "twisted", "--p", "5", "--q", "31", "--n", "30", "--m", "5"],
    ["survey", "scan", "--p", "5", "--qmin", "50", "--qmax", "10"],
    ["survey", "rank", "--p", "5", "--n", "12", "--trials", "2"],
    ["cyclo", "phi", "--m", "0", "--a", "2"],
    ["bounds", "--p", "5", "--workers", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = _run(capsys, argv)
    assert code == 2
    assert out == ""
    assert err.strip().splitlines()[-1].startswith("cyclosieve: error:")


def test_human_and_csv(capsys):
    code, out, _ = _run(capsys, ["bounds", "--p", "5", "--format", "human"])
    assert code == 0 and "minkowski: 1.69" in out
    code, out, _ = _run(capsys, ["survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "100", "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and rows[0]["p"] == "5"
    assert {r["holds"] for r in rows} <= {"true", "false"}
    code, out, _ = _run(capsys, ["criterion", "audit", "--p", "5", "--u", "3", "--v", "1", "--q", "11,31", "--format", "csv"])
    assert out.splitlines()[0] == "q,status,first_violation"


def test_scan_jsonl_stream(capsys):
    code, out, err = _run(capsys, ["survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "100"])
    assert code == 0
    recs = [json.loads(x) for x in out.splitlines()]
    assert recs and all(r["p"] == 5 for r in recs)
    assert err.startswith("scan:")


def test_workers_env(capsys, monkeypatch):
    argv = ["survey", "scan", "--p", "5", "--qmin", "7", "--qmax", "300"]
    _, a, _ = _run(capsys, argv)
    monkeypatch.setenv("CYCLOSIEVE_WORKERS", "3")
    _, b, _ = _run(capsys, argv)
    assert a == b
    monkeypatch.setenv("CYCLOSIEVE_WORKERS", "zero")
    code, _, err = _run(capsys, argv)
    assert code == 2 and "CYCLOSIEVE_WORKERS" in err


def test_console_script_exit_codes():
    env = dict(os.environ)
    ok = subprocess.run([sys.executable, "-m", "cyclosieve", "bounds", "--p", "5"], capture_output=True, text=True, env=env)
    assert ok.returncode == 0 and json.loads(ok.stdout)["command"] == "bounds"
    bad = subprocess.run([sys.executable, "-m", "cyclosieve", "--frobnicate"], capture_output=True, text=True, env=env)
    assert bad.returncode == 2 and "usage:" in bad.stderr
