import io
import json
import subprocess
import sys

import jsonschema
import pytest

from lipne.cli import load_schema, run

SCHEMA = load_schema()


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), stdout=out)
    doc = json.loads(out.getvalue())
    jsonschema.validate(doc, SCHEMA)
    return code, doc


def test_schema_is_valid():
    jsonschema.Draft202012Validator.check_schema(SCHEMA)
    out = io.StringIO()
    assert run(["--json-schema"], stdout=out) == 0
    assert json.loads(out.getvalue()) == SCHEMA


@pytest.mark.parametrize("argv, code, status", [
    (["plane-curve", "x^2-y^2"], 0, "NE"),
    (["plane-curve", "y^2-x^3"], 0, "NonNE"),
    (["plane-curve", "y^2-x^3", "--branches"], 0, "NonNE"),
    (["slice-test", "x^3+x^2*y+y^3*z+z^5"], 0, "NonNE"),
    (["slice-test", "x^2+y^3+z^3", "--no-shortcut"], 0, "NonNE"),
    (["slice-test", "x^2+y^2-z^3", "--attempts", "2", "--line-attempts", "2"], 2, "Inconclusive"),
    (["brieskorn", "2,3,3"], 0, "NonNE"),
    (["brieskorn", "2,2,3"], 2, "Inconclusive"),
    (["brieskorn", "2,3,4", "--coefficients", "1,-2,1/3"], 0, "NonNE"),
])
def test_verdict_commands(argv, code, status):
    c, doc = call(*argv)
    assert c == code
    assert doc["status"] == status


def test_tangent_cone():
    code, doc = call("tangent-cone", "x^2*y+z^4")
    assert code == 0 and doc["schema"] == "lipne-cone/1"


@pytest.mark.parametrize("argv", [
    ["plane-curve", "x^2+*y"],
    ["plane-curve", "x+y+z"],
    ["plane-curve", "1+x^2-y^3"],
    ["brieskorn", "2,a"],
    ["space-curve", "/nonexistent.json"],
    ["witness", "y^2-x^2"],
])
def test_errors(argv):
    code, doc = call(*argv)
    assert code == 1
    assert {"type", "message", "retryable"} <= set(doc["error"])


def test_parse_error_offset():
    _, doc = call("plane-curve", "x^2+*y")
    assert doc["error"]["type"] == "ParseError"
    assert doc["error"]["offset"] == 4


def test_space_curve_and_revalidate(tmp_path):
    _, plane = call("plane-curve", "y^2+x^4", "--vars", "x,y", "--branches")
    src = tmp_path / "b.json"
    src.write_text(json.dumps({"branches": plane["branches"]}))
    out = tmp_path / "v.json"
    code, doc = call("space-curve", str(src), "-o", str(out))
    assert code == 0 and doc["status"] == "NonNE"
    assert json.loads(out.read_text()) == doc
    code, res = call("revalidate", str(out))
    assert code == 0 and res["valid"] is True
    doc["reason"]["branches"] = [0, 0]
    out.write_text(json.dumps(doc))
    code, res = call("revalidate", str(out))
    assert code == 1 and res["valid"] is False


def test_revalidate_inconclusive(tmp_path):
    _, doc = call("brieskorn", "2,2,3")
    path = tmp_path / "i.json"
    path.write_text(json.dumps(doc))
    code, res = call("revalidate", str(path))
    assert code == 2 and res["valid"] is None


def test_witness(tmp_path):
    csv = tmp_path / "w.csv"
    code, doc = call("witness", "y^2-x^3", "--samples", "8", "--csv", str(csv))
    assert code == 0
    assert doc["conclusion"] == "RatioDiverges"
    assert len(csv.read_text().strip().splitlines()) == 9
    code, doc = call("witness", "y^2-x^2", "--allow-ne", "--samples", "8")
    assert code == 0 and doc["conclusion"] == "Bounded"


def test_witness_from_certificate(tmp_path):
    _, v = call("slice-test", "x^2+y^3+z^3", "--no-shortcut")
    path = tmp_path / "cert.json"
    path.write_text(json.dumps(v))
    code, doc = call("witness", str(path), "--samples", "8")
    assert code == 0 and doc["conclusion"] == "RatioDiverges"


def test_precision_env(monkeypatch):
    monkeypatch.setenv("LIPNE_PRECISION", "256")
    assert call("plane-curve", "y^2-x^3", "--branches")[0] == 0
    monkeypatch.setenv("LIPNE_PRECISION", "12")
    with pytest.raises(SystemExit):
        run(["plane-curve", "y^2-x^3"], stdout=io.StringIO())


def test_bad_precision_flag():
    with pytest.raises(SystemExit):
        run(["plane-curve", "y^2-x^3", "--precision", "8"], stdout=io.StringIO())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "lipne", "plane-curve", "y^2-x^2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["status"] == "NE"
