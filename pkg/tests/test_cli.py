import json
from importlib import resources

import jsonschema
import pytest

from ptcobordism.cli import ResultCache, main
from ptcobordism.toric3 import load_and_validate


def _schema(name):
    return json.loads(resources.files("ptcobordism").joinpath("schemas", name).read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_chern_number(capsys):
    code, out, _ = run(capsys, "chern-number", "p1xp2", "--beta", "fiber", "--n", "1", "--index", "0,1")
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, _schema("chern_number.schema.json"))
    assert doc["value"] == "3"
    assert "created" not in out


def test_partition_function(capsys):
    code, out, _ = run(
        capsys, "partition-function", "p1xp2", "--beta", "fiber", "--index", "2", "--nmax", "12",
        "--fit", "--check-symmetry", "--check-poles",
    )
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, _schema("partition_function.schema.json"))


def test_rerun_byte_identical(capsys, tmp_path):
    argv = ["partition-function", "p3", "--beta", "line", "--nmax", "6", "--cache", str(tmp_path)]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    _, third, _ = run(capsys, *argv[:-2])
    assert first == second == third


def test_cache_roundtrip_and_corruption(tmp_path):
    cache = ResultCache(tmp_path)
    calls = []

    def compute():
        calls.append(1)
        return {"x": "1/2"}

    parts = {"kind": "t", "n": 1}
    assert cache.fetch(parts, compute) == {"x": "1/2"}
    assert cache.fetch(parts, compute) == {"x": "1/2"}
    assert len(calls) == 1 and cache.hits == 1
    path = next(tmp_path.rglob("*.json"))
    entry = json.loads(path.read_text())
    entry["payload"] = {"x": "7"}
    path.write_text(json.dumps(entry))
    assert cache.fetch(parts, compute) == {"x": "1/2"}
    path.write_text("{not json")
    assert cache.fetch(parts, compute) == {"x": "1/2"}
    assert len(calls) == 3


def test_cache_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("PTCOBORDISM_CACHE", str(tmp_path))
    run(capsys, "chern-number", "p3", "--beta", "line", "--n", "1", "--index", "4")
    assert list(tmp_path.rglob("*.json"))


def test_usage_errors(capsys):
    for argv in (
        ["chern-number", "p3", "--beta", "line", "--n", "1"],
        ["chern-number", "p3", "--beta", "line", "--n", "1", "--index", "4", "--specializations", "1"],
        ["partition-function", "p3", "--beta", "line", "--nmax", "6", "--holdout", "1"],
    ):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_engine_errors(capsys):
    code, out, err = run(capsys, "chern-number", "p3", "--beta", "line", "--n", "1", "--index", "9")
    assert code == 1 and out == ""
    jsonschema.validate(json.loads(err), _schema("error.schema.json"))
    code, _, err = run(capsys, "chern-number", "p1xp2", "--beta", "2*fiber", "--n", "3", "--index", "8")
    assert code == 1
    assert json.loads(err)["error"] == "EngineUnavailable"


def test_nonisolated_exit_code(capsys):
    code, _, err = run(capsys, "fixed-points", "p3", "--beta", "3*line", "--n", "2", "--enable-ptvertex")
    assert code == 3
    assert json.loads(err)["error"] == "NonIsolatedFixedLocus"


def test_validate_broken_geometry(capsys, tmp_path):
    code, out, _ = run(capsys, "geometry", "validate", "p1p1p1")
    assert code == 0
    src = load_and_validate("p1p1p1").to_json()
    # nu' must equal nu - m u0; break that on one edge
    src["edges"][0]["nuprime"][0] = [5, 5, 5]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(src))
    code, _, err = run(capsys, "geometry", "validate", str(bad))
    assert code == 1
    payload = json.loads(err)
    jsonschema.validate(payload, _schema("error.schema.json"))
    assert payload["error"] == "ValidationError"


def test_csv(capsys):
    code, out, _ = run(
        capsys, "chern-number", "p3", "--beta", "line", "--n", "1", "--index", "4", "--format", "csv"
    )
    assert code == 0
    rows = dict(line.split(",", 1) for line in out.strip().splitlines()[1:])
    assert rows["value"] == "512"


def test_other_commands(capsys):
    code, out, _ = run(capsys, "cobordism-class", "p3", "--beta", "line", "--n", "1")
    assert code == 0 and json.loads(out)
    code, out, _ = run(capsys, "smooth-class", "p3")
    assert code == 0 and json.loads(out)
    code, out, _ = run(capsys, "descendents", "p3", "--chk", "1")
    assert code == 0
    assert "tau[0,0](1)" in out
