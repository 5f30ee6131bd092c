import csv
import io
import json

import pytest

from convsep.cli import main
from convsep.config import CSV_COLUMNS, ConfigError, run_config, validate_config

INTERVAL = {"type": "hpolytope", "normals": [[1]]}
INSTANCE = {"K": dict(INTERVAL, scale=2), "B": INTERVAL, "pool": {"kind": "grid", "step": 1}}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bodies_info(capsys):
    code, out, _ = run(capsys, "bodies", "info", json.dumps(INTERVAL), "--point", "1/2")
    info = json.loads(out)
    assert code == 0 and info["gauge"] == "1/2" and info["extents"] == ["1"]


def test_bodies_polar(capsys):
    body = {"type": "ellipsoid", "Q": [[1, 0], [0, 4]]}
    code, out, _ = run(capsys, "bodies", "polar", json.dumps(body))
    polar = json.loads(out)
    assert code == 0 and polar["Q"][1][1] == pytest.approx(0.25)


def test_count(capsys):
    inst = dict(INSTANCE, quantities=["N", "Msep", "M", "Mhat", "Mtilde"])
    code, out, _ = run(capsys, "count", json.dumps(inst), "--exact")
    got = {r["quantity"]: r["lower"] for r in json.loads(out)}
    assert code == 0 and got == {"N": 2, "M_sep": 5, "M": 3, "Mhat": 5, "Mtilde": 2}


def test_count_cap_error(capsys):
    inst = dict(INSTANCE, pool={"kind": "grid", "step": "1/16"}, quantities=["Mhat"])
    code, _, err = run(capsys, "count", json.dumps(inst), "--exact")
    assert code == 2 and "cap" in err


def test_count_to_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "count", json.dumps(INSTANCE), "--out", out)
    assert code == 0 and stdout == "" and json.loads(out.read_text())[0]["quantity"] == "Mhat"


def test_duality_transform_certificate(capsys):
    cert = {"kind": "convex_separation", "K": INTERVAL, "B": INTERVAL,
            "points": [["-1"], ["0"], ["1"]], "witnesses": [["0"], ["1"], ["1"]]}
    code, out, _ = run(capsys, "duality", "transform", json.dumps(cert))
    tr = json.loads(out)
    assert code == 0 and tr["output_length"] == 2 and tr["check"]["valid"]


def test_duality_transform_instance(capsys):
    code, out, _ = run(capsys, "duality", "transform", json.dumps(INSTANCE), "--sequence-radius")
    assert code == 0 and json.loads(out)["radius_source"] == "sequence"


def test_duality_segment(capsys):
    code, out, _ = run(capsys, "duality", "segment", json.dumps({"K": INTERVAL, "B": INTERVAL}))
    assert code == 0 and json.loads(out)["length"] == 5


def test_duality_check(capsys):
    code, out, _ = run(capsys, "duality", "check", json.dumps(INSTANCE), "--full")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] and "transform" in rep


def test_duality_probe(capsys):
    code, out, _ = run(capsys, "duality", "probe", json.dumps({"K": INTERVAL, "B": INTERVAL}),
                       "--scales", "1,2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 6 and rows[0]["logN_upper"] == "0.0"


def test_experiment(capsys):
    code, out, _ = run(capsys, "experiment", "ellipsoid", "--trials", 2, "--c", "1,2")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["c"] for r in rows] == ["1", "2", "1", "2"]


def test_search_gap_reverify(capsys, tmp_path):
    code, out, _ = run(capsys, "search-gap", "--budget", 3, "--pool-size", 7, "--top", 2)
    assert code == 0
    path = tmp_path / "cands.json"
    path.write_text(out)
    code, out, _ = run(capsys, "search-gap", "--reverify", path)
    assert code == 0 and all(r["reproduced"] for r in json.loads(out))


def test_search_gap_reverify_detects_tampering(capsys, tmp_path):
    code, out, _ = run(capsys, "search-gap", "--budget", 1, "--pool-size", 6)
    cands = json.loads(out)
    cands[0]["mhat_lower"] += 1
    path = tmp_path / "cands.json"
    path.write_text(json.dumps(cands))
    assert run(capsys, "search-gap", "--reverify", path)[0] == 1


def test_verify(capsys):
    good = {"kind": "separated", "B": INTERVAL, "points": [["0"], ["1"]]}
    bad = {"kind": "convex_separation", "K": INTERVAL, "B": INTERVAL,
           "points": [["-1"], ["1"], ["0"]], "witnesses": [["0"], ["1"], ["1"]]}
    assert run(capsys, "verify", json.dumps(good))[0] == 0
    code, out, _ = run(capsys, "verify", json.dumps(bad))
    assert code != 0 and json.loads(out)["valid"] is False


def test_bad_json_input(capsys):
    code, _, err = run(capsys, "bodies", "info", json.dumps({"type": "ellipsoid", "Q": [[1, 2], [2, 1]]}))
    assert code == 2 and err.startswith("convsep: error")


# -- config runs ------------------------------------------------------------------

def interval_config(fmt="csv"):
    inst = {"id": "interval", "K": INTERVAL, "B": INTERVAL, "pool": {"kind": "grid", "step": 1}}
    return {"instances": [inst], "quantities": ["Mhat", "Msep"],
            "format": fmt}


def test_run_interval_config(capsys):
    code, out, _ = run(capsys, "run", json.dumps(interval_config()))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and tuple(rows[0]) == CSV_COLUMNS
    assert [(r["quantity"], r["lower"], r["upper"]) for r in rows] == [
        ("M_sep", "3", "3"), ("Mhat", "3", "3")]


def test_run_is_byte_identical(capsys, tmp_path):
    cfg = {"family": {"name": "mixed", "dims": [2], "seeds": {"count": 3}, "pool_size": 8},
           "quantities": ["N", "M_sep", "Mhat", "theorem"], "scales": ["1", "1/2"]}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    a = run(capsys, "run", path)
    b = run(capsys, "run", path, "--jobs", 2)
    assert a[0] == 0 and a[1] == b[1]


def test_theorem_rows_on_five_seeds():
    cfg = {"family": {"name": "polytope", "dims": [2], "seeds": [0, 1, 2, 3, 4], "pool_size": 8},
           "quantities": ["theorem"]}
    rows, ok = run_config(cfg)
    assert ok and len(rows) == 5 and all(r.verdict is True for r in rows)


def test_empty_instance_list(capsys):
    code, out, _ = run(capsys, "run", json.dumps({"instances": [], "format": "csv"}))
    assert code == 0 and out.strip() == ",".join(CSV_COLUMNS)


def test_schema_violation(capsys):
    with pytest.raises(ConfigError):
        validate_config({"instances": [], "colour": "red"})
    assert run(capsys, "run", json.dumps({"quantities": ["volume"]}))[0] == 2


def test_timing_column(capsys):
    cfg = dict(interval_config("json"), timing=True)
    code, out, _ = run(capsys, "run", json.dumps(cfg))
    assert code == 0 and all(r["runtime"] >= 0 for r in json.loads(out))
