import csv
import json

import pytest

from accrit.cli import main
from accrit.generators import cantor_curve, generate_curve
from accrit.metric import SampledCurve
from accrit.modification import CarrierSet, piecewise_injective_modification
from accrit.zigzag import ZigzagResult


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def two_point(tmp_path):
    return write(tmp_path / "f.json", {"support": [[0], [1]], "values": [0, 1], "constant": 1})


def test_extend_rows(tmp_path, two_point):
    q = write(tmp_path / "q.json", [0.5, 1.0])
    out = tmp_path / "env.csv"
    assert main(["extend", two_point, q, "--L", "2", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["x", "lower", "upper", "gap_slack"]
    assert [float(v) for v in rows[1]] == [0.5, 0.0, 1.0, 0.0]
    assert [float(v) for v in rows[2]] == [1.0, 1.0, 1.0, 0.0]


def test_extend_singleton_cone(tmp_path):
    f = write(tmp_path / "f.json", {"support": [[0]], "values": [0], "constant": 0})
    q = write(tmp_path / "q.json", [3.0])
    out = tmp_path / "env.csv"
    assert main(["extend", f, q, "--L", "1", "--out", str(out)]) == 0
    assert [float(v) for v in list(csv.reader(out.open()))[1]] == [3.0, -3.0, 3.0, 0.0]


def test_extend_malformed_json(tmp_path, two_point):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["extend", str(bad), two_point]) == 2
    assert main(["extend", str(tmp_path / "missing.json"), two_point]) == 2


def test_extend_constant_below_table(tmp_path, two_point):
    q = write(tmp_path / "q.json", [0.5])
    assert main(["extend", two_point, q, "--L", "0.5"]) == 2


def test_gen_round_trip(tmp_path):
    out = tmp_path / "c.json"
    graph = tmp_path / "c.csv"
    assert main(["gen", "cantor", "--level", "2", "--points-per-cell", "3", "--out", str(out), "--graph", str(graph)]) == 0
    assert SampledCurve.from_dict(json.loads(out.read_text())) == cantor_curve(2, 3)
    assert len(list(csv.reader(graph.open()))) == 3 * 9 + 2


def test_gen_polyline_and_snowflake(tmp_path):
    out = tmp_path / "p.json"
    assert main(["gen", "polyline", "--vertices", "[0, 1, 0, 2]", "--n", "31", "--out", str(out)]) == 0
    assert SampledCurve.from_dict(json.loads(out.read_text())) == generate_curve("polyline", vertices=[0, 1, 0, 2], n=31)
    assert main(["gen", "snowflaked", "--base", "circle", "--alpha", "0.5", "--n", "21", "--out", str(out)]) == 0
    assert SampledCurve.from_dict(json.loads(out.read_text())).space.kind == "snowflake"
    assert main(["gen", "polyline"]) == 2


def test_witness_round_trip(tmp_path):
    curve = generate_curve("polyline", vertices=[0, 1, 0, 2], n=301)
    c = write(tmp_path / "c.json", curve.to_dict())
    out, prof = tmp_path / "w.json", tmp_path / "w.csv"
    assert main(["witness", c, "--staging", "general", "--L", "1", "--theta", "0.81",
                 "--out", str(out), "--profile", str(prof)]) == 0
    doc = json.loads(out.read_text())
    res = ZigzagResult.from_dict(doc, curve)
    assert res.to_dict() == doc
    assert doc["achieved_variation"] >= 1.62 - doc["total_slack"]
    rows = list(csv.reader(prof.open()))
    assert float(rows[-1][2]) == pytest.approx(doc["achieved_variation"])


def test_witness_far_anchor(tmp_path):
    c = write(tmp_path / "c.json", generate_curve("identity", n=101).to_dict())
    f = write(tmp_path / "f.json", {"support": [[-10]], "values": [0], "constant": 0})
    out = tmp_path / "w.json"
    assert main(["witness", c, "--function", f, "--L", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["partition"] == [0.0, 1.0] and doc["values"] == [-10.0, -9.0]


def test_witness_precondition_failure(tmp_path):
    c = write(tmp_path / "c.json", generate_curve("polyline", vertices=[0, 1, 0], n=21).to_dict())
    assert main(["witness", c, "--L", "1"]) == 1


def test_modify_round_trip(tmp_path):
    curve = generate_curve("polyline", vertices=[0, 1, 0, 2], n=301)
    c = write(tmp_path / "c.json", curve.to_dict())
    out = tmp_path / "a.json"
    assert main(["modify", c, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert CarrierSet.from_dict(doc) == piecewise_injective_modification(curve)
    assert doc["ranges"] == [[0.0, 0.0], [2.0, 3.0]]


def test_analyze_and_verify(tmp_path):
    c = write(tmp_path / "c.json", cantor_curve(3, 48).to_dict())
    cert, rep, prof = tmp_path / "cert.json", tmp_path / "rep.json", tmp_path / "prof.csv"
    assert main(["analyze", c, "--epsilon", "0.9", "--n-max", "3", "--certificate", str(cert),
                 "--out", str(rep), "--profile", str(prof)]) == 0
    doc = json.loads(rep.read_text())
    assert [f["n"] for f in doc["families"]] == [1, 2, 3]
    assert main(["verify", c, str(cert)]) == 0
    tampered = json.loads(cert.read_text())
    tampered["witness"]["values"][3] += 0.1
    bad = write(tmp_path / "bad.json", tampered)
    assert main(["verify", c, bad, "--out", str(tmp_path / "v.json")]) == 1
    assert "lipschitz" in [f["kind"] for f in json.loads((tmp_path / "v.json").read_text())["failures"]]


def test_analyze_refusal_exit_status(tmp_path):
    c = write(tmp_path / "c.json", generate_curve("identity", n=101).to_dict())
    out = tmp_path / "r.json"
    assert main(["analyze", c, "--epsilon", "0.5", "--n-max", "20", "--out", str(out)]) == 1
    doc = json.loads(out.read_text())
    assert doc["refusal"]["failed"][0] == 2


def test_analyze_without_epsilon(tmp_path, capsys):
    c = write(tmp_path / "c.json", generate_curve("identity", n=101).to_dict())
    assert main(["analyze", c, "--deltas", "0.1", "0.5", "--mode", "greedy", "--out", str(tmp_path / "r.json")]) == 0
    assert "best gaps" in capsys.readouterr().out


def test_bad_theta_is_input_error(tmp_path):
    c = write(tmp_path / "c.json", generate_curve("identity", n=11).to_dict())
    assert main(["witness", c, "--theta", "1.5"]) == 2


def test_metric_check(tmp_path):
    pts = write(tmp_path / "p.json", [[0], [1], [2]])
    assert main(["metric-check", "euclidean", pts]) == 0
    m = write(tmp_path / "m.json", {"kind": "table", "matrix": [[0, 1, 5], [1, 0, 1], [5, 1, 0]], "validate": False})
    assert main(["metric-check", m, pts]) == 1


def test_metric_check_inline_descriptor(tmp_path):
    pts = write(tmp_path / "p.json", [[0, 0], [3, 4], [1, 1]])
    assert main(["metric-check", '{"kind": "euclidean", "dim": 2}', pts]) == 0
    assert main(["metric-check", "{bad", pts]) == 2
