import io
import json
import subprocess
import sys

import numpy as np

from invcoarse.cli import main
from invcoarse.embed import FiniteMetricSpace
from invcoarse.metric import key_json
from invcoarse.semigroup import SymmetricInverseMonoid, enumerate_all, semigroup_to_json


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    return code, json.loads(text)


def test_green_i3():
    code, doc = run_json("green", "--family", "I3")
    assert code == 0
    assert doc["size"] == 34
    assert doc["classes"] == {"L": 8, "R": 8, "D": 4}
    assert doc["config"]["family"] == "I3"


def test_green_csv():
    code, text = run("green", "--family", "I2", "--format", "csv")
    assert code == 0
    lines = text.strip().split("\n")
    assert lines[0] == "key,L,R,D,idempotent" and len(lines) == 8


def test_green_from_input_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(semigroup_to_json(enumerate_all(SymmetricInverseMonoid(2))))
    code, doc = run_json("green", "--input", str(p))
    assert code == 0 and doc["size"] == 7


def test_infinite_family_needs_scope():
    code, _ = run("green", "--family", "bicyclic")
    assert code == 2


def test_unknown_family_and_flag():
    assert run("green", "--family", "nonsense")[0] == 2
    assert run("green", "--family", "I3", "--bogus")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("coarse", "--family", "fim1", "--scope", "4", "--scales", "a,b")[0] == 2


def test_metric_json_and_csv():
    code, doc = run_json("metric", "--family", "I3", "--scales", "1,2")
    assert code == 0
    assert doc["validation"]["subinvariance"]["violation_count"] == 0
    code, text = run("metric", "--family", "I2", "--format", "csv")
    assert code == 0 and "inf" in text


def test_metric_level_weights_on_product():
    code, doc = run_json("metric", "--family", "product(Z2,N)", "--scope", "6", "--weights", "level")
    assert code == 0
    assert doc["table"]["status"].startswith("Truncated")


def test_level_weights_rejected_for_non_product():
    assert run("metric", "--family", "I3", "--weights", "level")[0] == 2


def test_weights_file(tmp_path):
    p = tmp_path / "w.json"
    p.write_text(json.dumps([[[0, 1], 2]]))
    code, doc = run_json("metric", "--family", "bicyclic", "--scope", "4", "--weights", str(p))
    assert code == 0
    # q = (1,0) has distance 2 from the identity when p, q weigh 2
    keys = doc["table"]["elements"]
    i, j = keys.index([0, 0]), keys.index([1, 0])
    cls = next(c for c in doc["table"]["classes"] if i in c["members"])
    m = cls["members"]
    assert cls["distances"][m.index(i)][m.index(j)] == 2


def test_coarse_fim1():
    code, doc = run_json("coarse", "--family", "fim1", "--scope", "8", "--scales", "1")
    assert code == 0
    assert doc["asdim0"]["status"] == "RefutedAtScale"
    assert doc["sparse"]["statistics"]["polarity"] == "positive"
    code, text = run("coarse", "--family", "fim1", "--scope", "4", "--format", "csv")
    assert code == 0 and text.startswith("key,block,size")


def test_graph_dot_and_json():
    code, text = run("graph", "--family", "bicyclic", "--scope", "3", "--format", "dot")
    assert code == 0 and text.startswith("digraph")
    code, doc = run_json("graph", "--family", "fim1", "--scope", "2", "--element", "[-1,0,1]")
    assert code == 0 and doc["root"] == [-1, 0, 1] and len(doc["vertices"]) == 3
    assert run("graph", "--family", "fim1", "--scope", "2", "--element", "[1,0,1]")[0] == 2


def test_embed(tmp_path):
    X = FiniteMetricSpace(("a", "b", "c"), np.array([[0, 2, 3], [2, 0, 1], [3, 1, 0]]))
    p = tmp_path / "x.csv"
    p.write_text(X.to_csv())
    code, doc = run_json("embed", "--input", str(p), "--verify")
    assert code == 0
    assert doc["distances"] == X.distances.tolist()
    assert doc["distortion"]["max_excess"] == 0
    code, doc = run_json("embed", "--input", str(p), "--verify", "--exact", "--basepoint", "b")
    assert code == 0 and doc["generators"]["basepoint"] == "b"
    code, text = run("embed", "--input", str(p), "--format", "dot")
    assert code == 0 and text.startswith("graph")


def test_embed_rejects_bad_space(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,1,5\n1,0,1\n5,1,0\n")
    assert run("embed", "--input", str(p))[0] == 2
    assert run("embed")[0] == 2
    assert run("embed", "--input", str(tmp_path / "missing.csv"))[0] == 2


def test_roe_random_and_file(tmp_path):
    code, doc = run_json("roe", "--family", "I3", "--scales", "2", "--seed", "3")
    assert code == 0 and doc["passed"]
    p = tmp_path / "op.json"
    idx = list(range(34))
    # identity operator over the I3 table
    S = enumerate_all(SymmetricInverseMonoid(3))
    p.write_text(json.dumps({"indices": [key_json(S.oracle, a) for a in S.elements], "entries": [[i, i, 1, 0] for i in idx]}))
    code, doc = run_json("roe", "--family", "I3", "--input", str(p))
    assert code == 0 and doc["decomposition"]["residual"] == 0.0


def test_reports_are_deterministic():
    a = run("coarse", "--family", "bicyclic", "--scope", "6", "--scales", "1,2")
    b = run("coarse", "--family", "bicyclic", "--scope", "6", "--scales", "1,2")
    assert a == b


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "invcoarse", "green", "--family", "Z2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["classification"]["kind"] == "Group"


def test_verify_command():
    code, doc = run_json("verify", "--seed", "0")
    assert code == 0 and doc["passed"]
    assert [c["criterion"] for c in doc["criteria"]] == list(range(1, 9))
