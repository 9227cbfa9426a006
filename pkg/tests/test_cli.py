import json

import numpy as np
import pytest

from agp.cli import main
from agp.io import read_vector

EDGES = "0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n"


@pytest.fixture
def gfile(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text(EDGES)
    return p


def body(path):
    return [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]


def test_propagate_writes_vector_and_provenance(gfile, tmp_path):
    out = tmp_path / "est.txt"
    argv = ["propagate", "--graph", str(gfile), "--measure", "hkpr", "--t", "5",
            "--source", "0", "--delta", "1e-4", "--seed", "7", "--out", str(out)]
    assert main(argv) == 0
    values, head = read_vector(out)
    for key in ("command", "graph", "measure", "a", "b", "delta", "epsilon", "L", "seed",
                "push_count", "wall_time"):
        assert key in head
    assert head["seed"] == "7" and head["L"] == "28"
    assert sum(values.values()) == pytest.approx(1.0, abs=1e-6)
    again = tmp_path / "again.txt"
    assert main(argv[:-1] + [str(again)]) == 0
    assert body(out) == body(again)


def test_eval_json(gfile, tmp_path, capsys):
    gt, est = tmp_path / "gt.txt", tmp_path / "est.txt"
    assert main(["groundtruth", "--graph", str(gfile), "--measure", "hkpr", "--t", "5",
                 "--source", "0", "--out", str(gt)]) == 0
    assert main(["propagate", "--graph", str(gfile), "--measure", "hkpr", "--t", "5",
                 "--source", "0", "--delta", "1e-4", "--out", str(est)]) == 0
    capsys.readouterr()
    assert main(["eval", "--truth", str(gt), "--est", str(est), "--k", "3", "--normalized",
                 "--graph", str(gfile)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["precision_at_k"] == 1.0 and rep["max_error"] < 1e-6 and rep["k"] == 3


def test_convert_round_trip(gfile, tmp_path):
    csr, mp = tmp_path / "g.csr", tmp_path / "map.txt"
    assert main(["convert", "--in", str(gfile), "--out", str(csr), "--mapping", str(mp)]) == 0
    outs = []
    for path in (gfile, csr):
        o = tmp_path / f"o{len(outs)}.txt"
        assert main(["propagate", "--graph", str(path), "--measure", "ppr", "--alpha", "0.2",
                     "--source", "3", "--delta", "1e-3", "--out", str(o)]) == 0
        outs.append(body(o))
    assert outs[0] == outs[1]
    back = tmp_path / "back.txt"
    assert main(["convert", "--in", str(csr), "--out", str(back)]) == 0
    assert sorted(back.read_text().split("\n")) == sorted(
        " ".join(sorted(line.split(), key=int)) for line in (EDGES + "").split("\n")
    )


def test_cluster_two_triangles(gfile, tmp_path):
    out, curve = tmp_path / "c.txt", tmp_path / "curve.csv"
    assert main(["cluster", "--graph", str(gfile), "--source", "0", "--exact",
                 "--out", str(out), "--curve", str(curve)]) == 0
    assert sorted(body(out)) == ["0", "1", "2"]
    assert "# conductance=0.14285714285714285" in out.read_text()
    assert curve.read_text().startswith("prefix_len,node,conductance\n")


def test_features_workers(gfile, tmp_path):
    X = np.random.default_rng(0).standard_normal((6, 4))
    np.savetxt(tmp_path / "x.csv", X, delimiter=",")
    outs = []
    for w in ("1", "3"):
        o = tmp_path / f"z{w}.bin"
        assert main(["features", "--graph", str(gfile), "--measure", "ppr", "--alpha", "0.1",
                     "--delta", "1e-2", "--epsilon", "1e-3", "--workers", w,
                     "--in", str(tmp_path / "x.csv"), "--out", str(o)]) == 0
        outs.append(o.read_bytes())
        assert json.loads((tmp_path / f"z{w}.bin.json").read_text())["workers"] == int(w)
    assert outs[0] == outs[1]


def test_mc_and_tradeoff(gfile, tmp_path):
    mc = tmp_path / "mc.txt"
    assert main(["mc", "--graph", str(gfile), "--source", "0", "--walks", "20000",
                 "--out", str(mc)]) == 0
    vals, _ = read_vector(mc)
    assert sum(vals.values()) == pytest.approx(1.0)
    csv = tmp_path / "t.csv"
    assert main(["tradeoff", "--graph", str(gfile), "--source", "0", "--deltas", "1e-1,1e-3",
                 "--out", str(csv)]) == 0
    assert len(csv.read_text().splitlines()) == 3


def test_exit_codes(gfile, tmp_path, capsys):
    assert main(["propagate", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err
    assert main(["nothing"]) == 1
    assert main(["propagate", "--graph", str(gfile), "--measure", "ppr", "--alpha", "2",
                 "--source", "0", "--delta", "0.1"]) == 1
    assert main(["propagate", "--graph", str(tmp_path / "missing.txt"), "--measure", "ppr",
                 "--alpha", "0.2", "--source", "0", "--delta", "0.1"]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("0 x\n")
    assert main(["groundtruth", "--graph", str(bad), "--measure", "ppr", "--alpha", "0.2",
                 "--source", "0"]) == 2
    assert main(["propagate", "--graph", str(gfile), "--measure", "ppr", "--alpha", "0.2",
                 "--source", "99", "--delta", "0.1"]) == 2
    assert main(["--version"]) == 0


def test_single_target_on_directed_graph(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("0 1\n1 2\n2 0\n0 2\n")
    out = tmp_path / "st.txt"
    assert main(["groundtruth", "--graph", str(p), "--directed", "--measure",
                 "single-target-ppr", "--alpha", "0.2", "--source", "0", "--out", str(out)]) == 0
    vals, _ = read_vector(out)
    assert vals[0] > 0.2
