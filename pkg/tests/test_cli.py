import json

import numpy as np
import pytest

from sepcones.certificates import certify
from sepcones.certificates.claims import Q2S3
from sepcones.cli import main
from sepcones.cones import TensorElement
from sepcones.separability import HankelElement, SeparableDecomposition


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_classify(capsys):
    assert run(["classify", "QS", "2", "3"], capsys)[:2] == (0, "PPT\n")
    assert run(["classify", "--space", "HS", "--m", "2", "--n", "4"], capsys)[:2] == (0, "N\n")
    code, out, _ = run(["classify", "SS", "3", "2", "--pretty"], capsys)
    assert code == 0 and json.loads(out)["answer"] == "PSD"


def test_certify(capsys, tmp_path):
    code, out, _ = run(["certify", "gamma44"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "Verified"
    stored = _write(tmp_path, "c.json", json.loads(out))
    assert run(["certify", "--replay", stored], capsys)[0] == 0
    bad = json.loads(out)
    bad["evidence"]["b_rank"] = 4
    assert run(["certify", "--replay", _write(tmp_path, "bad.json", bad)], capsys)[0] == 1
    assert run(["certify", "nonexistent"], capsys)[0] == 2


def test_gen_decompose_round_trip(capsys, tmp_path):
    for argv in (["--space", "QS", "--m", "2", "--n", "3"], ["--m", "5", "--n", "3"],
                 ["--space", "QS", "--m", "3", "--n", "2"]):
        code, out, _ = run(["gen", "--separable", "--seed", "3"] + argv, capsys)
        assert code == 0
        f = _write(tmp_path, "x.json", json.loads(out))
        code, out, _ = run(["decompose", "--in", f], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["residual"] <= 1e-7 and d["atoms"]


def test_gen_is_deterministic(capsys):
    a = run(["gen", "--ppt", "--m", "6", "--n", "3", "--seed", "9"], capsys)[1]
    b = run(["gen", "--kind", "ppt", "--m", "6", "--n", "3", "--seed", "9"], capsys)[1]
    assert a == b


def test_check(capsys, tmp_path):
    B = TensorElement.from_assembled(np.array(Q2S3, float), 6)
    f = _write(tmp_path, "b.json", B.to_json())
    code, out, _ = run(["check", "--in", f], capsys)
    res = json.loads(out)
    assert code == 0 and res["psd"] and not res["ppt"] and res["witness"]["side"] == "pt"
    assert res["pt_min_eigenvalue"] < -1e-3
    code, out, _ = run(["decompose", "--in", f], capsys)
    assert code == 1
    H = HankelElement("H", np.eye(2)[..., None] * [1, 0, 0, 0], np.zeros((2, 2, 4)), np.eye(2)[..., None] * [1, 0, 0, 0])
    f = _write(tmp_path, "h.json", H.to_json())
    res = json.loads(run(["check", "--in", f], capsys)[1])
    assert res["psd"] and res["ppt"]


def test_table(capsys):
    code, out, _ = run(["table"], capsys)
    assert code == 0 and json.loads(out)["diff"] == []
    code, out, _ = run(["table", "--pretty"], capsys)
    assert "diff: empty" in out


def test_out_flag(capsys, tmp_path):
    p = tmp_path / "o.json"
    assert run(["classify", "HH", "2", "3", "--out", str(p)], capsys)[0] == 0
    assert p.read_text().strip() == "PPT"


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["classify", "XX", "2", "2"],
    ["classify", "SS", "0", "2"],
    ["gen", "--space", "HH", "--m", "3", "--n", "3"],
    ["gen", "--m", "3"],
    ["check", "--tol", "abc"],
])
def test_malformed_exit_2(argv, capsys):
    assert run(argv, capsys)[0] == 2


def test_malformed_json_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["check", "--in", str(p)], capsys)[0] == 2
    f = _write(tmp_path, "shape.json", {"m": 3, "n": 2, "components": [[[1]]]})
    assert run(["decompose", "--in", f], capsys)[0] == 2
    f = _write(tmp_path, "other.json", {"hello": 1})
    assert run(["check", "--in", f], capsys)[0] == 2
    assert run(["check", "--in", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_json_round_trips_bitwise(rng):
    from sepcones.generate import sample
    for target in (("tensor", 6, 3), ("tensor", 3, 2)):
        x = sample(target, "ppt", 1)
        y = TensorElement.from_json(json.loads(json.dumps(x.to_json())))
        assert np.array_equal(x.components, y.components)
    for f in "CH":
        x = sample(("hankel", f, 3), "ppt", 2)
        y = HankelElement.from_json(json.loads(json.dumps(x.to_json())))
        assert all(np.array_equal(getattr(x, k), getattr(y, k)) for k in ("B11", "B12", "B22"))
    from sepcones.separability import decompose
    D = decompose(sample(("tensor", 5, 3), "separable", 4))
    E = SeparableDecomposition.from_json(json.loads(D.dumps()))
    assert E.dumps() == D.dumps()
    c = certify("q3_transpose")
    assert json.loads(c.dumps()) == json.loads(json.dumps(c.to_json(), sort_keys=True))
