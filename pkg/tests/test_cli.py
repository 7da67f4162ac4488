import json

import pytest

from hilbertcomplex import io
from hilbertcomplex.cli import main
from hilbertcomplex.complex import complex_from_matrices


@pytest.fixture
def docs(tmp_path, fix, row, zero121):
    out = {}
    for name, C in (("fix", fix), ("row", row), ("zero", zero121)):
        p = tmp_path / f"{name}.json"
        io.save_complex(C, str(p), name=name)
        out[name] = str(p)
    bad = io.complex_to_document(complex_from_matrices([[[[1], [1]]], [[[1, 1]]]], kind="quasicomplex"))
    bad["kind"] = "complex"
    p = tmp_path / "bad.json"
    p.write_text(io.dumps(bad))
    out["bad"] = str(p)
    shape = io.complex_to_document(row)
    shape["diffs"][0]["blocks"][0]["shape"] = [2, 2]
    shape["diffs"][0]["blocks"][0]["data"] *= 2
    p = tmp_path / "shape.json"
    p.write_text(io.dumps(shape))
    out["shape"] = str(p)
    out["dir"] = tmp_path
    return out


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_validate(docs, capsys):
    assert run(capsys, "validate", docs["fix"])[0] == 0
    code, out, _ = run(capsys, "validate", docs["bad"])
    assert code == 1 and json.loads(out)["k"] == 0
    code, _, err = run(capsys, "validate", docs["shape"])
    assert code == 2 and json.loads(err)["path"] == "$.diffs[0].blocks[0].shape"
    assert run(capsys, "validate", str(docs["dir"] / "missing.json"))[0] == 2


def test_index(docs, capsys):
    code, out, _ = run(capsys, "index", docs["fix"], "--json")
    assert code == 0 and json.loads(out)["index"] == {"plus": [0], "minus": [0]}
    code, out, _ = run(capsys, "index", docs["row"], "--json")
    assert json.loads(out)["index"] == {"plus": [1], "minus": [0]}
    code, out, _ = run(capsys, "index", docs["zero"], "--json")
    payload = json.loads(out)
    assert payload["index"] == {"plus": [0], "minus": [0]}
    assert payload["per_k_cohomology_dims"] == [[1], [2], [1]] and payload["consistent"]


def test_hodge_and_checks(docs, capsys, tmp_path):
    for name in ("fix", "zero"):
        code, out, _ = run(capsys, "hodge", docs[name], "--json")
        assert code == 0 and json.loads(out)["max"] <= 1e-10
        code, out, _ = run(capsys, "checks", docs[name], "--json")
        assert code == 0 and json.loads(out)["max"] <= 1e-10
    p = str(tmp_path / "r.json")
    assert run(capsys, "random", "--seed", "3", "--spec",
               '{"algebra": [1, 2], "dims": [[1, 2], [3, 3], [2, 1]]}', "-o", p)[0] == 0
    code, out, _ = run(capsys, "checks", p, "--json")
    assert code == 0 and json.loads(out)["max"] <= 1e-8


def test_random(capsys, tmp_path):
    code, out, _ = run(capsys, "random", "--seed", "1", "--dims", "1,1", "--target", "0,0")
    doc = json.loads(out)
    assert code == 0 and doc["metadata"]["seed"] == 1
    assert abs(doc["diffs"][0]["blocks"][0]["data"][0][0]) + abs(doc["diffs"][0]["blocks"][0]["data"][0][1]) > 0
    code, out, _ = run(capsys, "random", "--seed", "1", "--dims", "2,1", "--target", "1,0")
    C = io.document_to_complex(json.loads(out))
    from hilbertcomplex.operator import numerical_rank
    assert numerical_rank(C.t(0)) == (1,)
    code, _, err = run(capsys, "random", "--seed", "1", "--dims", "2,1", "--target", "3,0")
    assert code == 2 and "target" in err
    assert run(capsys, "random", "--dims", "2,1")[0] == 2
    # same seed, same document
    a = run(capsys, "random", "--seed", "9", "--dims", "1,3,2")[1]
    b = run(capsys, "random", "--seed", "9", "--dims", "1,3,2")[1]
    assert a == b


def test_perturb_sweep(docs, capsys):
    code, out, _ = run(capsys, "perturb-sweep", docs["fix"], "--epsilon", "1e-3", "--trials", "20", "--seed", "4")
    rep = json.loads(out)
    assert code == 0 and rep["index_changes"] == 0 and rep["seed"] == 4
    code, out, _ = run(capsys, "perturb-sweep", docs["fix"], "--epsilon", "0", "--trials", "5")
    assert code == 0 and json.loads(out)["max_metric_observed"] == 0


def test_tensor_and_sum(docs, capsys, tmp_path):
    p = str(tmp_path / "t.json")
    code, out, _ = run(capsys, "tensor", docs["fix"], docs["row"], "-o", p)
    rep = json.loads(out)
    assert code == 0 and rep["consistent"]
    assert io.load_complex(p).metadata["tensor_layout"]["degrees"][0] == [[0, 0]]
    code, out, _ = run(capsys, "sum", docs["row"], docs["row"])
    assert code == 0 and json.loads(out)["index"] == {"plus": [2], "minus": [0]}


def test_bad_arguments(capsys):
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys)[0] == 2
