import json

import numpy as np
import pytest

from hilbertcomplex import io
from hilbertcomplex.complex import complex_from_matrices
from hilbertcomplex.generate import random_complex
from hilbertcomplex.products import tensor_complex


def _same(C, D):
    assert C.kind == D.kind and C.tol == D.tol and C.algebra == D.algebra
    for E, F in zip(C.modules, D.modules):
        assert E.dims == F.dims and E.has_grams == F.has_grams
        if E.has_grams:
            assert all(np.array_equal(a, b) for a, b in zip(E.grams, F.grams))
    for s, t in zip(C.diffs, D.diffs):
        assert all(np.array_equal(a, b) for a, b in zip(s.blocks, t.blocks))


@pytest.mark.parametrize("seed", range(6))
def test_round_trip_bit_exact(seed, tmp_path):
    C = random_complex([1, 2], [[1, 2], [3, 2], [2, 1]], seed=seed, grams=bool(seed % 2))
    path = tmp_path / "c.json"
    io.save_complex(C, str(path), name="r", seed=seed)
    D = io.load_complex(str(path))
    _same(C, D)
    assert D.metadata["seed"] == seed
    assert io.dumps(io.complex_to_document(D, name="r", seed=seed)) == path.read_text().rstrip("\n")


def test_tensor_layout_is_stored(fix, row):
    T = tensor_complex(fix, row)
    doc = json.loads(io.dumps(io.complex_to_document(T)))
    assert doc["tensor_layout"]["degrees"][1] == [[0, 1], [1, 0]]
    assert io.document_to_complex(doc).metadata["tensor_layout"] == doc["tensor_layout"]


def test_field_path_diagnostics(fix):
    doc = json.loads(io.dumps(io.complex_to_document(fix)))
    doc["diffs"][1]["blocks"][0]["shape"] = [2, 2]
    with pytest.raises(io.DocumentError) as e:
        io.parse_document(doc)
    assert e.value.path == "$.diffs[1].blocks[0].data"
    doc = json.loads(io.dumps(io.complex_to_document(fix)))
    doc["modules"][0]["dims"] = [1, 1]
    with pytest.raises(io.DocumentError) as e:
        io.parse_document(doc)
    assert e.value.path == "$.modules[0].dims"
    doc = json.loads(io.dumps(io.complex_to_document(fix)))
    doc["format"] = "other"
    with pytest.raises(io.DocumentError, match="format"):
        io.parse_document(doc)


def test_bad_gram_and_json_position(fix):
    doc = json.loads(io.dumps(io.complex_to_document(fix)))
    doc["modules"][0]["grams"] = [io.matrix_to_json(np.array([[-1.0]]))]
    with pytest.raises(io.DocumentError) as e:
        io.parse_document(doc)
    assert e.value.path == "$.modules[0].grams"
    with pytest.raises(io.DocumentError, match="line 2"):
        io.loads('{\n  "format": }')


def test_complex_entries_survive():
    C = complex_from_matrices([[[[1 + 2j, np.pi * 1j]]]])
    D = io.document_to_complex(json.loads(io.dumps(io.complex_to_document(C))))
    assert np.array_equal(C.diffs[0].blocks[0], D.diffs[0].blocks[0])
