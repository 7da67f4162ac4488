"""JSON document format ``cstar-complex/1``.

Complex entries are written as ``[re, im]`` pairs of JSON numbers.  Python's
``json`` writes floats with ``repr``, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .algebra import AlgebraDescriptor
from .complex import COMPLEX_TOL, KINDS, Complex
from .exceptions import ValidationError
from .module import HilbertModule
from .operator import RANK_TOL, Operator

FORMAT = "cstar-complex/1"


class DocumentError(ValidationError):
    """Malformed document; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def matrix_to_json(M: np.ndarray) -> dict:
    M = np.asarray(M, dtype=complex)
    return {"shape": list(M.shape),
            "data": [[float(z.real), float(z.imag)] for z in M.reshape(-1)]}


def matrix_from_json(obj: Any, path: str) -> np.ndarray:
    if not isinstance(obj, dict):
        raise DocumentError(path, "expected an object with 'shape' and 'data'")
    shape, data = obj.get("shape"), obj.get("data")
    if (not isinstance(shape, list) or len(shape) != 2
            or not all(isinstance(s, int) and not isinstance(s, bool) and s >= 0 for s in shape)):
        raise DocumentError(f"{path}.shape", "expected [rows, cols] of nonnegative integers")
    if not isinstance(data, list):
        raise DocumentError(f"{path}.data", "expected a list of [re, im] pairs")
    if len(data) != shape[0] * shape[1]:
        raise DocumentError(f"{path}.data", f"has {len(data)} entries, shape {shape} needs {shape[0] * shape[1]}")
    out = np.empty(len(data), dtype=complex)
    for n, z in enumerate(data):
        if (not isinstance(z, list) or len(z) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in z)):
            raise DocumentError(f"{path}.data[{n}]", "expected [re, im] numbers")
        out[n] = complex(float(z[0]), float(z[1]))
    if not np.all(np.isfinite(out)):
        raise DocumentError(f"{path}.data", "non-finite entry")
    return out.reshape(shape)


def module_to_json(E: HilbertModule) -> dict:
    return {"dims": list(E.dims),
            "grams": None if not E.has_grams else [matrix_to_json(g) for g in E.grams]}


def complex_to_document(C: Complex, name: str = "", seed=None, rank_tol: float = RANK_TOL) -> dict:
    doc = {
        "format": FORMAT,
        "algebra": C.algebra.to_dict(),
        "modules": [module_to_json(E) for E in C.modules],
        "diffs": [{"blocks": [matrix_to_json(b) for b in t.blocks]} for t in C.diffs],
        "kind": C.kind,
        "tolerances": {"complex": C.tol, "rank": rank_tol},
        "metadata": {"name": name or C.metadata.get("name", ""),
                     "seed": seed if seed is not None else C.metadata.get("seed")},
    }
    if "tensor_layout" in C.metadata:
        doc["tensor_layout"] = C.metadata["tensor_layout"]
    return doc


def _int_list(obj, path: str, nonneg: bool = True, positive: bool = False) -> list[int]:
    if not isinstance(obj, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in obj):
        raise DocumentError(path, "expected a list of integers")
    if positive and any(v < 1 for v in obj):
        raise DocumentError(path, "entries must be positive")
    if nonneg and any(v < 0 for v in obj):
        raise DocumentError(path, "entries must be nonnegative")
    return obj


def parse_document(doc: Any) -> dict:
    """Validate shapes and types; return parsed parts without checking the complex property."""
    if not isinstance(doc, dict):
        raise DocumentError("$", "document must be a JSON object")
    if doc.get("format") != FORMAT:
        raise DocumentError("$.format", f"expected {FORMAT!r}, got {doc.get('format')!r}")
    alg_obj = doc.get("algebra")
    if not isinstance(alg_obj, dict):
        raise DocumentError("$.algebra", "expected {\"blocks\": [...]}")
    blocks = _int_list(alg_obj.get("blocks"), "$.algebra.blocks", positive=True)
    if not blocks:
        raise DocumentError("$.algebra.blocks", "needs at least one block")
    alg = AlgebraDescriptor(tuple(blocks))
    mods_obj = doc.get("modules")
    if not isinstance(mods_obj, list) or len(mods_obj) < 2:
        raise DocumentError("$.modules", "expected a list of at least two modules")
    modules = []
    for k, mo in enumerate(mods_obj):
        p = f"$.modules[{k}]"
        if not isinstance(mo, dict):
            raise DocumentError(p, "expected an object")
        dims = _int_list(mo.get("dims"), f"{p}.dims")
        if len(dims) != alg.m:
            raise DocumentError(f"{p}.dims", f"has {len(dims)} entries, algebra has {alg.m} blocks")
        grams = mo.get("grams")
        if grams is not None:
            if not isinstance(grams, list) or len(grams) != alg.m:
                raise DocumentError(f"{p}.grams", f"expected null or {alg.m} matrices")
            grams = [matrix_from_json(g, f"{p}.grams[{i}]") for i, g in enumerate(grams)]
            for i, (g, d) in enumerate(zip(grams, dims)):
                if g.shape != (d, d):
                    raise DocumentError(f"{p}.grams[{i}].shape", f"expected {[d, d]}, got {list(g.shape)}")
        try:
            modules.append(HilbertModule(alg, dims, grams))
        except ValidationError as e:
            raise DocumentError(f"{p}.grams", str(e)) from e
    diffs_obj = doc.get("diffs")
    if not isinstance(diffs_obj, list) or len(diffs_obj) != len(modules) - 1:
        raise DocumentError("$.diffs", f"expected a list of {len(modules) - 1} differentials")
    diffs = []
    for k, do in enumerate(diffs_obj):
        p = f"$.diffs[{k}]"
        if not isinstance(do, dict) or not isinstance(do.get("blocks"), list) or len(do["blocks"]) != alg.m:
            raise DocumentError(f"{p}.blocks", f"expected {alg.m} block matrices")
        mats = []
        for i, bo in enumerate(do["blocks"]):
            M = matrix_from_json(bo, f"{p}.blocks[{i}]")
            want = (modules[k + 1].dims[i], modules[k].dims[i])
            if M.shape != want:
                raise DocumentError(f"{p}.blocks[{i}].shape", f"expected {list(want)}, got {list(M.shape)}")
            mats.append(M)
        diffs.append(Operator(modules[k], modules[k + 1], mats))
    kind = doc.get("kind", "complex")
    if kind not in KINDS:
        raise DocumentError("$.kind", f"must be one of {list(KINDS)}")
    tols = doc.get("tolerances") or {}
    if not isinstance(tols, dict):
        raise DocumentError("$.tolerances", "expected an object")
    out_tols = {}
    for key, default in (("complex", COMPLEX_TOL), ("rank", RANK_TOL)):
        v = tols.get(key, default)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            raise DocumentError(f"$.tolerances.{key}", "expected a positive number")
        out_tols[key] = float(v)
    meta = doc.get("metadata") or {}
    if not isinstance(meta, dict):
        raise DocumentError("$.metadata", "expected an object")
    return {"algebra": alg, "modules": modules, "diffs": diffs, "kind": kind,
            "tolerances": out_tols, "metadata": meta, "tensor_layout": doc.get("tensor_layout")}


def document_to_complex(doc: Any) -> Complex:
    parts = parse_document(doc)
    meta = dict(parts["metadata"])
    if parts["tensor_layout"] is not None:
        meta["tensor_layout"] = parts["tensor_layout"]
    return Complex(parts["modules"], parts["diffs"], parts["kind"], parts["tolerances"]["complex"], meta)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, allow_nan=False)


def loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"line {e.lineno} column {e.colno}", e.msg) from e


def load_document(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise DocumentError(path, f"cannot read file ({e.strerror})") from e
    return loads(text)


def save_complex(C: Complex, path: str, **kw) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(complex_to_document(C, **kw)))
        fh.write("\n")


def load_complex(path: str) -> Complex:
    return document_to_complex(load_document(path))
