"""Command-line interface.

Exit codes: 0 success, 1 a mathematical check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import io
from .complex import Complex, structural_checks
from .exceptions import ComplexPropertyError, ValidationError
from .fredholm import euler_index, index_complex
from .generate import random_complex
from .hodge import betti, check_hodge_equivalences
from .operator import RANK_TOL, check_bt_identities
from .perturbation import perturb_sweep
from .products import direct_sum_complex, tensor_complex, tensor_index_report

OK, MATH_FAIL, INPUT_ERROR = 0, 1, 2


class _Exit(Exception):
    def __init__(self, code: int, payload: dict):
        self.code = code
        self.payload = payload


def _emit(args, payload: dict, human: Optional[str] = None) -> None:
    if args.json or human is None:
        print(json.dumps(payload, indent=1, default=_default))
    else:
        print(human)


def _default(o):
    if hasattr(o, "to_dict"):
        return o.to_dict()
    if hasattr(o, "tolist"):
        return o.tolist()
    return str(o)


def _load(path: str) -> Complex:
    doc = io.load_document(path)
    io.parse_document(doc)
    try:
        return io.document_to_complex(doc)
    except ComplexPropertyError as e:
        raise _Exit(MATH_FAIL, {"valid": False, "error": "complex property", "k": e.k,
                                "norm": e.norm, "bound": e.bound, "message": str(e)})


def _rank_tol(args) -> float:
    return args.tol if args.tol is not None else RANK_TOL


def _write_doc(args, doc: dict) -> None:
    text = io.dumps(doc)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_validate(args) -> int:
    C = _load(args.path)
    payload = {"valid": True, "kind": C.kind, "length": C.length,
               "dims": [list(E.dims) for E in C.modules], "composite_norms": list(C.composite_norms)}
    _emit(args, payload, f"valid {C.kind}: " + " -> ".join(str(list(E.dims)) for E in C.modules))
    return OK


def cmd_index(args) -> int:
    C = _load(args.path)
    tol = _rank_tol(args)
    ind = index_complex(C, tol)
    payload = {"index": ind.to_dict()}
    if C.kind == "complex":
        eu = euler_index(C, tol)
        payload["euler_index"] = eu.to_dict()
        payload["per_k_cohomology_dims"] = [list(b) for b in betti(C, tol)]
        payload["consistent"] = ind == eu
        if ind != eu:
            payload["alarm"] = "index differs from Euler characteristic of cohomology"
            _emit(args, payload)
            return MATH_FAIL
    _emit(args, payload, f"index {ind}")
    return OK


def cmd_hodge(args) -> int:
    C = _load(args.path)
    rep = check_hodge_equivalences(C, _rank_tol(args))
    payload = rep.to_dict()
    payload["per_k_cohomology_dims"] = [list(b) for b in betti(C, _rank_tol(args))]
    _emit(args, payload, f"hodge residual max {rep.max:.3e} ({'pass' if rep.passed else 'FAIL'})")
    return OK if rep.passed else MATH_FAIL


def cmd_checks(args) -> int:
    C = _load(args.path)
    if C.kind != "complex":
        raise _Exit(INPUT_ERROR, {"error": "structural checks need kind=complex"})
    s = structural_checks(C)
    bt = {f"t_{k} {name}": v for k, t in enumerate(C.diffs) for name, v in check_bt_identities(t).residuals.items()}
    payload = {"structural": s.to_dict(), "bounded_transform": bt,
               "max": max(s.max, max(bt.values(), default=0.0))}
    passed = s.passed and all(v <= 1e-9 for v in bt.values())
    payload["passed"] = passed
    _emit(args, payload, f"checks residual max {payload['max']:.3e} ({'pass' if passed else 'FAIL'})")
    return OK if passed else MATH_FAIL


def _parse_ints(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise _Exit(INPUT_ERROR, {"error": f"{flag}: expected comma-separated integers, got {text!r}"})


def cmd_random(args) -> int:
    if args.seed is None:
        raise _Exit(INPUT_ERROR, {"error": "--seed is required"})
    if args.spec:
        text = args.spec
        if not text.lstrip().startswith("{"):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        spec = io.loads(text)
        if not isinstance(spec, dict):
            raise io.DocumentError("$spec", "expected an object")
        algebra = spec.get("algebra", [1])
        if isinstance(algebra, dict):
            algebra = algebra.get("blocks")
        dims = spec.get("dims")
        target = spec.get("target")
        if dims is None:
            raise io.DocumentError("$spec.dims", "required")
    elif args.dims:
        algebra = [1]
        dims = [[d] for d in _parse_ints(args.dims, "--dims")]
        target = [[h] for h in _parse_ints(args.target, "--target")] if args.target else None
    else:
        raise _Exit(INPUT_ERROR, {"error": "give --dims or --spec"})
    C = random_complex(algebra, dims, target, seed=args.seed, grams=args.grams)
    _write_doc(args, io.complex_to_document(C, name=args.name or "random", seed=args.seed))
    return OK


def cmd_perturb(args) -> int:
    C = _load(args.path)
    seed = 0 if args.seed is None else args.seed
    rep = perturb_sweep(C, args.kind, args.epsilon, args.trials, seed)
    _emit(args, rep.to_dict())
    return OK if rep.index_changes == 0 else MATH_FAIL


def cmd_tensor(args) -> int:
    R, S = _load(args.left), _load(args.right)
    T = tensor_complex(R, S)
    if args.output:
        _write_doc(args, io.complex_to_document(T, name="tensor"))
    rep = tensor_index_report(R, S)
    consistent = rep["index_T"] == rep["index_sharp"] == rep["product"]
    rep["consistent"] = consistent
    _emit(args, rep)
    return OK if consistent else MATH_FAIL


def cmd_sum(args) -> int:
    R, S = _load(args.left), _load(args.right)
    D = direct_sum_complex(R, S)
    if args.output:
        _write_doc(args, io.complex_to_document(D, name="sum"))
    iD, iR, iS = index_complex(D), index_complex(R), index_complex(S)
    payload = {"index": iD.to_dict(), "index_left": iR.to_dict(), "index_right": iS.to_dict(),
               "additive": iD == iR + iS}
    _emit(args, payload)
    return OK if payload["additive"] else MATH_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="relative rank tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    p = argparse.ArgumentParser(prog="hilbertcomplex", description="Finite-rank Hilbert C*-complexes")
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, helptext in (("validate", cmd_validate, "check shapes, grams and the complex property"),
                               ("index", cmd_index, "index and Euler characteristic"),
                               ("hodge", cmd_hodge, "Hodge decomposition residuals"),
                               ("checks", cmd_checks, "structural and bounded-transform residuals")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("path")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("random", parents=[common], help="generate a seeded random complex")
    sp.add_argument("--dims", help="comma-separated module dims over C, e.g. 1,2,1")
    sp.add_argument("--target", help="comma-separated cohomology dims")
    sp.add_argument("--spec", help="JSON object or file: {algebra, dims, target}")
    sp.add_argument("--grams", action="store_true", help="attach random Gram matrices")
    sp.add_argument("--name", default=None)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_random)

    sp = sub.add_parser("perturb-sweep", parents=[common], help="index stability under perturbations")
    sp.add_argument("path")
    sp.add_argument("--kind", choices=["bounded", "relative", "compact"], default="bounded")
    sp.add_argument("--epsilon", type=float, default=1e-3)
    sp.add_argument("--trials", type=int, default=50)
    sp.set_defaults(func=cmd_perturb)

    for name, fn in (("tensor", cmd_tensor), ("sum", cmd_sum)):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("left")
        sp.add_argument("right")
        sp.add_argument("-o", "--output")
        sp.set_defaults(func=fn)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else OK
    try:
        return args.func(args)
    except _Exit as e:
        print(json.dumps(e.payload, indent=1), file=sys.stdout if e.code == MATH_FAIL else sys.stderr)
        return e.code
    except io.DocumentError as e:
        print(json.dumps({"error": "input", "path": e.path, "message": str(e)}, indent=1), file=sys.stderr)
        return INPUT_ERROR
    except ComplexPropertyError as e:
        print(json.dumps({"error": "complex property", "k": e.k, "message": str(e)}, indent=1))
        return MATH_FAIL
    except (ValidationError, OSError) as e:
        print(json.dumps({"error": "input", "message": str(e)}, indent=1), file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
