"""sepcones command line: check, decompose, classify, certify, gen, table.

Exit codes: 2 for malformed input, 1 for a failed certificate or a non-PPT
input to decompose, 0 otherwise.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import qlinalg as ql
from .certificates import CERTIFICATES, Certificate, certify, replay
from .cones import NotPPT, TensorElement, partial_transpose
from .generate import KINDS, SPACES, UnsupportedSpace, gen_random
from .separability import (HankelElement, Undecided, classify, decompose, decompose_hankel, render_table,
                           table_diff)
from .separability.classify import SPACES as CLASSIFY_SPACES


class InputError(ValueError):
    pass


def load_element(d: dict):
    if not isinstance(d, dict):
        raise InputError("element JSON must be an object")
    try:
        if "components" in d:
            return TensorElement.from_json(d)
        if "B11" in d:
            return HankelElement.from_json(d)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    raise InputError("unrecognised element JSON (expected 'components' or 'B11'..'B22')")


def _read_json(path: str | None):
    try:
        text = sys.stdin.read() if path in (None, "-") else open(path).read()
        return json.loads(text)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc


def _emit(obj, args, text: str | None = None):
    if args.pretty and text is not None:
        out = text
    elif isinstance(obj, str):
        out = obj
    else:
        out = json.dumps(obj, indent=2 if args.pretty else None)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    x = load_element(_read_json(args.infile))
    X = x.assemble()
    # block elements transpose the real symmetric S(2) factor, which leaves them unchanged
    PT = partial_transpose(x).assemble() if isinstance(x, TensorElement) else X
    psd, pt = ql.is_psd(X, args.tol), ql.is_psd(PT, args.tol)
    res = {"psd": bool(psd), "ppt": bool(psd) and bool(pt),
           "min_eigenvalue": float(psd.value), "pt_min_eigenvalue": float(pt.value)}
    for side, r in (("B", psd), ("pt", pt)):
        if not r:
            res["witness"] = {"side": side, "vector": np.asarray(r.witness).tolist()}
            break
    _emit(res, args, f"psd: {res['psd']}\nppt: {res['ppt']}\n"
                     f"min eigenvalue: {res['min_eigenvalue']:.3e} (pt {res['pt_min_eigenvalue']:.3e})")
    return 0


def cmd_decompose(args) -> int:
    x = load_element(_read_json(args.infile))
    try:
        if isinstance(x, TensorElement):
            D = decompose(x, tol=args.tol, seed=args.seed, max_depth=args.max_depth)
        else:
            D = decompose_hankel(x, tol=args.tol)
    except (NotPPT, ql.NotPSD) as exc:
        print(json.dumps({"error": "NotPPT", "detail": str(exc)}), file=sys.stderr)
        return 1
    except (Undecided, RuntimeError, ql.SingularBlock) as exc:
        _emit({"result": "UNDECIDED", "reason": str(exc)}, args, f"UNDECIDED: {exc}")
        return 0
    _emit(D.to_json(), args)
    return 0


def cmd_classify(args) -> int:
    space = args.space_pos or args.space
    m = args.m_pos if args.m_pos is not None else args.m
    n = args.n_pos if args.n_pos is not None else args.n
    if space is None or m is None or n is None:
        raise InputError("classify needs SPACE M N")
    if space not in CLASSIFY_SPACES:
        raise InputError(f"space must be one of {CLASSIFY_SPACES}")
    if m < 1 or n < 1:
        raise InputError("m and n must be positive")
    ans = classify(space, m, n)
    _emit(ans if not args.pretty else {"space": space, "m": m, "n": n, "answer": ans}, args)
    return 0


def cmd_certify(args) -> int:
    if args.replay:
        c = replay(Certificate.from_json(_read_json(args.replay)))
    else:
        if args.name not in CERTIFICATES:
            raise InputError(f"unknown certificate {args.name!r}; choose from {sorted(CERTIFICATES)}")
        c = certify(args.name)
    verdict = "Verified" if c.verified else f"Failed at step {c.verdict.step}"
    _emit(c.to_json(), args, f"{c.claim_id}: {verdict}")
    return 0 if c.verified else 1


def cmd_gen(args) -> int:
    kind = args.kind
    for k in KINDS:
        if getattr(args, k):
            kind = k
    if args.m is None or args.n is None:
        raise InputError("gen needs --m and --n")
    try:
        x = gen_random(args.space, args.m, args.n, kind, args.seed)
    except UnsupportedSpace as exc:
        raise InputError(str(exc)) from exc
    _emit(x.to_json(), args)
    return 0


def cmd_table(args) -> int:
    d = table_diff()
    tables = {s: [[classify(s, m, n) for n in (2, 3, 4)] for m in (2, 3, 4)] for s in CLASSIFY_SPACES}
    text = "\n\n".join(render_table(s) for s in CLASSIFY_SPACES)
    text += "\n\ndiff: " + ("empty" if not d else "\n  " + "\n  ".join(d))
    _emit({"tables": tables, "diff": d}, args, text)
    return 0 if not d else 1


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", choices=SPACES)
    common.add_argument("--m", type=int)
    common.add_argument("--n", type=int)
    common.add_argument("--in", dest="infile")
    common.add_argument("--out")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=ql.EPS_E)
    common.add_argument("--max-depth", type=int, default=400)
    common.add_argument("--pretty", action="store_true")

    p = argparse.ArgumentParser(prog="sepcones", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="PSD and PPT membership with witnesses")
    sub.add_parser("decompose", parents=[common], help="separable decomposition as JSON")
    c = sub.add_parser("classify", parents=[common], help="table cell for (space, m, n)")
    c.add_argument("space_pos", nargs="?", metavar="SPACE")
    c.add_argument("m_pos", nargs="?", type=int, metavar="M")
    c.add_argument("n_pos", nargs="?", type=int, metavar="N")
    c = sub.add_parser("certify", parents=[common], help="run or replay a certificate")
    c.add_argument("name", nargs="?", default="gamma44", help=", ".join(sorted(CERTIFICATES)))
    c.add_argument("--replay", metavar="FILE")
    g = sub.add_parser("gen", parents=[common], help="random instance")
    g.add_argument("--kind", choices=KINDS, default="separable")
    for k in KINDS:
        g.add_argument(f"--{k}", action="store_true")
    sub.add_parser("table", parents=[common], help="print the four tables and diff against classify")
    return p


COMMANDS = {"check": cmd_check, "decompose": cmd_decompose, "classify": cmd_classify,
            "certify": cmd_certify, "gen": cmd_gen, "table": cmd_table}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run(argv: list[str]) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
