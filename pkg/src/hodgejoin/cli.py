"""Command-line front end.

Exit codes: 0 success or pass, 1 comparison failure (or violations found by
``validate``), 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
from typing import Sequence

from . import mhsm as mh
from .monrep import MonRep, tensor_join
from .oracle import BPExponents, bp_mhsm, milnor_number
from .qlinalg import Q, qstr
from .tsjoin import (
    beta_twist_operator,
    beta_value,
    beta_value_quadrature,
    graded_direct_image_model,
    twisted_join,
)

_SEP = "\x00sep"
_NEG_RATIONAL = re.compile(r"^-\d+(/\d+)?$")

ASSUMPTIONS = [
    "each factor is the vanishing cohomology of an isolated singularity at the origin "
    "(no other critical values contribute)",
    "the rational-structure twist B~ is not applied to the exact output; see twist-matrix",
]


class InputError(ValueError):
    pass


# -- serialization helpers ------------------------------------------------------

def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def mhsm_to_json(m: mh.MHSM) -> dict:
    """JSON form with the block shorthand attached when the structure is split."""
    blocks = None
    try:
        cert = mh.iso_invariants(m)
        cand = mh.blocks_from_invariants(cert)
        if mh.iso_invariants(mh.from_blocks(cand)) == cert:
            blocks = cand
    except ArithmeticError:
        blocks = None
    return mh.to_json(m, blocks)


def pairs_rows(sp: mh.SpectralPairs) -> list[list]:
    return sp.to_rows()


def format_pairs(sp: mh.SpectralPairs, fmt: str) -> str:
    rows = pairs_rows(sp)
    if fmt == "json":
        return dump_json({"spectral_pairs": rows})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if fmt == "csv":
        writer.writerow(["s", "w", "mult"])
    writer.writerows(rows)
    return buf.getvalue()


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def load_mhsm(path: str) -> mh.MHSM:
    try:
        m = mh.from_json(_load_json(path))
    except InputError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return m


def load_monrep(path: str) -> MonRep:
    try:
        return MonRep.from_json(_load_json(path))
    except InputError:
        raise
    except (ValueError, KeyError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _exps(values: Sequence[str]) -> BPExponents:
    try:
        return BPExponents(int(v) for v in values)
    except ValueError as exc:
        raise InputError(f"bad exponent list {' '.join(values)!r}: {exc}") from None


# -- commands ----------------------------------------------------------------------

def cmd_spectrum(args) -> tuple[str, int]:
    e = _exps(args.exps)
    sp = mh.spectral_pairs(bp_mhsm(e))
    if args.format == "json":
        return dump_json({"exponents": list(e), "milnor_number": milnor_number(e), "spectral_pairs": pairs_rows(sp)}), 0
    return format_pairs(sp, args.format), 0


def cmd_join(args) -> tuple[str, int]:
    m1, m2 = load_mhsm(args.file_a), load_mhsm(args.file_b)
    for path, m in ((args.file_a, m1), (args.file_b, m2)):
        bad = mh.validate(m)
        if bad:
            raise InputError(f"{path} is not a valid structure: " + "; ".join(bad))
    out = twisted_join(m1, m2)
    sp = mh.spectral_pairs(out)
    model = None
    if args.window is not None:
        try:
            model = graded_direct_image_model(m1, m2, args.window)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if args.format == "json":
        payload = {"mhsm": mhsm_to_json(out), "spectral_pairs": pairs_rows(sp), "assumptions": ASSUMPTIONS}
        if model is not None:
            payload["graded_model"] = _model_json(model)
        return dump_json(payload), 0 if model is None or model.matches else 1
    text = format_pairs(sp, args.format)
    if model is not None and args.format == "text":
        text += f"graded model (window {model.window}): {'match' if model.matches else 'MISMATCH'}\n"
    return text, 0 if model is None or model.matches else 1


def _model_json(model) -> dict:
    return {
        "window": model.window,
        "dims": {qstr(d): v for d, v in model.dims.items()},
        "interior": [qstr(d) for d in model.interior],
        "predicted": {qstr(d): v for d, v in model.predicted.items()},
        "matches": model.matches,
    }


def cmd_oracle_check(args) -> tuple[str, int]:
    raw = list(args.exps)
    if raw.count(_SEP) != 1:
        raise InputError("oracle-check needs two exponent lists separated by --")
    cut = raw.index(_SEP)
    a, b = _exps(raw[:cut]), _exps(raw[cut + 1:])
    timings = {}
    t0 = time.perf_counter()
    ma, mb = bp_mhsm(a), bp_mhsm(b)
    expected = bp_mhsm(tuple(a) + tuple(b))
    timings["oracle_ms"] = (time.perf_counter() - t0) * 1e3
    t0 = time.perf_counter()
    joined = twisted_join(ma, mb)
    timings["join_ms"] = (time.perf_counter() - t0) * 1e3
    t0 = time.perf_counter()
    sp_exp, sp_act = mh.spectral_pairs(expected), mh.spectral_pairs(joined)
    cert_exp, cert_act = mh.iso_invariants(expected), mh.iso_invariants(joined)
    timings["compare_ms"] = (time.perf_counter() - t0) * 1e3
    diff = []
    ce, ca = sp_exp.as_counter(), sp_act.as_counter()
    for key in sorted(set(ce) | set(ca)):
        if ce[key] != ca[key]:
            diff.append(f"spectral pair ({qstr(key[0])},{key[1]}): expected {ce[key]}, got {ca[key]}")
    if cert_exp != cert_act:
        be = {(b.key()): b.mult for b in mh.blocks_from_invariants(cert_exp)}
        try:
            ba = {(b.key()): b.mult for b in mh.blocks_from_invariants(cert_act)}
        except ArithmeticError:
            ba = {}
        for key in sorted(set(be) | set(ba)):
            if be.get(key, 0) != ba.get(key, 0):
                diff.append(
                    f"block (alpha={qstr(key[0])}, p={key[1]}, w={key[2]}, k={key[3]}): "
                    f"expected {be.get(key, 0)}, got {ba.get(key, 0)}"
                )
        if not diff:
            diff.append("isomorphism certificates differ")
    if joined.dim != expected.dim:
        diff.append(f"dimension: expected {expected.dim}, got {joined.dim}")
    status = "pass" if not diff else "fail"
    report = {
        "status": status,
        "exponents": [list(a), list(b)],
        "dims": {"a": ma.dim, "b": mb.dim, "join": joined.dim, "expected": expected.dim},
        "expected": pairs_rows(sp_exp),
        "actual": pairs_rows(sp_act),
        "diff": diff,
    }
    if args.timings:
        report["timings"] = {k: round(v, 3) for k, v in timings.items()}
    code = 0 if status == "pass" else 1
    if args.format == "json":
        return dump_json(report), code
    lines = [f"status: {status}", f"dims: {ma.dim} x {mb.dim} = {joined.dim} (expected {expected.dim})"]
    lines.append("spectral pairs (s,w,mult):")
    lines.extend(",".join(str(x) for x in r) for r in pairs_rows(sp_act))
    lines.extend(f"diff: {d}" for d in diff)
    if args.timings:
        lines.extend(f"{k}: {v:.3f}" for k, v in timings.items())
    return "\n".join(lines) + "\n", code


def cmd_validate(args) -> tuple[str, int]:
    m = load_mhsm(args.file)
    bad = mh.validate(m)
    if args.format == "json":
        return dump_json({"valid": not bad, "violations": bad}), 1 if bad else 0
    if not bad:
        return "valid\n", 0
    return "".join(f"violation: {b}\n" for b in bad), 1


def _parse_exponent(text: str):
    try:
        x = Q(text.strip())
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad rational {text!r}: {exc}") from None
    if not -1 < x <= 0:
        raise InputError(f"exponent {qstr(x)} is outside the range (-1, 0]")
    return x


def cmd_twist_matrix(args) -> tuple[str, int]:
    a, b = _parse_exponent(args.alpha), _parse_exponent(args.beta)
    if args.n1 < 1 or args.n2 < 1:
        raise InputError("block sizes must be positive")
    twist = beta_twist_operator(a, b, args.n1, args.n2)
    deviation = 0.0
    for i in range(args.n1):
        for j in range(args.n2):
            series = beta_value(a, b, i, j)
            quad = beta_value_quadrature(a, b, i, j)
            deviation = max(deviation, abs(series - quad) / max(abs(quad), 1e-300))
    det = twist.det
    status = "pass" if deviation <= args.tol else "fail"
    block = twist.block.real.tolist() if not twist.block.imag.any() else None
    rows = block if block is not None else [[repr(complex(x)) for x in r] for r in twist.block]
    payload = {
        "alpha": qstr(a),
        "beta": qstr(b),
        "sizes": [args.n1, args.n2],
        "matrix": rows,
        "det": det.real if det.imag == 0 else [det.real, det.imag],
        "invertible": bool(det != 0),
        "max_relative_deviation": deviation,
        "tol": args.tol,
        "status": status,
    }
    code = 0 if status == "pass" else 1
    if args.format == "json":
        return dump_json(payload), code
    lines = ["[" + ", ".join(f"{x:.15g}" if isinstance(x, float) else x for x in r) + "]" for r in rows]
    lines.append(f"det: {payload['det']}")
    lines.append(f"series vs quadrature max relative deviation: {deviation:.3e} (tol {args.tol:g})")
    lines.append(f"certificate: {status}")
    return "\n".join(lines) + "\n", code


def cmd_rep_join(args) -> tuple[str, int]:
    r = tensor_join(load_monrep(args.file_a), load_monrep(args.file_b))
    if args.format == "json":
        return dump_json(r.to_json()), 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if args.format == "csv":
        writer.writerow(["alpha", "size", "mult"])
    writer.writerows([[qstr(a), s, m] for a, s, m in r.blocks])
    return buf.getvalue(), 0


# -- argument handling ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodgejoin",
        description="Join of mixed Hodge structures with monodromy, checked against Brieskorn-Pham spectra.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--output", metavar="PATH", help="write to PATH instead of standard output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="spectral pairs of x1^a1 + ... + xn^an")
    p.add_argument("exps", nargs="+", metavar="A")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("join", parents=[common], help="twisted join of two structures (JSON files)")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--window", type=int, help="also run the graded cokernel model with this window")
    p.set_defaults(func=cmd_join)

    p = sub.add_parser("oracle-check", parents=[common], help="compare join of A and B with the oracle for A ++ B")
    p.add_argument("exps", nargs="+", metavar="A... -- B...")
    p.add_argument("--timings", action="store_true", help="include per-stage timings in the report")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("validate", parents=[common], help="check the invariants of a structure file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("twist-matrix", parents=[common], help="beta twist on a pair of Jordan blocks")
    p.add_argument("alpha")
    p.add_argument("beta")
    p.add_argument("n1", type=int)
    p.add_argument("n2", type=int)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_twist_matrix)

    p = sub.add_parser("rep-join", parents=[common], help="tensor product of two monodromy representations")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(func=cmd_rep_join)
    return parser


def _preprocess(argv: list[str]) -> list[str]:
    out = []
    sep_done = False
    for arg in argv:
        if arg == "--" and not sep_done:
            out.append(_SEP)
            sep_done = True
        elif _NEG_RATIONAL.match(arg):
            # keep argparse from reading negative rationals as options
            out.append(" " + arg)
        else:
            out.append(arg)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_preprocess(argv))
    try:
        text, code = args.func(args)
    except (InputError, mh.InvalidMHSMError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
