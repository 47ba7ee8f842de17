"""Batch command-line front end.

Subcommands: validate, invariants, upsilon, dset, jet-order, verify,
reconstruct, determination.  Every report is deterministic JSON (or aligned
text with --text) embedding the resolved options and the sha256 of each
input, so identical jobs produce byte-identical output.

Exit codes: 0 success; 1 I/O or parse error; 2 validation rejection
(flat / finite-type / reality violations); 3 mathematical inconsistency
(failed verification, unrealizable jet, violated bound).
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from fractions import Fraction

from . import io as cio
from .equivalence import (EquivalenceError, JetRealizationError, extract_jet,
                          finite_determination_check, reconstruct, verify_map)
from .hypersurface import (Hypersurface, ValidationError, family_b0,
                           family_mc, family_nb)
from .io import FormatError
from .scalars import ExactComplex, rational_str
from .upsilon import SYMBOLIC, UpsilonError, build_upsilon, compute_D

EXIT_OK = 0
EXIT_IO = 1
EXIT_INVALID = 2
EXIT_MATH = 3


class MathInconsistency(ArithmeticError):
    pass


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _default_degree(L: int, K: int) -> int:
    env = os.environ.get("CRJET_DEFAULT_DEGREE")
    if env is not None:
        try:
            d = int(env)
        except ValueError:
            raise FormatError(f"CRJET_DEFAULT_DEGREE={env!r} is not an integer") from None
        if d < 1:
            raise FormatError("CRJET_DEFAULT_DEGREE must be positive")
        return d
    return 4 * L + 4 * K + 3


def _load_hypersurface(args, inputs: dict, role: str = "input") -> Hypersurface:
    """Either a JSON file path or a --family generator."""
    path = getattr(args, role, None)
    family = getattr(args, "family", None) if role == "input" else None
    if family is not None:
        if path is not None:
            raise FormatError("give either an input file or --family, not both")
        j = args.j
        if family == "mc":
            degree = args.degree or _default_degree(j, j)
            M = family_mc(Fraction(args.c), j, degree=degree)
        elif family == "nb":
            degree = args.degree or _default_degree(1, j)
            b = ExactComplex(Fraction(args.b_re), Fraction(args.b_im))
            if b.is_zero():
                raise ValidationError("family nb needs a nonzero coefficient b")
            M = family_nb(b, j, degree=degree)
        else:
            degree = args.degree or _default_degree(1, 1)
            M = family_b0(degree=degree)
        payload = cio.dump_json(cio.hypersurface_dict(M)).encode("utf-8")
        inputs[role] = {"family": family, "sha256": _sha256_bytes(payload)}
        return M
    if path is None:
        raise FormatError(f"missing {role} hypersurface (file path or --family)")
    with open(path, "rb") as fh:
        raw = fh.read()
    inputs[role] = {"path": path, "sha256": _sha256_bytes(raw)}
    obj = cio.load_json(path)
    return cio.parse_hypersurface(obj, degree=args.degree)


def _load_json_input(path: str, inputs: dict, role: str):
    with open(path, "rb") as fh:
        raw = fh.read()
    inputs[role] = {"path": path, "sha256": _sha256_bytes(raw)}
    return cio.load_json(path)


# -- subcommand bodies --------------------------------------------------------

def _cmd_validate(args, inputs):
    M = _load_hypersurface(args, inputs)
    return {"valid": True, "invariants": M.invariants.as_dict()}


def _cmd_invariants(args, inputs):
    M = _load_hypersurface(args, inputs)
    return {"invariants": M.invariants.as_dict()}


def _cmd_upsilon(args, inputs):
    M = _load_hypersurface(args, inputs)
    mode = SYMBOLIC if args.n is None else args.n
    U = build_upsilon(M, mode)
    return {"n": "symbolic" if args.n is None else args.n,
            "L": U.L, "K": U.K, "T": U.T,
            "components": [cio.series_dict(c) for c in U.components]}


def _cmd_dset(args, inputs):
    M = _load_hypersurface(args, inputs)
    analysis = compute_D(M, scan_bound=args.scan_bound)
    if len(analysis.D) > 2 * analysis.gamma:
        raise MathInconsistency(
            f"|D| = {len(analysis.D)} exceeds the bound 2*gamma = {2 * analysis.gamma}")
    if 0 not in analysis.D:
        raise MathInconsistency("0 is not in D, contradicting rank theory")
    return {"analysis": analysis.as_dict()}


def _cmd_jet_order(args, inputs):
    M = _load_hypersurface(args, inputs)
    analysis = compute_D(M, scan_bound=args.scan_bound)
    return {"k": analysis.k, "D": analysis.D}


def _cmd_verify(args, inputs):
    M = _load_hypersurface(args, inputs, role="source")
    Mhat = _load_hypersurface(args, inputs, role="target")
    H = cio.parse_formal_map(_load_json_input(args.map, inputs, "map"))
    rep = verify_map(M, Mhat, H, order=args.order)
    result = {"residual_zero": rep.is_zero,
              "certified_to_degree": rep.certified_to_degree}
    if not rep.is_zero:
        exps, c = rep.first_offending
        result["first_offending"] = {
            "monomial": dict(zip(rep.residual.variables, exps)),
            "re": rational_str(ExactComplex.coerce(c).re),
            "im": rational_str(ExactComplex.coerce(c).im)}
        raise ReportedFailure(result, "mapping-identity residual is nonzero")
    return result


def _cmd_reconstruct(args, inputs):
    M = _load_hypersurface(args, inputs, role="source")
    Mhat = _load_hypersurface(args, inputs, role="target")
    jet = cio.parse_jet_data(_load_json_input(args.jet, inputs, "jet"))
    analysis = compute_D(M, scan_bound=args.scan_bound)
    order = args.order if args.order is not None else analysis.k
    H = reconstruct(M, Mhat, jet, order=order, D=analysis.D)
    rep = verify_map(M, Mhat, H)
    if not rep.is_zero:
        raise MathInconsistency("reconstructed map fails verification")
    return {"D": analysis.D, "k": analysis.k, "order": order,
            "map": cio.formal_map_dict(H),
            "verified_to_degree": rep.certified_to_degree}


def _cmd_determination(args, inputs):
    M = _load_hypersurface(args, inputs, role="source")
    Mhat = _load_hypersurface(args, inputs, role="target")
    H1 = cio.parse_formal_map(_load_json_input(args.map1, inputs, "map1"))
    H2 = cio.parse_formal_map(_load_json_input(args.map2, inputs, "map2"))
    k = args.k if args.k is not None else compute_D(M, scan_bound=args.scan_bound).k
    report = finite_determination_check(M, Mhat, H1, H2, k)
    result = {"k": k, "status": report["status"]}
    for key in ("reason", "component", "order"):
        if key in report:
            result[key] = list(report[key]) if isinstance(report[key], tuple) else report[key]
    if report["status"] == "fail":
        raise ReportedFailure(result, "maps with equal jets differ")
    return result


class ReportedFailure(Exception):
    """A mathematically meaningful negative result: report it, exit 3."""

    def __init__(self, result, message):
        super().__init__(message)
        self.result = result


# -- plumbing -----------------------------------------------------------------

def _add_hypersurface_opts(p, roles=("input",)):
    if roles == ("input",):
        p.add_argument("input", nargs="?", help="hypersurface JSON file")
        p.add_argument("--family", choices=("mc", "nb", "b0"),
                       help="use a built-in family instead of a file")
        p.add_argument("--c", default="1", help="coefficient c for --family mc")
        p.add_argument("--j", type=int, default=1, help="index j for --family mc/nb")
        p.add_argument("--b-re", default="1", help="Re b for --family nb")
        p.add_argument("--b-im", default="0", help="Im b for --family nb")
    else:
        for role in roles:
            p.add_argument(role, help=f"{role} hypersurface JSON file")
    p.add_argument("--degree", type=int, default=None,
                   help="truncation degree (default 4L+4K+3 for families, "
                        "or CRJET_DEFAULT_DEGREE)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crjet",
        description="Exact formal invariants and equivalences of "
                    "1-infinite-type hypersurfaces in C^2")
    ap.add_argument("--text", action="store_true",
                    help="aligned-text report instead of JSON")
    ap.add_argument("--parallel", action="store_true",
                    help="allow parallel fixed-n builds (output is identical)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check normality, reality, 1-infinite type")
    _add_hypersurface_opts(p)

    p = sub.add_parser("invariants", help="compute (m, r, L, K, T)")
    _add_hypersurface_opts(p)

    p = sub.add_parser("upsilon", help="build the 4-component jet family")
    _add_hypersurface_opts(p)
    p.add_argument("--n", type=int, default=None,
                   help="fixed weight (default: symbolic in n)")

    for name, helptext in (("dset", "exceptional set D and jet order k"),
                           ("jet-order", "jet order k only")):
        p = sub.add_parser(name, help=helptext)
        _add_hypersurface_opts(p)
        p.add_argument("--scan-bound", type=int, default=None,
                       help="jet scan bound (default 3K+3L+2)")

    p = sub.add_parser("verify", help="check a formal map against the mapping identity")
    _add_hypersurface_opts(p, roles=("source", "target"))
    p.add_argument("map", help="formal map JSON file")
    p.add_argument("--order", type=int, default=None, help="truncate checking order")

    p = sub.add_parser("reconstruct", help="rebuild an equivalence from jet data")
    _add_hypersurface_opts(p, roles=("source", "target"))
    p.add_argument("jet", help="jet data JSON file")
    p.add_argument("--order", type=int, default=None,
                   help="reconstruction order (default: jet order k)")
    p.add_argument("--scan-bound", type=int, default=None)

    p = sub.add_parser("determination", help="equal k-jets imply equal maps")
    _add_hypersurface_opts(p, roles=("source", "target"))
    p.add_argument("map1")
    p.add_argument("map2")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--scan-bound", type=int, default=None)
    return ap


_BODIES = {
    "validate": _cmd_validate,
    "invariants": _cmd_invariants,
    "upsilon": _cmd_upsilon,
    "dset": _cmd_dset,
    "jet-order": _cmd_jet_order,
    "verify": _cmd_verify,
    "reconstruct": _cmd_reconstruct,
    "determination": _cmd_determination,
}


def _resolved_options(args) -> dict:
    skip = {"command", "text", "input", "source", "target", "map", "map1",
            "map2", "jet"}
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in skip or val is None:
            continue
        out[key] = val
    return out


def _render_text(obj, indent=0, lines=None):
    lines = [] if lines is None else lines
    pad = "  " * indent
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        for k in sorted(obj, key=str):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}:")
                _render_text(v, indent + 1, lines)
            else:
                lines.append(f"{pad}{str(k).ljust(width)}  {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                _render_text(v, indent + 1, lines)
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _emit(report, as_text: bool):
    if as_text:
        sys.stdout.write("\n".join(_render_text(report)) + "\n")
    else:
        sys.stdout.write(cio.dump_json(report))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    inputs = {}
    report = {"command": args.command, "options": _resolved_options(args),
              "inputs": inputs}
    try:
        report["result"] = _BODIES[args.command](args, inputs)
    except ReportedFailure as exc:
        report["result"] = exc.result
        report["error"] = str(exc)
        _emit(report, args.text)
        return EXIT_MATH
    except ValidationError as exc:
        report["error"] = str(exc)
        _emit(report, args.text)
        return EXIT_INVALID
    except (MathInconsistency, EquivalenceError, JetRealizationError,
            UpsilonError) as exc:
        report["error"] = str(exc)
        _emit(report, args.text)
        return EXIT_MATH
    except (FormatError, OSError) as exc:
        report["error"] = str(exc)
        _emit(report, args.text)
        return EXIT_IO
    _emit(report, args.text)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
