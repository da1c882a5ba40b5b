"""Command-line front end.

Every command prints one JSON document on standard output.  Exit codes:
0 for a decided verdict (NE or NonNE) or a completed report, 2 for an
Inconclusive verdict, 1 for errors (rendered as ``{"error": {...}}``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from .cone import tangent_cone
from .curves import Status, Verdict, plane_curve_ne, space_curve_ne
from .errors import DomainError, LipneError
from .parser import parse_polynomial
from .poly import squarefree_part
from .puiseux import DEFAULT_PRECISION, PuiseuxBranch, SpaceBranch, puiseux_expand
from .revalidate import revalidate
from .slicer import SliceConfig, brieskorn_test, certificate_from_dict, sectional_test
from .witness import WitnessConfig, build_arc_pair, witness_report

PRECISION_ENV = "LIPNE_PRECISION"
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def load_schema() -> dict:
    return json.loads(resources.files("lipne").joinpath("schema.json").read_text("utf-8"))


def _precision(text: str) -> int:
    value = int(text)
    if not 64 <= value <= 4096:
        raise argparse.ArgumentTypeError("precision must lie in [64, 4096]")
    return value


def _attempts(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 1024:
        raise argparse.ArgumentTypeError("attempts must lie in [1, 1024]")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("expected a positive number")
    return value


def _variables(text: str | None):
    if text is None:
        return None
    names = [v.strip() for v in text.split(",") if v.strip()]
    if not names:
        raise argparse.ArgumentTypeError("empty variable list")
    return names


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return _precision(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise SystemExit(f"{PRECISION_ENV}={raw!r} is not a precision in [64, 4096]")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=_precision, default=None,
                        help=f"working precision in bits (default ${PRECISION_ENV} or 128)")
    common.add_argument("--output", "-o", type=Path, help="also write the JSON document here")
    common.add_argument("--vars", type=_variables, help="comma-separated variable order")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--attempts", type=_attempts, default=32)

    parser = argparse.ArgumentParser(
        prog="lipne", description="Lipschitz normal embedding tests for complex germs.")
    parser.add_argument("--json-schema", action="store_true", help="print the output schema and exit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("tangent-cone", parents=[common], help="initial form and its multiplicities")
    p.add_argument("expr")

    p = sub.add_parser("plane-curve", parents=[common], help="decide NE for a plane curve")
    p.add_argument("expr")
    p.add_argument("--branches", action="store_true", help="include the Puiseux expansion")
    p.add_argument("--truncation", type=Fraction, default=None,
                   help="minimum exponent for the Puiseux series")

    p = sub.add_parser("space-curve", parents=[common], help="decide NE from a JSON branch list")
    p.add_argument("file", help="JSON file with {'branches': [...]} (plane or space form), or - for stdin")

    p = sub.add_parser("slice-test", parents=[common, search], help="sectional non-NE test")
    p.add_argument("expr")
    p.add_argument("--line-attempts", type=_attempts, default=32)
    p.add_argument("--no-shortcut", action="store_true",
                   help="skip the tangent-cone shortcut and always slice")

    p = sub.add_parser("brieskorn", parents=[common], help="Pham-Brieskorn exponent test")
    p.add_argument("exponents", help="comma-separated exponents, e.g. 2,3,3")
    p.add_argument("--coefficients", help="comma-separated nonzero coefficients")

    p = sub.add_parser("witness", parents=[common, search], help="numeric arc-pair witness")
    p.add_argument("source", help="plane curve, hypersurface, or certificate file")
    p.add_argument("--samples", type=_positive_int, default=16)
    p.add_argument("--epsilon", type=_positive_float, default=None)
    p.add_argument("--csv", type=Path, help="write the sample table as CSV")
    p.add_argument("--allow-ne", action="store_true",
                   help="accept NE curves and use a transversal pair (control runs)")

    p = sub.add_parser("revalidate", parents=[common], help="re-check a verdict file")
    p.add_argument("file")
    return parser


def _read_json(path: str) -> dict:
    text = sys.stdin.read() if path == "-" else Path(path).read_text("utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})")


def _verdict_exit(v: Verdict) -> int:
    return EXIT_INCONCLUSIVE if v.status is Status.INCONCLUSIVE else EXIT_OK


def _cmd_tangent_cone(args, prec):
    f = parse_polynomial(args.expr, args.vars)
    cone = tangent_cone(f, prec)
    return {"schema": "lipne-cone/1", "input": {"polynomial": str(f), "variables": list(f.variables)},
            **cone.to_dict()}, EXIT_OK


def _cmd_plane_curve(args, prec):
    f = parse_polynomial(args.expr, args.vars)
    v = plane_curve_ne(f)
    doc = v.to_dict()
    if args.branches:
        branches = puiseux_expand(squarefree_part(f), args.truncation, prec)
        doc["branches"] = [b.to_dict() for b in branches]
    return doc, _verdict_exit(v)


def _cmd_space_curve(args, prec):
    data = _read_json(args.file)
    raw = data["branches"] if isinstance(data, dict) else data
    branches = [SpaceBranch.from_plane(PuiseuxBranch.from_dict(b, prec)) if "terms" in b
                else SpaceBranch.from_dict(b, prec) for b in raw]
    # plane-curve output is accepted too; the echo is always in space form
    v = space_curve_ne(branches, echo={"branches": [b.to_dict() for b in branches]})
    return v.to_dict(), _verdict_exit(v)


def _cmd_slice_test(args, prec):
    f = parse_polynomial(args.expr, args.vars)
    config = SliceConfig(seed=args.seed, attempts=args.attempts, line_attempts=args.line_attempts,
                         use_cone_shortcut=not args.no_shortcut)
    v = sectional_test(f, config)
    return v.to_dict(), _verdict_exit(v)


def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _cmd_brieskorn(args, prec):
    try:
        exps = [int(t) for t in _split(args.exponents)]
    except ValueError:
        raise DomainError("exponents must be integers")
    coeffs = None
    if args.coefficients:
        coeffs = [parse_polynomial(t, ()).constant_coefficient() for t in _split(args.coefficients)]
    v = brieskorn_test(exps, coeffs)
    return v.to_dict(), _verdict_exit(v)


def _witness_source(args):
    path = Path(args.source)
    if path.suffix == ".json" or path.is_file():
        data = _read_json(args.source)
        if "reason" in data:
            if data["reason"].get("kind") != "SliceWitness":
                raise DomainError("verdict file does not contain a slice certificate")
            data = data["reason"]["certificate"]
        return certificate_from_dict(data)
    f = parse_polynomial(args.source, args.vars)
    if f.nvars == 2:
        return f
    v = sectional_test(f, SliceConfig(seed=args.seed, attempts=args.attempts, use_cone_shortcut=False))
    if v.reason.kind != "SliceWitness":
        raise DomainError(f"no non-NE slice found ({v.status.value}); nothing to witness")
    return certificate_from_dict(v.reason.data["certificate"])


def _cmd_witness(args, prec):
    config = WitnessConfig(seed=args.seed, attempts=args.attempts, samples=args.samples,
                           epsilon=args.epsilon, precision=prec, require_non_ne=not args.allow_ne)
    report = witness_report(build_arc_pair(_witness_source(args), config), config)
    if args.csv:
        args.csv.write_text(report.to_csv(), encoding="utf-8")
    code = EXIT_INCONCLUSIVE if report.conclusion == "Inconclusive" else EXIT_OK
    return report.to_dict(), code


def _cmd_revalidate(args, prec):
    result = revalidate(_read_json(args.file))
    code = {True: EXIT_OK, False: EXIT_ERROR, None: EXIT_INCONCLUSIVE}[result.ok]
    return result.to_dict(), code


COMMANDS = {
    "tangent-cone": _cmd_tangent_cone,
    "plane-curve": _cmd_plane_curve,
    "space-curve": _cmd_space_curve,
    "slice-test": _cmd_slice_test,
    "brieskorn": _cmd_brieskorn,
    "witness": _cmd_witness,
    "revalidate": _cmd_revalidate,
}


def _emit(doc: dict, output: Path | None, stream) -> None:
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    stream.write(text)
    if output is not None:
        output.write_text(text, encoding="utf-8")


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.json_schema:
        _emit(load_schema(), None, stdout)
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_ERROR
    prec = args.precision or _default_precision()
    try:
        doc, code = COMMANDS[args.command](args, prec)
    except LipneError as exc:
        doc, code = {"error": exc.to_dict()}, EXIT_ERROR
    except (OSError, KeyError, TypeError, ValueError) as exc:
        doc = {"error": {"type": type(exc).__name__, "message": str(exc), "retryable": False}}
        code = EXIT_ERROR
    _emit(doc, getattr(args, "output", None), stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
