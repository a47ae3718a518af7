"""Command-line front end.

  skewcanon canonicalize pair.json -o report.json
  skewcanon generate spec.json --seed 3 -o pair.json --with-reference ref.json
  skewcanon verify pair.json report.json
  skewcanon minpoly pair.json

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 verification failed.
"""

from __future__ import annotations

import argparse
import sys

from . import io
from .blocks import CanonicalForm, format_block
from .builders import canonicalize
from .errors import FormatError, InputError, NumericalFailure
from .oracle import generate_pair, verify_report
from .spectral import factorize

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 1, 2, 3


def _context(args, default_mode: str):
    return io.context_for(args.mode or default_mode, args.tol_rank, args.tol_cluster)


def _load_pair(path, args):
    obj = io.read_json(path)
    ctx = _context(args, obj.get("mode", "exact") if isinstance(obj, dict) else "exact")
    return io.pair_from_dict(obj, ctx)


def _emit(text: str, out) -> None:
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def _summary(form) -> str:
    return " + ".join(map(format_block, form.blocks))


def cmd_canonicalize(args) -> int:
    pair = _load_pair(args.pair, args)
    form, basis = canonicalize(pair)
    report = verify_report(pair, form, basis)
    _emit(io.dumps(io.report_to_dict(form, basis, pair.ctx, report)), args.output)
    if args.output:
        print(_summary(form))
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_generate(args) -> int:
    spec = io.spec_from_dict(io.read_json(args.spec), args.seed)
    pair, reference = generate_pair(spec)
    _emit(io.dumps(io.pair_to_dict(pair)), args.output)
    if args.with_reference:
        form = CanonicalForm(spec.blocks)
        io.write_text(args.with_reference,
                      io.dumps(io.report_to_dict(form, reference, pair.ctx)))
    return EXIT_OK


def cmd_verify(args) -> int:
    pair = _load_pair(args.pair, args)
    form, basis, _ = io.report_from_dict(io.read_json(args.report), pair.ctx)
    if form.dim != pair.dim:
        raise FormatError(f"FormatError: report has dimension {form.dim}, pair has {pair.dim}")
    report = verify_report(pair, form, basis)
    fields = report.as_dict()
    width = max(map(len, fields))
    lines = [f"{k.ljust(width)}  {v}" for k, v in fields.items()]
    lines += [f"note: {n}" for n in report.notes]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_minpoly(args) -> int:
    pair = _load_pair(args.pair, args)
    _emit(factorize(pair).describe() + "\n", args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=io.MODES, help="override the arithmetic mode of the input")
    common.add_argument("--tol-rank", type=float, help="relative singular-value threshold (float mode)")
    common.add_argument("--tol-cluster", type=float, help="root clustering radius (float mode)")
    common.add_argument("-o", "--output", help="write machine output here instead of stdout")

    ap = argparse.ArgumentParser(prog="skewcanon",
                                 description="Canonical forms of skewadjoint operators "
                                             "on pseudo-Euclidean spaces.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("canonicalize", parents=[common], help="pair file -> report file")
    p.add_argument("pair")
    p.set_defaults(func=cmd_canonicalize)
    p = sub.add_parser("generate", parents=[common], help="generator spec -> scrambled pair")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, help="scramble seed (overrides the one in the spec file)")
    p.add_argument("--with-reference", metavar="PATH", help="also write the reference report")
    p.set_defaults(func=cmd_generate)
    p = sub.add_parser("verify", parents=[common], help="check a report against a pair")
    p.add_argument("pair")
    p.add_argument("report")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("minpoly", parents=[common], help="print the factored minimal polynomial")
    p.add_argument("pair")
    p.set_defaults(func=cmd_minpoly)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: InputError: cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
