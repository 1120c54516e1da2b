"""Command-line entry point.

    afstruct verify [--config PATH] [--out PATH] [--format json|csv]
    afstruct induce (--sphere --R R | --product --r r --r3 r3) --p P --q Q --point x1,x2,...
    afstruct version

Exit codes: 0 all checks passed, 1 some identity failed, 2 bad
configuration or input, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, SIGN_PATTERNS, default_config_text, parse_config, resolve_signs
from .errors import InvalidInputError
from .geometry import BlockSwap
from .induction import induce_at_point
from .report import dumps, render, write_atomic
from .submanifolds import Hypersphere, ProductOfSpheres
from .verification import run_full_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_IO = 3


def _err(msg: str) -> None:
    print(f"afstruct: {msg}", file=sys.stderr)


def cmd_verify(args) -> int:
    if args.config is None:
        text = default_config_text()
    else:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except FileNotFoundError:
            _err(f"{args.config}: file not found")
            return EXIT_IO
        except OSError as exc:
            _err(f"{args.config}: {exc.strerror or exc}")
            return EXIT_IO
    try:
        config = parse_config(text)
    except ConfigError as exc:
        for problem in exc.problems:
            _err(f"{args.config or '<default>'}: {problem}")
        return EXIT_INPUT
    fmt = args.format or config.format
    out = args.out or config.output_path

    report = run_full_suite(config)
    try:
        write_atomic(out, render(report, fmt))
    except OSError as exc:
        _err(f"{out}: {exc.strerror or exc}")
        return EXIT_IO

    failures = report.failures()
    n = sum(len(c.reports) for c in report.cases)
    print(f"{len(report.cases)} cases, {n} reports, {len(failures)} failed -> {out}")
    for case_index, r in failures:
        print(f"FAIL case {case_index} {r.identity_id}: max_residual={r.max_residual:.3e} > tol={r.tolerance:.1e}")
    return EXIT_OK if not failures else EXIT_FAILED


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise InvalidInputError(f"--point: expected comma-separated numbers, got {text!r}") from exc


def cmd_induce(args) -> int:
    try:
        problems: list[str] = []
        nu, _ = resolve_signs(args.nu, args.p, "--nu", problems)
        eps, _ = resolve_signs(args.eps, args.q, "--eps", problems)
        if problems:
            raise InvalidInputError("; ".join(problems))
        s = BlockSwap(args.p, args.q, nu, eps)
        if args.product:
            if args.r is None or args.r3 is None:
                raise InvalidInputError("--product needs --r and --r3")
            sub = ProductOfSpheres(args.p, args.q, args.r, args.r3)
            kind = "product"
        else:
            if args.R is None:
                raise InvalidInputError("--sphere needs --R")
            sub = Hypersphere(s.m, args.R)
            kind = "sphere"
        coords = _floats(args.point)
        if coords.shape != (sub.m,):
            raise InvalidInputError(f"--point needs {sub.m} coordinates, got {coords.size}")
        residual = float(sub.membership_residual(coords))
        if residual > args.tol:
            _err(f"point is not on the {kind}: membership residual {residual:.17g} > {args.tol:g}")
            return EXIT_INPUT
        st = induce_at_point(s, sub, sub.point(coords, args.tol))
    except InvalidInputError as exc:
        _err(str(exc))
        return EXIT_INPUT

    out = {"manifold": kind, "point": coords.tolist(), "a": st.a.tolist()}
    for i in range(st.codim):
        out[f"N{i + 1}"] = st.frame[i].tolist()
        out[f"xi{i + 1}"] = st.xi[i].tolist()
        for j in range(st.codim):
            out[f"a{i + 1}{j + 1}"] = float(st.a[i, j])
    sys.stdout.write(dumps(dict(sorted(out.items()))))
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"afstruct {__version__}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afstruct", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the identity suite and write a report")
    v.add_argument("--config", help="TOML suite configuration (default: bundled grid)")
    v.add_argument("--out", help="report path (overrides the config)")
    v.add_argument("--format", choices=("json", "csv"), help="report format (overrides the config)")
    v.set_defaults(func=cmd_verify)

    i = sub.add_parser("induce", help="print the induced structure at one point")
    which = i.add_mutually_exclusive_group(required=True)
    which.add_argument("--sphere", action="store_true", help="hypersphere of radius --R in E^(2p+q)")
    which.add_argument("--product", action="store_true", help="S^(2p-1)(r) x S^(q-1)(r3)")
    i.add_argument("--p", type=int, required=True)
    i.add_argument("--q", type=int, required=True)
    names = ", ".join(sorted(SIGN_PATTERNS))
    i.add_argument("--nu", default="plus", help=f"signs for the swap block ({names}, or a +/- string)")
    i.add_argument("--eps", default="plus", help=f"signs for the z block ({names}, or a +/- string)")
    i.add_argument("--R", type=float)
    i.add_argument("--r", type=float)
    i.add_argument("--r3", type=float)
    i.add_argument("--point", required=True, help="comma-separated coordinates (use --point=-1,0,0 for a leading minus)")
    i.add_argument("--tol", type=float, default=1e-10, help="relative membership tolerance")
    i.set_defaults(func=cmd_induce)

    ver = sub.add_parser("version", help="print the version")
    ver.set_defaults(func=cmd_version)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
