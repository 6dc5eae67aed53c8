"""``permqubo`` command line: build, verify, sample, stats, export.

Exit codes: 0 pass, 1 verification mismatch, 2 usage error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .encodings import CONSTRAINTS, Encoding, Recipe, build, check_permutation
from .formats import (
    InstanceError,
    dumps,
    encoding_to_json,
    ising_text,
    read_instance,
    samples_to_json,
    to_ising,
    to_qubo,
)
from .networks import TOPOLOGIES

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
KINDS = ("perm", "matrix", "match", "compose", "commute", "conjugate", "matrix_compose")


class UsageError(Exception):
    pass


def _perm_arg(text: str) -> tuple[int, ...]:
    try:
        return check_permutation(int(v) for v in text.replace(",", " ").split())
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _constraint(items: Sequence[str]) -> tuple:
    name, args = items[0], list(items[1:])
    if name not in CONSTRAINTS:
        raise UsageError(f"unknown constraint {name!r}; choose from {', '.join(CONSTRAINTS)}")
    arity = {"value": 2, "forbid": 2, "fixed_point": 1, "derangement": 0, "forbid_perm": 1,
             "involution": 0, "parity": 1, "power": 1, "order": 1}[name]
    if len(args) != arity:
        raise UsageError(f"constraint {name} takes {arity} argument(s), got {len(args)}")
    if name == "forbid_perm":
        return (name, _perm_arg(args[0]))
    if name == "parity":
        if args[0] not in ("even", "odd"):
            raise UsageError("parity takes 'even' or 'odd'")
        return (name, args[0])
    try:
        return (name, *(int(a) for a in args))
    except ValueError as exc:
        raise UsageError(f"constraint {name}: {exc}") from exc


def recipe_from_args(args) -> Recipe:
    constraints = tuple(_constraint(c) for c in (args.constraint or []))
    pattern = _perm_arg(args.pattern) if args.pattern else None
    if args.kind == "match" and pattern is None:
        raise UsageError("match needs --pattern")
    recipe = Recipe(args.kind, args.n, args.network, args.k, constraints, pattern)
    if args.fixed:
        if args.kind not in ("commute", "conjugate"):
            raise UsageError("--fixed applies to commute and conjugate")
        group = "x'" if args.kind == "commute" else "x"
        try:
            recipe = recipe.with_fixed(group, _perm_arg(args.fixed))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return recipe


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_build(args) -> int:
    recipe = recipe_from_args(args)
    try:
        e = build(recipe)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(dumps(encoding_to_json(e)), args.output)
    return EXIT_OK


def verify_report(inst) -> tuple[dict, bool]:
    from .verify import oracle, uniformity_check

    e: Encoding = inst.encoding
    report = uniformity_check(_with_poly(e, inst.poly))
    out = report.to_json()
    out["poly_matches_recipe"] = inst.poly_matches_recipe
    out["uniform_expected"] = e.uniform_expected
    ok = inst.poly_matches_recipe and report.invalid == 0
    if e.n <= 6:
        expected = oracle(e)
        out["oracle_count"] = len(expected)
        out["oracle_match"] = report.decoded == expected
        ok = ok and out["oracle_match"]
    if e.uniform_expected:
        ok = ok and report.uniform
    out["pass"] = ok
    return out, ok


def _with_poly(e: Encoding, poly) -> Encoding:
    from dataclasses import replace

    return replace(e, poly=poly)


def cmd_verify(args) -> int:
    from .verify import CapExceeded, CertificateError

    inst = read_instance(args.file)
    try:
        out, ok = verify_report(inst)
    except (CapExceeded, CertificateError) as exc:
        _write(dumps({"error": str(exc), "pass": False}), args.output)
        return EXIT_CAP
    _write(dumps(out), args.output)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_sample(args) -> int:
    from .solve import AnnealParams, sa_sample, sample_stats

    inst = read_instance(args.file)
    try:
        params = AnnealParams(args.sweeps, args.reads, args.beta_start, args.beta_end, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    e = inst.encoding
    samples = sa_sample(inst.poly, params, range(len(e.registry)))
    stats = sample_stats(samples, e)
    _write(dumps(samples_to_json(e, samples, params, stats)), args.output)
    return EXIT_OK


def cmd_stats(args) -> int:
    from .stats import stats_report

    inst = read_instance(args.file)
    _write(dumps(stats_report(inst.encoding, inst.poly).to_json()), args.output)
    return EXIT_OK


def cmd_export(args) -> int:
    inst = read_instance(args.file)
    if args.format == "qubo":
        meta = inst.encoding.meta
        text = to_qubo(inst.poly, len(inst.encoding.registry),
                       comment=f"{meta['construction']} n={meta['n']} k={meta['k']}")
    else:
        text = ising_text(to_ising(inst.poly))
    _write(text, args.output)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permqubo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write an instance file")
    b.add_argument("kind", choices=KINDS)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--network", choices=TOPOLOGIES, default="batcher")
    b.add_argument("--k", type=int, default=None, help="bus width override")
    b.add_argument("--constraint", nargs="+", action="append", metavar="NAME",
                   help="e.g. 'derangement', 'value 1 2', 'forbid_perm 3,2,1', 'parity even'")
    b.add_argument("--pattern", help="pattern for match, e.g. 2,1")
    b.add_argument("--fixed", help="pin pi' (commute) or pi (conjugate), e.g. 2,3,1")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="enumerate the zero set and compare with the oracle")
    v.add_argument("file")
    v.add_argument("-o", "--output")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sample", help="simulated annealing")
    s.add_argument("file")
    s.add_argument("--reads", type=int, default=10)
    s.add_argument("--sweeps", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--beta-start", type=float, default=0.1)
    s.add_argument("--beta-end", type=float, default=10.0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sample)

    t = sub.add_parser("stats", help="size and sparsity report")
    t.add_argument("file")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_stats)

    x = sub.add_parser("export", help="write .qubo or Ising text")
    x.add_argument("file")
    x.add_argument("--format", choices=("qubo", "ising"), default="qubo")
    x.add_argument("-o", "--output")
    x.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceError, OSError) as exc:
        print(f"permqubo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
