"""Command-line front end: ``subdiv <command> [options]``.

Exit status is 0 on success, 1 when a verification finds a failure and 2 on
bad arguments or configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from . import blockgraph, characterize as ch, holding, reductions
from .automata import DfaoValidationError, build_dfao, kernel_report
from .engine import (
    SCHEMA_VERSION,
    ConfigurationError,
    GameSpec,
    SubtractDisallowed,
    VirtualValue,
    build_table,
    to_csv,
    to_json,
)

OUT_DIR_ENV = "SUBDIV_OUT_DIR"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def load_overrides(path: Optional[str]) -> dict[int, int]:
    """Read ``index,value`` lines; indices must run 1, 2, 3, ... without gaps."""
    if not path:
        return {}
    out: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ConfigurationError(f"{path}:{lineno}: expected 'index,value'")
            try:
                i, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ConfigurationError(f"{path}:{lineno}: not integers: {line!r}") from None
            if v not in (0, 1, 2):
                raise ConfigurationError(f"{path}:{lineno}: value {v} not in 0..2")
            if i != len(out) + 1:
                raise ConfigurationError(f"{path}:{lineno}: expected index {len(out) + 1}, got {i}")
            out[i] = v
    return out


def _spec(args) -> GameSpec:
    if args.boundary == "disallowed":
        boundary = SubtractDisallowed()
    else:
        boundary = VirtualValue(args.virtual_value)
    ov = load_overrides(getattr(args, "overrides", None) or getattr(args, "prefix_file", None))
    return GameSpec(args.a, args.b, boundary, tuple(ov.items()))


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if not out:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    path = Path(out)
    if not path.is_absolute() and os.environ.get(OUT_DIR_ENV):
        path = Path(os.environ[OUT_DIR_ENV]) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _json(args, payload: dict) -> None:
    _emit(args, json.dumps({"schema": SCHEMA_VERSION, **payload}, indent=2, sort_keys=False))


def _half(b: int) -> int:
    if b % 2:
        raise ConfigurationError("this command needs an even b")
    return b // 2


# ----------------------------------------------------------------- commands


def cmd_compute(args) -> int:
    spec = _spec(args)
    table = build_table(spec, args.max)
    if args.format == "csv":
        _emit(args, to_csv(table))
    elif args.format == "json":
        _emit(args, to_json(table))
    else:
        _emit(args, ",".join(map(str, table.as_list())))
    return EXIT_OK


def cmd_characterize(args) -> int:
    spec = _spec(args)
    d = _half(spec.b)
    n = args.n
    if spec.a == 1 and not spec.overrides:
        v = ch.characterize_1_2d(n, d, literal=args.literal)
        size = n
    elif spec.a == 1:
        N = args.N or (max(spec.override_map) + 1)
        th = ch.perturbed_thresholds(d, N)
        size = max(n, th["table"] + 4 * d * d)
        table = build_table(spec, size)
        v = ch.characterize_perturbed(n, d, N, table, args.min_index, args.min_reduced)
    else:
        size = max(n, spec.a * (2 * d) ** (spec.a + 2) + spec.a)
        table = build_table(spec, size)
        v = ch.characterize_a_2d(n, spec.a, d, table, prefix_len=args.prefix_len)
    payload = {"spec": spec.to_dict(), "n": n, **v.to_dict()}
    if n <= args.engine_limit:
        payload["engine_value"] = build_table(spec, max(n, *spec.override_map, 1)).values[n].item()
    _json(args, payload)
    return EXIT_OK


def cmd_verify(args) -> int:
    spec = _spec(args)
    kw = {}
    if args.N:
        kw["N"] = args.N
    if args.prefix_len:
        kw["prefix_len"] = args.prefix_len
    if args.min_index:
        kw["min_index"] = args.min_index
    if args.min_reduced:
        kw["min_reduced"] = args.min_reduced
    size = args.max
    if args.oracle == "perturbed":
        N = args.N or (max(spec.override_map, default=0) + 1)
        size = max(size, ch.perturbed_thresholds(_half(spec.b), N)["table"] + 2 * spec.b**2)
    table = build_table(spec, size)
    rep = ch.verify_characterization(spec, args.max, args.oracle, table=table, **kw)
    _json(args, {"spec": spec.to_dict(), "oracle": args.oracle, "n_max": args.max, **rep.to_dict()})
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_holding(args) -> int:
    spec = _spec(args)
    prof = holding.holding_profile(spec, args.max)
    _json(args, prof.to_dict())
    good = prof.onset_observed is not None and prof.persistence_ok
    return EXIT_OK if good else EXIT_FAIL


def cmd_blockgraph(args) -> int:
    dg = blockgraph.build()
    if args.dot:
        _emit(args, blockgraph.to_dot(dg))
        return EXIT_OK
    rep = blockgraph.verify_all()
    _json(args, rep)
    return EXIT_OK if rep["ok"] else EXIT_FAIL


def cmd_reduce(args) -> int:
    d = _half(args.b)
    chain = reductions.reduce_to_base(args.n, d)
    _json(args, {"b": args.b, "n": args.n, **chain.to_dict(), "value": reductions.evaluate(args.n, d)})
    return EXIT_OK


def cmd_verify_rules(args) -> int:
    d = _half(args.b)
    rep = reductions.verify_rules(d, args.max, sub_checks=not args.no_sub_checks)
    _json(args, {"b": args.b, **rep.to_dict()})
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_kernel(args) -> int:
    spec = _spec(args)
    rep = kernel_report(spec, args.depth, args.prefix)
    _json(args, {"spec": spec.to_dict(), **rep.to_dict()})
    return EXIT_OK if rep.stabilized else EXIT_FAIL


def cmd_dfao(args) -> int:
    spec = _spec(args)
    try:
        dfao = build_dfao(spec, args.bound, L=args.prefix, e_max=args.depth)
    except DfaoValidationError as exc:
        _json(args, {"spec": spec.to_dict(), "validated": False, "n": exc.n,
                     "expected": exc.expected, "got": exc.got})
        return EXIT_FAIL
    payload = dfao.to_dict()
    payload["validated_to"] = args.bound
    _emit(args, json.dumps(payload))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subdiv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    def game(sp, a_default=1, need_a=True):
        if need_a:
            sp.add_argument("--a", type=_positive, default=a_default, help="subtraction amount")
        sp.add_argument("--b", type=_positive, default=2, help="division amount")
        sp.add_argument("--boundary", choices=["virtual", "disallowed"], default="virtual")
        sp.add_argument("--virtual-value", type=int, default=1, choices=[0, 1, 2])
        sp.add_argument("--overrides", metavar="FILE", help="index,value lines seeding 1..N-1")

    def common(sp):
        sp.add_argument("--out", metavar="FILE", help=f"write here (relative to ${OUT_DIR_ENV} if set)")
        sp.add_argument("--workers", type=_positive, default=1, help="accepted; sweeps run sequentially")
        sp.add_argument("--seed", type=int, default=0, help="accepted for reproducible runs")

    sp = sub.add_parser("compute", help="tabulate SG values")
    game(sp)
    sp.add_argument("--max", type=_positive, required=True)
    sp.add_argument("--format", choices=["list", "csv", "json"], default="list")
    common(sp)
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("characterize", help="zero verdict for one index")
    game(sp)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--prefix-file", metavar="FILE", help="same as --overrides")
    sp.add_argument("--N", type=_positive, help="perturbed prefix length (default: overrides + 1)")
    sp.add_argument("--prefix-len", type=_positive, help="treat block values as perturbed with this N")
    sp.add_argument("--min-index", type=_positive, help="lower threshold for the removal rule")
    sp.add_argument("--min-reduced", type=_positive, help="floor for the reduced index")
    sp.add_argument("--literal", action="store_true", help="use the unterminated-block reading verbatim")
    sp.add_argument("--engine-limit", type=int, default=10**7, help="also report the engine value up to here")
    common(sp)
    sp.set_defaults(func=cmd_characterize)

    sp = sub.add_parser("verify", help="compare an oracle with the engine")
    game(sp)
    sp.add_argument("--max", type=_positive, required=True)
    sp.add_argument("--oracle", choices=ch.ORACLES, required=True)
    sp.add_argument("--N", type=_positive)
    sp.add_argument("--prefix-len", type=_positive)
    sp.add_argument("--min-index", type=_positive)
    sp.add_argument("--min-reduced", type=_positive)
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("holding", help="holding profile of a game")
    game(sp)
    sp.add_argument("--max", type=_positive, default=10**5)
    common(sp)
    sp.set_defaults(func=cmd_holding)

    sp = sub.add_parser("blockgraph", help="triple digraph checks or DOT export")
    sp.add_argument("--dot", action="store_true", help="print the digraph in DOT format")
    sp.add_argument("--verify", action="store_true", help="run structural checks (default)")
    common(sp)
    sp.set_defaults(func=cmd_blockgraph)

    sp = sub.add_parser("reduce", help="reduction chain for one index of G_{1,b}")
    sp.add_argument("--b", type=_positive, default=2)
    sp.add_argument("--n", type=_positive, required=True)
    common(sp)
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("verify-rules", help="check every reduction rule against the engine")
    sp.add_argument("--b", type=_positive, default=2)
    sp.add_argument("--max", type=_positive, required=True)
    sp.add_argument("--no-sub-checks", action="store_true")
    common(sp)
    sp.set_defaults(func=cmd_verify_rules)

    sp = sub.add_parser("kernel", help="kernel class counts by depth")
    game(sp)
    sp.add_argument("--depth", type=_positive, default=6)
    sp.add_argument("--prefix", type=_positive, default=512)
    common(sp)
    sp.set_defaults(func=cmd_kernel)

    sp = sub.add_parser("dfao", help="build and validate an automaton with output")
    game(sp)
    sp.add_argument("--bound", type=_positive, default=10**5)
    sp.add_argument("--prefix", type=_positive, default=512)
    sp.add_argument("--depth", type=_positive, help="fixed kernel depth (default: grow until closed)")
    common(sp)
    sp.set_defaults(func=cmd_dfao)
    return p


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigurationError, OSError) as exc:
        print(f"subdiv: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
