"""Command-line front door: generate, extract, reconstruct, witness, sweep.

Every command reads and writes only its declared paths, prints a
machine-parsable tag as the first stdout line, and maps its outcome to a
fixed exit code:

    0  success (EXACT, ISOMORPHIC, WITNESS_FOUND, VALID, OK)
    1  I/O failure
    2  invalid flags, unparsable input, or invalid config
    3  NOT_APPLICABLE or NONE
    4  INCONSISTENT
    5  a witness that fails verification

Randomness always flows from an explicit seed flag; there is no implicit
time-based seeding.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from typing import Sequence

from shotgun.canon import read_ball_file, write_ball_file
from shotgun.graph import (
    GnpParams,
    extract_ball,
    format_edge_list,
    read_edge_list,
    sample_gnp,
    write_edge_list,
)
from shotgun.harness import (
    SweepConfig,
    run_sweep,
    summarize,
    write_sweep_csv,
)
from shotgun.reconstruct import (
    FAST,
    FULL,
    BallCollection,
    Outcome,
    assemble_small_components,
    hybrid_high_low_reconstruct,
    overlap_reconstruct,
    two_ball_reconstruct,
)
from shotgun.witness import (
    find_path_pair_witness,
    find_r1_witness,
    find_r2_witness,
    find_r3_witness,
    read_witness_file,
    verify_witness,
    write_witness_file,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_PARSE = 2
EXIT_NOT_APPLICABLE = 3
EXIT_INCONSISTENT = 4
EXIT_INVALID_WITNESS = 5

_OUTCOME_EXIT = {
    Outcome.EXACT: EXIT_OK,
    Outcome.ISOMORPHIC: EXIT_OK,
    Outcome.WITNESS_FOUND: EXIT_OK,
    Outcome.NOT_APPLICABLE: EXIT_NOT_APPLICABLE,
    Outcome.NONE: EXIT_NOT_APPLICABLE,
    Outcome.INCONSISTENT: EXIT_INCONSISTENT,
}

_GRAPH_FORMAT = 'edge list: first line "n m", then one "u v" line per edge'
_BALL_FORMAT = (
    'ball file: header "balls <count> <codes|full>"; codes lines are '
    '"root radius hex", full lines are "root radius k m u1 v1 u2 v2 ..."'
)
_WITNESS_FORMAT = (
    "witness file: lines witness/removed/added/actors/certificate/"
    "payload-g/payload-gprime as written by write_witness_file"
)


# =========================================================================
# Commands
# =========================================================================


def _cmd_gen(args: argparse.Namespace) -> int:
    g = sample_gnp(GnpParams(n=args.n, p=args.p, seed=args.seed))
    write_edge_list(g, args.out)
    print("OK")
    print(f"n={g.n} m={g.m} out={args.out}")
    return EXIT_OK


def _cmd_balls(args: argparse.Namespace) -> int:
    g = read_edge_list(args.in_path)
    balls = [extract_ball(g, v, args.r) for v in range(g.n)]
    write_ball_file(balls, args.out, mode=args.mode)
    print("OK")
    print(f"n={g.n} r={args.r} mode={args.mode} out={args.out}")
    return EXIT_OK


def _cmd_reconstruct(args: argparse.Namespace) -> int:
    bc = BallCollection.from_records(read_ball_file(args.in_path))
    if args.algo == "assemble":
        result = assemble_small_components(bc)
    elif args.algo == "overlap":
        result = overlap_reconstruct(bc, force_full_match=args.force_full_match)
    elif args.algo == "two-ball":
        result = two_ball_reconstruct(bc, FULL if args.match == "full" else FAST)
    else:
        result = hybrid_high_low_reconstruct(bc, p_hint=args.p_hint)
    # write the artifact before echoing to stdout so a closed pipe on the
    # consumer side cannot lose the file
    if result.graph is not None and args.out is not None:
        write_edge_list(result.graph, args.out)
    print(result.outcome.value)
    if result.note:
        print(f"note: {result.note}")
    if result.graph is not None:
        sys.stdout.write(format_edge_list(result.graph))
    return _OUTCOME_EXIT[result.outcome]


_FINDER_RADIUS = {"r1": 1, "r2": 2, "r3": 3}


def _cmd_witness(args: argparse.Namespace) -> int:
    g = read_edge_list(args.in_path)
    if args.finder == "path-pair":
        if args.r is None:
            raise ValueError("--finder path-pair requires --r")
        witness = find_path_pair_witness(g, args.r)
    else:
        implied = _FINDER_RADIUS[args.finder]
        if args.r is not None and args.r != implied:
            raise ValueError(
                f"--finder {args.finder} works at radius {implied}, got --r {args.r}"
            )
        if args.finder == "r1" or args.finder == "r2":
            if args.seed is None:
                raise ValueError(
                    f"--finder {args.finder} samples candidates and requires --seed"
                )
            find = find_r1_witness if args.finder == "r1" else find_r2_witness
            witness = find(g, budget=args.budget, p=args.p, seed=args.seed)
        else:
            if args.p is None:
                raise ValueError("--finder r3 requires --p (the sampling density)")
            witness = find_r3_witness(g, args.p)
    if witness is None:
        print("NONE")
        return EXIT_NOT_APPLICABLE
    report = verify_witness(g, witness)
    if not report.valid:
        print("INVALID_WITNESS")
        _print_report(report)
        return EXIT_INVALID_WITNESS
    if args.out is not None:
        write_witness_file(witness, args.out)
    print("WITNESS_FOUND")
    print(f"radius {witness.radius}")
    print(f"removed {len(witness.removed_edges)} added {len(witness.added_edges)}")
    print(f"kind {witness.certificate.kind}")
    _print_report(report)
    if args.out is not None:
        print(f"out {args.out}")
    return EXIT_OK


def _print_report(report) -> None:
    print(f"balls {'EQUAL' if report.balls_equal else 'UNEQUAL'}")
    print(f"certificate {'DIFFERS' if report.certificate_differs else 'SAME'}")
    if report.plain_codes_differ is not None:
        print(
            "plain-codes "
            + ("DIFFER" if report.plain_codes_differ else "IDENTICAL")
        )


def _cmd_verify(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    witness = read_witness_file(args.witness)
    try:
        report = verify_witness(g, witness, exact=args.exact)
    except ValueError as exc:
        print("INVALID")
        print(f"swap does not apply: {exc}")
        return EXIT_INVALID_WITNESS
    if report.valid:
        print("VALID")
        _print_report(report)
        return EXIT_OK
    print("INVALID")
    _print_report(report)
    return EXIT_INVALID_WITNESS


_CONFIG_FIELDS = {f.name for f in fields(SweepConfig)}


def _cmd_sweep(args: argparse.Namespace) -> int:
    settings: dict = {}
    if args.config is not None:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("sweep config must be a JSON object")
        unknown = set(loaded) - _CONFIG_FIELDS
        if unknown:
            raise ValueError(
                f"unknown config keys: {', '.join(sorted(unknown))}"
            )
        settings.update(loaded)
    overrides = {
        "n_values": args.n,
        "p_spec": args.p,
        "r": args.r,
        "trials": args.trials,
        "master_seed": args.master_seed,
        "mode": args.mode,
        "witness_budget": args.witness_budget,
        "wall_clock_cap_s": args.wall_clock_cap,
        "workers": args.workers,
    }
    settings.update({k: v for k, v in overrides.items() if v is not None})
    missing = [
        key
        for key in ("n_values", "p_spec", "r", "trials", "master_seed", "mode")
        if key not in settings
    ]
    if missing:
        raise ValueError(
            "sweep config is missing: " + ", ".join(missing)
        )
    cfg = SweepConfig(**settings)
    records = run_sweep(cfg)
    write_sweep_csv(records, args.out)
    print("OK")
    print(f"records={len(records)} out={args.out}")
    if args.summary:
        for cell in summarize(records):
            print(
                f"cell n={cell.n} p={cell.p!r} r={cell.r} mode={cell.mode} "
                f"trials={cell.trials} freq={cell.frequency:.4f} "
                f"wilson=[{cell.wilson_low:.4f},{cell.wilson_high:.4f}]"
            )
    return EXIT_OK


# =========================================================================
# Parser
# =========================================================================


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part)


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(part for part in text.split(",") if part)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotgun",
        description=(
            "Graph shotgun assembly toolkit: seeded graph generation, "
            "rooted-ball extraction, reconstruction, non-reconstructibility "
            "witnesses, and Monte Carlo sweeps."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser(
        "gen",
        help="sample a seeded G(n, p) graph to an edge-list file",
        description=f"Writes {_GRAPH_FORMAT}.",
    )
    gen.add_argument("--n", type=int, required=True, help="vertex count")
    gen.add_argument("--p", type=float, required=True, help="edge probability in [0, 1]")
    gen.add_argument("--seed", type=int, required=True, help="64-bit sample seed")
    gen.add_argument("--out", required=True, help="output edge-list path")
    gen.set_defaults(func=_cmd_gen)

    balls = sub.add_parser(
        "balls",
        help="extract all rooted r-balls of a graph into a ball file",
        description=f"Reads {_GRAPH_FORMAT}. Writes {_BALL_FORMAT}.",
    )
    balls.add_argument("--in", dest="in_path", required=True, help="input edge-list path")
    balls.add_argument("--r", type=int, required=True, help="ball radius")
    balls.add_argument(
        "--mode",
        choices=("codes", "full"),
        default="full",
        help="codes stores canonical codes only; full stores ball structure",
    )
    balls.add_argument("--out", required=True, help="output ball file path")
    balls.set_defaults(func=_cmd_balls)

    rec = sub.add_parser(
        "reconstruct",
        help="reconstruct a graph from a full-mode ball file",
        description=(
            f"Reads {_BALL_FORMAT}. Prints the outcome tag, then the "
            "reconstructed edge list when one exists."
        ),
    )
    rec.add_argument("--in", dest="in_path", required=True, help="input ball file path")
    rec.add_argument(
        "--algo",
        required=True,
        choices=("assemble", "overlap", "two-ball", "hybrid"),
        help="reconstruction algorithm",
    )
    rec.add_argument(
        "--match",
        choices=("full", "fast"),
        default="full",
        help="two-ball matching mode: full canonical codes or degree-pruned",
    )
    rec.add_argument(
        "--force-full-match",
        action="store_true",
        help="make overlap match on full canonical codes, skipping invariants",
    )
    rec.add_argument(
        "--p-hint",
        type=float,
        default=None,
        help="sampling density hint for the hybrid degree split",
    )
    rec.add_argument("--out", default=None, help="also write the edge list here")
    rec.set_defaults(func=_cmd_reconstruct)

    wit = sub.add_parser(
        "witness",
        help="search for a ball-preserving non-isomorphic edge swap",
        description=(
            f"Reads {_GRAPH_FORMAT}. On success verifies the witness, "
            f"prints a report, and writes {_WITNESS_FORMAT}."
        ),
    )
    wit.add_argument("--in", dest="in_path", required=True, help="input edge-list path")
    wit.add_argument(
        "--finder",
        required=True,
        choices=("path-pair", "r1", "r2", "r3"),
        help="witness construction to try",
    )
    wit.add_argument("--r", type=int, default=None, help="radius (required for path-pair)")
    wit.add_argument("--p", type=float, default=None, help="sampling density for window checks")
    wit.add_argument("--seed", type=int, default=None, help="candidate-stream seed (r1, r2)")
    wit.add_argument("--budget", type=int, default=1_000_000, help="candidate budget (r1, r2)")
    wit.add_argument("--out", default=None, help="output witness file path")
    wit.set_defaults(func=_cmd_witness)

    ver = sub.add_parser(
        "verify",
        help="verify a witness file against a graph",
        description=(
            f"Reads {_GRAPH_FORMAT} and {_WITNESS_FORMAT}. Exit 0 when the "
            "ball multisets match and the certificate separates the graphs."
        ),
    )
    ver.add_argument("--graph", required=True, help="edge-list path")
    ver.add_argument("--witness", required=True, help="witness file path")
    ver.add_argument(
        "--exact",
        action="store_true",
        help="compare full ball multisets instead of the swap window",
    )
    ver.set_defaults(func=_cmd_verify)

    sweep = sub.add_parser(
        "sweep",
        help="run a seeded Monte Carlo sweep and write the CSV",
        description=(
            "Config comes from a JSON object file (keys: n_values, p_spec, "
            "r, trials, master_seed, mode, witness_budget, wall_clock_cap_s, "
            "workers) and/or flags; flags override the file. p grid entries "
            'are "0.05", "exp:a" for n^(-a), or "mul:c:<threshold>" with '
            "thresholds path_pair, log_rn, sqrt_log_25n, n34_log14, "
            "log2_llog3. Modes are reconstruct:<algorithm> or "
            "witness:<finder>."
        ),
    )
    sweep.add_argument("--config", default=None, help="JSON config path")
    sweep.add_argument("--n", type=_int_list, default=None, help="comma-separated n values")
    sweep.add_argument("--p", type=_str_list, default=None, help="comma-separated p grid entries")
    sweep.add_argument("--r", type=int, default=None, help="ball radius")
    sweep.add_argument("--trials", type=int, default=None, help="trials per cell")
    sweep.add_argument("--master-seed", type=int, default=None, help="sweep master seed")
    sweep.add_argument("--mode", default=None, help="reconstruct:<algo> or witness:<finder>")
    sweep.add_argument("--witness-budget", type=int, default=None, help="finder candidate budget")
    sweep.add_argument(
        "--wall-clock-cap",
        type=float,
        default=None,
        help="per-trial seconds cap (off by default; capped trials become INCONSISTENT)",
    )
    sweep.add_argument("--workers", type=int, default=None, help="process pool size")
    sweep.add_argument("--out", required=True, help="output CSV path")
    sweep.add_argument("--summary", action="store_true", help="print per-cell frequencies")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the exit code documented in the module docstring."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
