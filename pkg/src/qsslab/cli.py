"""``qsslab`` command line: ``run`` and ``verify-identities``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import identities, simlab
from .qstate import OVERLAP_TOL

EXIT_OK, EXIT_CONFIG, EXIT_IDENTITY = 0, 1, 2


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value <= simlab.MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsslab", description="Quantum secret sharing attack/defense simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a seeded Monte Carlo experiment")
    run.add_argument("--protocol", choices=simlab.PROTOCOLS, default="hbb99")
    run.add_argument("--attack", choices=simlab.ATTACKS, default="none")
    run.add_argument("--cheat-mode", choices=("forge", "unitary"))
    run.add_argument("--state-reveal", choices=("before", "after"))
    run.add_argument("--defense", choices=simlab.DEFENSES, default="none")
    run.add_argument("--decoy-p", type=float, default=0.8, help="probability a round is a normal key round")
    run.add_argument("--rounds", type=int, default=10_000)
    run.add_argument("--sample-frac", type=float, default=0.2)
    run.add_argument("--seed", type=_u64, default=0)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--out", type=Path)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--transcript", type=Path, help="also write per-round JSON lines here")

    verify = sub.add_parser("verify-identities", help="check the swapping identities and cheat grids")
    verify.add_argument("--tol", type=float, default=OVERLAP_TOL)
    return parser


def _run(args) -> int:
    try:
        config = simlab.SimConfig(
            protocol=args.protocol,
            attack=args.attack,
            cheat_mode=args.cheat_mode,
            state_reveal=args.state_reveal,
            defense=args.defense,
            decoy_p=args.decoy_p,
            rounds=args.rounds,
            sample_frac=args.sample_frac,
            seed=args.seed,
        )
    except simlab.ConfigError as exc:
        print(f"qsslab: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rounds = simlab.run_rounds(config, args.workers)
    payload = simlab.serialize_report(simlab.aggregate(config, rounds), args.format)
    if args.transcript:
        args.transcript.write_text("".join(line + "\n" for line in simlab.transcript_lines(rounds)))
    if args.out:
        args.out.write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return EXIT_OK


def _verify(args) -> int:
    checks = identities.run_all(args.tol)
    for c in checks:
        line = f"{'PASS' if c.passed else 'FAIL'}  {c.name}"
        print(line + (f"  ({c.detail})" if c.detail else ""))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_IDENTITY


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage; 2 is reserved for identity failures here
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    return _run(args) if args.command == "run" else _verify(args)


if __name__ == "__main__":
    sys.exit(main())
