"""Run every protocol/attack/defense combination and print a summary table.

    python3 scripts/attack_matrix.py --rounds 5000 --seed 1
"""

import argparse
import itertools

from qsslab.simlab import SimConfig, run_experiment

COLUMNS = ("sample_error_rate", "decoy_error_rate_c", "detected", "attacker_recovery_rate")


def configs(rounds, seed):
    for protocol, attack, defense in itertools.product(("hbb99", "kki"), ("none", "intercept-resend", "fake-signal"), ("none", "decoy")):
        if protocol == "kki" and attack == "fake-signal":
            # unitary cheating needs the signal state up front
            for mode, reveal in (("forge", None), ("unitary", "before")):
                yield SimConfig(protocol=protocol, attack=attack, defense=defense, cheat_mode=mode,
                                state_reveal=reveal, rounds=rounds, seed=seed)
            continue
        yield SimConfig(protocol=protocol, attack=attack, defense=defense, rounds=rounds, seed=seed)


def fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rounds", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    head = ("protocol", "attack", "mode", "defense") + COLUMNS
    print("  ".join(f"{h:>18}" for h in head))
    for cfg in configs(args.rounds, args.seed):
        r = run_experiment(cfg, workers=args.workers)
        row = (r.protocol, r.attack, r.cheat_mode, r.defense) + tuple(getattr(r, c) for c in COLUMNS)
        print("  ".join(f"{fmt(v):>18}" for v in row))


if __name__ == "__main__":
    main()
