"""Probability that the fake-signal attacker survives d matched decoys.

Each matched decoy on Charlie's channel is caught with probability 1/2, so the
attack passes all d checks with probability 2**-d. This estimates that number
by simulation and prints it next to the closed form.

    python3 scripts/decoy_power.py --max-d 10 --trials 1000
"""

import argparse

import numpy as np

from qsslab.adversary import AttackStrategy
from qsslab.decoy import all_pass_probability, all_pass_trial
from qsslab.hbb99 import AGENT_BASES
from qsslab.rng import stream


def main():
    ap = argparse.ArgumentParser(description="decoy detection power")
    ap.add_argument("--max-d", type=int, default=8)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    attack = AttackStrategy.fake_signal()
    print(f"{'d':>3} {'observed':>10} {'expected':>10} {'4 SE':>8}")
    for d in range(1, args.max_d + 1):
        passes = sum(all_pass_trial(attack, AGENT_BASES, d, stream(args.seed, d, t)) for t in range(args.trials))
        p = all_pass_probability(d)
        se = np.sqrt(p * (1 - p) / args.trials)
        print(f"{d:>3} {passes / args.trials:>10.4f} {p:>10.4f} {4 * se:>8.4f}")


if __name__ == "__main__":
    main()
