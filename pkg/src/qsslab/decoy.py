"""Decoy-photon countermeasure.

On a decoy round Alice sends each agent an independent single photon in a
random eigenstate of one of the agents' measurement bases instead of the
entangled signal. Once bases are public she checks each channel using only
her preparation log and that channel's receiver, so the dishonest agent has no
say in the check of the other agent's channel.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import rng as rngmod
from .adversary import AttackLog, AttackStrategy, tap_channel
from .qstate import Basis, PureState, ghz3, make_ket, measure_one, same_up_to_phase

DECOY_BASES = (Basis.X, Basis.Y)


class Channel(enum.Enum):
    B = "B"
    C = "C"


@dataclass(frozen=True)
class DecoyRecord:
    round_id: int
    channel: Channel
    prep_basis: Basis
    prep_bit: int
    agent_basis: Basis
    agent_bit: int

    @property
    def matched(self) -> bool:
        return self.agent_basis is self.prep_basis

    @property
    def error(self) -> bool:
        return self.matched and self.agent_bit != self.prep_bit


@dataclass(frozen=True)
class DecoyCheck:
    matched: int
    errors: int

    @property
    def error_rate(self) -> float | None:
        return self.errors / self.matched if self.matched else None

    @property
    def all_passed(self) -> bool:
        return self.errors == 0


def decoy_source(
    rng: np.random.Generator, bases: Sequence[Basis] = DECOY_BASES, label: str = "D"
) -> tuple[PureState, Basis, int]:
    basis = rngmod.choose(rng, tuple(bases))
    bit = int(rng.integers(2))
    return make_ket(bit, basis, label), basis, bit


def _identify(state: PureState) -> tuple[Basis, int]:
    for basis in (Basis.X, Basis.Y, Basis.Z):
        for bit in (0, 1):
            if same_up_to_phase(make_ket(bit, basis, state.labels[0]), state):
                return basis, bit
    raise AssertionError(f"{state} is not a basis eigenstate")


def ghz_decoy_source(rng: np.random.Generator, label: str = "D") -> tuple[PureState, Basis, int]:
    """Make a decoy by measuring B and C of a fresh GHZ triplet in random x/y bases.

    Photon A collapses to an x eigenstate when the two bases agree and to a
    y eigenstate when they differ; the triplet is used up.
    """
    state = ghz3((label, "B", "C"))
    for q in ("B", "C"):
        _, state = measure_one(state, q, rngmod.choose(rng, DECOY_BASES), rngmod.uniform(rng))
    basis, bit = _identify(state)
    return state, basis, bit


def is_decoy_round(p: float, rng: np.random.Generator) -> bool:
    """Decoy round with probability 1 - p."""
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return rngmod.uniform(rng) >= p


def run_decoy_round(
    attack: AttackStrategy,
    agent_bases: Sequence[Basis],
    rng: np.random.Generator,
    round_id: int = 0,
    source: str = "single",
) -> tuple[list[DecoyRecord], AttackLog | None]:
    """Send a decoy down each channel; Charlie's photon goes through Bob's tap.

    The tap sees the same interface as for protocol photons, so Bob cannot
    tell decoys apart before the bases are announced.
    """
    make = {"single": lambda: decoy_source(rng, agent_bases), "ghz": lambda: ghz_decoy_source(rng)}[source]
    records = []
    log = None
    for channel in Channel:
        state, prep_basis, prep_bit = make()
        state = PureState((channel.value,), state.amplitudes)
        received = channel.value
        if channel is Channel.C:
            state, received, log = tap_channel(state, channel.value, attack, agent_bases, rng)
        agent_basis = rngmod.choose(rng, tuple(agent_bases))
        agent_bit, _ = measure_one(state, received, agent_basis, rngmod.uniform(rng))
        records.append(DecoyRecord(round_id, channel, prep_basis, prep_bit, agent_basis, agent_bit))
    return records, log


def decoy_check(records: Iterable[DecoyRecord]) -> DecoyCheck:
    """Error count over basis-matched decoys of a single channel.

    Takes only Alice's preparations and the receiving agent's announcements.
    """
    records = list(records)
    if len({r.channel for r in records}) > 1:
        raise ValueError("check one channel at a time")
    matched = [r for r in records if r.matched]
    return DecoyCheck(len(matched), sum(r.error for r in matched))


def flag_attack(
    matched: int, errors: int, min_matched: int = 4, small_sample_rate: float = 0.10
) -> bool:
    """Any error over ``min_matched`` or more matched decoys flags the run; on
    fewer, the error rate must exceed ``small_sample_rate``."""
    if matched == 0:
        return False
    if matched >= min_matched:
        return errors > 0
    return errors / matched > small_sample_rate


def all_pass_probability(d: int) -> float:
    """Chance that ``d`` matched decoys on a fake-signal channel all pass."""
    return math.ldexp(1.0, -d)


def all_pass_trial(
    attack: AttackStrategy,
    agent_bases: Sequence[Basis],
    d: int,
    rng: np.random.Generator,
    max_rounds: int = 100_000,
) -> bool:
    """Run decoy rounds until channel C has ``d`` matched decoys; True if none erred."""
    records = []
    for i in range(max_rounds):
        recs, _ = run_decoy_round(attack, agent_bases, rng, round_id=i)
        records.extend(r for r in recs if r.channel is Channel.C and r.matched)
        if len(records) == d:
            return decoy_check(records).all_passed
    raise RuntimeError(f"fewer than {d} matched decoys in {max_rounds} rounds")
