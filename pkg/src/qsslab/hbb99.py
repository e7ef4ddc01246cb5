"""One round of the three-party GHZ secret-sharing protocol (HBB99).

Alice keeps photon A of a GHZ triplet and sends B to Bob and C to Charlie.
Everyone measures in a random x/y basis. Rounds with all-x or exactly two y
bases are kept; in those the three outcomes have a fixed parity, so
``K_A = K_B xor K_C`` once the parity is folded into Alice's bit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import rng as rngmod
from .adversary import (
    AttackKind,
    AttackLog,
    AttackStrategy,
    cheat_announce,
    compensation_flip,
    steal_key,
    swap_on_sample,
    tap_channel,
)
from .qstate import Basis, ghz3, measure_one

AGENT_BASES = (Basis.X, Basis.Y)


class Party(enum.Enum):
    ALICE = "A"
    BOB = "B"
    CHARLIE = "C"


PARTIES = (Party.ALICE, Party.BOB, Party.CHARLIE)


@dataclass(frozen=True)
class Sift:
    kept: bool
    expected_parity: int | None = None

    @classmethod
    def discarded(cls):
        return cls(False)


# Number of y bases -> parity of b_A ^ b_B ^ b_C.
_KEPT_PARITY = {0: 0, 2: 1}


def sift_decision(bases) -> Sift:
    """Keep all-x (parity 0) and two-y (parity 1) triples, discard the rest."""
    bases = tuple(bases)
    if len(bases) != 3:
        raise ValueError(f"need three bases, got {bases}")
    if any(b not in AGENT_BASES for b in bases):
        raise ValueError(f"HBB99 bases must be X or Y, got {bases}")
    n_y = sum(b is Basis.Y for b in bases)
    if n_y in _KEPT_PARITY:
        return Sift(True, _KEPT_PARITY[n_y])
    return Sift.discarded()


@dataclass
class HbbRound:
    round_id: int
    bases: dict[Party, Basis]
    true_bits: dict[Party, int]
    announced_bits: dict[Party, int]
    sift: Sift
    is_sample: bool
    check_passed: bool | None = None
    attacker_log: AttackLog | None = field(default=None, repr=False)

    @property
    def is_key_round(self) -> bool:
        return self.sift.kept and not self.is_sample


def _require_key_round(round: HbbRound):
    if not round.is_key_round:
        raise ValueError(f"round {round.round_id} carries no key bit (discarded or sampled)")


def alice_key_bit(round: HbbRound) -> int:
    _require_key_round(round)
    return round.true_bits[Party.ALICE] ^ round.sift.expected_parity


def agent_key_bit(round: HbbRound, party: Party) -> int:
    _require_key_round(round)
    if party is Party.ALICE:
        raise ValueError("use alice_key_bit for Alice")
    return round.true_bits[party]


def run_round(
    attack: AttackStrategy,
    is_sample: bool,
    rng: np.random.Generator,
    round_id: int = 0,
) -> HbbRound:
    """Play one round end to end.

    ``is_sample`` is Alice's post-sifting choice; it only matters if the round
    is kept. Bob learns it after all bases are public.
    """
    state = ghz3(("A", "B", "C"))
    state, charlie_label, log = tap_channel(state, "C", attack, AGENT_BASES, rng)

    bases = {p: rngmod.choose(rng, AGENT_BASES) for p in PARTIES}
    bits = {}
    bits[Party.ALICE], state = measure_one(state, "A", bases[Party.ALICE], rngmod.uniform(rng))
    bits[Party.CHARLIE], state = measure_one(
        state, charlie_label, bases[Party.CHARLIE], rngmod.uniform(rng)
    )

    # bases are now public
    sift = sift_decision(bases[p] for p in PARTIES)
    sample = is_sample and sift.kept
    bob_basis, charlie_basis = bases[Party.BOB], bases[Party.CHARLIE]
    fake = attack.kind is AttackKind.FAKE_SIGNAL

    if fake and sample:
        outcome, e, state = swap_on_sample(state, rngmod.uniform(rng))
        log.bsm_outcome, log.induced_pauli = outcome, e
    bits[Party.BOB], state = measure_one(state, "B", bob_basis, rngmod.uniform(rng))

    announced = {}
    check = None
    if sample:
        bob_says = bits[Party.BOB]
        if fake:
            bob_says = cheat_announce(bits[Party.BOB], log.induced_pauli, charlie_basis)
            log.flipped_announcement = compensation_flip(log.induced_pauli, charlie_basis)
        announced = {Party.ALICE: bits[Party.ALICE], Party.BOB: bob_says, Party.CHARLIE: bits[Party.CHARLIE]}
        check = (sum(announced.values()) % 2) == sift.expected_parity
    elif sift.kept and log is not None:
        if fake:
            log.stolen_bit, log.source_bit, state = steal_key(state, charlie_basis, rng)
        else:
            log.stolen_bit = log.source_bit = log.resend_bit

    return HbbRound(round_id, bases, bits, announced, sift, sample, check, log)


def bob_key_guess(round: HbbRound) -> int | None:
    """Bob's reconstruction of Alice's key bit on a key round, if he has one."""
    _require_key_round(round)
    log = round.attacker_log
    if log is None or log.source_bit is None:
        return None
    return round.true_bits[Party.BOB] ^ log.source_bit
