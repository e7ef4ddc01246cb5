"""One round of the two-qubit (KKI-style) secret-sharing scheme.

Alice sends one of four maximally entangled states on (B, C). Bob and Charlie
each measure in x or z. For the class-A signals (psi+, phi-) equal bases give
a deterministic parity; for the class-B signals (Psi+, Phi-) mixed bases do.
Only sample checking is modelled; no key is distilled.
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
    CheatMode,
    cheat_announce,
    compensation_flip,
    steal_key,
    swap_on_sample,
    tap_channel,
    unitary_correction,
)
from .hbb99 import Sift
from .qstate import Basis, KkiSignal, apply_pauli, kki_source, measure_one

AGENT_BASES = (Basis.X, Basis.Z)
SIGNALS = tuple(KkiSignal)

_CORRELATED = {
    "A": frozenset({(Basis.Z, Basis.Z), (Basis.X, Basis.X)}),
    "B": frozenset({(Basis.Z, Basis.X), (Basis.X, Basis.Z)}),
}

_PARITY = {
    KkiSignal.PSI_PLUS: {(Basis.Z, Basis.Z): 1, (Basis.X, Basis.X): 0},
    KkiSignal.PHI_MINUS: {(Basis.Z, Basis.Z): 0, (Basis.X, Basis.X): 1},
    KkiSignal.CAP_PSI_PLUS: {(Basis.Z, Basis.X): 0, (Basis.X, Basis.Z): 0},
    KkiSignal.CAP_PHI_MINUS: {(Basis.Z, Basis.X): 1, (Basis.X, Basis.Z): 1},
}


class StateReveal(enum.Enum):
    """When Alice names the signal on a sample round, relative to Bob's announcement."""

    BEFORE = "before"
    AFTER = "after"


def correlated_bases(signal: KkiSignal) -> frozenset[tuple[Basis, Basis]]:
    return _CORRELATED[signal.signal_class]


def expected_parity(signal: KkiSignal, basis_b: Basis, basis_c: Basis) -> int:
    try:
        return _PARITY[signal][(basis_b, basis_c)]
    except KeyError:
        raise ValueError(f"bases ({basis_b.name}, {basis_c.name}) uncorrelated for {signal.name}") from None


def sift_decision(signal: KkiSignal, basis_b: Basis, basis_c: Basis) -> Sift:
    if (basis_b, basis_c) in correlated_bases(signal):
        return Sift(True, expected_parity(signal, basis_b, basis_c))
    return Sift.discarded()


@dataclass
class KkiRound:
    round_id: int
    signal: KkiSignal
    basis_b: Basis
    basis_c: Basis
    true_bits: dict[str, int]
    announced_bits: dict[str, int]
    sift: Sift
    is_sample: bool
    check_passed: bool | None = None
    attacker_log: AttackLog | None = field(default=None, repr=False)

    @property
    def is_key_round(self) -> bool:
        return self.sift.kept and not self.is_sample


def run_round(
    attack: AttackStrategy,
    is_sample: bool,
    rng: np.random.Generator,
    round_id: int = 0,
    state_reveal: StateReveal = StateReveal.AFTER,
) -> KkiRound:
    fake = attack.kind is AttackKind.FAKE_SIGNAL
    if fake and attack.mode is CheatMode.UNITARY and state_reveal is not StateReveal.BEFORE:
        raise ValueError("unitary cheating needs the signal revealed before Bob announces")

    signal = rngmod.choose(rng, SIGNALS)
    state = kki_source(signal, ("B", "C"))
    state, charlie_label, log = tap_channel(state, "C", attack, AGENT_BASES, rng)

    basis_b = rngmod.choose(rng, AGENT_BASES)
    basis_c = rngmod.choose(rng, AGENT_BASES)
    c_bit, state = measure_one(state, charlie_label, basis_c, rngmod.uniform(rng))

    # bases are public; under attack Bob has not touched B, C or B' yet
    sift = sift_decision(signal, basis_b, basis_c)
    sample = is_sample and sift.kept
    if fake and sample:
        outcome, e, state = swap_on_sample(state, rngmod.uniform(rng))
        log.bsm_outcome, log.induced_pauli = outcome, e
        if attack.mode is CheatMode.UNITARY:
            log.correction = unitary_correction(signal, e)
            state = apply_pauli(state, "B", log.correction)
    b_bit, state = measure_one(state, "B", basis_b, rngmod.uniform(rng))

    announced = {}
    check = None
    if sample:
        bob_says = b_bit
        if fake and attack.mode is CheatMode.FORGE:
            bob_says = cheat_announce(b_bit, log.induced_pauli, basis_c)
            log.flipped_announcement = compensation_flip(log.induced_pauli, basis_c)
        announced = {"B": bob_says, "C": c_bit}
        check = (bob_says ^ c_bit) == sift.expected_parity
    elif sift.kept and log is not None:
        if fake:
            log.stolen_bit, log.source_bit, state = steal_key(state, basis_c, rng)
        else:
            log.stolen_bit = log.source_bit = log.resend_bit

    return KkiRound(
        round_id, signal, basis_b, basis_c, {"B": b_bit, "C": c_bit}, announced, sift, sample, check, log
    )
