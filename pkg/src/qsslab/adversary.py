"""Attack strategies available to the dishonest agent (Bob) on Charlie's channel.

Three strategies are modelled:

* ``NONE`` -- the channel is left alone.
* ``INTERCEPT_RESEND`` -- the textbook baseline: measure the photon in a random
  protocol basis and forward the eigenstate that was found.
* ``FAKE_SIGNAL`` -- keep the genuine photon C, forward one half (C') of a fresh
  phi+ pair (B', C') instead, and keep B'. On checked rounds a Bell measurement
  on (C, B') swaps the entanglement onto (.., C') up to a known Pauli E, which
  Bob then hides either by flipping his announced bit (``FORGE``) or by undoing
  E with a unitary on his own photon B (``UNITARY``, KKI only). On unchecked
  rounds the stored photons are measured in Charlie's announced basis.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import rng as rngmod
from .qstate import (
    Basis,
    BellOutcome,
    KkiSignal,
    PauliOp,
    PureState,
    apply_pauli,
    bell,
    kki_source,
    make_ket,
    measure_bell,
    measure_one,
    same_up_to_phase,
    tensor,
)

FAKE_KEPT = "B'"
FAKE_SENT = "C'"

# Pauli left on the forwarded photon C' by each Bell outcome on (C, B').
BSM_PAULI = {
    BellOutcome.PHI_PLUS: PauliOp.I,
    BellOutcome.PHI_MINUS: PauliOp.Z,
    BellOutcome.PSI_PLUS: PauliOp.X,
    BellOutcome.PSI_MINUS: PauliOp.XZ,
}

# Measured observables each correction anticommutes with; XZ is iY up to phase.
_ANTICOMMUTES = {
    PauliOp.I: frozenset(),
    PauliOp.X: frozenset({Basis.Y, Basis.Z}),
    PauliOp.Z: frozenset({Basis.X, Basis.Y}),
    PauliOp.XZ: frozenset({Basis.X, Basis.Z}),
}

# phi+ measured on both halves in the same basis: equal bits in Z and X,
# opposite bits in Y.
PHI_PLUS_FLIP = {Basis.Z: 0, Basis.X: 0, Basis.Y: 1}


class AttackKind(enum.Enum):
    NONE = "none"
    INTERCEPT_RESEND = "intercept-resend"
    FAKE_SIGNAL = "fake-signal"


class CheatMode(enum.Enum):
    FORGE = "forge"
    UNITARY = "unitary"


@dataclass(frozen=True)
class AttackStrategy:
    kind: AttackKind = AttackKind.NONE
    cheat_mode: CheatMode | None = None

    def __post_init__(self):
        if self.cheat_mode is not None and self.kind is not AttackKind.FAKE_SIGNAL:
            raise ValueError("cheat_mode only applies to the fake-signal attack")

    @classmethod
    def none(cls):
        return cls(AttackKind.NONE)

    @classmethod
    def intercept_resend(cls):
        return cls(AttackKind.INTERCEPT_RESEND)

    @classmethod
    def fake_signal(cls, cheat_mode: CheatMode | None = None):
        return cls(AttackKind.FAKE_SIGNAL, cheat_mode)

    @property
    def mode(self) -> CheatMode:
        """Effective cheating mechanism (forging is the default)."""
        return self.cheat_mode or CheatMode.FORGE


@dataclass
class AttackLog:
    """What Bob did and learned during one round.

    ``stolen_bit`` is Bob's guess of Charlie's key bit; ``source_bit`` is his
    measurement of the genuine photon C in Charlie's basis, which together with
    his own bit gives Alice's key bit.
    """

    kind: AttackKind
    stored: PureState | None = field(default=None, repr=False)
    resend_basis: Basis | None = None
    resend_bit: int | None = None
    bsm_outcome: BellOutcome | None = None
    induced_pauli: PauliOp | None = None
    correction: PauliOp | None = None
    flipped_announcement: bool = False
    stolen_bit: int | None = None
    source_bit: int | None = None


def tap_channel(
    state: PureState,
    label: str,
    attack: AttackStrategy,
    bases: Sequence[Basis],
    rng: np.random.Generator,
) -> tuple[PureState, str, AttackLog | None]:
    """Route the photon ``label`` through Bob's hands.

    Returns the new joint state, the label of the photon Charlie actually
    receives, and the attack log (``None`` when there is no attack).
    """
    state.index(label)
    if attack.kind is AttackKind.NONE:
        return state, label, None
    if attack.kind is AttackKind.INTERCEPT_RESEND:
        basis = rngmod.choose(rng, tuple(bases))
        bit, rest = measure_one(state, label, basis, rngmod.uniform(rng))
        state = tensor(rest, make_ket(bit, basis, label))
        return state, label, AttackLog(attack.kind, resend_basis=basis, resend_bit=bit)
    state = tensor(state, bell(BellOutcome.PHI_PLUS, (FAKE_KEPT, FAKE_SENT)))
    return state, FAKE_SENT, AttackLog(attack.kind, stored=state)


def swap_on_sample(
    state: PureState, rand01: float, stored: str = "C", kept: str = FAKE_KEPT
) -> tuple[BellOutcome, PauliOp, PureState]:
    """Bell-measure (stored, kept); returns the outcome, the Pauli E it leaves
    on the forwarded photon, and the residual state."""
    outcome, residual = measure_bell(state, stored, kept, rand01)
    return outcome, BSM_PAULI[outcome], residual


def compensation_flip(e: PauliOp, charlie_basis: Basis) -> bool:
    """True iff E flips Charlie's outcome in ``charlie_basis``."""
    return charlie_basis in _ANTICOMMUTES[e]


def cheat_announce(own_bit: int, e: PauliOp, charlie_basis: Basis) -> int:
    return own_bit ^ int(compensation_flip(e, charlie_basis))


@lru_cache(maxsize=None)
def unitary_correction(signal: KkiSignal, e: PauliOp) -> PauliOp:
    """Pauli U on B with (U (x) E) signal equal to signal up to phase.

    Found by exhaustive search; every (signal, E) pair has exactly one.
    """
    src = kki_source(signal, ("B", "C"))
    damaged = apply_pauli(src, "C", e)
    for u in (PauliOp.I, PauliOp.X, PauliOp.Z, PauliOp.XZ):
        if same_up_to_phase(apply_pauli(damaged, "B", u), src):
            return u
    raise AssertionError(f"no Pauli on B repairs {signal} after {e}")


def steal_key(
    state: PureState, charlie_basis: Basis, rng: np.random.Generator, stored: str = "C"
) -> tuple[int, int, PureState]:
    """Measure B' and the stored photon in Charlie's announced basis.

    Returns ``(charlie_bit_guess, source_bit, residual)``. B' is Charlie's
    phi+ partner, so the corrected B' outcome is Charlie's bit; the stored
    photon carries the genuine correlations with Alice and Bob.
    """
    if stored not in state.labels or FAKE_KEPT not in state.labels:
        raise ValueError("stored photons already consumed (sample round?)")
    kept_bit, state = measure_one(state, FAKE_KEPT, charlie_basis, rngmod.uniform(rng))
    source_bit, state = measure_one(state, stored, charlie_basis, rngmod.uniform(rng))
    return kept_bit ^ PHI_PLUS_FLIP[charlie_basis], source_bit, state

