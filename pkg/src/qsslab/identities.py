"""Exact-algebra checks of the swapping identities and the cheat grids.

Each check returns ``Check(name, passed, detail)``; ``run_all`` is what the
``qsslab verify-identities`` command executes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import hbb99, kki
from .adversary import BSM_PAULI, CheatMode, cheat_announce, unitary_correction
from .qstate import (
    NORM_TOL,
    OVERLAP_TOL,
    Basis,
    BellOutcome,
    KkiSignal,
    PureState,
    apply_pauli,
    bell,
    bell_decompose,
    computational,
    ghz3,
    kki_source,
    outcome_distribution,
    same_up_to_phase,
    tensor,
)

X, Y = Basis.X, Basis.Y


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def _superpose(labels, terms):
    """Equal-weight superposition of computational kets, e.g. [(+1, "000"), (-1, "111")]."""
    vec = sum(sign * computational(bits, labels).amplitudes for sign, bits in terms)
    return PureState(labels, vec / np.linalg.norm(vec))


ABC_ = ("A", "B", "C'")

# Residual on (A, B, C') after each Bell outcome on (C, B').
SWAP_BRANCHES = {
    BellOutcome.PHI_PLUS: _superpose(ABC_, [(1, "000"), (1, "111")]),
    BellOutcome.PHI_MINUS: _superpose(ABC_, [(1, "000"), (-1, "111")]),
    BellOutcome.PSI_PLUS: _superpose(ABC_, [(1, "001"), (1, "110")]),
    BellOutcome.PSI_MINUS: _superpose(ABC_, [(1, "001"), (-1, "110")]),
}

_ODD = frozenset({(0, 1, 0), (1, 0, 0), (0, 0, 1), (1, 1, 1)})
_EVEN = frozenset({(0, 0, 0), (1, 1, 0), (0, 1, 1), (1, 0, 1)})

# Supports of the three non-trivial branch states under (X,X,X) and (Y,Y,X),
# read term by term off their x/y expansions. Expanding the psi- branch by
# hand, it is easy to write |+x>|+x> twice and lose |-x>|-x>; the short
# support below is that slip, kept so tests can show it is wrong.
FAKE_BRANCH_SUPPORTS = {
    BellOutcome.PHI_MINUS: {(X, X, X): _ODD, (Y, Y, X): _EVEN},
    BellOutcome.PSI_PLUS: {(X, X, X): _EVEN, (Y, Y, X): _ODD},
    BellOutcome.PSI_MINUS: {(X, X, X): _ODD, (Y, Y, X): _EVEN},
}
SLIPPED_SUPPORT = frozenset({(0, 1, 0), (1, 0, 0), (0, 0, 1)})

HBB_KEPT = [b for b in itertools.product((X, Y), repeat=3) if hbb99.sift_decision(b).kept]


def ghz_swap_state() -> PureState:
    return tensor(ghz3(("A", "B", "C")), bell(BellOutcome.PHI_PLUS, ("B'", "C'")))


def check_ghz_swap(tol: float = OVERLAP_TOL) -> Check:
    branches = bell_decompose(ghz_swap_state(), "C", "B'")
    bad = []
    for outcome, p, residual in branches:
        if abs(p - 0.25) > NORM_TOL:
            bad.append(f"{outcome.value}: p={p}")
        elif not same_up_to_phase(residual.reorder(ABC_), SWAP_BRANCHES[outcome], tol):
            bad.append(f"{outcome.value}: residual mismatch")
    return Check("ghz-swap", len(branches) == 4 and not bad, "; ".join(bad))


def check_fake_branches() -> Check:
    bad = []
    for outcome, tables in FAKE_BRANCH_SUPPORTS.items():
        state = SWAP_BRANCHES[outcome]
        for bases, support in tables.items():
            dist = outcome_distribution(state, bases)
            for bits, p in dist.items():
                want = 0.25 if bits in support else 0.0
                if abs(p - want) > NORM_TOL:
                    bad.append(f"{outcome.value} {''.join(b.name for b in bases)} {bits}: {p}")
    return Check("fake-branches", not bad, "; ".join(bad))


def random_two_qubit(rng: np.random.Generator, labels=("B", "C")) -> PureState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return PureState(labels, v / np.linalg.norm(v))


def check_generic_swap(samples: int = 100, seed: int = 0, tol: float = OVERLAP_TOL) -> Check:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(samples):
        src = random_two_qubit(rng)
        joint = tensor(src, bell(BellOutcome.PHI_PLUS, ("B'", "C'")))
        target = PureState(("B", "C'"), src.amplitudes)
        for outcome, p, residual in bell_decompose(joint, "C", "B'"):
            expected = apply_pauli(target, "C'", BSM_PAULI[outcome])
            if abs(p - 0.25) > NORM_TOL or not same_up_to_phase(residual.reorder(("B", "C'")), expected, tol):
                bad += 1
    return Check("generic-swap", bad == 0, f"{bad} failing branches" if bad else "")


def hbb_cheat_grid() -> list[tuple[tuple[Basis, ...], BellOutcome, bool]]:
    """Every kept basis triple x every Bell outcome: does the forged check pass?"""
    out = []
    for outcome, p, residual in bell_decompose(ghz_swap_state(), "C", "B'"):
        residual = residual.reorder(ABC_)
        e = BSM_PAULI[outcome]
        for bases in HBB_KEPT:
            parity = hbb99.sift_decision(bases).expected_parity
            ok = all(
                (a ^ cheat_announce(b, e, bases[2]) ^ c) == parity
                for (a, b, c), q in outcome_distribution(residual, bases).items()
                if q > NORM_TOL
            )
            out.append((bases, outcome, ok))
    return out


def kki_cheat_grid(mode: CheatMode) -> list[tuple[KkiSignal, tuple[Basis, Basis], BellOutcome, bool]]:
    """Every signal x kept basis pair x Bell outcome under the given cheat."""
    out = []
    for signal in KkiSignal:
        joint = tensor(kki_source(signal, ("B", "C")), bell(BellOutcome.PHI_PLUS, ("B'", "C'")))
        for outcome, p, residual in bell_decompose(joint, "C", "B'"):
            residual = residual.reorder(("B", "C'"))
            e = BSM_PAULI[outcome]
            if mode is CheatMode.UNITARY:
                residual = apply_pauli(residual, "B", unitary_correction(signal, e))
            for pair in sorted(kki.correlated_bases(signal), key=lambda b: (b[0].value, b[1].value)):
                parity = kki.expected_parity(signal, *pair)
                ok = True
                for (b, c), q in outcome_distribution(residual, pair).items():
                    if q <= NORM_TOL:
                        continue
                    said = cheat_announce(b, e, pair[1]) if mode is CheatMode.FORGE else b
                    ok &= (said ^ c) == parity
                out.append((signal, pair, outcome, ok))
    return out


def _grid_check(name, grid) -> Check:
    failing = [row[:-1] for row in grid if not row[-1]]
    return Check(name, not failing, f"{len(failing)}/{len(grid)} cases fail" if failing else f"{len(grid)} cases")


def run_all(tol: float = OVERLAP_TOL) -> list[Check]:
    return [
        check_ghz_swap(tol),
        check_fake_branches(),
        check_generic_swap(tol=tol),
        _grid_check("hbb99-cheat-grid", hbb_cheat_grid()),
        _grid_check("kki-forge-grid", kki_cheat_grid(CheatMode.FORGE)),
        _grid_check("kki-unitary-grid", kki_cheat_grid(CheatMode.UNITARY)),
    ]
