"""Exact pure-state engine for a handful of labeled qubits.

States are immutable: every operation returns a new ``PureState``. Qubits are
addressed by symbolic labels ("A", "B", "C", "B'", "C'") and the amplitude
vector is laid out big-endian, i.e. ``labels[0]`` is the most significant bit
of the basis index, the same ordering ``numpy.kron`` produces.

The engine holds no randomness. Measurements take a caller-supplied uniform
``rand01`` and pick the outcome by walking the cumulative Born probabilities
in a fixed canonical order (bit 0 before bit 1; Bell order phi+, phi-, psi+,
psi-), so a given random stream always reproduces the same transcript.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

NORM_TOL = 1e-12
OVERLAP_TOL = 1e-10
ZERO_PROB = 1e-24

SQRT1_2 = 1 / np.sqrt(2)


class Basis(enum.Enum):
    Z = "Z"
    X = "X"
    Y = "Y"


class BellOutcome(enum.Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"


BELL_ORDER = (
    BellOutcome.PHI_PLUS,
    BellOutcome.PHI_MINUS,
    BellOutcome.PSI_PLUS,
    BellOutcome.PSI_MINUS,
)


class PauliOp(enum.Enum):
    """Single-qubit corrections. ``XZ`` applies Z first, then X."""

    I = "I"
    X = "X"
    Z = "Z"
    XZ = "XZ"


class KkiSignal(enum.Enum):
    """The four two-qubit signals Alice chooses from in the KKI rendition.

    ``CAP_PSI_PLUS`` = (phi- + psi+)/sqrt2 and ``CAP_PHI_MINUS`` = (phi- - psi+)/sqrt2.
    """

    PSI_PLUS = "psi+"
    PHI_MINUS = "phi-"
    CAP_PSI_PLUS = "Psi+"
    CAP_PHI_MINUS = "Phi-"

    @property
    def signal_class(self) -> str:
        return "A" if self in (KkiSignal.PSI_PLUS, KkiSignal.PHI_MINUS) else "B"


# Columns are the eigenvectors for bit 0 ("+") and bit 1 ("-").
_EIGENBASES = {
    Basis.Z: np.array([[1, 0], [0, 1]], dtype=complex),
    Basis.X: SQRT1_2 * np.array([[1, 1], [1, -1]], dtype=complex),
    Basis.Y: SQRT1_2 * np.array([[1, 1], [1j, -1j]], dtype=complex),
}

_BELL_VECTORS = {
    BellOutcome.PHI_PLUS: SQRT1_2 * np.array([1, 0, 0, 1], dtype=complex),
    BellOutcome.PHI_MINUS: SQRT1_2 * np.array([1, 0, 0, -1], dtype=complex),
    BellOutcome.PSI_PLUS: SQRT1_2 * np.array([0, 1, 1, 0], dtype=complex),
    BellOutcome.PSI_MINUS: SQRT1_2 * np.array([0, 1, -1, 0], dtype=complex),
}

_BELL_MATRIX = np.column_stack([_BELL_VECTORS[o] for o in BELL_ORDER])

_PAULI_MATRICES = {
    PauliOp.I: np.eye(2, dtype=complex),
    PauliOp.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliOp.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    # X @ Z: |0> -> |1>, |1> -> -|0>
    PauliOp.XZ: np.array([[0, -1], [1, 0]], dtype=complex),
}


def eigenvector(bit: int, basis: Basis) -> np.ndarray:
    return _EIGENBASES[basis][:, bit].copy()


def bell_vector(outcome: BellOutcome) -> np.ndarray:
    return _BELL_VECTORS[outcome].copy()


def pauli_matrix(op: PauliOp) -> np.ndarray:
    return _PAULI_MATRICES[op].copy()


@dataclass(frozen=True, eq=False)
class PureState:
    labels: tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate qubit labels: {labels}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2 ** len(labels):
            raise ValueError(
                f"{len(labels)} labels need {2 ** len(labels)} amplitudes, got {amps.shape[0]}"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("non-finite amplitude")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state not normalized (norm={norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no qubit labelled {label!r} in {self.labels}") from None

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def reorder(self, labels: Sequence[str]) -> "PureState":
        """Same state with the qubits permuted into ``labels`` order."""
        labels = tuple(labels)
        if sorted(labels) != sorted(self.labels):
            raise ValueError(f"cannot reorder {self.labels} into {labels}")
        if labels == self.labels:
            return self
        axes = [self.index(l) for l in labels]
        if not axes:
            return self
        return PureState(labels, np.transpose(self.tensor_view(), axes).reshape(-1))

    def __repr__(self):
        return f"PureState(labels={self.labels}, amplitudes={np.round(self.amplitudes, 6)})"


def _normalized(labels, vec) -> PureState:
    return PureState(labels, vec / np.linalg.norm(vec))


def make_ket(bit: int, basis: Basis, label: str = "q") -> PureState:
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    return PureState((label,), eigenvector(bit, basis))


def computational(bits: str, labels: Sequence[str]) -> PureState:
    """Basis ket such as ``computational("01", "AB")``."""
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int(bits, 2)] = 1
    return PureState(tuple(labels), vec)


def tensor(a: PureState, b: PureState) -> PureState:
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise ValueError(f"labels shared by both factors: {sorted(overlap)}")
    return PureState(a.labels + b.labels, np.kron(a.amplitudes, b.amplitudes))


def _check_labels(labels: Sequence[str], count: int) -> tuple[str, ...]:
    labels = tuple(labels)
    if len(labels) != count or len(set(labels)) != count:
        raise ValueError(f"expected {count} distinct labels, got {labels}")
    return labels


def ghz3(labels: Sequence[str] = ("A", "B", "C")) -> PureState:
    labels = _check_labels(labels, 3)
    vec = np.zeros(8, dtype=complex)
    vec[0] = vec[7] = SQRT1_2
    return PureState(labels, vec)


def bell(outcome: BellOutcome, labels: Sequence[str]) -> PureState:
    return PureState(_check_labels(labels, 2), bell_vector(outcome))


def kki_source(signal: KkiSignal, labels: Sequence[str] = ("B", "C")) -> PureState:
    labels = _check_labels(labels, 2)
    phi_m = _BELL_VECTORS[BellOutcome.PHI_MINUS]
    psi_p = _BELL_VECTORS[BellOutcome.PSI_PLUS]
    vec = {
        KkiSignal.PSI_PLUS: psi_p,
        KkiSignal.PHI_MINUS: phi_m,
        KkiSignal.CAP_PSI_PLUS: SQRT1_2 * (phi_m + psi_p),
        KkiSignal.CAP_PHI_MINUS: SQRT1_2 * (phi_m - psi_p),
    }[signal]
    return PureState(labels, vec)


def apply_single(state: PureState, label: str, matrix: np.ndarray) -> PureState:
    """Apply a 2x2 unitary to one qubit."""
    axis = state.index(label)
    t = np.tensordot(matrix, state.tensor_view(), axes=([1], [axis]))
    t = np.moveaxis(t, 0, axis)
    return PureState(state.labels, t.reshape(-1))


def apply_pauli(state: PureState, label: str, op: PauliOp) -> PureState:
    if op is PauliOp.I:
        state.index(label)
        return state
    return apply_single(state, label, _PAULI_MATRICES[op])


def inner(a: PureState, b: PureState) -> complex:
    """<a|b>; labels must match in the same order."""
    if a.labels != b.labels:
        raise ValueError(f"label mismatch: {a.labels} vs {b.labels}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def same_up_to_phase(a: PureState, b: PureState, tol: float = OVERLAP_TOL) -> bool:
    return abs(inner(a, b)) >= 1 - tol


def _branches(state: PureState, labels: Sequence[str], basis: np.ndarray):
    """Amplitudes of every outcome of a measurement on ``labels``.

    ``basis`` holds the measurement vectors as columns. Returns the remaining
    labels and a matrix whose row k is the unnormalized residual for outcome k.
    """
    axes = [state.index(l) for l in labels]
    rest = tuple(l for l in state.labels if l not in labels)
    k = len(labels)
    t = np.moveaxis(state.tensor_view(), axes, list(range(k))).reshape(2**k, -1)
    return rest, basis.conj().T @ t


def _branch_probs(rows: np.ndarray) -> list[float]:
    return (np.abs(rows) ** 2).sum(axis=1).tolist()


def _pick(probs: Sequence[float], rand01: float) -> int:
    if not 0 <= rand01 < 1:
        raise ValueError(f"rand01 must lie in [0, 1), got {rand01!r}")
    # rounding leaves ~1e-33 dust in impossible branches
    probs = [p if p > ZERO_PROB else 0.0 for p in probs]
    total = sum(probs)
    cum = 0.0
    for i, p in enumerate(probs):
        cum += p / total
        if rand01 < cum and p > 0:
            return i
    # rounding can leave cum a hair below 1: fall back to the last live branch
    return max(i for i, p in enumerate(probs) if p > 0)


def _residual(rest: tuple[str, ...], vec: np.ndarray) -> PureState:
    if not rest:
        return PureState((), np.array([1.0 + 0j]))
    return _normalized(rest, vec)


def measure_one(
    state: PureState, label: str, basis: Basis, rand01: float
) -> tuple[int, PureState]:
    """Projective measurement of one qubit; the qubit is removed from the result."""
    rest, rows = _branches(state, [label], _EIGENBASES[basis])
    bit = _pick(_branch_probs(rows), rand01)
    return bit, _residual(rest, rows[bit])


def bell_decompose(
    state: PureState, label1: str, label2: str
) -> list[tuple[BellOutcome, float, PureState | None]]:
    """Full expansion of ``state`` over Bell states of the pair (label1, label2).

    Entries come in canonical Bell order. A branch with zero weight carries
    ``None`` in place of its residual.
    """
    if label1 == label2:
        raise ValueError("Bell measurement needs two distinct qubits")
    rest, rows = _branches(state, [label1, label2], _BELL_MATRIX)
    out = []
    for outcome, vec, p in zip(BELL_ORDER, rows, _branch_probs(rows)):
        out.append((outcome, p, _residual(rest, vec) if p > ZERO_PROB else None))
    return out


def measure_bell(
    state: PureState, label1: str, label2: str, rand01: float
) -> tuple[BellOutcome, PureState]:
    branches = bell_decompose(state, label1, label2)
    i = _pick([p for _, p, _ in branches], rand01)
    outcome, _, residual = branches[i]
    return outcome, residual


def outcome_distribution(
    state: PureState, bases: Mapping[str, Basis] | Sequence[Basis]
) -> dict[tuple[int, ...], float]:
    """Exact joint distribution of measuring every qubit.

    ``bases`` is either a label->Basis map or a sequence aligned with
    ``state.labels``. Keys are bit tuples in label order; all 2^n outcomes
    are present, including zero-probability ones.
    """
    if isinstance(bases, Mapping):
        if set(bases) != set(state.labels):
            raise ValueError(f"need one basis per label {state.labels}")
        bases = [bases[l] for l in state.labels]
    bases = list(bases)
    if len(bases) != state.n_qubits:
        raise ValueError(f"need {state.n_qubits} bases, got {len(bases)}")
    t = state.tensor_view()
    for axis, basis in enumerate(bases):
        t = np.moveaxis(
            np.tensordot(_EIGENBASES[basis].conj().T, t, axes=([1], [axis])), 0, axis
        )
    probs = np.abs(t.reshape(-1)) ** 2
    return {
        bits: float(probs[i])
        for i, bits in enumerate(itertools.product((0, 1), repeat=state.n_qubits))
    }
