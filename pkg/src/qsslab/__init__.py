"""Simulator for quantum secret sharing under the fake-signal-and-cheating attack."""

from .adversary import AttackKind, AttackStrategy, CheatMode
from .qstate import Basis, BellOutcome, KkiSignal, PauliOp, PureState
from .simlab import SimConfig, SimReport, run_experiment, serialize_report

__version__ = "0.1.0"
