"""Seeded Monte Carlo harness: configuration, execution, aggregation, output.

Round ``i`` of a run draws only from ``rng.round_stream(seed, i)``, and the
per-round results are reduced in round order, so a report is a pure function
of its config regardless of how many worker processes produced it.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import decoy, hbb99, kki
from .adversary import AttackKind, AttackStrategy, CheatMode
from .kki import StateReveal
from .rng import MAX_SEED, round_stream, uniform

PROTOCOLS = ("hbb99", "kki")
ATTACKS = tuple(k.value for k in AttackKind)
DEFENSES = ("none", "decoy")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    protocol: str = "hbb99"
    attack: str = "none"
    cheat_mode: str | None = None
    state_reveal: str | None = None
    defense: str = "none"
    decoy_p: float = 0.8
    rounds: int = 10_000
    sample_frac: float = 0.2
    seed: int = 0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}; choose from {PROTOCOLS}")
        if self.attack not in ATTACKS:
            raise ConfigError(f"unknown attack {self.attack!r}; choose from {ATTACKS}")
        if self.defense not in DEFENSES:
            raise ConfigError(f"unknown defense {self.defense!r}; choose from {DEFENSES}")
        if self.cheat_mode is not None:
            if self.cheat_mode not in {m.value for m in CheatMode}:
                raise ConfigError(f"unknown cheat mode {self.cheat_mode!r}")
            if (self.protocol, self.attack) != ("kki", "fake-signal"):
                raise ConfigError("--cheat-mode applies only to kki with the fake-signal attack")
        if self.state_reveal is not None:
            if self.state_reveal not in {r.value for r in StateReveal}:
                raise ConfigError(f"unknown state reveal {self.state_reveal!r}")
            if self.protocol != "kki":
                raise ConfigError("--state-reveal applies only to kki")
        if self.cheat_mode == "unitary" and self.state_reveal != "before":
            raise ConfigError("cheat mode 'unitary' requires --state-reveal before")
        for name in ("decoy_p", "sample_frac"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.rounds < 1:
            raise ConfigError(f"rounds must be >= 1, got {self.rounds}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def strategy(self) -> AttackStrategy:
        kind = AttackKind(self.attack)
        mode = CheatMode(self.cheat_mode) if self.cheat_mode else None
        return AttackStrategy(kind, mode)

    @property
    def reveal(self) -> StateReveal:
        return StateReveal(self.state_reveal or "after")

    @property
    def agent_bases(self):
        return hbb99.AGENT_BASES if self.protocol == "hbb99" else kki.AGENT_BASES


@dataclass(frozen=True)
class RoundSummary:
    """The per-round facts the report needs; cheap to ship between processes."""

    round_id: int
    decoy: bool = False
    kept: bool = False
    sample: bool = False
    check_passed: bool | None = None
    charlie_bit: int | None = None
    stolen_bit: int | None = None
    alice_key: int | None = None
    alice_key_guess: int | None = None
    decoys: tuple[decoy.DecoyRecord, ...] = ()


def simulate_round(config: SimConfig, round_id: int) -> RoundSummary:
    rng = round_stream(config.seed, round_id)
    attack = config.strategy
    if config.defense == "decoy" and decoy.is_decoy_round(config.decoy_p, rng):
        records, _ = decoy.run_decoy_round(attack, config.agent_bases, rng, round_id)
        return RoundSummary(round_id, decoy=True, decoys=tuple(records))
    # Alice's sample choice is drawn up front but only consulted after sifting
    is_sample = uniform(rng) < config.sample_frac
    if config.protocol == "hbb99":
        r = hbb99.run_round(attack, is_sample, rng, round_id)
        charlie = r.true_bits[hbb99.Party.CHARLIE]
    else:
        r = kki.run_round(attack, is_sample, rng, round_id, config.reveal)
        charlie = r.true_bits["C"]
    summary = RoundSummary(round_id, kept=r.sift.kept, sample=r.is_sample, check_passed=r.check_passed)
    if not r.is_key_round:
        return summary
    log = r.attacker_log
    extra = {"charlie_bit": charlie, "stolen_bit": log.stolen_bit if log else None}
    if config.protocol == "hbb99":
        extra["alice_key"] = hbb99.alice_key_bit(r)
        extra["alice_key_guess"] = hbb99.bob_key_guess(r)
    return dataclasses.replace(summary, **extra)


def _simulate_chunk(args):
    config, start, stop = args
    return [simulate_round(config, i) for i in range(start, stop)]


@dataclass(frozen=True)
class SimReport:
    protocol: str
    attack: str
    cheat_mode: str | None
    state_reveal: str | None
    defense: str
    decoy_p: float
    rounds: int
    sample_frac: float
    seed: int
    kept: int
    discarded: int
    samples: int
    sample_errors: int
    decoy_rounds: int
    matched_decoys_b: int
    decoy_errors_b: int
    matched_decoys_c: int
    decoy_errors_c: int
    sift_rate: float | None
    sample_error_rate: float | None
    decoy_error_rate_b: float | None
    decoy_error_rate_c: float | None
    detected: bool
    attacker_recovery_rate: float | None
    alice_key_recovered: bool | None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SimReport":
        return cls(**d)


def _rate(num: int, den: int) -> float | None:
    return float(f"{num / den:.6g}") if den else None


def aggregate(config: SimConfig, rounds: list[RoundSummary]) -> SimReport:
    rounds = sorted(rounds, key=lambda r: r.round_id)
    protocol_rounds = [r for r in rounds if not r.decoy]
    kept = [r for r in protocol_rounds if r.kept]
    samples = [r for r in kept if r.sample]
    sample_errors = sum(not r.check_passed for r in samples)
    key_rounds = [r for r in kept if not r.sample]

    checks = {}
    for ch in decoy.Channel:
        checks[ch] = decoy.decoy_check(rec for r in rounds for rec in r.decoys if rec.channel is ch)

    detected = decoy.flag_attack(len(samples), sample_errors) or any(
        decoy.flag_attack(c.matched, c.errors) for c in checks.values()
    )

    recovery = None
    key_recovered = None
    if config.attack != "none":
        guessed = [r for r in key_rounds if r.stolen_bit is not None]
        recovery = _rate(sum(r.stolen_bit == r.charlie_bit for r in guessed), len(key_rounds))
    if config.protocol == "hbb99":
        key_recovered = bool(key_rounds) and all(r.alice_key_guess == r.alice_key for r in key_rounds)

    b, c = checks[decoy.Channel.B], checks[decoy.Channel.C]
    return SimReport(
        protocol=config.protocol,
        attack=config.attack,
        cheat_mode=config.cheat_mode,
        state_reveal=config.state_reveal,
        defense=config.defense,
        decoy_p=config.decoy_p,
        rounds=config.rounds,
        sample_frac=config.sample_frac,
        seed=config.seed,
        kept=len(kept),
        discarded=len(protocol_rounds) - len(kept),
        samples=len(samples),
        sample_errors=sample_errors,
        decoy_rounds=len(rounds) - len(protocol_rounds),
        matched_decoys_b=b.matched,
        decoy_errors_b=b.errors,
        matched_decoys_c=c.matched,
        decoy_errors_c=c.errors,
        sift_rate=_rate(len(kept), len(protocol_rounds)),
        sample_error_rate=_rate(sample_errors, len(samples)),
        decoy_error_rate_b=_rate(b.errors, b.matched),
        decoy_error_rate_c=_rate(c.errors, c.matched),
        detected=detected,
        attacker_recovery_rate=recovery,
        alice_key_recovered=key_recovered,
    )


def run_rounds(config: SimConfig, workers: int = 1) -> list[RoundSummary]:
    if workers <= 1:
        return _simulate_chunk((config, 0, config.rounds))
    size = -(-config.rounds // (workers * 4))
    chunks = [(config, s, min(s + size, config.rounds)) for s in range(0, config.rounds, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [r for chunk in pool.map(_simulate_chunk, chunks) for r in chunk]


def run_experiment(config: SimConfig, workers: int = 1) -> SimReport:
    return aggregate(config, run_rounds(config, workers))


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def serialize_report(report: SimReport, fmt: str = "json") -> bytes:
    d = report.to_dict()
    if fmt == "json":
        return (json.dumps(d, indent=2) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(d.keys())
        writer.writerow(_csv_cell(v) for v in d.values())
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def transcript_lines(rounds: list[RoundSummary]):
    """JSON-lines view of per-round summaries."""
    for r in sorted(rounds, key=lambda r: r.round_id):
        d = dataclasses.asdict(r)
        d["decoys"] = [
            {
                "channel": rec.channel.value,
                "prep_basis": rec.prep_basis.value,
                "prep_bit": rec.prep_bit,
                "agent_basis": rec.agent_basis.value,
                "agent_bit": rec.agent_bit,
            }
            for rec in r.decoys
        ]
        yield json.dumps(d, sort_keys=True)
