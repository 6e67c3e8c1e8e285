"""Game core: loss delivery, collision semantics, transcripts, regret.

Conventions: arms are 1-based everywhere in code (an action is an int in
[1, K]).  Serialized formats (CSV) store arm indices 0-based; round indices
stay 1-based.  A loss row is a length-K sequence with the loss of arm ``a``
at position ``a - 1``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ProtocolViolationError, StateError

MODEL_COLLISION_INFO = "collision_info"
MODEL_COLLISION_ORACLE = "collision_info_oracle"
MODEL_NO_INFO = "no_info"
MODELS = (MODEL_COLLISION_INFO, MODEL_COLLISION_ORACLE, MODEL_NO_INFO)


@dataclass(frozen=True)
class Feedback:
    """What one player sees at the end of a round.

    ``collision`` is None in the no-information model: a loss of 1 is then
    bit-identical whether it came from the true loss or from a collision.
    """

    observed_loss: float
    collision: bool | None = None


class LossSequence:
    """Full K x T oblivious loss table with entries in [0, 1]."""

    def __init__(self, table):
        table = np.ascontiguousarray(table, dtype=np.float64)
        if table.ndim != 2:
            raise ConfigurationError("loss table must be 2-dimensional (T x K)")
        if table.size == 0:
            raise ConfigurationError("loss table must be non-empty")
        if np.any(table < 0.0) or np.any(table > 1.0):
            raise ConfigurationError("loss entries must lie in [0, 1]")
        self.table = table
        self.T, self.K = table.shape

    def row(self, t: int) -> np.ndarray:
        """Loss row of round t (1-based); arm a sits at index a-1."""
        return self.table[t - 1]

    def loss(self, t: int, arm: int) -> float:
        return float(self.table[t - 1, arm - 1])

    def arm_totals(self) -> np.ndarray:
        return self.table.sum(axis=0)

    def is_binary(self) -> bool:
        return bool(np.all((self.table == 0.0) | (self.table == 1.0)))

    def to_csv(self, path_or_buf) -> None:
        buf = io.StringIO()
        buf.write(f"# K={self.K} T={self.T}\n")
        for row in self.table:
            buf.write(",".join(repr(float(x)) for x in row) + "\n")
        _write_text(path_or_buf, buf.getvalue())

    @classmethod
    def from_csv(cls, path_or_buf) -> "LossSequence":
        text = _read_text(path_or_buf)
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise ConfigurationError("missing '# K=<k> T=<t>' header line")
        header = dict(kv.split("=") for kv in lines[0].lstrip("# ").split())
        K, T = int(header["K"]), int(header["T"])
        rows = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
        if len(rows) != T or any(len(r) != K for r in rows):
            raise ConfigurationError("loss CSV body does not match header dimensions")
        return cls(np.array(rows))


def effective_loss(loss_row, actions):
    """Per-player effective losses and collision flags for one round.

    A player on arm a suffers max(loss(a), 1{someone else is on a}).
    """
    k = len(loss_row)
    for a in actions:
        if not (1 <= a <= k):
            raise ConfigurationError(f"action {a} outside [1, {k}]")
    flags = [False] * len(actions)
    for i, a in enumerate(actions):
        for j, b in enumerate(actions):
            if i != j and a == b:
                flags[i] = True
                break
    eff = [1.0 if f else float(loss_row[a - 1]) for f, a in zip(flags, actions)]
    return eff, flags


def best_fixed_subset_loss(seq: LossSequence, m: int) -> float:
    """Minimum cumulative loss of m distinct arms held fixed in hindsight.

    Equals the sum of the m smallest per-arm totals (ties by lowest index).
    """
    if m > seq.K:
        raise ConfigurationError(f"m={m} exceeds number of arms K={seq.K}")
    totals = np.sort(seq.arm_totals())
    return float(totals[:m].sum())


class GameTranscript:
    """Per-round, per-player record of one game."""

    def __init__(self, T: int, m: int, model: str):
        if model not in MODELS:
            raise ConfigurationError(f"unknown model {model!r}")
        self.T = T
        self.m = m
        self.model = model
        self.actions = np.zeros((T, m), dtype=np.int64)
        self.eff_loss = np.zeros((T, m), dtype=np.float64)
        self.collision = np.zeros((T, m), dtype=bool)
        self.comm_event = [""] * T
        self.comm_rounds = 0  # sync events (oracle) / transmissions started (wrapped)
        self.comm_bits = 0
        self.fixed_comm_rounds = 0
        self.random_comm_rounds = 0
        self.protocol_rounds = 0  # wall rounds eaten by the collision channel
        self.rounds_recorded = 0

    def record(self, t, actions, eff, flags, comm_event=""):
        self.actions[t - 1] = actions
        self.eff_loss[t - 1] = eff
        self.collision[t - 1] = flags
        self.comm_event[t - 1] = comm_event
        self.rounds_recorded += 1

    def collision_rounds(self) -> int:
        return int(self.collision.any(axis=1).sum())

    def organic_collision_rounds(self) -> int:
        """Collision rounds not attributable to the signalling protocol."""
        proto = {"init", "bit0", "bit1"}
        return sum(
            1
            for t in range(self.T)
            if self.collision[t].any() and self.comm_event[t] not in proto
        )

    def to_csv(self, path_or_buf) -> None:
        buf = io.StringIO()
        buf.write("t,player,action,eff_loss,collision,comm_event\n")
        for t in range(1, self.T + 1):
            for i in range(self.m):
                buf.write(
                    f"{t},{i},{self.actions[t - 1, i] - 1},"
                    f"{self.eff_loss[t - 1, i]!r},{int(self.collision[t - 1, i])},"
                    f"{self.comm_event[t - 1]}\n"
                )
        _write_text(path_or_buf, buf.getvalue())


@dataclass
class RegretReport:
    cumulative_loss: float
    best_subset_loss: float
    regret: float
    collision_rounds: int
    comm_rounds: int
    comm_bits: int
    fixed_comm_rounds: int = 0
    random_comm_rounds: int = 0
    protocol_rounds: int = 0
    organic_collision_rounds: int = 0


def compute_regret(transcript: GameTranscript, seq: LossSequence) -> RegretReport:
    """Regret of the realized transcript against the best fixed m-subset."""
    if transcript.rounds_recorded != transcript.T:
        raise StateError(
            f"transcript incomplete: {transcript.rounds_recorded}/{transcript.T} rounds"
        )
    if seq.T != transcript.T or seq.K < transcript.actions.max():
        raise ConfigurationError("loss sequence does not match transcript")
    total = float(transcript.eff_loss.sum())
    best = best_fixed_subset_loss(seq, transcript.m)
    return RegretReport(
        cumulative_loss=total,
        best_subset_loss=best,
        regret=total - best,
        collision_rounds=transcript.collision_rounds(),
        comm_rounds=transcript.comm_rounds,
        comm_bits=transcript.comm_bits,
        fixed_comm_rounds=transcript.fixed_comm_rounds,
        random_comm_rounds=transcript.random_comm_rounds,
        protocol_rounds=transcript.protocol_rounds,
        organic_collision_rounds=transcript.organic_collision_rounds(),
    )


class Game:
    """Round-by-round orchestrator for independently acting players.

    Players implement ``act(t) -> arm`` and ``observe(t, Feedback)``; they may
    additionally implement ``action_distribution(t)`` (required to face an
    adaptive adversary) and ``comm_event(t)`` (diagnostic tag + bit count).
    A single game instance is strictly sequential.
    """

    def __init__(self, players, model: str, *, seq: LossSequence | None = None,
                 adaptive=None, K: int | None = None, T: int | None = None,
                 obs_rounding_streams=None):
        if model not in MODELS:
            raise ConfigurationError(f"unknown model {model!r}")
        if (seq is None) == (adaptive is None):
            raise ConfigurationError("provide exactly one of seq / adaptive")
        self.players = list(players)
        self.model = model
        self.seq = seq
        self.adaptive = adaptive
        self.K = seq.K if seq is not None else K
        self.T = seq.T if seq is not None else T
        if self.K is None or self.T is None:
            raise ConfigurationError("adaptive mode requires explicit K and T")
        if adaptive is not None:
            for p in self.players:
                if not hasattr(p, "action_distribution"):
                    raise ConfigurationError(
                        "adaptive adversaries need strategies that report their "
                        "per-round action distribution"
                    )
        self.obs_rounding_streams = obs_rounding_streams
        self.transcript = GameTranscript(self.T, len(self.players), model)
        self.realized_rows = np.zeros((self.T, self.K)) if adaptive is not None else None

    def play_round(self, t: int) -> None:
        if self.adaptive is not None:
            dists = [p.action_distribution(t) for p in self.players]
            row = self.adaptive(*dists)
            self.realized_rows[t - 1] = row
        else:
            row = self.seq.row(t)
        actions = []
        for p in self.players:
            a = p.act(t)
            if not (1 <= a <= self.K):
                raise ProtocolViolationError(
                    f"player emitted out-of-range action {a} at round {t}"
                )
            actions.append(a)
        eff, flags = effective_loss(row, actions)
        comm = ""
        for i, p in enumerate(self.players):
            obs = eff[i]
            if self.obs_rounding_streams is not None:
                # private Bernoulli rounding of the observation to {0, 1}
                obs = 1.0 if self.obs_rounding_streams[i].u(t) < obs else 0.0
            flag = flags[i] if self.model != MODEL_NO_INFO else None
            p.observe(t, Feedback(observed_loss=obs, collision=flag))
            if hasattr(p, "comm_event"):
                ev = p.comm_event(t)
                if ev is not None:
                    comm = ev[0]
                    self.transcript.comm_rounds += 1
                    self.transcript.comm_bits += ev[1]
        self.transcript.record(t, actions, eff, flags, comm)

    def run(self) -> GameTranscript:
        for t in range(1, self.T + 1):
            self.play_round(t)
        return self.transcript

    def realized_sequence(self) -> LossSequence:
        if self.adaptive is None:
            return self.seq
        if self.transcript.rounds_recorded != self.T:
            raise StateError("game not finished")
        return LossSequence(self.realized_rows)


def _write_text(path_or_buf, text: str) -> None:
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w") as f:
            f.write(text)


def _read_text(path_or_buf) -> str:
    if hasattr(path_or_buf, "read"):
        return path_or_buf.read()
    with open(path_or_buf) as f:
        return f.read()
