"""m-player strategy without collision information.

Player i (1 = slowest) holds each action for T^(1-i/m) rounds, stays inside
arms {m-i+1..K} so every player keeps a private safe arm, explores outside
its active set on a sqrt(K) T^(-1/(2m)) fraction of its blocks, runs an
anytime swap-regret learner on the active set, and wipes its memory every
T^(1/m) blocks (exactly when the next-slower player switches).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .env import Feedback, Game, GameTranscript, LossSequence, MODEL_NO_INFO
from .errors import ConfigurationError
from .learners import SwapRegretLearner
from .rng import Stream


def integer_mth_root(T: int, m: int) -> int | None:
    """n with n^m == T, if one exists."""
    if T < 1:
        return None
    n = round(T ** (1.0 / m))
    for cand in (n - 1, n, n + 1):
        if cand >= 1 and cand**m == T:
            return cand
    return None


def nearest_valid_horizon(T: int, m: int) -> int:
    n = max(2, round(T ** (1.0 / m)))
    return n**m


@dataclass(frozen=True)
class NestedBlockSchedule:
    """Block geometry for one player in the nested hierarchy."""

    m: int
    T: int
    i: int
    root: int  # n with T = n^m
    block_len: int  # n^(m-i)
    num_blocks: int  # n^i
    reset_period_blocks: int  # n
    reset_period_rounds: int  # n^(m-i+1)

    def block_of(self, t: int) -> int:
        return (t - 1) // self.block_len

    def block_start(self, r: int) -> int:
        return r * self.block_len + 1

    def reset_times(self) -> list[int]:
        return list(range(1, self.T + 1, self.reset_period_rounds))


def block_schedule(m: int, T: int, i: int) -> NestedBlockSchedule:
    if not (1 <= i <= m):
        raise ConfigurationError(f"player index {i} outside [1, {m}]")
    n = integer_mth_root(T, m)
    if n is None or n < 2:
        raise ConfigurationError(
            f"horizon {T} is not a perfect {m}-th power; nearest valid horizon "
            f"is {nearest_valid_horizon(T, m)}"
        )
    return NestedBlockSchedule(
        m=m, T=T, i=i, root=n,
        block_len=n ** (m - i),
        num_blocks=n**i,
        reset_period_blocks=n,
        reset_period_rounds=n ** (m - i + 1),
    )


# ---------------------------------------------------------------------------
# Top-m assignment construction
# ---------------------------------------------------------------------------

def phi_assignment(optimal, prefix) -> list[int]:
    """Assign each player a distinct optimal action, following its own play
    when possible.

    ``optimal`` is a set of m distinct actions; ``prefix`` the (not
    necessarily distinct) actions A_1..A_k of the k slowest players, with
    A_i >= m - i + 1.  The output depends on ``optimal`` only through the
    set (canonical order: descending), and entry k is distinct from all
    earlier entries of both sequences, lies in the optimal set, and is
    >= m - k + 1.
    """
    opt = sorted(set(optimal), reverse=True)
    m = len(opt)
    if len(set(optimal)) != len(list(optimal)):
        raise ConfigurationError("optimal actions must be distinct")
    if len(list(prefix)) > m:
        raise ConfigurationError("prefix longer than the number of players")
    used: set[int] = set()
    out: list[int] = []
    for k, a_k in enumerate(prefix, start=1):
        if a_k < m - k + 1:
            raise ConfigurationError(
                f"player {k} action {a_k} below its floor {m - k + 1}"
            )
        if a_k in opt and a_k not in used:
            pick = a_k
        else:
            pick = next(
                (v for v in opt if v not in used and v >= m - k + 1), None
            )
            if pick is None:
                raise ConfigurationError("no admissible assignment value")
        used.add(pick)
        out.append(pick)
    return out


def phi_assign(optimal, prefix, k: int) -> int:
    """The k-th player's assigned action (1-based k, k <= len(prefix))."""
    return phi_assignment(optimal, list(prefix)[:k])[k - 1]


# ---------------------------------------------------------------------------
# Per-player strategy
# ---------------------------------------------------------------------------

class NestedBlockPlayer:
    """Player i of the m-player hierarchy (1-based, 1 = slowest)."""

    def __init__(self, m: int, K: int, T: int, i: int, stream: Stream,
                 alpha: float | None = None):
        self.m, self.K, self.T, self.i = m, K, T, i
        self.schedule = block_schedule(m, T, i)
        self.floor_arm = m - i + 1
        self.arms = list(range(self.floor_arm, K + 1))
        self.alpha = alpha if alpha is not None else math.sqrt(K) * T ** (-1.0 / (2 * m))
        if self.alpha > 1.0:
            raise ConfigurationError(
                f"exploration rate {self.alpha} > 1; need T >= K^m"
            )
        self.stream = stream
        self.block = -1
        self.arm = 0
        self._exploring = False
        self._dist: dict[int, float] | None = None
        self._block_loss = 0.0
        self._reset_state()

    def _reset_state(self) -> None:
        self.active = [self.floor_arm]
        self.learner = SwapRegretLearner(self.active)

    def fresh_like(self) -> "NestedBlockPlayer":
        return NestedBlockPlayer(self.m, self.K, self.T, self.i, self.stream,
                                 self.alpha)

    def act(self, t: int) -> int:
        r = self.schedule.block_of(t)
        if r != self.block:
            self.block = r
            if r % self.schedule.reset_period_blocks == 0:
                self._reset_state()
            complement = [a for a in self.arms if a not in self.active]
            if self.stream.u(r, 1) < self.alpha and complement:
                self._exploring = True
                self.arm = complement[self.stream.integer(len(complement), r, 0)]
            else:
                self._exploring = False
                self._dist = self.learner.distribution()
                self.arm = self.stream.choice(_dense(self._dist, self.K), r, 0)
            self._block_loss = 0.0
        return self.arm

    def observe(self, t: int, fb: Feedback) -> None:
        self._block_loss += fb.observed_loss
        if t == self.T or self.schedule.block_of(t + 1) != self.block:
            length = self.schedule.block_len
            if self._exploring:
                if self._block_loss < length:  # some round saw loss < 1
                    self.active = sorted(self.active + [self.arm])
                    self.learner = SwapRegretLearner(self.active)
            else:
                self.learner.update(
                    self.arm, self._block_loss / length, self._dist[self.arm],
                    self._dist,
                )

    def action_distribution(self, t: int):
        r = self.schedule.block_of(t)
        if r == self.block and self.arm:
            out = [0.0] * (self.K + 1)
            out[self.arm] = 1.0
            return out
        dist = self.learner.distribution()
        complement = [a for a in self.arms if a not in self.active]
        out = [0.0] * (self.K + 1)
        mass = self.alpha if complement else 0.0
        for a in complement:
            out[a] += mass / len(complement)
        for a, q in dist.items():
            out[a] += (1.0 - mass) * q
        return out


def _dense(dist: dict[int, float], K: int) -> list[float]:
    out = [0.0] * (K + 1)
    for a, q in dist.items():
        out[a] = q
    return out


def make_players(m: int, K: int, T: int, seed: int,
                 alpha: float | None = None) -> list[NestedBlockPlayer]:
    if m > K:
        raise ConfigurationError(f"m={m} players need at least m arms, got K={K}")
    if integer_mth_root(T, m) is None:
        raise ConfigurationError(
            f"horizon {T} must be a perfect {m}-th power; nearest valid is "
            f"{nearest_valid_horizon(T, m)}"
        )
    if T < K**m:
        raise ConfigurationError(f"need T >= K^m = {K ** m} so exploration fits")
    return [
        NestedBlockPlayer(m, K, T, i, Stream(seed, f"player{i}"), alpha)
        for i in range(1, m + 1)
    ]


def run_multiplayer(seq: LossSequence, m: int, seed: int,
                    alpha: float | None = None):
    """Full m-player game in the no-information model."""
    players = make_players(m, seq.K, seq.T, seed, alpha)
    game = Game(players, MODEL_NO_INFO, seq=seq)
    transcript = game.run()
    return transcript, players
