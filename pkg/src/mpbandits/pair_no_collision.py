"""Two-player strategy without collision information.

The slow player (Alice) plays block-constant actions on arms {2..K} chosen
by a block-level swap-regret learner; the fast player (Bob) restarts every
block with the safe arm 1, explores uniformly outside his active set at a
small rate, and plays anytime exponential weights on the arms he has
verified to be collision-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .env import Feedback, Game, GameTranscript, LossSequence, MODEL_NO_INFO
from .errors import ConfigurationError
from .learners import AnytimeExp3, FixedRateSwapInstance, SwapRegretLearner
from .rng import Stream


@dataclass(frozen=True)
class BlockSchedule:
    """R contiguous blocks covering [1, T]; remainder rounds are spread one
    each over the first T mod R blocks."""

    T: int
    R: int

    def __post_init__(self):
        if not (1 <= self.R <= self.T):
            raise ConfigurationError("need 1 <= R <= T")

    def starts(self) -> list[int]:
        base, rem = divmod(self.T, self.R)
        out, t = [], 1
        for r in range(self.R):
            out.append(t)
            t += base + (1 if r < rem else 0)
        return out

    def block_of(self, t: int) -> int:
        """0-based block index of round t."""
        base, rem = divmod(self.T, self.R)
        boundary = rem * (base + 1)
        if t <= boundary:
            return (t - 1) // (base + 1)
        return rem + (t - 1 - boundary) // base

    def length_of(self, r: int) -> int:
        base, rem = divmod(self.T, self.R)
        return base + (1 if r < rem else 0)


def default_block_count(T: int) -> int:
    return max(1, int(math.isqrt(T)))


class AliceBlocks:
    """Slow player: swap-regret learner at block granularity on arms {2..K}."""

    def __init__(self, K: int, T: int, R: int, stream: Stream):
        if K < 2:
            raise ConfigurationError("need at least two arms")
        self.K, self.T = K, T
        self.schedule = BlockSchedule(T, R)
        self.support = list(range(2, K + 1))
        eta = math.sqrt(math.log(max(len(self.support), 2)) / (len(self.support) * self.schedule.R))
        self.learner = SwapRegretLearner(
            self.support, lambda s: FixedRateSwapInstance(s, eta)
        )
        self.stream = stream
        self.arm = 0
        self.block = -1
        self._dist: dict[int, float] | None = None
        self._block_loss = 0.0
        self._prepared_for = -1

    def _prepare(self, t: int) -> None:
        if self._prepared_for == t:
            return
        r = self.schedule.block_of(t)
        if r != self.block:
            self._dist = self.learner.distribution()
        self._prepared_for = t

    def act(self, t: int) -> int:
        self._prepare(t)
        r = self.schedule.block_of(t)
        if r != self.block:
            self.block = r
            self.arm = self.stream.choice(_dense(self._dist, self.K), r, 0)
            self._block_loss = 0.0
        return self.arm

    def observe(self, t: int, fb: Feedback) -> None:
        self._block_loss += fb.observed_loss
        r = self.schedule.block_of(t)
        if t == self.T or self.schedule.block_of(t + 1) != r:
            # block over: feed the normalized block loss of the held arm
            norm = self._block_loss / self.schedule.length_of(r)
            self.learner.update(self.arm, norm, self._dist[self.arm], self._dist)

    def action_distribution(self, t: int):
        self._prepare(t)
        if self.schedule.block_of(t) != self.block:
            return _dense(self._dist, self.K)
        out = [0.0] * (self.K + 1)
        out[self.arm] = 1.0
        return out

    def switch_times(self) -> list[int]:
        return self.schedule.starts()


class BobActiveSet:
    """Fast player: anytime exponential weights on a growing active set."""

    def __init__(self, K: int, T: int, R: int, stream: Stream,
                 explore_rate: float | None = None):
        self.K, self.T = K, T
        self.schedule = BlockSchedule(T, R)
        self.gamma = explore_rate if explore_rate is not None else math.sqrt(K * R / T)
        if self.gamma > 1.0:
            raise ConfigurationError(
                f"exploration rate {self.gamma} > 1; need T >= K R (T >= K^2 at the "
                f"default block count)"
            )
        self.stream = stream
        self.block = -1
        self.active: list[int] = [1]
        self.learner = AnytimeExp3([1])
        self._dist: dict[int, float] | None = None
        self._exploring = False
        self.arm = 0
        self.explored_rounds: set[int] = set()
        self._prepared_for = -1
        self._complement: list[int] = []

    def _prepare(self, t: int) -> None:
        if self._prepared_for == t:
            return
        r = self.schedule.block_of(t)
        if r != self.block:
            self.block = r
            self.active = [1]
            self.learner = AnytimeExp3([1])
        self._complement = [a for a in range(1, self.K + 1) if a not in self.active]
        self._prepared_for = t

    def act(self, t: int) -> int:
        self._prepare(t)
        explore = self.stream.u(t, 1) < self.gamma
        if explore and self._complement:
            self._exploring = True
            self.explored_rounds.add(t)
            self.arm = self._complement[self.stream.integer(len(self._complement), t, 0)]
        else:
            # an exploration draw with an empty complement falls through here
            self._exploring = False
            self._dist = self.learner.begin_round()
            self.arm = self.stream.choice(_dense(self._dist, self.K), t, 0)
        return self.arm

    def observe(self, t: int, fb: Feedback) -> None:
        if self._exploring:
            if fb.observed_loss < 1.0:
                self.active = sorted(self.active + [self.arm])
                self.learner = AnytimeExp3(self.active)
        else:
            self.learner.update_estimate(self.arm, fb.observed_loss / self._dist[self.arm])

    def action_distribution(self, t: int):
        self._prepare(t)
        out = [0.0] * (self.K + 1)
        dist = self.learner.peek_distribution()
        comp = self._complement
        explore_mass = self.gamma if comp else 0.0
        for a in comp:
            out[a] += explore_mass / len(comp)
        for a, q in dist.items():
            out[a] += (1.0 - explore_mass) * q
        return out


def _dense(dist: dict[int, float], K: int) -> list[float]:
    out = [0.0] * (K + 1)
    for a, q in dist.items():
        out[a] = q
    return out


def make_no_collision_pair(K: int, T: int, seed: int, *, R: int | None = None,
                           explore_rate: float | None = None):
    """Build the (Alice, Bob) pair; R defaults to floor(sqrt(T))."""
    if K < 2:
        raise ConfigurationError("need at least two arms")
    if T < K * K:
        raise ConfigurationError(
            f"horizon {T} < K^2 = {K * K}: the default exploration rate would exceed 1"
        )
    R = default_block_count(T) if R is None else R
    alice = AliceBlocks(K, T, R, Stream(seed, "alice"))
    bob = BobActiveSet(K, T, R, Stream(seed, "bob"), explore_rate)
    return alice, bob


def run_no_collision(seq: LossSequence, seed: int, *, R: int | None = None,
                     explore_rate: float | None = None,
                     adaptive=None, K: int | None = None, T: int | None = None):
    """Full two-player game in the no-information model."""
    if seq is not None:
        K, T = seq.K, seq.T
    alice, bob = make_no_collision_pair(K, T, seed, R=R, explore_rate=explore_rate)
    game = Game([alice, bob], MODEL_NO_INFO, seq=seq, adaptive=adaptive, K=K, T=T)
    transcript = game.run()
    return transcript, (alice, bob), game.realized_sequence()
