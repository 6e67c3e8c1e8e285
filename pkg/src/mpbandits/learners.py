"""Single-player online learning primitives.

Exponential weights over an arbitrary arm support, the anytime variant with a
dyadic learning-rate schedule, and a swap-regret learner obtained by the
classical reduction: K external-regret instances combined through a
stationary distribution of the row-stochastic matrix of their plays.

Loss estimates fed to learners are unbounded nonnegative reals (importance
weighting happens at the caller, or through ``update`` which divides by the
probability the arm was actually played with).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError

PROB_ATOL = 1e-12


def anytime_learning_rate(t: int, k: int) -> float:
    """Dyadic-epoch learning rate sqrt(log k / (k 2^ceil(log2 t))).

    Constant on each epoch (2^{j-1}, 2^j]; an anytime instance resets its
    cumulative estimates whenever the epoch changes.
    """
    if t < 1:
        raise ConfigurationError("round index must be >= 1")
    epoch = 1 << max(0, math.ceil(math.log2(t)))
    k = max(k, 2)  # singleton supports play deterministically; rate is moot
    return math.sqrt(math.log(k) / (k * epoch))


class Exp3:
    """Exponential weights on a fixed support with caller-supplied rate.

    No exploration mixing is baked in; callers add their own exploration on
    top where needed.
    """

    def __init__(self, support, eta: float):
        self.support = list(support)
        if not self.support:
            raise ConfigurationError("empty support")
        self.eta = float(eta)
        self.cum = {a: 0.0 for a in self.support}

    def distribution(self) -> dict[int, float]:
        """Play distribution proportional to exp(-eta * cumulative estimate)."""
        lo = min(self.cum.values())  # shift for numerical stability
        ws = {a: math.exp(-self.eta * (c - lo)) for a, c in self.cum.items()}
        z = sum(ws.values())
        return {a: w / z for a, w in ws.items()}

    def probs_vector(self, k: int) -> list[float]:
        """Distribution as a 1-based dense vector of length k+1."""
        p = [0.0] * (k + 1)
        for a, q in self.distribution().items():
            p[a] = q
        return p

    def update_estimate(self, arm: int, estimate: float) -> None:
        """Add an already importance-weighted loss estimate for one arm."""
        if arm not in self.cum:
            raise ConfigurationError(f"arm {arm} outside support")
        if estimate < 0:
            raise ConfigurationError("loss estimates must be nonnegative")
        self.cum[arm] += estimate

    def update(self, arm: int, loss: float, played_prob: float | None = None) -> None:
        """Importance-weight an observed loss by the playing probability."""
        if played_prob is None:
            played_prob = self.distribution()[arm]
        self.update_estimate(arm, loss / played_prob)


def exp3_step(state: Exp3, support, feedback=None):
    """One exponential-weights step: optional update, then fresh distribution.

    ``feedback`` is (arm, loss, played_prob) or (arm, estimate) where the
    estimate is already importance weighted.
    """
    if list(support) != state.support:
        raise ConfigurationError("support does not match the learner state")
    if feedback is not None:
        if len(feedback) == 3:
            arm, loss, prob = feedback
            state.update(arm, loss, prob)
        else:
            arm, est = feedback
            state.update_estimate(arm, est)
    return state.distribution(), state


class AnytimeExp3:
    """Exp3 with the dyadic restart schedule; horizon need not be known."""

    def __init__(self, support):
        self.support = list(support)
        if not self.support:
            raise ConfigurationError("empty support")
        self.t = 0
        self._epoch = 0
        self.inner = Exp3(self.support, anytime_learning_rate(1, len(self.support)))

    def begin_round(self) -> dict[int, float]:
        """Advance the clock, restart on epoch boundaries, return the play dist."""
        self.t += 1
        epoch = max(0, math.ceil(math.log2(self.t))) if self.t > 1 else 0
        if epoch != self._epoch:
            self._epoch = epoch
            self.inner = Exp3(
                self.support, anytime_learning_rate(self.t, len(self.support))
            )
        return self.inner.distribution()

    def peek_distribution(self) -> dict[int, float]:
        """The distribution the next begin_round() will return, untouched."""
        t = self.t + 1
        epoch = max(0, math.ceil(math.log2(t))) if t > 1 else 0
        if epoch != self._epoch:
            return {a: 1.0 / len(self.support) for a in self.support}
        return self.inner.distribution()

    def update_estimate(self, arm: int, estimate: float) -> None:
        self.inner.update_estimate(arm, estimate)


def stationary_distribution(matrix, atol: float = 1e-9) -> np.ndarray:
    """Stationary distribution p (p M = p) of a row-stochastic matrix.

    Damped power iteration from the uniform vector (deterministic also for
    reducible or periodic matrices), direct linear solve as a fallback for
    K <= 64.  Guarantees ||p M - p||_1 <= atol.
    """
    M = np.asarray(matrix, dtype=np.float64)
    k = M.shape[0]
    if M.ndim != 2 or M.shape[1] != k:
        raise ConfigurationError("matrix must be square")
    if np.any(M < 0):
        raise ConfigurationError("matrix entries must be nonnegative")
    if np.any(np.abs(M.sum(axis=1) - 1.0) > 1e-9):
        raise ConfigurationError("rows must sum to 1")
    p = np.full(k, 1.0 / k)
    for _ in range(10**5):
        nxt = 0.5 * (p + p @ M)  # lazy chain: same fixed points, aperiodic
        if np.abs(nxt - p).sum() <= 0.25 * atol:
            p = nxt
            break
        p = nxt
    if np.abs(p @ M - p).sum() > atol:
        if k > 64:
            raise ConfigurationError("power iteration failed to converge")
        p = _stationary_solve(M)
    p = np.maximum(p, 0.0)
    return p / p.sum()


def _stationary_solve(M: np.ndarray) -> np.ndarray:
    k = M.shape[0]
    A = np.vstack([M.T - np.eye(k), np.ones((1, k))])
    b = np.zeros(k + 1)
    b[-1] = 1.0
    p, *_ = np.linalg.lstsq(A, b, rcond=None)
    return np.maximum(p, 0.0)


class SwapRegretLearner:
    """Swap-regret learner over an arbitrary support via the instance reduction.

    One external-regret instance per arm; the combined play distribution is a
    stationary distribution of the matrix whose row i is instance i's
    distribution.  On feedback (arm, estimate), instance i receives the
    estimate scaled by the combined weight p(i).
    """

    def __init__(self, support, instance_factory=None):
        self.support = list(support)
        if not self.support:
            raise ConfigurationError("empty support")
        if instance_factory is None:
            instance_factory = AnytimeSwapInstance
        self.instances = {a: instance_factory(self.support) for a in self.support}
        self._warm = None

    def distribution(self) -> dict[int, float]:
        k = len(self.support)
        M = np.empty((k, k))
        for i, a in enumerate(self.support):
            d = self.instances[a].distribution()
            M[i] = [d[b] for b in self.support]
        p = _stationary_with_warm_start(M, self._warm)
        self._warm = p
        return {a: float(p[i]) for i, a in enumerate(self.support)}

    def update_estimated(self, arm: int, estimate: float,
                         combined: dict[int, float] | None = None) -> None:
        """Feed an importance-weighted estimate of the played arm's loss."""
        if combined is None:
            combined = self.distribution()
        for a in self.support:
            self.instances[a].update_estimate(arm, combined[a] * estimate)
        self._warm = None  # instances moved; recombine next time

    def update(self, arm: int, loss: float, played_prob: float,
               combined: dict[int, float] | None = None) -> None:
        """Importance-weight an observed loss, then update all instances."""
        self.update_estimated(arm, loss / played_prob, combined)


def swap_regret_step(state: SwapRegretLearner, feedback=None):
    """One swap-learner step: optional estimated feedback, then combine.

    ``feedback`` is (arm, estimate) with the estimate already importance
    weighted by the probability the arm was played with.
    """
    if feedback is not None:
        arm, est = feedback
        state.update_estimated(arm, est)
    return state.distribution(), state


def _stationary_with_warm_start(M: np.ndarray, warm) -> np.ndarray:
    # Same fixed point as stationary_distribution; the warm start only
    # shortens the damped iteration between consecutive calls.
    p = warm if warm is not None else np.full(M.shape[0], 1.0 / M.shape[0])
    for _ in range(10**5):
        nxt = 0.5 * (p + p @ M)
        if np.abs(nxt - p).sum() <= 2.5e-10:
            p = nxt
            break
        p = nxt
    if np.abs(p @ M - p).sum() > 1e-9:
        p = _stationary_solve(M)
    p = np.maximum(p, 0.0)
    return p / p.sum()


class AnytimeSwapInstance:
    """Anytime external-regret instance used inside SwapRegretLearner.

    A plain exponential-weights learner on dyadically restarting epochs; its
    clock ticks on every update.
    """

    def __init__(self, support):
        self.support = list(support)
        self.anytime = AnytimeExp3(self.support)
        self.anytime.begin_round()

    def distribution(self) -> dict[int, float]:
        return self.anytime.inner.distribution()

    def update_estimate(self, arm: int, estimate: float) -> None:
        self.anytime.inner.update_estimate(arm, estimate)
        self.anytime.begin_round()


class FixedRateSwapInstance:
    """Known-horizon instance: plain Exp3 with a caller-chosen rate."""

    def __init__(self, support, eta: float):
        self.inner = Exp3(support, eta)

    def distribution(self) -> dict[int, float]:
        return self.inner.distribution()

    def update_estimate(self, arm: int, estimate: float) -> None:
        self.inner.update_estimate(arm, estimate)
