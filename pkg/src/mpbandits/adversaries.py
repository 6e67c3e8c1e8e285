"""Loss-sequence generators: i.i.d. stochastic, scripted files, the
three-action counterexample table, and the adaptive threshold adversary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .env import LossSequence
from .errors import ConfigurationError
from .rng import numpy_generator


@dataclass
class AdversarySpec:
    """Declarative description of an adversary, as used by the harness."""

    kind: str  # stochastic | scripted | remark | adaptive_prop1
    means: tuple[float, ...] = ()
    path: str = ""

    def __post_init__(self):
        if self.kind not in ("stochastic", "scripted", "remark", "adaptive_prop1"):
            raise ConfigurationError(f"unknown adversary kind {self.kind!r}")
        if self.kind == "stochastic":
            if not self.means or any(not (0.0 <= x <= 1.0) for x in self.means):
                raise ConfigurationError("stochastic adversary needs means in [0,1]^K")
        if self.kind == "scripted" and not self.path:
            raise ConfigurationError("scripted adversary needs a file path")

    def is_adaptive(self) -> bool:
        return self.kind == "adaptive_prop1"

    def table(self, K: int, T: int, seed: int) -> LossSequence:
        if self.kind == "stochastic":
            if len(self.means) != K:
                raise ConfigurationError("means length must equal K")
            return stochastic_losses(self.means, T, seed)
        if self.kind == "remark":
            if K != 3:
                raise ConfigurationError("the counterexample table requires K=3")
            return remark_sequence(T)
        if self.kind == "scripted":
            seq = LossSequence.from_csv(self.path)
            if seq.K != K or seq.T != T:
                raise ConfigurationError(
                    f"scripted table is {seq.T}x{seq.K}, expected {T}x{K}"
                )
            return seq
        raise ConfigurationError("adaptive adversaries do not pre-produce a table")


def stochastic_losses(means, T: int, seed: int) -> LossSequence:
    """i.i.d. Bernoulli loss table, entry (t, k) ~ Ber(means[k])."""
    means = np.asarray(means, dtype=np.float64)
    if means.ndim != 1 or np.any(means < 0) or np.any(means > 1):
        raise ConfigurationError("means must lie in [0,1]")
    rng = numpy_generator(seed, "loss-table")
    table = (rng.random((T, means.size)) < means).astype(np.float64)
    return LossSequence(table)


def remark_sequence(T: int) -> LossSequence:
    """Three-arm table whose thirds are (0,1,1), (1,0,1), (0,0,1).

    A player hopping 1 -> 2 -> 3 by thirds has zero individual regret on it,
    yet no partner can bring the pair below T/3 regret.
    """
    if T % 3 != 0:
        raise ConfigurationError("horizon must be divisible by 3")
    third = T // 3
    table = np.empty((T, 3))
    table[:third] = (0.0, 1.0, 1.0)
    table[third : 2 * third] = (1.0, 0.0, 1.0)
    table[2 * third :] = (0.0, 0.0, 1.0)
    return LossSequence(table)


def adaptive_prop1_losses(p_a, p_b) -> np.ndarray:
    """Adaptive threshold rule for K=3.

    If some player puts probability >= 3/4 on some arm (players scanned in
    order, arms lowest first), the loss is 1 on that arm and 0 elsewhere;
    otherwise the zero vector.  Accepts dense vectors of length 3 (0-based)
    or 4 (unused leading slot).
    """
    row = np.zeros(3)
    for dist in (p_a, p_b):
        d = np.asarray(dist, dtype=np.float64)
        if d.size == 4:
            d = d[1:]
        if d.size != 3:
            raise ConfigurationError("the threshold adversary requires K=3")
        for arm in range(3):
            if d[arm] >= 0.75:
                row[arm] = 1.0
                return row
    return row


class AdaptiveProp1:
    """Stateful wrapper recording the rounds on which the loss fired."""

    def __init__(self):
        self.fired_rounds = 0

    def __call__(self, p_a, p_b) -> np.ndarray:
        row = adaptive_prop1_losses(p_a, p_b)
        if row.any():
            self.fired_rounds += 1
        return row
