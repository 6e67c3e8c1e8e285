"""Counter-based random streams.

Every random draw in a simulation is addressed, not sequential: a stream is a
pure function ``(key, address...) -> uniform in [0,1)``.  This makes runs
reproducible byte-for-byte, lets repetitions run in parallel, and means that
adding or removing diagnostic draws can never perturb the draws used by the
strategies.

Stream layout per game instance (seed = per-repetition base seed):

===========  =====================================================
tag          purpose
===========  =====================================================
"alice"      first player's private draws; address (t, slot)
"bob"        second player's private draws; address (t, slot)
"player<i>"  player i in m-player games
"shared"     shared uniform consumed once per round; address (t,)
"protocol"   collision-channel hunt arms; address (wall_t,)
"prgseed"    derivation of the 64-bit generator seed
"obs"        private Bernoulli rounding of observed losses
===========  =====================================================

Bulk table generation (i.i.d. loss matrices) uses numpy's Philox generator,
seeded through ``numpy_generator``; it is likewise counter-based.

Address slot conventions inside a round: slot 0 = action draw, slot 1 =
switch/exploration coin, slot 2 = secondary draw.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15


def _mix(x: int) -> int:
    # splitmix64 finalizer
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _tag_to_int(tag) -> int:
    if isinstance(tag, int):
        return tag & _MASK
    # stable FNV-1a over the utf-8 bytes; no dependence on PYTHONHASHSEED
    h = 0xCBF29CE484222325
    for b in str(tag).encode("utf-8"):
        h = ((h ^ b) * 0x100000001B3) & _MASK
    return h


class Stream:
    """Addressed uniform stream keyed by (seed, *tags)."""

    __slots__ = ("key",)

    def __init__(self, seed: int, *tags):
        k = _mix((seed & _MASK) ^ 0x5851F42D4C957F2D)
        for t in tags:
            k = _mix(k ^ _mix(_tag_to_int(t) ^ _GOLD))
        self.key = k

    def u(self, *address: int) -> float:
        """Uniform in [0,1) at the given address (pure function of it)."""
        h = self.key
        for a in address:
            h = _mix((h + _GOLD * ((a & _MASK) + 1)) & _MASK)
        return (h >> 11) * (2.0**-53)

    def integer(self, n: int, *address: int) -> int:
        """Integer in [0, n) at the given address."""
        return int(self.u(*address) * n)

    def choice(self, probs, *address: int) -> int:
        """Index drawn from a probability vector by inverse CDF.

        ``probs`` may have an unused leading slot (1-based arm vectors); any
        slot with zero mass is never returned.
        """
        u = self.u(*address)
        acc = 0.0
        last = 0
        for i, p in enumerate(probs):
            if p <= 0.0:
                continue
            acc += p
            last = i
            if u < acc:
                return i
        return last  # guard against rounding at the top end


def derive_seed(seed: int, *tags) -> int:
    """A 64-bit sub-seed for a named purpose."""
    return Stream(seed, *tags).key


def numpy_generator(seed: int, *tags) -> np.random.Generator:
    """Counter-based numpy generator for bulk (vectorized) sampling."""
    entropy = [seed & _MASK] + [_tag_to_int(t) for t in tags]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
