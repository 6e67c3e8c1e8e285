"""Bit-level plumbing for removing the shared-randomness and communication
assumptions: a fixed-point/float hybrid encoding of exchanged sums, and a
keyed counter-based pseudorandom generator standing in for the shared
uniform stream.
"""

from __future__ import annotations

import hashlib
import math
import struct

from .errors import ConfigurationError, ProtocolViolationError
from .rng import Stream

_EXP_BITS = 8
_EXP_BIAS = 65  # stored exponent = e + bias; 0 is reserved for the value 0


def _mant_bits(T: int) -> int:
    return 2 * max(1, math.ceil(math.log2(T)))


def encoding_width(T: int) -> int:
    """Bits per encoded value: 2 ceil(log2 T) mantissa + 8 exponent bits."""
    return _mant_bits(T) + _EXP_BITS


def quantize(value: float, T: int) -> int:
    """Encode a nonnegative real <= T^2 with relative error <= T^-2.

    Sign-free floating encoding: values in [1/3 T^-2, T^2] keep
    2 ceil(log2 T) mantissa bits (so absolute error <= T^-2 for values up to
    1); smaller values flush to zero, which is encoded exactly.
    """
    if value < 0:
        raise ConfigurationError("only nonnegative values are encodable")
    if value > float(T) ** 2 * (1 + 1e-12):
        raise ProtocolViolationError(f"value {value} overflows the T^2 encoding range")
    mant_bits = _mant_bits(T)
    if value == 0.0 or value < 2.0 ** (1 - _EXP_BIAS):
        return 0
    m, e = math.frexp(value)  # value = m * 2^e with m in [0.5, 1)
    m, e = m * 2.0, e - 1  # normalize to [1, 2)
    frac = round((m - 1.0) * (1 << mant_bits))
    if frac == (1 << mant_bits):
        frac = 0
        e += 1
    stored = e + _EXP_BIAS
    if not (1 <= stored < (1 << _EXP_BITS)):
        raise ProtocolViolationError(f"exponent {e} outside encodable range")
    return (stored << mant_bits) | frac


def dequantize(code: int, T: int) -> float:
    mant_bits = _mant_bits(T)
    if code == 0:
        return 0.0
    stored = code >> mant_bits
    frac = code & ((1 << mant_bits) - 1)
    return (1.0 + frac / (1 << mant_bits)) * 2.0 ** (stored - _EXP_BIAS)


def quantize_value(value: float, T: int) -> float:
    """Round-trip a value through the channel encoding."""
    return dequantize(quantize(value, T), T)


# ---------------------------------------------------------------------------
# Shared uniform streams
# ---------------------------------------------------------------------------

class PrgStream:
    """Keyed pseudorandom stream: uniform_t = PRF(seed, t) / 2^64.

    The key is a 64-bit seed; each round consumes exactly one stream element
    addressed by the round counter, so both endpoints stay aligned without
    any state exchange beyond the seed itself.
    """

    def __init__(self, seed64: int):
        if not (0 <= seed64 < (1 << 64)):
            raise ConfigurationError("seed must be a 64-bit integer")
        self.seed64 = seed64
        self._key = struct.pack("<Q", seed64)
        self.position = 0

    def u(self, t: int) -> float:
        self.position = max(self.position, t)
        digest = hashlib.sha256(self._key + struct.pack("<Q", t)).digest()
        return int.from_bytes(digest[:8], "little") / 2.0**64

    def bits(self, n: int) -> list[int]:
        """First n bits of the expanded stream."""
        out: list[int] = []
        block = 0
        while len(out) < n:
            digest = hashlib.sha256(self._key + b"#" + struct.pack("<Q", block)).digest()
            for byte in digest:
                for k in range(8):
                    out.append((byte >> k) & 1)
                    if len(out) == n:
                        return out
            block += 1
        return out

    def seed_bits(self) -> list[int]:
        return [(self.seed64 >> i) & 1 for i in range(64)]


def prg_expand(seed64: int, n: int) -> list[int]:
    """Deterministic n-bit expansion of a 64-bit seed."""
    return PrgStream(seed64).bits(n)


class RandomShared:
    """Truly random shared stream (counter-based, per-instance seeded)."""

    def __init__(self, seed: int):
        self._stream = Stream(seed, "shared")
        self.position = 0

    def u(self, t: int) -> float:
        self.position = max(self.position, t)
        return self._stream.u(t)
