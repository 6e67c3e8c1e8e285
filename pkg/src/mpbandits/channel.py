"""Collision-channel transport: replaces the instant-communication oracle by
bit signalling over the game itself.

One bit per round: the receiver sits on arm 1, the sender plays arm 1 for a
1-bit (forcing a collision) and arm 2 for a 0-bit.  Switch-triggered syncs
are announced by the sender hunting the receiver with uniformly random arms
until a collision occurs; scheduled syncs need no announcement since both
endpoints share the schedule.  Message lengths are fixed functions of (K, T),
so no length headers are exchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .codec import PrgStream, dequantize, encoding_width, quantize
from .env import GameTranscript, LossSequence, MODEL_COLLISION_INFO, effective_loss
from .errors import ConfigurationError, ProtocolViolationError
from .pair_collision import CollisionInfoPair, _ceil_log2
from .rng import Stream, derive_seed


# ---------------------------------------------------------------------------
# Message serialization (framing fixed by K and T)
# ---------------------------------------------------------------------------

def _int_to_bits(value: int, width: int) -> list[int]:
    return [(value >> i) & 1 for i in range(width)]


def _bits_to_int(bits) -> int:
    out = 0
    for i, b in enumerate(bits):
        out |= (b & 1) << i
    return out


def increment_message_bits(msg, K: int, T: int) -> list[int]:
    """Serialize one direction's sync payload: the K window sums, then the
    last round's (arm-or-none, value) pair."""
    vec, last = msg
    width = encoding_width(T)
    bits: list[int] = []
    for a in range(1, K + 1):
        bits += _int_to_bits(quantize(vec[a], T), width)
    arm = 0 if last is None else last[0]
    val = 0.0 if last is None else last[1]
    bits += _int_to_bits(arm, _ceil_log2(K + 1))
    bits += _int_to_bits(quantize(val, T), width)
    return bits


def parse_increment_message(bits, K: int, T: int):
    width = encoding_width(T)
    pos = 0
    vec = [0.0] * (K + 1)
    for a in range(1, K + 1):
        vec[a] = dequantize(_bits_to_int(bits[pos : pos + width]), T)
        pos += width
    arm = _bits_to_int(bits[pos : pos + _ceil_log2(K + 1)])
    pos += _ceil_log2(K + 1)
    val = dequantize(_bits_to_int(bits[pos : pos + width]), T)
    pos += width
    last = None if arm == 0 else (arm, val)
    return (vec, last), pos


def action_bits(arm: int, K: int) -> list[int]:
    return _int_to_bits(arm - 1, _ceil_log2(K))


def parse_action(bits, K: int) -> int:
    return _bits_to_int(bits[: _ceil_log2(K)]) + 1


# ---------------------------------------------------------------------------
# Standalone bit link (unit-test surface for the transport itself)
# ---------------------------------------------------------------------------

class CollisionBitLink:
    """Sender/receiver pair on a bare K-arm collision channel."""

    def __init__(self, K: int, hunt_stream: Stream | None = None):
        if K < 2:
            raise ConfigurationError("bit signalling needs at least two arms")
        self.K = K
        self.hunt_stream = hunt_stream
        self.rounds = 0

    def initiate(self, receiver_arm: int) -> int:
        """Hunt a stationary receiver with uniform arms; rounds consumed."""
        if self.hunt_stream is None:
            raise ConfigurationError("initiation needs a hunt stream")
        used = 0
        while True:
            used += 1
            self.rounds += 1
            arm = 1 + self.hunt_stream.integer(self.K, self.rounds)
            if arm == receiver_arm:
                return used

    def send(self, bits) -> tuple[int, list[int]]:
        """Transmit bits; the receiver decodes from the collision pattern.

        Returns (rounds consumed, decoded bits); decoding is exact because
        collisions are deterministic given the played arms.
        """
        decoded = []
        for b in bits:
            sender_arm = 1 if b else 2
            receiver_arm = 1
            self.rounds += 1
            decoded.append(1 if sender_arm == receiver_arm else 0)
        return len(list(bits)), decoded


def send_bits_via_collision(bits, link: CollisionBitLink, *,
                            initiate_on: int | None = None):
    """Spec-level transport: optional initiation, then one round per bit."""
    rounds = 0
    if initiate_on is not None:
        rounds += link.initiate(initiate_on)
    n, decoded = link.send(bits)
    rounds += n
    if decoded != list(bits):
        raise ProtocolViolationError("bit transport desynchronized")
    return rounds, decoded


# ---------------------------------------------------------------------------
# Wrapping the instant-communication strategy
# ---------------------------------------------------------------------------

@dataclass
class WrappedRun:
    transcript: GameTranscript
    pair: CollisionInfoPair
    internal_rounds: int
    play_wall_times: list[int]  # wall index of each resolved strategy round
    seed64: int


def run_pair_collision_wrapped(seq: LossSequence, seed: int, *,
                               eta: float | None = None,
                               quantize_messages: bool = True) -> WrappedRun:
    """Full game in the pure collision-information model.

    The strategy round clock advances only on play rounds; hunting and bit
    rounds are protocol overhead, each costing at most 2 in regret.  The
    whole run is a deterministic function of (loss table, seed): the shared
    stream is a keyed generator whose 64-bit seed is transmitted to the
    partner at game start.
    """
    K, T = seq.K, seq.T
    seed64 = derive_seed(seed, "prgseed") & ((1 << 64) - 1)
    shared = PrgStream(seed64)
    pair = CollisionInfoPair(K, T, seed=seed, shared=shared,
                             eta=eta, quantize_messages=quantize_messages)
    protocol = Stream(seed, "protocol")
    transcript = GameTranscript(T, 2, MODEL_COLLISION_INFO)
    play_wall: list[int] = []

    tw = 0  # wall clock
    s = 0  # resolved strategy rounds
    state = "play"
    pending_kind = ""
    pending_bits = 0
    txq: list[tuple[str, list[int]]] = []
    tx_pos = 0
    rx_buf: list[int] = []

    def emit(a_arm: int, b_arm: int, tag: str) -> bool:
        row = seq.row(tw)
        eff, flags = effective_loss(row, (a_arm, b_arm))
        transcript.record(tw, (a_arm, b_arm), eff, flags, tag)
        if tag:
            transcript.protocol_rounds += 1
        return flags[0]

    def queue_sync(kind: str, s_next: int) -> None:
        nonlocal txq, tx_pos, rx_buf, pending_kind, pending_bits
        if kind == "startup":
            pending_bits = pair.apply_sync(s_next, "startup")
            payload = shared.seed_bits() + action_bits(pair.arm_a, K)
            txq = [("alice", payload)]
        else:
            msgs = pair.compose_messages()
            bits_b = increment_message_bits(msgs[1], K, T)
            pending_bits = pair.apply_sync(s_next, kind, msgs)
            bits_a = increment_message_bits(msgs[0], K, T) + action_bits(pair.arm_a, K)
            txq = [("bob", bits_b), ("alice", bits_a)]
        tx_pos = 0
        rx_buf = []
        pending_kind = kind
        transcript.comm_rounds += 1
        transcript.comm_bits += pending_bits

    while tw < T:
        if state == "play":
            s_next = s + 1
            if pair.needs_fixed_sync(s_next):
                queue_sync("startup" if s_next == 1 else "fixed", s_next)
                state = "tx"
                continue
            if pair.wants_switch(s_next):
                state = "hunt"
                continue
            tw += 1
            res = pair.resolve_round(s_next, seq.row(tw), "")
            emit(res.a, res.b, "")
            play_wall.append(tw)
            s = s_next
        elif state == "hunt":
            tw += 1
            hunter = 1 + protocol.integer(K, tw)
            collided = emit(hunter, pair.arm_b, "init")
            if collided:
                queue_sync("random", s + 1)
                state = "tx"
        elif state == "tx":
            sender, bits = txq[0]
            bit = bits[tx_pos]
            tw += 1
            if sender == "alice":
                collided = emit(1 if bit else 2, 1, "bit1" if bit else "bit0")
            else:
                collided = emit(1, 1 if bit else 2, "bit1" if bit else "bit0")
            rx_buf.append(1 if collided else 0)
            tx_pos += 1
            if tx_pos == len(bits):
                if rx_buf != bits:
                    raise ProtocolViolationError("decoded message differs from sent")
                txq.pop(0)
                tx_pos = 0
                rx_buf = []
                if not txq:
                    state = "resolve"
        elif state == "resolve":
            tw += 1
            res = pair.resolve_round(s + 1, seq.row(tw), pending_kind, pending_bits)
            emit(res.a, res.b, "")
            play_wall.append(tw)
            s += 1
            pending_kind = ""
            state = "play"

    # pad the transcript if the horizon ended mid-decision (never mid-round)
    transcript.fixed_comm_rounds = pair.fixed_comm_rounds
    transcript.random_comm_rounds = pair.random_comm_rounds
    return WrappedRun(transcript=transcript, pair=pair, internal_rounds=s,
                      play_wall_times=play_wall, seed64=seed64)
