"""Two-player strategy with collision information: joint exponential weights
over unordered arm pairs, a dominating-arm assignment of the pair to the two
players, coupled recording bits driving an unbiased loss estimator, and a
low-switching (filtering) sampler for the slow player, synced through
scheduled and switch-triggered communication.

Terminology used throughout:

* ``top``        -- the arm holding the largest weight at the start of the
                    current phase (a phase runs between scheduled syncs);
                    it is preferentially assigned to the slow player (Alice).
* ``eps``        -- probability that the top arm, when drawn in the pair, is
                    handed to the fast player (Bob) instead.
* ``record prob``-- per-arm probability xi(a) that a play of arm ``a``
                    records its observed loss into the shared estimator.

Weight vectors are dense lists of length K+1 with slot 0 unused (arms are
1-based).  Weights are kept in cumulative-estimate space: w(a) =
exp(-eta * cum(a)), so they are nonincreasing over time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .codec import quantize_value
from .env import GameTranscript, LossSequence, MODEL_COLLISION_ORACLE
from .errors import (
    ConfigurationError,
    FilteringAssumptionError,
    InvariantViolation,
    StateError,
)
from .rng import Stream

_TOL = 1e-9


# ---------------------------------------------------------------------------
# Pure distribution operations (unit-testable building blocks)
# ---------------------------------------------------------------------------

def unordered_pair_probs(w):
    """Probabilities over unordered arm pairs, Q({a,b}) proportional to
    w(a) w(b).  Returns a symmetric (K+1)x(K+1) matrix with zero diagonal;
    the sum over a < b is 1."""
    k = len(w) - 1
    if k < 2:
        raise ConfigurationError("need at least two arms")
    if any(x <= 0.0 for x in w[1:]):
        raise ConfigurationError("weights must be positive")
    s = sum(w[1:])
    z = s * s - sum(x * x for x in w[1:])  # sum over ordered pairs a != b
    q = [[0.0] * (k + 1) for _ in range(k + 1)]
    for a in range(1, k + 1):
        for b in range(a + 1, k + 1):
            q[a][b] = q[b][a] = 2.0 * w[a] * w[b] / z
    return q


def ordered_assignment(q, eps: float, top: int):
    """Split unordered pair probabilities into ordered (slow, fast) ones.

    Pairs not containing the top arm split evenly; the top arm goes to the
    fast player with probability eps.
    """
    if not (0.0 < eps <= 0.5):
        raise ConfigurationError("eps must lie in (0, 1/2]")
    k = len(q) - 1
    p = [[0.0] * (k + 1) for _ in range(k + 1)]
    for a in range(1, k + 1):
        for b in range(1, k + 1):
            if a == b:
                continue
            if a == top:
                p[a][b] = (1.0 - eps) * q[a][b]
            elif b == top:
                p[a][b] = eps * q[a][b]
            else:
                p[a][b] = 0.5 * q[a][b]
    return p


def marginal_first(p):
    """Marginal law of the slow player's arm under an ordered assignment."""
    k = len(p) - 1
    return [0.0] + [math.fsum(p[a][1:]) for a in range(1, k + 1)]


def conditional_second(p, a: int):
    """Law of the fast player's arm given the slow player sits on ``a``."""
    k = len(p) - 1
    pa = math.fsum(p[a][1:])
    if pa <= 0.0:
        raise StateError(f"conditional undefined: first-coordinate mass of {a} is 0")
    return [0.0] + [p[a][b] / pa for b in range(1, k + 1)]


@dataclass
class PhaseParams:
    """Per-phase assignment rate, per-round record probabilities, and the
    a-priori variance constant."""

    eps: float
    xi: list[float]
    L: float
    top: int
    second: int


def order_arms(w):
    """(top, second) arm ids by weight, ties broken by lower index."""
    k = len(w) - 1
    top = max(range(1, k + 1), key=lambda a: (w[a], -a))
    second = max((a for a in range(1, k + 1) if a != top), key=lambda a: (w[a], -a))
    return top, second


def phase_params(w_phase, w_now, k: int, eta: float) -> PhaseParams:
    """Assignment rate from the phase-start weights, record probabilities
    from the current ones.

    eps = w_phase(second) / (2 w_phase(top)); xi(top) = 1/(8K) and
    xi(a) = w_now(a) / (2K w_phase(second)) otherwise.
    """
    top, second = order_arms(w_phase)
    eps = w_phase[second] / (2.0 * w_phase[top])
    denom = 2.0 * k * w_phase[second]
    if denom <= 0.0:
        raise InvariantViolation("phase anchor weight collapsed to zero")
    xi = [0.0] * (k + 1)
    for a in range(1, k + 1):
        xi[a] = 1.0 / (8.0 * k) if a == top else w_now[a] / denom
    return PhaseParams(eps=eps, xi=xi, L=8.0 * k, top=top, second=second)


def sample_coupled_bits(xi, arm_a: int, arm_b: int, p_b_given_a: float,
                        shared_uniform: float, interval_start: float | None = None):
    """Record bits for the two players from one shared uniform.

    The unit interval is cut into [0, xi(A)) for the slow player's bit and
    [start, start + xi(B)/pB) for the fast player's, never both firing.
    ``interval_start`` defaults to xi(A); the fast player may use its own
    (stale, never smaller) view of xi(A) without breaking disjointness.
    """
    xi_a = xi[arm_a]
    ratio = xi[arm_b] / p_b_given_a
    start = xi_a if interval_start is None else interval_start
    if xi_a + ratio > 1.0 + 1e-12:
        raise InvariantViolation(
            f"record-bit intervals exceed the unit interval: {xi_a} + {ratio}"
        )
    if start < xi_a - 1e-12:
        raise InvariantViolation("fast player's interval overlaps the slow one")
    a_bit = 1 if shared_uniform < xi_a else 0
    b_bit = 1 if (start <= shared_uniform < start + ratio) else 0
    return a_bit, b_bit


def build_estimator(loss_a: float, loss_b: float, arm_a: int, arm_b: int,
                    bits, xi) -> dict[int, float]:
    """Sparse importance-weighted loss estimate: at most one arm is nonzero,
    the recorded player's own arm scaled by its record probability."""
    a_bit, b_bit = bits
    est: dict[int, float] = {}
    if a_bit:
        est[arm_a] = loss_a / xi[arm_a]
    if b_bit:
        est[arm_b] = loss_b / xi[arm_b]
    return est


def filter_resample(p, q, switch_probs, current: int, u_switch: float,
                    u_pick: float):
    """Low-switching resampler: stay on ``current`` with probability
    1 - eps(current), otherwise redraw from the residual distribution

        r(i) = (q(i) - (1 - eps_i) p(i)) / sum_j p(j) eps_j,

    so that the output is exactly q-distributed when the input is
    p-distributed.  Requires q(i) >= (1 - eps_i) p(i) for every arm.
    """
    k = len(p) - 1
    resid = [0.0] * (k + 1)
    denom = 0.0
    for i in range(1, k + 1):
        num = q[i] - (1.0 - switch_probs[i]) * p[i]
        if num < -1e-12:
            raise FilteringAssumptionError(
                f"target mass too small on arm {i}: q={q[i]} < (1-eps) p={p[i]}"
            )
        resid[i] = max(num, 0.0)
        denom += p[i] * switch_probs[i]
    if u_switch >= switch_probs[current]:
        return current, False
    if denom <= 0.0:
        return current, False
    acc = 0.0
    choice = k
    for i in range(1, k + 1):
        acc += resid[i] / denom
        if u_pick < acc:
            choice = i
            break
    return choice, True


# ---------------------------------------------------------------------------
# The coupled two-player strategy
# ---------------------------------------------------------------------------

@dataclass
class RoundResult:
    a: int
    b: int
    comm: str  # "", "startup", "fixed", "random"
    bits: int
    a_bit: int
    b_bit: int


class CollisionInfoPair:
    """Joint state of the two players in the instant-communication model.

    The two players' knowledge is held in separate cumulative-estimate
    ledgers (``alice_cum`` / ``bob_cum``) that agree on the shared ``base``
    established at the last sync; all cross-player information flows through
    ``_sync`` (message contents are quantized exactly as they would be on a
    real channel) and through the announced arm.
    """

    def __init__(self, K: int, T: int, *, seed: int = 0, shared=None,
                 eta: float | None = None, alice_stream: Stream | None = None,
                 bob_stream: Stream | None = None, quantize_messages: bool = True,
                 diagnostics: bool = False):
        if K < 2:
            raise ConfigurationError("need at least two arms")
        if T < 1:
            raise ConfigurationError("horizon must be positive")
        self.K = K
        self.T = T
        self.F = math.ceil(math.sqrt(T / K))  # scheduled sync period
        self.eta = eta if eta is not None else 2.0**-7 * K**-1.5 / math.sqrt(T)
        self.L = 8.0 * K
        self.eps0 = float(T) ** -2  # shift so a zero estimate means "no bit fired"
        self.alice = alice_stream if alice_stream is not None else Stream(seed, "alice")
        self.bob = bob_stream if bob_stream is not None else Stream(seed, "bob")
        self.shared = shared if shared is not None else _PlainShared(seed)
        self.quantize_messages = quantize_messages
        self.diagnostics = diagnostics

        kk = K + 1
        self.base = [0.0] * kk
        self.alice_cum = [0.0] * kk
        self.bob_cum = [0.0] * kk
        self.alice_last: tuple[int, float] | None = None
        self.bob_last: tuple[int, float] | None = None

        self.top = 1
        self.second = 2 if K >= 2 else 1
        self.w_phase_top = 1.0
        self.w_phase_second = 1.0
        self.eps = 0.5
        self.tau = 0

        self.arm_a = 0  # current arms (0 = not yet drawn)
        self.arm_b = 0
        self.pA_prev: list[float] | None = None
        self.xi_prev: list[float] | None = None
        self._pending_comm: str | None = None
        self._announced_a = 0

        self.comm_rounds = 0
        self.fixed_comm_rounds = 0
        self.random_comm_rounds = 0
        self.comm_bits = 0
        self.realized_L = 0.0
        self.diag_rows: list[dict] = []
        self.invariant_margins: dict[str, float] = {}

    # -- weight views -------------------------------------------------------

    def _weights(self):
        e = self.eta
        return [0.0] + [
            math.exp(-e * (self.alice_cum[i] + self.bob_cum[i] - self.base[i]))
            for i in range(1, self.K + 1)
        ]

    def _xi(self, w, a: int) -> float:
        if a == self.top:
            return 1.0 / (8.0 * self.K)
        return w[a] / (2.0 * self.K * self.w_phase_second)

    def _xi_vec(self, w):
        return [0.0] + [self._xi(w, a) for a in range(1, self.K + 1)]

    def _xi_fast_view(self, a: int) -> float:
        """xi(a) from the fast player's ledger (misses the slow player's
        recordings since the last sync, hence never smaller)."""
        if a == self.top:
            return 1.0 / (8.0 * self.K)
        w_a = math.exp(-self.eta * self.bob_cum[a])
        return w_a / (2.0 * self.K * self.w_phase_second)

    def _pA(self, w):
        s = sum(w[1:])
        z = s * s - sum(x * x for x in w[1:])
        top, eps, wt = self.top, self.eps, w[self.top]
        pa = [0.0] * (self.K + 1)
        for a in range(1, self.K + 1):
            if a == top:
                pa[a] = 2.0 * (1.0 - eps) * wt * (s - wt) / z
            else:
                pa[a] = w[a] * (2.0 * eps * wt + s - wt - w[a]) / z
        return pa

    def _pB_given(self, w, a: int):
        """Conditional law of the fast player's arm; by construction it does
        not involve w(a), so the fast player can evaluate it exactly."""
        s = sum(w[1:])
        pb = [0.0] * (self.K + 1)
        if a == self.top:
            d = s - w[self.top]
            for b in range(1, self.K + 1):
                if b != a:
                    pb[b] = w[b] / d
        else:
            d = 2.0 * self.eps * w[self.top] + (s - w[self.top] - w[a])
            for b in range(1, self.K + 1):
                if b == a:
                    continue
                pb[b] = 2.0 * self.eps * w[self.top] / d if b == self.top else w[b] / d
        return pb

    # -- phase / sync machinery ---------------------------------------------

    def _reorder(self, w) -> None:
        self.top, self.second = order_arms(w)
        self.w_phase_top = w[self.top]
        self.w_phase_second = w[self.second]
        self.eps = self.w_phase_second / (2.0 * self.w_phase_top)

    def needs_fixed_sync(self, t: int) -> bool:
        return t == 1 or t % self.F == 0

    def wants_switch(self, t: int) -> bool:
        """The slow player's filtering coin for a non-sync round.  Must be
        consulted exactly once per such round."""
        stay_leave = min(1.0, 2.0 * self.eta / self.xi_prev[self.arm_a])
        return self.alice.u(t, 1) < stay_leave

    def compose_messages(self):
        """Increment messages both directions: the window sum up to the
        penultimate round plus the last round's single-arm estimate,
        quantized entrywise."""
        def split(cum, last):
            inc = [0.0] + [cum[i] - self.base[i] for i in range(1, self.K + 1)]
            if last is not None:
                inc[last[0]] -= last[1]
            if self.quantize_messages:
                inc = [0.0] + [quantize_value(max(x, 0.0), self.T) for x in inc[1:]]
                lastq = None if last is None else (last[0], quantize_value(last[1], self.T))
            else:
                lastq = last
            return inc, lastq

        msg_a = split(self.alice_cum, self.alice_last)
        msg_b = split(self.bob_cum, self.bob_last)
        return msg_a, msg_b

    def message_bits(self, startup: bool = False) -> int:
        from .codec import encoding_width

        if startup:
            return 64 + _ceil_log2(self.K)
        vec = self.K * encoding_width(self.T) + _ceil_log2(self.K + 1) + encoding_width(self.T)
        return 2 * vec + _ceil_log2(self.K)

    def apply_sync(self, t: int, kind: str, msgs=None) -> int:
        """Merge both increment messages into a new shared base, refresh the
        phase on scheduled syncs, and draw the slow player's next arm."""
        if kind == "startup":
            w = self._weights()
            self._reorder(w)
            self.tau = 1
            pa = self._pA(w)
            self.arm_a = self.alice.choice(pa, t, 0)
            self._announced_a = self.arm_a
            self._last_pa_used = pa
            bits = self.message_bits(startup=True)
        else:
            if msgs is None:
                msgs = self.compose_messages()
            (inc_a, last_a), (inc_b, last_b) = msgs
            prev = [0.0] + [
                self.base[i] + inc_a[i] + inc_b[i] for i in range(1, self.K + 1)
            ]
            now = list(prev)
            for last in (last_a, last_b):
                if last is not None:
                    now[last[0]] += last[1]
            self.base = now
            self.alice_cum = list(now)
            self.bob_cum = list(now)
            self.alice_last = None
            self.bob_last = None
            w = self._weights()
            if kind == "fixed":
                self._reorder(w)
                self.tau = t
                pa = self._pA(w)
                self.arm_a = self.alice.choice(pa, t, 0)
            elif kind == "random":
                pa_now = self._pA(w)
                r = self._residual_vector(pa_now)
                self.arm_a = self.alice.choice(r, t, 0)
                pa = pa_now
            else:
                raise ConfigurationError(f"unknown sync kind {kind!r}")
            self._announced_a = self.arm_a
            self._last_pa_used = pa
            bits = self.message_bits()
        self.comm_bits += bits
        self.comm_rounds += 1
        if kind in ("fixed", "startup"):
            if kind == "fixed":
                self.fixed_comm_rounds += 1
        else:
            self.random_comm_rounds += 1
        return bits

    def _residual_vector(self, pa_now):
        """Resample distribution of the filtering step at a switch round."""
        eta, L = self.eta, self.L
        num = [0.0] * (self.K + 1)
        total = 0.0
        for i in range(1, self.K + 1):
            keep = 1.0 - eta * L - eta / self.xi_prev[i]
            v = pa_now[i] - keep * self.pA_prev[i]
            if v < -_TOL:
                raise InvariantViolation(
                    f"multiplicative-update bound broken on arm {i}: residual {v}"
                )
            num[i] = max(v, 0.0)
            total += num[i]
        if total <= 0.0:
            raise InvariantViolation("empty residual distribution at a switch round")
        return [0.0] + [x / total for x in num[1:]]

    # -- the round itself ----------------------------------------------------

    def resolve_round(self, t: int, loss_row, comm: str, bits: int = 0) -> RoundResult:
        """Play round t given that any required sync already happened."""
        w = self._weights()
        pa = self._pA(w) if comm == "" else self._last_pa_used
        if comm == "":
            # low-switching: the slow player keeps her arm
            if t > 1 and not self.needs_fixed_sync(t):
                self._assert_multiplicative_update(pa)
        elif comm == "random":
            self._assert_multiplicative_update(pa)
        a = self.arm_a
        pb = self._pB_given(w, a)
        b = self.bob.choice(pb, t, 0)
        if a == b:
            raise InvariantViolation("the two players drew the same arm")

        xi_a = self._xi(w, a)
        xi_b = self._xi(w, b)
        ratio = xi_b / pb[b]
        if ratio > 0.5 + _TOL:
            raise InvariantViolation(
                f"record bound broken: xi(b)={xi_b} > p(b|a)/2={pb[b] / 2}"
            )
        start = self._xi_fast_view(a)
        u = self.shared.u(t)
        a_bit = 1 if u < xi_a else 0
        b_bit = 1 if (start <= u < start + ratio) else 0
        if a_bit and b_bit:
            raise InvariantViolation("both record bits fired in one round")

        loss_a = loss_row[a - 1]
        loss_b = loss_row[b - 1]
        if a_bit:
            val = (loss_a + self.eps0) / xi_a
            self.alice_cum[a] += val
            self.alice_last = (a, val)
        else:
            self.alice_last = None
        if b_bit:
            val = (loss_b + self.eps0) / xi_b
            self.bob_cum[b] += val
            self.bob_last = (b, val)
        else:
            self.bob_last = None

        if self.diagnostics:
            self._record_diagnostics(t, w, pa, a, b, comm)

        self.arm_b = b
        self.pA_prev = pa
        self.xi_prev = self._xi_vec(w)
        return RoundResult(a=a, b=b, comm=comm, bits=bits, a_bit=a_bit, b_bit=b_bit)

    def step(self, t: int, loss_row) -> RoundResult:
        """Instant-communication round: sync if scheduled or switching, then
        resolve."""
        if self.needs_fixed_sync(t):
            kind = "startup" if t == 1 else "fixed"
            bits = self.apply_sync(t, kind)
            return self.resolve_round(t, loss_row, kind, bits)
        if self.wants_switch(t):
            bits = self.apply_sync(t, "random")
            return self.resolve_round(t, loss_row, "random", bits)
        return self.resolve_round(t, loss_row, "")

    # -- adaptive-adversary interface ----------------------------------------

    def action_distributions(self, t: int):
        """Conditional per-round action laws (before any draw), as an
        adaptive adversary is entitled to see them."""
        w = self._weights()
        if self.needs_fixed_sync(t):
            top, second = order_arms(w)
            saved = (self.top, self.second, self.w_phase_top, self.w_phase_second, self.eps)
            self.top, self.second = top, second
            self.w_phase_top, self.w_phase_second = w[top], w[second]
            self.eps = w[second] / (2.0 * w[top])
            pa = self._pA(w)
            pb = self._mixture_b(w, pa)
            (self.top, self.second, self.w_phase_top, self.w_phase_second, self.eps) = saved
            return pa, pb
        pa_now = self._pA(w)
        leave = min(1.0, 2.0 * self.eta / self.xi_prev[self.arm_a])
        r = self._residual_vector(pa_now)
        pa = [0.0] * (self.K + 1)
        for i in range(1, self.K + 1):
            pa[i] = leave * r[i]
        pa[self.arm_a] += 1.0 - leave
        pb = self._mixture_b(w, pa)
        return pa, pb

    def _mixture_b(self, w, pa):
        pb = [0.0] * (self.K + 1)
        for a in range(1, self.K + 1):
            if pa[a] <= 0.0:
                continue
            cond = self._pB_given(w, a)
            for b in range(1, self.K + 1):
                pb[b] += pa[a] * cond[b]
        return pb

    # -- invariants and diagnostics -------------------------------------------

    def _assert_multiplicative_update(self, pa_now) -> None:
        if self.pA_prev is None:
            return
        eta, L = self.eta, self.L
        for i in range(1, self.K + 1):
            bound = (1.0 - eta * L - eta / self.xi_prev[i]) * self.pA_prev[i]
            if pa_now[i] < bound - _TOL:
                raise InvariantViolation(
                    f"distribution shrank too fast on arm {i}: {pa_now[i]} < {bound}"
                )

    def _record_diagnostics(self, t, w, pa, a, b, comm) -> None:
        xi = self._xi_vec(w)
        pbs = {aa: self._pB_given(w, aa) for aa in range(1, self.K + 1)}
        margins = _round_margins(self.K, w, pa, pbs, xi, self.eps, self.top,
                                 self.w_phase_second)
        v_t = margins.pop("_v_value")
        l_t = margins.pop("_l_value")
        for key, val in margins.items():
            prev = self.invariant_margins.get(key)
            if prev is None or val < prev:
                self.invariant_margins[key] = val
        self.realized_L = max(self.realized_L, l_t)
        self.diag_rows.append(
            {
                "t": t,
                "A": a,
                "B": b,
                "eps": self.eps,
                "xi_min": min(xi[1:]),
                "xi_max": max(xi[1:]),
                "V": v_t,
                "comm": comm,
            }
        )

    def diagnostics_csv(self, path_or_buf) -> None:
        """Per-round dump: t, arms, eps, record-prob range, variance, comm."""
        import io

        from .env import _write_text

        buf = io.StringIO()
        buf.write("t,A,B,eps,xi_min,xi_max,V,comm\n")
        for row in self.diag_rows:
            buf.write(
                f"{row['t']},{row['A'] - 1},{row['B'] - 1},{row['eps']!r},"
                f"{row['xi_min']!r},{row['xi_max']!r},{row['V']!r},{row['comm']}\n"
            )
        _write_text(path_or_buf, buf.getvalue())


def _round_margins(k, w, pa, pbs, xi, eps, top, w_phase_second):
    """Nonnegative-iff-satisfied margins of every per-round invariant."""
    margins: dict[str, float] = {}
    wmax = max(w[1:])
    wmax_rest = max(w[i] for i in range(1, k + 1) if i != top)
    margins["order_dominates"] = w[top] - 0.5 * wmax
    ratio = wmax_rest / w[top]
    margins["eps_lower"] = eps - 0.25 * ratio
    margins["eps_upper"] = min(ratio, 0.5) - eps
    margins["slow_player_on_top"] = pa[top] - (1.0 - 5.0 * k * eps)
    margins["record_floor"] = min(
        xi[a] - pa[a] / (4.0 * k * k) for a in range(1, k + 1)
    )
    rec_ceil = min(
        pbs[a][b] / 2.0 - xi[b]
        for a in range(1, k + 1)
        for b in range(1, k + 1)
        if a != b
    )
    margins["record_ceiling"] = rec_ceil
    margins["cond_top_floor"] = min(
        (pbs[a][top] - 1.0 / (4.0 * k) for a in range(1, k + 1) if a != top),
        default=1.0,
    )
    lo = hi = 1.0
    for a in range(1, k + 1):
        for b in range(1, k + 1):
            if b in (a, top):
                continue
            lo = min(lo, pbs[a][b] - w[b] / (k * w_phase_second))
            hi = min(hi, 4.0 * w[b] / w_phase_second - pbs[a][b])
    margins["cond_band_lower"] = lo
    margins["cond_band_upper"] = hi
    l_real = max(
        pbs[a][b] / xi[b] for a in range(1, k + 1) for b in range(1, k + 1) if a != b
    )
    margins["variance_constant"] = 8.0 * k - l_real
    margins["_l_value"] = l_real
    # variance functional: sum_a pa(a) sum_{b != a} Qmarg(b) / pB(b|a)
    s = sum(w[1:])
    z = s * s - sum(x * x for x in w[1:])
    qmarg = [0.0] + [2.0 * w[b] * (s - w[b]) / z for b in range(1, k + 1)]
    v_t = 0.0
    for a in range(1, k + 1):
        inner = 0.0
        for b in range(1, k + 1):
            if b != a:
                inner += qmarg[b] / pbs[a][b]
        v_t += pa[a] * inner
    margins["variance_bound"] = 64.0 * k - v_t
    margins["_v_value"] = v_t
    return margins


class _PlainShared:
    """Shared uniform stream with a position counter (one draw per round)."""

    def __init__(self, seed: int):
        self._stream = Stream(seed, "shared")
        self.position = 0

    def u(self, t: int) -> float:
        self.position = max(self.position, t)
        return self._stream.u(t)


def _ceil_log2(n: int) -> int:
    return max(1, math.ceil(math.log2(n)))


# ---------------------------------------------------------------------------
# Instant-communication runner
# ---------------------------------------------------------------------------

def run_pair_collision_oracle(
    seq: LossSequence | None = None,
    *,
    K: int | None = None,
    T: int | None = None,
    seed: int = 0,
    shared=None,
    eta: float | None = None,
    diagnostics: bool = False,
    quantize_messages: bool = True,
    adaptive=None,
):
    """Full game in the instant-communication model.

    Returns (transcript, pair, realized LossSequence).  With ``adaptive``
    set, loss rows come from the adversary fed both players' declared
    per-round distributions.
    """
    if seq is not None:
        K, T = seq.K, seq.T
    if K is None or T is None:
        raise ConfigurationError("need a loss sequence or explicit K and T")
    pair = CollisionInfoPair(
        K, T, seed=seed, shared=shared, eta=eta,
        quantize_messages=quantize_messages, diagnostics=diagnostics,
    )
    transcript = GameTranscript(T, 2, MODEL_COLLISION_ORACLE)
    rows = [] if adaptive is not None else None
    for t in range(1, T + 1):
        if adaptive is not None:
            pa, pb = pair.action_distributions(t)
            row = adaptive(pa, pb)
            rows.append(list(row))
        else:
            row = seq.row(t)
        res = pair.step(t, row)
        eff_a = max(row[res.a - 1], 1.0 if res.a == res.b else 0.0)
        eff_b = max(row[res.b - 1], 1.0 if res.a == res.b else 0.0)
        transcript.record(t, (res.a, res.b), (eff_a, eff_b),
                          (res.a == res.b, res.a == res.b), res.comm)
        if res.comm:
            transcript.comm_rounds += 1
            transcript.comm_bits += res.bits
    transcript.fixed_comm_rounds = pair.fixed_comm_rounds
    transcript.random_comm_rounds = pair.random_comm_rounds
    realized = seq if seq is not None else LossSequence(rows)
    return transcript, pair, realized
