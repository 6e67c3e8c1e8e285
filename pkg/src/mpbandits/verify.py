"""Invariant verification suites behind the ``verify`` CLI subcommand."""

from __future__ import annotations

import math

from .adversaries import stochastic_losses
from .channel import run_pair_collision_wrapped
from .env import compute_regret
from .pair_collision import filter_resample, run_pair_collision_oracle
from .rng import Stream

_TOL = 1e-9


def run_verification(K: int = 3, T: int = 10_000, seed: int = 1, report=print):
    """Run the per-round invariant suite plus channel checks.

    Returns a list of failure strings (empty = all good).
    """
    failures: list[str] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
        report(line + "\n")
        if not ok:
            failures.append(name)

    means = [0.1 + 0.8 * (a - 1) / max(K - 1, 1) for a in range(1, K + 1)]
    seq = stochastic_losses(means, T, seed)

    transcript, pair, _ = run_pair_collision_oracle(seq, seed=seed, diagnostics=True)
    rep = compute_regret(transcript, seq)
    check("zero collisions (instant communication)", rep.collision_rounds == 0)
    for name, margin in sorted(pair.invariant_margins.items()):
        check(f"per-round invariant {name}", margin >= -_TOL, f"min margin {margin:.3e}")
    check(
        "fixed sync budget <= sqrt(TK)",
        rep.fixed_comm_rounds <= math.sqrt(T * K),
        f"{rep.fixed_comm_rounds} vs {math.sqrt(T * K):.1f}",
    )
    check(
        "switch-triggered syncs <= 5 K^3 eta T",
        rep.random_comm_rounds <= 5 * K**3 * pair.eta * T + 3 * math.sqrt(5 * K**3 * pair.eta * T) + 1,
        f"{rep.random_comm_rounds}",
    )
    check("realized variance constant <= 8K", pair.realized_L <= 8 * K + _TOL,
          f"{pair.realized_L:.3f}")

    wrapped = run_pair_collision_wrapped(seq, seed)
    wrep = compute_regret(wrapped.transcript, seq)
    check("zero organic collisions (collision channel)",
          wrep.organic_collision_rounds == 0)

    # quick Monte Carlo check of the filtering identity
    stream = Stream(seed, "verify-filter")
    p, q, eps = [0.0, 0.5, 0.5], [0.0, 0.6, 0.4], [0.0, 0.2, 0.2]
    counts = [0, 0, 0]
    n = 200_000
    for i in range(n):
        cur = 1 if stream.u(i, 0) < p[1] else 2
        arm, _ = filter_resample(p, q, eps, cur, stream.u(i, 1), stream.u(i, 2))
        counts[arm] += 1
    tv = 0.5 * (abs(counts[1] / n - q[1]) + abs(counts[2] / n - q[2]))
    check("filtering output law", tv <= 0.005, f"TV {tv:.4f}")

    report(("OK\n" if not failures else f"{len(failures)} failure(s)\n"))
    return failures
