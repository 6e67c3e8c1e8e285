"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.  Criterion 2's growth-
exponent assertion is expected to fail at desk scale with the pinned
learning rate; see the analysis notes shipped alongside the repository.
"""

import itertools
import math

import numpy as np
import pytest

from mpbandits.adversaries import AdaptiveProp1, remark_sequence, stochastic_losses
from mpbandits.channel import run_pair_collision_wrapped
from mpbandits.codec import PrgStream, RandomShared
from mpbandits.env import (
    LossSequence,
    best_fixed_subset_loss,
    compute_regret,
    effective_loss,
)
from mpbandits.harness import fit_slope, tv_distance
from mpbandits.multiplayer import phi_assign, phi_assignment, run_multiplayer
from mpbandits.pair_collision import (
    CollisionInfoPair,
    build_estimator,
    conditional_second,
    filter_resample,
    marginal_first,
    ordered_assignment,
    phase_params,
    run_pair_collision_oracle,
    sample_coupled_bits,
    unordered_pair_probs,
)
from mpbandits.pair_no_collision import run_no_collision
from mpbandits.rng import Stream, derive_seed

TOL = 1e-9


def _report(num, ok, detail):
    print(f"\nACCEPTANCE #{num}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


# -- 1 -----------------------------------------------------------------------

def test_c01_zero_collisions_oracle_and_wrapped():
    bad = []
    for K in (2, 3, 5):
        means = [0.1 + 0.8 * i / max(K - 1, 1) for i in range(K)]
        for seed in range(20):
            seq = stochastic_losses(means, 10_000, seed=1000 + seed)
            tr, _, _ = run_pair_collision_oracle(seq, seed=1000 + seed)
            n_oracle = compute_regret(tr, seq).organic_collision_rounds
            wr = run_pair_collision_wrapped(seq, 1000 + seed)
            n_wrapped = compute_regret(wr.transcript, seq).organic_collision_rounds
            if n_oracle or n_wrapped:
                bad.append((K, seed, n_oracle, n_wrapped))
    ok = _report(1, not bad, f"organic collisions across 120 runs: {bad or 0}")
    assert ok


# -- 2 & 3 (shared sweep) -----------------------------------------------------

@pytest.fixture(scope="module")
def optimal_rate_sweep():
    horizons = [2**j for j in range(10, 18)]
    rows = []
    for T in horizons:
        regs, fixed, rand, etas = [], [], [], []
        for seed in range(30):
            seq = stochastic_losses([0.1, 0.5, 0.9], T, seed=2000 + seed)
            tr, pair, _ = run_pair_collision_oracle(seq, seed=2000 + seed)
            rep = compute_regret(tr, seq)
            regs.append(rep.regret)
            fixed.append(rep.fixed_comm_rounds)
            rand.append(rep.random_comm_rounds)
            etas.append(pair.eta)
        rows.append({
            "T": T,
            "mean_regret": float(np.mean(regs)),
            "fixed": fixed,
            "random": rand,
            "eta": etas[0],
        })
    return rows


def test_c02_optimal_rate_scaling(optimal_rate_sweep):
    rows = optimal_rate_sweep
    K = 3
    t_top = rows[-1]["T"]
    bound = 2**9 * K**1.5 * math.log(K) * math.sqrt(t_top)
    bound_ok = rows[-1]["mean_regret"] <= bound
    fit = fit_slope([(r["T"], r["mean_regret"]) for r in rows])
    slope_ok = fit.slope <= 0.60
    _report(
        2,
        bound_ok and slope_ok,
        f"slope {fit.slope:.3f} (gate 0.60), regret@2^17 "
        f"{rows[-1]['mean_regret']:.0f} <= bound {bound:.0f}: {bound_ok}",
    )
    assert bound_ok, "explicit regret bound at T=2^17 violated"
    assert slope_ok, (
        f"growth exponent {fit.slope:.3f} > 0.60: unattainable at desk scale "
        "with the pinned learning rate 2^-7 K^-3/2 T^-1/2 (the exponential-"
        "weights tilt over the whole horizon is O(eta*T) = O(sqrt(T)/665), so "
        "per-round regret stays near its initial value at every T in the "
        "sweep); see the decisions ledger"
    )


def test_c03_communication_budget(optimal_rate_sweep):
    K = 3
    worst = []
    for row in optimal_rate_sweep:
        T = row["T"]
        fixed_cap = math.sqrt(T * K)
        random_cap = 5 * K**3 * row["eta"] * T
        for seed_idx, (f, r) in enumerate(zip(row["fixed"], row["random"])):
            if f > fixed_cap or r > random_cap:
                worst.append((T, seed_idx, f, fixed_cap, r, random_cap))
    ok = _report(3, not worst, f"per-seed sync budget violations: {worst or 0}")
    assert ok


# -- 4 -----------------------------------------------------------------------

def test_c04_filtering_output_law():
    p = [0.0, 0.5, 0.5]
    q = [0.0, 0.6, 0.4]
    eps = [0.0, 0.2, 0.2]
    stream = Stream(77, "filter-mc")
    n = 10**6
    counts = np.zeros(3)
    for i in range(n):
        cur = 1 if stream.u(i, 0) < p[1] else 2
        arm, _ = filter_resample(p, q, eps, cur, stream.u(i, 1), stream.u(i, 2))
        counts[arm] += 1
    tv = tv_distance(counts, q)
    ok = _report(4, tv <= 0.005, f"TV(empirical, target) = {tv:.5f} over 1e6 draws")
    assert ok


# -- 5 -----------------------------------------------------------------------

def test_c05_estimator_unbiasedness():
    w = [0.0, 1.0, 0.8, 0.5]
    params = phase_params(w, w, 3, 1e-4)
    P = ordered_assignment(unordered_pair_probs(w), params.eps, params.top)
    pa = np.array(marginal_first(P)[1:])
    pb_rows = np.array([conditional_second(P, a)[1:] for a in (1, 2, 3)])
    xi = np.array(params.xi[1:])
    losses = np.array([0.3, 0.7, 0.2])

    n = 10**6
    rng_u = np.random.default_rng(123)
    a_idx = np.searchsorted(np.cumsum(pa), rng_u.random(n), side="right")
    b_cdf = np.cumsum(pb_rows, axis=1)
    b_idx = np.array([
        np.searchsorted(b_cdf[a], u, side="right")
        for a, u in zip(a_idx, rng_u.random(n))
    ])
    u = rng_u.random(n)
    ratio = xi[b_idx] / pb_rows[a_idx, b_idx]
    a_bit = u < xi[a_idx]
    b_bit = (u >= xi[a_idx]) & (u < xi[a_idx] + ratio)

    est = np.zeros((n, 3))
    est[np.arange(n), a_idx] += a_bit * losses[a_idx] / xi[a_idx]
    est[np.arange(n), b_idx] += b_bit * losses[b_idx] / xi[b_idx]
    mean = est.mean(axis=0)
    stderr = est.std(axis=0, ddof=1) / math.sqrt(n)
    devs = np.abs(mean - losses) / stderr
    ok = _report(5, bool((devs <= 3).all()),
                 f"componentwise |mean - loss| / stderr = {np.round(devs, 2)}")
    # spot-check the vectorized mirror against the real ops
    for i in range(500):
        a, b = a_idx[i] + 1, b_idx[i] + 1
        if a == b:
            continue
        bits = sample_coupled_bits([0.0, *xi], a, b, pb_rows[a_idx[i], b_idx[i]],
                                   float(u[i]))
        assert bits == (int(a_bit[i]), int(b_bit[i]))
        expect = build_estimator(losses[a - 1], losses[b - 1], a, b, bits,
                                 [0.0, *xi])
        for arm in (1, 2, 3):
            assert est[i, arm - 1] == pytest.approx(expect.get(arm, 0.0))
    assert ok


# -- 6 -----------------------------------------------------------------------

def test_c06_per_round_invariant_suite():
    seq = stochastic_losses([0.1, 0.5, 0.9], 10_000, seed=606)
    tr, pair, _ = run_pair_collision_oracle(seq, seed=606, diagnostics=True)
    assert len(pair.diag_rows) == 10_000
    failures = {k: v for k, v in pair.invariant_margins.items() if v < -TOL}
    l_ok = pair.realized_L <= 8 * 3 + TOL
    ok = _report(
        6,
        not failures and l_ok,
        f"min margins over 10^4 rounds all >= -1e-9 "
        f"({min(pair.invariant_margins.values()):.2e}); realized variance "
        f"constant {pair.realized_L:.2f} <= 24",
    )
    assert ok, failures


# -- 7 -----------------------------------------------------------------------

@pytest.mark.slow
def test_c07_no_collision_info_sublinearity():
    horizons = [2**j for j in range(12, 19)]
    means = [0.1, 0.15, 0.2]
    pts = []
    for T in horizons:
        regs = []
        for seed in range(30):
            seq = stochastic_losses(means, T, seed=7000 + seed)
            tr, _, _ = run_no_collision(seq, 7000 + seed)
            regs.append(compute_regret(tr, seq).regret)
        pts.append((T, float(np.mean(regs))))
    fit = fit_slope(pts)
    ok = _report(7, fit.slope <= 0.85,
                 f"log-log slope {fit.slope:.3f} (gate 0.85) on T=2^12..2^18")
    assert ok


# -- 8 -----------------------------------------------------------------------

def test_c08_counterexample_reproduction():
    T = 300
    seq = remark_sequence(T)
    third = T // 3
    alice = [1] * third + [2] * third + [3] * third
    # best fast-player response by backward dynamic programming (losses are
    # round-separable, so the value function collapses per round)
    bob_loss = 0.0
    bob = []
    for t in range(1, T + 1):
        cands = []
        for b in (1, 2, 3):
            eff = 1.0 if b == alice[t - 1] else seq.loss(t, b)
            cands.append((eff, b == alice[t - 1], b))
        eff, _, b = min(cands)
        bob_loss += eff
        bob.append(b)
    alice_loss = sum(
        effective_loss(seq.row(t), (alice[t - 1], bob[t - 1]))[0][0]
        for t in range(1, T + 1)
    )
    regret = alice_loss + bob_loss - best_fixed_subset_loss(seq, 2)
    ok = _report(8, regret >= T / 3 - 3,
                 f"pair regret {regret:.0f} >= T/3 - K = {T / 3 - 3:.0f} "
                 f"(zero-regret slow player: loss {alice_loss:.0f})")
    assert ok


# -- 9 -----------------------------------------------------------------------

def test_c09_assignment_construction_exhaustive():
    checked = 0
    for K in range(1, 6):
        for m in range(1, min(3, K) + 1):
            for optimal in itertools.permutations(range(1, K + 1), m):
                prefix_space = itertools.product(
                    *[range(m - i + 1, K + 1) for i in range(1, m + 1)]
                )
                for prefix in prefix_space:
                    out = phi_assignment(optimal, prefix)
                    assert set(out) == set(optimal)
                    for k, val in enumerate(out, start=1):
                        assert val >= m - k + 1
                        assert val not in out[: k - 1]
                        assert val not in prefix[: k - 1]
                        assert val == phi_assign(optimal, prefix, k)
                        # order of the optimal actions must not matter
                        for perm in itertools.permutations(optimal):
                            assert phi_assign(perm, prefix, k) == val
                    checked += 1
    ok = _report(9, True, f"all {checked} (set, prefix) contexts satisfied "
                          "distinctness, floors, and set-dependence")
    assert ok and checked > 3000


# -- 10 ----------------------------------------------------------------------

@pytest.mark.slow
def test_c10_multiplayer_scaling():
    means = [0.1, 0.15, 0.2, 0.25]
    pts = []
    for T in (8**3, 12**3, 16**3, 20**3):
        regs = []
        for seed in range(20):
            seq = stochastic_losses(means, T, seed=10_000 + seed)
            tr, _ = run_multiplayer(seq, 3, 10_000 + seed)
            regs.append(compute_regret(tr, seq).regret)
        pts.append((T, float(np.mean(regs))))
    fit = fit_slope(pts)
    ok = _report(10, fit.slope <= 0.95,
                 f"log-log slope {fit.slope:.3f} (gate 0.95) for m=3, K=4")
    assert ok


# -- 11 ----------------------------------------------------------------------

@pytest.mark.slow
def test_c11_adaptive_adversary_lower_bound():
    T = 10_000
    results = {}
    for name, runner in (
        ("collision_info", lambda s, adv: run_pair_collision_oracle(
            K=3, T=T, seed=s, adaptive=adv)),
        ("no_collision", lambda s, adv: run_no_collision(
            None, s, adaptive=adv, K=3, T=T)),
    ):
        regs = []
        for seed in range(20):
            adv = AdaptiveProp1()
            tr, _, realized = runner(11_000 + seed, adv)
            regs.append(compute_regret(tr, realized).regret)
        results[name] = float(np.mean(regs))
    ok = all(v >= T / 40 for v in results.values())
    _report(11, ok, f"mean regrets {results} vs floor T/40 = {T / 40:.0f}")
    assert ok


# -- 12 ----------------------------------------------------------------------

@pytest.mark.slow
def test_c12_derandomization_equivalence():
    T, seeds = 10**5, 50
    means = [0.1, 0.5, 0.9]
    res = {"random": [], "prg": []}
    for s in range(seeds):
        seq = stochastic_losses(means, T, seed=12_000 + s)
        for kind in ("random", "prg"):
            shared = (RandomShared(12_000 + s) if kind == "random"
                      else PrgStream(derive_seed(12_000 + s, "prgseed")
                                     & ((1 << 64) - 1)))
            tr, _, _ = run_pair_collision_oracle(seq, seed=12_000 + s,
                                                 shared=shared)
            res[kind].append(compute_regret(tr, seq).regret)
    m_r, m_p = np.mean(res["random"]), np.mean(res["prg"])
    se_r = np.std(res["random"], ddof=1) / math.sqrt(seeds)
    se_p = np.std(res["prg"], ddof=1) / math.sqrt(seeds)
    gap = abs(m_r - m_p)
    cap = 2 * math.hypot(se_r, se_p)
    ok = _report(12, gap <= cap,
                 f"|{m_r:.1f} - {m_p:.1f}| = {gap:.2f} <= 2 combined se = {cap:.2f}")
    assert ok
