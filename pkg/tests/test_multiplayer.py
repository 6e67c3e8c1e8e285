import itertools

import numpy as np
import pytest

from mpbandits.adversaries import stochastic_losses
from mpbandits.env import compute_regret, effective_loss
from mpbandits.errors import ConfigurationError
from mpbandits.multiplayer import (
    NestedBlockPlayer,
    block_schedule,
    integer_mth_root,
    make_players,
    nearest_valid_horizon,
    phi_assign,
    phi_assignment,
    run_multiplayer,
)
from mpbandits.rng import Stream


def test_block_schedule_two_player_example():
    assert block_schedule(2, 10**4, 1).block_len == 100
    assert block_schedule(2, 10**4, 2).block_len == 1


def test_block_schedule_three_player_example():
    lens = [block_schedule(3, 512, i).block_len for i in (1, 2, 3)]
    assert lens == [64, 8, 1]


def test_reset_times_match_slower_player_blocks():
    for m, T in ((3, 512), (3, 16**3), (2, 10**4)):
        for i in range(2, m + 1):
            fast = block_schedule(m, T, i)
            slow = block_schedule(m, T, i - 1)
            expected = [slow.block_start(r) for r in range(slow.num_blocks)]
            assert fast.reset_times() == expected


def test_block_schedule_rejects_bad_horizons():
    with pytest.raises(ConfigurationError) as err:
        block_schedule(3, 600, 1)
    assert "512" in str(err.value)  # suggests the nearest valid horizon
    assert integer_mth_root(512, 3) == 8
    assert integer_mth_root(600, 3) is None
    assert nearest_valid_horizon(600, 3) == 512


def test_phi_single_player_takes_the_optimum():
    for a1 in (1, 2, 3):
        for A1 in (1, 2, 3):
            assert phi_assignment((a1,), (A1,)) == [a1]


def test_phi_spec_examples():
    assert phi_assignment((3, 2), (2, 2)) == [2, 3]
    assert phi_assignment((3, 2), (5, 3)) == [3, 2]
    assert phi_assign((3, 2), (5, 3), 1) == 3
    assert phi_assign((3, 2), (5, 3), 2) == 2


def test_phi_rejects_invalid_context():
    with pytest.raises(ConfigurationError):
        phi_assignment((2, 2), (2, 2))  # optimal actions must be distinct
    with pytest.raises(ConfigurationError):
        phi_assignment((3, 2), (1, 1))  # first player's floor is 2


def _valid_inputs(K, m):
    for optimal in itertools.permutations(range(1, K + 1), m):
        prefixes = itertools.product(
            *[range(m - i + 1, K + 1) for i in range(1, m + 1)]
        )
        for prefix in prefixes:
            yield optimal, prefix


def test_phi_construction_properties_exhaustive_small():
    for K in range(2, 5):
        for m in range(1, min(3, K) + 1):
            for optimal, prefix in _valid_inputs(K, m):
                out = phi_assignment(optimal, prefix)
                opt_set = set(optimal)
                assert set(out) == opt_set  # permutation of the optimal set
                for k, val in enumerate(out, start=1):
                    assert val >= m - k + 1
                    assert val not in out[: k - 1]
                    assert val not in prefix[: k - 1]
                    # depends only on the set and the prefix so far
                    assert val == phi_assign(tuple(sorted(opt_set)), prefix, k)


def test_players_respect_floors_and_block_constancy():
    means = [0.1, 0.15, 0.2, 0.25]
    seq = stochastic_losses(means, 12**3, seed=51)
    tr, players = run_multiplayer(seq, 3, 51)
    for i, p in enumerate(players, start=1):
        acts = tr.actions[:, i - 1]
        assert (acts >= p.floor_arm).all()
        L = p.schedule.block_len
        for r in range(p.schedule.num_blocks):
            block = acts[r * L : (r + 1) * L]
            assert (block == block[0]).all()


def test_reset_restores_fresh_state():
    """Right after a memory reset the player looks freshly constructed."""
    from mpbandits.env import Feedback

    seq = stochastic_losses([0.1, 0.15, 0.2, 0.25], 8**3, seed=52)
    q = NestedBlockPlayer(3, 4, 8**3, 2, Stream(52, "player2"))
    # middle player: blocks of 8 rounds, memory reset every 8 blocks
    for t in range(1, 65):
        arm = q.act(t)
        q.observe(t, Feedback(observed_loss=seq.loss(t, arm), collision=None))
    assert q.active != [q.floor_arm] or len(q.active) >= 1
    q.act(65)  # first round of block 8: reset boundary
    assert q.active == [q.floor_arm]
    for inst in q.learner.instances.values():
        assert all(v == 0.0 for v in inst.anytime.inner.cum.values())


def test_exploration_block_frequency():
    means = [0.1, 0.15, 0.2, 0.25]
    T = 20**3
    seq = stochastic_losses(means, T, seed=53)
    players = make_players(3, 4, T, 53)
    from mpbandits.env import Game, MODEL_NO_INFO

    game = Game(players, MODEL_NO_INFO, seq=seq)
    explored = np.zeros(3)
    blocks = np.zeros(3)
    prev_block = [-1, -1, -1]
    for t in range(1, T + 1):
        game.play_round(t)
        for i, p in enumerate(players):
            if p.block != prev_block[i]:
                prev_block[i] = p.block
                blocks[i] += 1
                explored[i] += p._exploring
    alpha = players[0].alpha
    for i in range(3):
        freq = explored[i] / blocks[i]
        sigma = (alpha * (1 - alpha) / blocks[i]) ** 0.5
        assert abs(freq - alpha) <= 4 * sigma + 0.02


def test_validation_errors():
    with pytest.raises(ConfigurationError):
        make_players(5, 4, 4**5, seed=0)  # m > K
    with pytest.raises(ConfigurationError):
        make_players(3, 4, 1001, seed=0)  # not a perfect cube
    with pytest.raises(ConfigurationError):
        make_players(3, 4, 27, seed=0)  # T < K^m


def test_two_player_reduction_shares_exponent():
    assert 1 - 1 / (2 * 2) == pytest.approx(0.75)
    seq = stochastic_losses([0.1, 0.2, 0.3], 40**2, seed=54)
    tr, players = run_multiplayer(seq, 2, 54)
    assert tr.rounds_recorded == 1600
    assert (tr.actions[:, 0] >= 2).all()  # slow player avoids the safe arm


def test_desk_scale_beats_uniform_play_on_own_sets():
    """20-seed check at T=16^3: absolute regret rate and a uniform baseline."""
    means = [0.7, 0.75, 0.8, 0.85]
    T = 16**3
    ours, unif = [], []
    for s in range(20):
        seq = stochastic_losses(means, T, seed=300 + s)
        tr, players = run_multiplayer(seq, 3, 300 + s)
        ours.append(compute_regret(tr, seq).regret / T)
        rng = np.random.default_rng(4000 + s)
        spaces = [list(range(p.floor_arm, 5)) for p in players]
        total = 0.0
        for t in range(1, T + 1):
            arms = [sp[rng.integers(0, len(sp))] for sp in spaces]
            eff, _ = effective_loss(seq.row(t), arms)
            total += sum(eff)
        unif.append(
            (total - compute_regret(tr, seq).best_subset_loss) / T
        )
    assert np.mean(ours) < 0.5
    assert np.mean(ours) < np.mean(unif)


def test_per_player_swap_regret_spot_check():
    """Realized swap regret of the middle player on each slow-player block
    stays well below the block length."""
    means = [0.1, 0.15, 0.2, 0.25]
    T = 16**3
    seq = stochastic_losses(means, T, seed=55)
    tr, players = run_multiplayer(seq, 3, 55)
    p = players[1]
    L_slow = players[0].schedule.block_len
    arms = list(range(p.floor_arm, 5))
    ratios = []
    for start in range(0, T, L_slow):
        acts = tr.actions[start : start + L_slow, 1]
        eff = tr.eff_loss[start : start + L_slow, 1]
        best = -np.inf
        for phi in itertools.product(arms, repeat=len(arms)):
            mapped = sum(
                seq.table[start + j, phi[arms.index(a)] - 1]
                for j, a in enumerate(acts)
            )
            best = max(best, eff.sum() - mapped)
        ratios.append(best / L_slow)
    assert np.mean(ratios) <= 0.75
