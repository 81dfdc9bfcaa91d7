import numpy as np
import pytest

from lazyleader.core import (
    ContractError,
    CumulativeLoss,
    LossMatrix,
    check_grid,
    forecaster_round,
    geometric_grid,
    make_record,
    play,
    regret,
    sticky_argmin,
    switch_count,
)
from lazyleader.rng import RngStream
from lazyleader.rwfpl import RandomWalkFPL, run_rwfpl


def test_loss_matrix_validation():
    with pytest.raises(ContractError):
        LossMatrix([[0.0, 1.5]])
    with pytest.raises(ContractError):
        LossMatrix([0.0, 1.0])
    with pytest.raises(ContractError):
        LossMatrix([[0.0, 1.0]], n=2)
    lm = LossMatrix([[0, 1], [1, 0]])
    assert (lm.n, lm.N) == (2, 2)
    assert lm.cumulative().tolist() == [[0, 0], [0, 1], [1, 1]]
    with pytest.raises(ValueError):
        lm.losses[0, 0] = 0.5


def test_regret_hand_example():
    lm = LossMatrix([[0, 1], [0, 1], [1, 0]])
    rec = make_record(np.array([1, 1, 1]), lm)
    assert regret(rec, lm) == 1.0
    assert rec.regret == 1.0
    assert rec.switches == 0


def test_regret_zero_cases():
    rec = make_record(np.array([0, 1, 0]), LossMatrix(np.zeros((3, 2))))
    assert rec.regret == 0.0
    same = LossMatrix(np.array([[0.2, 0.2], [0.9, 0.9]]))
    assert regret(make_record(np.array([1, 0]), same), same) == 0.0


def test_regret_checks_dimensions():
    lm = LossMatrix(np.zeros((3, 2)))
    with pytest.raises(ContractError):
        regret(make_record(np.array([0, 1]), LossMatrix(np.zeros((2, 2)))), lm)


def test_switch_count_vectors_and_indices():
    assert switch_count([0, 0, 1, 1, 0]) == 2
    assert switch_count(np.array([[1, 0], [1, 0], [0, 1]])) == 1


def test_sticky_argmin():
    v = np.array([1.0, 0.0, 0.0])
    assert sticky_argmin(v) == 1
    assert sticky_argmin(v, incumbent=2) == 2
    assert sticky_argmin(v, incumbent=0) == 1


def test_forecaster_round_rejects_dimension_mismatch():
    f = RandomWalkFPL()
    f.start(3, 5, RngStream(0))
    with pytest.raises(ContractError):
        forecaster_round(f, CumulativeLoss.zeros(2), RngStream(0))


def test_single_action_always_first():
    lm = LossMatrix(np.random.default_rng(0).random((50, 1)))
    rec = run_rwfpl(lm, RngStream(5))
    assert np.all(rec.actions == 0)
    assert rec.regret == 0.0


def test_same_seed_same_actions():
    lm = LossMatrix(np.random.default_rng(1).random((200, 4)))
    a = play(RandomWalkFPL(), lm, RngStream(9, 3)).actions
    b = play(RandomWalkFPL(), lm, RngStream(9, 3)).actions
    c = play(RandomWalkFPL(), lm, RngStream(9, 4)).actions
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_first_action_is_a_fair_coin():
    lm = LossMatrix(np.zeros((1, 2)))
    first = np.array([run_rwfpl(lm, RngStream(seed)).actions[0] for seed in range(10_000)])
    assert abs(np.mean(first == 0) - 0.5) <= 0.02


def test_play_matches_run_rwfpl():
    lm = LossMatrix(np.random.default_rng(2).random((100, 3)))
    assert np.array_equal(play(RandomWalkFPL(), lm, RngStream(4)).actions, run_rwfpl(lm, RngStream(4)).actions)


def test_grids():
    assert geometric_grid(1).tolist() == [1]
    assert geometric_grid(3).tolist() == [1, 2, 3]
    assert geometric_grid(8).tolist() == [1, 2, 4, 8]
    assert geometric_grid(10).tolist() == [1, 2, 4, 8, 10]
    with pytest.raises(ContractError):
        check_grid([2, 2], 5)
    with pytest.raises(ContractError):
        check_grid([0, 2], 5)
