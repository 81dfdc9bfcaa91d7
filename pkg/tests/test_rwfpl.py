import numpy as np
import pytest
from scipy import stats

from lazyleader import rng
from lazyleader.adversaries import AdversarySpec, generate
from lazyleader.core import ContractError, CumulativeLoss, LossMatrix, geometric_grid
from lazyleader.harness import verify_be_the_leader, verify_pathwise_lemma1
from lazyleader.rwfpl import (
    TIE_BREAKS,
    WalkState,
    lead_pack,
    lead_pack_from_values,
    pick_minimizer,
    run_rwfpl,
    run_rwfpl_batch,
    rw_step,
    words_per_round,
)


class ScriptedRng:
    """Stand-in stream that returns preset ±1/2 increments."""

    def __init__(self, steps):
        self.steps = [np.asarray(s, dtype=float) for s in steps]

    def coins(self, count):
        return self.steps.pop(0)

    def uniform(self):
        return 0.0


def test_large_gap_fixes_the_leader():
    cum = CumulativeLoss(np.array([5.0, 0.0, 5.0]), 0)
    for seed in range(50):
        a, _ = rw_step(WalkState.initial(3), cum, None, rng.RngStream(seed))
        assert a == 1


def test_rw_step_checks_time_and_shape():
    with pytest.raises(ContractError):
        rw_step(WalkState(np.zeros(2), 1), CumulativeLoss.zeros(2), None, rng.RngStream(0))
    with pytest.raises(ContractError):
        rw_step(WalkState.initial(3), CumulativeLoss.zeros(2), None, rng.RngStream(0))
    with pytest.raises(ContractError):
        rw_step(WalkState.initial(2), CumulativeLoss.zeros(2), None, rng.RngStream(0), "bogus")


def test_lead_pack_boundary_is_inclusive():
    assert lead_pack_from_values([0.0, 2.0]) == {0, 1}
    assert lead_pack_from_values([0.0, 2.5]) == {0}
    walk = WalkState(np.array([0.5, -0.5]), 1)
    assert lead_pack(walk, CumulativeLoss(np.array([0.0, 3.0]), 1)) == {0, 1}
    assert lead_pack(walk, CumulativeLoss(np.array([0.0, 3.5]), 1)) == {0}


def test_pick_minimizer_modes():
    v = np.array([1.0, 0.0, 0.0, 0.0])
    assert pick_minimizer(v, 3, TIE_BREAKS.index("lowest")) == 1
    assert pick_minimizer(v, 3, TIE_BREAKS.index("sticky")) == 3
    random = TIE_BREAKS.index("random")
    assert [pick_minimizer(v, None, random, u) for u in (0.0, 0.4, 0.99)] == [1, 2, 3]


def test_words_per_round():
    assert words_per_round(2) == 2
    assert words_per_round(2, "lowest") == 1
    assert words_per_round(65, "sticky") == 2


def test_walk_marginal_is_binomial():
    # Z_20 = (heads - 10) / 2 * 2 steps of ±1/2: heads ~ Binomial(20, 1/2)
    R, t = 100_000, 20
    keys = rng.stream_keys(11, R)
    w = rng.words_block(keys, 0, t)
    heads = ((w & np.uint64(1)) == 1).sum(axis=1)
    obs = np.bincount(heads, minlength=t + 1).astype(float)
    exp = stats.binom.pmf(np.arange(t + 1), t, 0.5) * R
    # pool sparse tails
    lo, hi = 4, 16
    o = np.concatenate([[obs[:lo].sum()], obs[lo:hi + 1], [obs[hi + 1:].sum()]])
    e = np.concatenate([[exp[:lo].sum()], exp[lo:hi + 1], [exp[hi + 1:].sum()]])
    assert stats.chisquare(o, e).pvalue > 1e-3


def test_lemma1_needs_the_final_switch():
    # I_1 = 2, I_2 = 1; the inequality only holds once the switch into round n+1 is counted
    lm = LossMatrix([[0.0, 1.0]])
    rec = run_rwfpl(lm, ScriptedRng([[0.5, -0.5], [-0.5, 0.5]]), tie_break="lowest")
    assert rec.actions.tolist() == [1]
    ext = rec.extension
    assert ext.action_next == 0
    assert ext.Z_next.tolist() == [0.0, 0.0]
    assert ext.x_prev.tolist() == [-0.5, 0.5]
    lhs = rec.cumulative_loss - lm.losses.sum(axis=0)
    assert lhs.tolist() == [1.0, 0.0]
    plain = 2 * rec.switches + ext.Z_next - ext.x_prev.sum()
    assert plain.tolist() == [0.0, 0.0]
    assert not np.all(lhs <= plain)
    assert verify_pathwise_lemma1(rec, lm).tolist() == [True, True]
    assert verify_be_the_leader(rec, lm).all()


def test_pathwise_checks_need_extension():
    lm = LossMatrix(np.zeros((3, 2)))
    rec = run_rwfpl(lm, rng.RngStream(0))
    rec.extension = None
    with pytest.raises(ContractError):
        verify_pathwise_lemma1(rec, lm)
    with pytest.raises(ContractError):
        verify_be_the_leader(rec, lm)


@pytest.mark.parametrize("kind", ["zeros", "bernoulli", "alternating", "drifting_leader"])
@pytest.mark.parametrize("tie_break", TIE_BREAKS)
def test_pathwise_inequalities_sequential(kind, tie_break):
    lm = generate(AdversarySpec(kind, {"gap_period": 7}, seed=3), 150, 2)
    for r in range(30):
        rec = run_rwfpl(lm, rng.RngStream(5, r), tie_break)
        assert verify_pathwise_lemma1(rec, lm).all()
        assert verify_be_the_leader(rec, lm).all()


@pytest.mark.parametrize("tie_break", TIE_BREAKS)
@pytest.mark.parametrize("N", [1, 3, 70])
def test_batch_backends_and_sequential_agree(tie_break, N):
    lm = generate(AdversarySpec("bernoulli", seed=1), 120, N)
    grid = geometric_grid(120)
    keys = rng.stream_keys(3, 16)
    a = run_rwfpl_batch(lm, keys, grid, "numba", tie_break)
    b = run_rwfpl_batch(lm, keys, grid, "numpy", tie_break)
    for f in ("cum_loss", "switches", "lead_gt1", "switch_next", "ext_switch"):
        assert np.array_equal(getattr(a, f), getattr(b, f)), f
    assert np.allclose(a.lemma1_margin, b.lemma1_margin)
    assert np.allclose(a.btl_margin, b.btl_margin)
    for r in range(16):
        rec = run_rwfpl(lm, rng.RngStream(3, r), tie_break)
        assert rec.switches == a.switches[r, -1]
        assert rec.cumulative_loss == a.cum_loss[r, -1]
        pos = grid - 1
        assert np.array_equal(rec.lead_pack_sizes[pos] > 1, a.lead_gt1[r])
        # the batch margins are the slack of the sequential checks
        assert (a.lemma1_margin[r] >= -1e-9) == verify_pathwise_lemma1(rec, lm).all()


def test_switch_rate_on_zero_losses():
    n = 10_000
    lm = LossMatrix(np.zeros((n, 2)))
    res = run_rwfpl_batch(lm, rng.stream_keys(21, 1000), geometric_grid(n))
    ratio = res.final_switches().mean() / np.sqrt(n)
    assert 0.3 <= ratio <= 1.3
    assert res.final_switches().mean() <= 4 * np.sqrt(2 * n * np.log(2)) + 4 * np.log(n) + 4
    assert np.all(res.regret == 0)
