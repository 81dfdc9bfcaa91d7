import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lazyleader import bounds as B
from lazyleader.combinatorial import MSetFamily, dag_oracle, random_layered_dag
from lazyleader.core import LossMatrix, make_record, regret
from lazyleader.harness import StatSummary, verify_be_the_leader, verify_pathwise_lemma1
from lazyleader.rng import RngStream
from lazyleader.rwfpl import TIE_BREAKS, run_rwfpl

unit = st.floats(0.0, 1.0, allow_nan=False)
halves = st.integers(0, 2).map(lambda k: k / 2)


@st.composite
def loss_matrices(draw, max_n=40, max_N=5, elements=unit):
    n = draw(st.integers(1, max_n))
    N = draw(st.integers(1, max_N))
    return LossMatrix(draw(arrays(np.float64, (n, N), elements=elements)))


@settings(max_examples=150, deadline=None)
@given(loss_matrices(), st.integers(0, 2**32), st.sampled_from(TIE_BREAKS))
def test_pathwise_inequalities_hold(lm, seed, tie_break):
    rec = run_rwfpl(lm, RngStream(seed), tie_break)
    assert verify_pathwise_lemma1(rec, lm).all()
    assert verify_be_the_leader(rec, lm).all()


@settings(max_examples=100, deadline=None)
@given(loss_matrices(elements=halves), st.integers(0, 2**32))
def test_pathwise_inequalities_hold_with_frequent_ties(lm, seed):
    rec = run_rwfpl(lm, RngStream(seed))
    assert verify_pathwise_lemma1(rec, lm).all()
    assert verify_be_the_leader(rec, lm).all()


@settings(max_examples=100, deadline=None)
@given(loss_matrices(), st.integers(0, 2**32))
def test_chosen_action_is_in_lead_pack_and_switches_bounded(lm, seed):
    rec = run_rwfpl(lm, RngStream(seed))
    assert np.all(rec.lead_pack_sizes >= 1)
    assert rec.switches <= lm.n - 1
    assert rec.regret == regret(rec, lm)


@settings(max_examples=100, deadline=None)
@given(loss_matrices(max_N=4), st.data())
def test_regret_ignores_common_shifts(lm, data):
    actions = np.array(data.draw(st.lists(st.integers(0, lm.N - 1), min_size=lm.n, max_size=lm.n)))
    shift = data.draw(arrays(np.float64, (lm.n, 1), elements=st.floats(0, 1)))
    shifted = np.clip(lm.losses * 0.5 + shift * 0.5, 0, 1)
    base = LossMatrix(lm.losses * 0.5)
    assert abs(regret(make_record(actions, base), base) - regret(make_record(actions, LossMatrix(shifted)), LossMatrix(shifted))) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 7).flatmap(lambda d: st.tuples(st.just(d), st.integers(1, d),
                                                      arrays(np.float64, d, elements=st.floats(-5, 5)))))
def test_mset_oracle_is_optimal(args):
    d, m, z = args
    f = MSetFamily(d, m)
    assert f.oracle(z) @ z <= (f.enumerate() @ z).min() + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_dag_oracle_is_optimal(seed):
    gen = np.random.default_rng(seed)
    dag = random_layered_dag(gen)
    z = gen.uniform(-3, 3, dag.d)
    v = dag_oracle(dag, z)
    assert v.sum() == dag.m
    assert abs(v @ z - (dag.enumerate() @ z).min()) <= 1e-12


@given(st.integers(2, 400).flatmap(lambda t: st.tuples(st.just(t), st.integers(-t + 4, t))))
def test_pmf_ratio_forms_agree(tk):
    t, k = tk
    if (k - t) % 2:
        k -= 1
    if k < -t + 4:
        return
    a, b = B.pmf_ratio(t, k), B.pmf_ratio_factorial(t, k)
    assert abs(a - b) <= 1e-12 * max(abs(b), 1.0)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
def test_stat_summary_is_ordered(xs):
    s = StatSummary.of(xs)
    assert s.min <= s.q50 <= s.q90 <= s.q99 <= s.max
    assert s.min - 1e-6 <= s.mean <= s.max + 1e-6
    assert s.se >= 0


@given(st.integers(1, 10**7), st.integers(2, 10**4))
def test_thm1_dominates_twice_switch_bound(n, N):
    assert B.thm1_bound(n, N) >= 2 * B.thm1_switch_bound(n, N)
