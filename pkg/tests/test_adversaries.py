import numpy as np
import pytest

from lazyleader.adversaries import AdversaryConfigError, AdversarySpec, generate, read_loss_csv
from lazyleader.combinatorial import LossVectorSequence


def test_zeros():
    assert np.all(generate(AdversarySpec("zeros"), 5, 3).losses == 0)


def test_bernoulli_mean_and_seeding():
    a = generate(AdversarySpec("bernoulli", {"p": 0.5}, seed=1), 1000, 10).losses
    assert set(np.unique(a)) <= {0.0, 1.0}
    assert abs(a.mean() - 0.5) <= 0.015
    b = generate(AdversarySpec("bernoulli", seed=1), 1000, 10).losses
    c = generate(AdversarySpec("bernoulli", seed=2), 1000, 10).losses
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    p2 = generate(AdversarySpec("bernoulli", {"p": 0.2}, seed=3), 1000, 10).losses
    assert abs(p2.mean() - 0.2) <= 0.015
    with pytest.raises(AdversaryConfigError):
        generate(AdversarySpec("bernoulli", {"p": 1.5}), 3, 2)


def test_alternating():
    a = generate(AdversarySpec("alternating"), 4, 2).losses
    assert a.tolist() == [[0, 1], [1, 0], [0, 1], [1, 0]]
    with pytest.raises(AdversaryConfigError):
        generate(AdversarySpec("alternating"), 4, 3)


def test_drifting_leader():
    a = generate(AdversarySpec("drifting_leader", {"gap_period": 2}), 8, 3).losses
    leaders = a.argmin(axis=1).tolist()
    assert leaders == [0, 0, 1, 1, 2, 2, 0, 0]
    assert np.all(a.sum(axis=1) == 2)


def test_uniform_vectors():
    lm = generate(AdversarySpec("uniform_vectors", seed=4), 500, 6, vectors=True)
    assert isinstance(lm, LossVectorSequence)
    assert lm.d == 6
    assert 0.0 <= lm.losses.min() and lm.losses.max() < 1.0
    assert abs(lm.losses.mean() - 0.5) < 0.02


def test_custom_file(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("a,b\n0,1\n0.5,0.25\n")
    assert read_loss_csv(p).tolist() == [[0, 1], [0.5, 0.25]]
    lm = generate(AdversarySpec("custom_file", {"path": str(p)}), 2, 2)
    assert lm.losses.tolist() == [[0, 1], [0.5, 0.25]]
    with pytest.raises(AdversaryConfigError):
        generate(AdversarySpec("custom_file", {"path": str(p)}), 3, 2)
    p.write_text("0,2\n")
    with pytest.raises(AdversaryConfigError):
        generate(AdversarySpec("custom_file", {"path": str(p)}), 1, 2)
    with pytest.raises(AdversaryConfigError):
        generate(AdversarySpec("custom_file"), 1, 2)


def test_spec_round_trip_and_errors():
    s = AdversarySpec.from_dict({"kind": "bernoulli", "p": 0.3, "seed": 5})
    assert s.params == {"p": 0.3} and s.seed == 5
    assert AdversarySpec.from_dict(s.to_dict()) == s
    assert s.label == "bernoulli(0.3)"
    with pytest.raises(AdversaryConfigError):
        AdversarySpec("nope")
    with pytest.raises(AdversaryConfigError):
        AdversarySpec.from_dict({"p": 1})
    with pytest.raises(AdversaryConfigError):
        generate(AdversarySpec("zeros"), 0, 2)
