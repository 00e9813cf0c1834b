from fractions import Fraction as F

import numpy as np
import pytest

from dnetgames import (CycleCertified, PreconditionError, RandomWeightModel, UNBOUNDED, find_parasite_witness,
                       find_three_group_witness, model_probabilities, required_group_size,
                       required_group_size_parasite, sample_network)
from dnetgames.catalog import damped_triangle_weights
from dnetgames.random_networks import (WeightRange, estimate_cycle_probability, three_group_lower_bound,
                                       trial_rng, wilson_interval)


def test_sampler_identity_model(rng):
    W = sample_network(RandomWeightModel(p_zero=1), 5, rng).weights
    assert (W == np.eye(5)).all()


def test_sampler_one_way_directions(rng):
    model = RandomWeightModel(p_one_way=1, w_low=1)
    upper = 0
    draws = 10_000
    for _ in range(draws):
        W = sample_network(model, 2, rng).weights
        assert sorted([W[0, 1], W[1, 0]]) == [0, 1]
        upper += W[0, 1] == 1
    assert abs(upper / draws - 0.5) <= 0.02


def test_sampler_parasite_pair(rng):
    model = RandomWeightModel(p_parasite=1, w_minus=2, w_low=0.4, w_high=0.6,
                              host=WeightRange(0.5, 0.5), parasite=WeightRange(-2, -2))
    W = sample_network(model, 2, rng).weights
    assert sorted([W[0, 1], W[1, 0]]) == [-2, 0.5]


def test_sampler_marginals(rng):
    model = RandomWeightModel(p_zero=0.3, p_one_way=0.4, p_parasite=0.1, w_minus=1, w_low=0.2, w_high=0.5)
    counts = np.zeros(4)
    draws = 10_000
    for _ in range(draws // 10):
        W = sample_network(model, 5, rng).weights
        for i in range(5):
            for j in range(i + 1, 5):
                a, b = W[i, j], W[j, i]
                if a == 0 and b == 0:
                    counts[0] += 1
                elif a == 0 or b == 0:
                    counts[1] += 1
                elif min(a, b) == -1:
                    counts[2] += 1
                else:
                    counts[3] += 1
    for c, p in zip(counts, (0.3, 0.4, 0.1, 0.2)):
        assert abs(c / draws - p) <= 3 * np.sqrt(p * (1 - p) / draws)


def test_model_probabilities_examples():
    assert model_probabilities(RandomWeightModel(p_zero=0.3))[0] == 0.3
    assert model_probabilities(RandomWeightModel(p_one_way=0.4, w_low=1))[1] == pytest.approx(0.2)
    m = RandomWeightModel(p_parasite=0.2, p_zero=0.8, w_minus=1, w_low=0.2, w_high=0.5)
    assert model_probabilities(m)[2] == pytest.approx(0.1)


def test_model_validation():
    with pytest.raises(ValueError):
        RandomWeightModel(p_zero=0.7, p_one_way=0.5)
    with pytest.raises(ValueError):
        RandomWeightModel(w_low=0.5, w_high=0.5)
    with pytest.raises(ValueError):
        RandomWeightModel(p_parasite=0.1)


def test_group_sizes():
    assert required_group_size([1, 1], 1) == 1
    assert required_group_size([1, 1], 0.25) == 4
    # 1 - 0.5 * 1 < m * 0.5 * 0.5 first holds at m = 3
    assert required_group_size_parasite([1, 1], 1, 0.5, 0.5) == 3
    assert required_group_size_parasite([1, 1], 0.5, 0.5, 0.5) == 5
    with pytest.raises(PreconditionError):
        required_group_size_parasite([1, 1], 1, 0.5, 1)


def test_three_group_witness_on_triangle():
    w = find_three_group_witness(np.array(damped_triangle_weights(1), float), [1, 1, 1], 1, 1, caps=[1, 1, 1])
    assert w.groups == ((0,), (1,), (2,))
    assert len(w.schedule) == 6
    assert w.replay(damped_triangle_weights(1), [1, 1, 1], [1, 1, 1]).verdict.length == 6
    assert find_three_group_witness(np.eye(4), [1] * 4, 1, 1) is None


def block_pattern(m, weight=1.0):
    n = 3 * m
    W = np.eye(n)
    group = [g for g in range(3) for _ in range(m)]
    for a in range(n):
        for b in range(n):
            if group[b] == (group[a] + 1) % 3:
                W[b, a] = weight
    return W


def test_three_group_witness_on_block_network():
    W = block_pattern(3)
    w = find_three_group_witness(W, [1] * 9, 1, 3)
    assert w is not None and sorted(sum(w.groups, ())) == list(range(9))
    assert isinstance(w.replay(W, [1] * 9).verdict, CycleCertified)


def test_three_group_script_profiles():
    m = 2
    W = block_pattern(m, 0.75)
    t = [F(1), F(5, 4), F(1), F(5, 4), F(1), F(5, 4)]
    w = find_three_group_witness(W, t, 0.75, m)
    I1, I2, I3 = w.groups

    def on(*groups):
        return tuple(t[i] if any(i in g for g in groups) else 0 for i in range(6))

    phases = [w.profiles[k * m] for k in range(7)]
    assert phases == [on(I1), on(I1, I3), on(I3), on(I2, I3), on(I2), on(I1, I2), on(I1)]


def test_parasite_witness_on_pair():
    W = np.array([[1, -2], [0.5, 1]])
    w = find_parasite_witness(W, [1, 1], 2, 0.5, 0.5 + 1e-12, 1)
    assert w.groups == ((1,),) and w.host == 0
    assert w.profiles == [(1, 0), (1, F(1, 2)), (2, F(1, 2)), (2, 0), (1, 0)]
    assert find_parasite_witness(np.eye(3), [1] * 3, 1, 0.5, 0.6, 1) is None


def test_parasite_witness_from_group_size():
    m = required_group_size_parasite([1] * 5, 1, 0.5, 0.5)
    W = np.eye(m + 1)
    for i in range(1, m + 1):
        W[i, 0] = 0.5
        W[0, i] = -1
    w = find_parasite_witness(W, [1] * (m + 1), 1, 0.5, 0.5, m)
    assert w is not None and w.host == 0
    assert isinstance(w.replay(W, [1] * (m + 1)).verdict, CycleCertified)


def test_finder_skips_patterns_whose_script_fails():
    # cap on the triangle's third player stops the script; no witness survives replay
    W = np.array(damped_triangle_weights(1), float)
    assert find_three_group_witness(W, [1, 1, 1], 1, 1, caps=[1, 1, F(1, 2)]) is None


def test_large_network_uses_restarts():
    rng = np.random.default_rng(5)
    W = block_pattern(1)
    big = np.eye(15)
    big[np.ix_([3, 7, 11], [3, 7, 11])] = W
    w = find_three_group_witness(big, [1] * 15, 1, 1, rng=rng)
    assert w is not None and sorted(sum(w.groups, ())) == [3, 7, 11]


def test_estimate_identity_model_and_small_n():
    rows = estimate_cycle_probability(RandomWeightModel(p_zero=1), 1, [3, 6], 20, seed=1)
    assert [r.hits for r in rows] == [0, 0]
    model = RandomWeightModel(p_zero=0.2, p_one_way=0.4, w_low=1)
    assert estimate_cycle_probability(model, 1, [2], 50, seed=1)[0].hits == 0


def test_wilson_and_bound():
    lo, hi = wilson_interval(0, 10)
    assert lo == 0 and 0 < hi < 0.35
    assert three_group_lower_bound(0.2, 0.2, 1, 27) == pytest.approx(1 - (1 - 0.008) ** 9)


def test_trial_streams_are_independent_of_order():
    a = trial_rng(7, 9, 3).random()
    trial_rng(7, 9, 2).random()
    assert trial_rng(7, 9, 3).random() == a
