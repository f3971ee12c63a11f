import itertools

import numpy as np
import pytest

from rbmgi.rbm import RbmParams, init_params, log_psi
from rbmgi.sampler import MarkovChains, acceptance_probability, mh_step, sample_batch


def params(L, H, seed, scale=0.6):
    rng = np.random.default_rng(seed)
    return RbmParams(rng.normal(0, scale, L), rng.normal(0, scale, H), rng.normal(0, scale, (L, H)))


def exact_distribution(p):
    states = np.array(list(itertools.product([-1.0, 1.0], repeat=p.n_visible)))
    lp = 2 * log_psi(p, states)
    w = np.exp(lp - lp.max())
    return states, w / w.sum()


def state_index(s):
    bits = (np.asarray(s) > 0).astype(int)
    return bits @ (1 << np.arange(bits.shape[-1])[::-1])


def test_uniform_target_accepts_everything():
    p = init_params(4, 3, sigma=0.0)
    for s in itertools.product([-1.0, 1.0], repeat=4):
        for k in range(4):
            assert acceptance_probability(p, s, k) == 1.0
    chains = MarkovChains.random(p, 5, seed=0)
    assert mh_step(chains, p).all()


def test_half_amplitude_ratio():
    # flipping s_0 from +1 to -1 scales psi by exp(-2a) = 1/2
    a = np.array([np.log(2.0) / 2, 0.0])
    p = RbmParams(a, np.zeros(1), np.zeros((2, 1)))
    assert acceptance_probability(p, [1.0, 1.0], 0) == pytest.approx(0.25)
    assert acceptance_probability(p, [-1.0, 1.0], 0) == 1.0


def test_detailed_balance_exhaustive():
    p = params(4, 3, 11)
    states, pi = exact_distribution(p)
    for s, ps in zip(states, pi):
        for k in range(4):
            t = s.copy()
            t[k] = -t[k]
            pt = pi[state_index(t)]
            # proposal probability 1/L cancels on both sides
            assert ps * acceptance_probability(p, s, k) == pytest.approx(pt * acceptance_probability(p, t, k), rel=1e-12)


def test_acceptance_rate_matches_exhaustive_expectation():
    p = params(4, 3, 5)
    states, pi = exact_distribution(p)
    expected = sum(
        w * np.mean([acceptance_probability(p, s, k) for k in range(4)]) for s, w in zip(states, pi)
    )
    chains = MarkovChains.random(p, 1000, seed=2)
    chains.advance(p, 50)
    before_acc, before_prop = chains.accepted.copy(), chains.proposed.copy()
    chains.advance(p, 100)
    per_chain = (chains.accepted - before_acc) / (chains.proposed - before_prop)
    assert (chains.proposed - before_prop).sum() == 100_000
    sigma = per_chain.std(ddof=1) / np.sqrt(per_chain.size)
    assert abs(per_chain.mean() - expected) < 3 * sigma


def test_histogram_matches_exact_distribution():
    p = params(3, 2, 8, scale=0.8)
    _, pi = exact_distribution(p)
    chains = MarkovChains.random(p, 1000, seed=3)
    out = sample_batch(chains, p, 1_000_000, thin=3, burn_in=30)
    assert out.shape == (1_000_000, 3)
    hist = np.bincount(state_index(out), minlength=8) / len(out)
    assert 0.5 * np.abs(hist - pi).sum() < 0.02


def test_snapshot_without_moves():
    p = params(6, 6, 0)
    chains = MarkovChains.random(p, 1, seed=4)
    start = chains.spins.copy()
    out = sample_batch(chains, p, 1, thin=0, burn_in=0)
    assert (out[0] == start[0]).all()


def test_three_samples_on_six_sites():
    p = init_params(6, 6, 0.01, seed=0)
    out = sample_batch(MarkovChains.random(p, 3, seed=0), p, 3, thin=6, burn_in=60)
    assert out.shape == (3, 6)
    assert set(np.unique(out)) <= {-1.0, 1.0}


def test_batch_split_over_fewer_chains():
    p = params(5, 4, 1)
    chains = MarkovChains.random(p, 3, seed=9)
    out = sample_batch(chains, p, 8, thin=5)
    assert out.shape == (8, 5)
    # 8 samples over 3 chains -> 3, 3, 2 records
    assert chains.proposed.tolist() == [15, 15, 10]


def test_reproducible():
    p = params(7, 5, 2)
    a = sample_batch(MarkovChains.random(p, 4, seed=123), p, 40, thin=7, burn_in=70)
    b = sample_batch(MarkovChains.random(p, 4, seed=123), p, 40, thin=7, burn_in=70)
    c = sample_batch(MarkovChains.random(p, 4, seed=124), p, 40, thin=7, burn_in=70)
    assert (a == b).all()
    assert not (a == c).all()


def test_chain_streams_do_not_depend_on_chain_count():
    p = params(6, 4, 3)
    few = MarkovChains.random(p, 2, seed=77)
    many = MarkovChains.random(p, 6, seed=77)
    few.advance(p, 30)
    many.advance(p, 30)
    assert (few.spins == many.spins[:2]).all()


def test_cache_stays_consistent():
    p = params(8, 6, 4)
    chains = MarkovChains.random(p, 10, seed=1)
    chains.advance(p, 500)
    assert np.allclose(chains.theta, p.b + chains.spins @ p.w, rtol=0, atol=1e-9)


def test_bad_arguments():
    p = params(3, 2, 0)
    with pytest.raises(ValueError):
        sample_batch(MarkovChains.random(p, 1, seed=0), p, 0, thin=1)
    with pytest.raises(ValueError):
        MarkovChains(np.ones((2, 3)), p, [np.random.default_rng(0)])
