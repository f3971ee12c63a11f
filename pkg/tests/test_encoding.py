import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbmgi.encoding import (
    NonIsomorphicVerdict,
    PenaltyState,
    batch_penalty,
    bits_to_spins,
    build_code,
    code_length,
    decode_mapping,
    encode_mapping,
    lambda_upper_bound,
    penalty,
    penalty_f1,
    penalty_f2,
    spins_to_bits,
)
from rbmgi.graphs import Graph, VertexMapping, parse_graph, verify_mapping
from rbmgi.instances import iso_random, paw_pair, theta_pair

K2 = Graph.from_edges(2, [(0, 1)])


def naive_penalty(g1, g2, x):
    """Straight transcription of the constraint counts, no shared code."""
    pairs = [(i, j) for i in range(g1.n) for j in range(g2.n) if g1.degrees()[i] == g2.degrees()[j]]
    on = [p for p, bit in zip(pairs, x) if bit]
    f1 = sum((sum(1 for i, _ in on if i == v) - 1) ** 2 for v in range(g1.n))
    f1 += sum((sum(1 for _, j in on if j == v) - 1) ** 2 for v in range(g2.n))
    f2 = 0
    for (i, j), (k, l) in itertools.product(on, on):
        f2 += int(g1.has_edge(i, k) if i != k else 0) != int(g2.has_edge(j, l) if j != l else 0)
    return f1, f2


def test_pruned_code_of_worked_example():
    code = build_code(*paw_pair())
    # [x_AB, x_BA, x_CC, x_CD, x_DC, x_DD]
    assert code.pairs == ((0, 1), (1, 0), (2, 2), (2, 3), (3, 2), (3, 3))
    assert code.L == 6


def test_code_length_examples():
    path = parse_graph("4 3\n0 1\n1 2\n2 3")
    assert code_length(path, path) == 8
    assert code_length(*theta_pair()) == 29
    assert code_length(*paw_pair()) == 6


def test_code_length_counts_degree_matches():
    for seed in range(10):
        g1, g2 = iso_random(6, seed)
        d1, d2 = g1.degrees(), g2.degrees()
        assert code_length(g1, g2) == sum(int(a == b) for a in d1 for b in d2)


def test_degree_pruning_verdicts():
    assert isinstance(build_code(K2, Graph(3, frozenset())), NonIsomorphicVerdict)
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    path = parse_graph("4 3\n0 1\n1 2\n2 3")
    v = build_code(star, path)
    assert isinstance(v, NonIsomorphicVerdict) and "degree" in v.reason


def test_q_is_symmetric_with_zero_diagonal():
    code = build_code(*theta_pair())
    assert (code.q == code.q.T).all()
    assert (np.diag(code.q) == 0).all()
    assert not code.q.flags.writeable


def test_k2_full_code_values():
    code = build_code(K2, K2)
    assert code.L == 4
    ones = [1, 1, 1, 1]
    assert penalty_f1(code, ones) == 4
    assert penalty_f2(code, ones) == 8
    assert penalty(code, ones) == 12
    for x in itertools.product([0, 1], repeat=4):
        assert (penalty_f1(code, x), penalty_f2(code, x)) == naive_penalty(K2, K2, x)


def test_trivial_values():
    code = build_code(*paw_pair())
    zero = np.zeros(code.L, dtype=int)
    assert penalty_f1(code, zero) == 2 * code.n
    assert penalty_f2(code, zero) == 0
    good = encode_mapping(code, VertexMapping(((0, 1), (1, 0), (2, 3), (3, 2)), 4))
    assert penalty_f1(code, good) == penalty_f2(code, good) == 0


def test_first_iteration_samples_of_worked_example():
    # frozen from the naive transcription above
    code = build_code(*paw_pair())
    samples = [[0, 1, 1, 0, 1, 1], [1, 1, 0, 0, 1, 0], [0, 1, 1, 1, 0, 1]]
    values = [penalty(code, x) for x in samples]
    assert values == [8, 2, 8]
    assert [naive_penalty(code.g1, code.g2, x) for x in samples] == [(4, 4), (2, 0), (4, 4)]
    assert np.mean(values) == 6.0


def test_exhaustive_worked_example_zeros_are_isomorphisms():
    g1, g2 = paw_pair()
    code = build_code(g1, g2)
    xs = np.array(list(itertools.product([0, 1], repeat=code.L)))
    e = batch_penalty(code, xs)
    zeros = xs[e == 0]
    assert len(zeros) == 2
    for x in zeros:
        m = decode_mapping(code, x)
        assert m.complete and verify_mapping(g1, g2, m)
    assert [1, 1, 0, 1, 1, 0] in zeros.tolist()


def test_upper_bound_values():
    assert lambda_upper_bound(1) == 0
    assert lambda_upper_bound(4) == 168
    assert lambda_upper_bound(5) == 360
    with pytest.raises(ValueError):
        lambda_upper_bound(0)


def test_penalty_length_mismatch():
    code = build_code(*paw_pair())
    with pytest.raises(ValueError):
        penalty(code, [0, 1])
    with pytest.raises(ValueError):
        penalty(code, [0, 1, 2, 0, 0, 0])


def test_spin_conversion():
    assert bits_to_spins([0, 1]).tolist() == [-1, 1]
    assert bits_to_spins([1, 1, 1]).tolist() == [1, 1, 1]
    x = np.random.default_rng(3).integers(0, 2, 6)
    assert (spins_to_bits(bits_to_spins(x)) == x).all()


def test_decode_final_sample():
    code = build_code(*paw_pair())
    m = decode_mapping(code, [1, 1, 0, 1, 1, 0])
    assert m.complete
    assert m.as_permutation() == (1, 0, 3, 2)
    assert decode_mapping(code, np.zeros(6, dtype=int)).pairs == ()
    assert not decode_mapping(code, [1, 1, 1, 1, 0, 0]).complete


def test_dump_q(tmp_path):
    code = build_code(*paw_pair())
    path = tmp_path / "q.csv"
    code.dump_q(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,coefficient"
    rebuilt = np.zeros_like(code.q)
    for line in lines[1:]:
        i, j, c = map(int, line.split(","))
        rebuilt[i, j] = c
    assert (rebuilt == code.q).all()


@st.composite
def random_pair(draw):
    n = draw(st.integers(2, 6))
    seed = draw(st.integers(0, 10_000))
    g1, g2 = iso_random(n, seed, edge_prob=draw(st.sampled_from([0.3, 0.5, 0.7])))
    return g1, g2


@settings(max_examples=50, deadline=None)
@given(random_pair(), st.integers(0, 2**32 - 1))
def test_penalty_matches_naive_transcription(pair, seed):
    code = build_code(*pair)
    xs = np.random.default_rng(seed).integers(0, 2, size=(8, code.L))
    batch = batch_penalty(code, xs)
    for x, e in zip(xs, batch):
        f1, f2 = naive_penalty(*pair, x)
        assert (penalty_f1(code, x), penalty_f2(code, x)) == (f1, f2)
        assert e == f1 + f2
        assert e % 2 == 0
        assert 0 <= e <= lambda_upper_bound(code.n)


@settings(max_examples=50, deadline=None)
@given(random_pair(), st.integers(0, 2**32 - 1))
def test_incremental_flips_match_full_evaluation(pair, seed):
    code = build_code(*pair)
    rng = np.random.default_rng(seed)
    state = PenaltyState(code, rng.integers(0, 2, code.L))
    for k in rng.integers(code.L, size=50):
        d = state.delta(int(k))
        before = state.energy
        state.flip(int(k))
        assert state.energy == before + d == penalty(code, state.x)


@settings(max_examples=30, deadline=None)
@given(random_pair())
def test_encode_decode_round_trip(pair):
    from rbmgi.graphs import brute_force_isomorphism

    g1, g2 = pair
    code = build_code(g1, g2)
    m = brute_force_isomorphism(g1, g2)
    x = encode_mapping(code, m)
    assert penalty(code, x) == 0
    assert decode_mapping(code, x).as_permutation() == m.as_permutation()
