import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rbmgi.graphs import (
    Graph,
    GraphParseError,
    OracleRefused,
    VertexMapping,
    brute_force_isomorphism,
    degree_sequence,
    format_pair,
    parse_graph,
    parse_pair,
    read_pair,
    verify_mapping,
)
from rbmgi.instances import paw_pair, pentagon_pair, petersen, theta_pair


def all_isomorphisms(g1, g2):
    """Reference oracle: try every permutation."""
    a1, a2 = g1.adjacency, g2.adjacency
    return [p for p in itertools.permutations(range(g1.n)) if (a2[np.ix_(p, p)] == a1).all()]


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


def test_parse_path():
    g = parse_graph("4 3\n0 1\n1 2\n2 3")
    assert g.n == 4 and g.m == 3
    assert g.degrees().tolist() == [1, 2, 2, 1]


def test_parse_cycle_degree_sequence():
    g = parse_graph("5 5\n0 1\n1 2\n2 3\n3 4\n4 0")
    assert degree_sequence(g) == [2] * 5


def test_parse_rejects_self_loop():
    with pytest.raises(GraphParseError, match="line 2"):
        parse_graph("3 1\n0 0")


@pytest.mark.parametrize(
    "text",
    ["", "3\n", "3 1\n0 5", "3 2\n0 1", "x y\n", "3 1\n0 1 2"],
)
def test_parse_errors(text):
    with pytest.raises(GraphParseError):
        parse_graph(text)


def test_parse_comments_and_duplicates():
    g = parse_graph("# a comment\n3 3\n0 1\n1 0\n1 2\n")
    assert g.edges == frozenset({(0, 1), (1, 2)})


def test_pair_round_trip(tmp_path):
    g1, g2 = theta_pair()
    text = format_pair(g1, g2, ["two theta graphs"])
    assert text.startswith("# two theta graphs")
    assert parse_pair(text) == (g1, g2)
    path = tmp_path / "pair.txt"
    path.write_text(text)
    assert read_pair(path) == (g1, g2)


def test_pair_needs_two_blocks():
    with pytest.raises(GraphParseError):
        parse_pair("2 1\n0 1\n")


def test_graph_is_read_only():
    g = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(ValueError):
        g.adjacency[0, 2] = 1


def test_degree_sequences():
    assert degree_sequence(Graph(3, frozenset())) == [0, 0, 0]
    # the four-vertex worked example uses a triangle with a pendant
    assert degree_sequence(paw_pair()[0]) == [3, 2, 2, 1]
    assert degree_sequence(petersen()) == [3] * 10


def test_identity_is_found_first():
    path = parse_graph("4 3\n0 1\n1 2\n2 3")
    m = brute_force_isomorphism(path, path)
    assert m.as_permutation() == (0, 1, 2, 3)


def test_pentagon_mapping():
    g1, g2 = pentagon_pair()
    m = brute_force_isomorphism(g1, g2)
    # A..E -> A, C, E, B, D
    assert m.as_permutation() == (0, 2, 4, 1, 3)
    assert verify_mapping(g1, g2, m)


def test_theta_pair_not_isomorphic():
    g1, g2 = theta_pair()
    assert degree_sequence(g1) == degree_sequence(g2)
    assert brute_force_isomorphism(g1, g2) is None
    assert all_isomorphisms(g1, g2) == []


def test_oracle_guard():
    big = Graph(11, frozenset())
    with pytest.raises(OracleRefused):
        brute_force_isomorphism(big, big)


def test_worked_example_mapping_verifies():
    g1, g2 = paw_pair()
    m = VertexMapping(((0, 1), (1, 0), (2, 3), (3, 2)), 4)
    assert verify_mapping(g1, g2, m)
    assert len(all_isomorphisms(g1, g2)) == 2


def test_verify_mapping_edge_cases():
    g = parse_graph("4 3\n0 1\n1 2\n2 3")
    assert verify_mapping(g, g, VertexMapping.from_permutation([0, 1, 2, 3]))
    assert not verify_mapping(g, g, VertexMapping.from_permutation([1, 0, 2, 3]))
    # not a bijection
    assert not verify_mapping(g, g, VertexMapping(((0, 0), (1, 0), (2, 2), (3, 3)), 4))
    with pytest.raises(ValueError):
        verify_mapping(g, g, VertexMapping(((0, 0),), 4))


def test_mapping_inverse():
    m = VertexMapping.from_permutation([2, 0, 1])
    assert m.inverse().as_permutation() == (1, 2, 0)
    assert str(m) == "0->2 1->0 2->1"


@settings(max_examples=60, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_oracle_agrees_with_permutation_search(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.relabel(perm)
    m = brute_force_isomorphism(g, h)
    assert m is not None and verify_mapping(g, h, m)
    assert m.as_permutation() == all_isomorphisms(g, h)[0]


@settings(max_examples=60, deadline=None)
@given(graphs(max_n=5), graphs(max_n=5))
def test_oracle_on_arbitrary_pairs(g, h):
    found = brute_force_isomorphism(g, h)
    ref = all_isomorphisms(g, h) if g.n == h.n else []
    assert (found is None) == (not ref)


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_verify_transpositions_match_oracle(g):
    valid = set(all_isomorphisms(g, g))
    for i, j in itertools.combinations(range(g.n), 2):
        p = list(range(g.n))
        p[i], p[j] = p[j], p[i]
        assert verify_mapping(g, g, VertexMapping.from_permutation(p)) == (tuple(p) in valid)
