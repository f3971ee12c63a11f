"""Named benchmark graph pairs and random instance generators."""

from __future__ import annotations

import itertools
from typing import List, Sequence, Tuple

import numpy as np

from .graphs import ORACLE_MAX_N, Graph, brute_force_isomorphism, degree_sequence

Pair = Tuple[Graph, Graph]


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def havel_hakimi(degrees: Sequence[int]) -> Graph:
    """A simple graph realizing ``degrees`` (vertex ``v`` gets ``degrees[v]``)."""
    n = len(degrees)
    left = list(degrees)
    edges = []
    for _ in range(n):
        order = sorted(range(n), key=lambda v: (-left[v], v))
        v = order[0]
        d = left[v]
        if d == 0:
            break
        targets = order[1 : d + 1]
        if len(targets) < d or any(left[u] == 0 for u in targets):
            raise ValueError(f"degree sequence {list(degrees)} is not graphical")
        for u in targets:
            edges.append((v, u))
            left[u] -= 1
        left[v] = 0
    if any(left):
        raise ValueError(f"degree sequence {list(degrees)} is not graphical")
    return Graph.from_edges(n, edges)


def relabeled_copy(g: Graph, seed) -> Graph:
    perm = np.random.default_rng(seed).permutation(g.n)
    return g.relabel([int(p) for p in perm])


def paw_pair() -> Pair:
    """Four-vertex pair: a triangle with a pendant, hub at vertex 0 vs vertex 1.

    Degree classes {0}->{1}, {1}->{0}, {2,3}->{2,3}, so the pruned code is
    ``[x01, x10, x22, x23, x32, x33]`` (length 6) and both ``0<->1, 2<->3``
    and ``0<->1, 2->2, 3->3`` are isomorphisms.
    """
    g1 = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (2, 3)])
    g2 = Graph.from_edges(4, [(1, 0), (1, 2), (1, 3), (2, 3)])
    return g1, g2


def pentagon_pair() -> Pair:
    """5-cycle against the pentagram; A..E -> A, C, E, B, D is an isomorphism."""
    g2 = Graph.from_edges(5, [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)])
    return cycle(5), g2


def theta_pair() -> Pair:
    """Two 7-vertex theta graphs with degree sequence [2,3,2,2,2,2,3]; not isomorphic.

    Both join hubs 1 and 6 by three internally disjoint paths, with interior
    lengths (1, 2, 2) in the first graph and (1, 1, 3) in the second.
    """
    g1 = Graph.from_edges(7, [(1, 0), (0, 6), (1, 2), (2, 3), (3, 6), (1, 4), (4, 5), (5, 6)])
    g2 = Graph.from_edges(7, [(1, 0), (0, 6), (1, 2), (2, 6), (1, 3), (3, 4), (4, 5), (5, 6)])
    return g1, g2


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def pentagonal_prism() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 1) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def petersen_vs_prism() -> Pair:
    return petersen(), pentagonal_prism()


def rook_4x4() -> Graph:
    """K4 x K4 line graph; strongly regular (16, 6, 2, 2)."""
    cells = [(r, c) for r in range(4) for c in range(4)]
    edges = [
        (4 * r1 + c1, 4 * r2 + c2)
        for (r1, c1), (r2, c2) in itertools.combinations(cells, 2)
        if r1 == r2 or c1 == c2
    ]
    return Graph.from_edges(16, edges)


def shrikhande() -> Graph:
    """Cayley graph of Z4 x Z4 on +-(1,0), +-(0,1), +-(1,1); also (16, 6, 2, 2)."""
    gens = [(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)]
    edges = set()
    for r, c in itertools.product(range(4), repeat=2):
        for dr, dc in gens:
            u, v = 4 * r + c, 4 * ((r + dr) % 4) + (c + dc) % 4
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(16, edges)


def srg16_pair() -> Pair:
    return rook_4x4(), shrikhande()


def pendant_pentagon() -> Graph:
    """5-cycle with a pendant vertex; degree sequence [1,2,2,3,2,2]."""
    return Graph.from_edges(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (0, 3)])


def wheel(spokes: int) -> Graph:
    """Hub ``spokes`` joined to every vertex of a ``spokes``-cycle."""
    rim = [(i, (i + 1) % spokes) for i in range(spokes)]
    return Graph.from_edges(spokes + 1, rim + [(i, spokes) for i in range(spokes)])


def benchmark_suite(seed: int = 2024) -> List[Tuple[str, Pair]]:
    """Isomorphic benchmark pairs on five to ten vertices.

    Each second graph is a random relabeling of the first.
    """
    bases = [
        ("N5", cycle(5)),
        ("N6", pendant_pentagon()),
        ("N7", wheel(6)),
        ("N8", havel_hakimi([5, 4, 5, 4, 3, 2, 1, 4])),
        ("N9", Graph.from_edges(9, itertools.combinations(range(9), 2))),
        ("N10", havel_hakimi([7, 7, 8, 8, 7, 8, 8, 8, 8, 7])),
    ]
    return [(name, (g, relabeled_copy(g, seed + k))) for k, (name, g) in enumerate(bases)]


def nonisomorphic_suite() -> List[Tuple[str, Pair]]:
    return [("N7", theta_pair()), ("N10", petersen_vs_prism()), ("N16", srg16_pair())]


def random_graph(n: int, rng, edge_prob: float = 0.5) -> Graph:
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < edge_prob]
    return Graph.from_edges(n, edges)


def iso_random(n: int, seed, edge_prob: float = 0.5) -> Pair:
    """Random graph and a random relabeling of it."""
    rng = np.random.default_rng(seed)
    g = random_graph(n, rng, edge_prob)
    perm = rng.permutation(n)
    return g, g.relabel([int(p) for p in perm])


def double_edge_swap(g: Graph, rng, n_swaps: int = 1) -> Graph:
    """Degree-preserving rewiring ``(a,b),(c,d) -> (a,d),(c,b)``."""
    edges = set(g.edges)
    done = 0
    for _ in range(100 * max(1, n_swaps)):
        if done >= n_swaps or len(edges) < 2:
            break
        e = sorted(edges)
        (a, b), (c, d) = (e[i] for i in rng.choice(len(e), 2, replace=False))
        if rng.random() < 0.5:
            c, d = d, c
        new1, new2 = (min(a, d), max(a, d)), (min(c, b), max(c, b))
        if a == d or c == b or new1 in edges or new2 in edges or new1 == new2:
            continue
        edges -= {(min(a, b), max(a, b)), (min(c, d), max(c, d))}
        edges |= {new1, new2}
        done += 1
    return Graph(g.n, frozenset(edges))


def noniso_same_degree(n: int, seed, edge_prob: float = 0.5, max_tries: int = 200):
    """Pair with equal degree sequences that the oracle rejects.

    Returns ``(g1, g2, verified)``; ``verified`` is False when ``n`` exceeds
    the oracle guard and non-isomorphism could not be certified.
    """
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        g1 = random_graph(n, rng, edge_prob)
        g2 = double_edge_swap(g1, rng, n_swaps=max(1, g1.m // 2))
        if g2.edges == g1.edges:
            continue
        assert degree_sequence(g1) == degree_sequence(g2)
        if n > ORACLE_MAX_N:
            perm = rng.permutation(n)
            return g1, g2.relabel([int(p) for p in perm]), False
        if brute_force_isomorphism(g1, g2) is None:
            perm = rng.permutation(n)
            return g1, g2.relabel([int(p) for p in perm]), True
    raise RuntimeError(f"no non-isomorphic same-degree pair found for n={n}")
