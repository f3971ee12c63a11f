"""Simple undirected graphs, edge-list I/O and a brute-force isomorphism oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

Edge = Tuple[int, int]

# factorial enumeration guard for the oracle
ORACLE_MAX_N = 10


class GraphParseError(ValueError):
    """Malformed edge-list document."""


class OracleRefused(RuntimeError):
    """The brute-force oracle refuses instances above its size guard."""


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Edges are stored normalized as ``(min, max)`` in a frozenset, so the
    object is hashable and independent of input edge order.
    """

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            norm.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges))

    @cached_property
    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[u, v] = a[v, u] = 1
        a.setflags(write=False)
        return a

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def degrees(self) -> np.ndarray:
        """Per-vertex degree, indexed by vertex."""
        return self.adjacency.sum(axis=1)

    @property
    def m(self) -> int:
        return len(self.edges)

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Image of the graph under vertex map ``v -> perm[v]``."""
        return Graph(self.n, frozenset((perm[u], perm[v]) for u, v in self.edges))

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class VertexMapping:
    """Assignment pairs ``(i in V1, j in V2)``; possibly partial."""

    pairs: Tuple[Edge, ...]
    n: int

    @property
    def complete(self) -> bool:
        if len(self.pairs) != self.n:
            return False
        left = {i for i, _ in self.pairs}
        right = {j for _, j in self.pairs}
        return len(left) == self.n and len(right) == self.n

    def as_permutation(self) -> Tuple[int, ...]:
        """``perm[i] = j``; only defined for complete mappings."""
        if not self.complete:
            raise ValueError("mapping is not a bijection")
        perm = [0] * self.n
        for i, j in self.pairs:
            perm[i] = j
        return tuple(perm)

    def inverse(self) -> "VertexMapping":
        return VertexMapping(tuple(sorted((j, i) for i, j in self.pairs)), self.n)

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "VertexMapping":
        return cls(tuple((i, int(j)) for i, j in enumerate(perm)), len(perm))

    def __str__(self) -> str:
        return " ".join(f"{i}->{j}" for i, j in self.pairs)


def _parse_block(lines: Sequence[Tuple[int, str]]) -> Graph:
    header = None
    edges = []
    for lineno, raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"line {lineno}: expected two integers, got {line!r}") from None
        if header is None:
            if a < 0 or b < 0:
                raise GraphParseError(f"line {lineno}: negative header value")
            header = (a, b)
            continue
        n = header[0]
        if a == b:
            raise GraphParseError(f"line {lineno}: self-loop at vertex {a}")
        if not (0 <= a < n and 0 <= b < n):
            raise GraphParseError(f"line {lineno}: endpoint out of range for n={n}")
        edges.append((a, b))
    if header is None:
        raise GraphParseError("missing 'n m' header line")
    n, m = header
    if len(edges) != m:
        raise GraphParseError(f"header declares {m} edges but {len(edges)} edge lines follow")
    return Graph.from_edges(n, edges)


def parse_graph(text: str) -> Graph:
    """Parse an edge-list document: ``n m`` header then ``m`` lines ``u v``.

    ``#`` lines are comments. Repeated edges collapse to one.
    """
    return _parse_block(list(enumerate(text.splitlines(), start=1)))


def parse_pair(text: str) -> Tuple[Graph, Graph]:
    """Parse an instance-pair file: two edge-list blocks split by ``---``."""
    blocks: list = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.strip() == "---":
            blocks.append([])
        else:
            blocks[-1].append((lineno, raw))
    if len(blocks) != 2:
        raise GraphParseError(f"expected two blocks separated by '---', found {len(blocks)}")
    return _parse_block(blocks[0]), _parse_block(blocks[1])


def format_pair(g1: Graph, g2: Graph, comments: Sequence[str] = ()) -> str:
    head = "".join(f"# {c}\n" for c in comments)
    return head + g1.to_text() + "---\n" + g2.to_text()


def read_pair(path) -> Tuple[Graph, Graph]:
    return parse_pair(Path(path).read_text())


def degree_sequence(g: Graph) -> list:
    """Vertex degrees sorted nonincreasing."""
    return sorted((int(d) for d in g.degrees()), reverse=True)


def verify_mapping(g1: Graph, g2: Graph, m: VertexMapping) -> bool:
    """True iff ``m`` is a bijection preserving adjacency and non-adjacency."""
    if len(m.pairs) != m.n or g1.n != m.n:
        raise ValueError("verify_mapping needs a complete mapping over all vertices")
    if not m.complete or g2.n != g1.n:
        return False
    perm = np.asarray(m.as_permutation())
    return bool(np.array_equal(g2.adjacency[np.ix_(perm, perm)], g1.adjacency))


def brute_force_isomorphism(
    g1: Graph, g2: Graph, max_n: int = ORACLE_MAX_N
) -> Optional[VertexMapping]:
    """Lexicographically first isomorphism ``g1 -> g2``, or None.

    Depth-first search over vertex images in increasing order, restricted to
    equal-degree candidates and pruned on adjacency consistency with earlier
    assignments. The first leaf reached is the lexicographically smallest
    valid permutation, identical to full enumeration.
    """
    if g1.n != g2.n or g1.m != g2.m:
        return None
    n = g1.n
    if n > max_n:
        raise OracleRefused(f"oracle limited to n <= {max_n}, got n={n}")
    if degree_sequence(g1) != degree_sequence(g2):
        return None
    a1, a2 = g1.adjacency, g2.adjacency
    d1, d2 = g1.degrees(), g2.degrees()
    candidates = [[j for j in range(n) if d2[j] == d1[i]] for i in range(n)]
    perm = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for j in candidates[i]:
            if used[j]:
                continue
            if any(a1[i, k] != a2[j, perm[k]] for k in range(i)):
                continue
            perm[i] = j
            used[j] = True
            if extend(i + 1):
                return True
            used[j] = False
        perm[i] = -1
        return False

    if extend(0):
        return VertexMapping.from_permutation(perm)
    return None
