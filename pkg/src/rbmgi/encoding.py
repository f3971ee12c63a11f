"""QUBO encoding of graph isomorphism over degree-matched vertex pairs.

A configuration is a bit vector ``x`` over the pair list ``S``; bit ``k``
set means vertex ``pairs[k][0]`` of the first graph maps to vertex
``pairs[k][1]`` of the second. The penalty

    F(x) = sum_i (row_i - 1)^2 + sum_j (col_j - 1)^2
         + sum_{p, q in S} x_p x_q (A1[i_p, i_q] - A2[j_p, j_q])^2

is a nonnegative integer and vanishes exactly on valid isomorphisms.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np

from .graphs import Graph, VertexMapping, degree_sequence


@dataclass(frozen=True)
class NonIsomorphicVerdict:
    """Emitted at encoding time when the graphs cannot be isomorphic."""

    reason: str


@dataclass(frozen=True, eq=False)
class MappingCode:
    """Pruned pair set plus everything needed to evaluate the penalty."""

    g1: Graph
    g2: Graph
    n: int
    pairs: Tuple[Tuple[int, int], ...]
    index_of: Dict[Tuple[int, int], int]
    a1: np.ndarray
    a2: np.ndarray
    pair_i: np.ndarray
    pair_j: np.ndarray
    q: np.ndarray  # (L, L) quadratic table, zero diagonal

    @property
    def L(self) -> int:
        return len(self.pairs)

    def q_entries(self):
        """Nonzero ``(row, col, coefficient)`` triples of the quadratic table."""
        rows, cols = np.nonzero(self.q)
        return [(int(r), int(c), int(self.q[r, c])) for r, c in zip(rows, cols)]

    def dump_q(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["row", "col", "coefficient"])
            w.writerows(self.q_entries())


def build_code(g1: Graph, g2: Graph) -> Union[MappingCode, NonIsomorphicVerdict]:
    """Degree-pruned encoding, or an immediate verdict if degrees disagree."""
    if g1.n != g2.n:
        return NonIsomorphicVerdict(f"vertex counts differ ({g1.n} vs {g2.n})")
    if degree_sequence(g1) != degree_sequence(g2):
        return NonIsomorphicVerdict("degree sequences differ")
    d1, d2 = g1.degrees(), g2.degrees()
    pairs = tuple((i, j) for i in range(g1.n) for j in range(g2.n) if d1[i] == d2[j])
    pi = np.array([p[0] for p in pairs], dtype=np.intp)
    pj = np.array([p[1] for p in pairs], dtype=np.intp)
    a1, a2 = g1.adjacency, g2.adjacency
    q = (a1[np.ix_(pi, pi)] - a2[np.ix_(pj, pj)]) ** 2
    q.setflags(write=False)
    return MappingCode(
        g1=g1,
        g2=g2,
        n=g1.n,
        pairs=pairs,
        index_of={p: k for k, p in enumerate(pairs)},
        a1=a1,
        a2=a2,
        pair_i=pi,
        pair_j=pj,
        q=q,
    )


def code_length(g1: Graph, g2: Graph) -> int:
    """``sum_d c1(d) * c2(d)`` without building the code."""
    c1 = Counter(int(d) for d in g1.degrees())
    c2 = Counter(int(d) for d in g2.degrees())
    return sum(c * c2.get(d, 0) for d, c in c1.items())


def _check(code: MappingCode, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape[-1] != code.L:
        raise ValueError(f"configuration length {x.shape[-1]} != code length {code.L}")
    if ((x != 0) & (x != 1)).any():
        raise ValueError("configuration entries must be 0 or 1")
    return x


def penalty_f1(code: MappingCode, x) -> int:
    x = _check(code, x).astype(np.int64)
    rows = np.bincount(code.pair_i, weights=x, minlength=code.n)
    cols = np.bincount(code.pair_j, weights=x, minlength=code.n)
    return int(((rows - 1) ** 2).sum() + ((cols - 1) ** 2).sum())


def penalty_f2(code: MappingCode, x) -> int:
    x = _check(code, x).astype(np.int64)
    return int(x @ code.q @ x)


def penalty(code: MappingCode, x) -> int:
    """F1 + F2 for a single bit configuration."""
    return penalty_f1(code, x) + penalty_f2(code, x)


def batch_penalty(code: MappingCode, xs) -> np.ndarray:
    """Penalty of every row of a ``(m, L)`` bit matrix."""
    xs = _check(code, np.atleast_2d(xs)).astype(np.int64)
    rows = np.zeros((xs.shape[0], code.n), dtype=np.int64)
    cols = np.zeros_like(rows)
    np.add.at(rows.T, code.pair_i, xs.T)
    np.add.at(cols.T, code.pair_j, xs.T)
    f1 = ((rows - 1) ** 2).sum(axis=1) + ((cols - 1) ** 2).sum(axis=1)
    f2 = np.einsum("ml,ml->m", xs @ code.q, xs)
    return f1 + f2


def lambda_upper_bound(n: int) -> int:
    """Largest possible penalty on two ``n``-vertex graphs."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2 * n * n * (n - 1) + 2 * n * (n - 1) ** 2


def bits_to_spins(x) -> np.ndarray:
    return 2 * np.asarray(x, dtype=np.int8) - 1


def spins_to_bits(s) -> np.ndarray:
    return ((np.asarray(s, dtype=np.int8) + 1) // 2).astype(np.int8)


def decode_mapping(code: MappingCode, x) -> VertexMapping:
    """Pairs whose bit is set. ``.complete`` flags a bijection."""
    x = _check(code, x)
    return VertexMapping(tuple(code.pairs[k] for k in np.flatnonzero(x)), code.n)


def encode_mapping(code: MappingCode, m: VertexMapping) -> np.ndarray:
    """Bit vector selecting the pairs of ``m``; raises if a pair is pruned."""
    x = np.zeros(code.L, dtype=np.int8)
    for p in m.pairs:
        x[code.index_of[p]] = 1
    return x


class PenaltyState:
    """Running penalty of one bit configuration with O(1) flip deltas.

    Keeps row/column occupation counts and the interaction field
    ``h = Q x``. Since ``Q`` has a zero diagonal, flipping bit ``k`` by
    ``d = +-1`` changes the quadratic part by ``2 d h_k``.
    """

    def __init__(self, code: MappingCode, x):
        self.code = code
        self.x = np.array(_check(code, x), dtype=np.int64)
        self.rows = np.bincount(code.pair_i, weights=self.x, minlength=code.n).astype(np.int64)
        self.cols = np.bincount(code.pair_j, weights=self.x, minlength=code.n).astype(np.int64)
        self.field = code.q @ self.x
        self.energy = penalty(code, self.x)
        self._pi = code.pair_i.tolist()
        self._pj = code.pair_j.tolist()

    def delta(self, k: int) -> int:
        d = 1 - 2 * int(self.x[k])
        r = int(self.rows[self._pi[k]])
        c = int(self.cols[self._pj[k]])
        return 2 * d * (r - 1 + c - 1) + 2 + 2 * d * int(self.field[k])

    def flip(self, k: int, delta: int | None = None) -> None:
        if delta is None:
            delta = self.delta(k)
        d = 1 - 2 * int(self.x[k])
        self.x[k] += d
        self.rows[self._pi[k]] += d
        self.cols[self._pj[k]] += d
        self.field += d * self.code.q[k]
        self.energy += delta
