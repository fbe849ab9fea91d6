"""Immutable graph values.

Adjacency is stored as a tuple of row bitmasks: bit ``j`` of ``rows[i]`` is
set when ``i`` is adjacent to (for digraphs: has an arc to) ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import ValidationError

# serialization and canonical labeling stay within 16 vertices; the spectral
# routines accept larger graphs
MAX_VERTICES = 16
MAX_MODEL_VERTICES = 64


def _rows_from_matrix(mat) -> tuple[int, ...]:
    m = np.asarray(mat)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"adjacency must be square, got shape {m.shape}")
    if not np.isin(m, (0, 1)).all():
        raise ValidationError("adjacency entries must be 0 or 1")
    rows = []
    for i in range(m.shape[0]):
        r = 0
        for j in np.flatnonzero(m[i]):
            r |= 1 << int(j)
        rows.append(r)
    return tuple(rows)


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_MODEL_VERTICES:
            raise ValidationError(f"vertex count {self.n} outside 1..{MAX_MODEL_VERTICES}")
        if len(self.rows) != self.n:
            raise ValidationError("row count does not match n")
        full = (1 << self.n) - 1
        for i, r in enumerate(self.rows):
            if r & ~full:
                raise ValidationError(f"row {i} references a vertex >= n")
            if r >> i & 1:
                raise ValidationError(f"loop at vertex {i}")
            for j in range(self.n):
                if (r >> j & 1) != (self.rows[j] >> i & 1):
                    raise ValidationError(f"adjacency not symmetric at ({i}, {j})")

    @classmethod
    def _trusted(cls, n: int, rows: tuple[int, ...]) -> "SimpleGraph":
        # skips validation; callers derive rows from an already valid graph
        g = object.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "rows", rows)
        return g

    @classmethod
    def from_matrix(cls, mat) -> "SimpleGraph":
        rows = _rows_from_matrix(mat)
        return cls(len(rows), rows)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SimpleGraph":
        rows = [0] * n
        for u, v in edges:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @property
    def adj(self) -> np.ndarray:
        return np.array(
            [[(r >> j) & 1 for j in range(self.n)] for r in self.rows], dtype=np.int64
        )

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.rows[i] >> j & 1]

    def num_edges(self) -> int:
        return sum(bin(r).count("1") for r in self.rows) // 2

    def is_complete(self) -> bool:
        return self.num_edges() == self.n * (self.n - 1) // 2

    def is_edgeless(self) -> bool:
        return not any(self.rows)

    def relabel(self, perm: Sequence[int]) -> "SimpleGraph":
        """Graph whose vertex ``k`` is the old vertex ``perm[k]``."""
        inv = [0] * self.n
        for k, v in enumerate(perm):
            inv[v] = k
        rows = []
        for k in range(self.n):
            old = self.rows[perm[k]]
            r = 0
            for j in range(self.n):
                if old >> j & 1:
                    r |= 1 << inv[j]
            rows.append(r)
        return SimpleGraph._trusted(self.n, tuple(rows))

    def add_vertex(self, neighbours: int) -> "SimpleGraph":
        """Append vertex ``n`` adjacent to the vertices set in the bitmask."""
        rows = [r | ((neighbours >> i & 1) << self.n) for i, r in enumerate(self.rows)]
        rows.append(neighbours)
        if self.n + 1 > MAX_MODEL_VERTICES:
            raise ValidationError(f"vertex count {self.n + 1} exceeds {MAX_MODEL_VERTICES}")
        return SimpleGraph._trusted(self.n + 1, tuple(rows))

    def delete_vertex(self, v: int) -> "SimpleGraph":
        keep = [i for i in range(self.n) if i != v]
        return SimpleGraph.from_matrix(self.adj[np.ix_(keep, keep)])


@dataclass(frozen=True)
class OrientedGraph:
    n: int
    out: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_MODEL_VERTICES:
            raise ValidationError(f"vertex count {self.n} outside 1..{MAX_MODEL_VERTICES}")
        if len(self.out) != self.n:
            raise ValidationError("row count does not match n")
        full = (1 << self.n) - 1
        for i, r in enumerate(self.out):
            if r & ~full:
                raise ValidationError(f"row {i} references a vertex >= n")
            if r >> i & 1:
                raise ValidationError(f"loop at vertex {i}")
            for j in range(self.n):
                if r >> j & 1 and self.out[j] >> i & 1:
                    raise ValidationError(f"symmetric arc pair between {i} and {j}")

    @classmethod
    def _trusted(cls, n: int, out: tuple[int, ...]) -> "OrientedGraph":
        g = object.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "out", out)
        return g

    @classmethod
    def from_matrix(cls, mat) -> "OrientedGraph":
        rows = _rows_from_matrix(mat)
        return cls(len(rows), rows)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Sequence[int]]) -> "OrientedGraph":
        rows = [0] * n
        for u, v in arcs:
            rows[u] |= 1 << v
        return cls(n, tuple(rows))

    @property
    def adj(self) -> np.ndarray:
        return np.array(
            [[(r >> j) & 1 for j in range(self.n)] for r in self.out], dtype=np.int64
        )

    def skew(self) -> np.ndarray:
        """The skew-symmetric matrix A - A^T."""
        a = self.adj
        return a - a.T

    def arcs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(self.n) if self.out[i] >> j & 1]

    def num_arcs(self) -> int:
        return sum(bin(r).count("1") for r in self.out)

    def reverse(self) -> "OrientedGraph":
        return OrientedGraph.from_matrix(self.adj.T)

    def relabel(self, perm: Sequence[int]) -> "OrientedGraph":
        a = self.adj
        return OrientedGraph.from_matrix(a[np.ix_(perm, perm)])


def underlying(g: OrientedGraph) -> SimpleGraph:
    rows = [0] * g.n
    for i, r in enumerate(g.out):
        rows[i] |= r
        for j in range(g.n):
            if r >> j & 1:
                rows[j] |= 1 << i
    return SimpleGraph._trusted(g.n, tuple(rows))


def complement(g: SimpleGraph) -> SimpleGraph:
    full = (1 << g.n) - 1
    return SimpleGraph._trusted(g.n, tuple(full & ~r & ~(1 << i) for i, r in enumerate(g.rows)))


def complete_graph(n: int) -> SimpleGraph:
    return complement(SimpleGraph(n, (0,) * n))


def cycle_graph(n: int) -> SimpleGraph:
    return SimpleGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
