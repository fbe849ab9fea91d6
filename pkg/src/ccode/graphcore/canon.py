"""Canonical labeling by equitable refinement and individualization.

The search tree is the usual one: refine the ordered partition, pick the
first non-singleton cell, individualize each of its vertices in turn and
recurse.  Every leaf is a vertex ordering; the canonical ordering is the one
whose relabeled adjacency matrix is lexicographically largest.  Leaves that
reproduce an earlier certificate yield automorphisms, which prune children
lying in an already explored orbit of the pointwise stabilizer of the path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .formats import emit_digraph6, emit_graph6
from ..errors import ValidationError
from .model import MAX_VERTICES, OrientedGraph, SimpleGraph

Graph = Union[SimpleGraph, OrientedGraph]


@dataclass(frozen=True, order=True)
class CanonicalForm:
    label: bytes

    def __str__(self):
        return self.label.decode("ascii")


def _value_matrix(g: Graph) -> list[tuple[int, ...]]:
    n = g.n
    if isinstance(g, SimpleGraph):
        return [tuple((r >> j) & 1 for j in range(n)) for r in g.rows]
    out = g.out
    return [
        tuple(((out[i] >> j) & 1) | (((out[j] >> i) & 1) << 1) for j in range(n))
        for i in range(n)
    ]


def _refine(val, n, cells):
    while True:
        cell_of = [0] * n
        for ci, c in enumerate(cells):
            for v in c:
                cell_of[v] = ci
        new = []
        changed = False
        for c in cells:
            if len(c) == 1:
                new.append(c)
                continue
            groups = {}
            for v in c:
                row = val[v]
                sig = tuple(sorted(cell_of[u] * 4 + row[u] for u in range(n) if row[u]))
                groups.setdefault(sig, []).append(v)
            if len(groups) == 1:
                new.append(c)
            else:
                changed = True
                new.extend(groups[k] for k in sorted(groups))
        cells = new
        if not changed:
            return cells


def _orbit_roots(auts, prefix, n):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in auts:
        if all(g[p] == p for p in prefix):
            for v in range(n):
                a, b = find(v), find(g[v])
                if a != b:
                    parent[max(a, b)] = min(a, b)
    return find


def canonical_permutation(g: Graph) -> list[int]:
    """Ordering ``perm`` such that ``g.relabel(perm)`` is the canonical graph."""
    n = g.n
    if n > MAX_VERTICES:
        raise ValidationError(f"canonical labeling supports at most {MAX_VERTICES} vertices, got {n}")
    val = _value_matrix(g)
    state = {"first": None, "best": None}
    auts: list[list[int]] = []

    def leaf(cells):
        perm = [c[0] for c in cells]
        cert = tuple(val[perm[a]][perm[b]] for a in range(n) for b in range(n))
        first, best = state["first"], state["best"]
        if first is None:
            state["first"] = state["best"] = (cert, perm)
            return
        for ref in (first, best):
            if cert == ref[0]:
                gamma = [0] * n
                for k in range(n):
                    gamma[ref[1][k]] = perm[k]
                auts.append(gamma)
                return
        if cert > best[0]:
            state["best"] = (cert, perm)

    def search(cells, prefix):
        ti = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if ti is None:
            leaf(cells)
            return
        target = sorted(cells[ti])
        explored: list[int] = []
        for v in target:
            if explored:
                find = _orbit_roots(auts, prefix, n)
                rv = find(v)
                if any(find(u) == rv for u in explored):
                    continue
            explored.append(v)
            rest = [u for u in cells[ti] if u != v]
            child = cells[:ti] + [[v], rest] + cells[ti + 1:]
            search(_refine(val, n, child), prefix + [v])

    search(_refine(val, n, [list(range(n))]), [])
    return state["best"][1]


def canonical_graph(g: Graph) -> Graph:
    return g.relabel(canonical_permutation(g))


def canonical_label(g: Graph) -> CanonicalForm:
    """Label equal for two graphs iff they are isomorphic (digraphs carry a '&' prefix)."""
    c = canonical_graph(g)
    text = emit_graph6(c) if isinstance(c, SimpleGraph) else emit_digraph6(c)
    return CanonicalForm(text.encode("ascii"))


def converse_free_label(g: OrientedGraph) -> tuple[CanonicalForm, bool]:
    """Smaller of the labels of ``g`` and its reverse, plus whether they coincide."""
    a = canonical_label(g)
    b = canonical_label(g.reverse())
    return min(a, b), a == b


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return type(g) is type(h) and g.n == h.n and canonical_label(g) == canonical_label(h)


def automorphisms_brute_force(g: Graph) -> list[Sequence[int]]:
    """All automorphisms by exhaustive search; only for tiny graphs in tests."""
    from itertools import permutations

    a = g.adj
    return [p for p in permutations(range(g.n)) if (a[list(p)][:, list(p)] == a).all()]
