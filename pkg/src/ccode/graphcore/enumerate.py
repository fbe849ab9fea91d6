"""Exhaustive generation of simple graphs and of orientations of an edge set."""

from __future__ import annotations

from typing import Callable, Iterator, Optional

from ..errors import ResourceLimitError, ValidationError
from .canon import canonical_graph, canonical_label
from .model import OrientedGraph, SimpleGraph

MAX_ENUM_VERTICES = 10
MAX_ORIENT_EDGES = 30


def extend_level(level, accept: Optional[Callable[[SimpleGraph], bool]] = None) -> dict:
    """One-vertex extensions of every graph in ``level``, deduplicated.

    ``level`` is an iterable of canonical graphs on k vertices.  Returns a
    dict mapping canonical label to canonical graph on k+1 vertices.  When
    ``accept`` is a hereditary property, every accepted graph on k+1 vertices
    is produced provided ``level`` holds all accepted graphs on k vertices.
    """
    out = {}
    for g in level:
        for mask in range(1 << g.n):
            h = g.add_vertex(mask)
            if accept is not None and not accept(h):
                continue
            lab = canonical_label(h)
            if lab not in out:
                out[lab] = canonical_graph(h)
    return out


def graph_levels(n_max: int, accept=None) -> Iterator[tuple[int, list[SimpleGraph]]]:
    """Yield ``(k, graphs)`` for k = 1..n_max, graphs sorted by canonical label."""
    level = {canonical_label(SimpleGraph(1, (0,))): SimpleGraph(1, (0,))}
    for k in range(1, n_max + 1):
        if k > 1:
            level = extend_level(level.values(), accept)
        yield k, [level[lab] for lab in sorted(level)]


def enumerate_simple_graphs(n: int, accept=None) -> Iterator[SimpleGraph]:
    """One canonical representative per isomorphism class on ``n`` vertices,
    excluding the complete and edgeless graphs."""
    if n < 1:
        raise ValidationError("n must be positive")
    if n > MAX_ENUM_VERTICES:
        raise ResourceLimitError(f"enumeration limited to n <= {MAX_ENUM_VERTICES}")
    for k, graphs in graph_levels(n, accept):
        if k == n:
            for g in graphs:
                if not (g.is_complete() or g.is_edgeless()):
                    yield g


def gray_code(m: int, part: Optional[tuple[int, int]] = None) -> Iterator[tuple[int, int]]:
    """Yield ``(code, flipped_bit)`` over all m-bit Gray codes.

    ``part=(i, k)`` restricts to the i-th of k equal contiguous blocks (k a
    power of two dividing 2**m); blocks are independent and restartable.
    ``flipped_bit`` is -1 for the first code of a block.
    """
    total = 1 << m
    lo, hi = 0, total
    if part is not None:
        i, k = part
        if k <= 0 or k & (k - 1) or total % k or not 0 <= i < k:
            raise ValidationError(f"invalid partition {part} for {m} bits")
        lo, hi = i * total // k, (i + 1) * total // k
    prev = None
    for t in range(lo, hi):
        code = t ^ (t >> 1)
        flipped = -1 if prev is None else (code ^ prev).bit_length() - 1
        prev = code
        yield code, flipped


def orientation_from_mask(n: int, edges, mask: int) -> OrientedGraph:
    """Bit k clear orients edge (u, v), u < v, as u -> v; set as v -> u."""
    out = [0] * n
    for k, (u, v) in enumerate(edges):
        if mask >> k & 1:
            out[v] |= 1 << u
        else:
            out[u] |= 1 << v
    return OrientedGraph._trusted(n, tuple(out))


def enumerate_orientations(g: SimpleGraph, dedup: bool = False, part=None) -> Iterator[OrientedGraph]:
    """Every orientation of the edges of ``g`` in Gray-code order.

    With ``dedup`` only the first orientation of each digraph isomorphism
    class is yielded.
    """
    edges = g.edges()
    if len(edges) > MAX_ORIENT_EDGES:
        raise ResourceLimitError(f"{len(edges)} edges exceed the limit of {MAX_ORIENT_EDGES}")
    seen = set()
    for code, _ in gray_code(len(edges), part):
        o = orientation_from_mask(g.n, edges, code)
        if dedup:
            lab = canonical_label(o)
            if lab in seen:
                continue
            seen.add(lab)
        yield o
