"""graph6 and digraph6 text encodings (single-byte size field, n <= 62)."""

from __future__ import annotations

from ..errors import ParseError, ValidationError
from .model import MAX_VERTICES, OrientedGraph, SimpleGraph

GRAPH6_HEADER = ">>graph6<<"
DIGRAPH6_HEADER = ">>digraph6<<"


def _encode_bits(bits: list[int]) -> str:
    bits = bits + [0] * (-len(bits) % 6)
    out = []
    for k in range(0, len(bits), 6):
        v = 0
        for b in bits[k:k + 6]:
            v = (v << 1) | b
        out.append(chr(v + 63))
    return "".join(out)


def _decode_bits(body: str, need: int, base_offset: int) -> list[int]:
    want_chars = -(-need // 6)
    if len(body) != want_chars:
        raise ParseError(
            f"expected {want_chars} data bytes, found {len(body)}",
            base_offset + min(len(body), want_chars),
        )
    bits = []
    for k, ch in enumerate(body):
        v = ord(ch) - 63
        if not 0 <= v < 64:
            raise ParseError(f"byte {ch!r} outside the printable range 63..126", base_offset + k)
        bits.extend((v >> s) & 1 for s in range(5, -1, -1))
    if any(bits[need:]):
        raise ParseError("nonzero padding bits", base_offset + len(body) - 1)
    return bits[:need]


def _read_size(text: str, offset: int) -> int:
    if offset >= len(text):
        raise ParseError("missing size byte", offset)
    v = ord(text[offset]) - 63
    if v == 63:
        raise ParseError(f"multi-byte sizes unsupported (n > 62; limit is {MAX_VERTICES})", offset)
    if not 0 <= v < 63:
        raise ParseError(f"invalid size byte {text[offset]!r}", offset)
    if not 1 <= v <= MAX_VERTICES:
        raise ParseError(f"vertex count {v} outside 1..{MAX_VERTICES}", offset)
    return v


def parse_graph6(text: str) -> SimpleGraph:
    s = text.rstrip("\n")
    start = len(GRAPH6_HEADER) if s.startswith(GRAPH6_HEADER) else 0
    if start == len(s):
        raise ParseError("empty graph6 string", start)
    if s[start] == "&":
        raise ParseError("digraph6 string passed to the graph6 parser", start)
    n = _read_size(s, start)
    bits = _decode_bits(s[start + 1:], n * (n - 1) // 2, start + 1)
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    return SimpleGraph(n, tuple(rows))


def _check_size(g) -> None:
    if g.n > MAX_VERTICES:
        raise ValidationError(f"serialization supports at most {MAX_VERTICES} vertices, got {g.n}")


def emit_graph6(g: SimpleGraph) -> str:
    _check_size(g)
    bits = [(g.rows[i] >> j) & 1 for j in range(1, g.n) for i in range(j)]
    return chr(g.n + 63) + _encode_bits(bits)


def parse_digraph6(text: str) -> OrientedGraph:
    """Parse a digraph6 string; raises if it contains a symmetric arc pair."""
    s = text.rstrip("\n")
    start = len(DIGRAPH6_HEADER) if s.startswith(DIGRAPH6_HEADER) else 0
    if start == len(s):
        raise ParseError("empty digraph6 string", start)
    if s[start] != "&":
        raise ParseError("digraph6 string must start with '&'", start)
    n = _read_size(s, start + 1)
    bits = _decode_bits(s[start + 2:], n * n, start + 2)
    rows = []
    for i in range(n):
        r = 0
        for j in range(n):
            if bits[i * n + j]:
                r |= 1 << j
        rows.append(r)
    try:
        return OrientedGraph(n, tuple(rows))
    except ValidationError as exc:
        raise ValidationError(f"not an oriented graph: {exc}") from exc


def emit_digraph6(g: OrientedGraph) -> str:
    _check_size(g)
    bits = [(g.out[i] >> j) & 1 for i in range(g.n) for j in range(g.n)]
    return "&" + chr(g.n + 63) + _encode_bits(bits)
