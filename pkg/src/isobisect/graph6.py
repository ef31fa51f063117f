"""graph6 reading and writing (McKay's formats.txt, undirected simple graphs)."""
from __future__ import annotations

from collections.abc import Iterable, Iterator
from typing import TextIO

from .graph import CubicGraph, Graph, GraphError

HEADER = ">>graph6<<"


class Graph6Error(ValueError):
    pass


def _encode_n(n: int) -> str:
    if n < 0:
        raise Graph6Error("negative vertex count")
    if n <= 62:
        return chr(63 + n)
    if n <= 258047:
        return "~" + "".join(chr(63 + ((n >> s) & 63)) for s in (12, 6, 0))
    if n <= 68719476735:
        return "~~" + "".join(chr(63 + ((n >> s) & 63)) for s in (30, 24, 18, 12, 6, 0))
    raise Graph6Error("vertex count too large for graph6")


def _decode_n(data: bytes) -> tuple[int, int]:
    """Vertex count and the offset where the edge bits start."""
    if not data:
        raise Graph6Error("empty graph6 string")
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        chunk, off = data[2:8], 8
        width = 6
    else:
        chunk, off = data[1:4], 4
        width = 3
    if len(chunk) < width:
        raise Graph6Error("truncated vertex count")
    n = 0
    for c in chunk:
        n = (n << 6) | (c - 63)
    return n, off


def parse_graph6(text: str | bytes, cubic: bool = False) -> Graph:
    """Decode one graph6 line. With ``cubic=True`` the result must be 3-regular."""
    if isinstance(text, str):
        text = text.encode("ascii")
    s = text.strip()
    if s.startswith(HEADER.encode()):
        s = s[len(HEADER):]
    if any(c < 63 or c > 126 for c in s):
        raise Graph6Error(f"illegal character in graph6 string {s[:20]!r}")
    n, off = _decode_n(s)
    body = s[off:]
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    if len(body) != need:
        raise Graph6Error(f"graph6 body has {len(body)} bytes, expected {need} for n={n}")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = body[k // 6] - 63
            if (byte >> (5 - k % 6)) & 1:
                edges.append((i, j))
            k += 1
    try:
        g = Graph.from_edges(n, edges)
        return CubicGraph(g.adj) if cubic else g
    except GraphError as exc:
        raise Graph6Error(str(exc)) from exc


def encode_graph6(g: Graph, header: bool = False) -> str:
    n = g.n
    bits = []
    for j in range(1, n):
        nbrs = g.adj[j]
        for i in range(j):
            bits.append(1 if i in nbrs else 0)
    bits.extend([0] * (-len(bits) % 6))
    body = "".join(
        chr(63 + int("".join(map(str, bits[k : k + 6])), 2)) for k in range(0, len(bits), 6)
    )
    return (HEADER if header else "") + _encode_n(n) + body


def iter_graph6(lines: Iterable[str], cubic: bool = False) -> Iterator[Graph]:
    for line in lines:
        line = line.strip()
        if line:
            yield parse_graph6(line, cubic=cubic)


def read_graph6_file(fh: TextIO, cubic: bool = False) -> list[Graph]:
    return list(iter_graph6(fh, cubic=cubic))
