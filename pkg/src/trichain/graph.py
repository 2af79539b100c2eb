"""Labeled simple cubic graphs: representation, validation, I/O and motif census."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K


class GraphError(ValueError):
    """Base class for rejected graph input."""


class NotCubic(GraphError):
    pass


class NotSimple(GraphError):
    pass


class OddN(GraphError):
    pass


class BadN(GraphError):
    pass


class MalformedGraph6(GraphError):
    pass


class VertexClass(enum.IntEnum):
    """Motif class of a vertex; values match the kernel codes."""

    Free = K.FREE
    IsolatedTriangle = K.ISO
    DiamondExternal = K.DIA_EXT
    DiamondInternal = K.DIA_INT
    Tetrahedron = K.TET


@dataclass(frozen=True)
class MotifCensus:
    delta: int
    iso: int
    dia: int
    tet: int
    free: int

    def identities_hold(self, n: int) -> bool:
        return (self.delta == self.iso + 2 * self.dia + 4 * self.tet
                and n == self.free + 3 * self.iso + 4 * self.dia + 4 * self.tet)

    @classmethod
    def from_counts(cls, counts) -> "MotifCensus":
        """From ``[delta, h0, h1, h2, h3]``, hk = vertices on k triangles."""
        h0, h1, h2, h3 = (int(c) for c in counts[1:5])
        return cls(delta=int(counts[0]), iso=(h1 - h2) // 3, dia=h2 // 2, tet=h3 // 4, free=h0)


class CubicGraph:
    """Mutable labeled simple 3-regular graph on ``0..n-1``.

    ``adj`` is an ``(n, 3)`` int64 array of sorted neighbour lists.  The
    per-vertex triangle tallies and their histogram are kept current by
    every mutation that goes through :mod:`trichain.moves` or the chain
    kernels.
    """

    __slots__ = ("adj", "_tri", "_counts")

    def __init__(self, adj, *, validate: bool = True):
        adj = np.array(adj, dtype=np.int64, copy=True, order="C")
        if adj.ndim != 2 or adj.shape[1] != 3:
            raise NotCubic("adjacency must have exactly 3 entries per vertex")
        adj.sort(axis=1)
        self.adj = adj
        if validate:
            self.validate()
        n = adj.shape[0]
        self._tri = np.zeros(n, np.int64)
        self._counts = np.zeros(5, np.int64)
        K.recount(self.adj, self._tri, self._counts)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def num_edges(self) -> int:
        return 3 * self.n // 2

    def neighbors(self, v: int) -> tuple[int, int, int]:
        a, b, c = self.adj[v]
        return int(a), int(b), int(c)

    def has_edge(self, u: int, v: int) -> bool:
        row = self.adj[u]
        return bool(row[0] == v or row[1] == v or row[2] == v)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, int(v)) for u in range(self.n) for v in self.adj[u] if u < v]

    def key(self) -> int:
        """Edge-set bitmask over the row-major upper-triangle pair index."""
        n = self.n
        out = 0
        for u, v in self.edges():
            out |= 1 << (u * n - u * (u + 1) // 2 + (v - u - 1))
        return out

    def copy(self) -> "CubicGraph":
        g = CubicGraph.__new__(CubicGraph)
        g.adj = self.adj.copy()
        g._tri = self._tri.copy()
        g._counts = self._counts.copy()
        return g

    @property
    def census(self) -> MotifCensus:
        """The incrementally maintained census."""
        return MotifCensus.from_counts(self._counts)

    def vertex_class(self, v: int) -> VertexClass:
        return VertexClass(int(K.vertex_class(self.adj, self._tri, v)))

    def triangle_tallies(self) -> np.ndarray:
        """Maintained number of triangles at each vertex (read-only view)."""
        out = self._tri.view()
        out.flags.writeable = False
        return out

    def validate(self) -> None:
        adj = self.adj
        n = adj.shape[0]
        if n < 4 or n % 2:
            raise OddN(f"n must be even and >= 4, got {n}")
        if adj.min() < 0 or adj.max() >= n:
            raise NotCubic("neighbour id out of range")
        if np.any(adj == np.arange(n)[:, None]):
            raise NotSimple("self-loop")
        if np.any(adj[:, 0] == adj[:, 1]) or np.any(adj[:, 1] == adj[:, 2]):
            raise NotSimple("repeated neighbour")
        for u in range(n):
            for v in adj[u]:
                if u not in adj[v]:
                    raise NotCubic(f"asymmetric adjacency at {u}-{v}")

    def __eq__(self, other) -> bool:
        return isinstance(other, CubicGraph) and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash(self.adj.tobytes())

    def __repr__(self) -> str:
        c = self.census
        return f"CubicGraph(n={self.n}, delta={c.delta})"


def from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> CubicGraph:
    if n < 4 or n % 2:
        raise OddN(f"n must be even and >= 4, got {n}")
    nbrs: list[list[int]] = [[] for _ in range(n)]
    seen = set()
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise NotCubic(f"edge {u}-{v} outside vertex range")
        if u == v:
            raise NotSimple(f"self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise NotSimple(f"parallel edge {key}")
        seen.add(key)
        nbrs[u].append(v)
        nbrs[v].append(u)
    bad = [v for v in range(n) if len(nbrs[v]) != 3]
    if bad:
        raise NotCubic(f"vertex {bad[0]} has degree {len(nbrs[bad[0]])}")
    return CubicGraph(nbrs, validate=False)


def triangles_at(g: CubicGraph, v: int) -> int:
    a, b, c = g.neighbors(v)
    return int(g.has_edge(a, b)) + int(g.has_edge(a, c)) + int(g.has_edge(b, c))


def full_census(g: CubicGraph) -> tuple[MotifCensus, list[VertexClass]]:
    """Recount the census from scratch, ignoring the maintained tallies."""
    tri = np.zeros(g.n, np.int64)
    cls = np.zeros(g.n, np.int8)
    counts = np.zeros(5, np.int64)
    K.recount(g.adj, tri, counts)
    K.classify(g.adj, tri, cls)
    return MotifCensus.from_counts(counts), [VertexClass(int(c)) for c in cls]


# -- named graphs ----------------------------------------------------------------

def _k4_block(base: int) -> list[tuple[int, int]]:
    return [(base + i, base + j) for i in range(4) for j in range(i + 1, 4)]


def _prism_block(base: int) -> list[tuple[int, int]]:
    e = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
    return [(base + u, base + v) for u, v in e]


def named_graph(kind: str, n: int | None = None) -> CubicGraph:
    """Fixed labelings of a few cubic graphs.

    K4           complete graph on 0..3
    K33          parts {0, 1, 2} and {3, 4, 5}
    Prism        triangles {0, 1, 2}, {3, 4, 5}, spokes i -- i+3
    Q3           vertices are 3-bit words, edges join words at Hamming distance 1
    K4Packing    n/4 disjoint K4 on blocks {4k .. 4k+3}; n % 4 == 0
    MaxTriangle  K4Packing, or for n % 4 == 2 one Prism on 0..5 then K4 blocks
    PrismPacking disjoint prisms on blocks of 6, remainder filled with K4 blocks
    Ladder       circular ladder: cycles 0..h-1 and h..2h-1 with rungs i -- i+h,
                 h = n/2 >= 4; triangle-free
    """
    key = kind.lower().replace("_", "").replace("-", "")
    if key == "k4":
        return from_edge_list(4, _k4_block(0))
    if key == "k33":
        return from_edge_list(6, [(i, j) for i in range(3) for j in range(3, 6)])
    if key == "prism":
        return from_edge_list(6, _prism_block(0))
    if key == "q3":
        return from_edge_list(8, [(u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < u ^ (1 << b)])
    if n is None:
        raise BadN(f"{kind} needs a vertex count")
    if n < 4 or n % 2:
        raise BadN(f"n must be even and >= 4, got {n}")
    if key == "k4packing":
        if n % 4:
            raise BadN("K4Packing needs n divisible by 4")
        return from_edge_list(n, [e for b in range(0, n, 4) for e in _k4_block(b)])
    if key == "maxtriangle":
        if n % 4 == 0:
            return named_graph("K4Packing", n)
        return from_edge_list(n, _prism_block(0) + [e for b in range(6, n, 4) for e in _k4_block(b)])
    if key == "prismpacking":
        k4s = {0: 0, 2: 2, 4: 1}[n % 6]
        if 4 * k4s > n:
            raise BadN(f"no prism packing on {n} vertices")
        prisms = (n - 4 * k4s) // 6
        edges = [e for i in range(prisms) for e in _prism_block(6 * i)]
        edges += [e for i in range(k4s) for e in _k4_block(6 * prisms + 4 * i)]
        return from_edge_list(n, edges)
    if key == "ladder":
        h = n // 2
        if h < 4:
            raise BadN("Ladder needs n >= 8")
        edges = [(i, (i + 1) % h) for i in range(h)]
        edges += [(h + i, h + (i + 1) % h) for i in range(h)]
        edges += [(i, i + h) for i in range(h)]
        return from_edge_list(n, edges)
    raise ValueError(f"unknown graph kind {kind!r}")


# -- graph6 -------------------------------------------------------------------------

def _encode_n(n: int) -> bytes:
    if n <= 62:
        return bytes([63 + n])
    if n <= 258047:
        return bytes([126, 63 + (n >> 12 & 63), 63 + (n >> 6 & 63), 63 + (n & 63)])
    raise ValueError("graph6 supports n <= 258047 here")


def to_graph6(g: CubicGraph) -> bytes:
    """Header-free graph6 encoding of ``g``."""
    n = g.n
    bits = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if g.has_edge(i, j) else 0)
    bits.extend([0] * (-len(bits) % 6))
    body = bytes(63 + int("".join(map(str, bits[k:k + 6])), 2) for k in range(0, len(bits), 6))
    return _encode_n(n) + body


def from_graph6(data: bytes | str) -> CubicGraph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if not data or any(c < 63 or c > 126 for c in data):
        raise MalformedGraph6("graph6 bytes must lie in 63..126")
    if data[0] == 126:
        if len(data) < 4 or data[1] == 126:
            raise MalformedGraph6("unsupported graph6 size header")
        n = (data[1] - 63) << 12 | (data[2] - 63) << 6 | (data[3] - 63)
        body = data[4:]
    else:
        n = data[0] - 63
        body = data[1:]
    nbits = n * (n - 1) // 2
    if len(body) != (nbits + 5) // 6:
        raise MalformedGraph6(f"expected {(nbits + 5) // 6} body bytes for n={n}, got {len(body)}")
    edges = []
    k = 0
    for j in range(1, n):
        for i in range(j):
            byte = body[k // 6] - 63
            if byte >> (5 - k % 6) & 1:
                edges.append((i, j))
            k += 1
    return from_edge_list(n, edges)


# -- edge-list text -----------------------------------------------------------------

def write_edge_list(g: CubicGraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges())


def read_edge_list(text: str, n: int | None = None) -> CubicGraph:
    edges = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        u, v = line.split()
        edges.append((int(u), int(v)))
    if n is None:
        n = 1 + max(max(e) for e in edges) if edges else 0
    return from_edge_list(n, edges)
