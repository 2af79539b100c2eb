"""Make/break triangle switches, path-pairs, incremental census and triple sets.

A make move ``make(y x v w z)`` deletes xy, wz and inserts xw, yz, closing the
triangle v x w.  A break move ``break(v x w, y z)`` deletes xw, yz and inserts
xy, wz.  Mirror images name the same move; ``normalized()`` picks the
lexicographically smaller vertex tuple.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels as K
from .graph import CubicGraph, GraphError, MotifCensus


class InvalidMove(GraphError):
    pass


@dataclass(frozen=True)
class MakeMove:
    y: int
    x: int
    v: int
    w: int
    z: int

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.y, self.x, self.v, self.w, self.z)

    def mirror(self) -> "MakeMove":
        return MakeMove(self.z, self.w, self.v, self.x, self.y)

    def normalized(self) -> "MakeMove":
        m = self.mirror()
        return m if m.as_tuple() < self.as_tuple() else self

    def reverse(self) -> "BreakMove":
        return BreakMove(self.v, self.x, self.w, self.y, self.z)

    def __str__(self) -> str:
        return "M " + " ".join(map(str, self.as_tuple()))


@dataclass(frozen=True)
class BreakMove:
    v: int
    x: int
    w: int
    y: int
    z: int

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.v, self.x, self.w, self.y, self.z)

    def mirror(self) -> "BreakMove":
        return BreakMove(self.v, self.w, self.x, self.z, self.y)

    def normalized(self) -> "BreakMove":
        m = self.mirror()
        return m if m.as_tuple() < self.as_tuple() else self

    def reverse(self) -> MakeMove:
        return MakeMove(self.y, self.x, self.v, self.w, self.z)

    def __str__(self) -> str:
        return "B " + " ".join(map(str, self.as_tuple()))


@dataclass(frozen=True)
class SwitchMove:
    """Plain switch ab, cd -> ac, bd; only produced by the Metropolis chain."""

    a: int
    b: int
    c: int
    d: int

    def __str__(self) -> str:
        return f"S {self.a} {self.b} {self.c} {self.d}"


Move = Union[MakeMove, BreakMove]


def parse_move(line: str) -> Union[MakeMove, BreakMove, SwitchMove]:
    parts = line.split()
    if not parts:
        raise ValueError("empty move line")
    tag, nums = parts[0], [int(p) for p in parts[1:]]
    if tag == "M" and len(nums) == 5:
        return MakeMove(*nums)
    if tag == "B" and len(nums) == 5:
        return BreakMove(*nums)
    if tag == "S" and len(nums) == 4:
        return SwitchMove(*nums)
    raise ValueError(f"cannot parse move {line!r}")


@dataclass(frozen=True)
class PathPair:
    """Unordered pair {v x y, v w z} of 2-paths from a common root."""

    v: int
    x: int
    y: int
    w: int
    z: int

    def __post_init__(self):
        if (self.w, self.z) < (self.x, self.y):
            x, y = self.x, self.y
            object.__setattr__(self, "x", self.w)
            object.__setattr__(self, "y", self.z)
            object.__setattr__(self, "w", x)
            object.__setattr__(self, "z", y)

    def make(self) -> MakeMove:
        return MakeMove(self.y, self.x, self.v, self.w, self.z)


@dataclass(frozen=True)
class LocalDelta:
    """Census change caused by one applied move."""

    delta: int
    iso: int
    dia: int
    tet: int
    free: int
    touched: tuple[int, ...] = ()

    @classmethod
    def between(cls, before: MotifCensus, after: MotifCensus, touched=()) -> "LocalDelta":
        return cls(after.delta - before.delta, after.iso - before.iso, after.dia - before.dia,
                   after.tet - before.tet, after.free - before.free, tuple(touched))

    @classmethod
    def zero(cls) -> "LocalDelta":
        return cls(0, 0, 0, 0, 0)


def make_valid(g: CubicGraph, m: MakeMove) -> bool:
    return bool(K.make_valid(g.adj, *m.as_tuple()))


def break_valid(g: CubicGraph, b: BreakMove) -> bool:
    return bool(K.break_valid(g.adj, *b.as_tuple()))


def _switch_endpoints(move) -> tuple[int, int, int, int]:
    """(a, b, c, d) with the move deleting ab, cd and inserting ac, bd."""
    if isinstance(move, MakeMove):
        return move.x, move.y, move.w, move.z
    if isinstance(move, BreakMove):
        return move.x, move.w, move.y, move.z
    return move.a, move.b, move.c, move.d


def _apply_switch(g: CubicGraph, a: int, b: int, c: int, d: int) -> LocalDelta:
    before = g.census
    aff = np.empty(K.AFF_SIZE, np.int64)
    m, _ = K.switch(g.adj, g._tri, g._counts, a, b, c, d, aff)
    return LocalDelta.between(before, g.census, (int(u) for u in aff[:m]))


def apply_make(g: CubicGraph, m: MakeMove) -> LocalDelta:
    """Apply ``m`` to ``g`` in place."""
    if not make_valid(g, m):
        raise InvalidMove(f"invalid make move {m}")
    return _apply_switch(g, *_switch_endpoints(m))


def apply_break(g: CubicGraph, b: BreakMove) -> LocalDelta:
    """Apply ``b`` to ``g`` in place."""
    if not break_valid(g, b):
        raise InvalidMove(f"invalid break move {b}")
    return _apply_switch(g, *_switch_endpoints(b))


def apply_move(g: CubicGraph, move) -> LocalDelta:
    if isinstance(move, MakeMove):
        return apply_make(g, move)
    if isinstance(move, BreakMove):
        return apply_break(g, move)
    a, b, c, d = _switch_endpoints(move)
    if len({a, b, c, d}) != 4 or not (g.has_edge(a, b) and g.has_edge(c, d)) \
            or g.has_edge(a, c) or g.has_edge(b, d):
        raise InvalidMove(f"invalid switch {move}")
    return _apply_switch(g, a, b, c, d)


def delta_triangles(g: CubicGraph, move: Move) -> int:
    """Triangle change the move would cause; ``g`` is left untouched."""
    ok = make_valid(g, move) if isinstance(move, MakeMove) else break_valid(g, move)
    if not ok:
        raise InvalidMove(f"invalid move {move}")
    dd, _ = K.switch_delta(g.adj.copy(), *_switch_endpoints(move))
    return int(dd)


def triangles_created(g: CubicGraph, move: Move) -> int:
    """Number of triangles through the two inserted edges after the move."""
    _, added = K.switch_delta(g.adj.copy(), *_switch_endpoints(move))
    return int(added)


def enumerate_Qv(g: CubicGraph, v: int) -> list[PathPair]:
    buf = np.empty((12, 4), np.int64)
    k = K.enumerate_qv(g.adj, v, buf)
    return [PathPair(v, int(x), int(y), int(w), int(z)) for x, y, w, z in buf[:k]]


def find_triangle_inserting_make(g: CubicGraph, v: int) -> MakeMove | None:
    """A valid make centred at ``v`` (it always closes the triangle v x w).

    Returns None only when no such move exists, which happens exactly when
    ``v`` lies in a K4 component.
    """
    q = enumerate_Qv(g, v)
    return q[0].make() if q else None


def enumerate_all_moves(g: CubicGraph) -> list[tuple[Move, int]]:
    """Every valid make and break (mirror-deduplicated) with the resulting key."""
    n = g.n
    base = g.key()

    def bit(u, w):
        u, w = min(u, w), max(u, w)
        return 1 << (u * n - u * (u + 1) // 2 + (w - u - 1))

    out: list[tuple[Move, int]] = []
    for v in range(n):
        for pp in enumerate_Qv(g, v):
            m = pp.make().normalized()
            out.append((m, base ^ bit(m.x, m.y) ^ bit(m.w, m.z) ^ bit(m.x, m.w) ^ bit(m.y, m.z)))
    seen = set()
    for v in range(n):
        nb = g.neighbors(v)
        for x in nb:
            for w in nb:
                if x == w or not g.has_edge(x, w):
                    continue
                for y in range(n):
                    for z in g.neighbors(y):
                        b = BreakMove(v, x, w, y, z)
                        if not break_valid(g, b):
                            continue
                        b = b.normalized()
                        if b in seen:
                            continue
                        seen.add(b)
                        out.append((b, base ^ bit(x, w) ^ bit(y, z) ^ bit(x, y) ^ bit(w, z)))
    return out


class TripleSets:
    """S(G) split into make sites M and break sites B, kept in sync with a graph.

    Triple ``(v, a, b)`` (a < b) is vertex v with two of its neighbours; it is a
    break site when ab is an edge.  Storage is an indexable set per side so a
    uniform draw and a membership flip are both O(1).
    """

    def __init__(self, g: CubicGraph):
        self.graph = g
        n3 = 3 * g.n
        self.stat = np.zeros(n3, np.int8)
        self.items = np.zeros((2, n3), np.int64)
        self.pos = np.zeros(n3, np.int64)
        self.size = np.zeros(2, np.int64)
        K.triples_init(g.adj, self.stat, self.items, self.pos, self.size)

    def _triples(self, side: int) -> frozenset:
        adj = self.graph.adj
        out = set()
        for tid in self.items[side, : self.size[side]]:
            v, k = divmod(int(tid), 3)
            a, b = int(adj[v, (k + 1) % 3]), int(adj[v, (k + 2) % 3])
            out.add((v, min(a, b), max(a, b)))
        return frozenset(out)

    @property
    def M(self) -> frozenset:
        return self._triples(0)

    @property
    def B(self) -> frozenset:
        return self._triples(1)

    @property
    def S(self) -> frozenset:
        return self.M | self.B

    def __len__(self) -> int:
        return int(self.size.sum())


def maintain_triples(g: CubicGraph) -> TripleSets:
    return TripleSets(g)


def update_triples(sets: TripleSets, delta: LocalDelta) -> TripleSets:
    """Refresh the triples at the vertices a move touched."""
    aff = np.array(delta.touched, dtype=np.int64)
    K.triples_update(sets.graph.adj, sets.stat, sets.items, sets.pos, sets.size, aff, len(aff))
    return sets
