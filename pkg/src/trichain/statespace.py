"""Exact analysis of the chains on every labeled cubic graph of a small order.

States are edge bitmasks (see ``_space``) kept in a sorted int64 array, so a
state id is a position in that array and lookup is a binary search.  G*_n,
the graph on states joined by one make or break, is stored as a symmetric
CSR whose values are move multiplicities.  For n = 10 (about 1.1e7 states)
nothing quadratic is built: connectivity runs as a union-find over make
moves, and the per-vertex expectation scan streams over states (optionally a
random sample of them).
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import _space as S
from .chains import ChainConfig
from .graph import BadN, CubicGraph, VertexClass
from .moves import apply_move, enumerate_all_moves

MAX_N = 10
MATERIALIZE_N = 8
ROW_TOL = 1e-12
DENSE_N = 2000

# upper bounds on the mean net triangle change over uniform Q_v, by class
ALPHA_BOUNDS = {
    VertexClass.Free: 8 / 3,
    VertexClass.IsolatedTriangle: 3.0,
    VertexClass.DiamondExternal: 1.0,
    VertexClass.DiamondInternal: 4.0,
}


class NotStochastic(ArithmeticError):
    pass


def _check_n(n: int) -> None:
    if n < 4 or n % 2 or n > MAX_N:
        raise BadN(f"state spaces need n even with 4 <= n <= {MAX_N}, got {n}")


@dataclass
class StateSpace:
    n: int
    states: np.ndarray  # sorted edge bitmasks

    def __len__(self) -> int:
        return int(self.states.shape[0])

    def index(self, key) -> int:
        """State id of an edge bitmask or a graph; KeyError if absent."""
        if isinstance(key, CubicGraph):
            key = key.key()
        i = int(np.searchsorted(self.states, key))
        if i == len(self) or int(self.states[i]) != key:
            raise KeyError(key)
        return i

    def graph(self, i: int) -> CubicGraph:
        _, pu, pv = S.pair_tables(self.n)
        adj = np.empty((self.n, 3), np.int64)
        S.decode(self.states[i], self.n, pu, pv, adj)
        return CubicGraph(adj, validate=False)

    def triangle_counts(self) -> np.ndarray:
        return S.triangle_counts(self.states, self.n)

    def graph6_lines(self) -> bytes:
        return S.graph6_rows(self.states, self.n).tobytes()

    def uniform_counts(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Visits per state id over ``count`` pairing-model samples."""
        ids = np.searchsorted(self.states, S.sample_keys(self.n, count, rng))
        return np.bincount(ids, minlength=len(self))


def enumerate_states(n: int) -> StateSpace:
    _check_n(n)
    return StateSpace(n, S.enumerate_keys(n))


@dataclass
class TransitionStructure:
    """G*_n as a symmetric CSR (entry = number of moves joining two states).

    ``adjacency`` is None when the space was too large to materialize; only
    streaming connectivity is available then.
    """

    space: StateSpace
    adjacency: sp.csr_matrix | None
    _matrices: dict = field(default_factory=dict, repr=False)

    def neighbors(self, i: int) -> np.ndarray:
        a = self._require()
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    def is_symmetric(self) -> bool:
        a = self._require()
        return (a != a.T).nnz == 0

    def moves_between(self, i: int, j: int) -> list:
        """Normalized moves taking state i to state j."""
        target = int(self.space.states[j])
        return [m for m, key in enumerate_all_moves(self.space.graph(i)) if key == target]

    def matrix(self, cfg: ChainConfig) -> sp.csr_matrix:
        return transition_matrix(self.space, cfg, cache=self._matrices)

    def _require(self) -> sp.csr_matrix:
        if self.adjacency is None:
            raise ValueError(f"G*_{self.space.n} was not materialized")
        return self.adjacency


def build_transition_graph(space: StateSpace, materialize: bool | None = None) -> TransitionStructure:
    if materialize is None:
        materialize = space.n <= MATERIALIZE_N
    if not materialize:
        return TransitionStructure(space, None)
    src, dst = S.make_edges(space.states, space.n)
    ns = len(space)
    ones = np.ones(2 * src.shape[0], np.int64)
    a = sp.coo_matrix((ones, (np.concatenate([src, dst]), np.concatenate([dst, src]))), shape=(ns, ns))
    a = a.tocsr()
    a.sum_duplicates()
    return TransitionStructure(space, a)


@dataclass(frozen=True)
class ConnectivityReport:
    connected: bool
    states: int
    component_sizes: tuple[int, ...]
    diameter: int | None

    def summary(self) -> str:
        d = "n/a" if self.diameter is None else str(self.diameter)
        return (f"connected: {str(self.connected).lower()}, states: {self.states}, "
                f"components: {len(self.component_sizes)}, diameter: {d}")


def verify_irreducibility(structure: TransitionStructure, diameter: bool = True) -> ConnectivityReport:
    space = structure.space
    ns = len(space)
    if ns == 1:
        return ConnectivityReport(True, 1, (1,), 0)
    if structure.adjacency is None:
        # a subgraph being connected already settles it
        comps, parent = S.union_find_components(space.states, space.n, True)
        if comps > 1:
            comps, parent = S.union_find_components(space.states, space.n, False)
        sizes = tuple(sorted(np.bincount(parent)[np.bincount(parent) > 0].tolist(), reverse=True))
        return ConnectivityReport(comps == 1, ns, sizes, None)
    a = structure.adjacency
    comps, labels = connected_components(a, directed=False)
    sizes = tuple(sorted(np.bincount(labels).tolist(), reverse=True))
    diam = None
    if comps == 1 and diameter:
        diam = int(S.eccentricities(a.indptr.astype(np.int64), a.indices.astype(np.int64)).max())
    return ConnectivityReport(comps == 1, ns, sizes, diam)


# -- chain matrices ---------------------------------------------------------------

_KIND_CODE = {"O": 0, "I": 1, "II": 2, "METROPOLIS": 3}


def transition_matrix(space: StateSpace, cfg: ChainConfig, cache: dict | None = None) -> sp.csr_matrix:
    """Exact one-step matrix of ``cfg``'s chain, assembled from its draw tree.

    Entries sum every path through the sampling procedure that reaches the
    target, so a transition realized by several moves gets all of them.
    """
    if space.n > MATERIALIZE_N:
        raise BadN(f"transition matrices are built for n <= {MATERIALIZE_N}")
    key = (cfg.kind, cfg.p, cfg.q)
    if cache is not None and key in cache:
        return cache[key]
    rows, cols, vals = S.transition_coo(space.states, space.n, _KIND_CODE[cfg.kind], float(cfg.p), float(cfg.q))
    ns = len(space)
    p = sp.csr_matrix((vals, (rows, cols)), shape=(ns, ns))
    p.sum_duplicates()
    err = np.abs(np.asarray(p.sum(axis=1)).ravel() - 1.0).max()
    if err > ROW_TOL:
        raise NotStochastic(f"row sums off by {err:.3g}")
    if cache is not None:
        cache[key] = p
    return p


def stationary(structure: TransitionStructure, cfg: ChainConfig, tol: float = 1e-12,
               max_iter: int = 200000) -> np.ndarray:
    """Stationary vector with ``||pi P - pi||_1 < tol`` by power iteration.

    Every chain here has positive holding mass and a connected G*_n, so the
    iteration converges to the unique stationary law.  Small spaces start
    from a dense solve, which matters when the spectral gap is tiny (a small
    step residual would not by itself mean a small error); larger ones start
    from uniform.
    """
    p = structure.matrix(cfg)
    ns = p.shape[0]
    if ns <= DENSE_N:
        a = p.T.toarray() - np.eye(ns)
        a[0, :] = 1.0
        b = np.zeros(ns)
        b[0] = 1.0
        pi = np.clip(np.linalg.solve(a, b), 0.0, None)
        pi /= pi.sum()
    else:
        pi = np.full(ns, 1.0 / ns)
    pt = p.T.tocsr()
    for _ in range(max_iter):
        nxt = pt @ pi
        nxt /= nxt.sum()
        res = np.abs(nxt - pi).sum()
        pi = nxt
        if res < tol:
            return pi
    raise ArithmeticError(f"power iteration did not reach residual {tol}")


def check_detailed_balance(structure: TransitionStructure, cfg: ChainConfig, pi: np.ndarray | None = None) -> float:
    """max |pi(G) P(G, G') - pi(G') P(G', G)| over all state pairs."""
    if pi is None:
        pi = stationary(structure, cfg)
    flow = sp.diags(pi) @ structure.matrix(cfg)
    diff = (flow - flow.T).tocoo()
    return float(np.abs(diff.data).max()) if diff.nnz else 0.0


# -- lemma step bounds ------------------------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    """Violation counts (zero means the statement held everywhere)."""

    states: int
    insertion_cases: int
    insertion_violations: int
    diamond_cases: int
    diamond_violations: int
    k4_cases: int
    k4_violations: int

    @property
    def ok(self) -> bool:
        return self.insertion_violations == self.diamond_violations == self.k4_violations == 0


def _within_two(a: sp.csr_matrix, target: np.ndarray) -> np.ndarray:
    t = target.astype(np.int32)
    r1 = (t + (a @ t)) > 0
    r2 = (r1 + (a @ r1.astype(np.int32))) > 0
    return r1, r2


def verify_lemma_step_bounds(structure: TransitionStructure) -> LemmaReport:
    """Check three local step counts over every state.

    insertion  a vertex on no triangle gets one after a single move
    diamond    a triangle inside a component of order >= 8 can, within two
               moves, be completed to an induced diamond (still a triangle)
    K4         a 4-set spanning a diamond becomes a K4 within two moves
    """
    space = structure.space
    a = structure._require()
    a = sp.csr_matrix((np.ones_like(a.data, dtype=np.int32), a.indices, a.indptr), shape=a.shape)
    n = space.n
    triples = np.array(list(itertools.combinations(range(n), 3)), np.int64).reshape(-1, 3)
    quads = np.array(list(itertools.combinations(range(n), 4)), np.int64).reshape(-1, 4)
    tri_at, tri_big, tri_dia, quad_dia, quad_k4 = S.lemma_features(space.states, n, triples, quads)

    one_move = (a @ tri_at.astype(np.int32)) > 0
    ins_cases = ~tri_at
    ins_bad = ins_cases & ~one_move

    _, dia2 = _within_two(a, tri_dia)
    _, k42 = _within_two(a, quad_k4)
    return LemmaReport(
        states=len(space),
        insertion_cases=int(ins_cases.sum()), insertion_violations=int(ins_bad.sum()),
        diamond_cases=int(tri_big.sum()), diamond_violations=int((tri_big & ~dia2).sum()),
        k4_cases=int(quad_dia.sum()), k4_violations=int((quad_dia & ~k42).sum()),
    )


def min_moves(g: CubicGraph, goal: Callable[[CubicGraph], bool], limit: int = 3) -> int | None:
    """Fewest make/break moves from ``g`` to a graph satisfying ``goal`` (BFS)."""
    if goal(g):
        return 0
    seen = {g.key()}
    frontier = deque([(g, 0)])
    while frontier:
        h, d = frontier.popleft()
        if d == limit:
            continue
        for mv, key in enumerate_all_moves(h):
            if key in seen:
                continue
            seen.add(key)
            nxt = h.copy()
            apply_move(nxt, mv)
            if goal(nxt):
                return d + 1
            frontier.append((nxt, d + 1))
    return None


def diamond_on(tri: tuple[int, int, int]) -> Callable[[CubicGraph], bool]:
    """Goal: ``tri`` is a triangle and another vertex meets exactly two of it."""
    a, b, c = tri

    def goal(g: CubicGraph) -> bool:
        if not (g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c)):
            return False
        return any(sum(g.has_edge(u, t) for t in tri) == 2 for u in range(g.n) if u not in tri)

    return goal


# -- per-class expectations over Q_v ----------------------------------------------------

@dataclass(frozen=True)
class AlphaReport:
    states_checked: int
    max_net: dict            # VertexClass -> largest mean net change
    max_created: dict        # VertexClass -> largest mean number created
    vertices_seen: dict      # VertexClass -> (state, vertex) pairs with Q_v nonempty
    empty_q_violations: int  # Delta_v <= 2 but Q_v empty
    free_tallies: tuple[int, int, int, int]  # (i, j, l, m) at the extremal free vertex
    free_extremal: tuple[int, int]           # (state id, vertex)

    @property
    def violations(self) -> dict:
        return {c: self.max_net[c] for c, b in ALPHA_BOUNDS.items()
                if self.vertices_seen[c] and self.max_net[c] > b + 1e-12}

    @property
    def ok(self) -> bool:
        return not self.violations and self.empty_q_violations == 0


def verify_alpha_bounds(space: StateSpace, sample: int | None = None, seed: int = 0) -> AlphaReport:
    """Exact means over uniform Q_v, every state or ``sample`` random states."""
    ns = len(space)
    if sample is None or sample >= ns:
        ids = np.arange(ns, dtype=np.int64)
    else:
        ids = np.sort(np.random.default_rng(seed).choice(ns, size=sample, replace=False)).astype(np.int64)
    max_net, max_created, seen, empty_q, best, bs, bv = S.alpha_scan(space.states, space.n, ids)
    classes = list(VertexClass)[:4]
    return AlphaReport(
        states_checked=len(ids),
        max_net={c: float(max_net[c]) for c in classes},
        max_created={c: float(max_created[c]) for c in classes},
        vertices_seen={c: int(seen[c]) for c in classes},
        empty_q_violations=int(empty_q),
        free_tallies=tuple(int(t) for t in best),
        free_extremal=(int(bs), int(bv)),
    )


# -- exhaustive move checks -----------------------------------------------------------

@dataclass(frozen=True)
class MoveCheckReport:
    makes: int
    breaks: int
    involution_failures: int
    mirror_failures: int
    locality_failures: int
    census_failures: int
    no_triangle_at_v: int

    @property
    def ok(self) -> bool:
        return not (self.involution_failures or self.mirror_failures or self.locality_failures
                    or self.census_failures or self.no_triangle_at_v)


def verify_moves(space: StateSpace) -> MoveCheckReport:
    """Apply every make and break on every state and undo it."""
    return MoveCheckReport(*(int(x) for x in S.move_checks(space.states, space.n)))
