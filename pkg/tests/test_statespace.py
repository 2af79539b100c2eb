from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
import itertools

import networkx as nx
import numpy as np
import pytest

from trichain.bounds import psi_prime
from trichain.chains import ChainConfig
from trichain.graph import BadN, VertexClass, from_edge_list, from_graph6, named_graph, to_graph6
from trichain._space import lemma_features
from trichain.moves import BreakMove, apply_move, enumerate_all_moves
from trichain.statespace import (ALPHA_BOUNDS, NotStochastic,
                                 build_transition_graph, check_detailed_balance, diamond_on,
                                 enumerate_states, min_moves, stationary, transition_matrix,
                                 verify_alpha_bounds, verify_irreducibility, verify_lemma_step_bounds)


@lru_cache(maxsize=None)
def count_by_degrees(residual: tuple[int, ...]) -> int:
    """Labeled simple graphs realizing a degree sequence.

    Vertex 0 picks its neighbour set among the others; the count for the rest
    depends only on the multiset of residual degrees, so the key is sorted.
    """
    if not residual:
        return 1
    d, rest = residual[0], residual[1:]
    total = 0
    for nbrs in itertools.combinations(range(len(rest)), d):
        nxt = list(rest)
        for i in nbrs:
            if nxt[i] == 0:
                break
            nxt[i] -= 1
        else:
            total += count_by_degrees(tuple(sorted(nxt, reverse=True)))
    return total


def test_degree_dp_on_known_small_cases():
    assert count_by_degrees((1, 1)) == 1
    assert count_by_degrees((2, 2, 2)) == 1
    assert count_by_degrees((2,) * 4) == 3
    assert count_by_degrees((3,) * 4) == 1


@pytest.mark.parametrize("n", [4, 6, 8, 10])
def test_state_counts_match_degree_dp(n):
    assert len(enumerate_states(n)) == count_by_degrees((3,) * n)


def test_n6_split_by_triangles(space6):
    d = space6.triangle_counts()
    assert len(space6) == 70
    assert np.bincount(d).tolist() == [10, 0, 60]


def test_n6_states_are_distinct_valid_graphs(space6):
    seen = set()
    for i in range(len(space6)):
        g = space6.graph(i)
        g.validate()
        seen.add(frozenset(map(frozenset, g.edges())))
    assert len(seen) == 70
    assert np.all(np.diff(space6.states) > 0)


def test_bad_orders():
    for n in (2, 5, 12):
        with pytest.raises(BadN):
            enumerate_states(n)


def test_index_lookup(space6, prism):
    i = space6.index(prism)
    assert space6.graph(i) == prism
    assert space6.index(prism.key()) == i
    with pytest.raises(KeyError):
        space6.index(0)


def test_graph6_dump_matches_encoder(space6):
    lines = space6.graph6_lines().decode().splitlines()
    assert len(lines) == 70
    for i in (0, 17, 69):
        assert lines[i].encode() == to_graph6(space6.graph(i))
        assert from_graph6(lines[i]) == space6.graph(i)


def test_gstar_is_symmetric(gstar6, gstar8):
    assert gstar6.is_symmetric() and gstar8.is_symmetric()


def test_prism_adjacent_to_k33(space6, gstar6, prism):
    k33 = prism.copy()
    apply_move(k33, BreakMove(2, 1, 0, 3, 4))
    assert k33.census.delta == 0
    i, j = space6.index(prism), space6.index(k33)
    assert j not in gstar6.neighbors(space6.index(named_graph("K33")))
    assert j in gstar6.neighbors(i) and i in gstar6.neighbors(j)
    assert gstar6.adjacency[i, j] == len(gstar6.moves_between(i, j)) > 0


def test_gstar_multiplicities_by_move_listing(space6, gstar6):
    a = gstar6.adjacency
    for i in range(0, 70, 7):
        counts = {}
        for _, key in enumerate_all_moves(space6.graph(i)):
            j = space6.index(key)
            counts[j] = counts.get(j, 0) + 1
        row = {int(j): int(v) for j, v in zip(a.indices[a.indptr[i]:a.indptr[i + 1]],
                                             a.data[a.indptr[i]:a.indptr[i + 1]])}
        assert row == counts


def test_connectivity_small():
    rep = verify_irreducibility(build_transition_graph(enumerate_states(4)))
    assert rep.connected and rep.states == 1 and rep.diameter == 0


def test_connectivity_n6_n8(gstar6, gstar8):
    r6 = verify_irreducibility(gstar6)
    assert r6.connected and r6.states == 70 and r6.component_sizes == (70,)
    assert r6.summary().startswith("connected: true, states: 70")
    r8 = verify_irreducibility(gstar8)
    assert r8.connected and r8.states == 19355
    # diameter against networkx
    assert r6.diameter == nx.diameter(nx.from_scipy_sparse_array(gstar6.adjacency))
    assert r8.diameter is not None and r8.diameter >= r6.diameter


def test_streaming_connectivity_agrees_with_materialized(space8):
    rep = verify_irreducibility(build_transition_graph(space8, materialize=False))
    assert rep.connected and rep.component_sizes == (19355,) and rep.diameter is None
    with pytest.raises(ValueError):
        build_transition_graph(space8, materialize=False).neighbors(0)


# -- lemmas -----------------------------------------------------------------------

def test_lemma_step_bounds_n8(gstar8):
    rep = verify_lemma_step_bounds(gstar8)
    assert rep.ok, rep
    assert rep.insertion_cases > 0 and rep.diamond_cases > 0 and rep.k4_cases > 0


def test_lemma_step_bounds_n6(gstar6):
    rep = verify_lemma_step_bounds(gstar6)
    assert rep.insertion_violations == 0 and rep.k4_violations == 0
    assert rep.diamond_cases == 0  # no component reaches order 8


def test_component_needing_two_moves_for_a_diamond():
    # triangle w x y, each hanging off a, b, c; a, b, c all joined to d and e
    w, x, y, a, b, c, d, e = range(8)
    g = from_edge_list(8, [(w, x), (w, y), (x, y), (w, a), (x, b), (y, c),
                           (a, d), (b, d), (c, d), (a, e), (b, e), (c, e)])
    assert min_moves(g, diamond_on((w, x, y))) == 2


def test_min_moves_trivial_cases(prism):
    assert min_moves(prism, lambda g: True) == 0
    assert min_moves(prism, lambda g: g.census.delta == 0, limit=1) == 1
    assert min_moves(named_graph("K4"), lambda g: False) is None


def test_k4_packing_cases_are_vacuous():
    g = named_graph("K4Packing", 8)
    # a triangle of a K4 is not an induced diamond, but its component has order 4
    assert not diamond_on((0, 1, 2))(g)
    triples = np.array(list(itertools.combinations(range(8), 3)), np.int64)
    quads = np.array(list(itertools.combinations(range(8), 4)), np.int64)
    tri_at, tri_big, _, quad_dia, quad_k4 = lemma_features(np.array([g.key()], np.int64), 8, triples, quads)
    assert tri_at.all() and not tri_big.any() and not quad_dia.any()
    assert quad_k4.sum() == 2


# -- stationary laws ----------------------------------------------------------------

def test_chain_i_uniform_at_balanced_p(gstar6):
    p = Fraction(4, 22)
    cfg = ChainConfig("I", p=p, q=1 - p)
    pi = stationary(gstar6, cfg)
    assert abs(pi.sum() - 1) < 1e-12
    assert np.abs(pi - 1 / 70).max() < 1e-9
    assert check_detailed_balance(gstar6, cfg, pi) < 1e-9


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
def test_metropolis_law(gstar6, space6, q):
    cfg = ChainConfig("METROPOLIS", q=q)
    pi = stationary(gstar6, cfg)
    w = q ** (-2.0 * space6.triangle_counts())
    assert np.abs(pi - w / w.sum()).max() < 1e-9
    assert check_detailed_balance(gstar6, cfg, pi) < 1e-9


def test_stationary_residual_n8(gstar8):
    cfg = ChainConfig("II")
    pi = stationary(gstar8, cfg)
    P = gstar8.matrix(cfg)
    assert abs(pi.sum() - 1) < 1e-12 and pi.min() > 0
    assert np.abs(P.T @ pi - pi).sum() < 1e-12


def test_chain_ii_balance_reported(gstar6):
    # measured, not asserted beyond being a finite number
    v = check_detailed_balance(gstar6, ChainConfig("II"))
    assert np.isfinite(v) and v >= 0


@pytest.mark.parametrize("kind", ["O", "I", "II", "METROPOLIS"])
def test_rows_are_stochastic(space8, kind):
    P = transition_matrix(space8, ChainConfig(kind, p=0.3, q=0.6))
    assert np.abs(np.asarray(P.sum(axis=1)).ravel() - 1).max() < 1e-12
    assert P.min() >= 0


def _switch_oracle(g):
    """All simple double edge swaps of g as (new edge set, triangle change)."""
    h = nx.Graph(g.edges())
    base = sum(nx.triangles(h).values()) // 3
    edges = [tuple(e) for e in h.edges()]
    out = []
    for (a, b), (c, d) in itertools.permutations(edges, 2):
        for u, v in ((a, b), (b, a)):
            for w, z in ((c, d), (d, c)):
                if len({u, v, w, z}) < 4:
                    continue
                for new in (((u, w), (v, z)), ((u, z), (v, w))):
                    if any(h.has_edge(*e) for e in new):
                        continue
                    k = h.copy()
                    k.remove_edges_from([(a, b), (c, d)])
                    k.add_edges_from(new)
                    out.append((k, sum(nx.triangles(k).values()) // 3 - base))
    return out


def test_metropolis_row_against_switch_oracle(space6, prism):
    """Each (oriented edge, oriented edge, matching) draw has mass 1/(3 (3n)^2),
    and a proposal changing Delta by dd is kept with probability q^(4 - dd)."""
    n, q = 6, 0.5
    P = transition_matrix(space6, ChainConfig("METROPOLIS", q=q)).toarray()
    i = space6.index(prism)
    row = np.zeros(70)
    per = 1 / (3 * (3 * n) ** 2)
    # the oracle walks ordered pairs of oriented edges and both matchings,
    # which are exactly the draws
    for k, dd in _switch_oracle(prism):
        j = space6.index(from_edge_list(n, k.edges()))
        row[j] += per * q ** (4 - dd)
    row[i] = 1 - row.sum()
    assert np.allclose(P[i], row, atol=1e-13, rtol=0)


def test_transition_matrix_limits(space6):
    with pytest.raises(BadN):
        transition_matrix(enumerate_states(10), ChainConfig("I"))
    cache = {}
    a = transition_matrix(space6, ChainConfig("I"), cache)
    assert transition_matrix(space6, ChainConfig("I"), cache) is a


def test_not_stochastic_is_arithmetic_error():
    assert issubclass(NotStochastic, ArithmeticError)


# -- per-class expectations ---------------------------------------------------------

def test_alpha_bounds_exhaustive_n8(space8):
    rep = verify_alpha_bounds(space8)
    assert rep.ok, rep.violations
    assert rep.states_checked == 19355
    assert rep.max_net[VertexClass.Free] == pytest.approx(8 / 3, abs=1e-12)
    assert rep.max_net[VertexClass.DiamondExternal] <= 1 + 1e-12
    for c, b in ALPHA_BOUNDS.items():
        assert rep.max_net[c] <= b + 1e-12


def test_free_extremum_is_the_cube(space8):
    rep = verify_alpha_bounds(space8)
    assert rep.free_tallies == (3, 0, 6, 0)
    assert psi_prime(*rep.free_tallies) == Fraction(8, 3)
    s, v = rep.free_extremal
    g = nx.Graph(space8.graph(s).edges())
    assert nx.is_isomorphic(g, nx.hypercube_graph(3))


def test_alpha_bounds_sampled_n6(space6):
    rep = verify_alpha_bounds(space6, sample=30, seed=1)
    assert rep.states_checked == 30 and rep.ok
    full = verify_alpha_bounds(space6)
    # K33 is the only triangle-free state at n = 6; every Q_v gives 2 triangles
    assert full.max_net[VertexClass.Free] == pytest.approx(2.0)


def test_alpha_bounds_sampled_n10():
    rep = verify_alpha_bounds(enumerate_states(10), sample=100_000, seed=3)
    assert rep.states_checked == 100_000
    assert rep.ok, rep.violations
