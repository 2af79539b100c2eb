"""Numba kernels for exhaustive work on all labeled cubic graphs of a given order.

A state is stored as its edge bitmask: bit ``pidx[u, v]`` (u < v, row-major
over the upper triangle) is set iff uv is an edge.  For n <= 10 that is at
most 45 bits, so keys are plain int64 and the state list is a sorted array.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ._kernels import (_oriented_edge, _pick_other, break_valid, enumerate_qv, has_edge,
                       pairing_sample, recount, switch, switch_delta, vertex_class)

_opts = dict(cache=True, nogil=True)


@njit(**_opts)
def pair_tables(n):
    pidx = np.full((n, n), -1, np.int64)
    pu = np.empty(n * (n - 1) // 2, np.int64)
    pv = np.empty(n * (n - 1) // 2, np.int64)
    k = 0
    for u in range(n):
        for v in range(u + 1, n):
            pidx[u, v] = k
            pidx[v, u] = k
            pu[k] = u
            pv[k] = v
            k += 1
    return pidx, pu, pv


@njit(**_opts)
def _walk(n, out, count_only):
    """Depth-first search over edge sets, one edge per level.

    At every level the lowest vertex u still short of degree 3 takes its next
    neighbour v > (its largest neighbour so far), so each graph is produced
    exactly once.
    """
    pidx, pu, pv = pair_tables(n)
    ne = 3 * n // 2
    deg = np.zeros(n, np.int64)
    eu = np.empty(ne, np.int64)
    ev = np.empty(ne, np.int64)
    nxt = np.empty(ne + 1, np.int64)
    cur = np.empty(ne + 1, np.int64)
    found = 0
    key = np.int64(0)
    lev = 0
    cur[0] = 0
    nxt[0] = 1
    while lev >= 0:
        if lev == ne:
            if not count_only:
                out[found] = key
            found += 1
            lev -= 1
            key ^= np.int64(1) << pidx[eu[lev], ev[lev]]
            deg[eu[lev]] -= 1
            deg[ev[lev]] -= 1
            continue
        u = cur[lev]
        v = nxt[lev]
        # u needs 3 - deg[u] more neighbours; leave room for them
        need = 3 - deg[u]
        while v < n and deg[v] >= 3:
            v += 1
        if v >= n or n - v < need:
            lev -= 1
            if lev >= 0:
                key ^= np.int64(1) << pidx[eu[lev], ev[lev]]
                deg[eu[lev]] -= 1
                deg[ev[lev]] -= 1
            continue
        nxt[lev] = v + 1
        key ^= np.int64(1) << pidx[u, v]
        deg[u] += 1
        deg[v] += 1
        eu[lev] = u
        ev[lev] = v
        lev += 1
        if lev < ne:
            w = u
            while deg[w] == 3:
                w += 1
            cur[lev] = w
            nxt[lev] = v + 1 if w == u else w + 1
    return found


@njit(**_opts)
def enumerate_keys(n):
    total = _walk(n, np.empty(0, np.int64), True)
    out = np.empty(total, np.int64)
    _walk(n, out, False)
    out.sort()
    return out


@njit(**_opts)
def decode(key, n, pu, pv, adj):
    """Fill ``adj`` with the sorted neighbour lists of ``key``."""
    fill = np.zeros(n, np.int64)
    k = 0
    while key:
        if key & 1:
            u = pu[k]
            v = pv[k]
            adj[u, fill[u]] = v
            fill[u] += 1
            adj[v, fill[v]] = u
            fill[v] += 1
        key >>= 1
        k += 1
    # pairs come in row-major order, so rows are already ascending


@njit(**_opts)
def switch_key(key, pidx, a, b, c, d):
    """Key after ab, cd -> ac, bd."""
    one = np.int64(1)
    return key ^ (one << pidx[a, b]) ^ (one << pidx[c, d]) ^ (one << pidx[a, c]) ^ (one << pidx[b, d])


@njit(**_opts)
def bucket_index(keys, shift):
    nb = (keys[-1] >> shift) + 2
    start = np.zeros(nb, np.int64)
    for k in keys:
        start[(k >> shift) + 1] += 1
    for i in range(1, nb):
        start[i] += start[i - 1]
    return start


@njit(**_opts)
def find(keys, start, shift, key):
    b = key >> shift
    if b + 1 >= start.shape[0]:
        return -1
    lo = start[b]
    hi = start[b + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < keys.shape[0] and keys[lo] == key:
        return lo
    return -1


@njit(**_opts)
def lookup_all(keys, start, shift, targets):
    out = np.empty(targets.shape[0], np.int64)
    for i in range(targets.shape[0]):
        out[i] = find(keys, start, shift, targets[i])
    return out


# -- G*_n ---------------------------------------------------------------------


@njit(**_opts)
def make_edges(keys, n):
    """``(src, dst)`` for every make move (one per path-pair in some Q_v).

    Every break is the reverse of a make, so these arcs, read in both
    directions, are exactly the edges of G*_n (with move multiplicity).
    """
    pidx, pu, pv = pair_tables(n)
    shift = _shift(n)
    start = bucket_index(keys, shift)
    adj = np.empty((n, 3), np.int64)
    qb = np.empty((12, 4), np.int64)
    cap = keys.shape[0] * 4 * n
    src = np.empty(cap, np.int64)
    dst = np.empty(cap, np.int64)
    m = 0
    for s in range(keys.shape[0]):
        key = keys[s]
        decode(key, n, pu, pv, adj)
        for v in range(n):
            k = enumerate_qv(adj, v, qb)
            for r in range(k):
                t = find(keys, start, shift, switch_key(key, pidx, qb[r, 0], qb[r, 1], qb[r, 2], qb[r, 3]))
                if t < 0:
                    raise RuntimeError("make target missing from the state list")
                if m == cap:
                    cap *= 2
                    src2 = np.empty(cap, np.int64)
                    dst2 = np.empty(cap, np.int64)
                    src2[:m] = src[:m]
                    dst2[:m] = dst[:m]
                    src = src2
                    dst = dst2
                src[m] = s
                dst[m] = t
                m += 1
    return src[:m], dst[:m]


@njit(**_opts)
def _shift(n):
    bits = n * (n - 1) // 2
    return max(bits - 20, 0)


@njit(**_opts)
def _root(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@njit(**_opts)
def union_find_components(keys, n, first_only):
    """Union states along make moves without storing G*_n.

    With ``first_only`` each vertex contributes only its first path-pair, a
    subgraph of G*_n: if that is already connected so is G*_n.
    Returns ``(components, parent)``.
    """
    pidx, pu, pv = pair_tables(n)
    shift = _shift(n)
    start = bucket_index(keys, shift)
    ns = keys.shape[0]
    parent = np.arange(ns)
    comps = ns
    adj = np.empty((n, 3), np.int64)
    qb = np.empty((12, 4), np.int64)
    for s in range(ns):
        key = keys[s]
        decode(key, n, pu, pv, adj)
        for v in range(n):
            k = enumerate_qv(adj, v, qb)
            if first_only and k > 1:
                k = 1
            for r in range(k):
                t = find(keys, start, shift, switch_key(key, pidx, qb[r, 0], qb[r, 1], qb[r, 2], qb[r, 3]))
                if t < 0:
                    raise RuntimeError("make target missing from the state list")
                a = _root(parent, s)
                b = _root(parent, t)
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
                    comps -= 1
    for s in range(ns):
        parent[s] = _root(parent, s)
    return comps, parent


@njit(**_opts)
def eccentricities(indptr, indices):
    """Every vertex's eccentricity in a connected graph by bit-parallel BFS.

    Row v of a bit matrix holds the ball of radius r around v; one sweep ORs
    in the neighbours' balls, taking r to r + 1.  Fine for the ~2e4 states
    of n = 8 (a 50 MB matrix), not meant for anything larger.
    """
    ns = indptr.shape[0] - 1
    words = (ns + 63) // 64
    cur = np.zeros((ns, words), np.uint64)
    nxt = np.empty((ns, words), np.uint64)
    full = np.full(words, np.uint64(0xFFFFFFFFFFFFFFFF))
    if ns % 64:
        full[words - 1] = (np.uint64(1) << np.uint64(ns % 64)) - np.uint64(1)
    ecc = np.full(ns, -1, np.int64)
    for v in range(ns):
        cur[v, v // 64] |= np.uint64(1) << np.uint64(v % 64)
    left = ns
    if ns == 1:
        ecc[0] = 0
        left = 0
    r = 0
    while left > 0:
        r += 1
        changed = False
        for v in range(ns):
            if ecc[v] >= 0:
                continue
            for k in range(words):
                nxt[v, k] = cur[v, k]
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                for k in range(words):
                    nxt[v, k] |= cur[u, k]
        for v in range(ns):
            if ecc[v] >= 0:
                continue
            done = True
            for k in range(words):
                if nxt[v, k] != cur[v, k]:
                    changed = True
                if nxt[v, k] != full[k]:
                    done = False
            if done:
                ecc[v] = r
                left -= 1
        # full rows are left untouched in cur and still read as balls of radius r
        for v in range(ns):
            for k in range(words):
                cur[v, k] = nxt[v, k] if ecc[v] < 0 or ecc[v] == r else cur[v, k]
        if not changed:
            break
    return ecc


# -- exact one-step laws ---------------------------------------------------------
# Each builder walks the chain's full sampling tree from every state and
# returns COO triples (row, col, prob) with duplicate (row, col) already
# merged per row; rejected and no-op leaves land on the diagonal.


@njit(**_opts)
def _flush(rows, cols, vals, m, s, tc, tp, k, stay):
    order = np.argsort(tc[:k], kind="mergesort")
    need = m + k + 1
    if need > rows.shape[0]:
        cap = max(2 * rows.shape[0], need)
        r2 = np.empty(cap, np.int64)
        c2 = np.empty(cap, np.int64)
        v2 = np.empty(cap, np.float64)
        r2[:m] = rows[:m]
        c2[:m] = cols[:m]
        v2[:m] = vals[:m]
        rows, cols, vals = r2, c2, v2
    last = -1
    for i in range(k):
        c = tc[order[i]]
        if c == last:
            vals[m - 1] += tp[order[i]]
        else:
            rows[m] = s
            cols[m] = c
            vals[m] = tp[order[i]]
            m += 1
            last = c
    rows[m] = s
    cols[m] = s
    vals[m] = stay
    m += 1
    return rows, cols, vals, m


@njit(**_opts)
def _triangle_count(adj, tri):
    n = adj.shape[0]
    tot = 0
    for v in range(n):
        a, b, c = adj[v, 0], adj[v, 1], adj[v, 2]
        t = int(has_edge(adj, a, b)) + int(has_edge(adj, a, c)) + int(has_edge(adj, b, c))
        tri[v] = t
        tot += t
    return tot // 3


@njit(**_opts)
def transition_coo(keys, n, kind, p, q):
    """kind: 0 Chain O, 1 Chain I, 2 Chain II, 3 Metropolis switch."""
    pidx, pu, pv = pair_tables(n)
    shift = _shift(n)
    start = bucket_index(keys, shift)
    ns = keys.shape[0]
    adj = np.empty((n, 3), np.int64)
    tri = np.empty(n, np.int64)
    qb = np.empty((12, 4), np.int64)
    local = 27 * n * n + 8
    tc = np.empty(local, np.int64)
    tp = np.empty(local, np.float64)
    rows = np.empty(ns * 16, np.int64)
    cols = np.empty(ns * 16, np.int64)
    vals = np.empty(ns * 16, np.float64)
    m = 0
    n3 = 3 * n
    for s in range(ns):
        key = keys[s]
        decode(key, n, pu, pv, adj)
        _triangle_count(adj, tri)
        k = 0
        stay = 0.0
        if kind == 1:
            for v in range(n):
                for i in range(3):
                    for j in range(3):
                        if i == j:
                            continue
                        x = adj[v, i]
                        w = adj[v, j]
                        base = 1.0 / (6.0 * n)
                        if has_edge(adj, x, w):
                            pr = base / n3
                            for e in range(n3):
                                y, z = _oriented_edge(adj, e)
                                if break_valid(adj, v, x, w, y, z):
                                    tc[k] = find(keys, start, shift, switch_key(key, pidx, x, w, y, z))
                                    tp[k] = pr * q
                                    k += 1
                                    stay += pr * (1.0 - q)
                                else:
                                    stay += pr
                        else:
                            pr = base / 4.0
                            for a in range(2):
                                for b in range(2):
                                    y = _pick_other(adj, x, v, a)
                                    z = _pick_other(adj, w, v, b)
                                    if y == z or has_edge(adj, y, z):
                                        stay += pr
                                    else:
                                        tc[k] = find(keys, start, shift, switch_key(key, pidx, x, y, w, z))
                                        tp[k] = pr * p
                                        k += 1
                                        stay += pr * (1.0 - p)
        elif kind == 2:
            for v in range(n):
                t = tri[v]
                if t > 0:
                    pr = (1.0 / n) * (t / 3.0) / (2.0 * t) / n3
                    for i in range(3):
                        for j in range(3):
                            if i == j:
                                continue
                            x = adj[v, i]
                            w = adj[v, j]
                            if not has_edge(adj, x, w):
                                continue
                            for e in range(n3):
                                y, z = _oriented_edge(adj, e)
                                if break_valid(adj, v, x, w, y, z):
                                    tc[k] = find(keys, start, shift, switch_key(key, pidx, x, w, y, z))
                                    tp[k] = pr
                                    k += 1
                                else:
                                    stay += pr
                if t < 3:
                    nq = enumerate_qv(adj, v, qb)
                    pr = (1.0 / n) * (1.0 - t / 3.0) / nq
                    for r in range(nq):
                        tc[k] = find(keys, start, shift, switch_key(key, pidx, qb[r, 0], qb[r, 1], qb[r, 2], qb[r, 3]))
                        tp[k] = pr
                        k += 1
        elif kind == 0:
            nb = 0
            for v in range(n):
                nb += tri[v]
            nm = n3 - nb
            for v in range(n):
                for kk in range(3):
                    a0 = adj[v, (kk + 1) % 3]
                    b0 = adj[v, (kk + 2) % 3]
                    closed = has_edge(adj, a0, b0)
                    for role in range(2):
                        x = a0 if role == 0 else b0
                        w = b0 if role == 0 else a0
                        if closed:
                            pr = (1.0 - p) / nb / 2.0 / n3
                            for e in range(n3):
                                y, z = _oriented_edge(adj, e)
                                if break_valid(adj, v, x, w, y, z):
                                    tc[k] = find(keys, start, shift, switch_key(key, pidx, x, w, y, z))
                                    tp[k] = pr
                                    k += 1
                                else:
                                    stay += pr
                        else:
                            pr = p / nm / 2.0 / 4.0
                            for a in range(2):
                                for b in range(2):
                                    y = _pick_other(adj, x, v, a)
                                    z = _pick_other(adj, w, v, b)
                                    if y == z or has_edge(adj, y, z):
                                        stay += pr
                                    else:
                                        tc[k] = find(keys, start, shift, switch_key(key, pidx, x, y, w, z))
                                        tp[k] = pr
                                        k += 1
            if nb == 0:
                stay += 1.0 - p
            if nm == 0:
                stay += p
        else:
            pr = 1.0 / (3.0 * n3 * n3)
            for e1 in range(n3):
                x, y = _oriented_edge(adj, e1)
                for e2 in range(n3):
                    w, z = _oriented_edge(adj, e2)
                    if x == w or x == z or y == w or y == z:
                        stay += 3.0 * pr
                        continue
                    stay += pr  # identity matching
                    for mt in range(1, 3):
                        a, b = x, y
                        c = w if mt == 1 else z
                        d = z if mt == 1 else w
                        if has_edge(adj, a, c) or has_edge(adj, b, d):
                            stay += pr
                            continue
                        dd, added = switch_delta(adj, a, b, c, d)
                        acc = q ** (4 - dd)
                        if acc > 1.0:
                            acc = 1.0
                        tc[k] = find(keys, start, shift, switch_key(key, pidx, a, b, c, d))
                        tp[k] = pr * acc
                        k += 1
                        stay += pr * (1.0 - acc)
        for i in range(k):
            if tc[i] < 0:
                raise RuntimeError("transition target missing from the state list")
        rows, cols, vals, m = _flush(rows, cols, vals, m, s, tc, tp, k, stay)
    return rows[:m], cols[:m], vals[:m]


# -- per-state features for the lemma checks ---------------------------------------


@njit(**_opts)
def _component_sizes(adj, comp, size):
    n = adj.shape[0]
    comp[:] = -1
    stack = np.empty(n, np.int64)
    c = 0
    for r in range(n):
        if comp[r] >= 0:
            continue
        comp[r] = c
        top = 1
        stack[0] = r
        cnt = 0
        while top > 0:
            top -= 1
            u = stack[top]
            cnt += 1
            for i in range(3):
                w = adj[u, i]
                if comp[w] < 0:
                    comp[w] = c
                    stack[top] = w
                    top += 1
        size[c] = cnt
        c += 1


@njit(**_opts)
def lemma_features(keys, n, triples, quads):
    """Per-state boolean tables.

    tri_at[s, v]        v lies on a triangle
    tri_big[s, t]       triple t is a triangle in a component of order >= 8
    tri_dia[s, t]       triple t is a triangle and some fourth vertex meets
                        exactly two of its vertices (an induced diamond)
    quad_dia[s, c]      4-set c spans exactly five edges (a diamond)
    quad_k4[s, c]       4-set c is complete (a K4 component)
    """
    pidx, pu, pv = pair_tables(n)
    ns = keys.shape[0]
    nt = triples.shape[0]
    nc = quads.shape[0]
    tri_at = np.zeros((ns, n), np.bool_)
    tri_big = np.zeros((ns, nt), np.bool_)
    tri_dia = np.zeros((ns, nt), np.bool_)
    quad_dia = np.zeros((ns, nc), np.bool_)
    quad_k4 = np.zeros((ns, nc), np.bool_)
    adj = np.empty((n, 3), np.int64)
    tri = np.empty(n, np.int64)
    comp = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    for s in range(ns):
        decode(keys[s], n, pu, pv, adj)
        _triangle_count(adj, tri)
        _component_sizes(adj, comp, size)
        for v in range(n):
            tri_at[s, v] = tri[v] > 0
        for t in range(nt):
            a, b, c = triples[t, 0], triples[t, 1], triples[t, 2]
            if not (has_edge(adj, a, b) and has_edge(adj, a, c) and has_edge(adj, b, c)):
                continue
            tri_big[s, t] = size[comp[a]] >= 8
            for u in range(n):
                if u == a or u == b or u == c:
                    continue
                h = int(has_edge(adj, u, a)) + int(has_edge(adj, u, b)) + int(has_edge(adj, u, c))
                if h == 2:
                    tri_dia[s, t] = True
                    break
        for c in range(nc):
            e = 0
            for i in range(4):
                for j in range(i + 1, 4):
                    e += int(has_edge(adj, quads[c, i], quads[c, j]))
            quad_dia[s, c] = e == 5
            quad_k4[s, c] = e == 6
    return tri_at, tri_big, tri_dia, quad_dia, quad_k4


# -- Q_v expectations ---------------------------------------------------------------


@njit(**_opts)
def alpha_scan(keys, n, sample):
    """Exact means of the triangle change over uniform Q_v.

    For every state id in ``sample`` and every vertex v with Q_v nonempty,
    record per vertex class the largest mean net change and the largest mean
    number of triangles created.  Also counts vertices with Delta_v <= 2 but
    Q_v empty, and the (i, j, l, m) creation tallies (4, 3, 2, 1 triangles)
    of the free vertex with the largest mean creation.
    """
    pidx, pu, pv = pair_tables(n)
    adj = np.empty((n, 3), np.int64)
    tri = np.empty(n, np.int64)
    qb = np.empty((12, 4), np.int64)
    max_net = np.full(5, -100.0)
    max_created = np.full(5, -100.0)
    seen = np.zeros(5, np.int64)
    empty_q = 0
    best = np.zeros(4, np.int64)
    best_state = -1
    best_vertex = -1
    best_mean = -1.0
    for idx in range(sample.shape[0]):
        s = sample[idx]
        decode(keys[s], n, pu, pv, adj)
        _triangle_count(adj, tri)
        for v in range(n):
            k = enumerate_qv(adj, v, qb)
            if k == 0:
                if tri[v] <= 2:
                    empty_q += 1
                continue
            cls = vertex_class(adj, tri, v)
            net = 0
            created = 0
            tally = np.zeros(4, np.int64)
            for r in range(k):
                dd, added = switch_delta(adj, qb[r, 0], qb[r, 1], qb[r, 2], qb[r, 3])
                net += dd
                created += added
                if 1 <= added <= 4:
                    tally[4 - added] += 1
            mn = net / k
            mc = created / k
            seen[cls] += 1
            if mn > max_net[cls]:
                max_net[cls] = mn
            if mc > max_created[cls]:
                max_created[cls] = mc
            if cls == 0 and mc > best_mean:
                best_mean = mc
                best[:] = tally
                best_state = s
                best_vertex = v
    return max_net, max_created, seen, empty_q, best, best_state, best_vertex


# -- exhaustive move checks ------------------------------------------------------------


@njit(**_opts)
def move_checks(keys, n):
    """Check every make and break on every state.

    Returns counts ``[makes, breaks, involution failures, mirror failures,
    |dd| > 4, census mismatches, makes not closing a triangle at v]``.
    Makes are taken over all ordered (x, w) and both far ends, so each
    distinct move is met together with its mirror.
    """
    pidx, pu, pv = pair_tables(n)
    adj = np.empty((n, 3), np.int64)
    orig = np.empty((n, 3), np.int64)
    tri = np.empty(n, np.int64)
    counts = np.empty(5, np.int64)
    tri2 = np.empty(n, np.int64)
    counts2 = np.empty(5, np.int64)
    aff = np.empty(12, np.int64)
    out = np.zeros(7, np.int64)
    n3 = 3 * n
    for s in range(keys.shape[0]):
        key = keys[s]
        decode(key, n, pu, pv, adj)
        orig[:] = adj
        recount(adj, tri, counts)
        for v in range(n):
            for i in range(3):
                for j in range(3):
                    if i == j:
                        continue
                    x = adj[v, i]
                    w = adj[v, j]
                    if has_edge(adj, x, w):
                        for e in range(n3):
                            y, z = _oriented_edge(adj, e)
                            if not break_valid(adj, v, x, w, y, z):
                                continue
                            out[1] += 1
                            # mirror break(v, w, x, z, y) must be valid with the same result
                            if not break_valid(adj, v, w, x, z, y) or \
                                    switch_key(key, pidx, w, x, z, y) != switch_key(key, pidx, x, w, y, z):
                                out[3] += 1
                            m, dd = switch(adj, tri, counts, x, w, y, z, aff)
                            if dd > 4 or dd < -4:
                                out[4] += 1
                            recount(adj, tri2, counts2)
                            if not np.array_equal(counts, counts2) or not np.array_equal(tri, tri2):
                                out[5] += 1
                            # reverse make(y x v w z) must be valid and restore the graph
                            if has_edge(adj, x, w) or not has_edge(adj, x, y) or not has_edge(adj, w, z) \
                                    or has_edge(adj, y, z):
                                out[2] += 1
                                adj[:] = orig
                                recount(adj, tri, counts)
                                continue
                            switch(adj, tri, counts, x, y, w, z, aff)
                            if not np.array_equal(adj, orig):
                                out[2] += 1
                                adj[:] = orig
                                recount(adj, tri, counts)
                    else:
                        for a in range(2):
                            for b in range(2):
                                y = _pick_other(adj, x, v, a)
                                z = _pick_other(adj, w, v, b)
                                if y == z or has_edge(adj, y, z):
                                    continue
                                out[0] += 1
                                if switch_key(key, pidx, w, z, x, y) != switch_key(key, pidx, x, y, w, z):
                                    out[3] += 1
                                m, dd = switch(adj, tri, counts, x, y, w, z, aff)
                                if dd > 4 or dd < -4:
                                    out[4] += 1
                                if not has_edge(adj, x, w):
                                    out[6] += 1
                                recount(adj, tri2, counts2)
                                if not np.array_equal(counts, counts2) or not np.array_equal(tri, tri2):
                                    out[5] += 1
                                # reverse break(v x w, y z)
                                if not break_valid(adj, v, x, w, y, z):
                                    out[2] += 1
                                    adj[:] = orig
                                    recount(adj, tri, counts)
                                    continue
                                switch(adj, tri, counts, x, w, y, z, aff)
                                if not np.array_equal(adj, orig):
                                    out[2] += 1
                                    adj[:] = orig
                                    recount(adj, tri, counts)
    return out


# -- graph6 dump ----------------------------------------------------------------------


@njit(**_opts)
def graph6_rows(keys, n):
    """Header-free graph6 lines (n <= 62), newline-terminated, as one byte array."""
    pidx, pu, pv = pair_tables(n)
    nbits = n * (n - 1) // 2
    width = 1 + (nbits + 5) // 6 + 1
    out = np.empty(keys.shape[0] * width, np.uint8)
    for s in range(keys.shape[0]):
        key = keys[s]
        base = s * width
        out[base] = 63 + n
        for i in range(1, width - 1):
            out[base + i] = 0
        k = 0
        for j in range(1, n):
            for i in range(j):
                if (key >> pidx[i, j]) & 1:
                    out[base + 1 + k // 6] |= 1 << (5 - k % 6)
                k += 1
        for i in range(1, width - 1):
            out[base + i] += 63
        out[base + width - 1] = 10
    return out


@njit(**_opts)
def triangle_counts(keys, n):
    pidx, pu, pv = pair_tables(n)
    adj = np.empty((n, 3), np.int64)
    tri = np.empty(n, np.int64)
    out = np.empty(keys.shape[0], np.int64)
    for s in range(keys.shape[0]):
        decode(keys[s], n, pu, pv, adj)
        out[s] = _triangle_count(adj, tri)
    return out


@njit(**_opts)
def sample_keys(n, count, rng):
    """Edge bitmasks of ``count`` independent uniform pairing-model samples."""
    pidx, pu, pv = pair_tables(n)
    adj = np.empty((n, 3), np.int64)
    out = np.empty(count, np.int64)
    for s in range(count):
        pairing_sample(n, rng, adj)
        key = np.int64(0)
        for u in range(n):
            for i in range(3):
                v = adj[u, i]
                if u < v:
                    key |= np.int64(1) << pidx[u, v]
        out[s] = key
    return out
