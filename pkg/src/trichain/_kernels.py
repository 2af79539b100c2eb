"""Numba kernels for the stepping loop.

Graphs live in an ``(n, 3)`` int64 array whose rows are sorted neighbour
lists.  Alongside it every kernel carries the incremental census state:

* ``tri[v]``    -- number of triangles at ``v``
* ``counts``    -- ``[delta, h0, h1, h2, h3]`` where ``hk`` counts vertices
  with ``tri == k``

The motif census follows from the histogram alone: a vertex on three
triangles lies in a K4, one on two triangles is a diamond's internal vertex,
and the remaining triangle vertices are diamond tips or isolated-triangle
vertices.  So ``tet = h3 / 4``, ``dia = h2 / 2``, ``iso = (h1 - h2) / 3`` and
``free = h0``.  Every mutation goes through :func:`switch`, which keeps
``tri`` and ``counts`` exact.
"""
from __future__ import annotations

import numpy as np
from numba import njit
from numba.core import cgutils
from numba.extending import intrinsic

FREE, ISO, DIA_EXT, DIA_INT, TET = 0, 1, 2, 3, 4

OUT_NOOP, OUT_MAKE, OUT_BREAK, OUT_REJECT, OUT_SWITCH = 0, 1, 2, 3, 4

CHAIN_O, CHAIN_I, CHAIN_II, CHAIN_METROPOLIS = 0, 1, 2, 3

# aff holds the 4 switch endpoints plus at most 2 apexes per toggled edge
AFF_SIZE = 12

_opts = dict(cache=True, nogil=True)
_inl = dict(_opts, inline="always")


@intrinsic
def _borrow(typingctx, arr):
    """View of an array (or Generator) without a meminfo, so passing it on
    costs no refcounting.

    Helper calls with array arguments otherwise pay an atomic incref/decref
    pair that the refcount pruner often fails to remove; that dominated the
    step cost.  Only use on arrays the caller keeps alive.
    """
    def codegen(context, builder, sig, args):
        ary = cgutils.create_struct_proxy(sig.args[0])(context, builder, value=args[0])
        ary.meminfo = cgutils.get_null_value(ary.meminfo.type)
        return ary._getvalue()
    return arr(arr), codegen


@njit(cache=True, nogil=True, inline="never")
def _keep(a, b, c):
    """A real use of locally allocated arrays, placed after a borrowed call."""
    return a.size + b.size + c.size


@njit(**_inl)
def _randint(rng, k):
    """Uniform integer in [0, k) from one double; k is far below 2**53."""
    r = int(rng.random() * k)
    return r if r < k else k - 1


@njit(**_inl)
def has_edge(adj, u, v):
    # branch-free so refcount pruning can drop the per-call incref/decref
    return (adj[u, 0] == v) | (adj[u, 1] == v) | (adj[u, 2] == v)


@njit(**_inl)
def common_count(adj, a, b):
    c = 0
    for k in range(3):
        u = adj[a, k]
        if u != b and has_edge(adj, b, u):
            c += 1
    return c


@njit(**_inl)
def vertex_triangles(adj, v):
    a, b, c = adj[v, 0], adj[v, 1], adj[v, 2]
    return int(has_edge(adj, a, b)) + int(has_edge(adj, a, c)) + int(has_edge(adj, b, c))


@njit(**_inl)
def vertex_class(adj, tri, v):
    t = tri[v]
    if t == 0:
        return FREE
    if t == 3:
        return TET
    if t == 2:
        return DIA_INT
    a0, a1, a2 = adj[v, 0], adj[v, 1], adj[v, 2]
    if has_edge(adj, a0, a1):
        p, q = a0, a1
    elif has_edge(adj, a0, a2):
        p, q = a0, a2
    else:
        p, q = a1, a2
    # the triangle shares an edge with another one iff the far edge pq is a diagonal
    if tri[p] >= 2 or tri[q] >= 2:
        return DIA_EXT
    return ISO


@njit(**_opts)
def recount(adj, tri, counts):
    adj = _borrow(adj)
    tri = _borrow(tri)
    counts = _borrow(counts)
    n = adj.shape[0]
    for k in range(5):
        counts[k] = 0
    total = 0
    for v in range(n):
        t = vertex_triangles(adj, v)
        tri[v] = t
        total += t
        counts[1 + t] += 1
    counts[0] = total // 3


@njit(**_opts)
def classify(adj, tri, cls):
    for v in range(adj.shape[0]):
        cls[v] = vertex_class(adj, tri, v)


@njit(**_inl)
def _replace(adj, u, old, new):
    if adj[u, 0] == old:
        adj[u, 0] = new
    elif adj[u, 1] == old:
        adj[u, 1] = new
    else:
        adj[u, 2] = new
    a, b, c = adj[u, 0], adj[u, 1], adj[u, 2]
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
    if a > b:
        a, b = b, a
    adj[u, 0] = a
    adj[u, 1] = b
    adj[u, 2] = c


@njit(**_inl)
def _bump(tri, counts, u, sign):
    counts[1 + tri[u]] -= 1
    tri[u] += sign
    counts[1 + tri[u]] += 1


@njit(**_inl)
def _toggle_triangles(adj, tri, counts, s, t, sign, aff, m):
    """Add ``sign`` to the tallies of every triangle on edge st; apexes go to ``aff``."""
    found = 0
    for k in range(3):
        u = adj[s, k]
        if u != t and has_edge(adj, t, u):
            _bump(tri, counts, s, sign)
            _bump(tri, counts, t, sign)
            _bump(tri, counts, u, sign)
            aff[m] = u
            m += 1
            found += 1
    return found, m


@njit(**_opts)
def switch(adj, tri, counts, a, b, c, d, aff):
    """Replace edges ab, cd by ac, bd and update the census.

    The caller guarantees four distinct vertices, ab, cd present and
    ac, bd absent.  Returns ``(m, dd)``: the first ``m`` entries of ``aff``
    name the touched endpoints and apexes, ``dd`` is the change in the
    total triangle count.
    """
    aff[0] = a
    aff[1] = b
    aff[2] = c
    aff[3] = d
    m = 4
    r1, m = _toggle_triangles(adj, tri, counts, a, b, -1, aff, m)
    r2, m = _toggle_triangles(adj, tri, counts, c, d, -1, aff, m)
    _replace(adj, a, b, c)
    _replace(adj, b, a, d)
    _replace(adj, c, d, a)
    _replace(adj, d, c, b)
    a1, m = _toggle_triangles(adj, tri, counts, a, c, 1, aff, m)
    a2, m = _toggle_triangles(adj, tri, counts, b, d, 1, aff, m)
    dd = a1 + a2 - r1 - r2
    counts[0] += dd
    return m, dd


@njit(**_opts)
def switch_delta(adj, a, b, c, d):
    """Triangle change of the switch ab, cd -> ac, bd; ``adj`` is restored."""
    removed = common_count(adj, a, b) + common_count(adj, c, d)
    _replace(adj, a, b, c)
    _replace(adj, b, a, d)
    _replace(adj, c, d, a)
    _replace(adj, d, c, b)
    added = common_count(adj, a, c) + common_count(adj, b, d)
    _replace(adj, a, c, b)
    _replace(adj, b, d, a)
    _replace(adj, c, a, d)
    _replace(adj, d, b, c)
    return added - removed, added


@njit(**_opts)
def make_valid(adj, y, x, v, w, z):
    if y == x or y == v or y == w or y == z or x == v or x == w or x == z:
        return False
    if v == w or v == z or w == z:
        return False
    if not (has_edge(adj, y, x) and has_edge(adj, x, v) and has_edge(adj, v, w) and has_edge(adj, w, z)):
        return False
    return not has_edge(adj, x, w) and not has_edge(adj, y, z)


@njit(**_opts)
def break_valid(adj, v, x, w, y, z):
    if v == x or v == w or x == w:
        return False
    if not (has_edge(adj, v, x) and has_edge(adj, v, w) and has_edge(adj, x, w) and has_edge(adj, y, z)):
        return False
    if y == v or y == x or y == w or z == v or z == x or z == w:
        return False
    return not has_edge(adj, x, y) and not has_edge(adj, w, z)


@njit(**_opts)
def enumerate_qv(adj, v, out):
    """Fill ``out[k] = (x, y, w, z)`` for each path-pair {vxy, vwz} in Q_v."""
    k = 0
    for i in range(3):
        x = adj[v, i]
        for j in range(i + 1, 3):
            w = adj[v, j]
            if has_edge(adj, x, w):
                continue
            for a in range(3):
                y = adj[x, a]
                if y == v:
                    continue
                for b in range(3):
                    z = adj[w, b]
                    if z == v or z == y or has_edge(adj, y, z):
                        continue
                    out[k, 0] = x
                    out[k, 1] = y
                    out[k, 2] = w
                    out[k, 3] = z
                    k += 1
    return k


# -- triple sets (Chain O) ---------------------------------------------------
# Triple id 3v+k is (v; the two neighbours other than adj[v, k]).
# tstat[id] is 0 for M (far pair non-adjacent), 1 for B.


@njit(**_inl)
def _triple_move(titems, tpos, tsize, tid, src, dst):
    i = tpos[tid]
    last = titems[src, tsize[src] - 1]
    titems[src, i] = last
    tpos[last] = i
    tsize[src] -= 1
    titems[dst, tsize[dst]] = tid
    tpos[tid] = tsize[dst]
    tsize[dst] += 1


@njit(**_opts)
def triples_init(adj, tstat, titems, tpos, tsize):
    adj = _borrow(adj)
    tstat = _borrow(tstat)
    titems = _borrow(titems)
    tpos = _borrow(tpos)
    tsize = _borrow(tsize)
    n = adj.shape[0]
    tsize[0] = 0
    tsize[1] = 0
    for v in range(n):
        for k in range(3):
            tid = 3 * v + k
            p = adj[v, (k + 1) % 3]
            q = adj[v, (k + 2) % 3]
            s = 1 if has_edge(adj, p, q) else 0
            tstat[tid] = s
            titems[s, tsize[s]] = tid
            tpos[tid] = tsize[s]
            tsize[s] += 1


@njit(**_opts)
def triples_update(adj, tstat, titems, tpos, tsize, aff, m):
    for i in range(m):
        v = aff[i]
        for k in range(3):
            tid = 3 * v + k
            p = adj[v, (k + 1) % 3]
            q = adj[v, (k + 2) % 3]
            s = 1 if has_edge(adj, p, q) else 0
            if s != tstat[tid]:
                _triple_move(titems, tpos, tsize, tid, tstat[tid], s)
                tstat[tid] = s


# -- chain steps ---------------------------------------------------------------
# mv receives the applied move: make -> (y, x, v, w, z); break -> (v, x, w, y, z);
# plain switch -> (a, b, c, d, -1) meaning ab, cd -> ac, bd.


@njit(**_inl)
def _set_mv(mv, a, b, c, d, e):
    mv[0] = a
    mv[1] = b
    mv[2] = c
    mv[3] = d
    mv[4] = e


@njit(**_inl)
def _pick_other(adj, x, v, r):
    """The r-th (r in {0, 1}) neighbour of x other than v."""
    k = 0
    for i in range(3):
        u = adj[x, i]
        if u != v:
            if k == r:
                return u
            k += 1
    return -1


@njit(**_inl)
def _oriented_edge(adj, e):
    y = e // 3
    return y, adj[y, e % 3]


@njit(**_opts)
def step_i(adj, tri, counts, p, q, rng, aff, mv):
    """Chain I.  Draws: v, slot of x (3), slot of w (2); then either an
    oriented edge (3n) or two far-end choices (2, 2); then one uniform
    for the p/q coin, only when the proposed move is valid."""
    n = adj.shape[0]
    v = _randint(rng, n)
    i = _randint(rng, 3)
    j = _randint(rng, 2)
    if j >= i:
        j += 1
    x = adj[v, i]
    w = adj[v, j]
    if has_edge(adj, x, w):
        y, z = _oriented_edge(adj, _randint(rng, 3 * n))
        if not break_valid(adj, v, x, w, y, z):
            return OUT_REJECT, 0
        if rng.random() >= q:
            return OUT_REJECT, 0
        _set_mv(mv, v, x, w, y, z)
        m, dd = switch(adj, tri, counts, x, w, y, z, aff)
        return OUT_BREAK, m
    y = _pick_other(adj, x, v, _randint(rng, 2))
    z = _pick_other(adj, w, v, _randint(rng, 2))
    if y == z or has_edge(adj, y, z):
        return OUT_REJECT, 0
    if rng.random() >= p:
        return OUT_REJECT, 0
    _set_mv(mv, y, x, v, w, z)
    m, dd = switch(adj, tri, counts, x, y, w, z, aff)
    return OUT_MAKE, m


@njit(**_opts)
def step_ii(adj, tri, counts, rng, aff, mv, qbuf):
    """Chain II.  Draws: v, one uniform for the Delta_v/3 coin; break branch:
    oriented triangle (2 Delta_v), oriented edge (3n); make branch: index
    into Q_v in enumeration order."""
    n = adj.shape[0]
    v = _randint(rng, n)
    t = tri[v]
    if rng.random() * 3.0 < t:
        r = _randint(rng, 2 * t)
        x = -1
        w = -1
        k = 0
        for i in range(3):
            for j in range(3):
                if i != j and has_edge(adj, adj[v, i], adj[v, j]):
                    if k == r:
                        x = adj[v, i]
                        w = adj[v, j]
                    k += 1
        y, z = _oriented_edge(adj, _randint(rng, 3 * n))
        if not break_valid(adj, v, x, w, y, z):
            return OUT_REJECT, 0
        _set_mv(mv, v, x, w, y, z)
        m, dd = switch(adj, tri, counts, x, w, y, z, aff)
        return OUT_BREAK, m
    k = enumerate_qv(adj, v, qbuf)
    if k == 0:
        raise RuntimeError("Q_v empty on the make branch")
    r = _randint(rng, k)
    x, y, w, z = qbuf[r, 0], qbuf[r, 1], qbuf[r, 2], qbuf[r, 3]
    _set_mv(mv, y, x, v, w, z)
    m, dd = switch(adj, tri, counts, x, y, w, z, aff)
    return OUT_MAKE, m


@njit(**_opts)
def step_o(adj, tri, counts, tstat, titems, tpos, tsize, p, rng, aff, mv):
    """Chain O.  Draws: one uniform for the p coin; index into M or B;
    a role bit assigning the pair to (x, w); then two far-end choices
    (make) or one oriented edge (break)."""
    n = adj.shape[0]
    make = rng.random() < p
    s = 0 if make else 1
    if tsize[s] == 0:
        return OUT_NOOP, 0
    tid = titems[s, _randint(rng, tsize[s])]
    v = tid // 3
    k = tid % 3
    x = adj[v, (k + 1) % 3]
    w = adj[v, (k + 2) % 3]
    if _randint(rng, 2) == 1:
        x, w = w, x
    if make:
        y = _pick_other(adj, x, v, _randint(rng, 2))
        z = _pick_other(adj, w, v, _randint(rng, 2))
        if y == z or has_edge(adj, y, z):
            return OUT_REJECT, 0
        _set_mv(mv, y, x, v, w, z)
        m, dd = switch(adj, tri, counts, x, y, w, z, aff)
        triples_update(adj, tstat, titems, tpos, tsize, aff, m)
        return OUT_MAKE, m
    y, z = _oriented_edge(adj, _randint(rng, 3 * n))
    if not break_valid(adj, v, x, w, y, z):
        return OUT_REJECT, 0
    _set_mv(mv, v, x, w, y, z)
    m, dd = switch(adj, tri, counts, x, w, y, z, aff)
    triples_update(adj, tstat, titems, tpos, tsize, aff, m)
    return OUT_BREAK, m


@njit(**_opts)
def step_metropolis(adj, tri, counts, q, rng, aff, mv):
    """Metropolis switch.  Draws: two oriented edges (3n each), a matching
    index (3); one uniform for acceptance only when the proposal is simple
    and changes the graph."""
    n = adj.shape[0]
    x, y = _oriented_edge(adj, _randint(rng, 3 * n))
    w, z = _oriented_edge(adj, _randint(rng, 3 * n))
    mt = _randint(rng, 3)
    if x == w or x == z or y == w or y == z:
        return OUT_REJECT, 0
    if mt == 0:
        return OUT_NOOP, 0
    if mt == 1:
        a, b, c, d = x, y, w, z  # new edges xw, yz
    else:
        a, b, c, d = x, y, z, w  # new edges xz, yw
    if has_edge(adj, a, c) or has_edge(adj, b, d):
        return OUT_REJECT, 0
    dd, added = switch_delta(adj, a, b, c, d)
    if rng.random() >= q ** (4 - dd):
        return OUT_REJECT, 0
    _set_mv(mv, a, b, c, d, -1)
    m, dd2 = switch(adj, tri, counts, a, b, c, d, aff)
    return OUT_SWITCH, m


@njit(**_opts)
def run_chain(kind, adj, tri, counts, tstat, titems, tpos, tsize,
              p, q, steps, sample_every, rng, trace, moves, record):
    """Run ``steps`` steps; row r of ``trace`` holds the state after
    ``r * sample_every`` steps.  Returns the number of recorded moves."""
    aff = np.empty(AFF_SIZE, np.int64)
    mv = np.empty(5, np.int64)
    qbuf = np.empty((12, 4), np.int64)
    r = _run_loop(kind, _borrow(adj), _borrow(tri), _borrow(counts),
                  _borrow(tstat), _borrow(titems), _borrow(tpos), _borrow(tsize), p, q, steps,
                  sample_every, _borrow(rng), _borrow(trace), _borrow(moves), record,
                  _borrow(aff), _borrow(mv), _borrow(qbuf))
    # the scratch arrays are local: touch them after the call so they are not
    # released while borrowed
    _keep(aff, mv, qbuf)
    return r


@njit(**_opts)
def _run_loop(kind, adj, tri, counts, tstat, titems, tpos, tsize,
              p, q, steps, sample_every, rng, trace, moves, record, aff, mv, qbuf):
    makes = 0
    breaks = 0
    rejections = 0
    nmoves = 0
    row = 0
    for t in range(steps + 1):
        if t % sample_every == 0:
            trace[row, 0] = t
            trace[row, 1] = counts[0]
            trace[row, 2] = (counts[2] - counts[3]) // 3
            trace[row, 3] = counts[3] // 2
            trace[row, 4] = counts[4] // 4
            trace[row, 5] = counts[1]
            trace[row, 6] = makes
            trace[row, 7] = breaks
            trace[row, 8] = rejections
            row += 1
        if t == steps:
            break
        d0 = counts[0]
        if kind == CHAIN_II:
            out, m = step_ii(adj, tri, counts, rng, aff, mv, qbuf)
        elif kind == CHAIN_I:
            out, m = step_i(adj, tri, counts, p, q, rng, aff, mv)
        elif kind == CHAIN_O:
            out, m = step_o(adj, tri, counts, tstat, titems, tpos, tsize, p, rng, aff, mv)
        else:
            out, m = step_metropolis(adj, tri, counts, q, rng, aff, mv)
        if out == OUT_MAKE:
            makes += 1
        elif out == OUT_BREAK:
            breaks += 1
        elif out == OUT_SWITCH:
            # plain switches are tallied by the sign of their triangle change
            if counts[0] > d0:
                makes += 1
            elif counts[0] < d0:
                breaks += 1
        else:
            rejections += 1
        if record and (out == OUT_MAKE or out == OUT_BREAK or out == OUT_SWITCH):
            moves[nmoves, 0] = out
            for i in range(5):
                moves[nmoves, 1 + i] = mv[i]
            nmoves += 1
    return nmoves


# -- uniform sampler -----------------------------------------------------------


@njit(**_opts)
def pairing_sample(n, rng, adj):
    """Uniform simple cubic graph via the pairing model with rejection.

    Points 3v, 3v+1, 3v+2 belong to vertex v.  The matching is built by
    pairing the lowest unpaired point with a uniform unpaired partner, and
    the attempt restarts as soon as a loop or double edge appears.
    Returns the number of attempts.
    """
    npts = 3 * n
    pts = np.empty(npts, np.int64)
    deg = np.empty(n, np.int64)
    attempts = 0
    while True:
        attempts += 1
        for i in range(npts):
            pts[i] = i
        for v in range(n):
            deg[v] = 0
        ok = True
        for i in range(0, npts, 2):
            j = i + 1 + _randint(rng, npts - i - 1)
            tmp = pts[i + 1]
            pts[i + 1] = pts[j]
            pts[j] = tmp
            u = pts[i] // 3
            v = pts[i + 1] // 3
            if u == v:
                ok = False
                break
            dup = False
            for k in range(deg[u]):
                if adj[u, k] == v:
                    dup = True
            if dup:
                ok = False
                break
            adj[u, deg[u]] = v
            deg[u] += 1
            adj[v, deg[v]] = u
            deg[v] += 1
        if ok:
            break
    for v in range(n):
        a, b, c = adj[v, 0], adj[v, 1], adj[v, 2]
        if a > b:
            a, b = b, a
        if b > c:
            b, c = c, b
        if a > b:
            a, b = b, a
        adj[v, 0] = a
        adj[v, 1] = b
        adj[v, 2] = c
    return attempts


@njit(**_opts)
def sample_delta_many(n, count, rng):
    """Triangle counts of ``count`` independent uniform samples."""
    adj = np.empty((n, 3), np.int64)
    out = np.empty(count, np.int64)
    _delta_loop(n, count, _borrow(rng), _borrow(adj), _borrow(out))
    _keep(adj, out, out)
    return out


@njit(**_opts)
def _delta_loop(n, count, rng, adj, out):
    for s in range(count):
        pairing_sample(n, rng, adj)
        total = 0
        for v in range(n):
            total += vertex_triangles(adj, v)
        out[s] = total // 3
