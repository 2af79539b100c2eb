"""The triangle-switch chains (O, I, II) and the Metropolis switch process.

Every step function takes a ``numpy.random.Generator`` and consumes its
draws in a fixed order (documented on each kernel in ``_kernels``), so a
seed fully determines the trajectory.  ``run`` drives the same kernels in a
compiled loop.

Per-step draw layout
--------------------
Chain I     v; slot of x; slot of w among the other two; then
            break side: oriented edge index in [0, 3n), coin if valid;
            make side: far end of x, far end of w, coin if valid.
Chain II    v; coin u (break iff 3u < Delta_v); break side: oriented
            triangle in [0, 2 Delta_v), oriented edge; make side: index into Q_v.
Chain O     coin (make iff u < p); index into M or B; role bit; then
            far ends (make) or oriented edge (break).
Metropolis  two oriented edges, matching index in {0, 1, 2} (0 is the
            identity), acceptance coin when the proposal is simple.
"""
from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, fields
from typing import Iterable

import numpy as np

from . import _kernels as K
from .graph import CubicGraph, full_census, named_graph, triangles_at
from .moves import (BreakMove, LocalDelta, MakeMove, SwitchMove, TripleSets, apply_move,
                    parse_move)

KINDS = {"O": K.CHAIN_O, "I": K.CHAIN_I, "II": K.CHAIN_II, "METROPOLIS": K.CHAIN_METROPOLIS}

TRACE_HEADER = ("step", "delta", "iso", "dia", "tet", "free",
                "makes_applied", "breaks_applied", "rejections")


class EmptyMoveSet(RuntimeError):
    pass


class Outcome(enum.Enum):
    NoOp = K.OUT_NOOP
    MakeApplied = K.OUT_MAKE
    BreakApplied = K.OUT_BREAK
    RejectedProposal = K.OUT_REJECT
    SwitchApplied = K.OUT_SWITCH


@dataclass(frozen=True)
class StepOutcome:
    kind: Outcome
    move: MakeMove | BreakMove | SwitchMove | None
    delta: LocalDelta

    @property
    def applied(self) -> bool:
        return self.move is not None


@dataclass(frozen=True)
class ChainConfig:
    kind: str = "II"
    p: float = 0.5
    q: float = 0.5
    seed: int = 0
    steps: int = 0
    sample_every: int = 1
    burn_in_factor: float = 20.0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind == "METRO":
            kind = "METROPOLIS"
        if kind not in KINDS:
            raise ValueError(f"unknown chain kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind in ("O", "I") and not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if kind in ("I", "METROPOLIS") and not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if self.sample_every < 1:
            raise ValueError("sample_every must be positive")
        if self.burn_in_factor < 0:
            raise ValueError("burn_in_factor must be non-negative")

    def burn_in(self, n: int) -> int:
        return int(round(self.burn_in_factor * n))


@dataclass(frozen=True)
class TraceRecord:
    step: int
    delta: int
    iso: int
    dia: int
    tet: int
    free: int
    makes_applied: int
    breaks_applied: int
    rejections: int


@dataclass
class RunResult:
    trace: np.ndarray  # (records, 9) int64, columns TRACE_HEADER
    graph: CubicGraph
    moves: list

    @property
    def records(self) -> list[TraceRecord]:
        return [TraceRecord(*map(int, row)) for row in self.trace]

    def after(self, step: int) -> np.ndarray:
        """Trace rows at or beyond ``step``."""
        return self.trace[self.trace[:, 0] >= step]


# -- single steps ------------------------------------------------------------------

def _buffers():
    return np.empty(K.AFF_SIZE, np.int64), np.empty(5, np.int64)


def _outcome(g: CubicGraph, before, out: int, m: int, aff, mv) -> StepOutcome:
    kind = Outcome(out)
    if kind is Outcome.MakeApplied:
        move = MakeMove(*map(int, mv))
    elif kind is Outcome.BreakApplied:
        move = BreakMove(*map(int, mv))
    elif kind is Outcome.SwitchApplied:
        move = SwitchMove(*map(int, mv[:4]))
    else:
        return StepOutcome(kind, None, LocalDelta.zero())
    return StepOutcome(kind, move, LocalDelta.between(before, g.census, map(int, aff[:m])))


def step_chain_o(g: CubicGraph, sets: TripleSets, p: float, rng: np.random.Generator) -> StepOutcome:
    """One Chain O step; an empty M(G) or B(G) on the drawn side is a NoOp."""
    if sets.graph is not g:
        raise ValueError("triple sets belong to a different graph")
    aff, mv = _buffers()
    before = g.census
    out, m = K.step_o(g.adj, g._tri, g._counts,
                      sets.stat, sets.items, sets.pos, sets.size, p, rng, aff, mv)
    return _outcome(g, before, out, m, aff, mv)


def step_chain_i(g: CubicGraph, p: float, q: float, rng: np.random.Generator) -> StepOutcome:
    aff, mv = _buffers()
    before = g.census
    out, m = K.step_i(g.adj, g._tri, g._counts, p, q, rng, aff, mv)
    return _outcome(g, before, out, m, aff, mv)


def step_chain_ii(g: CubicGraph, rng: np.random.Generator) -> StepOutcome:
    aff, mv = _buffers()
    qbuf = np.empty((12, 4), np.int64)
    before = g.census
    out, m = K.step_ii(g.adj, g._tri, g._counts, rng, aff, mv, qbuf)
    return _outcome(g, before, out, m, aff, mv)


def step_metropolis_switch(g: CubicGraph, q: float, rng: np.random.Generator) -> StepOutcome:
    aff, mv = _buffers()
    before = g.census
    out, m = K.step_metropolis(g.adj, g._tri, g._counts, q, rng, aff, mv)
    return _outcome(g, before, out, m, aff, mv)


def step(g: CubicGraph, cfg: ChainConfig, rng: np.random.Generator, sets: TripleSets | None = None) -> StepOutcome:
    if cfg.kind == "II":
        return step_chain_ii(g, rng)
    if cfg.kind == "I":
        return step_chain_i(g, cfg.p, cfg.q, rng)
    if cfg.kind == "O":
        return step_chain_o(g, sets if sets is not None else TripleSets(g), cfg.p, rng)
    return step_metropolis_switch(g, cfg.q, rng)


# -- runs -------------------------------------------------------------------------

def _decode_moves(raw: np.ndarray) -> list:
    out = []
    for code, *vs in raw.tolist():
        if code == K.OUT_MAKE:
            out.append(MakeMove(*vs))
        elif code == K.OUT_BREAK:
            out.append(BreakMove(*vs))
        else:
            out.append(SwitchMove(*vs[:4]))
    return out


def run(g0: CubicGraph, cfg: ChainConfig, *, debug: bool = False, record_moves: bool = False,
        rng: np.random.Generator | None = None) -> RunResult:
    """Run ``cfg.steps`` steps from a copy of ``g0``.

    One trace row is written at step 0 and after every ``cfg.sample_every``
    steps.  With ``debug`` the run is split at the sampling instants and the
    maintained census is checked against a full recount (and the graph
    re-validated) at each of them.
    """
    g = g0.copy()
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    kind = KINDS[cfg.kind]
    sets = TripleSets(g) if cfg.kind == "O" else None
    if sets is None:
        tstat = np.zeros(1, np.int8)
        titems = np.zeros((2, 1), np.int64)
        tpos = np.zeros(1, np.int64)
        tsize = np.zeros(2, np.int64)
    else:
        tstat, titems, tpos, tsize = sets.stat, sets.items, sets.pos, sets.size

    def chunk(steps, every):
        rows = steps // every + 1
        trace = np.zeros((rows, 9), np.int64)
        moves = np.zeros((steps if record_moves else 1, 6), np.int64)
        nm = K.run_chain(kind, g.adj, g._tri, g._counts, tstat, titems, tpos, tsize,
                         float(cfg.p), float(cfg.q), steps, every, rng, trace, moves, record_moves)
        return trace, moves[:nm]

    if not debug:
        trace, raw = chunk(cfg.steps, cfg.sample_every)
        return RunResult(trace, g, _decode_moves(raw) if record_moves else [])

    _check_consistent(g, sets)
    rows = [chunk(0, 1)[0][0]]
    all_moves = []
    offset = np.zeros(3, np.int64)
    done = 0
    while done < cfg.steps:
        todo = min(cfg.sample_every, cfg.steps - done)
        t, raw = chunk(todo, cfg.sample_every)
        if todo == cfg.sample_every:
            r = t[1].copy()
            r[0] += done
            r[6:] += offset
            offset = r[6:].copy()
            rows.append(r)
        if record_moves:
            all_moves.extend(_decode_moves(raw))
        done += todo
        _check_consistent(g, sets)
    return RunResult(np.vstack(rows), g, all_moves)


def _check_consistent(g: CubicGraph, sets: TripleSets | None) -> None:
    g.validate()
    fresh, _ = full_census(g)
    tri = np.array([triangles_at(g, v) for v in range(g.n)])
    if fresh != g.census or not np.array_equal(tri, g._tri):
        raise AssertionError(f"incremental census {g.census} != recount {fresh}")
    if not fresh.identities_hold(g.n):
        raise AssertionError(f"census identities fail for {fresh}")
    if sets is not None and sets.B != TripleSets(g).B:
        raise AssertionError("triple sets out of sync")


def replay(g0: CubicGraph, moves: Iterable) -> CubicGraph:
    """Re-apply a move log (objects or text lines) to a copy of ``g0``."""
    g = g0.copy()
    for mv in moves:
        if isinstance(mv, str):
            if not mv.strip():
                continue
            mv = parse_move(mv)
        apply_move(g, mv)
    return g


# -- uniform sampler ----------------------------------------------------------------

def sample_uniform_cubic(n: int, rng: np.random.Generator) -> CubicGraph:
    """Exactly uniform labeled simple cubic graph (pairing model + rejection)."""
    if n < 4 or n % 2:
        raise ValueError(f"n must be even and >= 4, got {n}")
    adj = np.empty((n, 3), np.int64)
    K.pairing_sample(n, rng, adj)
    return CubicGraph(adj, validate=False)


def uniform_triangle_counts(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    return K.sample_delta_many(n, count, rng)


def start_graph(spec: str, n: int, rng: np.random.Generator | None = None) -> CubicGraph:
    """Start graphs by name: k4packing, prism-packing, ladder, uniform."""
    key = spec.lower()
    if key == "k4packing":
        return named_graph("MaxTriangle", n)
    if key == "prism-packing":
        return named_graph("PrismPacking", n)
    if key == "ladder":
        return named_graph("Ladder", n)
    if key == "uniform":
        return sample_uniform_cubic(n, rng if rng is not None else np.random.default_rng(0))
    raise ValueError(f"unknown start graph {spec!r}")


# -- trace I/O ----------------------------------------------------------------------

def write_trace_csv(trace: np.ndarray, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    w.writerows(trace.tolist())


def trace_to_csv(trace: np.ndarray) -> str:
    buf = io.StringIO()
    write_trace_csv(trace, buf)
    return buf.getvalue()


def read_trace_csv(fh) -> list[TraceRecord]:
    r = csv.reader(fh)
    header = tuple(next(r))
    if header != TRACE_HEADER:
        raise ValueError(f"unexpected trace header {header}")
    names = [f.name for f in fields(TraceRecord)]
    return [TraceRecord(**dict(zip(names, map(int, row)))) for row in r if row]
