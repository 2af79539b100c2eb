"""``trichain`` command line: simulation, exhaustive checks and bound tables.

Exit codes: 2 bad flags, 3 I/O failure, 4 invalid start graph.  Every flag
can also be set through ``TRICHAIN_<COMMAND>_<FLAG>`` environment variables.
"""
from __future__ import annotations

import csv
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import bounds as B
from .chains import ChainConfig, run, sample_uniform_cubic, start_graph, write_trace_csv
from .graph import CubicGraph, GraphError, from_graph6, to_graph6

EXIT_IO = 3
EXIT_START = 4

CHAINS = click.Choice(["o", "i", "ii", "metropolis"], case_sensitive=False)


class Number(click.ParamType):
    """A float that may also be written as a fraction such as ``2/11``."""

    name = "number"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        try:
            return float(Fraction(str(value).strip()))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a number or fraction", param, ctx)


NUMBER = Number()


def _fail(code: int, msg: str):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _check_n(n: int | None, limit: int | None = None) -> None:
    if n is None:
        return
    if n < 4 or n % 2:
        raise click.BadParameter(f"n must be even and >= 4, got {n}", param_hint="--n")
    if limit is not None and n > limit:
        raise click.BadParameter(f"n must be at most {limit}", param_hint="--n")


def _open_out(path: str | None, mode: str = "w"):
    if path is None or path == "-":
        return sys.stdout.buffer if "b" in mode else sys.stdout
    try:
        return open(path, mode, newline="" if "b" not in mode else None)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {path}: {exc.strerror}")


def _close(fh) -> None:
    if fh not in (sys.stdout, sys.stdout.buffer):
        fh.close()


def _load_start(spec: str, n: int | None, rng: np.random.Generator) -> CubicGraph:
    if spec.startswith("graph6:"):
        path = spec[len("graph6:"):]
        try:
            text = Path(path).read_bytes().split(b"\n")[0]
        except OSError as exc:
            _fail(EXIT_IO, f"cannot read {path}: {exc.strerror}")
        try:
            g = from_graph6(text)
        except GraphError as exc:
            _fail(EXIT_START, f"invalid start graph in {path}: {exc}")
        if n is not None and g.n != n:
            _fail(EXIT_START, f"start graph has {g.n} vertices, --n is {n}")
        return g
    if n is None:
        raise click.BadParameter("--n is required unless the start is a graph6 file", param_hint="--n")
    try:
        return start_graph(spec, n, rng)
    except (GraphError, ValueError) as exc:
        _fail(EXIT_START, f"invalid start graph {spec!r}: {exc}")


def _replica_path(out: str, r: int, replicas: int) -> str:
    if replicas == 1:
        return out
    if "{replica}" in out:
        return out.format(replica=r)
    p = Path(out)
    return str(p.with_name(f"{p.stem}-r{r}{p.suffix}"))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Triangle-switch chains on labeled cubic graphs."""


@main.command()
@click.option("--chain", "chain", type=CHAINS, default="ii", show_default=True)
@click.option("--n", type=int, default=None, help="Vertex count (even, >= 4).")
@click.option("--steps", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--p", type=NUMBER, default=0.5, show_default=True, help="Make bias (chains O and I).")
@click.option("--q", type=NUMBER, default=0.5, show_default=True, help="Break bias (chain I) or Metropolis base.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sample-every", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--start", default="k4packing", show_default=True,
              help="k4packing, prism-packing, ladder, uniform or graph6:<file>.")
@click.option("--burn-in-factor", type=click.FloatRange(min=0), default=20.0, show_default=True,
              help="Summary statistics skip the first C*n steps.")
@click.option("--out", default=None, help="Trace CSV path (stdout if omitted).")
@click.option("--moves-out", default=None, help="Write the applied moves, one per line.")
@click.option("--replicas", type=click.IntRange(min=1), default=1, show_default=True,
              help="Independent replicas run in parallel, one trace file each.")
@click.option("--debug", is_flag=True, help="Recount and revalidate at every sample.")
def simulate(chain, n, steps, p, q, seed, sample_every, start, burn_in_factor, out, moves_out, replicas, debug):
    """Run a chain and write its trace CSV."""
    _check_n(n)
    try:
        cfg = ChainConfig(kind=chain, p=p, q=q, seed=seed, steps=steps, sample_every=sample_every,
                          burn_in_factor=burn_in_factor)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    if replicas > 1 and out is None:
        raise click.BadParameter("--replicas needs --out", param_hint="--out")
    if replicas > 1 and moves_out is not None:
        raise click.BadParameter("--moves-out works with a single replica", param_hint="--moves-out")

    if replicas == 1:
        rngs = [np.random.default_rng(seed)]
    else:
        rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(replicas)]
    starts = [_load_start(start, n, rng) for rng in rngs]

    def one(r):
        t0 = time.perf_counter()
        res = run(starts[r], cfg, rng=rngs[r], debug=debug, record_moves=moves_out is not None)
        return res, time.perf_counter() - t0

    with ThreadPoolExecutor(max_workers=replicas) as pool:
        results = list(pool.map(one, range(replicas)))

    for r, (res, secs) in enumerate(results):
        path = None if out is None else _replica_path(out, r, replicas)
        fh = _open_out(path)
        try:
            write_trace_csv(res.trace, fh)
        except OSError as exc:
            _fail(EXIT_IO, f"cannot write trace: {exc}")
        finally:
            _close(fh)
        if moves_out is not None:
            fh = _open_out(moves_out)
            fh.write("".join(f"{m}\n" for m in res.moves))
            _close(fh)
        g_n = starts[r].n
        post = res.after(cfg.burn_in(g_n))[:, 1]
        tag = f"replica {r}: " if replicas > 1 else ""
        if post.size:
            click.echo(f"{tag}n={g_n} steps={steps} rows={len(res.trace)} post-burn-in samples={post.size} "
                       f"mean_delta={post.mean():.4f} min_delta={post.min()} max_delta={post.max()} "
                       f"mean_density={post.mean() / g_n:.5f} seconds={secs:.2f}", err=out is None)
        else:
            click.echo(f"{tag}n={g_n} steps={steps} rows={len(res.trace)} no samples after burn-in",
                       err=out is None)


@main.command("enumerate")
@click.option("--n", type=int, required=True)
@click.option("--out", default=None, help="graph6 dump, one graph per line (omit for counts only).")
def enumerate_cmd(n, out):
    """List every labeled cubic graph on n vertices."""
    from .statespace import enumerate_states
    _check_n(n, 10)
    t0 = time.perf_counter()
    space = enumerate_states(n)
    secs = time.perf_counter() - t0
    tri = space.triangle_counts()
    if out is not None:
        fh = _open_out(out, "wb")
        try:
            fh.write(space.graph6_lines())
        except OSError as exc:
            _fail(EXIT_IO, f"cannot write {out}: {exc}")
        finally:
            _close(fh)
    split = ", ".join(f"delta={d}: {c}" for d, c in enumerate(np.bincount(tri)) if c)
    click.echo(f"states: {len(space)} ({split}) seconds={secs:.3f}", err=out == "-")


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--lemmas/--no-lemmas", default=True, show_default=True,
              help="Exhaustive local step-count checks (n <= 8).")
@click.option("--alpha-sample", type=click.IntRange(min=1), default=None,
              help="Check Q_v expectations on this many random states instead of all.")
@click.option("--seed", type=int, default=0, show_default=True)
def verify(n, lemmas, alpha_sample, seed):
    """Connectivity of G*_n plus the exhaustive move and lemma checks."""
    from .statespace import (build_transition_graph, enumerate_states, verify_alpha_bounds,
                             verify_irreducibility, verify_lemma_step_bounds, verify_moves)
    _check_n(n, 10)
    space = enumerate_states(n)
    structure = build_transition_graph(space)
    rep = verify_irreducibility(structure)
    click.echo(rep.summary())
    ok = rep.connected
    if n <= 8:
        mv = verify_moves(space)
        click.echo(f"moves: makes={mv.makes} breaks={mv.breaks} involution_failures={mv.involution_failures} "
                   f"mirror_failures={mv.mirror_failures} locality_failures={mv.locality_failures} "
                   f"census_failures={mv.census_failures}")
        ok &= mv.ok
    if lemmas and structure.adjacency is not None:
        lem = verify_lemma_step_bounds(structure)
        click.echo(f"lemmas: insertion {lem.insertion_violations}/{lem.insertion_cases}, "
                   f"diamond {lem.diamond_violations}/{lem.diamond_cases}, "
                   f"k4 {lem.k4_violations}/{lem.k4_cases} violations")
        ok &= lem.ok
    alpha = verify_alpha_bounds(space, sample=alpha_sample, seed=seed)
    parts = ", ".join(f"{c.name}={alpha.max_net[c]:.4f}" for c in alpha.max_net if alpha.vertices_seen[c])
    click.echo(f"q_v means over {alpha.states_checked} states: max net {parts}; "
               f"empty Q_v with delta_v <= 2: {alpha.empty_q_violations}")
    ok &= alpha.ok
    click.echo(f"all checks passed: {str(bool(ok)).lower()}")
    if not ok:
        sys.exit(1)


@main.command()
@click.option("--chain", "chain", type=CHAINS, default="i", show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--p", type=NUMBER, default=None, help="Defaults to 4/(3n+4).")
@click.option("--q", type=NUMBER, default=None, help="Defaults to 1-p (chain I) or 0.5.")
@click.option("--out", default=None, help="CSV of state id, graph6, delta, probability.")
def stationary(chain, n, p, q, out):
    """Exact stationary distribution for n <= 8."""
    from .statespace import build_transition_graph, check_detailed_balance, enumerate_states
    from .statespace import stationary as solve

    _check_n(n, 8)
    if p is None:
        p = 4.0 / (3 * n + 4)
    if q is None:
        q = 1.0 - p if chain.lower() == "i" else 0.5
    try:
        cfg = ChainConfig(kind=chain, p=p, q=q)
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    space = enumerate_states(n)
    structure = build_transition_graph(space)
    pi = solve(structure, cfg)
    db = check_detailed_balance(structure, cfg, pi)
    tri = space.triangle_counts()
    if out is not None:
        fh = _open_out(out)
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("state", "graph6", "delta", "probability"))
            lines = space.graph6_lines().decode("ascii").split("\n")
            for i in range(len(space)):
                w.writerow((i, lines[i], int(tri[i]), repr(float(pi[i]))))
        except OSError as exc:
            _fail(EXIT_IO, f"cannot write {out}: {exc}")
        finally:
            _close(fh)
    click.echo(f"states: {len(space)} max_deviation_from_uniform={np.abs(pi - 1.0 / len(space)).max():.3e} "
               f"detailed_balance_violation={db:.3e} mean_delta={float(pi @ tri):.6f}")


@main.command()
@click.option("--p", "ps", type=NUMBER, multiple=True, help="Make bias for the Chain I bound (repeatable).")
def bounds(ps):
    """Print the drift roots and Chain I bounds as CSV."""
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(("quantity", "value"))
    rep = B.DriftReport.compute()
    for name, val in rep.csv_rows():
        w.writerow((name, repr(val)))
    for p in ps:
        try:
            w.writerow((f"chain1_lower[p={p}]", repr(B.chain1_lower(p))))
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--p")


@main.command("sample-uniform")
@click.option("--n", type=int, required=True)
@click.option("--count", type=click.IntRange(min=0), default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="graph6 lines (stdout if omitted).")
def sample_uniform(n, count, seed, out):
    """Exactly uniform labeled cubic graphs from the pairing model."""
    _check_n(n)
    rng = np.random.default_rng(seed)
    fh = _open_out(out, "wb")
    try:
        for _ in range(count):
            fh.write(to_graph6(sample_uniform_cubic(n, rng)) + b"\n")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write: {exc}")
    finally:
        _close(fh)


def entry():
    main(auto_envvar_prefix="TRICHAIN")


if __name__ == "__main__":
    entry()
