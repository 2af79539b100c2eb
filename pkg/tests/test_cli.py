from __future__ import annotations

import csv
import io

import numpy as np
import pytest
from click.testing import CliRunner

from trichain.chains import read_trace_csv
from trichain.cli import main
from trichain.graph import MotifCensus, from_graph6, named_graph, to_graph6


def invoke(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env, auto_envvar_prefix="TRICHAIN")


def test_help():
    res = invoke("--help")
    assert res.exit_code == 0
    for cmd in ("simulate", "enumerate", "verify", "stationary", "bounds", "sample-uniform"):
        assert cmd in res.output


def test_simulate_writes_trace(tmp_path):
    out = tmp_path / "t.csv"
    res = invoke("simulate", "--chain", "ii", "--n", "40", "--steps", "5000",
                 "--sample-every", "100", "--out", str(out))
    assert res.exit_code == 0, res.output
    assert "mean_delta=" in res.output
    with open(out) as fh:
        recs = read_trace_csv(fh)
    assert len(recs) == 51 and recs[0].step == 0 and recs[-1].step == 5000
    for r in recs:
        assert MotifCensus(r.delta, r.iso, r.dia, r.tet, r.free).identities_hold(40)


def test_simulate_zero_steps_single_row(tmp_path):
    out = tmp_path / "t.csv"
    res = invoke("simulate", "--n", "12", "--steps", "0", "--out", str(out))
    assert res.exit_code == 0
    rows = list(csv.reader(open(out)))
    assert len(rows) == 2 and rows[1][:2] == ["0", "12"]


def test_simulate_is_deterministic(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        invoke("simulate", "--chain", "metropolis", "--q", "0.6", "--n", "30", "--steps", "3000",
               "--sample-every", "50", "--seed", "9", "--out", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_simulate_to_stdout():
    res = CliRunner().invoke(main, ["simulate", "--n", "8", "--steps", "10", "--start", "uniform"])
    assert res.exit_code == 0
    assert res.stdout.splitlines()[0].startswith("step,delta,")
    assert len(res.stdout.splitlines()) == 12


def test_simulate_graph6_start_and_moves(tmp_path):
    g6 = tmp_path / "g.g6"
    g6.write_bytes(to_graph6(named_graph("Q3")) + b"\n")
    moves = tmp_path / "m.txt"
    res = invoke("simulate", "--chain", "i", "--p", "0.7", "--q", "0.3", "--steps", "200",
                 "--start", f"graph6:{g6}", "--out", str(tmp_path / "t.csv"), "--moves-out", str(moves))
    assert res.exit_code == 0, res.output
    assert moves.read_text().strip()


def test_simulate_replicas(tmp_path):
    res = invoke("simulate", "--n", "20", "--steps", "1000", "--sample-every", "100", "--replicas", "3",
                 "--seed", "4", "--start", "uniform", "--out", str(tmp_path / "rep.csv"))
    assert res.exit_code == 0, res.output
    files = sorted(tmp_path.glob("rep-r*.csv"))
    assert len(files) == 3
    assert len({f.read_bytes() for f in files}) == 3


def test_simulate_exit_codes(tmp_path):
    assert invoke("simulate", "--n", "7").exit_code == 2
    assert invoke("simulate", "--n", "10", "--chain", "x").exit_code == 2
    assert invoke("simulate", "--n", "10", "--chain", "i", "--p", "1.5").exit_code == 2
    assert invoke("simulate", "--n", "10", "--p", "abc").exit_code == 2
    assert invoke("simulate", "--n", "10", "--start", "nonsense").exit_code == 4
    assert invoke("simulate", "--n", "6", "--start", "ladder").exit_code == 4
    # n = 2 mod 4 falls back to a triangle-rich start rather than failing
    assert invoke("simulate", "--n", "10", "--start", "k4packing").exit_code == 0
    assert invoke("simulate", "--start", f"graph6:{tmp_path / 'missing.g6'}").exit_code == 3
    bad = tmp_path / "bad.g6"
    bad.write_bytes(b"C}\n")
    assert invoke("simulate", "--start", f"graph6:{bad}").exit_code == 4
    assert invoke("simulate", "--n", "8", "--out", str(tmp_path / "no" / "dir.csv")).exit_code == 3


def test_env_prefix(tmp_path):
    out = tmp_path / "t.csv"
    res = invoke("simulate", "--out", str(out), env={"TRICHAIN_SIMULATE_N": "16", "TRICHAIN_SIMULATE_STEPS": "7"})
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(open(out)))
    assert rows[-1][0] == "7"


def test_enumerate(tmp_path):
    res = invoke("enumerate", "--n", "6")
    assert res.exit_code == 0
    assert "states: 70" in res.output and "delta=0: 10" in res.output and "delta=2: 60" in res.output
    out = tmp_path / "s.g6"
    assert invoke("enumerate", "--n", "6", "--out", str(out)).exit_code == 0
    lines = out.read_bytes().splitlines()
    assert len(lines) == 70 and all(from_graph6(l).n == 6 for l in lines)
    assert invoke("enumerate", "--n", "12").exit_code == 2


def test_verify_n6():
    res = invoke("verify", "--n", "6")
    assert res.exit_code == 0, res.output
    assert "connected: true, states: 70" in res.output
    assert "all checks passed: true" in res.output


def test_stationary_uniform(tmp_path):
    out = tmp_path / "pi.csv"
    res = invoke("stationary", "--chain", "i", "--n", "6", "--p", "2/11", "--out", str(out))
    assert res.exit_code == 0, res.output
    rows = list(csv.DictReader(open(out)))
    pi = np.array([float(r["probability"]) for r in rows])
    assert len(pi) == 70 and np.abs(pi - 1 / 70).max() < 1e-9
    dev = float(res.output.split("max_deviation_from_uniform=")[1].split()[0])
    assert dev < 1e-9


def test_stationary_default_p_is_balanced():
    res = invoke("stationary", "--n", "6")
    dev = float(res.output.split("max_deviation_from_uniform=")[1].split()[0])
    assert res.exit_code == 0 and dev < 1e-9


def test_stationary_six_digit_p_is_close_to_uniform():
    # 0.181818 is 2/11 rounded to six places, so the law is uniform up to that rounding
    res = invoke("stationary", "--chain", "i", "--n", "6", "--p", "0.181818")
    dev = float(res.output.split("max_deviation_from_uniform=")[1].split()[0])
    assert res.exit_code == 0 and dev < 1e-7


def test_stationary_limits():
    assert invoke("stationary", "--n", "10").exit_code == 2
    assert invoke("stationary", "--n", "6", "--chain", "metropolis", "--q", "2").exit_code == 2


def test_bounds_csv():
    res = invoke("bounds", "--p", "0.5", "--p", "0.9")
    assert res.exit_code == 0
    rows = dict(list(csv.reader(io.StringIO(res.output)))[1:])
    assert 0.2748 < float(rows["s_plus"]) < 0.2749
    assert 0.6268 < float(rows["upper_root"]) < 0.6269
    assert float(rows["chain1_lower[p=0.5]"]) == pytest.approx(0.5 / 40.5)
    assert "chain1_lower[p=0.9]" in rows
    assert invoke("bounds", "--p", "1").exit_code == 2


def test_sample_uniform(tmp_path):
    res = invoke("sample-uniform", "--n", "10", "--count", "5", "--seed", "3")
    assert res.exit_code == 0
    lines = res.output_bytes.splitlines()
    assert len(lines) == 5 and all(from_graph6(l).n == 10 for l in lines)
    again = invoke("sample-uniform", "--n", "10", "--count", "5", "--seed", "3")
    assert again.output_bytes == res.output_bytes
    assert invoke("sample-uniform", "--n", "9").exit_code == 2
