from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import brentq

from trichain.bounds import (BREAK_LOSS_TABLE, AllZero, DriftReport, chain1_lower, chain1_quadratic,
                             chain1_root, chain1_root_bound, f_lower, g_upper, psi, psi_prime,
                             psi_within_free_bound, s_plus, s_plus_numeric, upper_root,
                             upper_root_numeric)


def test_values_at_zero():
    assert f_lower(0) == 3
    assert g_upper(0) == pytest.approx(8 / 3, abs=0)


def test_s_plus_bracket():
    assert f_lower(0.2748) > 0 > f_lower(0.275)
    assert 0.2748 < s_plus() < 0.2749
    assert abs(f_lower(s_plus())) < 1e-13


def test_upper_root_bracket():
    r = upper_root()
    assert 0.6268 < r < 0.6269 and r < 0.627
    assert g_upper(0.63) < 0
    assert abs(g_upper(r)) < 1e-13


def test_closed_forms_match_bisection():
    assert abs(s_plus() - s_plus_numeric()) < 1e-12
    assert abs(upper_root() - upper_root_numeric()) < 1e-12
    # and a third route through numpy's polynomial roots
    r = np.roots([-10 / 3, -10, 3])
    assert abs(max(r.real) - s_plus()) < 1e-12


def test_chain1_lower():
    assert chain1_lower(0.5) == pytest.approx(0.5 / 40.5)
    assert chain1_lower(1 - 1e-12) == pytest.approx(1 / 9, rel=1e-9)
    ps = np.linspace(0.01, 0.99, 99)
    vals = [chain1_lower(p) for p in ps]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    for bad in (0, 1, -0.1, 1.5):
        with pytest.raises(ValueError):
            chain1_lower(bad)


def test_chain1_quadratic_negative_at_zero():
    for p in np.linspace(0.05, 0.95, 19):
        assert chain1_quadratic(0.0, p) < 0


@pytest.mark.parametrize("p", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
def test_chain1_root_against_numeric(p):
    r = chain1_root(p)
    num = brentq(chain1_quadratic, 0.0, 1.0, args=(p,), xtol=1e-15)
    assert abs(r - num) < 1e-12
    assert r >= chain1_root_bound(p)
    # a third of the simpler bound is the per-vertex triangle density
    assert chain1_root_bound(p) / 3 == pytest.approx(chain1_lower(p))


def test_chain1_root_tiny_p():
    # the rationalized form keeps full precision as p -> 0
    p = 1e-12
    assert chain1_root(p) == pytest.approx(p / 16, rel=1e-9)


def test_psi_examples():
    assert psi(3, 0, 6) == Fraction(8, 3)
    assert psi_prime(3, 0, 0, 6) == 2
    assert psi_prime(3, 0, 6, 0) == Fraction(8, 3)
    for k in (1, 2, 9):
        assert psi(0, 0, k) == 2
    assert psi(1, 0, 0) == 4


def test_psi_errors():
    with pytest.raises(AllZero):
        psi(0, 0, 0)
    with pytest.raises(AllZero):
        psi_prime(0, 0, 0, 0)
    with pytest.raises(ValueError):
        psi(-1, 2, 3)
    assert issubclass(AllZero, ValueError)


def test_linear_form_equivalence():
    for s in range(1, 13):
        for i in range(s + 1):
            for j in range(s - i + 1):
                k = s - i - j
                assert psi_within_free_bound(i, j, k) == (psi(i, j, k) <= Fraction(8, 3))
                assert psi_within_free_bound(i, j, k) == (3 * (2 * i + j) <= 2 * s)


def test_drift_report():
    rep = DriftReport.compute(0.5)
    assert rep.alpha == pytest.approx(s_plus() / 3)
    assert rep.chain1_bound == chain1_lower(0.5)
    names = [r[0] for r in rep.csv_rows()]
    assert names == ["s_plus", "upper_root", "alpha", "p", "chain1_lower"]
    assert [r[0] for r in DriftReport.compute().csv_rows()] == ["s_plus", "upper_root", "alpha"]


def test_break_loss_table_shape():
    assert set(BREAK_LOSS_TABLE) == {"tetrahedron", "diamond or isolated triangle"}
    assert max(max(v) for v in BREAK_LOSS_TABLE.values()) == 8
    # the closed form for s_plus uses nothing beyond the coefficients
    assert s_plus() == pytest.approx(3 * (-10 + math.sqrt(140)) / 20)
