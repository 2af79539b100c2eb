"""Drift functions for the long-run triangle density and their roots.

``s`` is the fraction of vertices lying on a triangle, ``x = Delta / n`` the
number of triangles per vertex.  Each root is available in closed form and
by bisection so the two can be compared.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from scipy.optimize import bisect


class AllZero(ValueError):
    pass


def f_lower(s: float) -> float:
    """Lower bound on the Chain II drift of the number of vertices on triangles."""
    return 3.0 - 10.0 * s - (10.0 / 3.0) * s * s


def g_upper(x: float) -> float:
    """Upper bound on the drift with x triangles per vertex."""
    return 8.0 / 3.0 - 3.0 * x - 2.0 * x * x


def s_plus() -> float:
    """Positive root of ``f_lower``: 3(-10 + sqrt(140))/20."""
    return 3.0 * (-10.0 + math.sqrt(140.0)) / 20.0


def s_plus_numeric(xtol: float = 1e-15) -> float:
    return bisect(f_lower, 0.0, 1.0, xtol=xtol, rtol=4 * 2.0 ** -52)


def upper_root() -> float:
    """Positive root of ``g_upper``: (-9 + sqrt(273))/12."""
    return (-9.0 + math.sqrt(273.0)) / 12.0


def upper_root_numeric(xtol: float = 1e-15) -> float:
    return bisect(g_upper, 0.0, 1.0, xtol=xtol, rtol=4 * 2.0 ** -52)


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")


def chain1_lower(p: float) -> float:
    """Long-run triangles per vertex guaranteed for Chain I: p / (72 - 63p)."""
    _check_p(p)
    return p / (72.0 - 63.0 * p)


def chain1_quadratic(s: float, p: float) -> float:
    """Make-minus-break drift in s for Chain I; negative at s = 0."""
    return s * s * 10.0 * (1.0 - p) / 3.0 + s * (4.0 - 3.5 * p) - p / 4.0


def chain1_root(p: float) -> float:
    """Positive root of ``chain1_quadratic`` (closed form)."""
    _check_p(p)
    a = 10.0 * (1.0 - p) / 3.0
    b = 4.0 - 3.5 * p
    c = -p / 4.0
    # the rationalized form avoids cancellation when 4ac is small
    return 2.0 * (-c) / (b + math.sqrt(b * b - 4.0 * a * c))


def chain1_root_bound(p: float) -> float:
    """The simpler lower bound p / (24 - 21p) on ``chain1_root``."""
    _check_p(p)
    return p / (24.0 - 21.0 * p)


def psi(i: int, j: int, k: int) -> Fraction:
    """Mean gain when i, j, k path-pairs create 4, 3, 2 triangles."""
    return _weighted((i, j, k), (4, 3, 2))


def psi_prime(i: int, j: int, l: int, m: int) -> Fraction:
    """Mean gain when i, j, l, m path-pairs create 4, 3, 2, 1 triangles."""
    return _weighted((i, j, l, m), (4, 3, 2, 1))


def _weighted(counts, weights) -> Fraction:
    if any(c < 0 for c in counts):
        raise ValueError("tallies must be non-negative")
    total = sum(counts)
    if total == 0:
        raise AllZero("at least one tally must be positive")
    return Fraction(sum(w * c for w, c in zip(weights, counts)), total)


def psi_within_free_bound(i: int, j: int, k: int) -> bool:
    """psi(i, j, k) <= 8/3, decided through the linear form 2i + j <= 2s/3."""
    return 3 * (2 * i + j) <= 2 * (i + j + k)


# Worst-case loss of vertices lying on a triangle under break(vxw, yz), by the
# kind of triangle vxw (rows) and where the edge yz sits (columns: inside a
# tetrahedron, on a triangle outside tetrahedra, on no triangle).  These are
# the constants behind f_lower; kept for reference, not recomputed.
BREAK_LOSS_TABLE = {
    "tetrahedron": (0, 4, 0),
    "diamond or isolated triangle": (4, 8, 4),
}


@dataclass(frozen=True)
class DriftReport:
    s_plus: float
    x_upper: float
    p: float | None = None
    chain1_bound: float | None = None

    @property
    def alpha(self) -> float:
        """Triangles per vertex implied by s_plus (each triangle covers 3 vertices)."""
        return self.s_plus / 3.0

    @classmethod
    def compute(cls, p: float | None = None) -> "DriftReport":
        return cls(s_plus(), upper_root(), p, None if p is None else chain1_lower(p))

    def csv_rows(self) -> list[tuple[str, float]]:
        rows = [("s_plus", self.s_plus), ("upper_root", self.x_upper), ("alpha", self.alpha)]
        if self.p is not None:
            rows += [("p", self.p), ("chain1_lower", self.chain1_bound)]
        return rows
