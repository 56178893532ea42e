"""Closed-form OT capacities and the independent-pair rate region.

All formulas use only +, -, *, / and min so that Fraction inputs give exact
rational outputs.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction


def _check_prob(name, p):
    if not 0 <= p <= 1:
        raise ValueError(f"{name}={p} is not a probability")


def c2p(e1, e2):
    return e2 * min(e1, 1 - e1)


def c1p(e1, e2):
    """1-private capacity, branch by branch."""
    if e1 < e2 / 2:
        return e1
    if e1 < Fraction(1, 2):
        return e2 / 2
    return e2 * (1 - e1)


def c2p_n(e1, e2, N: int):
    return e2 * min(e1 / (N - 1), 1 - e1)


def c1p_n(e1, e2, N: int):
    a = e1 / (N - 1)
    if a < e2 / N:
        return a
    if a < Fraction(1, N):
        return e2 / N
    return e2 * (1 - e1)


def degraded_bounds(e1, e2):
    lower = min(e2 * (1 - e1) / 3, e1)
    upper = min(e2 * (1 - e1), e1)
    return lower, upper


def c1p_regime(e1, e2) -> str:
    if e1 < e2 / 2:
        return "eps1 < eps2/2"
    if e1 < Fraction(1, 2):
        return "eps2/2 <= eps1 < 1/2"
    return "eps1 >= 1/2"


@dataclass(frozen=True)
class CapacityReport:
    eps1: float
    eps2: float
    N: int
    c2p: float
    c1p: float
    c2p_N: float
    c1p_N: float
    degraded_lower: float
    degraded_upper: float
    c2p_regime: str
    c1p_regime: str
    malicious_rate: float

    def to_dict(self) -> dict:
        return asdict(self)


def capacities(eps1, eps2, N: int = 2) -> CapacityReport:
    """Every capacity expression at one channel point.

    ``malicious_rate`` is the achievable rate with malicious users:
    eps1*eps2 for eps1 <= 1/2 and eps1*eps2*(1 - eps1) above.
    """
    _check_prob("eps1", eps1)
    _check_prob("eps2", eps2)
    if N < 2:
        raise ValueError("N must be at least 2")
    lower, upper = degraded_bounds(eps1, eps2)
    mal = eps1 * eps2 if eps1 <= Fraction(1, 2) else eps1 * eps2 * (1 - eps1)
    return CapacityReport(
        eps1=eps1, eps2=eps2, N=N,
        c2p=c2p(eps1, eps2),
        c1p=c1p(eps1, eps2),
        c2p_N=c2p_n(eps1, eps2, N),
        c1p_N=c1p_n(eps1, eps2, N),
        degraded_lower=lower,
        degraded_upper=upper,
        c2p_regime="eps1 <= 1/2" if eps1 <= Fraction(1, 2) else "eps1 > 1/2",
        c1p_regime=c1p_regime(eps1, eps2),
        malicious_rate=mal,
    )


@dataclass(frozen=True)
class Polygon:
    """Region {x >= 0, y >= 0, x <= bx, y <= by, x + y <= s}.

    ``vertices`` is the closed boundary in counterclockwise order starting at
    the origin, with repeated points removed.
    """

    bx: float
    by: float
    s: float
    vertices: tuple

    def contains(self, x, y, tol: float = 1e-12) -> bool:
        return (x >= -tol and y >= -tol and x <= self.bx + tol
                and y <= self.by + tol and x + y <= self.s + tol)


def _same(p, q) -> bool:
    return abs(p[0] - q[0]) <= 1e-14 and abs(p[1] - q[1]) <= 1e-14


def _polygon(bx, by, s) -> Polygon:
    bx, by = min(bx, s), min(by, s)
    pts = [(0 * s, 0 * s), (bx, 0 * s), (bx, min(s - bx, by)), (min(s - by, bx), by), (0 * s, by)]
    verts = []
    for p in pts:
        if not verts or not _same(verts[-1], p):
            verts.append(p)
    while len(verts) > 1 and _same(verts[-1], verts[0]):
        verts.pop()
    return Polygon(bx, by, s, tuple(verts))


@dataclass(frozen=True)
class RateRegion:
    eps1: float
    eps2: float
    inner: Polygon
    outer: Polygon

    def breakpoints(self) -> dict:
        """Axis intercepts and corner coordinates of the inner region."""
        p = self.inner
        return {"rb_max": p.bx, "rc_max": p.by, "sum": p.s,
                "rb_at_rc_max": min(p.s - p.by, p.bx), "rc_at_rb_max": min(p.s - p.bx, p.by)}


def rate_region(eps1, eps2) -> RateRegion:
    """Inner and outer bounds on the independent-pair rate region."""
    _check_prob("eps1", eps1)
    _check_prob("eps2", eps2)
    m1 = min(eps1, 1 - eps1)
    m2 = min(eps2, 1 - eps2)
    a = eps2 * m1
    b = eps1 * m2
    inner = _polygon(a, b, a + b - m1 * m2)
    outer = _polygon(a, b, eps1 * eps2)
    return RateRegion(eps1, eps2, inner, outer)
