"""Protocol parameters: slack choice, rounding, and feasibility checks.

Every real-valued quantity is converted to an exact rational before rounding
so that, e.g., n(r - delta_tilde) = 140 does not become 139.999... .
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

from ..analysis.capacity import capacities

VARIANTS = (
    "c2p", "c1p", "oneofN_2p", "oneofN_1p", "two_party",
    "mal_le_half", "mal_gt_half", "independent_pair", "degraded",
)


class ParameterError(ValueError):
    pass


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(10 ** 9)


def _floor(x: Fraction) -> int:
    return math.floor(x)


@dataclass(frozen=True)
class ProtocolParams:
    """Sizes and slacks for one protocol instance.

    ``key_len`` is the string length m (m_B for the independent pair).
    ``beta_n`` is the length of each hash input (|L_i|, or |L_i u G_S| for
    the degraded protocol). Variant-specific sizes default to 0.
    """

    variant: str
    n: int
    eps1: float
    eps2: float
    r: float
    delta: float
    delta_tilde: float
    beta: float
    key_len: int
    beta_n: int
    N: int = 2
    delta_prime: float = 0.0
    gamma: float = 0.0
    nr: int = 0
    gamma_n: int = 0
    ih_bits: int = 0
    sel_len: int = 0
    gl_len: int = 0
    gs_len: int = 0
    cathy_len: int = 0
    cathy_key_len: int = 0

    @property
    def rate(self) -> float:
        return self.key_len / self.n

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ProtocolParams":
        return cls(**d)

    def with_sizes(self, **sizes) -> "ProtocolParams":
        """Copy with explicit sizes, for hand-built tiny instances."""
        return replace(self, **sizes)


def _largest(pred, hi: float = 1.0) -> float:
    """Largest x in [0, hi) with pred(x) true, assuming pred is monotone."""
    lo = 0.0
    if not pred(lo):
        return 0.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _spread(p: float, n: int) -> float:
    """Three standard deviations of an empirical erasure fraction."""
    return 3.0 * math.sqrt(max(p * (1 - p), 1e-9) / n)


def variant_capacity(variant: str, e1: float, e2: float, N: int = 2) -> float:
    """Upper end of the rates a variant accepts (its capacity or achievable bound)."""
    cap = capacities(e1, e2, N)
    return {
        "c2p": cap.c2p,
        "c1p": cap.c1p,
        "oneofN_2p": cap.c2p_N,
        "oneofN_1p": cap.c1p_N,
        "two_party": min(e1, 1 - e1),
        "mal_le_half": e1 * e2,
        "mal_gt_half": e1 * cap.c2p,
        "independent_pair": cap.c2p,
        "degraded": cap.degraded_lower,
    }[variant]


def derive_params(variant: str, r: float, eps1: float, eps2: float, n: int, *,
                  N: int = 2, delta: float | None = None, delta_tilde: float | None = None,
                  delta_prime: float | None = None, r_c: float | None = None,
                  tune_n: bool = False) -> ProtocolParams:
    """Choose slacks, round all lengths, and check the rate constraints.

    ``r`` is the rate parameter of the variant's parameter block; the
    resulting string length is ``key_len`` (about n(r - delta_tilde) for the
    honest-but-curious variants, r*n for the malicious ones).
    Unspecified slacks get defaults: delta is three standard deviations of
    the erasure fraction (capped at half the feasible maximum) and
    delta_tilde is r/20.
    """
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")
    if not (0 <= eps1 <= 1 and 0 <= eps2 <= 1):
        raise ParameterError("erasure probabilities must lie in [0, 1]")
    if n < 1:
        raise ParameterError("block length must be positive")
    if N < 2:
        raise ParameterError("N must be at least 2")
    if variant not in ("oneofN_2p", "oneofN_1p") and N != 2:
        raise ParameterError(f"variant {variant} is a 1-of-2 protocol")
    cap = variant_capacity(variant, eps1, eps2, N)
    if not 0 < r < cap:
        raise ParameterError(f"rate {r} must lie strictly between 0 and the achievable bound {cap:.6g}")
    build = _BUILDERS[variant]
    return build(variant, r, eps1, eps2, n, N, delta, delta_tilde, delta_prime, r_c, tune_n)


def _pick_delta(delta, feasible, e1, n, extra_spread: float = 0.0) -> float:
    dmax = _largest(feasible)
    if delta is None:
        if dmax <= 0:
            raise ParameterError("no positive slack satisfies the rate constraint")
        delta = min(max(_spread(e1, n), extra_spread), dmax / 2)
    elif not feasible(delta):
        raise ParameterError(f"delta={delta} violates the rate constraint (largest feasible {dmax:.6g})")
    if delta <= 0:
        raise ParameterError("delta must be positive")
    return delta


def _check_lengths(**lengths):
    for name, value in lengths.items():
        if value <= 0:
            raise ParameterError(f"n too small: {name} rounds to {value}")


def _selection_ot(variant, r, e1, e2, n, N, delta, dt, dp, r_c, tune_n):
    one_privacy = variant in ("c1p", "oneofN_1p")
    mn = min(e1, 1 - e1)
    if one_privacy:
        def feasible(d):
            return d < min(e1, e2) and r <= min((e1 - d) / (N - 1), (e2 - d) / N, (e2 - d) * (1 - e1 - d))
    else:
        def feasible(d):
            return d < min(e2, mn) and r <= (e2 - d) * min((e1 - d) / (N - 1), 1 - e1 - d)
    delta = _pick_delta(delta, feasible, e1, n)
    dt = r / 20 if dt is None else dt
    if not 0 < dt < r:
        raise ParameterError("delta_tilde must lie in (0, r)")
    R, D, DT = _q(r), _q(delta), _q(dt)
    beta = R / (_q(e2) - D)
    beta_n = _floor(beta * n)
    key_len = _floor(n * (R - DT))
    nr = _floor(n * R) if one_privacy else 0
    _check_lengths(beta_n=beta_n, key_len=key_len)
    if N * beta_n > n:
        raise ParameterError("selections do not fit in the block")
    if one_privacy:
        if not key_len < nr <= beta_n:
            raise ParameterError("rounding left no privacy margin against Bob")
    elif not key_len < (_q(e2) - D) * beta_n:
        raise ParameterError("rounding left no privacy-amplification margin")
    return ProtocolParams(variant=variant, n=n, eps1=e1, eps2=e2, r=r, delta=delta,
                          delta_tilde=dt, beta=float(beta), key_len=key_len, beta_n=beta_n,
                          N=N, nr=nr)


def _two_party(variant, r, e1, e2, n, N, delta, dt, dp, r_c, tune_n):
    delta = _pick_delta(delta, lambda d: r <= min(e1, 1 - e1) - d, e1, n)
    pad = _floor(n * _q(r))
    _check_lengths(key_len=pad)
    return ProtocolParams(variant=variant, n=n, eps1=e1, eps2=e2, r=r, delta=delta,
                          delta_tilde=0.0, beta=r, key_len=pad, beta_n=pad, nr=pad)


def _independent_pair(variant, r, e1, e2, n, N, delta, dt, dp, r_c, tune_n):
    p = _selection_ot("c2p", r, e1, e2, n, 2, delta, dt, dp, None, tune_n)
    if e1 <= 0.5:
        if r_c:
            raise ParameterError("Cathy's rate is zero when eps1 <= 1/2")
        return replace(p, variant=variant)
    D = _q(p.delta)
    cathy_len = _floor((_q(e1) - D - _q(p.beta)) * n)
    if cathy_len <= 0:
        raise ParameterError("no erasures left for Cathy's block")
    m2 = min(_q(e2), 1 - _q(e2))
    room = (m2 - D) * cathy_len
    if r_c is None:
        cathy_key = _floor(Fraction(4, 5) * room)
    else:
        bound = (2 * e1 - 1) * min(e2, 1 - e2)
        if not 0 <= r_c < bound:
            raise ParameterError(f"Cathy's rate {r_c} must be below {bound:.6g}")
        cathy_key = _floor(_q(r_c) * n)
        if cathy_key > room:
            raise ParameterError("Cathy's rate does not fit in her block with this delta")
    _check_lengths(cathy_key_len=cathy_key)
    return replace(p, variant=variant, cathy_len=cathy_len, cathy_key_len=cathy_key)


def _degraded(variant, r, e1, e2, n, N, delta, dt, dp, r_c, tune_n):
    def feasible(d):
        return d < min(e1, e2) and r <= min((e2 - d) * (1 - e1 - d) / 3, e1 - d)
    delta = _pick_delta(delta, feasible, e1, n)
    dt = r / 20 if dt is None else dt
    if not 0 < 2 * dt < r:
        raise ParameterError("delta_tilde must lie in (0, r/2)")
    R, D, DT, E2 = _q(r), _q(delta), _q(dt), _q(e2)
    beta = (R - DT) / (E2 - D)
    sel = _floor(beta * n * (E2 - D))
    gl = _floor(2 * beta * n * R / (R - DT))
    gs = _floor(beta * n * (1 - (E2 - D)))
    key_len = _floor(n * (R - 2 * DT))
    _check_lengths(sel_len=sel, gl_len=gl, key_len=key_len)
    if 2 * sel > gl:
        raise ParameterError("pad source shorter than the membership string")
    if key_len >= sel:
        raise ParameterError("rounding left no privacy margin against Bob")
    return ProtocolParams(variant=variant, n=n, eps1=e1, eps2=e2, r=r, delta=delta,
                          delta_tilde=dt, beta=float(beta), key_len=key_len,
                          beta_n=sel + gs, sel_len=sel, gl_len=gl, gs_len=gs)


def _mal_le_half(variant, r, e1, e2, n, N, delta, dt, dp, r_c, tune_n):
    if e1 > 0.5:
        raise ParameterError("this protocol needs eps1 <= 1/2")
    slack = e1 * e2 - r
    if delta is None:
        delta = min(_spread(e1, n), slack / 5)
    if dt is None:
        rest = slack - 5 * delta
        dt = -delta / 2 if e1 == 0.5 else min(rest / 4, (0.5 - e1) / 2)
    if dp is None:
        dp = slack - 5 * delta - 2 * dt
    if delta <= 0 or dp <= 0:
        raise ParameterError("slacks must be positive")
    if abs(5 * delta + 2 * dt + dp - slack) > 1e-12:
        raise ParameterError("slacks must add up to eps1*eps2 - r")
    D, DT = _q(delta), _q(dt)
    beta = Fraction(1, 2) - D - DT
    gamma = Fraction(1, 2) - _q(e1) - DT
    if beta <= 0 or gamma <= 0:
        raise ParameterError("beta and gamma must be positive")
    beta_n = _floor(beta * n)
    gamma_n = _floor(gamma * n)
    key_len = _floor(_q(r) * n)
    _check_lengths(beta_n=beta_n, gamma_n=gamma_n, key_len=key_len)
    if gamma_n > beta_n or key_len > beta_n:
        raise ParameterError("inconsistent rounded sizes")
    ih_bits = (math.comb(beta_n, gamma_n) - 1).bit_length()
    if ih_bits < 2:
        raise ParameterError("interactive hashing needs at least 2 bits")
    return ProtocolParams(variant=variant, n=n, eps1=e1, eps2=e2, r=r, delta=delta,
                          delta_tilde=dt, delta_prime=dp, beta=float(beta), gamma=float(gamma),
                          key_len=key_len, beta_n=beta_n, gamma_n=gamma_n, ih_bits=ih_bits)


def protocol4_fill(n: int, beta: float) -> tuple[int, int, float]:
    """(beta_n, m, C(n, beta_n) / 2^m) for the eps1 > 1/2 malicious protocol codec."""
    beta_n = _floor(_q(beta) * n)
    count = math.comb(n, beta_n)
    m = (count - 1).bit_length()
    return beta_n, m, math.exp(math.log(count) - m * math.log(2))


def protocol4_search_n(n: int, beta: float, window: int = 100) -> int:
    """The n within +-window maximising C(n, beta n)/2^m (fewest step-5 aborts)."""
    best = max(range(max(2, n - window), n + window + 1),
               key=lambda k: (protocol4_fill(k, beta)[2], -abs(k - n)))
    return best


def _mal_gt_half(variant, r, e1, e2, n, N, delta, dt, dp, r_c, tune_n):
    if e1 <= 0.5:
        raise ParameterError("this protocol needs eps1 > 1/2")

    def feasible(d):
        b = 1 - e1 - d
        return 0 < b and r / b < e1 * e2 - 3 * d

    # The overlap |L0 n L1|/(beta n) fluctuates with standard deviation
    # about (1 - beta)/sqrt(n); the window of step 6 must cover it.
    delta = _pick_delta(delta, feasible, e1, n, extra_spread=3.0 * e1 / math.sqrt(n))
    beta = 1 - _q(e1) - _q(delta)
    if dp is None:
        dp = e1 * e2 - 3 * delta - r / float(beta)
    if dp <= 0:
        raise ParameterError("delta_prime must be positive")
    if tune_n:
        n = protocol4_search_n(n, float(beta))
    beta_n, m, _ = protocol4_fill(n, float(beta))
    key_len = _floor(beta_n * (_q(e1) * _q(e2) - 3 * _q(delta) - _q(dp)))
    _check_lengths(beta_n=beta_n, key_len=key_len)
    if m < 2:
        raise ParameterError("interactive hashing needs at least 2 bits")
    return ProtocolParams(variant=variant, n=n, eps1=e1, eps2=e2, r=r, delta=delta,
                          delta_tilde=0.0, delta_prime=dp, beta=float(beta),
                          key_len=key_len, beta_n=beta_n, ih_bits=m)


_BUILDERS = {
    "c2p": _selection_ot,
    "c1p": _selection_ot,
    "oneofN_2p": _selection_ot,
    "oneofN_1p": _selection_ot,
    "two_party": _two_party,
    "independent_pair": _independent_pair,
    "degraded": _degraded,
    "mal_le_half": _mal_le_half,
    "mal_gt_half": _mal_gt_half,
}
