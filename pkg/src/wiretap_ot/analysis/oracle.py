"""Exact leakage at toy block lengths by exhaustive enumeration.

Every discrete random choice the protocol makes (Bob's choice, both
erasure patterns, Bob's selection draws and every hash function in the
family) is enumerated with its exact probability. The uniform variables
(X and Alice's strings) are handled in closed form at each enumerated
point: once the structural choices are fixed, a hashed pad seen by an
observer who knows some of its input bits is uniform on a coset of the
image of the hash restricted to the unknown positions, and translating by
the known bits does not change any mutual information. The inner
information quantities are then computed by enumerating the pad values.

Supported: the 2-private protocol (``c2p``) and the degraded-channel
protocol (``degraded``).
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from ..gf2 import BitMatrix, rank
from ..index_codec import binomial
from ..protocols.degraded import abort_site as degraded_abort
from ..protocols.params import ProtocolParams
from ..protocols.selection import counts_abort

ORACLE_BUDGET = 2 ** 30
FAMILIES = ("full", "surjective")


class OracleBudgetError(ValueError):
    def __init__(self, size: int, budget: int):
        super().__init__(f"enumeration size {size:.3e} exceeds the budget {budget:.3e}")
        self.size = size
        self.budget = budget


@dataclass
class LeakageReport:
    """Exact information quantities in bits; None where not computed for the variant."""

    variant: str
    params: dict
    family: str
    enumeration_size: int
    p_abort: float
    p_err: float
    i_kbar_bobeve: float | None = None
    i_kbar_bob: float | None = None
    i_u_aliceeve: float | None = None
    i_u_alice: float | None = None
    i_u_eve: float | None = None
    i_all_eve: float | None = None
    p_reconstruction_fail: float | None = None
    bounds: dict = field(default_factory=dict)
    methods: dict = field(default_factory=dict)

    @property
    def restricted(self) -> bool:
        return self.family != "full"

    @property
    def family_label(self) -> str:
        return "restricted-family: surjective matrices" if self.restricted else "full family"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["restricted_family"] = self.restricted
        d["family_label"] = self.family_label
        return d


def tiny_params(variant: str, eps1: float | None = None, eps2: float | None = None) -> ProtocolParams:
    """Hand-sized instances small enough to enumerate."""
    if variant == "c2p":
        e1, e2 = 0.5 if eps1 is None else eps1, 0.5 if eps2 is None else eps2
        return ProtocolParams("c2p", n=6, eps1=e1, eps2=e2, r=1 / 6, delta=0.0, delta_tilde=0.0,
                              beta=1 / 3, key_len=1, beta_n=2)
    if variant == "degraded":
        e1, e2 = 0.25 if eps1 is None else eps1, 0.5 if eps2 is None else eps2
        return ProtocolParams("degraded", n=8, eps1=e1, eps2=e2, r=1 / 8, delta=0.25, delta_tilde=0.0,
                              beta=1 / 4, key_len=1, beta_n=2, sel_len=1, gl_len=2, gs_len=1)
    raise ValueError(f"no oracle for variant {variant!r}")


def family_size(rows: int, cols: int, family: str) -> int:
    if family == "full":
        return 2 ** (rows * cols)
    if family == "surjective":
        count = 1
        for i in range(rows):
            count *= 2 ** cols - 2 ** i
        return count
    raise ValueError(f"unknown hash family {family!r}; expected one of {FAMILIES}")


def estimate_oracle_size(params: ProtocolParams, family: str = "full") -> int:
    """inputs x erasure-pattern pairs x hash draws x selection draws."""
    n, l = params.n, params.key_len
    if params.variant == "c2p":
        N, bn = params.N, params.beta_n
        sel = binomial(n, bn) * binomial(n - bn, (N - 1) * bn)
        return 2 ** (N * l) * N * 4 ** n * family_size(l, bn, family) ** N * sel
    if params.variant == "degraded":
        s = params.sel_len
        sel = binomial(n, s) * binomial(n - s, s)
        hashes = family_size(2 * s, params.gl_len, family) * family_size(l, params.beta_n, family) ** 2
        return 2 ** (2 * l) * 2 * 3 ** n * hashes * sel
    raise ValueError(f"no oracle for variant {params.variant!r}")


@lru_cache(maxsize=None)
def _family(rows: int, cols: int, family: str) -> tuple[np.ndarray, ...]:
    out = []
    for flat in itertools.product((0, 1), repeat=rows * cols):
        m = np.array(flat, dtype=np.uint8).reshape(rows, cols)
        if family == "surjective" and rank(BitMatrix.from_bits(m)) != rows:
            continue
        out.append(m)
    return tuple(out)


def _to_int(bits) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | int(b)
    return v


@lru_cache(maxsize=None)
def _pad_values(rows: int, cols: int, family: str, unknown: tuple) -> tuple[np.ndarray, ...]:
    """For each family member, pad values over all fillings of the unknown inputs (known ones fixed at 0)."""
    idx = [i for i, u in enumerate(unknown) if u]
    out = []
    for m in _family(rows, cols, family):
        sub = m[:, idx]
        vals = [_to_int(sub @ np.array(a, dtype=np.int64) % 2) if idx else 0
                for a in itertools.product((0, 1), repeat=len(idx))]
        out.append(np.array(vals, dtype=np.int64))
    return tuple(out)


def mutual_information(joint: np.ndarray) -> float:
    """I(A;B) in bits from a 2-D joint probability (or weight) table."""
    joint = np.asarray(joint, dtype=float)
    total = joint.sum()
    if total <= 0:
        return 0.0
    p = joint / total
    pa = p.sum(axis=1, keepdims=True)
    pb = p.sum(axis=0, keepdims=True)
    nz = p > 0
    return float(max(0.0, np.sum(p[nz] * np.log2(p[nz] / (pa @ pb)[nz]))))


@lru_cache(maxsize=None)
def _key_leak(rows: int, cols: int, family: str, unknown: tuple) -> float:
    """Family-averaged I(K; K xor F(A)) for uniform K and A uniform on the unknown inputs."""
    size = 2 ** rows
    total = 0.0
    pads = _pad_values(rows, cols, family, unknown)
    for vals in pads:
        joint = np.zeros((size, size))
        for k in range(size):
            np.add.at(joint[k], k ^ vals, 1.0)
        total += mutual_information(joint)
    return total / len(pads)


def _pa_term(l: int, c: int) -> float:
    """min(l, log2(1 + 2^(l - c))): privacy-amplification bound on one key's leakage."""
    return min(float(l), math.log2(1.0 + 2.0 ** (l - c)))


def _erasure_patterns(n: int, eps: float):
    for mask in range(2 ** n):
        k = bin(mask).count("1")
        prob = eps ** k * (1 - eps) ** (n - k)
        if prob > 0:
            yield mask, prob


def _bits(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if mask >> i & 1]


def _setmask(positions) -> int:
    return sum(1 << int(i) for i in positions)


def _table_mi(table: dict) -> float:
    return mutual_information(np.array(list(table.values())).T) if table else 0.0


def exact_leakage_oracle(variant: str, params: ProtocolParams | None = None, family: str = "full",
                         budget: int = ORACLE_BUDGET) -> LeakageReport:
    """Exact leakage quantities for a toy instance; rejects oversized enumerations."""
    params = params or tiny_params(variant)
    if params.variant != variant:
        raise ValueError(f"parameters are for {params.variant}, not {variant}")
    if family not in FAMILIES:
        raise ValueError(f"unknown hash family {family!r}; expected one of {FAMILIES}")
    if params.n > 8:
        raise OracleBudgetError(estimate_oracle_size(params, family), budget)
    size = estimate_oracle_size(params, family)
    if size > budget:
        raise OracleBudgetError(size, budget)
    if variant == "c2p":
        if params.N != 2:
            raise ValueError("the oracle covers 1-of-2 transfers only")
        report = _oracle_c2p(params, family)
    else:
        report = _oracle_degraded(params, family)
    return replace(report, enumeration_size=size)


def _oracle_c2p(p: ProtocolParams, family: str) -> LeakageReport:
    n, bn, l = p.n, p.beta_n, p.key_len
    zs = list(_erasure_patterns(n, p.eps2))
    # P(U = u, L0, L1, Z pattern): Alice and Eve see the selections and Eve the
    # pattern; hashes, strings and X are independent of U and drop out.
    joint = defaultdict(lambda: [0.0, 0.0])
    p_abort = p_err = 0.0
    leak_bar = bound_bar = leak_eve = bound_eve = 0.0
    for ymask, py in _erasure_patterns(n, p.eps1):
        erased = _bits(ymask, n)
        received = [i for i in range(n) if not ymask >> i & 1]
        if counts_abort(len(erased), len(received), p):
            p_abort += py
            for u in (0, 1):
                joint["abort"][u] += py / 2
            continue
        goods = list(itertools.combinations(received, bn))
        bads = list(itertools.combinations(erased, bn))
        pw = py / (2 * len(goods) * len(bads))
        for u, good, bad in itertools.product((0, 1), goods, bads):
            sels = (good, bad) if u == 0 else (bad, good)
            if any(ymask >> i & 1 for i in sels[u]):
                p_err += pw
            keys = (_setmask(sels[0]), _setmask(sels[1]))
            other = sels[1 - u]
            for zmask, pz in zs:
                w = pw * pz
                joint[keys + (zmask,)][u] += w
                psi_unknown = tuple(bool((ymask & zmask) >> i & 1) for i in other)
                leak_bar += w * _key_leak(l, bn, family, psi_unknown)
                bound_bar += w * _pa_term(l, sum(psi_unknown))
                for sel in sels:
                    unknown = tuple(bool(zmask >> i & 1) for i in sel)
                    leak_eve += w * _key_leak(l, bn, family, unknown)
                    bound_eve += w * _pa_term(l, sum(unknown))
    i_u = _table_mi(joint)
    done = 1.0 - p_abort
    return LeakageReport(
        variant="c2p", params=p.to_dict(), family=family, enumeration_size=0,
        p_abort=p_abort, p_err=p_err / done if done > 0 else 0.0,
        i_kbar_bobeve=leak_bar, i_u_aliceeve=i_u, i_all_eve=i_u + leak_eve,
        bounds={"i_kbar_bobeve": bound_bar, "i_all_eve": bound_eve},
        methods={"i_kbar_bobeve": "exact", "i_u_aliceeve": "exact", "i_all_eve": "exact", "p_err": "exact"},
    )


def _oracle_degraded(p: ProtocolParams, family: str) -> LeakageReport:
    n, s, l = p.n, p.sel_len, p.key_len
    qlen = 2 * s
    joint_alice = defaultdict(lambda: [0.0, 0.0])
    # Eve's structural view g = (Z pattern, G~, B~); per g and U the law of Q,
    # plus which G~_L inputs Eve lacks.
    groups: dict = {}
    p_abort = p_err = p_recon = leak_bob = bound_bob = 0.0
    for ymask, py in _erasure_patterns(n, p.eps1):
        erased = _bits(ymask, n)
        received = [i for i in range(n) if not ymask >> i & 1]
        if degraded_abort(len(erased), len(received), p):
            p_abort += py
            for u in (0, 1):
                joint_alice["abort"][u] += py / 2
            key = ("abort",)
            groups.setdefault(key, [np.zeros((2, 2 ** qlen)), None])[0][:, 0] += py / 2
            continue
        goods = list(itertools.combinations(received, s))
        bads = list(itertools.combinations(erased, s))
        pw = py / (2 * len(goods) * len(bads))
        for u, good, bad in itertools.product((0, 1), goods, bads):
            sels = (good, bad) if u == 0 else (bad, good)
            union = sorted(good + bad)
            q = _to_int(1 if i in sels[1] else 0 for i in union)
            gt = [i for i in received if i not in good]
            bt = [i for i in erased if i not in bad]
            gl, gs = gt[:p.gl_len], gt[p.gl_len:p.gl_len + p.gs_len]
            if any(ymask >> i & 1 for i in list(sels[u]) + gs):
                p_err += pw
            if any(ymask >> i & 1 for i in gl):
                p_recon += pw
            gtm, btm = _setmask(gt), _setmask(bt)
            joint_alice[(gtm, btm, _setmask(sels[0]), _setmask(sels[1]))][u] += pw
            source = sorted(sels[1 - u] + tuple(gs))
            unknown = tuple(bool(ymask >> i & 1) for i in source)
            leak_bob += pw * _key_leak(l, p.beta_n, family, unknown)
            bound_bob += pw * _pa_term(l, sum(unknown))
            extra_pool = received
            for k in range(len(extra_pool) + 1):
                for extra in itertools.combinations(extra_pool, k):
                    pz = p.eps2 ** k * (1 - p.eps2) ** (len(extra_pool) - k)
                    if pz == 0:
                        continue
                    zmask = ymask | _setmask(extra)
                    key = (zmask, gtm, btm)
                    entry = groups.get(key)
                    if entry is None:
                        entry = groups[key] = [np.zeros((2, 2 ** qlen)),
                                               tuple(bool(zmask >> i & 1) for i in gl)]
                    entry[0][u, q] += pw * pz
    # I(U; g) from the group totals, then the Q-pad term within each group.
    totals = {k: v[0].sum(axis=1) for k, v in groups.items()}
    i_struct = _table_mi(totals)
    i_pad = bound_pad = 0.0
    by_mask = defaultdict(list)
    for key, (table, unknown) in groups.items():
        if unknown is not None:
            by_mask[unknown].append(table)
    qs = np.arange(2 ** qlen)
    for unknown, tables in by_mask.items():
        stack = np.stack(tables)
        weights = stack.sum(axis=(1, 2))
        pads = _pad_values(qlen, p.gl_len, family, unknown)
        ranks = [rank(BitMatrix.from_bits(m[:, [i for i, x in enumerate(unknown) if x]]))
                 if any(unknown) else 0 for m in _family(qlen, p.gl_len, family)]
        mis = np.zeros(len(tables))
        for vals, r in zip(pads, ranks):
            dist = np.bincount(vals, minlength=2 ** qlen) / len(vals)
            mix = dist[qs[:, None] ^ qs[None, :]]
            cipher = stack @ mix
            mis += np.array([mutual_information(t) for t in cipher])
            bound_pad += weights.sum() * max(0, qlen - r) / len(pads)
        i_pad += float(np.dot(weights, mis)) / len(pads)
    done = 1.0 - p_abort
    return LeakageReport(
        variant="degraded", params=p.to_dict(), family=family, enumeration_size=0,
        p_abort=p_abort, p_err=p_err / done if done > 0 else 0.0,
        i_kbar_bob=leak_bob, i_u_alice=_table_mi(joint_alice), i_u_eve=i_struct + i_pad,
        p_reconstruction_fail=p_recon / done if done > 0 else 0.0,
        bounds={"i_kbar_bob": bound_bob, "i_u_eve": float(i_struct + bound_pad), "i_u_eve_structural": i_struct},
        methods={"i_kbar_bob": "exact", "i_u_alice": "exact", "i_u_eve": "exact", "p_err": "exact",
                 "i_all_eve": "not computed"},
    )
