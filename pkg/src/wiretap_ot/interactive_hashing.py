"""Interactive hashing: the sender's k-bit string becomes two public strings.

The receiver draws a uniformly random (k-1) x k matrix M of full rank and
sends its rows one at a time; the sender answers each row with one bit.
Both parties then solve M x = Pi, which has exactly two solutions S0 < S1.
An honest sender answers with the inner product of the row and its input S,
so S is one of the two outputs and Phi marks which one.

``property_report`` checks:

    P1  the two outputs differ
    P2  an honest sender's input is one of them
    P3  the other output is uniform over the remaining 2^k - 1 strings
    P4  the receiver's view (M, Pi) carries no information about Phi
    P5  a cheating sender gets both outputs into a set G with probability
        at most PROPERTY5_CONSTANT * |G| / 2^k
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .gf2 import (
    BitMatrix,
    bits_to_int,
    bitvec,
    int_to_bits,
    lex_less,
    mat_vec_mul,
    random_full_rank_matrix,
    rank,
    solve_affine_pair,
)

PROPERTY5_CONSTANT = 15.6805


class SenderStrategy(Protocol):
    def start(self, k: int) -> None: ...

    def respond(self, round_index: int, row: np.ndarray) -> int: ...


class HonestSender:
    """Answers every challenge row with <row, S> mod 2."""

    def __init__(self, s):
        self.input = bitvec(s)

    def start(self, k: int) -> None:
        if self.input.size != k:
            raise ValueError(f"sender input has {self.input.size} bits, expected {k}")

    def respond(self, round_index: int, row: np.ndarray) -> int:
        return int(np.count_nonzero(row & self.input) & 1)


class GreedySender:
    """Adaptive cheater steering both outputs into a target set.

    Each round it picks the answer that keeps the most target strings
    consistent with all answers so far.
    """

    def __init__(self, good_set, rng: np.random.Generator):
        self.good = np.array(sorted(_as_ints(good_set)), dtype=np.uint64)
        self.rng = rng
        self.alive = self.good

    def start(self, k: int) -> None:
        self.alive = self.good

    def respond(self, round_index: int, row: np.ndarray) -> int:
        parity = np.bitwise_count(self.alive & np.uint64(bits_to_int(row))) & 1
        ones = int(np.count_nonzero(parity))
        zeros = self.alive.size - ones
        if ones == zeros:
            bit = int(self.rng.integers(2))
        else:
            bit = int(ones > zeros)
        self.alive = self.alive[parity == bit]
        return bit


def _as_ints(strings) -> set[int]:
    out = set()
    for s in strings:
        out.add(s if isinstance(s, (int, np.integer)) else bits_to_int(s))
    return {int(v) for v in out}


@dataclass(frozen=True)
class IHOutcome:
    s0: np.ndarray
    s1: np.ndarray
    phi: int | None
    m_matrix: BitMatrix
    pi: np.ndarray

    def __post_init__(self):
        if np.array_equal(self.s0, self.s1):
            raise AssertionError("interactive hashing produced equal outputs")
        if not lex_less(self.s0, self.s1):
            raise AssertionError("outputs are not in lexicographic order")
        if not (np.array_equal(mat_vec_mul(self.m_matrix, self.s0), self.pi)
                and np.array_equal(mat_vec_mul(self.m_matrix, self.s1), self.pi)):
            raise AssertionError("outputs do not solve the published system")

    def output(self, b: int) -> np.ndarray:
        return self.s1 if b else self.s0


def ih_challenge(k: int, rng: np.random.Generator) -> BitMatrix:
    """The receiver's uniformly random full-rank (k-1) x k matrix."""
    if k < 2:
        raise ValueError("interactive hashing needs k >= 2")
    return random_full_rank_matrix(k - 1, k, rng)


def ih_respond(sender: SenderStrategy, m: BitMatrix) -> np.ndarray:
    """Feed the challenge rows to the sender one at a time; collect Pi."""
    sender.start(m.cols)
    pi = np.empty(m.rows, dtype=np.uint8)
    for i in range(m.rows):
        bit = sender.respond(i, m.row(i))
        if bit not in (0, 1):
            raise ValueError("sender answers must be single bits")
        pi[i] = bit
    return pi


def ih_finish(m: BitMatrix, pi, s=None) -> IHOutcome:
    """Solve for the two outputs; with the sender's input ``s`` also fix Phi."""
    s0, s1 = solve_affine_pair(m, pi)
    phi = None
    if s is not None:
        s = np.asarray(s, dtype=np.uint8)
        if np.array_equal(s, s0):
            phi = 0
        elif np.array_equal(s, s1):
            phi = 1
        else:
            raise AssertionError("honest sender input is not among the outputs")
    return IHOutcome(s0, s1, phi, m, np.asarray(pi, dtype=np.uint8))


def ih_run(k: int, sender: SenderStrategy, rng: np.random.Generator, matrix: BitMatrix | None = None) -> IHOutcome:
    """Run one instance; ``rng`` is the receiver's randomness.

    Passing ``matrix`` fixes the receiver's challenge (used by exhaustive checks).
    """
    m = ih_challenge(k, rng) if matrix is None else matrix
    pi = ih_respond(sender, m)
    return ih_finish(m, pi, getattr(sender, "input", None))


def ih_adversarial_hit_rate(k: int, good_set, sender: SenderStrategy, trials: int,
                            rng: np.random.Generator) -> float:
    """Fraction of runs in which both outputs land in ``good_set``."""
    good = _as_ints(good_set)
    if not good or trials == 0:
        return 0.0
    hits = 0
    for _ in range(trials):
        out = ih_run(k, sender, rng)
        if bits_to_int(out.s0) in good and bits_to_int(out.s1) in good:
            hits += 1
    return hits / trials


def full_rank_matrices(k: int):
    """Every (k-1) x k matrix of rank k-1, for exhaustive checks at small k."""
    if k > 5:
        raise ValueError("exhaustive matrix enumeration is limited to k <= 5")
    for rows in itertools.product(range(2 ** k), repeat=k - 1):
        m = BitMatrix.from_bits([int_to_bits(r, k) for r in rows])
        if rank(m) == k - 1:
            yield m


def co_output_counts(k: int) -> dict[int, Counter]:
    """For each honest input S, how often each string appears as S_(1-Phi).

    Counted over all full-rank challenge matrices.
    """
    mats = list(full_rank_matrices(k))
    counts = {}
    for s in range(2 ** k):
        sender = HonestSender(int_to_bits(s, k))
        c = Counter()
        for m in mats:
            out = ih_run(k, sender, None, matrix=m)
            c[bits_to_int(out.output(1 - out.phi))] += 1
        counts[s] = c
    return counts


def phi_given_view_counts(k: int) -> dict[tuple, Counter]:
    """Counts of Phi per receiver view (M, Pi) over a uniform honest input."""
    table: dict[tuple, Counter] = {}
    for m in full_rank_matrices(k):
        for s in range(2 ** k):
            out = ih_run(k, HonestSender(int_to_bits(s, k)), None, matrix=m)
            key = (m.words.tobytes(), out.pi.tobytes())
            table.setdefault(key, Counter())[out.phi] += 1
    return table


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    detail: str


def _exhaustive_outcomes(k: int):
    mats = list(full_rank_matrices(k))
    for m in mats:
        for s in range(2 ** k):
            yield m, s, ih_run(k, HonestSender(int_to_bits(s, k)), None, matrix=m)


def property_report(k_max: int = 3, p5_ks=(8, 10, 12), densities=(2 ** -3, 2 ** -5),
                    trials: int = 10_000, seed: int = 0) -> list[PropertyResult]:
    """Run checks P1-P5.

    P1-P4 are exhaustive over every challenge matrix and input for k = 2..k_max;
    P5 samples the greedy cheater at each k in ``p5_ks``.
    """
    if not 2 <= k_max <= 4:
        raise ValueError("exhaustive checks need 2 <= k_max <= 4")
    if any(k > 12 for k in p5_ks):
        raise ValueError("sampled P5 checks are limited to k <= 12")
    results = []
    for k in range(2, k_max + 1):
        runs = distinct = contains = 0
        for _, s, out in _exhaustive_outcomes(k):
            runs += 1
            distinct += not np.array_equal(out.s0, out.s1)
            contains += bits_to_int(out.output(out.phi)) == s
        results.append(PropertyResult(f"P1 distinct outputs (k={k})", distinct == runs, f"{distinct}/{runs} runs"))
        results.append(PropertyResult(f"P2 input among outputs (k={k})", contains == runs, f"{contains}/{runs} runs"))
        counts = co_output_counts(k)
        uniform = all(len(c) == 2 ** k - 1 and s not in c and len(set(c.values())) == 1
                      for s, c in counts.items())
        per = sorted({v for c in counts.values() for v in c.values()})
        results.append(PropertyResult(f"P3 co-output uniform (k={k})", uniform,
                                      f"{sum(1 for _ in full_rank_matrices(k))} matrices, counts {per}"))
        views = phi_given_view_counts(k)
        hidden = all(c[0] == c[1] for c in views.values())
        results.append(PropertyResult(f"P4 receiver learns nothing about Phi (k={k})", hidden,
                                      f"{len(views)} receiver views"))
    rng = np.random.default_rng(seed)
    for k in p5_ks:
        for density in densities:
            size = max(1, round(density * 2 ** k))
            good = rng.choice(2 ** k, size=size, replace=False).tolist()
            sender = GreedySender(good, np.random.default_rng(rng.integers(2 ** 63)))
            rate = ih_adversarial_hit_rate(k, good, sender, trials, rng)
            limit = PROPERTY5_CONSTANT * size / 2 ** k
            results.append(PropertyResult(f"P5 greedy hit rate (k={k}, |G|/2^k={size / 2 ** k:g})",
                                          rate <= limit, f"{rate:.4f} <= {limit:.4f}"))
    return results
