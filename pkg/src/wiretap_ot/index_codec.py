"""Ranking and unranking of fixed-size index subsets (combinatorial number system).

Subsets are ordered colexicographically: compare largest elements first.
The rank of {c_1 < ... < c_k} is sum_i C(c_i, i) with 1-based i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gf2 import bits_to_int


def binomial(n: int, k: int) -> int:
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"binomial({n}, {k}) needs 0 <= k <= n")
    return math.comb(n, k)


@dataclass(frozen=True)
class SubsetCodec:
    """Bijection between [0, C(universe, size)) and size-subsets of the universe.

    ``m_bits`` is the smallest string length whose integers cover every rank.
    """

    universe_size: int
    subset_size: int

    def __post_init__(self):
        if not 0 <= self.subset_size <= self.universe_size:
            raise ValueError("subset size must lie between 0 and the universe size")

    @property
    def count(self) -> int:
        return math.comb(self.universe_size, self.subset_size)

    @property
    def m_bits(self) -> int:
        return (self.count - 1).bit_length()

    def in_range(self, s) -> bool:
        """Membership in B = [0, C): strings that are images of a subset."""
        return bits_to_int(s) < self.count


def subset_unrank(codec: SubsetCodec, r: int) -> np.ndarray:
    """The r-th subset in colex order, as a sorted index array."""
    total = codec.count
    if not 0 <= r < total:
        raise ValueError(f"rank {r} outside [0, {total})")
    k = codec.subset_size
    out = np.empty(k, dtype=np.int64)
    if k == 0:
        return out
    # Walk c downward keeping b = C(c, i); every update is an exact division.
    i = k
    c = codec.universe_size - 1
    b = math.comb(c, i)
    while i > 0:
        while b > r:
            b = b * (c - i) // c
            c -= 1
        out[i - 1] = c
        r -= b
        if i == 1:
            break
        b = b * i // c
        c -= 1
        i -= 1
    return out


def subset_rank(codec: SubsetCodec, s) -> int:
    items = sorted(int(x) for x in s)
    if len(items) != codec.subset_size:
        raise ValueError(f"expected {codec.subset_size} indices, got {len(items)}")
    if len(set(items)) != len(items):
        raise ValueError("indices must be distinct")
    if items and (items[0] < 0 or items[-1] >= codec.universe_size):
        raise ValueError("index outside the universe")
    return sum(math.comb(c, i + 1) for i, c in enumerate(items))


def string_to_subset_onto(codec: SubsetCodec, s) -> np.ndarray:
    """Onto map from m_bits-bit strings to subsets: unrank(int(s) mod C)."""
    s = np.asarray(s, dtype=np.uint8)
    if s.size != codec.m_bits:
        raise ValueError(f"expected a {codec.m_bits}-bit string, got {s.size} bits")
    return subset_unrank(codec, bits_to_int(s) % codec.count)
