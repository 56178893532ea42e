import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wiretap_ot.index_codec import SubsetCodec, binomial, string_to_subset_onto, subset_rank, subset_unrank


@pytest.mark.parametrize("n,k", [(5, 0), (5, 2), (6, 3), (7, 7), (8, 1)])
def test_unrank_enumerates_colex(n, k):
    codec = SubsetCodec(n, k)
    colex = sorted(itertools.combinations(range(n), k), key=lambda c: c[::-1])
    got = [tuple(subset_unrank(codec, r)) for r in range(codec.count)]
    assert got == colex
    assert [subset_rank(codec, c) for c in colex] == list(range(codec.count))


@given(st.integers(1, 300).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))), st.data())
def test_rank_unrank_round_trip(nk, data):
    n, k = nk
    codec = SubsetCodec(n, k)
    r = data.draw(st.integers(0, codec.count - 1))
    assert subset_rank(codec, subset_unrank(codec, r)) == r


def test_m_bits_and_range():
    codec = SubsetCodec(6, 3)
    assert codec.count == 20 and codec.m_bits == 5
    assert codec.in_range([1, 0, 0, 1, 1])
    assert not codec.in_range([1, 0, 1, 0, 0])


def test_onto_map_covers_every_subset():
    codec = SubsetCodec(5, 2)
    seen = {tuple(string_to_subset_onto(codec, [(x >> (3 - i)) & 1 for i in range(4)])) for x in range(16)}
    assert len(seen) == codec.count


def test_large_universe_exact():
    codec = SubsetCodec(3000, 900)
    top = subset_unrank(codec, codec.count - 1)
    assert np.array_equal(top, np.arange(2100, 3000))
    assert subset_rank(codec, top) == math.comb(3000, 900) - 1


@pytest.mark.parametrize("bad", [[0, 0], [0, 5], [-1, 2], [1]])
def test_rank_rejects_bad_subsets(bad):
    with pytest.raises(ValueError):
        subset_rank(SubsetCodec(5, 2), bad)


def test_binomial_and_codec_validation():
    assert binomial(10, 3) == 120
    with pytest.raises(ValueError):
        binomial(3, 4)
    with pytest.raises(ValueError):
        SubsetCodec(3, 4)
    with pytest.raises(ValueError):
        subset_unrank(SubsetCodec(4, 2), 6)
