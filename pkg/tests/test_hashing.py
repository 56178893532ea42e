import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wiretap_ot.gf2 import int_to_bits
from wiretap_ot.hashing import (FiniteDistribution, expected_rank, exact_hash_entropy, pa_battery, pa_bound,
                                pa_bound_weak, pa_leakage, renyi2, sample_hash)


def brute_entropy(d: FiniteDistribution, out_len: int) -> float:
    # Average output entropy over every out_len x in_len matrix, by brute force.
    n = d.width
    total = 0.0
    count = 0
    for cells in itertools.product((0, 1), repeat=out_len * n):
        m = np.array(cells, dtype=np.uint8).reshape(out_len, n)
        masses = {}
        for v, p in zip(d.support, d.probs):
            key = tuple(m @ int_to_bits(v, n) % 2)
            masses[key] = masses.get(key, 0.0) + p
        total += -sum(p * math.log2(p) for p in masses.values() if p > 0)
        count += 1
    return total / count


def test_worked_values():
    # Uniform on {0,1}^2 with one output bit: 3 of 4 matrices give 1 bit.
    assert exact_hash_entropy(FiniteDistribution.uniform(range(4), 2), 1) == pytest.approx(0.75, abs=1e-12)
    d = FiniteDistribution.uniform([0, 3, 5, 6], 3)
    assert renyi2(d) == pytest.approx(2.0)
    assert pa_bound(1, 2) == pytest.approx(1 - math.log2(1.5), abs=1e-12)
    assert exact_hash_entropy(d, 1) >= pa_bound(1, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2 ** 32 - 1), st.data())
def test_matrix_and_kernel_methods_agree_with_brute_force(n, seed, data):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 2 ** n + 1))
    support = rng.choice(2 ** n, k, replace=False)
    w = rng.dirichlet(np.ones(k))
    w /= math.fsum(w)
    d = FiniteDistribution.from_mapping({int(v): float(p) for v, p in zip(support, w)}, n)
    out_len = data.draw(st.integers(0, n))
    ref = brute_entropy(d, out_len)
    assert exact_hash_entropy(d, out_len, "matrices") == pytest.approx(ref, abs=1e-9)
    assert exact_hash_entropy(d, out_len, "kernels") == pytest.approx(ref, abs=1e-9)


def test_pa_bound_shape():
    for l in range(6):
        prev = -math.inf
        for c in np.linspace(0, 12, 49):
            b = pa_bound(l, c)
            assert b <= l and b >= prev - 1e-15
            assert pa_bound_weak(l, c) <= b + 1e-15
            prev = b
    assert pa_bound(4, math.inf) == 4 and pa_leakage(4, math.inf) == 0


def test_battery_kinds_present():
    names = [name for name, _ in pa_battery(4, np.random.default_rng(0))]
    for kind in ("point", "subspace", "coset", "uniform 2^", "atom+uniform", "dirichlet"):
        assert any(n.startswith(kind) for n in names)


def test_expected_rank_small_cases():
    # 1x1: rank 1 with probability 1/2; 1x2: nonzero row with probability 3/4.
    assert expected_rank(1, 1) == pytest.approx(0.5)
    assert expected_rank(1, 2) == pytest.approx(0.75)
    assert expected_rank(2, 0) == 0


def test_sample_hash_validation():
    rng = np.random.default_rng(0)
    f = sample_hash(5, 3, rng)
    assert f.in_len == 5 and f.out_len == 3 and f(np.ones(5, dtype=np.uint8)).size == 3
    with pytest.raises(ValueError):
        sample_hash(2, 3, rng)


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution((0, 1), (0.5, 0.6), 1)
    with pytest.raises(ValueError):
        FiniteDistribution((0, 4), (0.5, 0.5), 2)
    with pytest.raises(ValueError):
        exact_hash_entropy(FiniteDistribution.point(0), 1)
