"""Universal_2 hashing over GF(2) and the privacy-amplification bound.

The family used everywhere is the set of all linear maps {0,1}^in -> {0,1}^out,
i.e. uniformly random binary matrices. For a != b a uniform matrix F has
F(a) = F(b) exactly when every row is orthogonal to a xor b, which happens
with probability 2^-out, so the family is universal_2.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gf2 import BitMatrix, mat_vec_mul, random_matrix

LN2 = math.log(2.0)


@dataclass(frozen=True)
class HashFn:
    matrix: BitMatrix

    @property
    def in_len(self) -> int:
        return self.matrix.cols

    @property
    def out_len(self) -> int:
        return self.matrix.rows

    def __call__(self, x) -> np.ndarray:
        return apply_hash(self, x)


def sample_hash(in_len: int, out_len: int, rng: np.random.Generator) -> HashFn:
    if out_len > in_len:
        raise ValueError(f"output length {out_len} exceeds input length {in_len}")
    if out_len < 0:
        raise ValueError("output length must be nonnegative")
    return HashFn(random_matrix(out_len, in_len, rng))


def apply_hash(f: HashFn, x) -> np.ndarray:
    return mat_vec_mul(f.matrix, x)


@dataclass(frozen=True)
class FiniteDistribution:
    """Probability masses on a finite support.

    For distributions over bit strings the support holds integers and
    ``width`` records the string length.
    """

    support: tuple
    probs: tuple
    width: int | None = None

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ValueError("support and masses differ in length")
        if len(set(self.support)) != len(self.support):
            raise ValueError("support values must be distinct")
        if any(p < 0 for p in self.probs):
            raise ValueError("masses must be nonnegative")
        if abs(math.fsum(self.probs) - 1.0) > 1e-12:
            raise ValueError("masses must sum to 1")
        if self.width is not None and any(not 0 <= v < 2 ** self.width for v in self.support):
            raise ValueError("support value does not fit the declared width")

    @classmethod
    def from_mapping(cls, masses: dict, width: int | None = None) -> "FiniteDistribution":
        items = sorted(masses.items())
        return cls(tuple(k for k, _ in items), tuple(float(v) for _, v in items), width)

    @classmethod
    def uniform(cls, values, width: int | None = None) -> "FiniteDistribution":
        values = sorted(set(values))
        return cls(tuple(values), tuple([1.0 / len(values)] * len(values)), width)

    @classmethod
    def point(cls, value, width: int | None = None) -> "FiniteDistribution":
        return cls((value,), (1.0,), width)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.support, dtype=np.int64), np.asarray(self.probs, dtype=float)


def collision_probability(d: FiniteDistribution) -> float:
    return math.fsum(p * p for p in d.probs)


def renyi2(d: FiniteDistribution) -> float:
    return -math.log2(collision_probability(d))


def _log2_1p_pow2(x: float) -> float:
    """log2(1 + 2^x) without overflow."""
    if x > 0:
        return x + math.log1p(2.0 ** -x) / LN2
    return math.log1p(2.0 ** x) / LN2


def pa_bound(l: int, c: float) -> float:
    """Lower bound l - log2(1 + 2^(l-c)) on H(F(A) | F) for Renyi-2 entropy c."""
    if l < 0:
        raise ValueError("output length must be nonnegative")
    if math.isinf(c):
        return float(l)
    return l - _log2_1p_pow2(l - c)


def pa_leakage(l: int, c: float) -> float:
    """The weaker deficit 2^(l-c)/ln 2, so that H >= l - pa_leakage(l, c)."""
    if math.isinf(c):
        return 0.0
    return 2.0 ** (l - c) / LN2


def pa_bound_weak(l: int, c: float) -> float:
    return l - pa_leakage(l, c)


def _entropy_rows(masses: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(masses > 0, -masses * np.log2(masses), 0.0)
    return terms.sum(axis=-1)


def _parity_table(in_len: int) -> np.ndarray:
    a = np.arange(2 ** in_len, dtype=np.uint64)
    return (np.bitwise_count(a[:, None] & a[None, :]) & 1).astype(np.int64)


def _entropy_by_matrices(support, probs, in_len, out_len) -> float:
    table = _parity_table(in_len)[:, support]
    codes = np.zeros((1, support.size), dtype=np.int64)
    for _ in range(out_len):
        codes = ((codes[:, None, :] << 1) | table[None, :, :]).reshape(-1, support.size)
    count = codes.shape[0]
    nvals = 2 ** out_len
    flat = (codes + np.arange(count, dtype=np.int64)[:, None] * nvals).ravel()
    masses = np.bincount(flat, weights=np.tile(probs, count), minlength=count * nvals)
    return float(_entropy_rows(masses.reshape(count, nvals)).mean())


@lru_cache(maxsize=None)
def _subspace_cosets(in_len: int) -> tuple[np.ndarray, np.ndarray]:
    """Every subspace K of GF(2)^in_len with its dimension and coset labels.

    Subspaces are enumerated once each through their reduced row echelon
    bases. Returns (dims, labels) where labels[i, a] identifies the coset
    a + K_i.
    """
    points = np.arange(2 ** in_len, dtype=np.int64)
    dims, labels = [], []
    for d in range(in_len + 1):
        for pivots in itertools.combinations(range(in_len), d):
            slots = [[c for c in range(p + 1, in_len) if c not in pivots] for p in pivots]
            for fill in itertools.product((0, 1), repeat=sum(map(len, slots))):
                it = iter(fill)
                basis = []
                for p, free in zip(pivots, slots):
                    v = 1 << p
                    for c in free:
                        v |= next(it) << c
                    basis.append(v)
                span = np.zeros(1, dtype=np.int64)
                for v in basis:
                    span = np.concatenate([span, span ^ v])
                dims.append(d)
                labels.append((points[:, None] ^ span[None, :]).min(axis=1))
    return np.array(dims), np.array(labels)


def _injections(rank: int, out_len: int) -> int:
    """Number of injective linear maps from a rank-dim space into GF(2)^out_len."""
    if rank > out_len:
        return 0
    return math.prod(2 ** out_len - 2 ** i for i in range(rank))


def _entropy_by_kernels(support, probs, in_len, out_len) -> float:
    # H(F(A)) depends on F only through ker F: F(a) = F(b) iff a + b in ker F.
    dims, labels = _subspace_cosets(in_len)
    nvals = 2 ** in_len
    count = labels.shape[0]
    flat = (labels[:, support] + np.arange(count, dtype=np.int64)[:, None] * nvals).ravel()
    masses = np.bincount(flat, weights=np.tile(probs, count), minlength=count * nvals)
    per_kernel = _entropy_rows(masses.reshape(count, nvals))
    weights = np.array([_injections(in_len - int(d), out_len) for d in dims], dtype=object)
    total = 2 ** (out_len * in_len)
    if sum(weights) != total:
        raise AssertionError("kernel classes do not partition the matrix family")
    return math.fsum(float(w) * h for w, h in zip(weights, per_kernel)) / float(total)


def exact_hash_entropy(d: FiniteDistribution, out_len: int, method: str = "auto") -> float:
    """Exact average of H(F(A)) over the whole linear-map family.

    ``method="matrices"`` enumerates all 2^(out*in) matrices; ``"kernels"``
    groups the matrices by kernel (all matrices with one kernel induce the
    same partition of inputs) and is exact for larger families.
    """
    in_len = d.width
    if in_len is None:
        raise ValueError("distribution must declare its bit width")
    if in_len > 10:
        raise ValueError(f"in_len={in_len} is too large for exhaustive enumeration")
    if out_len < 0:
        raise ValueError("output length must be nonnegative")
    support, probs = d.as_arrays()
    if method == "auto":
        method = "matrices" if in_len * out_len <= 16 else "kernels"
    if method == "matrices":
        if in_len * out_len > 22:
            raise ValueError(f"2^{in_len * out_len} matrices exceed the enumeration budget")
        return _entropy_by_matrices(support, probs, in_len, out_len)
    if method == "kernels":
        if in_len > 7:
            raise ValueError(f"subspace enumeration of GF(2)^{in_len} exceeds the budget")
        return _entropy_by_kernels(support, probs, in_len, out_len)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=None)
def expected_rank(rows: int, cols: int) -> float:
    """Expected GF(2) rank of a uniformly random rows x cols matrix.

    If an observer knows all of a hash input except ``cols`` uniformly random
    positions, F(A) is uniform on a coset of the image of the rows x cols
    submatrix on those positions, so this is exactly E_F[H(F(A) | F, view)].
    """
    total = 0.0
    for r in range(min(rows, cols) + 1):
        total += r * _rank_probability(rows, cols, r)
    return total


def _rank_probability(rows: int, cols: int, r: int) -> float:
    # Number of rows x cols matrices of rank r divided by 2^(rows*cols).
    num = 1
    for i in range(r):
        num *= (2 ** rows - 2 ** i) * (2 ** cols - 2 ** i)
    den = 1
    for i in range(r):
        den *= 2 ** r - 2 ** i
    return (num // den) / 2.0 ** (rows * cols)


def pa_battery(in_len: int, rng: np.random.Generator, per_kind: int = 4) -> list[tuple[str, FiniteDistribution]]:
    """Test distributions over {0,1}^in_len for checking the amplification bound.

    Point masses, uniforms on linear subspaces and their cosets, uniforms on
    random 2^j-subsets, and mixtures (a heavy atom over a uniform, and random
    Dirichlet weights).
    """
    size = 2 ** in_len
    out: list[tuple[str, FiniteDistribution]] = []
    for v in sorted({0, size - 1, *map(int, rng.integers(0, size, per_kind))}):
        out.append((f"point {v}", FiniteDistribution.point(v, in_len)))
    for j in range(1, in_len + 1):
        basis = list(range(j))
        span = {0}
        for b in basis:
            span |= {s ^ (1 << b) for s in span}
        shift = int(rng.integers(0, size))
        out.append((f"subspace dim {j}", FiniteDistribution.uniform(span, in_len)))
        out.append((f"coset dim {j}", FiniteDistribution.uniform({s ^ shift for s in span}, in_len)))
        for t in range(per_kind):
            subset = rng.choice(size, 2 ** j, replace=False)
            out.append((f"uniform 2^{j} #{t}", FiniteDistribution.uniform(map(int, subset), in_len)))
    for t in range(per_kind):
        heavy = float(rng.uniform(0.1, 0.9))
        atom = int(rng.integers(0, size))
        masses = {v: (1 - heavy) / size for v in range(size)}
        masses[atom] += heavy
        out.append((f"atom+uniform #{t}", FiniteDistribution.from_mapping(masses, in_len)))
        k = int(rng.integers(2, size + 1))
        support = rng.choice(size, k, replace=False)
        weights = rng.dirichlet(np.full(k, 0.5))
        weights /= math.fsum(weights)
        out.append((f"dirichlet #{t}", FiniteDistribution.from_mapping(
            {int(v): float(w) for v, w in zip(support, weights)}, in_len)))
    return out
