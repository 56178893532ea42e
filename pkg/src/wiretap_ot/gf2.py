"""Bit vectors and bit matrices over GF(2).

A bit vector is a one-dimensional ``numpy.uint8`` array holding 0/1 values.
Matrices pack each row into little-endian 64-bit words so that products and
row reductions run on whole words at a time; the packing is internal and
every public function speaks in logical bit sequences.
"""

from __future__ import annotations

import numpy as np

WORD = 64
_U64 = np.dtype("<u8")

# Below this width row reduction uses Python integers as rows, which is
# faster than numpy for the many tiny systems solved by interactive hashing.
_SMALL_COLS = 192


def bitvec(bits) -> np.ndarray:
    """Validate ``bits`` and return a read-only uint8 0/1 vector."""
    if isinstance(bits, str):
        bits = [int(ch) for ch in bits]
    arr = np.array(bits, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise ValueError("bit vectors hold only 0 and 1")
    arr.setflags(write=False)
    return arr


def random_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def bits_to_str(v) -> str:
    return "".join("1" if b else "0" for b in np.asarray(v).tolist())


def bits_to_int(v) -> int:
    """Integer value of ``v`` read most-significant bit first.

    With this reading, integer order equals lexicographic order of the bits.
    """
    v = np.asarray(v, dtype=np.uint8)
    if v.size == 0:
        return 0
    # packbits pads the tail with zeros; shift them back out
    return int.from_bytes(np.packbits(v).tobytes(), "big") >> ((-v.size) % 8)


def int_to_bits(x: int, length: int) -> np.ndarray:
    x = int(x)
    if x < 0 or x.bit_length() > length:
        raise ValueError(f"{x} does not fit in {length} bits")
    nbytes = (length + 7) // 8
    raw = np.frombuffer(x.to_bytes(nbytes, "big"), dtype=np.uint8)
    bits = np.unpackbits(raw)[8 * nbytes - length:]
    return bits.astype(np.uint8)


def lex_less(a, b) -> bool:
    """Lexicographic comparison of two equal-length bit vectors."""
    return np.asarray(a, np.uint8).tobytes() < np.asarray(b, np.uint8).tobytes()


def _nwords(cols: int) -> int:
    return max(1, (cols + WORD - 1) // WORD)


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a (rows, cols) 0/1 array into (rows, nwords) uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    rows, cols = bits.shape
    nbytes = _nwords(cols) * 8
    packed = np.packbits(bits, axis=1, bitorder="little")
    out = np.zeros((rows, nbytes), dtype=np.uint8)
    out[:, :packed.shape[1]] = packed
    return out.view(_U64).reshape(rows, nbytes // 8)


def unpack_rows(words: np.ndarray, cols: int) -> np.ndarray:
    raw = np.ascontiguousarray(words, dtype=_U64).view(np.uint8)
    return np.unpackbits(raw, axis=1, bitorder="little")[:, :cols]


def pack_vec(v) -> np.ndarray:
    return pack_rows(np.asarray(v, dtype=np.uint8).reshape(1, -1))[0]


class BitMatrix:
    """Immutable rows x cols matrix over GF(2)."""

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray):
        words = np.array(words, dtype=_U64, copy=True).reshape(rows, _nwords(cols))
        tail = cols % WORD
        if tail and rows and np.any(words[:, -1] >> np.uint64(tail)):
            raise ValueError("padding bits beyond the last column must be zero")
        words.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "words", words)

    def __setattr__(self, name, value):
        raise AttributeError("BitMatrix is immutable")

    @classmethod
    def from_bits(cls, bits) -> "BitMatrix":
        arr = np.array(bits, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError("expected a two-dimensional bit array")
        if arr.size and arr.max() > 1:
            raise ValueError("matrix entries must be 0 or 1")
        return cls(arr.shape[0], arr.shape[1], pack_rows(arr))

    @classmethod
    def identity(cls, k: int) -> "BitMatrix":
        return cls.from_bits(np.eye(k, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _nwords(cols)), dtype=_U64))

    def to_bits(self) -> np.ndarray:
        return unpack_rows(self.words, self.cols)

    def row(self, i: int) -> np.ndarray:
        return unpack_rows(self.words[i:i + 1], self.cols)[0]

    def row_int(self, i: int) -> int:
        """Row ``i`` as an integer whose bit j is column j."""
        return int.from_bytes(self.words[i].tobytes(), "little")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            body = ",".join(bits_to_str(r) for r in self.to_bits())
            return f"BitMatrix({self.rows}x{self.cols}: {body})"
        return f"BitMatrix({self.rows}x{self.cols})"


def mat_vec_mul(m: BitMatrix, v) -> np.ndarray:
    """Return m·v over GF(2)."""
    v = np.asarray(v, dtype=np.uint8).reshape(-1)
    if v.size != m.cols:
        raise ValueError(f"dimension mismatch: matrix has {m.cols} columns, vector has {v.size} bits")
    if m.rows == 0:
        return np.zeros(0, dtype=np.uint8)
    prod = m.words & pack_vec(v)
    return (np.bitwise_count(prod).sum(axis=1, dtype=np.int64) & 1).astype(np.uint8)


def random_matrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    """Uniformly random rows x cols matrix."""
    nw = _nwords(cols)
    raw = np.frombuffer(rng.bytes(rows * nw * 8), dtype=_U64).reshape(rows, nw).copy()
    tail = cols % WORD
    if rows:
        if tail:
            raw[:, -1] &= np.uint64((1 << tail) - 1)
        elif cols == 0:
            raw[:] = 0
    return BitMatrix(rows, cols, raw)


def _int_rows(m: BitMatrix) -> list[int]:
    return [m.row_int(i) for i in range(m.rows)]


def _rref_ints(rows: list[int], ncols: int, reduce: bool = True):
    rows = list(rows)
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        bit = 1 << c
        for i in range(r, nrows):
            if rows[i] & bit:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        p = rows[r]
        for j in range(0 if reduce else r + 1, nrows):
            if j != r and rows[j] & bit:
                rows[j] ^= p
        pivots.append(c)
        r += 1
    return rows, pivots


def _eliminate(W: np.ndarray, ncols: int, reduce: bool) -> np.ndarray:
    """In-place row reduction of packed rows; returns the pivot columns."""
    nrows, nw = W.shape
    pivots = np.empty(min(nrows, ncols), dtype=np.int64)
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        w = c >> 6
        b = np.uint64(c & 63)
        i = r
        while i < nrows and (W[i, w] >> b) & np.uint64(1) == 0:
            i += 1
        if i == nrows:
            continue
        if i != r:
            for t in range(w, nw):
                W[r, t], W[i, t] = W[i, t], W[r, t]
        # rows at or below r are zero left of column c, so words before w stay untouched
        for j in range(0 if reduce else r + 1, nrows):
            if j != r and (W[j, w] >> b) & np.uint64(1):
                for t in range(w, nw):
                    W[j, t] ^= W[r, t]
        pivots[r] = c
        r += 1
    return pivots[:r]


try:
    from numba import njit
except ImportError:  # pragma: no cover
    _eliminate_fast = None
else:
    _eliminate_fast = njit(cache=True, nogil=True)(_eliminate)


def _rref_words(words: np.ndarray, ncols: int, reduce: bool = True):
    W = np.array(words, dtype=_U64, copy=True)
    if _eliminate_fast is not None:
        return W, _eliminate_fast(W, ncols, reduce).tolist()
    return _rref_words_numpy(W, ncols, reduce)


def _rref_words_numpy(W: np.ndarray, ncols: int, reduce: bool):
    nrows = W.shape[0]
    pivots = []
    r = 0
    one = np.uint64(1)
    for c in range(ncols):
        if r == nrows:
            break
        w, b = divmod(c, WORD)
        col = (W[:, w] >> np.uint64(b)) & one
        below = np.flatnonzero(col[r:])
        if below.size == 0:
            continue
        i = r + int(below[0])
        if i != r:
            W[[r, i]] = W[[i, r]]
            col[[r, i]] = col[[i, r]]
        if reduce:
            hits = np.flatnonzero(col)
        else:
            hits = r + 1 + np.flatnonzero(col[r + 1:])
        hits = hits[hits != r]
        if hits.size:
            W[hits] ^= W[r]
        pivots.append(c)
        r += 1
    return W, pivots


def rank(m: BitMatrix) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if m.cols <= _SMALL_COLS:
        return len(_rref_ints(_int_rows(m), m.cols, reduce=False)[1])
    return len(_rref_words(m.words, m.cols, reduce=False)[1])


def random_full_rank_matrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    """Uniform sample from the rows x cols matrices of rank ``rows``.

    Rejection sampling: draw a uniform matrix and keep it if it has full row
    rank. Conditioning a uniform draw on an event gives the uniform
    distribution on that event.
    """
    if rows > cols:
        raise ValueError(f"cannot have rank {rows} with only {cols} columns")
    while True:
        m = random_matrix(rows, cols, rng)
        if rank(m) == rows:
            return m


def solve_affine_pair(m: BitMatrix, pi) -> tuple[np.ndarray, np.ndarray]:
    """Both solutions of m·x = pi for a full-rank (k-1) x k matrix.

    Returned in lexicographic order (S0 < S1).
    """
    pi = np.asarray(pi, dtype=np.uint8).reshape(-1)
    k = m.cols
    if m.rows != k - 1:
        raise ValueError("solve_affine_pair needs a (k-1) x k matrix")
    if pi.size != m.rows:
        raise ValueError("right-hand side length must equal the number of rows")
    if k <= _SMALL_COLS:
        aug = [row | (int(p) << k) for row, p in zip(_int_rows(m), pi.tolist())]
        red, pivots = _rref_ints(aug, k)
        if len(pivots) != m.rows:
            raise ValueError("matrix is rank deficient")
        free = next(c for c in range(k) if c not in set(pivots))
        x0 = 0
        x1 = 1 << free
        for row, p in zip(red, pivots):
            rhs = (row >> k) & 1
            x0 |= rhs << p
            x1 |= (rhs ^ ((row >> free) & 1)) << p
        s0 = np.array([(x0 >> j) & 1 for j in range(k)], dtype=np.uint8)
        s1 = np.array([(x1 >> j) & 1 for j in range(k)], dtype=np.uint8)
    else:
        bits = np.concatenate([m.to_bits(), pi.reshape(-1, 1)], axis=1)
        red, pivots = _rref_words(pack_rows(bits), k)
        if len(pivots) != m.rows:
            raise ValueError("matrix is rank deficient")
        red_bits = unpack_rows(red, k + 1)
        piv = np.array(pivots)
        free = int(np.setdiff1d(np.arange(k), piv)[0])
        s0 = np.zeros(k, dtype=np.uint8)
        s0[piv] = red_bits[:, k]
        s1 = s0.copy()
        s1[free] = 1
        s1[piv] ^= red_bits[:, free]
    if lex_less(s1, s0):
        s0, s1 = s1, s0
    return s0, s1
