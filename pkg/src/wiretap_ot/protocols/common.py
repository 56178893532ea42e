"""Steps and helpers shared by several protocols."""

from __future__ import annotations

import numpy as np

from ..channel import ERASED, erasure_sets
from ..gf2 import random_bits
from ..hashing import apply_hash, sample_hash


def sample_ordered(pool, k: int, rng: np.random.Generator) -> np.ndarray:
    """k distinct elements of ``pool`` in sampling order (partial Fisher-Yates)."""
    pool = [int(v) for v in pool]
    n = len(pool)
    if k > n:
        raise ValueError(f"cannot draw {k} elements from {n}")
    if k == 0:
        return np.empty(0, dtype=np.int64)
    offsets = rng.integers(0, n - np.arange(k))
    for i, off in enumerate(offsets.tolist()):
        j = i + off
        pool[i], pool[j] = pool[j], pool[i]
    return np.array(pool[:k], dtype=np.int64)


def sample_set(pool, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform k-subset of ``pool`` as a sorted array."""
    return np.sort(sample_ordered(pool, k, rng))


def xor(a, b) -> np.ndarray:
    return np.bitwise_xor(np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8))


class HonestAlice:
    """Sends i.i.d. fair bits."""

    def channel_input(self, view, p) -> np.ndarray:
        return random_bits(p.n, view.rng)


def alice_transmit(view, p) -> np.ndarray:
    strategy = view.strategy or HonestAlice()
    x = np.asarray(strategy.channel_input(view, p), dtype=np.uint8)
    if x.size != p.n:
        raise ValueError("channel input has the wrong length")
    view.state["X"] = x
    return x


def bob_erasures(view, p):
    e, ebar = erasure_sets(view.observations["Y"])
    view.state["E"], view.state["Ebar"] = e, ebar
    return e, ebar


def hash_and_encrypt(view, keys, sources, out_len: int, names=("F", "C")) -> dict:
    """Sample one hash per source, then publish the hashes and the padded strings."""
    fs = [sample_hash(len(src), out_len, view.rng) for src in sources]
    records = {f"{names[0]}{i}": f for i, f in enumerate(fs)}
    for i, (k, f, src) in enumerate(zip(keys, fs, sources)):
        records[f"{names[1]}{i}"] = xor(k, apply_hash(f, src))
    return records


def decrypt(cipher, f, source) -> np.ndarray:
    return xor(cipher, apply_hash(f, source))


def known_bits(y, positions) -> np.ndarray:
    """Y at positions the caller knows are unerased."""
    vals = np.asarray(y)[np.asarray(positions, dtype=np.int64)]
    if np.any(vals == ERASED):
        raise AssertionError("decoding from an erased position")
    return vals.astype(np.uint8)
