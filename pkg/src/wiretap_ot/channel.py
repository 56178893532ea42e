"""Binary erasure broadcast channels and erasure bookkeeping.

Channel outputs are trit strings: uint8 arrays over {0, 1, ERASED}.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

ERASED = 2
_SYMBOLS = "01e"


class Topology(str, Enum):
    INDEPENDENT = "independent"
    DEGRADED = "degraded"
    SINGLE = "single"


@dataclass(frozen=True)
class ChannelConfig:
    eps1: float
    eps2: float = 1.0
    topology: Topology = Topology.INDEPENDENT

    def __post_init__(self):
        for name in ("eps1", "eps2"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        object.__setattr__(self, "topology", Topology(self.topology))


def transmit(x, cfg: ChannelConfig, rng: np.random.Generator):
    """Send ``x`` through the broadcast channel; returns (Y, Z or None).

    Erasure draws for Y are taken before those for Z.
    """
    x = np.asarray(x, dtype=np.uint8)
    n = x.size
    y = x.copy()
    y[rng.random(n) < cfg.eps1] = ERASED
    if cfg.topology is Topology.SINGLE:
        return y, None
    z_erase = rng.random(n) < cfg.eps2
    if cfg.topology is Topology.INDEPENDENT:
        z = x.copy()
    else:
        z = y.copy()
    z[z_erase] = ERASED
    return y, z


def erased_mask(t) -> np.ndarray:
    return np.asarray(t) == ERASED


def erasure_sets(y) -> tuple[np.ndarray, np.ndarray]:
    """(E, Ebar): sorted positions that are erased / received."""
    mask = erased_mask(y)
    return np.flatnonzero(mask), np.flatnonzero(~mask)


def count_erased(t) -> int:
    return int(np.count_nonzero(erased_mask(t)))


def merge_psi(y, z) -> np.ndarray:
    """Per position: Y if received, else Z if received, else erased."""
    y = np.asarray(y, dtype=np.uint8)
    z = np.asarray(z, dtype=np.uint8)
    if y.shape != z.shape:
        raise ValueError("trit strings must have equal length")
    both = (y != ERASED) & (z != ERASED)
    if np.any(y[both] != z[both]):
        raise ValueError("received symbols disagree; not outputs of one broadcast")
    return np.where(y != ERASED, y, z).astype(np.uint8)


def trits_to_str(t) -> str:
    return "".join(_SYMBOLS[s] for s in np.asarray(t).tolist())


def trits_from_str(s: str) -> np.ndarray:
    try:
        return np.array([_SYMBOLS.index(ch) for ch in s], dtype=np.uint8)
    except ValueError:
        raise ValueError(f"trit strings use only '0', '1', 'e': {s!r}") from None
