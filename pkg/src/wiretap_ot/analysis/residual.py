"""Residual-entropy accounting on finished sessions.

For X uniform, the Renyi entropy of X restricted to a selection, given a
coalition's channel outputs there, is the number of positions none of them
received. That count minus the key length is the margin privacy
amplification works with.
"""

from __future__ import annotations

import numpy as np

from ..channel import ERASED
from ..hashing import pa_leakage
from ..protocols.degraded import carve
from ..protocols.engine import PARTIES, SessionOutcome

_TWO_PRIVATE = ("c2p", "oneofN_2p", "mal_le_half", "mal_gt_half")
_MALICIOUS = ("mal_le_half", "mal_gt_half")


def residual_min_entropy(outcome: SessionOutcome, observer, selection) -> int:
    """Positions of ``selection`` erased in every channel output the observers hold."""
    observer = set(observer)
    unknown = observer - set(PARTIES)
    if unknown:
        raise ValueError(f"unknown parties: {', '.join(sorted(unknown))}")
    selection = np.asarray(selection, dtype=np.int64)
    n = outcome.params.n
    if selection.size and (selection.min() < 0 or selection.max() >= n):
        raise ValueError("selection lies outside the block")
    if "alice" in observer:
        return 0
    erased = np.ones(n, dtype=bool)
    for party in observer:
        for trits in outcome.views[party].observations.values():
            erased &= np.asarray(trits) == ERASED
    return int(np.count_nonzero(erased[selection]))


def observer_for(variant: str) -> set:
    """Coalition a variant's secrecy guarantee is stated against."""
    return {"bob", "eve"} if variant in _TWO_PRIVATE else {"bob"}


def key_selections(outcome: SessionOutcome) -> list[np.ndarray]:
    """Positions of X that feed each of Alice's keys, minus publicly revealed ones."""
    p, t = outcome.params, outcome.transcript
    alice = outcome.views["alice"].state
    if p.variant == "degraded":
        _, gs = carve(t.get("Gt"), p)
        return [np.union1d(sel, gs) for sel in alice["L"]]
    if p.variant == "mal_le_half":
        revealed = alice.get("revealed", np.empty(0, dtype=np.int64))
        return [np.setdiff1d(t.get(f"T{i}"), revealed) for i in range(2)]
    if p.variant == "mal_gt_half":
        l0, l1 = alice["sets"]
        common = np.intersect1d(l0, l1)
        return [np.setdiff1d(l0, common), np.setdiff1d(l1, common)]
    return [t.get(f"L{i}") for i in range(p.N)]


def residual_report(outcome: SessionOutcome) -> dict | None:
    """Per-key residual counts, the protected key's margin and its leakage bound.

    Honest variants protect every key Bob did not choose, so the margin is the
    minimum over those. Against a malicious Bob the guarantee is that some key
    stays hidden, so the margin is the maximum over both. None when aborted.
    """
    if outcome.aborted:
        return None
    p = outcome.params
    obs = observer_for(p.variant)
    sels = key_selections(outcome)
    counts = [residual_min_entropy(outcome, obs, s) for s in sels]
    if p.variant in _MALICIOUS:
        protected = [max(counts)]
    else:
        u = outcome.inputs.choice
        protected = [c for i, c in enumerate(counts) if i != u]
    residual = min(protected)
    report = {
        "residuals": counts,
        "residual": residual,
        "margin": residual - p.key_len,
        "leakage_bound": pa_leakage(p.key_len, residual),
    }
    if p.variant == "independent_pair" and p.cathy_key_len:
        w = outcome.inputs.cathy_choice
        other = outcome.transcript.get(f"M{1 - w}")
        cathy = residual_min_entropy(outcome, {"cathy"}, other)
        report["cathy_residual"] = cathy
        report["margin"] = min(report["margin"], cathy - p.cathy_key_len)
    return report
