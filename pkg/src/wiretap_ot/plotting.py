"""Figures for capacity curves and rate regions (optional; needs matplotlib)."""

from __future__ import annotations

import numpy as np

from .analysis.capacity import RateRegion, capacities


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "wiretap-ot"

    return plt


def _save(fig, path) -> None:
    # No timestamps or version strings, so reruns give identical files.
    suffix = str(path).rsplit(".", 1)[-1].lower()
    metadata = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}.get(suffix)
    fig.savefig(path, dpi=120, metadata=metadata)


def plot_capacity_curves(eps2: float, path, N: int = 2, points: int = 199) -> None:
    """Capacities against eps1 at a fixed eps2."""
    plt = _pyplot()
    xs = np.linspace(0, 1, points + 2)[1:-1]
    reports = [capacities(float(x), eps2, N) for x in xs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, [c.c2p for c in reports], label="C2P")
    ax.plot(xs, [c.c1p for c in reports], label="C1P", linestyle="--")
    if N > 2:
        ax.plot(xs, [c.c2p_N for c in reports], label=f"C2P (1-of-{N})")
        ax.plot(xs, [c.c1p_N for c in reports], label=f"C1P (1-of-{N})", linestyle="--")
    ax.fill_between(xs, [c.degraded_lower for c in reports], [c.degraded_upper for c in reports],
                    alpha=0.2, label="degraded channel bounds")
    ax.set_xlabel("eps1")
    ax.set_ylabel("rate (bits per channel use)")
    ax.set_title(f"OT capacities, eps2 = {eps2:g}")
    ax.set_xlim(0, 1)
    ax.set_ylim(bottom=0)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_rate_region(region: RateRegion, path) -> None:
    """Inner and outer bounds for the independent-pair rate region."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    for poly, style, label in ((region.outer, "--", "outer bound"), (region.inner, "-", "inner bound")):
        xs, ys = zip(*(poly.vertices + poly.vertices[:1]))
        ax.plot(xs, ys, style, label=label)
    ax.fill(*zip(*region.inner.vertices), alpha=0.2)
    ax.set_xlabel("R_B")
    ax.set_ylabel("R_C")
    ax.set_title(f"Rate region, eps1 = {region.eps1:g}, eps2 = {region.eps2:g}")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    ax.set_aspect("equal", adjustable="box")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
