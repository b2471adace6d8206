"""Figure rendering for the CLI report paths.

Each helper takes already-computed data and writes a single figure to
file; the output format follows the file extension (png, pdf, svg).
Matplotlib's Agg backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_coherence_figure(times, f_values, path: str, title: str = "",
                          d_integrand=None) -> None:
    """Plot a coherence trace F(t), optionally with the distance integrand."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(times, f_values, lw=1.2, color="tab:blue", label="F(t)")
    ax.set_xlabel("t")
    ax.set_ylabel("F(t)")
    if d_integrand is not None:
        ax2 = ax.twinx()
        ax2.plot(times, d_integrand, lw=0.9, color="tab:red", alpha=0.7, label="distance")
        ax2.set_ylabel("trace distance")
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(values, metric, path: str, xlabel: str, ylabel: str,
                      title: str = "") -> None:
    """Plot a swept metric (e.g. average distance against pulse count)."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(values, metric, "o-", lw=1.2, color="tab:blue")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_deviation_figure(rows, path: str, threshold: float | None = None,
                          title: str = "") -> None:
    """Log-log deviation curves per seed from (seed, T, deviation) rows."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    by_seed: dict[int, list[tuple[float, float]]] = {}
    for seed, t, dev in rows:
        by_seed.setdefault(seed, []).append((t, dev))
    for seed, pts in sorted(by_seed.items()):
        pts = sorted(pts)
        ts = np.array([p[0] for p in pts])
        ds = np.array([p[1] for p in pts])
        ax.loglog(ts, ds, "o-", lw=0.9, ms=3, label=f"seed {seed}")
    ax.set_xlabel("T")
    ax.set_ylabel("deviation")
    if title:
        ax.set_title(title)
    if len(by_seed) <= 10:
        ax.legend(fontsize=7)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
