"""Figure rendering for the report path.

Each figure lands next to its delimited twin: convergence traces beside
the trace CSV, error histograms beside the bias records.  Rendering is
optional everywhere; the data files are the contract.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .harness import BiasRecord, ConvergenceResult  # noqa: E402


def plot_convergence(result: ConvergenceResult, path: Path | str, title: str = "") -> None:
    """Running estimates of both chains against the two reference lines."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    steps = range(1, len(result.fiber_running) + 1)
    ax.plot(steps, result.fiber_running, lw=0.9, ls="--", color="tab:blue",
            label="fiber chain")
    ax.plot(steps, result.orbit_running, lw=1.1, color="tab:orange",
            label="orbit chain")
    ax.axhline(result.exact, color="black", lw=1.0, label="exact")
    ax.axhline(result.perm_reference, color="gray", lw=1.0, ls=":",
               label="permutation")
    ax.set_xlabel("step")
    ax.set_ylabel("estimate of F(u_obs)")
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bias_histograms(
    records: Sequence[BiasRecord], path: Path | str, title: str = ""
) -> None:
    """Side-by-side histograms of the absolute errors of the three methods."""
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.2), sharey=True)
    series = [
        ("fiber", [abs(r.bias_fiber) for r in records]),
        ("orbit", [abs(r.bias_orbit) for r in records]),
        ("perm", [abs(r.bias_perm) for r in records]),
    ]
    top = max(max(vals) for _, vals in series if vals) or 1e-6
    for ax, (name, vals) in zip(axes, series):
        ax.hist(vals, bins=30, range=(0.0, top), color="tab:blue")
        ax.set_title(name, fontsize=9)
        ax.set_xlabel("|error|")
    axes[0].set_ylabel("replicates")
    if title:
        fig.suptitle(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
