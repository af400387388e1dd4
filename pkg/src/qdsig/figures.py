"""Figure rendering for the report path.

Every plot is written to a file next to the delimited data it visualises;
nothing here is needed to produce the CSV/JSON payloads themselves.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_entropy_figure(rows: list[dict], path: str | Path) -> None:
    """Accessible information per signature element vs mean photon number,
    one curve per alphabet size, with the log2 N ceilings."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    n_values = sorted({int(r["n_phases"]) for r in rows})
    for n in n_values:
        pts = [(r["mean_photons"], r["entropy_bits"]) for r in rows if int(r["n_phases"]) == n]
        pts.sort()
        xs, ys = zip(*pts)
        (line,) = ax.plot(xs, ys, label=f"N = {n}")
        ax.axhline(math.log2(n), color=line.get_color(), ls=":", lw=0.8, alpha=0.6)
    ax.set_xlabel(r"mean photon number $|\alpha|^2$")
    ax.set_ylabel(r"$S(\rho)$ (bits)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_bounds_figure(sweep_rows: list[dict], path: str | Path) -> None:
    """Failure-probability bounds vs signature length on log-log axes."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    lengths = [r["L"] for r in sweep_rows]
    for key, label in [
        ("eps_forging", "forging"),
        ("eps_repudiation", "repudiation"),
        ("eps_robustness", "robustness"),
        ("eps_active", "forging (active)"),
    ]:
        ax.plot(lengths, [max(r[key], 1e-300) for r in sweep_rows], label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_ylim(1e-12, 2)
    ax.set_xlabel("signature length L")
    ax.set_ylabel("failure probability bound")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_cost_matrix_figure(values: np.ndarray, path: str | Path, title: str = "cost matrix") -> None:
    """Heatmap of per-pulse click probabilities c[declared, encoded]."""
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.imshow(values, cmap="viridis")
    fig.colorbar(im, ax=ax, label="click probability")
    ax.set_xlabel("encoded phase index")
    ax.set_ylabel("declared phase index")
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_simulation_figure(summary_dict: dict, path: str | Path) -> None:
    """Empirical failure frequencies (Wilson 95% intervals) next to their
    analytic bounds."""
    pairs = [
        ("forging", summary_dict["charlie_accept"], summary_dict["bound_eps_forging"]),
        ("repudiation", summary_dict["repudiation"], summary_dict["bound_eps_repudiation"]),
        ("honest abort", summary_dict["honest_abort"], summary_dict["bound_eps_robustness"]),
    ]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = np.arange(len(pairs))
    freqs = [p[1]["frequency"] for p in pairs]
    lows = [max(0.0, p[1]["frequency"] - p[1]["ci_low"]) for p in pairs]
    highs = [max(0.0, p[1]["ci_high"] - p[1]["frequency"]) for p in pairs]
    ax.bar(xs - 0.18, freqs, width=0.34, yerr=[lows, highs], capsize=4, label="empirical")
    ax.bar(xs + 0.18, [p[2] for p in pairs], width=0.34, label="bound")
    ax.set_xticks(xs, [p[0] for p in pairs])
    ax.set_ylabel("probability")
    ax.set_title(summary_dict.get("label", ""), fontsize=10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
