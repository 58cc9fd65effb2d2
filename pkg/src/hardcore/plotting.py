"""Figure rendering for the CLI report paths.

Every CSV-emitting subcommand drops a PNG next to its output file (same
stem) unless asked not to.  Matplotlib runs on the Agg backend; imports stay
inside the functions so library users who never plot do not pay for them.
"""

from __future__ import annotations

import math
from pathlib import Path


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def companion_png(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def save_moment_grid(gammas, deltas, values, func_name: str, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    mesh = ax.pcolormesh(gammas, deltas, values.T, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=func_name)
    ax.set_xlabel("gamma")
    ax.set_ylabel("delta")
    ax.set_title(f"{func_name} over the overlap rectangle")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_certification_heatmap(report, path) -> Path:
    plt = _pyplot()
    import numpy as np
    ni, nj = report.grid
    h1 = np.full((ni, nj), math.nan)
    phi = np.full((ni, nj), math.nan)
    for c in report.cells:
        h1[c.i, c.j] = c.h1_upper
        phi[c.i, c.j] = c.phi_lower
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2))
    for ax, data, label in ((axes[0], h1, "h1 upper bound"),
                            (axes[1], phi, "Phi lower bound")):
        mesh = ax.pcolormesh(data.T, shading="auto", cmap="magma")
        fig.colorbar(mesh, ax=ax, label=label)
        ax.set_xlabel("gamma cell i")
        ax.set_ylabel("delta cell j")
    fig.suptitle(f"certification sweep ({'PASS' if report.verdict else 'FAIL'})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_decay_plot(est, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    levels = est.levels
    ax.semilogy(levels, [max(est.x_from_variance[l], 1e-300) for l in levels],
                "o-", label="x_l (variance route)")
    ax.semilogy(levels, [abs(est.x_mean[l]) for l in levels],
                "s--", label="|x_l| (direct)")
    ax.semilogy(levels, [max(est.abs_gap_q[l], 1e-300) for l in levels],
                "^-", label="E|X - q|")
    ref = [est.x_from_variance[levels[0]]
           * est.predicted_two_level_rate ** ((l - levels[0]) / 2.0)
           for l in levels]
    ax.semilogy(levels, ref, ":", label="predicted rate")
    ax.set_xlabel("level")
    ax.set_ylabel("decay statistics")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_trajectory_plot(traj, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    t = range(1, len(traj.w_plus) + 1)
    ax.plot(t, traj.w_plus, label="W+ occupancy")
    ax.plot(t, traj.w_minus, label="W- occupancy")
    ax.set_xlabel("sweep")
    ax.set_ylabel("occupied count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_cycle_bars(stats, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    lengths = [s.length for s in stats]
    ax.bar([l - 0.2 for l in lengths], [s.count for s in stats],
           width=0.4, label="observed")
    ax.bar([l + 0.2 for l in lengths], [s.lambda_mean for s in stats],
           width=0.4, label="Poisson mean r(d,i)/i")
    ax.set_xlabel("cycle length")
    ax.set_ylabel("count")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
