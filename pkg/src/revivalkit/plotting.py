"""Figure rendering for chain and lattice amplitude reports.

All functions draw to a file and return the path; rendering uses the Agg
backend so the CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .ordered_hamming import AmplitudeGrid
from .orthopoly import RecurrenceCoefficients

__all__ = [
    "plot_couplings",
    "plot_chain_amplitudes",
    "plot_triangle_amplitudes",
]


def plot_couplings(coeffs: RecurrenceCoefficients, path: str,
                   title: str = "chain couplings") -> str:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 4.6), sharex=True)
    n = np.arange(1, len(coeffs.J) + 1)
    ax1.stem(n, coeffs.J, basefmt=" ")
    ax1.set_ylabel("$J_n$")
    ax1.set_title(title)
    ax2.stem(np.arange(len(coeffs.B)), coeffs.B, basefmt=" ")
    ax2.set_ylabel("$B_n$")
    ax2.set_xlabel("site $n$")
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_chain_amplitudes(times: np.ndarray, amplitudes: np.ndarray,
                          path: str, title: str = "site occupation") -> str:
    """Heatmap of |amplitude|^2 over (time, site)."""
    times = np.asarray(times)
    prob = np.abs(np.asarray(amplitudes)) ** 2
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    im = ax.imshow(prob.T, origin="lower", aspect="auto",
                   extent=(times[0], times[-1], -0.5, prob.shape[1] - 0.5),
                   vmin=0.0, vmax=1.0)
    ax.set_xlabel("time")
    ax.set_ylabel("site")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label=r"$|f_n(t)|^2$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_triangle_amplitudes(grid: AmplitudeGrid, path: str,
                             max_area: float = 900.0) -> str:
    """Lattice amplitude panels, one per time; circle areas scale with |f|."""
    N = grid.N
    n_panels = len(grid.times)
    ncols = min(3, n_panels)
    nrows = -(-n_panels // ncols)
    fig, axes = plt.subplots(nrows, ncols,
                             figsize=(3.1 * ncols, 2.9 * nrows),
                             squeeze=False)
    ii, jj = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
    mask = (ii + jj) <= N
    for k in range(nrows * ncols):
        ax = axes[k // ncols][k % ncols]
        if k >= n_panels:
            ax.axis("off")
            continue
        mag = np.abs(grid.values[k])[mask]
        ax.scatter(ii[mask], jj[mask], s=np.maximum(max_area * mag, 0.5),
                   alpha=0.75, edgecolors="none")
        ax.set_title(f"$t = {grid.times[k]:.4g}$", fontsize=9)
        ax.set_xlim(-0.7, N + 0.7)
        ax.set_ylim(-0.7, N + 0.7)
        ax.set_aspect("equal")
        ax.set_xticks(range(0, N + 1, max(1, N // 4)))
        ax.set_yticks(range(0, N + 1, max(1, N // 4)))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
