"""Figure rendering for CLI reports.

Uses the Agg backend so runs work headless; every function writes a PNG and
returns the path.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["plot_sweep", "plot_energies"]


def plot_sweep(p_values, acc_z, acc_lr, path):
    """Accuracy-vs-p curves for the Z and L R affinities.

    acc_z / acc_lr are sequences of per-p accuracy lists (one value per
    seed); the plot shows seed means.
    """
    p_values = list(p_values)
    mean_z = [float(np.mean(a)) for a in acc_z]
    mean_lr = [float(np.mean(a)) for a in acc_lr]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(p_values, mean_lr, "o-", label="LR affinity")
    ax.plot(p_values, mean_z, "s--", label="Z affinity")
    ax.set_xlabel("points per subspace")
    ax.set_ylabel("mean clustering accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_energies(energies, gamma, path):
    """Per-column corruption energies with the detection threshold."""
    energies = np.asarray(energies, dtype=np.float64)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(np.arange(energies.size), energies, width=0.8)
    if gamma is not None:
        ax.axhline(gamma, color="crimson", linestyle="--", label=f"gamma = {gamma:.4g}")
        ax.legend()
    ax.set_xlabel("column")
    ax.set_ylabel("corruption energy")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
