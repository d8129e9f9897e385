"""SVG figure writers for the command line reports.

Imported lazily by the CLI so that plot-free runs never pay the matplotlib
import cost.  All figures are written through the Agg backend with stripped
metadata, keeping outputs stable across runs.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

plt.rcParams["svg.hashsalt"] = "oodlab"

__all__ = ["score_histograms_svg", "roc_curves_svg", "bar_chart_svg"]

_SAVE_KWARGS = {"format": "svg", "metadata": {"Date": None}}


def score_histograms_svg(path, scores_by_label, xlabel, bins=120):
    """Overlay normalized histograms of several score samples."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for label, scores in scores_by_label.items():
        ax.hist(scores, bins=bins, density=True, histtype="step", lw=1.4, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def roc_curves_svg(path, curves):
    """Plot one or more (size, power) curves against the chance diagonal.

    Parameters
    ----------
    path : output file path
    curves : dict mapping label to RocResult
    """
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    ax.plot([0, 1], [0, 1], ls=":", c="gray", lw=1.0, label="chance")
    for label, roc in curves.items():
        ax.plot(roc.sizes, roc.powers, lw=1.6, label=f"{label} (auc={roc.auc:.3f})")
    ax.set_xlabel("size (false alarm rate)")
    ax.set_ylabel("power (detection rate)")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.legend(frameon=False, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def bar_chart_svg(path, labels, values, ylabel):
    """Simple labeled bar chart."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.bar(range(len(labels)), values, color="#4878b0")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
