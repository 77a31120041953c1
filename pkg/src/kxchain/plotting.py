"""Rate figures rendered next to report files (headless backend)."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["rate_figure"]


def rate_figure(
    path: str,
    series: Mapping[str, tuple[Sequence[float], Sequence[Optional[float]]]],
    reference: Optional[float] = None,
    reference_label: str = "target",
    xlabel: str = "n",
    ylabel: str = "bits per symbol",
    title: Optional[str] = None,
) -> str:
    """One line per labelled (xs, ys) series; None entries are dropped."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, (xs, ys) in series.items():
        keep = [(x, y) for x, y in zip(xs, ys) if y is not None]
        if not keep:
            continue
        ax.plot(
            [x for x, _ in keep],
            [y for _, y in keep],
            marker="o",
            markersize=3,
            linewidth=1.0,
            label=label,
        )
    if reference is not None:
        ax.axhline(reference, color="black", linestyle="--", linewidth=0.8, label=reference_label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
