"""Scatter plots of anchored activity pairs."""

import logging
from typing import Optional, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .eventlog import PairSeries  # noqa: E402

logger = logging.getLogger(__name__)


def plot_pair_series(
    series: PairSeries,
    output_path: str,
    title: Optional[str] = None,
    coefficient: Optional[float] = None,
    figsize: Tuple[float, float] = (6, 6),
    max_points: int = 5000
) -> str:
    """
    Scatter plot of the execution times of an activity pair.

    Args:
        series: Anchored pair series
        output_path: PNG file to write
        title: Plot title (default names the pair and modality)
        coefficient: Causal slope to draw through the sample means
        figsize: Figure size in inches
        max_points: Points drawn at most (evenly spaced subset beyond that)

    Returns:
        output_path
    """
    x, y = series.first, series.second
    if len(x) > max_points:
        keep = np.linspace(0, len(x) - 1, max_points).astype(int)
        x, y = x[keep], y[keep]

    fig, ax = plt.subplots(figsize=figsize)
    ax.scatter(x, y, s=4, alpha=0.4, color='#1f77b4', label=f'{len(series)} cases')

    if coefficient is not None and len(x):
        xs = np.linspace(x.min(), x.max(), 2)
        ax.plot(xs, y.mean() + coefficient * (xs - x.mean()), color='#d62728',
                label=f'beta = {coefficient:.2f}')

    modality = series.modality.value if series.modality is not None else 'raw'
    ax.set_xlabel(f'{series.first_activity} time (s)')
    ax.set_ylabel(f'{series.second_activity} time (s)')
    ax.set_title(title or f'{series.first_activity} vs {series.second_activity} ({modality})')
    ax.legend(loc='upper left')
    ax.grid(True, alpha=0.3)

    plt.tight_layout()
    plt.savefig(output_path, dpi=150, bbox_inches='tight')
    plt.close(fig)
    logger.info("Saved pair plot to %s", output_path)
    return output_path
