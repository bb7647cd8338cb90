"""
Report Figures

Renders the monthly detection histogram, daily losses per type and
phisher life cycles to PNG files. Every figure can also be rebuilt
from the CSV files written next to it.
"""

import logging
from datetime import datetime, timezone
from decimal import Decimal
from typing import Dict, List, Sequence, Tuple

import matplotlib
matplotlib.use('Agg')  # Headless backend for file output
import matplotlib.pyplot as plt
import numpy as np

from ..rules import PhishType
from .phishers import DAY, PhisherStats

logger = logging.getLogger(__name__)

BACKGROUND = '#1e1e1e'
FOREGROUND = '#d4d4d4'
GRID = '#444444'
TYPE_COLORS = {
    PhishType.AAT.value: '#ff6b6b',
    PhishType.STMT.value: '#4a9eff',
    PhishType.ISA.value: '#ffd166',
}


def _styled_axes(width: float = 9, height: float = 4.5):
    fig, ax = plt.subplots(figsize=(width, height), dpi=100, facecolor=BACKGROUND)
    ax.set_facecolor(BACKGROUND)
    ax.tick_params(colors=FOREGROUND, labelsize=8)
    for spine in ax.spines.values():
        spine.set_color(GRID)
    ax.grid(True, color=GRID, linestyle='--', linewidth=0.5)
    return fig, ax


def _save(fig, path: str) -> str:
    fig.tight_layout()
    fig.savefig(path, facecolor=BACKGROUND, metadata={'Software': None})
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def render_monthly_histogram(histogram: Dict[Tuple[int, int], Dict[str, int]], path: str) -> str:
    """
    Stacked bars of detections per month and type.

    Args:
        histogram: Output of monthly_histogram
        path: PNG destination

    Returns:
        path
    """
    fig, ax = _styled_axes()
    months = sorted(histogram)
    labels = [f"{year}-{month:02d}" for year, month in months]
    x = np.arange(len(months))
    bottom = np.zeros(len(months))
    for phish_type in PhishType:
        counts = np.array([histogram[m].get(phish_type.value, 0) for m in months], dtype=float)
        ax.bar(x, counts, bottom=bottom, color=TYPE_COLORS[phish_type.value],
               label=phish_type.value, width=0.8)
        bottom += counts
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=45, ha='right')
    ax.set_ylabel('Phishing transactions', color=FOREGROUND)
    ax.set_title('Detected phishing transactions per month', color='#ffffff',
                 fontsize=12, fontweight='bold')
    ax.legend(facecolor=BACKGROUND, labelcolor=FOREGROUND, edgecolor=GRID)
    return _save(fig, path)


def render_daily_losses(series: Dict[Tuple[str, str], Decimal], path: str) -> str:
    """One line per type of USD lost per day."""
    fig, ax = _styled_axes()
    days = sorted({day for day, _ in series})
    dates = [datetime.strptime(d, '%Y-%m-%d').replace(tzinfo=timezone.utc) for d in days]
    for phish_type in PhishType:
        values = [float(series.get((day, phish_type.value), 0)) for day in days]
        if any(values):
            ax.plot(dates, values, '-', linewidth=1.5, color=TYPE_COLORS[phish_type.value],
                    label=phish_type.value)
    ax.set_ylabel('Loss (USD)', color=FOREGROUND)
    ax.set_title('Daily losses by phishing type', color='#ffffff', fontsize=12, fontweight='bold')
    if days:
        ax.legend(facecolor=BACKGROUND, labelcolor=FOREGROUND, edgecolor=GRID)
    fig.autofmt_xdate()
    return _save(fig, path)


def render_lifecycles(stats: Sequence[PhisherStats], path: str) -> str:
    """
    Left: phishing and dormant periods per account as horizontal bars.
    Right: share of each life cycle spent phishing.
    """
    ordered: List[PhisherStats] = sorted(stats, key=lambda s: (s.dominant_type.precedence,
                                                               s.first_phish, s.account))
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, max(3.0, 0.25 * len(ordered) + 1.5)),
                                      dpi=100, facecolor=BACKGROUND)
    for ax in (left, right):
        ax.set_facecolor(BACKGROUND)
        ax.tick_params(colors=FOREGROUND, labelsize=7)
        for spine in ax.spines.values():
            spine.set_color(GRID)

    y = np.arange(len(ordered))
    starts = np.array([s.first_phish for s in ordered], dtype=float) / DAY
    phishing = np.array([s.phishing_period for s in ordered], dtype=float) / DAY
    dormant = np.array([s.dormant_period for s in ordered], dtype=float) / DAY
    colors = [TYPE_COLORS[s.dominant_type.value] for s in ordered]

    left.barh(y, phishing, left=starts, color=colors)
    left.barh(y, dormant, left=starts + phishing, color=GRID)
    left.set_yticks(y)
    left.set_yticklabels([s.account.short() for s in ordered])
    left.set_xlabel('Days since epoch', color=FOREGROUND)
    left.set_title('Phishing (colour) and dormant (grey) periods', color='#ffffff', fontsize=10)

    cycles = phishing + dormant
    shares = np.divide(phishing, cycles, out=np.ones_like(phishing), where=cycles > 0)
    right.barh(y, shares, color=colors)
    right.barh(y, 1.0 - shares, left=shares, color=GRID)
    right.set_yticks(y)
    right.set_yticklabels([])
    right.set_xlim(0, 1)
    right.set_xlabel('Share of life cycle', color=FOREGROUND)
    right.set_title('Phishing share of life cycle', color='#ffffff', fontsize=10)
    return _save(fig, path)
