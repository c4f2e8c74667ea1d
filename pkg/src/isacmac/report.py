"""Figure rendering for the report commands.

Every sweep/curve command writes its delimited output and, unless asked
not to, a matplotlib figure next to it. Rendering is headless (Agg) and
deliberately plain: one axes, labeled, tight layout.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

FIG_SIZE = (5.2, 3.4)


def _new_axes(xlabel, ylabel, title):
    fig, ax = plt.subplots(figsize=FIG_SIZE, dpi=150)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    ax.grid(True, alpha=0.3, linewidth=0.5)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def render_rd_curve(points, path, title="rate-distortion"):
    fig, ax = _new_axes("distortion D", "rate (bits)", title)
    ax.plot([p.D for p in points], [p.R for p in points], "o-", ms=3)
    return _save(fig, path)


def render_region_points(points, path, title="rate-distortion frontier"):
    """Frontier scatter: R1 against D2, the zero-R2 slice emphasized."""
    fig, ax = _new_axes("distortion D2", "rate R1 (bits)", title)
    rest = [p for p in points if p.r2 > 1e-12]
    slice0 = [p for p in points if p.r2 <= 1e-12]
    if rest:
        ax.scatter(
            [p.d2 for p in rest], [p.r1 for p in rest],
            s=8, alpha=0.35, label="R2 > 0 vertices",
        )
    if slice0:
        slice0 = sorted(slice0, key=lambda p: (p.d2, p.r1))
        ax.plot(
            [p.d2 for p in slice0], [p.r1 for p in slice0],
            "o-", ms=3, label="R2 = 0 face",
        )
    ax.legend(fontsize=8)
    return _save(fig, path)


def render_symmetric_curves(curves, path, title="symmetric rate vs distortion"):
    fig, ax = _new_axes("distortion D2", "symmetric rate R (bits)", title)
    for name, pts in curves.items():
        xs = [p.d2 for p in pts if not math.isnan(p.rate)]
        ys = [p.rate for p in pts if not math.isnan(p.rate)]
        ax.plot(xs, ys, "o-", ms=3, label=name)
    ax.legend(fontsize=8)
    return _save(fig, path)
