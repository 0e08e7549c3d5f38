"""Log-log figure rendering for the report path.

matplotlib is imported lazily with the Agg backend so library use and
tests never need a display.
"""

from __future__ import annotations


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def loglog_figure(path, series_list, title: str, fits=None, xlabel: str = "n"):
    """Render one or more (n, steps) series on shared log-log axes.

    fits, when given, maps series name to a FitReport whose fitted line
    is drawn over the matching points.
    """
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for series in series_list:
        ns = [n for n, _ in series.points]
        ts = [t for _, t in series.points]
        label = series.name
        fit = (fits or {}).get(series.name)
        if fit is not None:
            label += f" (slope {fit.exponent:.2f})"
        ax.loglog(ns, ts, marker="o", linestyle="-", markersize=3, label=label)
        if fit is not None:
            import math

            line = []
            for n in ns:
                y = fit.constant * n**fit.exponent
                if fit.model == "n^a*log" and n >= 2:
                    y *= math.log2(n)
                line.append(y)
            ax.loglog(ns, line, linestyle="--", linewidth=0.8, color="gray")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("charged steps")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def ratio_figure(path, named_ratio_series, title: str, xlabel: str = "n"):
    """Render ratio or coefficient series on a log-x axis."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for name, points in named_ratio_series:
        ns = [n for n, _ in points]
        rs = [r for _, r in points]
        ax.semilogx(ns, rs, marker="o", linestyle="-", markersize=3, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("ratio")
    ax.set_title(title)
    ax.legend(fontsize=8)
    ax.grid(True, which="both", linewidth=0.3, alpha=0.5)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
