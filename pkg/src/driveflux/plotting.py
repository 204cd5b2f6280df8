"""Optional rendering of sweep tables as quick-look figures."""

from __future__ import annotations

__all__ = ["render_sweep_figure"]

_PANELS = (("j_left", "J_left"), ("j_right", "J_right"), ("j_pump", "J_pump"))


def render_sweep_figure(rows, path) -> None:
    """Plot the three currents against the sweep variable, one line per method.

    Writes a PNG (or whatever the path suffix selects) next to the CSV; the
    import lives inside the function so plain sweeps never pay for it.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = list(rows)
    if not rows:
        raise ValueError("no rows to plot")
    methods = sorted({row.method for row in rows})
    sweep_var = rows[0].sweep_var

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(6.0, 7.5))
    for ax, (attr, title) in zip(axes, _PANELS):
        for method in methods:
            pts = [(row.value, getattr(row.report, attr))
                   for row in rows if row.method == method]
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    marker=".", label=method)
        ax.set_ylabel(title)
        ax.axhline(0.0, color="0.8", lw=0.8, zorder=0)
    axes[0].legend(loc="best", fontsize="small")
    axes[-1].set_xlabel(sweep_var)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
