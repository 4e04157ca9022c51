"""Figure rendering for sweep datasets.

Renders the comparison curves (numeric dots, analytic solid, linear-model
dashed) from sweep rows to an image file next to the delimited output.
"""

from __future__ import annotations

from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .sweep import SweepRow  # noqa: E402


def _group_key(row: SweepRow, var: str) -> str:
    if row.model == "essential":
        return f"{row.model} N={int(row.eps_or_n)}"
    if var == "a" and row.eps_or_n:
        return f"{row.model} eps={row.eps_or_n:g}"
    return row.model


def plot_sweep(rows: Sequence[SweepRow], path: str, var: Optional[str] = None,
               title: Optional[str] = None, logy: bool = True) -> None:
    """Render one comparison figure for a set of sweep rows."""
    if not rows:
        raise ValueError("no rows to plot")
    if var is None:
        a_vals = {r.a for r in rows}
        var = "eps" if len(a_vals) == 1 and len(rows) > 1 else "a"

    groups: dict[str, list[SweepRow]] = {}
    for r in rows:
        groups.setdefault(_group_key(r, var), []).append(r)

    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for i, (label, grp) in enumerate(groups.items()):
        xs = [r.a if var == "a" else r.eps_or_n for r in grp]
        color = f"C{i}"
        num = [(x, r.p_numeric) for x, r in zip(xs, grp) if r.p_numeric is not None]
        if num:
            ax.plot(*zip(*num), ".", color=color, label=f"{label} numeric")
        an = [(x, r.p_ddp) for x, r in zip(xs, grp) if r.p_ddp is not None]
        if an:
            ax.plot(*zip(*an), "-", color=color, alpha=0.8, label=f"{label} analytic")
    lz = [(r.a if var == "a" else r.eps_or_n, r.p_lz)
          for r in rows if r.p_lz is not None]
    if lz and var == "a":
        lz = sorted(set(lz))
        ax.plot(*zip(*lz), "k--", alpha=0.6, label="linear model")

    if logy:
        ax.set_yscale("log")
    ax.set_xlabel("coupling a" if var == "a" else "nonlinearity eps")
    ax.set_ylabel("transition probability P")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
