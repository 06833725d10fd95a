"""Figure rendering for flow traces and 2D residual reports.

Uses the Agg backend so plots work headless; every figure lands next to
the delimited output it visualizes.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def flow_trace_figure(trace: list[dict], path: str, target: str = "H") -> None:
    """Semilog decay of the functional plus the residual pair."""
    its = [row["iteration"] for row in trace]
    vals = [max(row["value"], 1e-300) for row in trace]
    res1 = [max(row["res_dphi"], 1e-300) for row in trace]
    res2 = [max(row["res_curvature"], 1e-300) for row in trace]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(its, vals, "o-", label=f"functional {target}", markersize=3)
    ax.semilogy(its, res2, "s--", label="curvature residual", markersize=3)
    if max(res1) > 1e-299:
        ax.semilogy(its, res1, "^--", label="derivative residual", markersize=3)
    ax.set_xlabel("accepted step")
    ax.set_ylabel("value")
    ax.legend(frameon=False)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def reduce2d_residual_figure(residuals: dict[str, tuple], path: str) -> None:
    """Bar chart of the residual norms of each formulation side by side."""
    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    labels, values, groups = [], [], []
    for form, res in residuals.items():
        for i, v in enumerate(res):
            labels.append(f"{form}[{i}]")
            values.append(v)
            groups.append(form)
    xs = range(len(values))
    colors = {f: c for f, c in zip(residuals, plt.cm.tab10.colors)}
    ax.bar(xs, values, color=[colors[g] for g in groups])
    ax.set_xticks(list(xs))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("residual norm")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
