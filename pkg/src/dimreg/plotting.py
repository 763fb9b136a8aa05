"""Figure rendering for benchmark reports.

Each function reads the delimited output a bench entry point wrote into a
directory and renders a PNG next to it.  Uses the non-interactive Agg
backend so rendering works headless.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .data import csv_read


def _read_summary(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    return header, rows


def _grouped_bars(path: str, out_path: str, ylabel: str, log: bool) -> str:
    header, rows = _read_summary(path)
    cases = [r[0] for r in rows]
    dim = [float(r[1]) if r[1] else np.nan for r in rows]
    dimless = [float(r[2]) if r[2] else np.nan for r in rows]
    x = np.arange(len(cases))
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(x - 0.2, dim, width=0.4, label="dimensional")
    ax.bar(x + 0.2, dimless, width=0.4, label="dimensionless")
    ax.set_xticks(x)
    ax.set_xticklabels(cases, rotation=30, ha="right")
    ax.set_ylabel(ylabel)
    if log:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def plot_table1(out_dir: str) -> list[str]:
    """Bar charts of regression time and minimum data points per case."""
    made = []
    made.append(_grouped_bars(os.path.join(out_dir, "fig1_runtime.csv"),
                              os.path.join(out_dir, "fig1_runtime.png"),
                              "regression seconds", log=True))
    made.append(_grouped_bars(os.path.join(out_dir, "fig1_points.csv"),
                              os.path.join(out_dir, "fig1_points.png"),
                              "minimum data points", log=True))
    return made


def plot_logistic(out_dir: str) -> list[str]:
    """Hidden-term comparison plus the training loss curve."""
    made = []
    d = csv_read(os.path.join(out_dir, "fig2_logistic.csv"))
    order = np.argsort(d.column("alpha"))
    a = d.column("alpha")[order]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(a, d.column("G_true")[order], "k-", label="true term")
    ax.plot(a, d.column("G_upinn")[order], "C0--", label="network term")
    ax.plot(a, d.column("G_regressed")[order], "C3:", label="regressed term")
    ax.set_xlabel(r"$\alpha$")
    ax.set_ylabel(r"$\tilde G(\alpha)$")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "fig2_logistic.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    made.append(path)

    loss_path = os.path.join(out_dir, "logistic_loss.csv")
    if os.path.exists(loss_path):
        h = csv_read(loss_path)
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.semilogy(h.column("epoch"), h.column("loss_mse"), label="data loss")
        ax.semilogy(h.column("epoch"), h.column("loss_ode"), label="residual loss")
        ax.set_xlabel("epoch")
        ax.set_ylabel("loss")
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out_dir, "logistic_loss.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        made.append(path)
    return made


def plot_bead(out_dir: str) -> list[str]:
    """Per-gamma hidden-term lines: true, network, and regressed."""
    d = csv_read(os.path.join(out_dir, "fig3_surface.csv"))
    gammas = np.unique(d.column("gamma"))
    fig, ax = plt.subplots(figsize=(7, 5))
    cmap = plt.get_cmap("viridis")
    for i, gv in enumerate(gammas):
        mask = d.column("gamma") == gv
        theta = d.column("theta")[mask]
        order = np.argsort(theta)
        color = cmap(i / max(len(gammas) - 1, 1))
        ax.plot(theta[order], d.column("G_true")[mask][order], "-",
                color=color, label=rf"$\gamma$={gv:.2g}")
        ax.plot(theta[order], d.column("G_regressed")[mask][order], ":",
                color=color)
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel(r"$\tilde G(\theta;\gamma)$")
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    path = os.path.join(out_dir, "fig3_surface.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]
