#!/usr/bin/env python3
"""Render the plot-ready CSVs written by `fbmgen convergence` (and, when
present, a paths.csv / oracle_paths.csv from `simulate` / `oracle`).

usage: plot_report.py RUN_DIR [--out DIR] [--max-paths N]
"""

import argparse
import json
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_convergence(df, out):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(df["n"], df["sup_dev"], "o-", label="sup deviation")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("sup |cov − fBm cov|")
    ax.set_title("covariance deviation vs field intensity")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / "convergence.png", dpi=150)
    plt.close(fig)


def plot_variance_bound(df, out):
    fig, ax = plt.subplots(figsize=(6, 4))
    ns = sorted(df["n"].unique())
    cmap = plt.get_cmap("viridis")
    for i, n in enumerate(ns):
        g = df[df["n"] == n]
        ax.plot(g["t"], g["variance"], "-", color=cmap(i / max(1, len(ns) - 1)),
                label=f"n = {n:g}")
    g = df[df["n"] == ns[-1]]
    ax.plot(g["t"], g["limit"], "k--", label="limit $t^{2H}$")
    ax.set_xlabel("t")
    ax.set_ylabel("Var[Y_n(t)]")
    ax.set_title("second moment vs limit (bound K·t^{2H} off-scale)")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / "variance_bound.png", dpi=150)
    plt.close(fig)


def plot_paths(df, out, name, max_paths):
    fig, ax = plt.subplots(figsize=(6, 4))
    for rid, g in df.groupby("replica"):
        if rid >= max_paths:
            break
        ax.plot(g["t"], g["value"], lw=0.7, alpha=0.7)
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    ax.set_title(name)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / f"{name.replace('.csv', '')}.png", dpi=150)
    plt.close(fig)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("run_dir", type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path, default=None)
    ap.add_argument("--max-paths", type=int, default=30)
    args = ap.parse_args()

    run = args.run_dir
    out = args.out or run / "plots"
    out.mkdir(parents=True, exist_ok=True)

    made = []
    f = run / "convergence.csv"
    if f.exists():
        plot_convergence(pd.read_csv(f), out)
        made.append("convergence.png")
    f = run / "variance_bound.csv"
    if f.exists():
        plot_variance_bound(pd.read_csv(f), out)
        made.append("variance_bound.png")
    for name in ("paths.csv", "oracle_paths.csv"):
        f = run / name
        if f.exists():
            plot_paths(pd.read_csv(f), out, name, args.max_paths)
            made.append(name.replace(".csv", ".png"))

    man = run / "manifest.json"
    if man.exists():
        cfg = json.loads(man.read_text()).get("config", {})
        print("run config:", json.dumps(cfg, separators=(",", ":")))
    if not made:
        sys.exit(f"no known CSVs found in {run}")
    print("wrote", ", ".join(made), "to", out)


if __name__ == "__main__":
    main()
