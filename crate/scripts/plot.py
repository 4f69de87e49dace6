"""Render figures from photonic-ising result tables.

    python scripts/plot.py results/ising_memory.csv
    python scripts/plot.py results/meanfield_phase.csv -o phase.png

The table kind is read from the .meta.json sidecar next to the CSV.
"""

import argparse
import json
import math
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd


def memory(df, ax):
    for beta, g in df.groupby("beta"):
        g = g.sort_values("M")
        y = [math.log(1 - p) if p < 1 else float("nan") for p in g.success_prob]
        ax.plot(g.M, y, "o-", label=f"beta={beta}")
    ax.set_xlabel("M")
    ax.set_ylabel("log(1 - p)")
    ax.legend()


def phase(df, ax):
    codes = {"ferro_cat": 0, "cat_only": 1, "trivial": 2}
    grid = df.assign(code=df.phase.map(codes)).pivot(index="kappad", columns="kappa1", values="code")
    ax.imshow(grid.values, origin="lower", aspect="auto",
              extent=[grid.columns.min(), grid.columns.max(), grid.index.min(), grid.index.max()])
    ax.set_xlabel("kappa1")
    ax.set_ylabel("kappa_d")


def toy(df, ax):
    ax.semilogy(df.N, 1 - df.fidelity, "o-", label="simulation")
    ax.semilogy(df.N, 1 - df.meanfield_plateau, "--", label="mean field")
    ax.set_xlabel("N")
    ax.set_ylabel("1 - F")
    ax.legend()


def xy(x, y):
    def draw(df, ax):
        for label, g in df.groupby("model") if "model" in df else [("", df)]:
            ax.plot(g[x], g[y], "o-", label=label)
        ax.set_xlabel(x)
        ax.set_ylabel(y)
    return draw


PLOTS = {
    "ising-memory": memory,
    "meanfield-phase": phase,
    "toy-fidelity": toy,
    "gap-scan": xy("lam", "gap"),
    "cavity-steady": xy("kappa1", "overlap"),
    "toom-demo": xy("step", "n_up"),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv", type=Path)
    ap.add_argument("-o", "--output", type=Path)
    args = ap.parse_args()
    meta = json.loads(args.csv.with_suffix(".meta.json").read_text())
    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(5, 4))
    PLOTS[meta["kind"]](df, ax)
    ax.set_title(meta["kind"])
    fig.tight_layout()
    fig.savefig(args.output or args.csv.with_suffix(".png"), dpi=150)


if __name__ == "__main__":
    main()
