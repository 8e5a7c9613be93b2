#!/usr/bin/env python3
"""Render the plot CSVs written by `sociallearn simulate` into one PNG."""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("dir", type=Path, help="output directory of a simulate run")
    parser.add_argument("--truth", type=int, default=1, help="true hypothesis (1-based)")
    parser.add_argument("-o", "--output", type=Path, help="PNG path (default DIR/overview.png)")
    args = parser.parse_args()

    network = pd.read_csv(args.dir / "network.csv")
    beliefs = pd.read_csv(args.dir / "beliefs.csv")
    rates = pd.read_csv(args.dir / "rates.csv")
    tau = pd.read_csv(args.dir / "tau.csv")

    fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))

    w = network.pivot(index="from", columns="to", values="weight").fillna(0.0)
    im = axes[0].imshow(w.values, cmap="viridis")
    axes[0].set_title("combination weights a(from, to)")
    axes[0].set_xlabel("to")
    axes[0].set_ylabel("from")
    fig.colorbar(im, ax=axes[0], fraction=0.046)

    truth = beliefs[beliefs.hypothesis == args.truth]
    for agent, g in truth.groupby("agent"):
        axes[1].plot(g.time, g.belief, lw=1, label=f"agent {agent}")
    axes[1].set_title(f"belief in hypothesis {args.truth}")
    axes[1].set_xlabel("time")
    axes[1].set_ylim(-0.02, 1.02)
    if not tau.empty:
        ax = axes[1].twinx()
        ax.plot(tau.time, tau.tau, ".", ms=1, color="grey", alpha=0.3)
        ax.set_ylabel("trending hypothesis")

    for h, g in rates[rates.hypothesis != args.truth].groupby("hypothesis"):
        line = None
        for _, a in g.groupby("agent"):
            (line,) = axes[2].plot(a.time, a.rate, lw=0.6, alpha=0.6, color=line.get_color() if line else None)
        axes[2].axhline(g.d_ave.iloc[0], ls="--", color=line.get_color(), label=f"d_ave({h})")
    axes[2].set_title("log-belief ratio / time")
    axes[2].set_xlabel("time")
    axes[2].legend(fontsize="small")

    fig.tight_layout()
    out = args.output or args.dir / "overview.png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
