#!/usr/bin/env python3
"""Plot wilc output directories.

    python scripts/plot.py out/            # whatever CSVs the directory holds
    python scripts/plot.py out/ --save figs/
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd


def learning_curve(d: Path):
    s = pd.read_csv(d / "summary.csv")
    fig, ax = plt.subplots()
    ax.semilogy(s["k"], s["rms"], "o-")
    ax.set(xlabel="iteration", ylabel="rms error (m)", title="learning curve")
    return fig


def traces(d: Path):
    files = sorted(d.glob("trace_k*.csv"))
    first, last = pd.read_csv(files[0]), pd.read_csv(files[-1])
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 8))
    axes[0].plot(first["t"], first["y_d"], "k--", label="reference")
    axes[0].plot(first["t"], first["y_k"], label=files[0].stem)
    axes[0].plot(last["t"], last["y_k"], label=files[-1].stem)
    axes[0].set_ylabel("position (m)")
    axes[0].legend()
    axes[1].plot(first["t"], first["e_k"], label=files[0].stem)
    axes[1].plot(last["t"], last["e_k"], label=files[-1].stem)
    axes[1].set_ylabel("error (m)")
    axes[1].legend()
    axes[2].plot(last["t"], last["u_l"], label="u_l")
    axes[2].plot(last["t"], last["u_f"], label="u_f")
    axes[2].set(xlabel="t (s)", ylabel=f"control, {files[-1].stem}")
    axes[2].legend()
    return fig


def single_trace(d: Path):
    t = pd.read_csv(d / "trace.csv")
    fig, axes = plt.subplots(2, 1, sharex=True)
    axes[0].plot(t["t"], t["y_d"], "k--", t["t"], t["y_k"])
    axes[0].set_ylabel("position (m)")
    axes[1].plot(t["t"], t["P_a"] / 1e5, label="P_a")
    axes[1].plot(t["t"], t["P_b"] / 1e5, label="P_b")
    axes[1].set(xlabel="t (s)", ylabel="pressure (bar)")
    axes[1].legend()
    return fig


def sweep(d: Path):
    s = pd.read_csv(d / "sweep.csv")
    fig, ax = plt.subplots()
    for alpha, g in s.groupby("alpha"):
        ax.semilogy(g["k"], g["rms"], "o-", label=f"α = {alpha:g}")
    ax.set(xlabel="iteration", ylabel="rms error (m)", title="learning gain sweep")
    ax.legend()
    return fig


def ga(d: Path):
    h = pd.read_csv(d / "ga_history.csv")
    fig, ax = plt.subplots()
    ax.plot(h["generation"], h["best"], "o-", label="best")
    ax.plot(h["generation"], h["mean"], "s--", label="mean")
    ax.set(xlabel="generation", ylabel="fitness (m)", title="GA")
    ax.legend()
    return fig


PLOTS = {
    "summary.csv": learning_curve,
    "trace_k01.csv": traces,
    "trace.csv": single_trace,
    "sweep.csv": sweep,
    "ga_history.csv": ga,
}


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("dir", type=Path)
    p.add_argument("--save", type=Path, help="write PNGs here instead of showing")
    args = p.parse_args()

    figs = {}
    for d in [args.dir, args.dir / "learn"]:
        for name, fn in PLOTS.items():
            if (d / name).exists():
                figs[f"{d.name}_{Path(name).stem}"] = fn(d)
    if not figs:
        raise SystemExit(f"no wilc CSVs in {args.dir}")
    if args.save:
        args.save.mkdir(parents=True, exist_ok=True)
        for name, fig in figs.items():
            fig.tight_layout()
            fig.savefig(args.save / f"{name}.png", dpi=120)
    else:
        plt.show()


if __name__ == "__main__":
    main()
