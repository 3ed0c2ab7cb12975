"""Plot median distance and wall time per method from a `projtomo benchmark` CSV.

Usage: python docs/plot_results.py results.csv [--noise 0.1] [--out figure.png]
"""

import argparse

import matplotlib.pyplot as plt
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv")
    parser.add_argument("--noise", type=float, default=None, help="noise level to plot (default: first in file)")
    parser.add_argument("--out", default=None, help="write the figure here instead of showing it")
    args = parser.parse_args()

    df = pd.read_csv(args.csv, comment="#")
    noise = args.noise if args.noise is not None else df["noise_p"].iloc[0]
    df = df[df["noise_p"] == noise]

    fig, (ax_dist, ax_time) = plt.subplots(1, 2, figsize=(10, 4))
    metric = "dist_to_oracle" if df["dist_to_oracle"].notna().any() else "dist_to_input"
    for method, rows in df.groupby("method"):
        by_size = rows.groupby("qubits")
        for ax, column in ((ax_dist, metric), (ax_time, "wall_time_ns")):
            stats = by_size[column].quantile([0.25, 0.5, 0.75]).unstack().dropna()
            if stats.empty:
                continue
            scale = 1e-9 if column == "wall_time_ns" else 1.0
            median = stats[0.5] * scale
            err = [median - stats[0.25] * scale, stats[0.75] * scale - median]
            ax.errorbar(stats.index, median, yerr=err, marker="o", capsize=3, label=method)

    ax_dist.set(yscale="log", xlabel="qubits", ylabel=metric.replace("_", " "), title=f"p = {noise}")
    ax_time.set(yscale="log", xlabel="qubits", ylabel="wall time [s]")
    ax_dist.legend()
    fig.tight_layout()
    if args.out:
        fig.savefig(args.out, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
