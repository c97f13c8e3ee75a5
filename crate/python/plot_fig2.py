# Copyright 2026 The memorymodes Authors
# SPDX-License-Identifier: Apache-2.0
"""Plot the decay rate and the compensated pseudomode rate from a fig2 run.

    memorymodes fig2 --config presets/fig2.conf --out out/fig2
    python python/plot_fig2.py out/fig2 fig2.png
"""

import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("run_dir", type=pathlib.Path)
    ap.add_argument("output", type=pathlib.Path, nargs="?", default=pathlib.Path("fig2.png"))
    args = ap.parse_args()

    rates = pd.read_csv(args.run_dir / "rates.csv")
    rates = rates[rates["valid"] == 1]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(rates["t"], rates["gamma"], label=r"$\gamma(t)$")
    ax.plot(rates["t"], rates["compensated"], "--", label=r"$\frac{d}{dt}|b_1|^2 + \Gamma |b_1|^2$")
    ax.axhline(0.0, color="grey", lw=0.5)
    ax.set_xlabel(r"$t\ [1/\gamma_0]$")
    ax.set_ylabel(r"rate $[\gamma_0]$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
