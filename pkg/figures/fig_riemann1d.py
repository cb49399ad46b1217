"""Planar composite-wave profile: tau and u_hat against xi_hat."""

import argparse
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from figures.style import SHOCK, VACUUM, read_csv, read_json


def render(run_dir):
    prof = read_csv(os.path.join(run_dir, "wave1d.csv"))
    summ = read_json(os.path.join(run_dir, "wave1d.json"))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    xh = prof["xi_hat"]
    tau = [t if isinstance(t, float) else math.nan for t in prof["tau"]]
    uh = [u if isinstance(u, float) else math.nan for u in prof["u_hat"]]
    ax1.plot(xh, tau, color="black", linewidth=1.0)
    ax2.plot(xh, uh, color="black", linewidth=1.0)
    for ax in (ax1, ax2):
        if summ.get("xi1") is not None:
            ax.axvline(summ["xi1"], **SHOCK)
        ax.axvline(summ["xi2"], **VACUUM)
        ax.axvline(summ["xi0"], color="0.7", linewidth=0.8)
    ax1.set_ylabel(r"$\tau$")
    ax1.set_yscale("log")
    ax2.set_ylabel(r"$\hat u$")
    ax2.set_xlabel(r"$\hat\xi$")
    ax1.set_title(f"planar profile ({summ['case']})")
    fig.tight_layout()
    return fig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--run-dir", required=True)
    ap.add_argument("--out-dir", required=True)
    args = ap.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    fig = render(args.run_dir)
    out = os.path.join(args.out_dir, "riemann1d.png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
