"""Isentrope and -p' curves with landmark volumes marked."""

import argparse
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from figures.style import read_csv, read_json

LANDMARK_STYLE = {
    "tau1_i": ("v", "inflection"), "tau2_i": ("v", None),
    "tau1_t": ("s", "double tangent"), "tau2_t": ("s", None),
    "tau1_e": ("o", "double sonic"), "tau2_e": ("o", None),
    "tau1_a": ("d", "auxiliary"), "tau2_a": ("d", None),
}


def render(run_dir):
    curves = read_csv(os.path.join(run_dir, "eos_curves.csv"))
    lm = read_json(os.path.join(run_dir, "eos.json"))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    tau = curves["tau"]
    ax1.plot(tau, curves["p"], color="black", linewidth=1.2)
    ax2.plot(tau, [-v for v in curves["dp"]], color="black", linewidth=1.2)
    p_of = dict(zip(tau, curves["p"]))
    for key, (marker, label) in LANDMARK_STYLE.items():
        t = lm[key]
        # nearest tabulated pressure to avoid recomputation
        nearest = min(tau, key=lambda x: abs(x - t))
        ax1.plot([t], [p_of[nearest]], marker=marker, color="tab:red",
                 markersize=5, linestyle="none", label=label)
        ax2.axvline(t, color="0.8", linewidth=0.6)
    ax1.set_xlabel(r"$\tau$")
    ax1.set_ylabel(r"$p$")
    ax1.set_title("isentrope")
    ax2.set_xlabel(r"$\tau$")
    ax2.set_ylabel(r"$-p'$")
    ax2.set_yscale("log")
    ax2.set_title("wave-speed function")
    handles, labels = ax1.get_legend_handles_labels()
    keep = [(h, l) for h, l in zip(handles, labels) if l]
    if keep:
        ax1.legend(*zip(*keep), fontsize=8)
    fig.tight_layout()
    return fig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--run-dir", required=True)
    ap.add_argument("--out-dir", required=True)
    args = ap.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    fig = render(args.run_dir)
    out = os.path.join(args.out_dir, "eos.png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
