"""Interaction-region figure: characteristics, shocks, weak discontinuities,
tau-level curves, and the vacuum boundary."""

import argparse
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from figures.style import (
    CHARACTERISTIC,
    LEVEL_CURVE,
    SHOCK,
    VACUUM,
    WEAK_DISCONTINUITY,
    dedupe_legend,
    read_csv,
    read_json,
)


def _grid_lines(cols):
    """Group a patch CSV back into grid lines keyed by each index."""
    by_i = {}
    by_j = {}
    for i, j, x, y in zip(cols["i"], cols["j"], cols["xi"], cols["eta"]):
        by_i.setdefault(int(i), []).append((int(j), x, y))
        by_j.setdefault(int(j), []).append((int(i), x, y))
    for d in (by_i, by_j):
        for key in d:
            d[key].sort()
    return by_i, by_j


def _plot_lines(ax, lines, stride, style):
    keys = sorted(lines)
    for key in keys[::stride]:
        pts = lines[key]
        ax.plot([p[1] for p in pts], [p[2] for p in pts], **style)


def render(run_dir, *, zoom=None):
    fig, ax = plt.subplots(figsize=(8, 7))

    patch_files = sorted(
        name for name in os.listdir(run_dir)
        if name.startswith("patch_sigma") and name.endswith(".csv")
    )
    for name in patch_files:
        cols = read_csv(os.path.join(run_dir, name))
        by_i, by_j = _grid_lines(cols)
        stride = max(len(by_i) // 12, 1)
        _plot_lines(ax, by_i, stride, CHARACTERISTIC)
        stride = max(len(by_j) // 12, 1)
        _plot_lines(ax, by_j, stride, CHARACTERISTIC)
        # boundary grid lines are the possible weak-discontinuity seams
        if name.startswith("patch_sigma5"):
            for d, key in ((by_i, min(by_i)), (by_j, min(by_j))):
                pts = d[key]
                ax.plot([p[1] for p in pts], [p[2] for p in pts],
                        **WEAK_DISCONTINUITY)

    for name in ("shock_BG.csv", "shock_DG.csv"):
        cols = read_csv(os.path.join(run_dir, name))
        ax.plot(cols["xi"], cols["eta"], **SHOCK)

    levels = read_csv(os.path.join(run_dir, "level_curves.csv"))
    by_level = {}
    for lev, x, y in zip(levels["level"], levels["xi"], levels["eta"]):
        by_level.setdefault(lev, []).append((x, y))
    for lev, pts in by_level.items():
        ax.plot([p[0] for p in pts], [p[1] for p in pts], **LEVEL_CURVE)

    vac = read_csv(os.path.join(run_dir, "vacuum.csv"))
    ax.plot(vac["xi"], vac["eta"], **VACUUM)

    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$\eta$")
    ax.set_aspect("equal")
    ax.set_title("composite-wave interaction region")
    if zoom is not None:
        ax.set_xlim(zoom[0], zoom[1])
        ax.set_ylim(zoom[2], zoom[3])
    dedupe_legend(ax)
    fig.tight_layout()
    return fig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--run-dir", required=True)
    ap.add_argument("--out-dir", required=True)
    args = ap.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    fig = render(args.run_dir)
    out = os.path.join(args.out_dir, "interaction.png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    # zoomed companion around the shock pair
    shock = read_csv(os.path.join(args.run_dir, "shock_BG.csv"))
    x0 = sum(shock["xi"]) / len(shock["xi"])
    span = 40.0 * (max(shock["xi"]) - min(shock["xi"]) + 1e-9)
    fig2 = render(args.run_dir, zoom=(x0 - span, x0 + span, -span, span))
    out2 = os.path.join(args.out_dir, "interaction_zoom.png")
    fig2.savefig(out2, dpi=150)
    plt.close(fig2)
    print(out)
    print(out2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
