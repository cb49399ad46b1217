"""Three-panel overview of the wave patterns a wedge face can emit.

The third panel (fan-shock-fan) uses the actual planar-wave geometry of
the run; the first two are structural sketches at the same scale, since a
single run carries artifacts for one case only.
"""

import argparse
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from figures.style import CHARACTERISTIC, SHOCK, VACUUM, read_json


def _face_band(ax, theta_deg, xi_marks, span):
    """Planar wave lines xi sin(t) -+ eta cos(t) = xi_hat for both wedge
    faces, plus the wedge edges themselves."""
    th = math.radians(theta_deg)
    for sign in (1.0, -1.0):
        n = (math.sin(th), -sign * math.cos(th))
        d = (-n[1], n[0])
        for xh, style in xi_marks:
            xs = [xh * n[0] - span * d[0], xh * n[0] + span * d[0]]
            ys = [xh * n[1] - span * d[1], xh * n[1] + span * d[1]]
            ax.plot(xs, ys, **style)
    ax.plot([0, span * 1.2 * math.cos(th)], [0, span * 1.2 * math.sin(th)],
            color="black", linewidth=1.6)
    ax.plot([0, span * 1.2 * math.cos(th)], [0, -span * 1.2 * math.sin(th)],
            color="black", linewidth=1.6)
    ax.set_aspect("equal")
    ax.set_xticks([])
    ax.set_yticks([])


def render(run_dir):
    summ = read_json(os.path.join(run_dir, "wave1d.json"))
    report = read_json(os.path.join(run_dir, "report.json"))
    theta_deg = report["config"]["wedge"]["theta_deg"]
    xi0, xi2 = summ["xi0"], summ["xi2"]
    xi1 = summ.get("xi1")
    span = 2.5 * xi0
    fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.6))
    sketch_head, sketch_tail = xi0, -1.6 * xi0
    # (1) fan only
    _face_band(axes[0], theta_deg,
               [(sketch_head, CHARACTERISTIC),
                (0.2 * sketch_head, CHARACTERISTIC),
                (sketch_tail, VACUUM)], span)
    axes[0].set_title("(1) fan")
    # (2) shock-fan
    _face_band(axes[1], theta_deg,
               [(sketch_head, SHOCK), (0.1 * sketch_head, CHARACTERISTIC),
                (sketch_tail, VACUUM)], span)
    axes[1].set_title("(2) shock-fan")
    # (3) fan-shock-fan with the run's true abscissae (clipped for display)
    marks = [(xi0, CHARACTERISTIC)]
    if xi1 is not None:
        marks.append((xi1, SHOCK))
    marks.append((max(xi2, sketch_tail), VACUUM))
    _face_band(axes[2], theta_deg, marks, span)
    axes[2].set_title("(3) fan-shock-fan (this run)")
    fig.tight_layout()
    return fig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--run-dir", required=True)
    ap.add_argument("--out-dir", required=True)
    args = ap.parse_args(argv)
    os.makedirs(args.out_dir, exist_ok=True)
    fig = render(args.run_dir)
    out = os.path.join(args.out_dir, "cases.png")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
