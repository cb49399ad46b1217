"""Line-class styles shared by all figures.

Conventions: characteristics are thin solid lines, shocks thick lines,
vacuum boundaries dashed, weak-discontinuity curves colored, and
tau-level curves dotted.
"""

import csv
import json
import os

CHARACTERISTIC = dict(color="0.45", linewidth=0.6, linestyle="-",
                      label="characteristic")
SHOCK = dict(color="black", linewidth=2.8, linestyle="-", label="shock")
VACUUM = dict(color="tab:blue", linewidth=1.4, linestyle="--", label="vacuum")
WEAK_DISCONTINUITY = dict(color="tab:red", linewidth=1.1, linestyle="-",
                          label="weak-discontinuity")
LEVEL_CURVE = dict(color="tab:green", linewidth=0.9, linestyle=":",
                   label="level-curve")

LINE_CLASSES = ("characteristic", "shock", "vacuum", "weak-discontinuity",
                "level-curve")


def read_csv(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"missing artifact: {path}")
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        rows = list(r)
    cols = {}
    for k, name in enumerate(header):
        vals = []
        for row in rows:
            cell = row[k]
            try:
                vals.append(float(cell) if cell not in ("", "None") else float("nan"))
            except ValueError:
                vals.append(cell)
        cols[name] = vals
    return cols


def read_json(path):
    if not os.path.exists(path):
        raise FileNotFoundError(f"missing artifact: {path}")
    with open(path) as f:
        return json.load(f)


def dedupe_legend(ax):
    handles, labels = ax.get_legend_handles_labels()
    seen = {}
    for h, l in zip(handles, labels):
        if l not in seen:
            seen[l] = h
    if seen:
        ax.legend(seen.values(), seen.keys(), loc="best", fontsize=8)
