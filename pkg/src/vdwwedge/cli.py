"""Command-line interface.

Exit codes: 0 when everything solved and all invariants pass, 2 when the
pipeline solved but some invariant failed, 1 on hard errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import eos as eos_mod, global_march, pipeline, riemann1d, sonic_pairs
from .errors import VdwWedgeError


def _load_config(args):
    if args.config:
        cfg = pipeline.RunConfig.from_file(args.config)
    else:
        cfg = pipeline.RunConfig.from_dict({})
    if getattr(args, "out", None):
        cfg.raw["output"]["dir"] = args.out
    if getattr(args, "refine", None):
        cfg.raw["grid"]["refinement_level"] = args.refine
    if getattr(args, "seed_case", None):
        cfg.raw["seed_case"] = args.seed_case
    return cfg


def _model_from(cfg):
    eos = eos_mod.EosParams(S=cfg["eos"]["S"], gamma=cfg["eos"]["gamma"])
    return eos_mod.find_landmarks(eos, tol=cfg["tolerances"]["root"])


def cmd_eos_report(args):
    cfg = _load_config(args)
    model = _model_from(cfg)
    payload = model.as_dict()
    s0, s1, s2 = eos_mod.threshold_s(cfg["eos"]["gamma"])
    payload["thresholds"] = {"s0": s0, "s1": s1, "s2": s2}
    print(json.dumps(payload, indent=1, sort_keys=True))
    return 0


def cmd_pairs(args):
    cfg = _load_config(args)
    model = _model_from(cfg)
    n = args.n
    rows = []
    eps1 = 1e-9 * (model.tau2_i - model.tau1_e)
    for k in range(n):
        tau = model.tau1_e + (model.tau2_i - model.tau1_e) * (k + 0.5) / n
        spo = sonic_pairs.s_po(model, tau)
        try:
            spr = sonic_pairs.s_pr(model, tau) if tau < model.tau1_i else None
        except VdwWedgeError:
            spr = None
        m2 = sonic_pairs.mass_flux_sq(model.params, tau, spo)
        kind = sonic_pairs.classify(model, tau, spo, tol_sonic=1e-6).kind.value
        rows.append((tau, spo, spr, m2, kind))
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "pairs.csv")
    pipeline.write_csv(path, ["tau", "s_po", "s_pr", "m2", "kind"], rows)
    print(f"double-sonic pair: ({model.tau1_e:.17g}, {model.tau2_e:.17g})")
    print(f"wrote {path}")
    return 0


def cmd_riemann1d(args):
    cfg = _load_config(args)
    model = _model_from(cfg)
    tau0 = cfg["wedge"]["tau0"]
    if tau0 is None:
        tau0 = model.tau1_e - 1e-3 * (model.tau1_e - 1.0)
    split = riemann1d.case_split(model, tau0)
    if split.case is riemann1d.Case.FAN_SHOCK_FAN and tau0 < model.tau1_e:
        wave = riemann1d.build_wave(model, tau0, n_fan=cfg["grid"]["n_fan"])
    elif split.case is riemann1d.Case.FAN_ONLY:
        wave = riemann1d.build_fan_only_wave(model, tau0, n_fan=cfg["grid"]["n_fan"])
    else:
        print(json.dumps({"case": split.case.value, "tau0": tau0}))
        return 0
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    pipeline.write_csv(os.path.join(out, "wave1d.csv"), pipeline.WAVE_COLUMNS,
                       pipeline._wave_rows(wave))
    summary = wave.summary()
    pipeline.write_json(os.path.join(out, "wave1d.json"), summary)
    print(json.dumps(summary, indent=1, sort_keys=True, default=float))
    return 0


def cmd_wedge(args):
    cfg = _load_config(args)
    report = pipeline.run_pipeline(cfg)
    out_dir = cfg["output"]["dir"]
    print(f"artifacts in {out_dir}")
    print(json.dumps({"case": report.case, "ok": report.ok,
                      "stages": report.stages}, indent=1))
    return 0 if report.ok else 2


def cmd_verify(args):
    run_dir = args.run_dir or (args.out or ".")
    result = pipeline.verify_run(run_dir)
    print(json.dumps(result, indent=1, sort_keys=True, default=float))
    return 0 if result["passed"] else 2


def cmd_export(args):
    run_dir = args.run_dir or "."
    name = args.artifact
    path = os.path.join(run_dir, name)
    if not os.path.exists(path):
        print(f"no such artifact: {path}", file=sys.stderr)
        return 1
    if args.format == "json" and name.endswith(".csv"):
        header, rows = pipeline.read_csv(path)
        payload = [dict(zip(header, row)) for row in rows]
        json.dump(payload, sys.stdout, indent=1)
        print()
    else:
        with open(path) as f:
            sys.stdout.write(f.read())
    return 0


def build_parser():
    p = argparse.ArgumentParser(
        prog="vdwwedge",
        description="Wedge-into-vacuum expansion of a van der Waals gas",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_out=True):
        sp.add_argument("--config", help="JSON run configuration")
        if with_out:
            sp.add_argument("--out", help="output directory")
        sp.add_argument("--refine", type=int, default=None,
                        help="refinement level (doubles resolutions)")
        sp.add_argument("--seed-case", type=int, choices=(1, 2, 3), default=None,
                        dest="seed_case", help="force the planar case split")

    sp = sub.add_parser("eos-report", help="print landmark volumes as JSON")
    common(sp)
    sp.set_defaults(func=cmd_eos_report)

    sp = sub.add_parser("pairs", help="tabulate the sonic pairings")
    common(sp)
    sp.add_argument("--n", type=int, default=50, help="grid points per table")
    sp.set_defaults(func=cmd_pairs)

    sp = sub.add_parser("riemann1d", help="planar profile CSV + JSON summary")
    common(sp)
    sp.set_defaults(func=cmd_riemann1d)

    sp = sub.add_parser("wedge", help="run the full interaction pipeline")
    common(sp)
    sp.set_defaults(func=cmd_wedge)

    sp = sub.add_parser("verify", help="re-check invariants on stored artifacts")
    common(sp)
    sp.add_argument("--run-dir", help="artifact directory (defaults to --out)")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("export", help="re-emit one artifact (csv or json)")
    sp.add_argument("--run-dir", help="artifact directory")
    sp.add_argument("--artifact", required=True, help="artifact filename")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VdwWedgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
