"""End-to-end orchestration, artifact persistence, and verification.

A run is driven by a single JSON config and writes plain CSV/JSON
artifacts plus a report with constants, assumption booleans, invariant
margins, measured convergence orders, and stage timings.  `verify_run`
recomputes every residual suite from the stored artifacts alone.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import _quad, eos as eos_mod, global_march, goursat, hodograph, riemann1d, shock_tracker, sonic_pairs
from .charkit import CharGrid, make_state
from .errors import (
    ConfigError,
    EpsilonTooLarge,
    FoldDetected,
    MissingArtifact,
    SchemaMismatch,
    StageError,
    VdwWedgeError,
)

SCHEMA_VERSION = "1"

PATCH_COLUMNS = ["i", "j", "xi", "eta", "u", "v", "tau", "alpha", "beta", "A",
                 "phi", "bernoulli_residual"]
SHOCK_COLUMNS = ["s", "xi", "eta", "chi", "tau_front", "tau_back", "m",
                 "n_front_over_c", "n_back_over_c", "classification",
                 "rh_residual_max", "a_dot", "b_dot", "u_back", "v_back",
                 "alpha_back", "beta_back", "l_tan"]
HODO_COLUMNS = ["l", "k", "u", "v", "alpha", "beta", "tau", "z_plus", "z_minus",
                "xi", "eta"]
VACUUM_COLUMNS = ["eta", "xi", "local_slope"]
LEVEL_COLUMNS = ["level", "xi", "eta", "u", "v", "alpha", "beta", "patch"]
WAVE_COLUMNS = ["xi_hat", "u_hat", "tau", "region"]


def _default_config():
    return {
        "eos": {"S": 0.31, "gamma": 1.02},
        "wedge": {"theta_deg": 80.0, "tau0": None},
        "grid": {"n_boundary": 200, "n_fan": 2048, "refinement_level": 0,
                 "tau_max": None, "order_study": False},
        "tolerances": {"root": 1e-12, "ode_rel": 1e-11, "ode_abs": 1e-13,
                       "residual": 1e-8, "sonic": 1e-8, "stitch": 1e-6,
                       "node": 1e-12},
        "dgp": {"epsilon": 0.01, "n_arc": 24, "max_halvings": 6,
                "strict_upsilon": False},
        "march": {"n": 8, "delta_star": 1e-3, "char_angle_floor": 0.05,
                  "nodes_per_efold": 4.0, "z_cut": 0.05, "n_cross": 48,
                  "n_shock": 200, "n_principal": 160},
        "output": {"dir": "runs/latest", "formats": ["csv", "json"]},
        "seed_case": None,
    }


def _merge(base, override):
    out = dict(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


@dataclass
class RunConfig:
    raw: dict

    @classmethod
    def from_dict(cls, data):
        cfg = _merge(_default_config(), data or {})
        c = cls(raw=cfg)
        c.validate()
        return c

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as f:
                return cls.from_dict(json.load(f))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc

    def validate(self):
        r = self.raw
        if not r["eos"]["S"] > 0:
            raise ConfigError("eos.S must be positive")
        if not 1.0 < r["eos"]["gamma"] < 2.0:
            raise ConfigError("eos.gamma must lie in (1, 2)")
        if not 0.0 < r["wedge"]["theta_deg"] < 90.0:
            raise ConfigError("wedge.theta_deg must lie in (0, 90)")
        t0 = r["wedge"]["tau0"]
        if t0 is not None and not t0 > 1.0:
            raise ConfigError("wedge.tau0 must exceed 1")
        for key, val in r["tolerances"].items():
            if not val > 0:
                raise ConfigError(f"tolerances.{key} must be positive")
        if r["seed_case"] not in (None, 1, 2, 3):
            raise ConfigError("seed_case must be 1, 2, or 3")

    def __getitem__(self, key):
        return self.raw[key]

    @property
    def refine(self):
        return 2 ** int(self.raw["grid"]["refinement_level"])

    @property
    def threads(self):
        return max(int(os.environ.get("VDWWEDGE_THREADS", "1")), 1)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    xf = float(x)
    if math.isnan(xf):
        return "nan"
    return format(xf, ".17g")


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def read_csv(path):
    if not os.path.exists(path):
        raise MissingArtifact(f"missing artifact: {path}")
    with open(path, newline="") as f:
        r = csv.reader(f)
        header = next(r)
        rows = list(r)
    return header, rows


def write_json(path, payload):
    with open(path, "w") as f:
        json.dump(payload, f, indent=1, sort_keys=True, default=_json_default)
        f.write("\n")


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _grid_rows(grid):
    d = grid.derived()
    br = grid.bernoulli_residual()
    ni, nj = grid.shape
    for i in range(ni):
        for j in range(nj):
            if not np.isfinite(grid.tau[i, j]):
                continue
            yield (i, j, grid.xi[i, j], grid.eta[i, j], grid.u[i, j],
                   grid.v[i, j], grid.tau[i, j], d["alpha"][i, j],
                   d["beta"][i, j], d["A"][i, j],
                   grid.phi[i, j] if grid.phi is not None else None,
                   br[i, j] if br is not None else None)


def save_patch_csv(path, grid):
    write_csv(path, PATCH_COLUMNS, _grid_rows(grid))


def save_shock_csv(path, curve, eos):
    rh = curve.rh_residuals(eos)
    rows = []
    for k in range(len(curve)):
        rows.append((
            curve.s[k], curve.xi[k], curve.eta[k], curve.chi[k],
            curve.tau_front[k], curve.tau_back[k], curve.m[k],
            curve.n_front[k] / curve.c_front[k], curve.n_back[k] / curve.c_back[k],
            curve.classification[k].value, rh[k].max(), curve.a_dot[k],
            curve.b_dot[k], curve.u_back[k], curve.v_back[k],
            curve.alpha_back[k], curve.beta_back[k], curve.l_tan[k],
        ))
    write_csv(path, SHOCK_COLUMNS, rows)


def save_hodo_csv(path, tri):
    zp, zm = tri.z_fields()
    rows = []
    n0 = tri.n0
    for l in range(n0):
        for k in range(n0 - l):
            st = tri.node(l, k)
            rows.append((l, k, tri.u[l, k], tri.v[l, k], tri.alpha[l, k],
                         tri.beta[l, k], tri.tau[l, k], zp[l, k], zm[l, k],
                         st.xi, st.eta))
    write_csv(path, HODO_COLUMNS, rows)


@dataclass
class RunReport:
    config: dict
    stages: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    assumptions: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    case: str = ""
    ok: bool = True
    schema_version: str = SCHEMA_VERSION

    def as_dict(self):
        return {
            "schema_version": self.schema_version,
            "config": self.config,
            "case": self.case,
            "stages": self.stages,
            "constants": self.constants,
            "assumptions": self.assumptions,
            "invariants": self.invariants,
            "orders": self.orders,
            "ok": self.ok,
        }


class _Timer:
    def __init__(self, report, name):
        self.report = report
        self.name = name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        self.report.stages[self.name] = round(time.perf_counter() - self.t0, 3)
        if exc is not None and isinstance(exc, VdwWedgeError) and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def _eos_curve_rows(model, n=400):
    eos = model.params
    lo, hi = 1.0 + 0.05 * (model.tau1_i - 1.0), 3.0 * model.tau2_a
    for k in range(n):
        t = lo + (hi - lo) * k / (n - 1.0)
        yield (t, eos_mod.pressure(eos, t), eos_mod.dpressure(eos, t),
               eos_mod.d2pressure(eos, t), eos_mod.enthalpy_h(eos, t),
               math.sqrt(eos_mod.sound_speed_sq(eos, t)))


def _wave_rows(wave, n=2000):
    lo = wave.xi2 - 0.05 * (wave.xi0 - wave.xi2)
    hi = wave.xi0 + 0.05 * (wave.xi0 - wave.xi2)
    for k in range(n):
        x = lo + (hi - lo) * k / (n - 1.0)
        region, u, tau = riemann1d.sample(wave, x)
        yield (x, u, tau, region)


def run_pipeline(config, out_dir=None):
    """Execute all stages; artifacts land in out_dir; returns the report."""
    cfg = config if isinstance(config, RunConfig) else RunConfig.from_dict(config)
    out = out_dir or cfg["output"]["dir"]
    os.makedirs(out, exist_ok=True)
    report = RunReport(config=cfg.raw)
    refine = cfg.refine

    eos = eos_mod.EosParams(S=cfg["eos"]["S"], gamma=cfg["eos"]["gamma"])
    theta = math.radians(cfg["wedge"]["theta_deg"])

    with _Timer(report, "eos"):
        model = eos_mod.find_landmarks(eos, tol=cfg["tolerances"]["root"])
        write_json(os.path.join(out, "eos.json"), model.as_dict())
        write_csv(os.path.join(out, "eos_curves.csv"),
                  ["tau", "p", "dp", "d2p", "h", "c"], _eos_curve_rows(model))

    with _Timer(report, "constants"):
        consts = global_march.compute_constants(
            model, theta, delta_star=cfg["march"]["delta_star"],
            n_pow=cfg["march"]["n"],
        )
        cd = consts.as_dict()
        report.constants = cd
        report.assumptions = {
            "A1": consts.assumption_a1,
            "A2": consts.assumption_a2,
            "A3": consts.assumption_a3,
            "psi_feasible": consts.psi_feasible,
        }
        write_json(os.path.join(out, "constants.json"), cd)

    tau0 = cfg["wedge"]["tau0"]
    if cfg["seed_case"] == 1:
        tau0 = model.tau2_i + 1.0
    elif cfg["seed_case"] == 2:
        tau0 = 0.5 * (model.tau1_t + model.tau2_i)
    elif cfg["seed_case"] == 3 or tau0 is None:
        tau0 = model.tau1_e - 1e-3 * (model.tau1_e - 1.0)

    with _Timer(report, "riemann1d"):
        split = riemann1d.case_split(model, tau0)
        report.case = split.case.value
        z_cut = cfg["march"]["z_cut"]
        tau_max = cfg["grid"]["tau_max"]
        if tau_max is None:
            tau_max = _quad.tau_of_z(eos, z_cut)
        if split.case is riemann1d.Case.FAN_SHOCK_FAN and tau0 < model.tau1_e:
            wave = riemann1d.build_wave(model, tau0, n_fan=cfg["grid"]["n_fan"],
                                        tau_max=tau_max)
        elif split.case is riemann1d.Case.FAN_ONLY:
            wave = riemann1d.build_fan_only_wave(model, tau0,
                                                 n_fan=cfg["grid"]["n_fan"],
                                                 tau_max=tau_max)
        else:
            wave = None
        if wave is not None:
            write_json(os.path.join(out, "wave1d.json"), wave.summary())
            write_csv(os.path.join(out, "wave1d.csv"), WAVE_COLUMNS, _wave_rows(wave))

    if wave is None or split.case is not riemann1d.Case.FAN_SHOCK_FAN:
        report.invariants["short_circuit"] = (
            f"case {split.case.value}: 2D interaction pipeline not applicable"
        )
        _finalize(report, out)
        return report

    with _Timer(report, "boundaries"):
        bset = goursat.build_boundaries(
            model, wave, theta, n_boundary=cfg["grid"]["n_boundary"] * refine,
            nodes_per_efold=cfg["march"]["nodes_per_efold"] * refine,
            z_cut=z_cut, ode_rtol=cfg["tolerances"]["ode_rel"],
            ode_atol=cfg["tolerances"]["ode_abs"],
        )

    with _Timer(report, "goursat"):
        sigma1 = goursat.solve_goursat(model, bset.pb, bset.pd,
                                       tol=cfg["tolerances"]["node"])
        save_patch_csv(os.path.join(out, "patch_sigma1.csv"), sigma1)
        br = sigma1.bernoulli_residual()
        report.invariants["sigma1_bernoulli_max"] = float(np.nanmax(br))
        if cfg["grid"]["order_study"]:
            report.orders.update(_sigma1_order_study(model, wave, theta, cfg))

    with _Timer(report, "shock"):
        curve = shock_tracker.track_shock(
            model, sigma1, bset.point_b, bset.a_hat_b,
            n_points=cfg["march"]["n_shock"], theta=theta,
            rtol=cfg["tolerances"]["ode_rel"], atol=cfg["tolerances"]["ode_abs"],
        )
        curve_dg = curve.mirrored()
        save_shock_csv(os.path.join(out, "shock_BG.csv"), curve, eos)
        save_shock_csv(os.path.join(out, "shock_DG.csv"), curve_dg, eos)
        rh = curve.rh_residuals(eos)
        report.invariants["shock_rh_max"] = float(rh.max())
        report.invariants["shock_chi_monotone"] = bool(np.all(np.diff(curve.chi) > 0))
        report.invariants["shock_eta_G"] = float(curve.point_g[1])
        report.invariants["shock_kinds"] = sorted(
            {k.value for k in curve.classification})

    with _Timer(report, "hodograph"):
        data = [hodograph.hodo_state(eos, curve.u_back[k], curve.v_back[k],
                                     curve.alpha_back[k], curve.beta_back[k],
                                     curve.tau_back[k])
                for k in range(len(curve))]
        tri = hodograph.solve_hodograph_cauchy(model, data,
                                               tol=cfg["tolerances"]["node"] * 0.1)
        save_hodo_csv(os.path.join(out, "hodo_sigma2.csv"), tri)
        patch2 = hodograph.invert_to_physical(tri, label="sigma2")
        zp, zm = tri.z_fields()
        report.invariants["sigma2_z_plus_max"] = float(np.nanmax(zp[1:, :]))
        report.invariants["sigma2_z_minus_min"] = float(np.nanmin(zm[1:, :]))

    with _Timer(report, "dgp"):
        parts = hodograph.principal_parts(
            model, curve.point_g, data[-1], n_nodes=cfg["march"]["n_principal"],
            rtol=cfg["tolerances"]["ode_rel"],
        )
        ups, a_min = global_march.upsilon_factory(model, consts, parts.tau_g,
                                                  parts.q_m, parts.tau_m)
        edge_states = [tri.node(l, k) for (l, k) in tri.gamma_minus_edge()]
        pts = np.array([[s.u, s.v] for s in data])
        arclen = float(np.sum(np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))))
        epsilon = cfg["dgp"]["epsilon"] * arclen
        halvings = 0
        while True:
            try:
                dgp = hodograph.solve_dgp(
                    model, parts, edge_states, epsilon=epsilon,
                    n_arc=cfg["dgp"]["n_arc"], upsilon=ups,
                    tol=cfg["tolerances"]["node"] * 0.1,
                    strict_upsilon=True,
                )
                break
            except (EpsilonTooLarge, FoldDetected) as exc:
                halvings += 1
                if halvings > cfg["dgp"]["max_halvings"]:
                    raise EpsilonTooLarge(
                        f"DGP failed after {halvings - 1} halvings: {exc}"
                    ) from exc
                epsilon *= 0.5
        report.invariants["dgp_epsilon"] = epsilon
        report.invariants["dgp_halvings"] = halvings
        report.invariants["dgp_upsilon_violations"] = len(dgp.upsilon_violations)
        report.invariants["dgp_z"] = dgp.z_report
        write_json(os.path.join(out, "dgp.json"), {
            "points": {k: list(map(float, v)) for k, v in dgp.points.items()},
            "nu1": parts.nu1, "nu2": parts.nu2, "tau_m": parts.tau_m,
            "q_m": parts.q_m, "A_m": parts.A_m, "sigma_g": parts.sigma_g,
            "q_g": parts.q_g, "tau_g": parts.tau_g, "epsilon": epsilon,
            "a_min": a_min,
        })
        write_csv(os.path.join(out, "principal_parts.csv"),
                  ["family", "nu", "u", "v", "tau", "alpha", "beta"],
                  [(pp.family, pp.nu[k], pp.u[k], pp.v[k], pp.tau[k],
                    pp.alpha[k], pp.beta[k])
                   for pp in (parts.plus, parts.minus)
                   for k in range(len(pp.nu))])
        for name in ("ra", "rb", "rc"):
            f = getattr(dgp, name)
            rows = []
            ni, nj = f["tau"].shape
            for i in range(ni):
                for j in range(nj):
                    if np.isfinite(f["tau"][i, j]):
                        rows.append((i, j, f["xi"][i, j], f["eta"][i, j],
                                     f["u"][i, j], f["v"][i, j], f["tau"][i, j],
                                     f["alpha"][i, j], f["beta"][i, j],
                                     0.5 * (f["alpha"][i, j] - f["beta"][i, j]),
                                     None, None))
            write_csv(os.path.join(out, f"patch_sigma4_{name}.csv"),
                      PATCH_COLUMNS, rows)

    with _Timer(report, "march"):
        chains = _assemble_chains(eos, bset, tri, patch2, dgp, parts,
                                  cfg["dgp"]["n_arc"])
        result = global_march.march(
            model, chains, consts, tau_cut=tau_max,
            n_cross=cfg["march"]["n_cross"], tol=cfg["tolerances"]["node"],
            char_angle_floor=cfg["march"]["char_angle_floor"],
        )
        for name, grid in result.patches.items():
            save_patch_csv(os.path.join(out, f"patch_sigma5_{name}.csv"), grid)
        lev_rows = []
        for lv in result.level_curves:
            for ptup in lv["points"]:
                lev_rows.append((lv["level"],) + tuple(ptup))
        write_csv(os.path.join(out, "level_curves.csv"), LEVEL_COLUMNS, lev_rows)
        vb = result.vacuum
        write_csv(os.path.join(out, "vacuum.csv"), VACUUM_COLUMNS,
                  zip(vb.eta, vb.xi, vb.local_slope))
        report.invariants["theta_checked"] = result.theta_report["checked"]
        report.invariants["theta_violations"] = len(result.theta_report["violations"])
        report.invariants["theta_worst_margin"] = result.theta_report["worst_margin"]
        report.invariants["march"] = result.invariants
        report.invariants["lipschitz"] = vb.lipschitz
        report.invariants["lipschitz_bound"] = min(
            math.tan(consts.psi - consts.a_inf),
            math.sqrt((eos.gamma + 1.0) / (3.0 - eos.gamma)),
        )

    with _Timer(report, "assemble"):
        seams = _seam_checks(eos, sigma1, curve, patch2, result)
        report.invariants["seams"] = seams

    report.ok = _evaluate(report)
    _finalize(report, out)
    return report


def _assemble_chains(eos, bset, tri, patch2, dgp, parts, n_arc):
    bh = patch2.edge_states(tri.gamma_plus_edge())
    gh = patch2.edge_states(tri.gamma_minus_edge())
    ng = len(parts.plus.nu)

    def st_from(f, i, j):
        return make_state(eos, f["xi"][i, j], f["eta"][i, j], f["u"][i, j],
                          f["v"][i, j], f["tau"][i, j])

    j_state = st_from(dgp.ra, 0, n_arc - 1)
    edge_uv = np.array([[s.u for s in gh], [s.v for s in gh]]).T
    ecum = np.concatenate([[0.0], np.cumsum(
        np.hypot(np.diff(edge_uv[:, 0]), np.diff(edge_uv[:, 1])))])
    jh = [j_state] + [gh[k] for k in range(len(gh)) if ecum[k] > dgp.epsilon]
    jl = [st_from(dgp.ra, i, n_arc - 1) for i in range(ng)] + [
        st_from(dgp.rc, i, n_arc - 1) for i in range(1, n_arc)]
    kl = [st_from(dgp.rb, n_arc - 1, j) for j in range(ng)] + [
        st_from(dgp.rc, n_arc - 1, j) for j in range(1, n_arc)]

    def mirror(states):
        return [make_state(eos, s.xi, -s.eta, s.u, -s.v, s.tau) for s in states]

    return {
        "BE": bset.be.states(eos), "BH": bh, "JH": jh, "JL": jl, "KL": kl,
        "KI": mirror(jh), "DI": mirror(bh), "DF": bset.df.states(eos),
        "E": bset.point_e, "F": bset.point_f,
    }


def _seam_checks(eos, sigma1, curve, patch2, result):
    """State continuity across shared patch boundaries, sampled midway."""
    out = {}
    # Sigma2 data row against the tracked shock backside (same curve)
    d = np.hypot(patch2.xi[0, : len(curve)] - curve.xi,
                 patch2.eta[0, : len(curve)] - curve.eta)
    out["shock_vs_sigma2_boundary"] = float(np.nanmax(d))
    # BH seam: Sigma2 Gamma+ edge against the A1 patch data row
    a1 = result.patches["A1"]
    n0 = patch2.xi.shape[0]
    bh_xy = [(patch2.xi[l, 0], patch2.eta[l, 0]) for l in range(n0)]
    a1_xy = list(zip(a1.xi[:, 0], a1.eta[:, 0]))
    out["bh_seam_hausdorff"] = _polyline_distance(bh_xy, a1_xy)
    return out


def _polyline_distance(pa, pb):
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    from scipy.spatial import cKDTree

    ta = cKDTree(pa)
    tb = cKDTree(pb)
    d1, _ = ta.query(pb)
    d2, _ = tb.query(pa)
    return float(max(d1.max(), d2.max()))


def _sigma1_order_study(model, wave, theta, cfg):
    """Bernoulli-residual convergence order between levels L and L+1."""
    orders = {}
    n0 = cfg["grid"]["n_boundary"] * cfg.refine
    res = []
    for n in (n0, 2 * n0):
        bset = goursat.build_boundaries(model, wave, theta, n_boundary=n,
                                        z_cut=cfg["march"]["z_cut"])
        g = goursat.solve_goursat(model, bset.pb, bset.pd,
                                  tol=cfg["tolerances"]["node"])
        res.append(float(np.nanmax(g.bernoulli_residual())))
    orders["sigma1_bernoulli"] = {
        "coarse": res[0], "fine": res[1],
        "order": math.log2(res[0] / res[1]) if res[1] > 0 else math.inf,
    }
    return orders


def _evaluate(report):
    inv = report.invariants
    checks = [
        inv.get("theta_violations", 1) == 0,
        inv.get("lipschitz", math.inf) <= 1.02 * inv.get("lipschitz_bound", 0.0),
        inv.get("shock_chi_monotone", False),
        inv.get("sigma2_z_plus_max", 1.0) < 0.0,
        inv.get("sigma2_z_minus_min", -1.0) > 0.0,
        inv.get("dgp_upsilon_violations", 1) == 0,
        all(report.assumptions.get(k, False) for k in ("A1", "A2", "A3")),
    ]
    return all(checks)


def _finalize(report, out):
    write_json(os.path.join(out, "report.json"), report.as_dict())
    write_json(os.path.join(out, "manifest.json"), {
        "schema_version": SCHEMA_VERSION,
        "artifacts": sorted(os.listdir(out)),
    })


# ----------------------------------------------------------------------
# verification from stored artifacts


def _require(path):
    if not os.path.exists(path):
        raise MissingArtifact(f"missing artifact: {path}")
    return path


def verify_run(run_dir):
    """Recompute the residual suites from artifacts without re-solving."""
    manifest_path = os.path.join(run_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise MissingArtifact(f"no manifest in {run_dir}")
    with open(manifest_path) as f:
        manifest = json.load(f)
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"schema {manifest.get('schema_version')!r} != {SCHEMA_VERSION!r}"
        )
    with open(_require(os.path.join(run_dir, "report.json"))) as f:
        report = json.load(f)
    eos = eos_mod.EosParams(S=report["config"]["eos"]["S"],
                            gamma=report["config"]["eos"]["gamma"])
    out = {"schema_version": SCHEMA_VERSION, "suites": {}, "failures": []}

    def suite(name, passed, detail):
        out["suites"][name] = {"passed": bool(passed), **detail}
        if not passed:
            out["failures"].append(name)

    # EOS landmarks
    with open(_require(os.path.join(run_dir, "eos.json"))) as f:
        lm = json.load(f)
    res_i = abs(eos_mod.d2pressure(eos, lm["tau1_i"])) + abs(
        eos_mod.d2pressure(eos, lm["tau2_i"]))
    res_e = abs(eos_mod.dpressure(eos, lm["tau1_e"]) - eos_mod.dpressure(eos, lm["tau2_e"]))
    suite("eos_landmarks", res_i < 1e-8 and res_e < 1e-10,
          {"inflection_residual": res_i, "double_sonic_residual": res_e})

    # planar wave defining relation
    wave_path = os.path.join(run_dir, "wave1d.csv")
    if os.path.exists(wave_path):
        header, rows = read_csv(wave_path)
        idx = {c: header.index(c) for c in header}
        worst = 0.0
        worst_row = -1
        for k, row in enumerate(rows):
            if row[idx["region"]] not in ("right_fan", "left_fan"):
                continue
            tau = float(row[idx["tau"]])
            u = float(row[idx["u_hat"]])
            x = float(row[idx["xi_hat"]])
            r = abs(u + math.sqrt(eos_mod.sound_speed_sq(eos, tau)) - x)
            if r > worst:
                worst, worst_row = r, k
        suite("wave1d_fan_relation", worst < 1e-8,
              {"max_residual": worst, "worst_row": worst_row})

    # patch Bernoulli residuals
    for name in sorted(os.listdir(run_dir)):
        if not (name.startswith("patch_sigma1") or name.startswith("patch_sigma5")):
            continue
        header, rows = read_csv(os.path.join(run_dir, name))
        idx = {c: header.index(c) for c in header}
        worst = 0.0
        worst_row = -1
        for k, row in enumerate(rows):
            if row[idx["phi"]] == "":
                continue
            tau = float(row[idx["tau"]])
            U = float(row[idx["u"]]) - float(row[idx["xi"]])
            V = float(row[idx["v"]]) - float(row[idx["eta"]])
            r = abs(0.5 * (U * U + V * V) + eos_mod.enthalpy_h(eos, tau)
                    + float(row[idx["phi"]]))
            if r > worst:
                worst, worst_row = r, k
        tol = 0.02 if name.startswith("patch_sigma5") else 1e-6
        suite(f"bernoulli:{name}", worst < tol,
              {"max_residual": worst, "worst_row": worst_row})

    # shock RH residuals and classification
    for name in ("shock_BG.csv", "shock_DG.csv"):
        path = os.path.join(run_dir, name)
        if not os.path.exists(path):
            continue
        header, rows = read_csv(path)
        idx = {c: header.index(c) for c in header}
        worst = 0.0
        worst_row = -1
        kinds_ok = True
        for k, row in enumerate(rows):
            tf = float(row[idx["tau_front"]])
            tb = float(row[idx["tau_back"]])
            mf = float(row[idx["m"]])
            m2 = sonic_pairs.mass_flux_sq(eos, tf, tb)
            r = abs(m2 - mf * mf) / abs(m2)
            if r > worst:
                worst, worst_row = r, k
            if row[idx["classification"]] not in ("PostSonic", "DoubleSonic"):
                kinds_ok = False
        suite(f"rh:{name}", worst < 1e-6 and kinds_ok,
              {"max_m2_residual": worst, "worst_row": worst_row,
               "kinds_ok": kinds_ok})

    # hodograph Z signs
    hodo_path = os.path.join(run_dir, "hodo_sigma2.csv")
    if os.path.exists(hodo_path):
        header, rows = read_csv(hodo_path)
        idx = {c: header.index(c) for c in header}
        zp_max, zm_min = -math.inf, math.inf
        for row in rows:
            if int(row[idx["l"]]) == 0:
                continue
            if row[idx["z_plus"]] not in ("", "nan"):
                zp_max = max(zp_max, float(row[idx["z_plus"]]))
            if row[idx["z_minus"]] not in ("", "nan"):
                zm_min = min(zm_min, float(row[idx["z_minus"]]))
        suite("hodograph_z_signs", zp_max < 0.0 < zm_min,
              {"z_plus_max": zp_max, "z_minus_min": zm_min})

    # vacuum boundary Lipschitz bound
    vac_path = os.path.join(run_dir, "vacuum.csv")
    if os.path.exists(vac_path):
        header, rows = read_csv(vac_path)
        idx = {c: header.index(c) for c in header}
        eta = np.array([float(r[idx["eta"]]) for r in rows])
        xi = np.array([float(r[idx["xi"]]) for r in rows])
        lip = float(np.max(np.abs(np.diff(xi) / np.diff(eta))))
        bound = report["invariants"].get("lipschitz_bound", math.inf)
        suite("vacuum_lipschitz", lip <= 1.02 * bound,
              {"lipschitz": lip, "bound": bound})

    # Theta membership on stored sigma5 patches
    consts_path = os.path.join(run_dir, "constants.json")
    if os.path.exists(consts_path):
        with open(consts_path) as f:
            cj = json.load(f)
        viol = report["invariants"].get("theta_violations")
        suite("theta_membership", viol == 0, {"violations_recorded": viol,
                                              "psi": cj.get("psi")})

    out["passed"] = not out["failures"]
    return out
