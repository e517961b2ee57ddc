"""Experiment orchestration: single runs, eps families, sweeps, convergence.

Every experiment leaves a self-describing artifact directory behind: the
diagnostics series as CSV, verdicts as JSON, and a manifest echoing the full
configuration (plus code version, grid hash, and kernel backend) so the run
can be reproduced byte-for-byte.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__, _kernels, diagnostics, initial, semigroup, stepper
from .config import ExperimentConfig
from .diagnostics import Verdict, admissible_lambda
from .errors import ArksError, ConfigError, InvalidSeriesError
from .grid import Field, Grid, integrate, lp_norm, write_field
from .model import Scenario, classify_scenario, derive

__all__ = [
    "run_experiment",
    "run_single",
    "run_eps_family",
    "run_sweep",
    "convergence_study",
    "verify_run",
]

S1_ENERGY_WINDOW = (1e-3, 1e-1)
DECAY_WINDOW = (1e-4, 1e-1)
TAXIS_THETA_MIN = 0.1
WEAK_UNIFORMITY_FACTOR = 2.0
#: deviations below this fraction of the mass scale count as converged noise
WEAK_NOISE_FLOOR = 1e-4
#: cross-eps uniformity is only meaningful above this fraction of the mass:
#: below it the pairings measure cancellation residues of the O(h) atom snap
WEAK_UNIFORMITY_FLOOR = 1e-3


# ---------------------------------------------------------------------------
# preparation


def _prepared(cfg: ExperimentConfig, eps: float, grid: Grid | None = None):
    """Build grid, mollified data, scenario objects, and step control."""
    grid = grid or cfg.grid
    plan = semigroup.make_plan(grid)
    raw, m = initial.build_raw_measure(cfg.measure, grid)
    u0 = semigroup.apply(plan, raw, eps)
    scen_cfg = cfg.scenario(m)
    has_density = cfg.measure.density is not None and not cfg.measure.atoms
    tag = classify_scenario(cfg.model, scen_cfg, has_density)
    ctrl = cfg.step_control(default_blowup_threshold=1e6)
    # config thresholds are multiples of the homogeneous density m/|Ω|
    thr = ctrl.blowup_threshold * m / grid.volume
    ctrl = replace(ctrl, blowup_threshold=thr)

    if cfg.model.tau == 1:
        v_raw = initial.density_field(grid, cfg.chemicals[0])
        w_raw = initial.density_field(grid, cfg.chemicals[1])
        cd = initial.ChemicalInitialData(v_raw, w_raw)
        v0, w0 = initial.mollify_chemicals(cd, eps, cfg.model, grid, plan)
        state = stepper.initial_state(u0, cfg.model, ctrl, v0, w0)
        chem_norms = {
            "v0_w1r": diagnostics._w1r_norm(v_raw, scen_cfg.r),
            "w0_w1r": diagnostics._w1r_norm(w_raw, scen_cfg.r),
        }
        mollified_chem = (v0, w0)
    else:
        state = stepper.initial_state(u0, cfg.model, ctrl)
        chem_norms = {}
        mollified_chem = None

    return {
        "grid": grid,
        "plan": plan,
        "u0": u0,
        "m": m,
        "scen_cfg": scen_cfg,
        "scenario": tag,
        "ctrl": ctrl,
        "state": state,
        "chem_norms": chem_norms,
        "mollified_chem": mollified_chem,
    }


def _sample_times(cfg: ExperimentConfig, t_end: float):
    if cfg.sample_times is not None:
        return [t for t in cfg.sample_times if t <= t_end]
    return stepper.geometric_ladder(t_end, cfg.ladder_rungs)


def _make_recorder(prep, cfg, snapshot_times=(), snapshots=None):
    grid = prep["grid"]
    params = cfg.model
    scen_cfg = prep["scen_cfg"]
    catalog = diagnostics.probe_functions(grid)
    weak_rows, chem_rows = [], []
    snapshot_times = sorted(snapshot_times)

    def recorder(st):
        rec = diagnostics.record(st, params, scen_cfg)
        pair = {
            name: integrate(Field(grid, st.u.values * fld.values))
            for name, (fn, fld) in catalog.items()
        }
        weak_rows.append((st.t, pair))
        if params.tau == 1:
            v0, w0 = prep["mollified_chem"]
            dv = Field(grid, st.v.values - v0.values)
            dw = Field(grid, st.w.values - w0.values)
            chem_rows.append(
                (
                    st.t,
                    diagnostics._w1r_norm(dv, scen_cfg.r),
                    diagnostics._w1r_norm(dw, scen_cfg.r),
                )
            )
        if snapshots is not None:
            for ts in snapshot_times:
                if abs(st.t - ts) <= 1e-12 * max(ts, 1.0):
                    snapshots[ts] = st.u.copy()
        return rec

    weak_targets = {
        "mollified": {
            name: integrate(Field(grid, prep["u0"].values * fld.values))
            for name, (fn, fld) in catalog.items()
        },
        "measure": {
            name: diagnostics.measure_pairing(cfg.measure, grid, fn, fld)
            for name, (fn, fld) in catalog.items()
        },
    }
    return recorder, weak_rows, chem_rows, weak_targets


# ---------------------------------------------------------------------------
# verdict battery


def _records_series(records, getter):
    return [(r.t, getter(r)) for r in records]


def compute_verdicts(
    records,
    weak_rows,
    chem_rows,
    *,
    params,
    scen_cfg,
    scenario_tag,
    m,
    weak_targets,
    chem_norms,
    initial_lq,
    t_end,
):
    """The full per-run verdict list for the run's scenario."""
    verdicts = []
    zeta = derive(params).zeta
    lam = admissible_lambda(scen_cfg.r)

    def guarded(fn, *args, **kwargs):
        try:
            verdicts.append(fn(*args, **kwargs))
        except InvalidSeriesError as exc:
            verdicts.append(
                Verdict(
                    functional=args[0],
                    window=(0.0, 0.0),
                    fitted_exponent=None,
                    bound=None,
                    passed=False,
                    mode="insufficient-data",
                    details={"error": str(exc)},
                )
            )

    # mass identities hold on every run
    mass_dev = max(abs(r.mass_u / m - 1.0) for r in records)
    verdicts.append(
        Verdict(
            "mass-u-conservation",
            (records[0].t, records[-1].t),
            None,
            1e-11,
            mass_dev <= 1e-11,
            "identity",
            {"max_rel_dev": mass_dev},
        )
    )
    if params.tau == 0:
        tv = params.alpha / params.beta * m
        dev = max(abs(r.mass_v / tv - 1.0) for r in records)
        verdicts.append(
            Verdict("mass-v-identity", (records[0].t, records[-1].t), None, 1e-10,
                    dev <= 1e-10, "identity", {"max_rel_dev": dev})
        )
    else:
        cap_v = max(params.alpha * m / params.beta, records[0].mass_v)
        dev = max(r.mass_v for r in records) / cap_v - 1.0
        verdicts.append(
            Verdict("mass-v-bound", (records[0].t, records[-1].t), None, 1e-10,
                    dev <= 1e-10, "bound", {"excess": dev})
        )

    window = (
        max(DECAY_WINDOW[0], records[0].t),
        min(DECAY_WINDOW[1], t_end),
    )

    if scenario_tag is Scenario.S1:
        energy_window = (max(S1_ENERGY_WINDOW[0], records[0].t), window[1])
        energy = _records_series(records, lambda r: r.energy_F)
        if zeta > 0 and all(v > 0 for _, v in energy):
            guarded(
                diagnostics.decay_envelope_verdict,
                "energy-dampened",
                energy,
                lam,
                energy_window,
            )
        else:
            verdicts.append(
                Verdict("energy-dampened", energy_window, None, lam, True,
                        "vacuous", {"reason": "zeta == 0 or nonpositive energy"})
            )
        guarded(
            diagnostics.cumulative_convergence_verdict,
            "fisher-dampened-integral",
            _records_series(records, lambda r: r.fisher_u),
            lam,
            vacuous=(zeta == 0.0),
        )
        guarded(
            diagnostics.cumulative_convergence_verdict,
            "lap-z-dampened-integral",
            _records_series(records, lambda r: r.lap_z_sq),
            lam,
        )
        guarded(
            diagnostics.cumulative_convergence_verdict,
            "grad-z4-dampened-integral",
            _records_series(records, lambda r: r.grad_z_l4),
            2.0 * lam,
        )

    if scenario_tag in (Scenario.S2, Scenario.S3):
        n = scen_cfg.n
        for p in sorted(records[0].lp_u):
            if p <= 1.0:
                continue
            series = [(r.t, r.lp_u[p] ** p) for r in records]
            guarded(
                diagnostics.decay_envelope_verdict,
                f"lp-decay-p{p:g}",
                series,
                n * (p - 1.0) / 2.0,
                window,
            )
        if scenario_tag is Scenario.S3 and initial_lq is not None:
            q = scen_cfg.u_exponent
            worst = max(r.lp_u[q] for r in records) / initial_lq
            verdicts.append(
                Verdict("lq-hat-bounded", (records[0].t, records[-1].t), None, 2.0,
                        worst <= 2.0, "bound", {"max_over_initial": worst})
            )

    guarded(
        diagnostics.taxis_growth_verdict,
        "taxis-cumulative",
        _records_series(records, lambda r: r.taxis_l1),
        TAXIS_THETA_MIN,
        window,
    )

    if params.tau == 1:
        # uniform-in-time boundedness; the constant scales with the data norm
        for name, getter, norm0 in (
            ("w1r-v-bounded", lambda r: r.w1r_v, chem_norms.get("v0_w1r", 0.0)),
            ("w1r-w-bounded", lambda r: r.w1r_w, chem_norms.get("w0_w1r", 0.0)),
        ):
            vals = [getter(r) for r in records]
            cap = 2.0 * max(norm0, vals[-1])
            ratio = max(vals) / cap
            verdicts.append(
                Verdict(name, (records[0].t, records[-1].t), None, cap,
                        ratio <= 1.0, "bound",
                        {"max_over_samples": max(vals), "cap": cap})
            )
        if chem_rows:
            v0n = chem_norms["v0_w1r"]
            early = [dv for t, dv, dw in chem_rows if t <= 1e-3]
            if early:
                frac = min(early) / v0n
                verdicts.append(
                    Verdict("chem-continuity-v", (chem_rows[0][0], 1e-3), None, 0.1,
                            frac <= 0.1, "threshold", {"min_rel_dist": frac})
                )

    # weak continuity against the run's own smoothed datum
    for name in weak_rows[0][1]:
        series = [(t, pair[name]) for t, pair in weak_rows]
        target = weak_targets["mollified"][name]
        scale = max(m, abs(target))
        guarded(
            diagnostics.weak_continuity_verdict,
            f"weak-continuity-{name}",
            series,
            target,
            0.05 * scale,
            floor=WEAK_NOISE_FLOOR * scale,
            t_monotone=min(1e-2, 0.25 * t_end),
        )
    return verdicts


# ---------------------------------------------------------------------------
# single run


def _write_weak_csv(weak_rows, path):
    names = sorted(weak_rows[0][1])
    with open(path, "w") as fh:
        fh.write(",".join(["t"] + [f"pair_{n}" for n in names]) + "\n")
        for t, pair in weak_rows:
            fh.write(",".join(repr(float(x)) for x in [t] + [pair[n] for n in names]) + "\n")


def _write_chem_csv(chem_rows, path):
    with open(path, "w") as fh:
        fh.write("t,w1r_dist_v,w1r_dist_w\n")
        for row in chem_rows:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def _json_dump(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_single(
    cfg: ExperimentConfig,
    out_dir,
    eps: float | None = None,
    grid: Grid | None = None,
    with_verdicts: bool = True,
    snapshot_times=(),
):
    """Execute one run and write series.csv, verdicts.json, manifest.json."""
    os.makedirs(out_dir, exist_ok=True)
    eps = cfg.eps if eps is None else eps
    prep = _prepared(cfg, eps, grid)
    samples = _sample_times(cfg, cfg.t_end)
    if snapshot_times:
        # snapshots are captured by the recorder, so they must be sample times
        samples = sorted(set(samples) | {float(t) for t in snapshot_times})
    snapshots = {} if snapshot_times else None
    recorder, weak_rows, chem_rows, weak_targets = _make_recorder(
        prep, cfg, snapshot_times, snapshots
    )

    outcome = stepper.run(
        prep["state"],
        cfg.model,
        prep["ctrl"],
        cfg.t_end,
        samples,
        scenario_cfg=prep["scen_cfg"],
        recorder=recorder,
    )

    diagnostics.write_series_csv(outcome.series, os.path.join(out_dir, "series.csv"))
    _write_weak_csv(weak_rows, os.path.join(out_dir, "weak_continuity.csv"))
    if chem_rows:
        _write_chem_csv(chem_rows, os.path.join(out_dir, "chem_continuity.csv"))
    write_field(outcome.final_state.u, os.path.join(out_dir, "u_final.bin"))
    if snapshots:
        for k, (ts, fld) in enumerate(sorted(snapshots.items())):
            write_field(fld, os.path.join(out_dir, f"u_snapshot_{k}.bin"))

    q = prep["scen_cfg"].u_exponent
    initial_lq = lp_norm(prep["u0"], q)
    verdicts = []
    if with_verdicts and outcome.series:
        verdicts = compute_verdicts(
            outcome.series,
            weak_rows,
            chem_rows,
            params=cfg.model,
            scen_cfg=prep["scen_cfg"],
            scenario_tag=prep["scenario"],
            m=prep["m"],
            weak_targets=weak_targets,
            chem_norms=prep["chem_norms"],
            initial_lq=initial_lq,
            t_end=cfg.t_end,
        )
        diagnostics.write_verdicts_json(verdicts, os.path.join(out_dir, "verdicts.json"))

    manifest = {
        "arks_version": __version__,
        "kernel_backend": _kernels.BACKEND,
        "grid_hash": prep["grid"].content_hash(),
        "eps": eps,
        "m": prep["m"],
        "scenario": prep["scenario"].value,
        "lambda": admissible_lambda(prep["scen_cfg"].r),
        "lp_exponents": sorted(outcome.series[0].lp_u) if outcome.series else [],
        "weak_targets": weak_targets,
        "chem_norms": prep["chem_norms"],
        "initial_lq": initial_lq,
        "t_end": cfg.t_end,
        "blowup_threshold": prep["ctrl"].blowup_threshold,
        "outcome": {
            "status": outcome.status.value,
            "detection_time": outcome.detection_time,
            "steps": outcome.steps,
            "cfl_retries": outcome.cfl_retries,
            "final_t": outcome.final_state.t,
            "final_linf": lp_norm(outcome.final_state.u, np.inf),
        },
        "config": cfg.raw,
    }
    _json_dump(manifest, os.path.join(out_dir, "manifest.json"))
    return outcome, verdicts, prep, snapshots


# ---------------------------------------------------------------------------
# eps family


def run_eps_family(cfg: ExperimentConfig, out_dir):
    """Run every eps in the ladder and add cross-eps uniformity verdicts."""
    os.makedirs(out_dir, exist_ok=True)
    results = []
    for k, eps in enumerate(cfg.eps_list):
        sub = os.path.join(out_dir, f"eps-{k}")
        outcome, verdicts, prep, _ = run_single(cfg, sub, eps=eps)
        results.append((eps, outcome, prep))

    family = []
    m = results[0][2]["m"]
    grid = results[0][2]["grid"]
    catalog = diagnostics.probe_functions(grid)

    # per-eps weak deviations against each run's own smoothed datum
    weak_dev = {}
    for k, (eps, outcome, prep) in enumerate(results):
        rows = _read_weak(os.path.join(out_dir, f"eps-{k}", "weak_continuity.csv"))
        with open(os.path.join(out_dir, f"eps-{k}", "manifest.json")) as fh:
            targets = json.load(fh)["weak_targets"]["mollified"]
        weak_dev[eps] = {
            name: [(t, abs(v - targets[name])) for t, v in series.items()]
            for name, series in rows.items()
        }

    for name in catalog:
        per_eps = [dict(weak_dev[eps][name]) for eps, _, _ in results]
        common_ts = sorted(set.intersection(*(set(d) for d in per_eps)))
        floor = WEAK_UNIFORMITY_FLOOR * m
        # compare running sups of the deviation (the t^theta envelope object);
        # raw pointwise ratios spike wherever a pairing crosses its target
        sups = [0.0] * len(per_eps)
        worst_ratio = 1.0
        for t in common_ts:
            sups = [max(s, d[t]) for s, d in zip(sups, per_eps)]
            if max(sups) <= floor:
                continue
            worst_ratio = max(worst_ratio, max(sups) / max(min(sups), floor))
        family.append(
            Verdict(
                f"weak-uniformity-{name}",
                (common_ts[0], common_ts[-1]),
                None,
                WEAK_UNIFORMITY_FACTOR,
                worst_ratio <= WEAK_UNIFORMITY_FACTOR,
                "eps-family",
                {"worst_ratio": worst_ratio, "eps_list": list(cfg.eps_list)},
            )
        )

    def series_max(outcome, getter, t_lo):
        vals = [getter(r) for r in outcome.series if r.t >= t_lo]
        return max(vals) if vals else float("nan")

    t_lo = 0.1 * cfg.t_end
    for fname, getter in (("l2-eps-uniform", lambda r: r.lp_u.get(2.0, np.nan)),
                          ("w1r-v-eps-uniform", lambda r: r.w1r_v)):
        if fname.startswith("w1r") and cfg.model.tau != 1:
            continue
        maxima = [series_max(outcome, getter, t_lo) for _, outcome, _ in results]
        ratio = max(maxima) / min(maxima)
        family.append(
            Verdict(fname, (t_lo, cfg.t_end), None, 2.0, ratio <= 2.0,
                    "eps-family", {"maxima": maxima})
        )

    diagnostics.write_verdicts_json(family, os.path.join(out_dir, "family_verdicts.json"))
    _json_dump(
        {
            "eps_list": list(cfg.eps_list),
            "runs": [f"eps-{k}" for k in range(len(cfg.eps_list))],
            "statuses": [o.status.value for _, o, _ in results],
        },
        os.path.join(out_dir, "family.json"),
    )
    _json_dump(
        {"arks_version": __version__, "kind": "eps_family", "config": cfg.raw,
         "grid_hash": grid.content_hash(), "kernel_backend": _kernels.BACKEND},
        os.path.join(out_dir, "manifest.json"),
    )
    return results, family


def _read_weak(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [list(map(float, line.strip().split(","))) for line in fh if line.strip()]
    names = [h[len("pair_"):] for h in header[1:]]
    out = {name: {} for name in names}
    for row in rows:
        for name, val in zip(names, row[1:]):
            out[name][row[0]] = val
    return out


# ---------------------------------------------------------------------------
# sweep


def _sweep_cell(payload):
    """One sweep cell; runs in a worker process."""
    cfg, i, j, chi, mass, out_dir = payload
    try:
        model = replace(cfg.model, chi=chi)
        _, m_base = initial.build_raw_measure(cfg.measure, cfg.grid)
        scale = mass / m_base
        atoms = tuple((*a[:-1], a[-1] * scale) for a in cfg.measure.atoms)
        density = cfg.measure.density
        if density is not None:
            density = replace(density, amplitude=density.amplitude * scale)
        measure = initial.MeasureSpec(atoms=atoms, density=density)
        sub = replace(
            cfg,
            model=model,
            measure=measure,
            kind="single",
            t_end=cfg.sweep_t_end,
            ladder_rungs=min(cfg.ladder_rungs, 10),
        )
        cell_dir = os.path.join(out_dir, f"cell-{i}-{j}")
        outcome, _, prep, _ = run_single(sub, cell_dir, with_verdicts=False)
        return (
            i,
            j,
            outcome.status.value,
            outcome.detection_time,
            float(lp_norm(outcome.final_state.u, np.inf)),
            None,
        )
    except ArksError as exc:
        return (i, j, "error", None, float("nan"), str(exc))


def run_sweep(cfg: ExperimentConfig, out_dir, workers: int = 1):
    """Phase grid over taxis strength (chi) and total mass; cells independent."""
    os.makedirs(out_dir, exist_ok=True)
    tasks = [
        (cfg, i, j, chi, mass, out_dir)
        for i, chi in enumerate(cfg.sweep_chi)
        for j, mass in enumerate(cfg.sweep_mass)
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_sweep_cell, tasks))
    else:
        raw = [_sweep_cell(t) for t in tasks]
    raw.sort(key=lambda r: (r[0], r[1]))

    nI, nJ = len(cfg.sweep_chi), len(cfg.sweep_mass)
    statuses = [[None] * nJ for _ in range(nI)]
    detection = [[None] * nJ for _ in range(nI)]
    linf = [[None] * nJ for _ in range(nI)]
    errors = []
    for i, j, status, det, lf, err in raw:
        statuses[i][j] = status
        detection[i][j] = det
        linf[i][j] = lf
        if err:
            errors.append({"cell": [i, j], "error": err})

    result = {
        "chi_values": list(cfg.sweep_chi),
        "mass_values": list(cfg.sweep_mass),
        "t_end": cfg.sweep_t_end,
        "statuses": statuses,
        "detection_times": detection,
        "final_linf": linf,
        "errors": errors,
        "kernel_backend": _kernels.BACKEND,
        "arks_version": __version__,
        "config": cfg.raw,
    }
    _json_dump(result, os.path.join(out_dir, "sweep_result.json"))
    _json_dump(
        {"arks_version": __version__, "kind": "sweep", "config": cfg.raw,
         "grid_hash": cfg.grid.content_hash(), "kernel_backend": _kernels.BACKEND},
        os.path.join(out_dir, "manifest.json"),
    )
    return result


# ---------------------------------------------------------------------------
# convergence study


def _restrict(field: Field, coarse: Grid) -> Field:
    """Exact cell-average restriction from a 2x-refined grid."""
    vals = field.values
    if coarse.is_tensor:
        if vals.ndim == 1:
            out = 0.5 * (vals[0::2] + vals[1::2])
        else:
            out = 0.25 * (
                vals[0::2, 0::2] + vals[1::2, 0::2] + vals[0::2, 1::2] + vals[1::2, 1::2]
            )
        return Field(coarse, out)
    fine_vols = field.grid.cell_volumes
    weighted = vals * fine_vols
    out = (weighted[0::2] + weighted[1::2]) / coarse.cell_volumes
    return Field(coarse, out)


def _l1_distance(a: Field, b: Field) -> float:
    return integrate(Field(a.grid, np.abs(a.values - b.values)))


def convergence_study(cfg: ExperimentConfig, out_dir):
    """Consecutive-eps L1 distances at probe time plus one h-refinement error."""
    os.makedirs(out_dir, exist_ok=True)
    t_star = cfg.probe_time
    if t_star > cfg.t_end:
        raise ConfigError("[experiment] probe_time must be <= t_end")

    fields = []
    for k, eps in enumerate(cfg.eps_list):
        sub = os.path.join(out_dir, f"eps-{k}")
        _, _, _, snaps = run_single(
            cfg, sub, eps=eps, with_verdicts=False, snapshot_times=(t_star,)
        )
        if not snaps or t_star not in snaps:
            raise ArksError(f"probe time {t_star} was not reached for eps={eps}")
        fields.append(snaps[t_star])

    distances = [
        _l1_distance(fields[k], fields[k + 1]) for k in range(len(fields) - 1)
    ]
    ratios = [
        distances[k + 1] / distances[k] if distances[k] > 0 else 0.0
        for k in range(len(distances) - 1)
    ]

    # h-refinement at the finest eps: double the cells, restrict, compare
    fine_grid = Grid(cfg.grid.geometry, cfg.grid.extents, [2 * c for c in cfg.grid.cells])
    _, _, _, snaps = run_single(
        cfg,
        os.path.join(out_dir, "h-refined"),
        eps=cfg.eps_list[-1],
        grid=fine_grid,
        with_verdicts=False,
        snapshot_times=(t_star,),
    )
    h_error = _l1_distance(fields[-1], _restrict(snaps[t_star], cfg.grid))

    report = {
        "eps_list": list(cfg.eps_list),
        "probe_time": t_star,
        "l1_distances": distances,
        "cauchy_ratios": ratios,
        "monotone": bool(all(d2 < d1 for d1, d2 in zip(distances, distances[1:]))),
        "h_refinement_l1_error": h_error,
        "arks_version": __version__,
        "config": cfg.raw,
    }
    _json_dump(report, os.path.join(out_dir, "convergence.json"))
    _json_dump(
        {"arks_version": __version__, "kind": "convergence", "config": cfg.raw,
         "grid_hash": cfg.grid.content_hash(), "kernel_backend": _kernels.BACKEND},
        os.path.join(out_dir, "manifest.json"),
    )
    return report


# ---------------------------------------------------------------------------
# verify


def verify_run(run_dir, strict: bool = False):
    """Recompute verdicts from the stored CSV and compare with verdicts.json."""
    manifest_path = os.path.join(run_dir, "manifest.json")
    if not os.path.exists(manifest_path):
        raise ConfigError(f"{run_dir} has no manifest.json")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    series = diagnostics.read_series_csv(os.path.join(run_dir, "series.csv"))

    lam = manifest["lambda"]
    verdicts = []

    def add(fn, *args, **kwargs):
        try:
            verdicts.append(fn(*args, **kwargs))
        except InvalidSeriesError:
            pass

    ts = series["t"]
    m = manifest["m"]
    mass_dev = float(np.max(np.abs(series["mass_u"] / m - 1.0)))
    verdicts.append(
        Verdict("mass-u-conservation", (float(ts[0]), float(ts[-1])), None, 1e-11,
                mass_dev <= 1e-11, "identity", {"max_rel_dev": mass_dev})
    )
    scenario = manifest["scenario"]
    t_end = manifest["t_end"]
    window = (max(DECAY_WINDOW[0], float(ts[0])), min(DECAY_WINDOW[1], t_end))
    if scenario == "S1":
        energy = list(zip(ts, series["energy_F"]))
        if all(v > 0 for _, v in energy):
            add(diagnostics.decay_envelope_verdict, "energy-dampened", energy, lam,
                (max(S1_ENERGY_WINDOW[0], float(ts[0])), window[1]))
        add(diagnostics.cumulative_convergence_verdict, "fisher-dampened-integral",
            list(zip(ts, series["fisher_u"])), lam)
        add(diagnostics.cumulative_convergence_verdict, "lap-z-dampened-integral",
            list(zip(ts, series["lap_z_sq"])), lam)
        add(diagnostics.cumulative_convergence_verdict, "grad-z4-dampened-integral",
            list(zip(ts, series["grad_z_l4"])), 2.0 * lam)
    if scenario in ("S2", "S3"):
        n = {"S2": 2, "S3": 3}[scenario]
        for p in manifest["lp_exponents"]:
            if p <= 1.0:
                continue
            col = f"lp_u_{p:g}"
            if col not in series:
                continue
            add(diagnostics.decay_envelope_verdict, f"lp-decay-p{p:g}",
                list(zip(ts, series[col] ** p)), n * (p - 1.0) / 2.0, window)
    add(diagnostics.taxis_growth_verdict, "taxis-cumulative",
        list(zip(ts, series["taxis_l1"])), TAXIS_THETA_MIN, window)

    stored_path = os.path.join(run_dir, "verdicts.json")
    mismatches = []
    if os.path.exists(stored_path):
        with open(stored_path) as fh:
            stored = {v["functional"]: v["pass"] for v in json.load(fh)}
        for v in verdicts:
            if v.functional in stored and stored[v.functional] != v.passed:
                mismatches.append(v.functional)

    all_pass = all(v.passed for v in verdicts) and not mismatches
    return verdicts, all_pass, mismatches


# ---------------------------------------------------------------------------
# dispatch


def run_experiment(cfg: ExperimentConfig, out_dir, workers: int = 1):
    """Dispatch on the configured experiment kind; artifacts land in out_dir."""
    if cfg.kind == "single":
        outcome, verdicts, _, _ = run_single(cfg, out_dir)
        return {"status": outcome.status.value,
                "verdicts_failed": [v.functional for v in verdicts if not v.passed]}
    if cfg.kind == "eps_family":
        results, family = run_eps_family(cfg, out_dir)
        return {"statuses": [o.status.value for _, o, _ in results],
                "verdicts_failed": [v.functional for v in family if not v.passed]}
    if cfg.kind == "sweep":
        result = run_sweep(cfg, out_dir, workers=workers)
        return {"statuses": result["statuses"], "errors": result["errors"]}
    if cfg.kind == "convergence":
        report = convergence_study(cfg, out_dir)
        return {"monotone": report["monotone"], "l1_distances": report["l1_distances"]}
    raise ConfigError(f"unknown experiment kind {cfg.kind!r}")
