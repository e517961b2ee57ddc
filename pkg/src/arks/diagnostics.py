"""Tracked functionals, decay-exponent fits, and verdicts on their bounds.

A DiagnosticsRecord is one time sample of every functional the a priori
estimates control: masses, L^p norms, entropy, Dirichlet energy of the
combined potential z, the dampened energy ζ∫u ln u + ½∫|∇z|², its dissipation
terms (Fisher information, ∫|Δz|², ∫|∇z|⁴), the taxis integral ‖u∇z‖₁, and
W^{1,r} diagnostic norms of the chemicals.

Verdicts use two recorded modes: a log-log decay-exponent fit (positive decay
convention: value ~ t^{-fitted_exponent}) and a dampened-envelope criterion
(max/min ratio of t^{claimed}·value plus a no-monotone-divergence check).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, InvalidSeriesError
from .grid import (
    Field,
    Grid,
    gradient_magnitude,
    gradient_sq_integral,
    integrate,
    lp_norm,
    neumann_laplacian,
)
from .model import ModelParams, ScenarioConfig, derive

__all__ = [
    "DiagnosticsRecord",
    "Verdict",
    "default_lp_exponents",
    "admissible_lambda",
    "record",
    "fit_decay_exponent",
    "decay_envelope_verdict",
    "check_dampened_integrals",
    "cumulative_convergence_verdict",
    "taxis_growth_verdict",
    "weak_continuity_verdict",
    "probe_functions",
    "measure_pairing",
    "write_series_csv",
    "read_series_csv",
    "write_verdicts_json",
]

ENTROPY_FLOOR = 1e-300
#: engineering slack on fitted exponents (first-order stepping, finite windows)
EXPONENT_SLACK = 0.15


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    mass_u: float
    mass_v: float
    mass_w: float
    linf_u: float
    entropy: float
    dirichlet_z: float
    energy_F: float
    fisher_u: float
    lap_z_sq: float
    grad_z_l4: float
    taxis_l1: float
    w1r_v: float
    w1r_w: float
    lp_u: dict = field(default_factory=dict)


def default_lp_exponents(cfg: ScenarioConfig) -> tuple:
    q = cfg.u_exponent
    ps = {q, 2.0, 2.5, float(cfg.n), 3.0 * q / (4.0 * q - 3.0)}
    return tuple(sorted(p for p in ps if p >= 1.0))


def admissible_lambda(r: float) -> float:
    """A concrete dampening exponent compatible with λ ∈ (0, 2/3), λ − 2/r > −1.

    The 2/r − 1 lower edge approaches 2/3 as r drops toward 6/5, so the +0.05
    headroom must be clamped to stay inside the admissible interval (which is
    nonempty for every r > 6/5).
    """
    lo = 2.0 / r - 1.0
    candidate = max(0.01, lo + 0.05)
    if candidate < 2.0 / 3.0:
        return candidate
    return lo + 0.5 * (2.0 / 3.0 - lo)


def w1r_norm(f: Field, r: float) -> float:
    """Discrete W^{1,r} diagnostic norm with face-averaged gradient magnitudes."""
    grad = gradient_magnitude(f)
    return (lp_norm(f, r) ** r + lp_norm(grad, r) ** r) ** (1.0 / r)


_w1r_norm = w1r_norm


def _entropy(u: Field) -> float:
    vals = u.values
    # continuous extension of s ln s at 0; floor guards subnormal logs
    contrib = np.where(
        vals > 0.0, vals * np.log(np.maximum(vals, ENTROPY_FLOOR)), 0.0
    )
    return integrate(Field(u.grid, contrib))


def record(state, params: ModelParams, cfg: ScenarioConfig, lp_exponents=None):
    """Compute one full time sample from the current solver state."""
    if lp_exponents is None:
        lp_exponents = default_lp_exponents(cfg)
    u, v, w = state.u, state.v, state.w
    g = u.grid
    zeta = derive(params).zeta
    z = Field(g, params.xi * w.values - params.chi * v.values)
    grad_z = gradient_magnitude(z)

    entropy = _entropy(u)
    dirichlet = 0.5 * gradient_sq_integral(z)
    sqrt_u = Field(g, np.sqrt(np.maximum(u.values, 0.0)))
    fisher = 4.0 * gradient_sq_integral(sqrt_u)
    lap_z = neumann_laplacian(z)
    lap_z_sq = integrate(Field(g, lap_z.values**2))
    grad_z_l4 = integrate(Field(g, grad_z.values**4))
    taxis = integrate(Field(g, u.values * grad_z.values))

    return DiagnosticsRecord(
        t=state.t,
        mass_u=integrate(u),
        mass_v=integrate(v),
        mass_w=integrate(w),
        linf_u=lp_norm(u, np.inf),
        entropy=entropy,
        dirichlet_z=dirichlet,
        energy_F=zeta * entropy + dirichlet,
        fisher_u=fisher,
        lap_z_sq=lap_z_sq,
        grad_z_l4=grad_z_l4,
        taxis_l1=taxis,
        w1r_v=_w1r_norm(v, cfg.r),
        w1r_w=_w1r_norm(w, cfg.r),
        lp_u={p: lp_norm(u, p) for p in lp_exponents},
    )


# ---------------------------------------------------------------------------
# fits and verdicts


def _window_slice(ts, vals, window):
    ts = np.asarray(ts, dtype=float)
    vals = np.asarray(vals, dtype=float)
    mask = (ts >= window[0]) & (ts <= window[1])
    return ts[mask], vals[mask]


def fit_decay_exponent(series, window) -> float:
    """Least-squares slope of ln(value) vs ln(t); value ~ t^slope.

    ``series`` is a sequence of (t, value) pairs; needs at least 5 strictly
    positive samples inside the window.
    """
    ts = [t for t, _ in series]
    vals = [v for _, v in series]
    ts, vals = _window_slice(ts, vals, window)
    if len(ts) < 5:
        raise InvalidSeriesError(
            f"need >= 5 samples in window {window}, got {len(ts)}"
        )
    if np.any(vals <= 0):
        raise InvalidSeriesError("series has nonpositive values in the fit window")
    slope = np.polyfit(np.log(ts), np.log(vals), 1)[0]
    return float(slope)


@dataclass
class Verdict:
    functional: str
    window: tuple
    fitted_exponent: float | None
    bound: float | None
    passed: bool
    mode: str
    details: dict = field(default_factory=dict)

    def to_json_obj(self):
        return {
            "functional": self.functional,
            "window": list(self.window),
            "fitted_exponent": self.fitted_exponent,
            "bound": self.bound,
            "pass": self.passed,
            "mode": self.mode,
            "details": self.details,
        }


def _monotone_divergence(ts, dampened, tail: int = 5) -> bool:
    """True when the dampened values rise strictly as t decreases (tail rungs)."""
    k = min(tail, len(ts))
    if k < 3:
        return False
    head = dampened[:k]  # ascending t: smallest times first
    return bool(np.all(np.diff(head) < 0))


def decay_envelope_verdict(
    name,
    series,
    claimed_decay_exponent,
    window,
    slack=EXPONENT_SLACK,
    ratio_cap=10.0,
):
    """Check value(t) <= C t^{-claimed} in both recorded modes.

    Fit mode passes when the fitted decay exponent (= minus the log-log slope)
    does not exceed the claimed one by more than ``slack``; envelope mode
    passes when t^{claimed}·value stays within ``ratio_cap`` of its window
    minimum and does not diverge monotonically toward t = 0.
    """
    ts = np.asarray([t for t, _ in series], dtype=float)
    vals = np.asarray([v for _, v in series], dtype=float)
    ts, vals = _window_slice(ts, vals, window)
    if len(ts) < 5 or np.any(vals <= 0):
        raise InvalidSeriesError(f"{name}: unusable series for envelope verdict")
    slope = float(np.polyfit(np.log(ts), np.log(vals), 1)[0])
    fitted_decay = -slope
    pass_fit = fitted_decay <= claimed_decay_exponent + slack

    dampened = ts**claimed_decay_exponent * vals
    ratio = float(np.max(dampened) / np.min(dampened))
    diverging = _monotone_divergence(ts, dampened)
    pass_envelope = (ratio <= ratio_cap) and not diverging

    return Verdict(
        functional=name,
        window=(float(ts[0]), float(ts[-1])),
        fitted_exponent=fitted_decay,
        bound=float(claimed_decay_exponent),
        passed=bool(pass_fit or pass_envelope),
        mode="fit|envelope",
        details={
            "pass_fit": bool(pass_fit),
            "pass_envelope": bool(pass_envelope),
            "slack": slack,
            "dampened_ratio": ratio,
            "ratio_cap": ratio_cap,
            "monotone_divergence": bool(diverging),
            "envelope_constant": float(np.max(dampened)),
        },
    )


def cumulative_convergence_verdict(
    name,
    series,
    weight_exponent,
    tail_rungs=4,
    ratio_max=0.9,
    vacuous=False,
):
    """Check that ∫ s^{weight}·g(s) ds converges as the ladder extends to 0.

    Trapezoidal increments between consecutive ladder samples must decrease
    geometrically toward the small-t end.  ``vacuous=True`` marks checks whose
    weight (e.g. ζ) vanishes; they are reported as passing but flagged.
    """
    ts = np.asarray([t for t, _ in series], dtype=float)
    vals = np.asarray([v for _, v in series], dtype=float)
    if len(ts) < tail_rungs + 2:
        raise InvalidSeriesError(f"{name}: ladder too short for convergence check")
    integrand = ts**weight_exponent * vals
    increments = 0.5 * (integrand[1:] + integrand[:-1]) * np.diff(ts)
    total = float(np.sum(increments))
    if vacuous or total == 0.0:
        return Verdict(
            functional=name,
            window=(float(ts[0]), float(ts[-1])),
            fitted_exponent=None,
            bound=None,
            passed=True,
            mode="cumulative",
            details={"vacuous": True, "total": total},
        )
    head = increments[: tail_rungs + 1]
    ratios = head[:-1] / head[1:]
    ok = bool(np.all(ratios <= ratio_max))
    return Verdict(
        functional=name,
        window=(float(ts[0]), float(ts[-1])),
        fitted_exponent=None,
        bound=None,
        passed=ok,
        mode="cumulative",
        details={
            "vacuous": False,
            "total": total,
            "tail_increment_ratios": [float(r) for r in ratios],
            "ratio_max": ratio_max,
        },
    )


def check_dampened_integrals(records, lam, theta_min=0.1, zeta=None, window=(1e-4, 1e-1)):
    """All four dampened space-time accumulations at once.

    Returns verdicts for ∫s^λ·fisher, ∫s^λ·|Δz|², ∫s^{2λ}·|∇z|⁴ (bounded as
    the ladder extends toward 0) and the cumulative taxis integral (fits a
    positive growth exponent).  The fisher check is vacuous when its weight
    ζ is zero.
    """
    fisher = [(r.t, r.fisher_u) for r in records]
    lap = [(r.t, r.lap_z_sq) for r in records]
    g4 = [(r.t, r.grad_z_l4) for r in records]
    taxis = [(r.t, r.taxis_l1) for r in records]
    return [
        cumulative_convergence_verdict(
            "fisher-dampened-integral", fisher, lam, vacuous=(zeta == 0.0)
        ),
        cumulative_convergence_verdict("lap-z-dampened-integral", lap, lam),
        cumulative_convergence_verdict("grad-z4-dampened-integral", g4, 2.0 * lam),
        taxis_growth_verdict("taxis-cumulative", taxis, theta_min, window),
    ]


def taxis_growth_verdict(name, series, theta_min=0.1, window=(1e-4, 1e-1)):
    """Fit the cumulative taxis integral ∫₀ᵗ‖u∇z‖₁ ds against C t^θ, θ > 0."""
    ts = np.asarray([t for t, _ in series], dtype=float)
    vals = np.asarray([v for _, v in series], dtype=float)
    order = np.argsort(ts)
    ts, vals = ts[order], vals[order]
    if np.max(vals) == 0.0:
        return Verdict(
            functional=name,
            window=window,
            fitted_exponent=None,
            bound=theta_min,
            passed=True,
            mode="identically-zero",
        )
    cumulative = np.concatenate(
        ([0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(ts)))
    )
    fit_ts, fit_cum = _window_slice(ts, cumulative, window)
    keep = fit_cum > 0
    if np.sum(keep) < 5:
        raise InvalidSeriesError(f"{name}: too few positive cumulative samples")
    slope = float(np.polyfit(np.log(fit_ts[keep]), np.log(fit_cum[keep]), 1)[0])
    return Verdict(
        functional=name,
        window=(float(fit_ts[0]), float(fit_ts[-1])),
        fitted_exponent=slope,
        bound=theta_min,
        passed=bool(slope >= theta_min),
        mode="cumulative-fit",
    )


def weak_continuity_verdict(name, series, target, tol, floor=0.0, t_monotone=None):
    """Deviations |∫u(t)φ − target| must fall below tol as t decreases.

    The monotone-decrease requirement applies on the approach to t = 0 (up to
    ``t_monotone``; late-time relaxation legitimately turns the pairing
    around) and up to ``floor`` — deviations at noise level count as equal.
    """
    ts = np.asarray([t for t, _ in series], dtype=float)
    vals = np.asarray([v for _, v in series], dtype=float)
    order = np.argsort(ts)
    ts, vals = ts[order], vals[order]
    devs = np.abs(vals - target)
    small_enough = bool(devs[0] <= tol)
    if t_monotone is None:
        t_monotone = ts[-1]
    sel = ts <= t_monotone
    d = devs[sel]
    monotone = bool(np.all(d[:-1] <= d[1:] + floor))
    return Verdict(
        functional=name,
        window=(float(ts[0]), float(ts[-1])),
        fitted_exponent=None,
        bound=tol,
        passed=small_enough and monotone,
        mode="weak-continuity",
        details={
            "deviation_at_smallest_t": float(devs[0]),
            "monotone": monotone,
            "monotone_window": float(t_monotone),
            "max_deviation": float(np.max(devs)),
        },
    )


# ---------------------------------------------------------------------------
# probe functions for weak continuity


def probe_functions(grid: Grid):
    """Fixed catalog of test observables: constant, coordinate cosines, gaussian.

    Returns name -> (pointwise callable, sampled Field).  The callable is used
    to pair atoms exactly; the field pairs densities and solutions by
    quadrature.
    """
    from .grid import field_from_function

    catalog = {}

    def add(name, fn):
        catalog[name] = (fn, field_from_function(grid, fn))

    add("one", lambda *xs: np.ones_like(xs[0]) if hasattr(xs[0], "shape") else 1.0)
    if grid.is_tensor:
        for d, (L, label) in enumerate(zip(grid.extents, "xy")):
            add(f"cos-{label}", lambda *xs, d=d, L=L: np.cos(np.pi * xs[d] / L))
        # wide enough that mollification at the largest catalog eps barely
        # changes the probe's curvature at the atom
        center = tuple(e / 2 for e in grid.extents)
        width = 0.35 * min(grid.extents)

        def gauss(*xs):
            r2 = sum((x - c) ** 2 for x, c in zip(xs, center))
            return np.exp(-r2 / (2 * width**2))

        add("gauss", gauss)
    else:
        R = grid.extents[0]
        add("cos-r", lambda r: np.cos(np.pi * r / R))
        width = 0.35 * R
        add("gauss", lambda r: np.exp(-(r**2) / (2 * width**2)))
    return catalog


def measure_pairing(spec, grid: Grid, fn, sampled: Field) -> float:
    """⟨u₀, φ⟩ for an atom + density measure: exact on atoms, quadrature on density."""
    from .initial import density_field

    total = 0.0
    for atom in spec.atoms:
        *loc, mass = atom
        total += mass * float(fn(*loc))
    if spec.density is not None:
        dens = density_field(grid, spec.density)
        total += integrate(Field(grid, dens.values * sampled.values))
    return total


# ---------------------------------------------------------------------------
# series CSV / verdict JSON

_FIXED_COLUMNS = [
    "t",
    "mass_u",
    "mass_v",
    "mass_w",
    "linf_u",
    "entropy",
    "dirichlet_z",
    "energy_F",
    "fisher_u",
    "lap_z_sq",
    "grad_z_l4",
    "taxis_l1",
    "w1r_v",
    "w1r_w",
]


def _lp_column(p: float) -> str:
    return f"lp_u_{p:g}"


def write_series_csv(records, path):
    if not records:
        raise InvalidParameterError("cannot write an empty series")
    ps = sorted(records[0].lp_u)
    header = _FIXED_COLUMNS + [_lp_column(p) for p in ps]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for rec in records:
            row = [getattr(rec, c) for c in _FIXED_COLUMNS]
            row += [rec.lp_u[p] for p in ps]
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_series_csv(path):
    """Series as a dict of column -> numpy array; schema checked."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        missing = [c for c in _FIXED_COLUMNS if c not in header]
        if missing:
            raise InvalidParameterError(
                f"series file {path} is missing columns {missing}"
            )
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


def write_verdicts_json(verdicts, path):
    payload = [v.to_json_obj() for v in verdicts]
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
