/** Figure builders: decay panels, sweep phase diagram, eps-family overlay. */

import {
  Artifacts,
  ArtifactError,
  FamilyArtifacts,
  RunArtifacts,
  SweepArtifacts,
  Verdict,
} from "./artifacts.js";
import { column, lpColumns } from "./csv.js";
import { Frame, Scale, axes, document, esc, fmt, logScale, linearScale, polyline } from "./svg.js";

const SERIES_STYLE = 'stroke="#1f6fb2" stroke-width="1.5"';
const FITTED_STYLE = 'stroke="#d62728" stroke-width="1.2" stroke-dasharray="6 3"';
const CLAIMED_STYLE = 'stroke="#2ca02c" stroke-width="1.2" stroke-dasharray="2 3"';

interface DecayPanel {
  title: string;
  ts: number[];
  values: number[];
  fitted: number | null;
  claimed: number | null;
  window: [number, number];
}

function cumulative(ts: number[], vals: number[]): number[] {
  const out = [0];
  for (let i = 1; i < ts.length; i++) {
    out.push(out[i - 1] + 0.5 * (vals[i] + vals[i - 1]) * (ts[i] - ts[i - 1]));
  }
  return out;
}

/** Map a decay-flavored verdict onto the series column it measured. */
function panelFor(run: RunArtifacts, v: Verdict): DecayPanel | null {
  const ts = column(run.series, "t");
  let values: number[];
  if (v.functional === "energy-dampened") {
    values = column(run.series, "energy_F");
  } else if (v.functional.startsWith("lp-decay-p")) {
    const p = Number(v.functional.slice("lp-decay-p".length));
    const col = lpColumns(run.series).find((c) => Math.abs(c.p - p) < 1e-12);
    if (!col) return null;
    values = column(run.series, col.name).map((x) => Math.pow(x, p));
  } else if (v.functional === "taxis-cumulative") {
    values = cumulative(ts, column(run.series, "taxis_l1"));
  } else {
    return null;
  }
  const pts = ts
    .map((t, i) => [t, values[i]] as const)
    .filter(([t, y]) => t > 0 && y > 0);
  if (pts.length < 3) return null;
  return {
    title: v.functional,
    ts: pts.map(([t]) => t),
    values: pts.map(([, y]) => y),
    fitted: v.fitted_exponent,
    claimed: v.bound,
    window: v.window,
  };
}

function guideLine(
  frame: Frame,
  sx: Scale,
  sy: Scale,
  panel: DecayPanel,
  exponent: number,
  style: string,
  label: string,
  anchorShift: number,
): string {
  // anchor the guide at the geometric middle of the fit window
  const [lo, hi] = panel.window;
  const tm = Math.sqrt(lo * hi);
  let vm = panel.values[0];
  let best = Infinity;
  panel.ts.forEach((t, i) => {
    const d = Math.abs(Math.log(t / tm));
    if (d < best) {
      best = d;
      vm = panel.values[i];
    }
  });
  const c = vm * anchorShift;
  const y = (t: number) => c * Math.pow(t / tm, exponent);
  const seg = [lo, hi];
  const body = polyline(seg, seg.map(y), sx, sy, style);
  const color = style.match(/stroke="([^"]+)"/)?.[1] ?? "#000";
  const tx = fmt(sx(hi));
  const ty = fmt(sy(y(hi)));
  const sign = exponent < 0 ? `-${fmt(-exponent)}` : fmt(exponent);
  return `${body}\n<text x="${tx}" y="${ty}" font-size="9" fill="${color}" dx="-4" dy="-3" text-anchor="end">${esc(`${label} t^${sign}`)}</text>`;
}

function decayPanelSvg(panel: DecayPanel, frame: Frame): string {
  const tLo = Math.min(...panel.ts);
  const tHi = Math.max(...panel.ts);
  const vLo = Math.min(...panel.values);
  const vHi = Math.max(...panel.values);
  const sx = logScale(tLo, tHi, frame.x0, frame.x0 + frame.w);
  const sy = logScale(vLo, vHi * 1.3, frame.y0 + frame.h, frame.y0);
  const parts = [
    `<text x="${frame.x0 + frame.w / 2}" y="${frame.y0 - 6}" font-size="12" text-anchor="middle">${esc(panel.title)}</text>`,
    axes(frame, sx, sy, "t", panel.title),
    polyline(panel.ts, panel.values, sx, sy, SERIES_STYLE),
  ];
  // decay verdicts store positive decay exponents (value ~ t^-a); the
  // cumulative taxis integral is a growth bound (value ~ t^+theta)
  const sign = panel.title === "taxis-cumulative" ? 1 : -1;
  if (panel.fitted !== null) {
    parts.push(
      guideLine(frame, sx, sy, panel, sign * panel.fitted, FITTED_STYLE, "fitted", 1.0),
    );
  }
  if (panel.claimed !== null) {
    parts.push(
      guideLine(frame, sx, sy, panel, sign * panel.claimed, CLAIMED_STYLE, "claimed", 1.6),
    );
  }
  return parts.join("\n");
}

export function decayFigure(run: RunArtifacts): string {
  const panels = run.verdicts
    .map((v) => (v.fitted_exponent !== null ? panelFor(run, v) : null))
    .filter((p): p is DecayPanel => p !== null);
  if (panels.length === 0) {
    throw new ArtifactError(`${run.dir}: no decay-flavored verdicts to plot`);
  }
  const cols = Math.min(panels.length, 2);
  const rows = Math.ceil(panels.length / cols);
  const W = 380;
  const H = 300;
  const body = panels
    .map((p, i) => {
      const cx = (i % cols) * W;
      const cy = Math.floor(i / cols) * H;
      return decayPanelSvg(p, { x0: cx + 64, y0: cy + 28, w: W - 96, h: H - 80 });
    })
    .join("\n");
  return document(cols * W, rows * H, body);
}

const STATUS_COLORS: Record<string, string> = {
  completed: "#4a90d9",
  "blowup-detected": "#d64545",
  "step-underflow": "#e8a33d",
  error: "#999999",
};

export function phaseFigure(sweep: SweepArtifacts): string {
  const nI = sweep.chi_values.length;
  const nJ = sweep.mass_values.length;
  const cell = 64;
  const x0 = 90;
  const y0 = 40;
  const parts: string[] = [
    `<text x="${x0 + (nJ * cell) / 2}" y="20" font-size="13" text-anchor="middle">outcome phase diagram</text>`,
  ];
  for (let i = 0; i < nI; i++) {
    for (let j = 0; j < nJ; j++) {
      const status = sweep.statuses[i][j];
      const color = STATUS_COLORS[status] ?? "#cccccc";
      const x = x0 + j * cell;
      const y = y0 + i * cell;
      parts.push(
        `<rect x="${x}" y="${y}" width="${cell - 2}" height="${cell - 2}" fill="${color}" stroke="#333"/>`,
      );
      const det = sweep.detection_times[i][j];
      if (det !== null) {
        parts.push(
          `<text x="${x + cell / 2 - 1}" y="${y + cell / 2 + 3}" font-size="9" fill="white" text-anchor="middle">${esc(fmt(det))}</text>`,
        );
      }
    }
    parts.push(
      `<text x="${x0 - 8}" y="${y0 + i * cell + cell / 2}" font-size="11" text-anchor="end" dominant-baseline="middle">chi=${esc(fmt(sweep.chi_values[i]))}</text>`,
    );
  }
  for (let j = 0; j < nJ; j++) {
    parts.push(
      `<text x="${x0 + j * cell + cell / 2}" y="${y0 + nI * cell + 16}" font-size="11" text-anchor="middle">m=${esc(fmt(sweep.mass_values[j]))}</text>`,
    );
  }
  const legendY = y0 + nI * cell + 36;
  let lx = x0;
  for (const [status, color] of Object.entries(STATUS_COLORS)) {
    parts.push(
      `<rect x="${lx}" y="${legendY}" width="12" height="12" fill="${color}" stroke="#333"/>`,
      `<text x="${lx + 16}" y="${legendY + 10}" font-size="10">${esc(status)}</text>`,
    );
    lx += 120;
  }
  return document(Math.max(x0 + nJ * cell + 40, lx + 20), legendY + 30, parts.join("\n"));
}

const FAMILY_COLORS = ["#1f6fb2", "#d62728", "#2ca02c", "#9467bd", "#8c564b"];

export function familyFigure(family: FamilyArtifacts): string {
  const lp = lpColumns(family.runs[0].series).find((c) => Math.abs(c.p - 2) < 1e-12)
    ?? lpColumns(family.runs[0].series)[0];
  if (!lp) {
    throw new ArtifactError(`${family.dir}: family runs carry no lp_u columns`);
  }
  const frame: Frame = { x0: 70, y0: 36, w: 420, h: 280 };
  let tLo = Infinity;
  let tHi = 0;
  let vLo = Infinity;
  let vHi = 0;
  const curves = family.runs.map((run) => {
    const ts = column(run.series, "t");
    const vs = column(run.series, lp.name);
    ts.forEach((t, i) => {
      if (t > 0 && vs[i] > 0) {
        tLo = Math.min(tLo, t);
        tHi = Math.max(tHi, t);
        vLo = Math.min(vLo, vs[i]);
        vHi = Math.max(vHi, vs[i]);
      }
    });
    return { ts, vs };
  });
  const sx = logScale(tLo, tHi, frame.x0, frame.x0 + frame.w);
  const sy = logScale(vLo, vHi * 1.2, frame.y0 + frame.h, frame.y0);
  const parts = [
    `<text x="${frame.x0 + frame.w / 2}" y="20" font-size="13" text-anchor="middle">smoothing-family overlay: ${esc(lp.name)}</text>`,
    axes(frame, sx, sy, "t", lp.name),
  ];
  curves.forEach(({ ts, vs }, k) => {
    const color = FAMILY_COLORS[k % FAMILY_COLORS.length];
    const pts = ts.map((t, i) => [t, vs[i]] as const).filter(([t, v]) => t > 0 && v > 0);
    parts.push(
      polyline(
        pts.map(([t]) => t),
        pts.map(([, v]) => v),
        sx,
        sy,
        `stroke="${color}" stroke-width="1.5"`,
      ),
      `<rect x="${frame.x0 + frame.w - 140}" y="${frame.y0 + 8 + 16 * k}" width="12" height="3" fill="${color}"/>`,
      `<text x="${frame.x0 + frame.w - 124}" y="${frame.y0 + 13 + 16 * k}" font-size="10">eps=${esc(fmt(family.eps_list[k]))}</text>`,
    );
  });
  return document(frame.x0 + frame.w + 40, frame.y0 + frame.h + 60, parts.join("\n"));
}

export function reportFigure(run: RunArtifacts): string {
  const ts = column(run.series, "t");
  const mass = column(run.series, "mass_u");
  const m = (run.manifest.m as number) ?? mass[0];
  const outcome = run.manifest.outcome as Record<string, unknown> | undefined;
  const header = [
    `<text x="20" y="24" font-size="15">run report: ${esc(String(run.manifest.scenario ?? "?"))} scenario, eps=${esc(fmt(run.manifest.eps as number))}</text>`,
    `<text x="20" y="42" font-size="11">status=${esc(String(outcome?.status ?? "?"))}  m=${esc(fmt(m))}  grid=${esc(String(run.manifest.grid_hash ?? ""))}  backend=${esc(String(run.manifest.kernel_backend ?? ""))}</text>`,
  ];

  // mass drift panel (linear axes, relative deviation)
  const devs = mass.map((x) => Math.abs(x / m - 1.0) + 1e-18);
  const massFrame: Frame = { x0: 70, y0: 70, w: 330, h: 200 };
  const sxm = logScale(Math.min(...ts.filter((t) => t > 0)), Math.max(...ts), massFrame.x0, massFrame.x0 + massFrame.w);
  const sym = logScale(1e-18, Math.max(...devs, 1e-12) * 10, massFrame.y0 + massFrame.h, massFrame.y0);
  const massPanel = [
    `<text x="${massFrame.x0 + massFrame.w / 2}" y="${massFrame.y0 - 8}" font-size="12" text-anchor="middle">|mass/m - 1|</text>`,
    axes(massFrame, sxm, sym, "t", "rel. mass deviation"),
    polyline(ts, devs, sxm, sym, SERIES_STYLE),
  ];

  // verdict table
  const rows = run.verdicts.map((v, i) => {
    const y = 90 + 16 * i;
    const color = v.pass ? "#2ca02c" : "#d62728";
    return (
      `<text x="440" y="${y}" font-size="10" fill="${color}">${v.pass ? "PASS" : "FAIL"}</text>` +
      `<text x="485" y="${y}" font-size="10">${esc(v.functional)} [${esc(v.mode)}]</text>`
    );
  });
  const height = Math.max(330, 100 + 16 * run.verdicts.length);
  return document(860, height, [...header, ...massPanel,
    `<text x="440" y="70" font-size="12">verdicts</text>`, ...rows].join("\n"));
}

export function renderFigure(kind: string, artifacts: Artifacts): string {
  switch (kind) {
    case "decay":
      if (artifacts.kind !== "run") {
        throw new ArtifactError(`decay figure needs a run directory, got ${artifacts.kind}`);
      }
      return decayFigure(artifacts);
    case "report":
      if (artifacts.kind !== "run") {
        throw new ArtifactError(`report figure needs a run directory, got ${artifacts.kind}`);
      }
      return reportFigure(artifacts);
    case "phase":
      if (artifacts.kind !== "sweep") {
        throw new ArtifactError(`phase figure needs a sweep directory, got ${artifacts.kind}`);
      }
      return phaseFigure(artifacts);
    case "family":
      if (artifacts.kind !== "family") {
        throw new ArtifactError(`family figure needs an eps-family directory, got ${artifacts.kind}`);
      }
      return familyFigure(artifacts);
    default:
      throw new ArtifactError(`unknown figure kind ${JSON.stringify(kind)}`);
  }
}

export function defaultFigures(artifacts: Artifacts): string[] {
  if (artifacts.kind === "run") return ["decay", "report"];
  if (artifacts.kind === "sweep") return ["phase"];
  return ["family"];
}
