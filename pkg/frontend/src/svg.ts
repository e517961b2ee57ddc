/** Deterministic SVG assembly: no DOM, no timestamps, fixed формatting. */

export function fmt(x: number): string {
  if (x === 0) return "0";
  if (!Number.isFinite(x)) return "0";
  // shortest stable representation at plotting precision
  const s = x.toPrecision(6);
  return s.includes(".") || s.includes("e")
    ? s.replace(/\.?0+($|e)/, "$1")
    : s;
}

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (x: number): number;
  ticks: number[];
  label: (x: number) => string;
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  const fn = ((x: number) => outLo + ((x - lo) / span) * (outHi - outLo)) as Scale;
  const step = niceStep(span / 5);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(v);
  }
  fn.ticks = ticks;
  fn.label = fmt;
  return fn;
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const fn = ((x: number) => outLo + ((Math.log10(x) - llo) / span) * (outHi - outLo)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi + 1e-9); e += 1) {
    ticks.push(Math.pow(10, e));
  }
  fn.ticks = ticks;
  fn.label = (x: number) => `1e${Math.round(Math.log10(x))}`;
  return fn;
}

function niceStep(raw: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(raw) || 1)));
  const r = raw / mag;
  const nice = r >= 5 ? 10 : r >= 2 ? 5 : r >= 1 ? 2 : 1;
  return nice * mag;
}

export function polyline(
  xs: number[],
  ys: number[],
  sx: Scale,
  sy: Scale,
  style: string,
): string {
  const pts = xs
    .map((x, i) => `${fmt(sx(x))},${fmt(sy(ys[i]))}`)
    .join(" ");
  return `<polyline fill="none" ${style} points="${pts}"/>`;
}

export interface Frame {
  x0: number;
  y0: number;
  w: number;
  h: number;
}

export function axes(
  frame: Frame,
  sx: Scale,
  sy: Scale,
  xLabel: string,
  yLabel: string,
): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${frame.x0}" y="${frame.y0}" width="${frame.w}" height="${frame.h}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  for (const t of sx.ticks) {
    const px = fmt(sx(t));
    parts.push(
      `<line x1="${px}" y1="${frame.y0 + frame.h}" x2="${px}" y2="${frame.y0 + frame.h + 4}" stroke="#333"/>`,
      `<text x="${px}" y="${frame.y0 + frame.h + 16}" font-size="10" text-anchor="middle">${esc(sx.label(t))}</text>`,
    );
  }
  for (const t of sy.ticks) {
    const py = fmt(sy(t));
    parts.push(
      `<line x1="${frame.x0 - 4}" y1="${py}" x2="${frame.x0}" y2="${py}" stroke="#333"/>`,
      `<text x="${frame.x0 - 6}" y="${py}" font-size="10" text-anchor="end" dominant-baseline="middle">${esc(sy.label(t))}</text>`,
    );
  }
  parts.push(
    `<text x="${frame.x0 + frame.w / 2}" y="${frame.y0 + frame.h + 32}" font-size="11" text-anchor="middle">${esc(xLabel)}</text>`,
    `<text x="${frame.x0 - 44}" y="${frame.y0 + frame.h / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 ${frame.x0 - 44} ${frame.y0 + frame.h / 2})">${esc(yLabel)}</text>`,
  );
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    "</svg>",
    "",
  ].join("\n");
}
