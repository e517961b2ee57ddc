/** Parsing for the diagnostics CSV contract (see docs/config.md). */

export interface Series {
  columns: string[];
  /** column name -> values, one per sample row */
  data: Map<string, number[]>;
}

export const REQUIRED_COLUMNS = [
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
];

export class SchemaError extends Error {}

export function parseSeries(text: string): Series {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length < 2) {
    throw new SchemaError("series CSV has no data rows");
  }
  const columns = lines[0].split(",");
  const missing = REQUIRED_COLUMNS.filter((c) => !columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(`series CSV is missing column(s): ${missing.join(", ")}`);
  }
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `series CSV row has ${parts.length} fields, expected ${columns.length}`,
      );
    }
    parts.forEach((p, i) => {
      const x = Number(p);
      if (!Number.isFinite(x)) {
        throw new SchemaError(`non-numeric value ${JSON.stringify(p)} in column ${columns[i]}`);
      }
      data.get(columns[i])!.push(x);
    });
  }
  return { columns, data };
}

export function column(series: Series, name: string): number[] {
  const values = series.data.get(name);
  if (values === undefined) {
    throw new SchemaError(`series CSV has no column ${JSON.stringify(name)}`);
  }
  return values;
}

/** lp_u_<p> columns present in the series, sorted by exponent. */
export function lpColumns(series: Series): { p: number; name: string }[] {
  return series.columns
    .filter((c) => c.startsWith("lp_u_"))
    .map((name) => ({ p: Number(name.slice("lp_u_".length)), name }))
    .filter(({ p }) => Number.isFinite(p))
    .sort((a, b) => a.p - b.p);
}
