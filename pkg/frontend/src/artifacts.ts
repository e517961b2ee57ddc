/** Loading and validating run/sweep/family artifact directories. */

import * as fs from "node:fs";
import * as path from "node:path";

import { Series, parseSeries } from "./csv.js";

export class ArtifactError extends Error {}

export interface Verdict {
  functional: string;
  window: [number, number];
  fitted_exponent: number | null;
  bound: number | null;
  pass: boolean;
  mode: string;
  details?: Record<string, unknown>;
}

export interface RunArtifacts {
  kind: "run";
  dir: string;
  manifest: Record<string, unknown>;
  series: Series;
  verdicts: Verdict[];
}

export interface SweepArtifacts {
  kind: "sweep";
  dir: string;
  chi_values: number[];
  mass_values: number[];
  statuses: string[][];
  detection_times: (number | null)[][];
}

export interface FamilyArtifacts {
  kind: "family";
  dir: string;
  eps_list: number[];
  runs: RunArtifacts[];
}

export type Artifacts = RunArtifacts | SweepArtifacts | FamilyArtifacts;

function readJson(p: string): Record<string, unknown> {
  return JSON.parse(fs.readFileSync(p, "utf-8")) as Record<string, unknown>;
}

export function loadRun(dir: string): RunArtifacts {
  const manifestPath = path.join(dir, "manifest.json");
  if (!fs.existsSync(manifestPath)) {
    throw new ArtifactError(`${dir}: manifest.json is missing`);
  }
  const seriesPath = path.join(dir, "series.csv");
  if (!fs.existsSync(seriesPath)) {
    throw new ArtifactError(`${dir}: series.csv is missing`);
  }
  const verdictsPath = path.join(dir, "verdicts.json");
  const verdicts = fs.existsSync(verdictsPath)
    ? (JSON.parse(fs.readFileSync(verdictsPath, "utf-8")) as Verdict[])
    : [];
  return {
    kind: "run",
    dir,
    manifest: readJson(manifestPath),
    series: parseSeries(fs.readFileSync(seriesPath, "utf-8")),
    verdicts,
  };
}

export function load(dir: string): Artifacts {
  if (!fs.existsSync(dir)) {
    throw new ArtifactError(`${dir}: no such directory`);
  }
  const sweepPath = path.join(dir, "sweep_result.json");
  if (fs.existsSync(sweepPath)) {
    const raw = readJson(sweepPath);
    return {
      kind: "sweep",
      dir,
      chi_values: raw.chi_values as number[],
      mass_values: raw.mass_values as number[],
      statuses: raw.statuses as string[][],
      detection_times: raw.detection_times as (number | null)[][],
    };
  }
  const familyPath = path.join(dir, "family.json");
  if (fs.existsSync(familyPath)) {
    const raw = readJson(familyPath);
    const runs = (raw.runs as string[]).map((sub) => loadRun(path.join(dir, sub)));
    return { kind: "family", dir, eps_list: raw.eps_list as number[], runs };
  }
  return loadRun(dir);
}
