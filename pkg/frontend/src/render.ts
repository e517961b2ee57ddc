/** Rendering entry: load an artifact directory, emit the requested figures. */

import * as fs from "node:fs";
import * as path from "node:path";

import { Artifacts, ArtifactError, load } from "./artifacts.js";
import { defaultFigures, renderFigure } from "./figures.js";

export interface ReportSpec {
  inputDir: string;
  figures?: string[];
  format?: string;
  outDir?: string;
}

export interface Rendered {
  files: string[];
}

export function render(spec: ReportSpec): Rendered {
  const format = spec.format ?? "svg";
  if (format !== "svg") {
    throw new ArtifactError(
      `format ${JSON.stringify(format)} is not supported: figures are deterministic SVG ` +
        "(no raster backend is bundled)",
    );
  }
  const artifacts: Artifacts = load(spec.inputDir);
  const figures = spec.figures && spec.figures.length > 0
    ? spec.figures
    : defaultFigures(artifacts);
  const outDir = spec.outDir ?? spec.inputDir;
  fs.mkdirSync(outDir, { recursive: true });
  const files: string[] = [];
  for (const kind of figures) {
    const svg = renderFigure(kind, artifacts);
    const file = path.join(outDir, `fig_${kind}.svg`);
    fs.writeFileSync(file, svg);
    files.push(file);
  }
  return { files };
}
