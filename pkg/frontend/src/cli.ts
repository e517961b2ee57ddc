/** CLI: render <run-dir> [--figs decay,phase,family,report] [--format svg] [--out dir] */

import { ArtifactError } from "./artifacts.js";
import { SchemaError } from "./csv.js";
import { render } from "./render.js";

function usage(): string {
  return [
    "usage: render <run-dir> [--figs decay,phase,family,report] [--format svg] [--out <dir>]",
    "",
    "Figures default to the artifact type: run -> decay,report; sweep -> phase;",
    "eps-family -> family.  Output is deterministic SVG.",
  ].join("\n");
}

export function main(argv: string[]): number {
  if (argv.length === 0 || argv[0] === "--help" || argv[0] === "-h") {
    console.log(usage());
    return argv.length === 0 ? 1 : 0;
  }
  if (argv[0] !== "render") {
    console.error(`unknown command ${JSON.stringify(argv[0])}\n${usage()}`);
    return 1;
  }
  const rest = argv.slice(1);
  let inputDir: string | undefined;
  let figures: string[] | undefined;
  let format: string | undefined;
  let outDir: string | undefined;
  for (let i = 0; i < rest.length; i++) {
    const arg = rest[i];
    if (arg === "--figs") {
      figures = (rest[++i] ?? "").split(",").filter((s) => s.length > 0);
    } else if (arg === "--format") {
      format = rest[++i];
    } else if (arg === "--out") {
      outDir = rest[++i];
    } else if (arg.startsWith("--")) {
      console.error(`unknown flag ${arg}\n${usage()}`);
      return 1;
    } else if (inputDir === undefined) {
      inputDir = arg;
    } else {
      console.error(`unexpected argument ${arg}\n${usage()}`);
      return 1;
    }
  }
  if (!inputDir) {
    console.error(usage());
    return 1;
  }
  try {
    const out = render({ inputDir, figures, format, outDir });
    for (const file of out.files) {
      console.log(file);
    }
    return 0;
  } catch (err) {
    if (err instanceof ArtifactError || err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
