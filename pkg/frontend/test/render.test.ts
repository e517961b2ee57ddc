import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it } from "vitest";

import { ArtifactError, load } from "../src/artifacts.js";
import { render } from "../src/render.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const FIXTURES = path.join(here, "fixtures");
const tmp = fs.mkdtempSync(path.join(os.tmpdir(), "arks-report-"));

afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

describe("artifact loading", () => {
  it("classifies run, sweep, and family directories", () => {
    expect(load(path.join(FIXTURES, "run")).kind).toBe("run");
    expect(load(path.join(FIXTURES, "sweep")).kind).toBe("sweep");
    expect(load(path.join(FIXTURES, "family")).kind).toBe("family");
  });

  it("rejects a directory without a manifest", () => {
    const empty = path.join(tmp, "empty");
    fs.mkdirSync(empty, { recursive: true });
    expect(() => load(empty)).toThrowError(/manifest/);
  });
});

describe("render", () => {
  it("renders run figures with fitted and claimed guides", () => {
    const out = render({
      inputDir: path.join(FIXTURES, "run"),
      figures: ["decay", "report"],
      outDir: path.join(tmp, "run-figs"),
    });
    expect(out.files.length).toBe(2);
    const decay = fs.readFileSync(out.files[0], "utf-8");
    expect(decay).toContain("fitted t^");
    expect(decay).toContain("claimed t^");
    expect(decay).toContain("<polyline");
    const report = fs.readFileSync(out.files[1], "utf-8");
    expect(report).toContain("verdicts");
  });

  it("renders the sweep phase diagram with a legend", () => {
    const out = render({
      inputDir: path.join(FIXTURES, "sweep"),
      outDir: path.join(tmp, "sweep-figs"),
    });
    const svg = fs.readFileSync(out.files[0], "utf-8");
    expect(svg).toContain("blowup-detected");
    expect(svg).toContain("completed");
    expect(svg).toContain("chi=");
  });

  it("renders the family overlay with one curve per eps", () => {
    const out = render({
      inputDir: path.join(FIXTURES, "family"),
      outDir: path.join(tmp, "family-figs"),
    });
    const svg = fs.readFileSync(out.files[0], "utf-8");
    expect(svg.match(/<polyline/g)?.length).toBe(2);
    expect(svg).toContain("eps=0.01");
  });

  it("re-renders byte-identically", () => {
    const a = render({ inputDir: path.join(FIXTURES, "run"), outDir: path.join(tmp, "a") });
    const b = render({ inputDir: path.join(FIXTURES, "run"), outDir: path.join(tmp, "b") });
    for (let i = 0; i < a.files.length; i++) {
      expect(fs.readFileSync(a.files[i])).toEqual(fs.readFileSync(b.files[i]));
    }
  });

  it("rejects figure/artifact mismatches and non-svg formats", () => {
    expect(() =>
      render({ inputDir: path.join(FIXTURES, "run"), figures: ["phase"] }),
    ).toThrowError(ArtifactError);
    expect(() =>
      render({ inputDir: path.join(FIXTURES, "run"), format: "png" }),
    ).toThrowError(/raster|png/);
  });
});
