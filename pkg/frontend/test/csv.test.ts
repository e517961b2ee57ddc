import { describe, expect, it } from "vitest";

import { SchemaError, column, lpColumns, parseSeries } from "../src/csv.js";

const GOOD = [
  "t,mass_u,mass_v,mass_w,linf_u,entropy,dirichlet_z,energy_F,fisher_u,lap_z_sq,grad_z_l4,taxis_l1,w1r_v,w1r_w,lp_u_1.2,lp_u_2",
  "0.1,1.0,0.5,0.25,3.0,0.2,0.1,0.3,5.0,2.0,1.0,0.4,1.1,1.2,1.3,1.4",
  "0.2,1.0,0.5,0.25,2.0,0.1,0.05,0.15,4.0,1.0,0.5,0.3,1.0,1.1,1.2,1.3",
].join("\n");

describe("parseSeries", () => {
  it("parses the documented schema", () => {
    const s = parseSeries(GOOD);
    expect(column(s, "t")).toEqual([0.1, 0.2]);
    expect(column(s, "energy_F")).toEqual([0.3, 0.15]);
    expect(lpColumns(s)).toEqual([
      { p: 1.2, name: "lp_u_1.2" },
      { p: 2, name: "lp_u_2" },
    ]);
  });

  it("names missing columns explicitly", () => {
    const broken = GOOD.replace("energy_F", "energy");
    expect(() => parseSeries(broken)).toThrowError(/energy_F/);
  });

  it("rejects ragged rows and non-numeric fields", () => {
    expect(() => parseSeries(GOOD + "\n1,2,3")).toThrowError(SchemaError);
    expect(() => parseSeries(GOOD.replace("0.15", "abc"))).toThrowError(/abc/);
  });

  it("rejects unknown column lookups", () => {
    const s = parseSeries(GOOD);
    expect(() => column(s, "nope")).toThrowError(/nope/);
  });
});
