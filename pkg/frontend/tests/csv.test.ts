import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { CSV_HEADER, SchemaMismatch, parseTrajectoryCsv, stateNorm,
         terminalInputLevel } from "../src/csv.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

describe("parseTrajectoryCsv", () => {
  it("parses a real trajectory file", () => {
    const traj = parseTrajectoryCsv(fixture("fig2_bidirectional.csv"));
    expect(traj.t.length).toBeGreaterThan(500);
    expect(traj.t[0]).toBe(0);
    expect(traj.rho[0]).toBe(1);
    for (let i = 1; i < traj.t.length; i++) {
      expect(traj.t[i]).toBeGreaterThan(traj.t[i - 1]);
    }
  });

  it("keeps empty optional channels as NaN", () => {
    const traj = parseTrajectoryCsv(fixture("fig2_bidirectional.csv"));
    expect(Number.isNaN(traj.eps1_hat[0])).toBe(true);
    const adaptive = parseTrajectoryCsv(fixture("fig11_adaptive_mu05.csv"));
    expect(adaptive.eps1_hat[0]).toBe(0);
    expect(adaptive.eps1_hat[adaptive.t.length - 1]).toBeGreaterThan(1.0);
  });

  it("rejects empty input", () => {
    expect(() => parseTrajectoryCsv("")).toThrow(SchemaMismatch);
  });

  it("rejects a header-only file", () => {
    expect(() => parseTrajectoryCsv(CSV_HEADER.join(",") + "\n")).toThrow(SchemaMismatch);
  });

  it("rejects a wrong header", () => {
    expect(() => parseTrajectoryCsv("a,b,c\n1,2,3\n")).toThrow(SchemaMismatch);
  });

  it("rejects ragged rows", () => {
    const text = CSV_HEADER.join(",") + "\n" + "1,2,3\n";
    expect(() => parseTrajectoryCsv(text)).toThrow(/row 2/);
  });

  it("rejects non-increasing time", () => {
    const row = new Array(CSV_HEADER.length).fill("1").join(",");
    const text = [CSV_HEADER.join(","), row, row].join("\n") + "\n";
    expect(() => parseTrajectoryCsv(text)).toThrow(/strictly increasing/);
  });
});

describe("derived channels", () => {
  it("computes the state norm", () => {
    const traj = parseTrajectoryCsv(fixture("fig2_bidirectional.csv"));
    const norm = stateNorm(traj);
    expect(norm[0]).toBeCloseTo(Math.hypot(1, traj.delta[0], traj.gamma[0]), 12);
    expect(norm[norm.length - 1]).toBeLessThan(0.5 * norm[0]);
  });

  it("measures terminal input level over the last percent", () => {
    const pt = parseTrajectoryCsv(fixture("fig9_pt_T2.csv"));
    expect(terminalInputLevel(pt)).toBeLessThan(1e-3);
    const fig2 = parseTrajectoryCsv(fixture("fig2_bidirectional.csv"));
    // the plain law is still steering at the end of the short fixture window
    expect(terminalInputLevel(fig2)).toBeGreaterThan(1e-3);
  });
});
