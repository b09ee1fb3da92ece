import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parseTrajectoryCsv } from "../src/csv.js";
import { PLOT_KINDS, checkTerminalInputs, renderPlot } from "../src/plots.js";
import { main } from "../src/cli.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function load(name: string) {
  return {
    label: name.replace(/\.csv$/, ""),
    data: parseTrajectoryCsv(readFileSync(join(FIXTURES, name), "utf8"), name),
  };
}

describe("renderPlot", () => {
  it.each([...PLOT_KINDS])("renders %s from the bundled fixtures", (kind) => {
    const svg = renderPlot(kind, [load("fig2_bidirectional.csv"),
                                  load("fig9_pt_T2.csv")]);
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.length).toBeGreaterThan(2000);
    expect(svg).toContain("<polyline");
  });

  it("marks the target on the plane plot", () => {
    const svg = renderPlot("trajectory_xy", [load("fig2_bidirectional.csv")]);
    expect(svg).toContain("<path d=");   // the target star
    expect(svg.match(/<line/g)!.length).toBeGreaterThan(10);  // heading arrows
  });

  it("is deterministic", () => {
    const a = renderPlot("norms", [load("fig9_pt_T2.csv")]);
    const b = renderPlot("norms", [load("fig9_pt_T2.csv")]);
    expect(a).toBe(b);
  });
});

describe("terminal input assertion", () => {
  it("passes for the prescribed-time run and fails for the plain run", () => {
    const checks = checkTerminalInputs([load("fig9_pt_T2.csv"),
                                        load("fig2_bidirectional.csv")], 1e-3);
    expect(checks[0].ok).toBe(true);
    expect(checks[1].ok).toBe(false);
  });
});

describe("cli", () => {
  it("renders all four kinds end to end", () => {
    const out = mkdtempSync(join(tmpdir(), "plots-"));
    for (const kind of PLOT_KINDS) {
      const file = join(out, `${kind}.svg`);
      const code = main(["--kind", kind, "--csv",
                         join(FIXTURES, "fig2_bidirectional.csv"),
                         join(FIXTURES, "fig11_adaptive_mu05.csv"),
                         "--out", file, "--labels", "fig2,adaptive"]);
      expect(code).toBe(0);
      expect(existsSync(file)).toBe(true);
      expect(readFileSync(file, "utf8").length).toBeGreaterThan(2000);
    }
  });

  it("enforces the terminal-input tolerance", () => {
    const out = mkdtempSync(join(tmpdir(), "plots-"));
    const okCode = main(["--kind", "inputs", "--csv", join(FIXTURES, "fig9_pt_T2.csv"),
                         "--out", join(out, "pt.svg"),
                         "--assert-terminal-input", "1e-3"]);
    expect(okCode).toBe(0);
    const badCode = main(["--kind", "inputs", "--csv",
                          join(FIXTURES, "fig2_bidirectional.csv"),
                          "--out", join(out, "fig2.svg"),
                          "--assert-terminal-input", "1e-3"]);
    expect(badCode).toBe(1);
  });
});
