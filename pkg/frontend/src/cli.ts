#!/usr/bin/env node
/**
 * plots --kind <trajectory_xy|inputs|norms|lyapunov> --csv a.csv [b.csv ...]
 *       --out figure.svg [--labels a,b] [--assert-terminal-input TOL]
 *
 * Exit codes: 0 rendered (and all assertions held), 1 assertion failed,
 * 2 bad usage or schema mismatch.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import { parseTrajectoryCsv, SchemaMismatch } from "./csv.js";
import { NamedTrajectory, PLOT_KINDS, PlotKind, checkTerminalInputs,
         renderPlot } from "./plots.js";

interface Args {
  kind: PlotKind;
  csv: string[];
  out: string;
  labels: string[];
  assertTerminal?: number;
}

function usage(message?: string): never {
  if (message) console.error(`error: ${message}`);
  console.error("usage: plots --kind <kind> --csv <file...> --out <file.svg> "
    + "[--labels a,b] [--assert-terminal-input TOL]");
  console.error(`kinds: ${PLOT_KINDS.join(", ")}`);
  process.exit(2);
}

function parseArgs(argv: string[]): Args {
  let kind: string | undefined;
  let out: string | undefined;
  const csv: string[] = [];
  let labels: string[] = [];
  let assertTerminal: number | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    switch (arg) {
      case "--kind":
        kind = argv[++i];
        break;
      case "--csv":
        while (i + 1 < argv.length && !argv[i + 1].startsWith("--")) {
          csv.push(argv[++i]);
        }
        break;
      case "--out":
        out = argv[++i];
        break;
      case "--labels":
        labels = (argv[++i] ?? "").split(",").filter((s) => s.length > 0);
        break;
      case "--assert-terminal-input":
        assertTerminal = Number(argv[++i]);
        if (!Number.isFinite(assertTerminal)) usage("bad tolerance");
        break;
      default:
        usage(`unknown argument ${arg}`);
    }
  }
  if (!kind || !(PLOT_KINDS as readonly string[]).includes(kind)) {
    usage(`--kind must be one of ${PLOT_KINDS.join(", ")}`);
  }
  if (csv.length === 0) usage("at least one --csv file is required");
  if (!out) usage("--out is required");
  return { kind: kind as PlotKind, csv, out, labels, assertTerminal };
}

export function main(argv: string[]): number {
  const args = parseArgs(argv);
  let inputs: NamedTrajectory[];
  try {
    inputs = args.csv.map((path, i) => ({
      label: args.labels[i] ?? basename(path).replace(/\.csv$/, ""),
      data: parseTrajectoryCsv(readFileSync(path, "utf8"), path),
    }));
  } catch (err) {
    if (err instanceof SchemaMismatch) {
      console.error(`schema mismatch: ${err.message}`);
      process.exit(2);
    }
    console.error(String(err));
    process.exit(2);
  }

  const svg = renderPlot(args.kind, inputs);
  writeFileSync(args.out, svg);
  console.log(`wrote ${args.out} (${args.kind}, ${inputs.length} file(s))`);

  if (args.assertTerminal !== undefined) {
    const checks = checkTerminalInputs(inputs, args.assertTerminal);
    let failed = false;
    for (const check of checks) {
      const verdict = check.ok ? "ok" : "FAIL";
      console.log(`  terminal inputs ${check.label}: ${check.level.toExponential(2)} `
        + `< ${check.tolerance} ... ${verdict}`);
      failed ||= !check.ok;
    }
    if (failed) return 1;
  }
  return 0;
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(basename(process.argv[1]));
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
