/**
 * The four figure kinds built from trajectory CSV channels.
 *
 * Every render works on the parsed arrays, so the numeric assertions the
 * command line offers (e.g. terminal input levels) double as data checks
 * rather than pixel comparisons.
 */

import { PALETTE, Series, renderChart } from "./svg.js";
import { SchemaMismatch, Trajectory, stateNorm, terminalInputLevel } from "./csv.js";

export const PLOT_KINDS = ["trajectory_xy", "inputs", "norms", "lyapunov"] as const;
export type PlotKind = (typeof PLOT_KINDS)[number];

export interface NamedTrajectory {
  label: string;
  data: Trajectory;
}

function color(i: number): string {
  return PALETTE[i % PALETTE.length];
}

function headingArrows(traj: Trajectory, count = 6) {
  const n = traj.t.length;
  const markers = [];
  for (let k = 0; k < count; k++) {
    const i = Math.min(n - 1, Math.round((k * (n - 1)) / count));
    markers.push({ x: traj.x[i], y: traj.y[i], shape: "arrow" as const,
                   angle: traj.theta[i] });
  }
  return markers;
}

export function renderPlot(kind: PlotKind, inputs: NamedTrajectory[]): string {
  if (inputs.length === 0) {
    throw new SchemaMismatch("no trajectories to plot");
  }
  switch (kind) {
    case "trajectory_xy": {
      const series: Series[] = inputs.map((tr, i) => ({
        x: tr.data.x, y: tr.data.y, label: tr.label, color: color(i),
      }));
      const markers = [{ x: 0, y: 0, shape: "star" as const },
                       ...inputs.flatMap((tr) => headingArrows(tr.data))];
      return renderChart(series, {
        title: "Parking trajectories", xLabel: "x", yLabel: "y",
        equalAspect: true, markers,
      });
    }
    case "inputs": {
      const series: Series[] = [];
      inputs.forEach((tr, i) => {
        series.push({ x: tr.data.t, y: tr.data.v,
                      label: `v ${tr.label}`, color: color(2 * i) });
        series.push({ x: tr.data.t, y: tr.data.omega,
                      label: `omega ${tr.label}`, color: color(2 * i + 1) });
      });
      return renderChart(series, {
        title: "Control inputs", xLabel: "t", yLabel: "input",
      });
    }
    case "norms": {
      const series: Series[] = inputs.map((tr, i) => ({
        x: tr.data.t, y: stateNorm(tr.data), label: tr.label, color: color(i),
      }));
      return renderChart(series, {
        title: "State norm decay", xLabel: "t", yLabel: "|state|", logY: true,
      });
    }
    case "lyapunov": {
      const series: Series[] = inputs.map((tr, i) => ({
        x: tr.data.t, y: tr.data.V, label: tr.label, color: color(i),
      }));
      if (series.every((s) => Array.from(s.y).every((v) => Number.isNaN(v)))) {
        throw new SchemaMismatch("no certificate-value channel in any input");
      }
      return renderChart(series, {
        title: "Certificate decay", xLabel: "t", yLabel: "V", logY: true,
      });
    }
  }
}

export interface TerminalCheck {
  label: string;
  level: number;
  tolerance: number;
  ok: boolean;
}

export function checkTerminalInputs(inputs: NamedTrajectory[],
                                    tolerance: number): TerminalCheck[] {
  return inputs.map((tr) => {
    const level = terminalInputLevel(tr.data);
    return { label: tr.label, level, tolerance, ok: level < tolerance };
  });
}
