/**
 * Strict parser for the simulator's trajectory CSV format.
 *
 * The header is fixed to thirteen named columns; every data row must have
 * exactly that many cells, numeric except that optional channels may be
 * empty (parsed as NaN). Time must be strictly increasing.
 */

export const CSV_HEADER = [
  "t", "rho", "delta", "gamma", "x", "y", "theta", "v", "omega",
  "V", "l_running", "eps1_hat", "eps2_hat",
] as const;

export type ChannelName = (typeof CSV_HEADER)[number];

export type Trajectory = Record<ChannelName, Float64Array>;

export class SchemaMismatch extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaMismatch";
  }
}

export function parseTrajectoryCsv(text: string, source = "<csv>"): Trajectory {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaMismatch(`${source}: empty file`);
  }
  const header = lines[0].split(",");
  if (header.length !== CSV_HEADER.length
      || header.some((name, i) => name !== CSV_HEADER[i])) {
    throw new SchemaMismatch(`${source}: unexpected header [${lines[0]}]`);
  }
  const rows = lines.length - 1;
  if (rows === 0) {
    throw new SchemaMismatch(`${source}: no data rows`);
  }
  const columns = CSV_HEADER.map(() => new Float64Array(rows));
  for (let r = 0; r < rows; r++) {
    const cells = lines[r + 1].split(",");
    if (cells.length !== CSV_HEADER.length) {
      throw new SchemaMismatch(
        `${source}: row ${r + 2} has ${cells.length} cells, expected ${CSV_HEADER.length}`);
    }
    for (let c = 0; c < cells.length; c++) {
      if (cells[c] === "") {
        columns[c][r] = NaN;
        continue;
      }
      const value = Number(cells[c]);
      if (!Number.isFinite(value)) {
        throw new SchemaMismatch(`${source}: non-numeric cell '${cells[c]}' at row ${r + 2}`);
      }
      columns[c][r] = value;
    }
  }
  const t = columns[0];
  for (let r = 1; r < rows; r++) {
    if (!(t[r] > t[r - 1])) {
      throw new SchemaMismatch(`${source}: time not strictly increasing at row ${r + 2}`);
    }
  }
  const out = {} as Trajectory;
  CSV_HEADER.forEach((name, i) => {
    out[name] = columns[i];
  });
  return out;
}

export function stateNorm(traj: Trajectory): Float64Array {
  const n = traj.t.length;
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = Math.hypot(traj.rho[i], traj.delta[i], traj.gamma[i]);
  }
  return out;
}

/** Largest |v| + |omega| over the trailing fraction of the horizon. */
export function terminalInputLevel(traj: Trajectory, fraction = 0.01): number {
  const tEnd = traj.t[traj.t.length - 1];
  const cutoff = tEnd - fraction * tEnd;
  let worst = 0;
  for (let i = 0; i < traj.t.length; i++) {
    if (traj.t[i] >= cutoff) {
      worst = Math.max(worst, Math.abs(traj.v[i]) + Math.abs(traj.omega[i]));
    }
  }
  return worst;
}
