/**
 * Minimal deterministic SVG line charts: no DOM, no canvas, just markup.
 */

export interface Series {
  x: ArrayLike<number>;
  y: ArrayLike<number>;
  label: string;
  color: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY?: boolean;
  equalAspect?: boolean;
  width?: number;
  height?: number;
  markers?: { x: number; y: number; shape: "star" | "arrow"; angle?: number }[];
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                        "#17becf", "#8c564b", "#e377c2"];

const MARGIN = { left: 64, right: 16, top: 36, bottom: 44 };

function finiteExtent(values: Iterable<number>): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  const step = 10 ** Math.floor(Math.log10(span / count));
  const err = span / count / step;
  const factor = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const nice = factor * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / nice) * nice; v <= hi + 1e-12 * span; v += nice) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function fmt(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) return value.toExponential(0);
  return String(Number(value.toPrecision(6)));
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(series: Series[], options: ChartOptions): string {
  const width = options.width ?? 800;
  const height = options.height ?? 500;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const logY = options.logY ?? false;

  const mapY = (v: number) => (logY ? Math.log10(Math.max(v, 1e-16)) : v);
  const allX: number[] = [];
  const allY: number[] = [];
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      if (Number.isFinite(s.x[i]) && Number.isFinite(s.y[i])) {
        allX.push(s.x[i]);
        allY.push(mapY(s.y[i]));
      }
    }
  }
  for (const m of options.markers ?? []) {
    allX.push(m.x);
    allY.push(mapY(m.y));
  }
  let [xLo, xHi] = finiteExtent(allX);
  let [yLo, yHi] = finiteExtent(allY);
  const padX = 0.04 * (xHi - xLo);
  const padY = 0.06 * (yHi - yLo);
  xLo -= padX; xHi += padX; yLo -= padY; yHi += padY;
  if (options.equalAspect) {
    const spanX = (xHi - xLo) / plotW;
    const spanY = (yHi - yLo) / plotH;
    const span = Math.max(spanX, spanY);
    const cx = (xLo + xHi) / 2;
    const cy = (yLo + yHi) / 2;
    xLo = cx - span * plotW / 2; xHi = cx + span * plotW / 2;
    yLo = cy - span * plotH / 2; yHi = cy + span * plotH / 2;
  }

  const px = (x: number) => MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) => MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="20" text-anchor="middle" font-family="sans-serif" font-size="15">${escapeXml(options.title)}</text>`);

  for (const tick of niceTicks(xLo + padX, xHi - padX)) {
    const x = px(tick);
    parts.push(`<line x1="${x.toFixed(2)}" y1="${MARGIN.top}" x2="${x.toFixed(2)}" y2="${MARGIN.top + plotH}" stroke="#dddddd"/>`);
    parts.push(`<text x="${x.toFixed(2)}" y="${MARGIN.top + plotH + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${fmt(tick)}</text>`);
  }
  for (const tick of niceTicks(yLo + padY, yHi - padY)) {
    const y = py(tick);
    const label = logY ? `1e${fmt(tick)}` : fmt(tick);
    parts.push(`<line x1="${MARGIN.left}" y1="${y.toFixed(2)}" x2="${MARGIN.left + plotW}" y2="${y.toFixed(2)}" stroke="#dddddd"/>`);
    parts.push(`<text x="${MARGIN.left - 6}" y="${(y + 4).toFixed(2)}" text-anchor="end" font-family="sans-serif" font-size="11">${label}</text>`);
  }
  parts.push(`<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`);
  parts.push(`<text x="${MARGIN.left + plotW / 2}" y="${height - 8}" text-anchor="middle" font-family="sans-serif" font-size="13">${escapeXml(options.xLabel)}</text>`);
  parts.push(`<text x="16" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 ${MARGIN.top + plotH / 2})">${escapeXml(options.yLabel)}</text>`);

  series.forEach((s) => {
    const points: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const yv = mapY(s.y[i]);
      if (Number.isFinite(s.x[i]) && Number.isFinite(yv)) {
        points.push(`${px(s.x[i]).toFixed(2)},${py(yv).toFixed(2)}`);
      }
    }
    if (points.length > 0) {
      parts.push(`<polyline points="${points.join(" ")}" fill="none" stroke="${s.color}" stroke-width="1.6"/>`);
    }
  });

  for (const m of options.markers ?? []) {
    const x = px(m.x);
    const y = py(mapY(m.y));
    if (m.shape === "star") {
      parts.push(`<path d="M ${x} ${y - 9} L ${x + 2.6} ${y - 2.8} L ${x + 9} ${y - 2.2} L ${x + 4.2} ${y + 2.4} L ${x + 5.6} ${y + 9} L ${x} ${y + 5} L ${x - 5.6} ${y + 9} L ${x - 4.2} ${y + 2.4} L ${x - 9} ${y - 2.2} L ${x - 2.6} ${y - 2.8} Z" fill="#000000"/>`);
    } else {
      const angle = m.angle ?? 0;
      const dx = 14 * Math.cos(angle);
      const dy = -14 * Math.sin(angle);
      const tip = { x: x + dx, y: y + dy };
      parts.push(`<line x1="${x.toFixed(2)}" y1="${y.toFixed(2)}" x2="${tip.x.toFixed(2)}" y2="${tip.y.toFixed(2)}" stroke="#555555" stroke-width="1.2"/>`);
      const left = Math.atan2(-dy, -dx) + 0.5;
      const right = Math.atan2(-dy, -dx) - 0.5;
      parts.push(`<line x1="${tip.x.toFixed(2)}" y1="${tip.y.toFixed(2)}" x2="${(tip.x + 6 * Math.cos(left)).toFixed(2)}" y2="${(tip.y + 6 * Math.sin(left)).toFixed(2)}" stroke="#555555" stroke-width="1.2"/>`);
      parts.push(`<line x1="${tip.x.toFixed(2)}" y1="${tip.y.toFixed(2)}" x2="${(tip.x + 6 * Math.cos(right)).toFixed(2)}" y2="${(tip.y + 6 * Math.sin(right)).toFixed(2)}" stroke="#555555" stroke-width="1.2"/>`);
    }
  }

  series.forEach((s, i) => {
    const y = MARGIN.top + 14 + 16 * i;
    const x = MARGIN.left + plotW - 150;
    parts.push(`<line x1="${x}" y1="${y - 4}" x2="${x + 22}" y2="${y - 4}" stroke="${s.color}" stroke-width="2"/>`);
    parts.push(`<text x="${x + 28}" y="${y}" font-family="sans-serif" font-size="11">${escapeXml(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n");
}
