/**
 * Tiny deterministic SVG builder: fixed styling, no timestamps, stable
 * number formatting, so identical inputs render byte-identical files.
 */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`cannot format ${x}`);
  if (x === 0) return "0";
  const out = x.toPrecision(6);
  return out.includes(".") ? out.replace(/\.?0+($|e)/, "$1") : out;
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (hi <= lo) return [lo];
  const rawStep = (hi - lo) / count;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10];
  const unit = candidates.find((c) => c * power >= rawStep) ?? 10;
  const step = unit * power;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function line(x1: number, y1: number, x2: number, y2: number,
                     stroke: string, width = 1): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
    `stroke="${stroke}" stroke-width="${width}"/>`;
}

export function rect(x: number, y: number, w: number, h: number, fill: string): string {
  if (h <= 0 || w <= 0) return "";
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`;
}

export function text(x: number, y: number, content: string, options: {
  size?: number; anchor?: string; rotate?: boolean;
} = {}): string {
  const size = options.size ?? 11;
  const anchor = options.anchor ?? "middle";
  const transform = options.rotate ? ` transform="rotate(-90 ${fmt(x)} ${fmt(y)})"` : "";
  return `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
    `font-family="Helvetica, Arial, sans-serif" text-anchor="${anchor}"${transform}>` +
    `${content}</text>`;
}

export function polyline(points: Array<[number, number]>, stroke: string,
                         width = 1.5): string {
  const coords = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline points="${coords}" fill="none" stroke="${stroke}" ` +
    `stroke-width="${width}"/>`;
}

export function band(upper: Array<[number, number]>, lower: Array<[number, number]>,
                     fill: string): string {
  const ring = [...upper, ...lower.slice().reverse()];
  const coords = ring.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polygon points="${coords}" fill="${fill}" stroke="none"/>`;
}

export function document(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
