/** Minimal SVG assembly: linear/log scales, axes with ticks, marks. */

export type ScaleKind = "linear" | "log10";

export interface Scale {
  kind: ScaleKind;
  domain: [number, number];
  range: [number, number];
  toPx(v: number): number;
}

export function makeScale(
  kind: ScaleKind,
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = kind === "log10"
    ? [Math.log10(domain[0]), Math.log10(domain[1])]
    : domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    kind,
    domain,
    range,
    toPx(v: number): number {
      const t = kind === "log10" ? Math.log10(v) : v;
      return r0 + ((t - d0) / span) * (r1 - r0);
    },
  };
}

/** Pad a [min, max] interval by a fraction (multiplicatively for log axes). */
export function padDomain(
  kind: ScaleKind,
  lo: number,
  hi: number,
  frac = 0.06,
): [number, number] {
  if (kind === "log10") {
    const f = Math.pow(hi / lo || 10, frac);
    return [lo / f, hi * f];
  }
  const pad = (hi - lo || 1) * frac;
  return [lo - pad, hi + pad];
}

export function ticks(scale: Scale, count = 6): number[] {
  const [lo, hi] = scale.domain;
  if (scale.kind === "log10") {
    const out: number[] = [];
    const e0 = Math.ceil(Math.log10(lo) - 1e-9);
    const e1 = Math.floor(Math.log10(hi) + 1e-9);
    for (let e = e0; e <= e1; e++) out.push(Math.pow(10, e));
    return out.length >= 2 ? out : [lo, hi];
  }
  const step = niceStep((hi - lo) / Math.max(count - 1, 1));
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

function niceStep(rough: number): number {
  const mag = Math.pow(10, Math.floor(Math.log10(Math.abs(rough) || 1)));
  const r = rough / mag;
  const nice = r >= 5 ? 10 : r >= 2 ? 5 : r >= 1 ? 2 : 1;
  return nice * mag;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / Math.pow(10, e);
    return `${Number(m.toFixed(2))}e${e}`;
  }
  return `${Number(v.toPrecision(6))}`;
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function svgDocument(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"`,
    ` viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif"`,
    ` font-size="11">\n`,
    `<rect width="${width}" height="${height}" fill="white"/>\n`,
    body,
    `</svg>\n`,
  ].join("");
}

export function axes(
  x: Scale,
  y: Scale,
  box: { left: number; right: number; top: number; bottom: number },
  xLabel: string,
  yLabel: string,
): string {
  const parts: string[] = [];
  parts.push(
    `<rect x="${box.left}" y="${box.top}" width="${box.right - box.left}"` +
    ` height="${box.bottom - box.top}" fill="none" stroke="black"/>\n`,
  );
  for (const t of ticks(x)) {
    const px = x.toPx(t);
    if (px < box.left - 0.5 || px > box.right + 0.5) continue;
    parts.push(`<line x1="${px}" y1="${box.bottom}" x2="${px}" y2="${box.bottom - 4}" stroke="black"/>\n`);
    parts.push(`<text x="${px}" y="${box.bottom + 14}" text-anchor="middle">${esc(formatTick(t))}</text>\n`);
  }
  for (const t of ticks(y)) {
    const py = y.toPx(t);
    if (py > box.bottom + 0.5 || py < box.top - 0.5) continue;
    parts.push(`<line x1="${box.left}" y1="${py}" x2="${box.left + 4}" y2="${py}" stroke="black"/>\n`);
    parts.push(`<text x="${box.left - 6}" y="${py + 3.5}" text-anchor="end">${esc(formatTick(t))}</text>\n`);
  }
  const cx = (box.left + box.right) / 2;
  const cy = (box.top + box.bottom) / 2;
  parts.push(`<text x="${cx}" y="${box.bottom + 30}" text-anchor="middle">${esc(xLabel)}</text>\n`);
  parts.push(
    `<text x="${box.left - 38}" y="${cy}" text-anchor="middle"` +
    ` transform="rotate(-90 ${box.left - 38} ${cy})">${esc(yLabel)}</text>\n`,
  );
  return parts.join("");
}
