/** Tiny DOM-free SVG assembly on top of d3 scales/shapes. */
import { ScaleLinear } from "d3";

export interface Frame {
  x: number;
  y: number;
  width: number;
  height: number;
}

const XML_ESCAPES: Record<string, string> = {
  "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;",
};

export function esc(text: string): string {
  return text.replace(/[&<>"]/g, (c) => XML_ESCAPES[c]);
}

export function el(tag: string, attrs: Record<string, string | number>, body = ""): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  return body === "" && tag !== "text"
    ? `<${tag} ${a}/>`
    : `<${tag} ${a}>${body}</${tag}>`;
}

export function fmt(v: number): string {
  return Number(v.toFixed(3)).toString();
}

export function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (v === 0) return "0";
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return Number(v.toPrecision(4)).toString();
}

/** Bottom axis: baseline, ticks, labels, axis title. */
export function axisBottom(scale: ScaleLinear<number, number>, frame: Frame,
                           title: string, tickCount = 7): string {
  const y0 = frame.y + frame.height;
  const parts = [el("line", {
    x1: frame.x, x2: frame.x + frame.width, y1: y0, y2: y0,
    stroke: "#333", "stroke-width": 1,
  })];
  for (const t of scale.ticks(tickCount)) {
    const x = scale(t);
    parts.push(el("line", { x1: x, x2: x, y1: y0, y2: y0 + 5, stroke: "#333", "stroke-width": 1 }));
    parts.push(el("text", {
      x, y: y0 + 18, "text-anchor": "middle", "font-size": 11, fill: "#222",
    }, esc(tickLabel(t))));
  }
  parts.push(el("text", {
    x: frame.x + frame.width / 2, y: y0 + 36, "text-anchor": "middle",
    "font-size": 13, fill: "#111",
  }, esc(title)));
  return `<g class="axis axis-x">${parts.join("")}</g>`;
}

/** Left axis with title rotated along the side. */
export function axisLeft(scale: ScaleLinear<number, number>, frame: Frame,
                         title: string, tickCount = 6,
                         labeler: (v: number) => string = tickLabel): string {
  const parts = [el("line", {
    x1: frame.x, x2: frame.x, y1: frame.y, y2: frame.y + frame.height,
    stroke: "#333", "stroke-width": 1,
  })];
  for (const t of scale.ticks(tickCount)) {
    const y = scale(t);
    parts.push(el("line", { x1: frame.x - 5, x2: frame.x, y1: y, y2: y, stroke: "#333", "stroke-width": 1 }));
    parts.push(el("text", {
      x: frame.x - 8, y: y + 4, "text-anchor": "end", "font-size": 11, fill: "#222",
    }, esc(labeler(t))));
  }
  parts.push(el("text", {
    x: frame.x - 42, y: frame.y + frame.height / 2,
    transform: `rotate(-90 ${fmt(frame.x - 42)} ${fmt(frame.y + frame.height / 2)})`,
    "text-anchor": "middle", "font-size": 13, fill: "#111",
  }, esc(title)));
  return `<g class="axis axis-y">${parts.join("")}</g>`;
}

export function polyline(xs: number[], ys: number[],
                         xscale: ScaleLinear<number, number>,
                         yscale: ScaleLinear<number, number>): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    pts.push(`${i === 0 ? "M" : "L"}${fmt(xscale(xs[i]))},${fmt(yscale(ys[i]))}`);
  }
  return pts.join("");
}

export function document(width: number, height: number, body: string): string {
  return `<?xml version="1.0" encoding="UTF-8"?>\n` +
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">` +
    `<rect width="${width}" height="${height}" fill="white"/>${body}</svg>\n`;
}
