/** Two-panel fringe figure: joint probability vs path offset on top,
 * visibility with the Bell threshold below. */
import { scaleLinear } from "d3";

import { column, parseCsv } from "./csv.js";
import { axisBottom, axisLeft, document as svgDoc, el, fmt, polyline, Frame } from "./svg.js";

const BELL_THRESHOLD = 1 / Math.SQRT2;

export const FRINGES_COLUMNS = ["delta_ell", "P_pp", "P_pm", "P_mp", "P_mm", "envelope"];

/** Indices of local maxima of `values` where `mask` holds. */
export function peakIndices(values: number[], mask: boolean[]): number[] {
  const peaks: number[] = [];
  for (let i = 1; i < values.length - 1; i++) {
    if (mask[i] && values[i] > values[i - 1] && values[i] >= values[i + 1]) {
      peaks.push(i);
    }
  }
  return peaks;
}

export function renderFringes(csvText: string): string {
  const table = parseCsv(csvText, FRINGES_COLUMNS, "fringes");
  const deltaUm = column(table, "delta_ell").map((v) => v * 1e6);
  const ppp = column(table, "P_pp");
  const envelope = column(table, "envelope");

  const width = 900;
  const top: Frame = { x: 70, y: 40, width: width - 100, height: 240 };
  const bottom: Frame = { x: 70, y: 360, width: width - 100, height: 220 };
  const xscale = scaleLinear()
    .domain([Math.min(...deltaUm), Math.max(...deltaUm)])
    .range([top.x, top.x + top.width]);

  // --- top panel: P(+1,+1) with its +-|F|/4 envelopes around 1/4
  const yTop = scaleLinear().domain([0, 0.5]).range([top.y + top.height, top.y]);
  const parts: string[] = [];
  parts.push(el("path", {
    d: polyline(deltaUm, envelope.map((e) => 0.25 * (1 + e)), xscale, yTop),
    fill: "none", stroke: "#999", "stroke-width": 1, "stroke-dasharray": "5 3",
  }));
  parts.push(el("path", {
    d: polyline(deltaUm, envelope.map((e) => 0.25 * (1 - e)), xscale, yTop),
    fill: "none", stroke: "#999", "stroke-width": 1, "stroke-dasharray": "5 3",
  }));
  parts.push(el("path", {
    d: polyline(deltaUm, ppp, xscale, yTop),
    fill: "none", stroke: "#1f5fa8", "stroke-width": 1.4, class: "fringe-line",
  }));
  // mark fringe maxima inside the Bell-usable region
  const usable = envelope.map((e) => e > BELL_THRESHOLD);
  for (const i of peakIndices(ppp, usable)) {
    parts.push(el("circle", {
      cx: xscale(deltaUm[i]), cy: yTop(ppp[i]), r: 2.6,
      fill: "#d26417", class: "fringe-peak",
    }));
  }
  parts.push(axisBottom(xscale, top, "path offset Δℓ (µm)"));
  parts.push(axisLeft(yTop, top, "P(+1,+1)"));
  parts.push(el("text", {
    x: top.x, y: top.y - 12, "font-size": 14, fill: "#111",
  }, "Joint detection probability"));
  const panel1 = `<g class="panel" id="fringe-panel">${parts.join("")}</g>`;

  // --- bottom panel: visibility with the dashed Bell threshold
  const yBot = scaleLinear().domain([0, 1]).range([bottom.y + bottom.height, bottom.y]);
  const parts2: string[] = [];
  parts2.push(el("path", {
    d: polyline(deltaUm, envelope, xscale, yBot),
    fill: "none", stroke: "#a02020", "stroke-width": 1.6, class: "visibility-line",
  }));
  parts2.push(el("line", {
    x1: bottom.x, x2: bottom.x + bottom.width,
    y1: yBot(BELL_THRESHOLD), y2: yBot(BELL_THRESHOLD),
    stroke: "#333", "stroke-width": 1.2, "stroke-dasharray": "7 4",
    class: "bell-threshold",
  }));
  parts2.push(el("text", {
    x: bottom.x + bottom.width - 4, y: yBot(BELL_THRESHOLD) - 6,
    "text-anchor": "end", "font-size": 12, fill: "#333",
  }, `Bell threshold 1/√2 = ${fmt(BELL_THRESHOLD).slice(0, 5)}`));
  parts2.push(axisBottom(xscale, bottom, "path offset Δℓ (µm)"));
  parts2.push(axisLeft(yBot, bottom, "visibility |F|"));
  parts2.push(el("text", {
    x: bottom.x, y: bottom.y - 12, "font-size": 14, fill: "#111",
  }, "Fringe visibility"));
  const panel2 = `<g class="panel" id="visibility-panel">${parts2.join("")}</g>`;

  return svgDoc(width, 640, panel1 + panel2);
}
