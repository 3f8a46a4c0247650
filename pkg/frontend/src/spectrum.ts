/** Two-panel momentum-spectrum figure: log-scale slice through the
 * p_cm = 0 plane on top, zoomed log-contour of the (0, +p0) peak below. */
import { contours, scaleLinear } from "d3";

import { column, parseCsv, SchemaError } from "./csv.js";
import { axisBottom, axisLeft, document as svgDoc, el, fmt, polyline, Frame } from "./svg.js";

export const SPECTRUM_COLUMNS = ["p_cm", "p_rel", "density"];

const CONTOUR_COLORS = [
  "#440154", "#46327e", "#365c8d", "#277f8e", "#1fa187",
  "#4ac16d", "#a0da39", "#fde725", "#fff2a8",
];

interface Grid {
  cmAxis: number[];
  relAxis: number[];
  density: number[][]; // [i_cm][j_rel]
  p0: number;
}

function uniqueSorted(values: number[]): number[] {
  return Array.from(new Set(values)).sort((a, b) => a - b);
}

export function reshapeGrid(csvText: string): Grid {
  const table = parseCsv(csvText, SPECTRUM_COLUMNS, "spectrum");
  const cm = column(table, "p_cm");
  const rel = column(table, "p_rel");
  const dens = column(table, "density");
  const cmAxis = uniqueSorted(cm);
  const relAxis = uniqueSorted(rel);
  if (cmAxis.length * relAxis.length !== dens.length) {
    throw new SchemaError(
      `spectrum: rows (${dens.length}) do not form a ${cmAxis.length} x ${relAxis.length} grid`);
  }
  const density: number[][] = Array.from({ length: cmAxis.length },
    () => new Array<number>(relAxis.length).fill(0));
  const cmIndex = new Map(cmAxis.map((v, i) => [v, i]));
  const relIndex = new Map(relAxis.map((v, i) => [v, i]));
  let best = -Infinity;
  let p0 = relAxis[0];
  for (let k = 0; k < dens.length; k++) {
    const i = cmIndex.get(cm[k])!;
    const j = relIndex.get(rel[k])!;
    density[i][j] = dens[k];
    if (dens[k] > best) {
      best = dens[k];
      p0 = rel[k];
    }
  }
  if (!(p0 > 0)) {
    throw new SchemaError("spectrum: peak relative momentum is not positive");
  }
  return { cmAxis, relAxis, density, p0 };
}

export function renderSpectrum(csvText: string): string {
  const grid = reshapeGrid(csvText);
  const dmax = Math.max(...grid.density.map((row) => Math.max(...row)));
  const logFloor = -10;
  const log10 = (v: number) => Math.max(Math.log10(Math.max(v / dmax, 1e-300)), logFloor);

  const width = 900;
  const top: Frame = { x: 80, y: 40, width: width - 120, height: 260 };
  const bottom: Frame = { x: 80, y: 400, width: width - 120, height: 260 };

  // --- top: slice through p_cm = 0, log scale
  let iZero = 0;
  for (let i = 1; i < grid.cmAxis.length; i++) {
    if (Math.abs(grid.cmAxis[i]) < Math.abs(grid.cmAxis[iZero])) iZero = i;
  }
  const relOverP0 = grid.relAxis.map((v) => v / grid.p0);
  const sliceLog = grid.density[iZero].map(log10);
  const xTop = scaleLinear()
    .domain([relOverP0[0], relOverP0[relOverP0.length - 1]])
    .range([top.x, top.x + top.width]);
  const yTop = scaleLinear().domain([logFloor, 0]).range([top.y + top.height, top.y]);
  const topParts: string[] = [];
  topParts.push(el("path", {
    d: polyline(relOverP0, sliceLog, xTop, yTop),
    fill: "none", stroke: "#1f5fa8", "stroke-width": 1.4,
  }));
  topParts.push(axisBottom(xTop, top, "p_rel / p0"));
  topParts.push(axisLeft(yTop, top, "density / max (log)", 6,
    (v) => `1e${Math.round(v)}`));
  topParts.push(el("text", {
    x: top.x, y: top.y - 12, "font-size": 14, fill: "#111",
  }, "Momentum distribution in the p_cm = 0 plane (log scale)"));
  const panel1 = `<g class="panel log-slice" id="slice-panel">${topParts.join("")}</g>`;

  // --- bottom: zoomed contour of log density around (0, +p0)
  const relLo = 0.85 * grid.p0;
  const relHi = 1.15 * grid.p0;
  const jSel: number[] = [];
  grid.relAxis.forEach((v, j) => {
    if (v >= relLo && v <= relHi) jSel.push(j);
  });
  if (jSel.length < 8) {
    throw new SchemaError("spectrum: grid too coarse around the peak for a contour");
  }
  const nx = jSel.length;
  const ny = grid.cmAxis.length;
  const values = new Array<number>(nx * ny);
  for (let r = 0; r < ny; r++) {
    for (let c = 0; c < nx; c++) {
      values[r * nx + c] = log10(grid.density[r][jSel[c]]);
    }
  }
  const thresholds = [-8, -7, -6, -5, -4, -3, -2, -1, -0.3];
  const polygons = contours().size([nx, ny]).thresholds(thresholds)(values);

  const xBot = scaleLinear()
    .domain([grid.relAxis[jSel[0]] / grid.p0, grid.relAxis[jSel[nx - 1]] / grid.p0])
    .range([bottom.x, bottom.x + bottom.width]);
  const cmOverP0 = grid.cmAxis.map((v) => v / grid.p0);
  const yBot = scaleLinear()
    .domain([cmOverP0[0], cmOverP0[ny - 1]])
    .range([bottom.y + bottom.height, bottom.y]);
  const gx = scaleLinear().domain([0, nx - 1]).range([bottom.x, bottom.x + bottom.width]);
  const gy = scaleLinear().domain([0, ny - 1]).range([bottom.y + bottom.height, bottom.y]);

  const botParts: string[] = [];
  botParts.push(
    `<clipPath id="contour-clip">` +
    el("rect", { x: bottom.x, y: bottom.y, width: bottom.width, height: bottom.height }) +
    `</clipPath>`);
  const contourPaths: string[] = [];
  polygons.forEach((poly, level) => {
    const path: string[] = [];
    for (const polygon of poly.coordinates) {
      for (const ring of polygon) {
        ring.forEach(([px, py], k) => {
          path.push(`${k === 0 ? "M" : "L"}${fmt(gx(px - 0.5))},${fmt(gy(py - 0.5))}`);
        });
        path.push("Z");
      }
    }
    if (path.length > 0) {
      contourPaths.push(el("path", {
        d: path.join(""),
        fill: CONTOUR_COLORS[Math.min(level, CONTOUR_COLORS.length - 1)],
        "fill-opacity": 0.85, stroke: "#222", "stroke-width": 0.4,
        class: "contour", "data-level": `1e${poly.value}`,
      }));
    }
  });
  botParts.push(`<g clip-path="url(#contour-clip)">${contourPaths.join("")}</g>`);
  botParts.push(axisBottom(xBot, bottom, "p_rel / p0"));
  botParts.push(axisLeft(yBot, bottom, "p_cm / p0"));
  botParts.push(el("text", {
    x: bottom.x, y: bottom.y - 12, "font-size": 14, fill: "#111",
  }, "Zoom on the (0, +p0) peak (log-density contours, decade steps)"));
  const panel2 = `<g class="panel contour-panel" id="contour-panel">${botParts.join("")}</g>`;

  return svgDoc(width, 720, panel1 + panel2);
}
