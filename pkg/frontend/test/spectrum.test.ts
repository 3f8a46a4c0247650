import { describe, expect, it } from "vitest";

import { SchemaError } from "../src/csv.js";
import { renderSpectrum, reshapeGrid, SPECTRUM_COLUMNS } from "../src/spectrum.js";

/** Synthetic grid: Gaussian peak at (0, p0) in the documented layout. */
function syntheticSpectrumCsv(ncm = 21, nrel = 81): string {
  const p0 = 5.2e-29;
  const sigCm = 1.3e-30;
  const sigRel = 1.1e-30;
  const lines = [SPECTRUM_COLUMNS.join(",")];
  for (let i = 0; i < ncm; i++) {
    const pc = -4e-30 + (8e-30 * i) / (ncm - 1);
    for (let j = 0; j < nrel; j++) {
      const pr = p0 * (0.7 + (0.6 * j) / (nrel - 1));
      const d = 1e59 * Math.exp(-0.5 * (pc / sigCm) ** 2 - 0.5 * ((pr - p0) / sigRel) ** 2);
      lines.push([pc, pr, d].map((v) => v.toExponential(12)).join(","));
    }
  }
  return lines.join("\n") + "\n";
}

describe("reshapeGrid", () => {
  it("recovers axes and the peak momentum", () => {
    const grid = reshapeGrid(syntheticSpectrumCsv());
    expect(grid.cmAxis.length).toBe(21);
    expect(grid.relAxis.length).toBe(81);
    expect(grid.p0 / 5.2e-29).toBeCloseTo(1.0, 1);
  });

  it("rejects rows that do not tile a grid", () => {
    const lines = syntheticSpectrumCsv().trimEnd().split("\n");
    lines.pop();
    expect(() => reshapeGrid(lines.join("\n"))).toThrow(/grid/);
  });
});

describe("renderSpectrum", () => {
  const svg = renderSpectrum(syntheticSpectrumCsv());

  it("produces the log slice and the contour panels", () => {
    expect((svg.match(/<g class="panel/g) ?? []).length).toBe(2);
    expect(svg).toContain("log-slice");
    expect(svg).toContain('class="contour"');
  });

  it("log axis is labeled in decades", () => {
    expect(svg).toContain("1e-");
    expect(svg).toContain("log scale");
  });

  it("axes are normalized to p0", () => {
    expect(svg).toContain("p_rel / p0");
    expect(svg).toContain("p_cm / p0");
  });

  it("draws several contour levels", () => {
    const n = (svg.match(/class="contour"/g) ?? []).length;
    expect(n).toBeGreaterThanOrEqual(4);
  });
});

describe("spectrum schema", () => {
  it("rejects an empty CSV", () => {
    expect(() => renderSpectrum("")).toThrow(SchemaError);
  });

  it("names the missing column", () => {
    expect(() => renderSpectrum("p_cm,p_rel\n0,0\n")).toThrow(/missing column "density"/);
  });
});
