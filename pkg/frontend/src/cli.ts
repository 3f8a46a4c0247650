#!/usr/bin/env node
/** Render dtebell CSV artifacts into SVG figures.
 *
 * Usage:
 *   node dist/cli.js fringes  --input fringes.csv  --output fringes.svg
 *   node dist/cli.js spectrum --input spectrum.csv --output spectrum.svg
 */
import { readFileSync, writeFileSync } from "node:fs";

import { SchemaError } from "./csv.js";
import { renderFringes } from "./fringes.js";
import { renderSpectrum } from "./spectrum.js";

const RENDERERS: Record<string, (csv: string) => string> = {
  fringes: renderFringes,
  spectrum: renderSpectrum,
};

function usage(): never {
  process.stderr.write(
    "usage: cli.js <fringes|spectrum> --input <csv> --output <svg>\n");
  process.exit(1);
}

export function main(argv: string[]): number {
  const [kind, ...rest] = argv;
  if (!kind || !(kind in RENDERERS)) usage();
  let input = "";
  let output = "";
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (value === undefined) usage();
    if (key === "--input") input = value;
    else if (key === "--output") output = value;
    else usage();
  }
  if (!input || !output) usage();

  let csv: string;
  try {
    csv = readFileSync(input, "utf-8");
  } catch (err) {
    process.stderr.write(`cannot read ${input}: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    writeFileSync(output, RENDERERS[kind](csv));
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
  return 0;
}

process.exit(main(process.argv.slice(2)));
