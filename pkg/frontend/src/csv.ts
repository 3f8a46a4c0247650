import Papa from "papaparse";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, number>[];
}

/** Parse a CSV artifact and check it against the expected column set.
 *
 * Numeric conversion is done explicitly: papaparse's dynamicTyping leaves
 * values above MAX_SAFE_INTEGER as strings, and momentum-space densities
 * live around 1e59.
 */
export function parseCsv(text: string, required: string[], label: string): Table {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${label}: CSV parse error: ${first.message}`);
  }
  const columns = parsed.meta.fields ?? [];
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new SchemaError(
        `${label}: missing column "${col}" (found: ${columns.join(", ") || "none"})`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${label}: no data rows`);
  }
  const rows: Record<string, number>[] = [];
  for (let i = 0; i < parsed.data.length; i++) {
    const row: Record<string, number> = {};
    for (const col of required) {
      const value = Number(parsed.data[i][col]);
      if (!isFinite(value)) {
        throw new SchemaError(
          `${label}: row ${i + 1}: column "${col}" is not numeric ` +
          `("${parsed.data[i][col]}")`);
      }
      row[col] = value;
    }
    rows.push(row);
  }
  return { columns, rows };
}

export function column(table: Table, name: string): number[] {
  return table.rows.map((r) => r[name]);
}
