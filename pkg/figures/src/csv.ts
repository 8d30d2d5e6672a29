/**
 * Strict parsing of the simulator's CSV outputs.
 *
 * The files are plain comma-separated tables with a header row and no
 * quoting, so a split-based parser with exact schema validation is all we
 * need; any mismatch is reported with the offending column names.
 */

export class CsvSchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "CsvSchemaError";
  }
}

export interface Table {
  source: string;
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string, source: string): Table {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError(`${source}: file is empty`);
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new CsvSchemaError(
        `${source}: row ${i + 2} has ${cells.length} fields, header has ${columns.length}`,
      );
    }
    return cells;
  });
  return { source, columns, rows };
}

export function requireColumns(table: Table, required: string[]): void {
  const have = new Set(table.columns);
  const missing = required.filter((name) => !have.has(name));
  const wanted = new Set(required);
  const unexpected = table.columns.filter((name) => !wanted.has(name));
  if (missing.length > 0 || unexpected.length > 0) {
    const parts = [];
    if (missing.length > 0) parts.push(`missing columns: ${missing.join(", ")}`);
    if (unexpected.length > 0) parts.push(`unexpected columns: ${unexpected.join(", ")}`);
    throw new CsvSchemaError(`${table.source}: ${parts.join("; ")}`);
  }
}

export function requireRows(table: Table, minimum: number): void {
  if (table.rows.length < minimum) {
    throw new CsvSchemaError(
      `${table.source}: needs at least ${minimum} data row(s), found ${table.rows.length}`,
    );
  }
}

export function numberColumn(table: Table, name: string): number[] {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new CsvSchemaError(`${table.source}: no column named '${name}'`);
  }
  return table.rows.map((row, i) => {
    const value = Number(row[index]);
    if (!Number.isFinite(value)) {
      throw new CsvSchemaError(
        `${table.source}: row ${i + 2}, column '${name}': not a number: '${row[index]}'`,
      );
    }
    return value;
  });
}
