export class CsvError extends Error {}

export type ReportKind = "slab" | "stack" | "nikodym" | "identity"

export interface ReportTable {
  kind: ReportKind
  columns: string[]
  rows: string[][]
}

const SCHEMAS: Record<ReportKind, string[]> = {
  slab: ["delta", "mf_lower", "f_norm", "ratio", "slope_pred", "slope_fit"],
  stack: ["M", "numerator", "f_norm", "ratio"],
  nikodym: ["eta", "area_E", "area_F", "ratio", "miss_rate"],
  identity: ["check", "parameter", "error", "tolerance", "status"],
}

export function parseReport(text: string): ReportTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0)
  if (lines.length === 0) {
    throw new CsvError("empty CSV: no header line")
  }
  const columns = lines[0].split(",")
  const kind = (Object.keys(SCHEMAS) as ReportKind[]).find((k) =>
    SCHEMAS[k].length === columns.length &&
    SCHEMAS[k].every((c, i) => c === columns[i])
  )
  if (kind === undefined) {
    throw new CsvError(`unrecognized report schema: ${columns.join(",")}`)
  }
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",")
    if (cells.length !== columns.length) {
      throw new CsvError(
        `row ${i + 1} has ${cells.length} cells, expected ${columns.length}`,
      )
    }
    return cells
  })
  if (rows.length === 0) {
    throw new CsvError("empty CSV: header but no data rows")
  }
  return { kind, columns, rows }
}

export function numericColumn(table: ReportTable, name: string): number[] {
  const idx = table.columns.indexOf(name)
  if (idx < 0) {
    throw new CsvError(`missing column: ${name}`)
  }
  return table.rows.map((row, i) => {
    const v = Number(row[idx])
    if (!Number.isFinite(v)) {
      throw new CsvError(`row ${i + 1}, column ${name}: not a finite number`)
    }
    return v
  })
}
