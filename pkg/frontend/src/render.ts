import { numericColumn, parseReport, ReportTable } from "./csv.js"
import { FitResult, loglogFit } from "./fit.js"
import { renderBarPlot, renderLinePlot } from "./svg.js"

const LOG10E = Math.LOG10E

export interface RenderOptions {
  title?: string
  /** predicted log-log slope; defaults depend on the report kind */
  pred?: number
}

export interface RenderResult {
  svg: string
  fit?: FitResult
  predicted?: number
}

const X_COLUMN: Record<string, string> = {
  slab: "delta",
  stack: "M",
  nikodym: "eta",
}

const DEFAULT_PRED: Record<string, number | undefined> = {
  slab: undefined, // taken from the slope_pred column
  stack: 1 / 3, // ratio ~ M^{1/(r+1)} with r = 2
  nikodym: -0.5, // ratio ~ eta^{-1/p} with p = 2
}

function fmtSlope(v: number): string {
  return v.toPrecision(6)
}

function renderScaling(table: ReportTable, opts: RenderOptions): RenderResult {
  const xName = X_COLUMN[table.kind]
  const xs = numericColumn(table, xName)
  const ys = numericColumn(table, "ratio")
  const fit = loglogFit(xs, ys)
  let pred = opts.pred
  if (pred === undefined && table.kind === "slab") {
    pred = numericColumn(table, "slope_pred")[0]
  }
  if (pred === undefined) {
    pred = DEFAULT_PRED[table.kind]
  }
  if (pred === undefined || !Number.isFinite(pred)) {
    throw new Error("no predicted slope available")
  }
  const points = xs.map((x, i) =>
    [Math.log10(x), Math.log10(ys[i])] as [number, number]
  )
  // natural-log fit converted to log10 coordinates; the slope is unchanged
  const mx = points.reduce((a, p) => a + p[0], 0) / points.length
  const my = points.reduce((a, p) => a + p[1], 0) / points.length
  const svg = renderLinePlot({
    title: opts.title ?? `${table.kind} scaling`,
    xLabel: `log10 ${xName}`,
    yLabel: "log10 ratio",
    points,
    lines: [
      {
        slope: fit.slope,
        intercept: fit.intercept * LOG10E,
        dashed: false,
        label: `fit: slope ${fmtSlope(fit.slope)}`,
      },
      {
        slope: pred,
        intercept: my - pred * mx, // through the centroid of the data
        dashed: true,
        label: `predicted: slope ${fmtSlope(pred)}`,
      },
    ],
    annotation: `slope = ${fmtSlope(fit.slope)} &#177; ${
      fmtSlope(fit.stderr)
    } (predicted ${fmtSlope(pred)})`,
  })
  return { svg, fit, predicted: pred }
}

function renderIdentity(table: ReportTable, opts: RenderOptions): RenderResult {
  const checkIdx = table.columns.indexOf("check")
  const paramIdx = table.columns.indexOf("parameter")
  const statusIdx = table.columns.indexOf("status")
  const errs = numericColumn(table, "error")
  const tols = numericColumn(table, "tolerance")
  const floor = 1e-18 // render zero errors at the axis floor
  const labels = table.rows.map((row) =>
    `${row[checkIdx]} ${Number(row[paramIdx]).toPrecision(3)}`
  )
  const failures = table.rows.filter((row) => row[statusIdx] !== "pass").length
  const svg = renderBarPlot({
    title: opts.title ?? "identity suite errors",
    labels,
    values: errs.map((e) => Math.log10(Math.max(e, floor))),
    limits: tols.map((t) => Math.log10(t)),
    annotation: failures === 0
      ? "all checks pass (dashed: tolerance)"
      : `${failures} check(s) FAIL (dashed: tolerance)`,
  })
  return { svg }
}

export function renderReportText(
  text: string,
  opts: RenderOptions = {},
): RenderResult {
  const table = parseReport(text)
  if (table.kind === "identity") {
    return renderIdentity(table, opts)
  }
  return renderScaling(table, opts)
}
