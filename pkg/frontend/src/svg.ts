const WIDTH = 640
const HEIGHT = 480
const MARGIN = { left: 70, right: 20, top: 40, bottom: 50 }

function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString()
}

interface Scale {
  (v: number): number
}

function linScale(lo: number, hi: number, out0: number, out1: number): Scale {
  const span = hi - lo || 1
  return (v) => out0 + ((v - lo) / span) * (out1 - out0)
}

export interface LinePlotSpec {
  title: string
  xLabel: string
  yLabel: string
  /** log10 data coordinates */
  points: Array<[number, number]>
  lines: Array<{
    slope: number
    intercept: number // in log10 coordinates
    dashed: boolean
    label: string
  }>
  annotation: string
}

/** Deterministic SVG scatter in log10 coordinates with overlay lines. */
export function renderLinePlot(spec: LinePlotSpec): string {
  const xs = spec.points.map((p) => p[0])
  const ys = spec.points.map((p) => p[1])
  let xLo = Math.min(...xs)
  let xHi = Math.max(...xs)
  let yLo = Math.min(...ys)
  let yHi = Math.max(...ys)
  const xPad = 0.05 * (xHi - xLo || 1)
  const yPad = 0.1 * (yHi - yLo || 1)
  xLo -= xPad
  xHi += xPad
  yLo -= yPad
  yHi += yPad
  const sx = linScale(xLo, xHi, MARGIN.left, WIDTH - MARGIN.right)
  const sy = linScale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top)

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  )
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`)
  const x0 = MARGIN.left
  const x1 = WIDTH - MARGIN.right
  const y0 = HEIGHT - MARGIN.bottom
  const y1 = MARGIN.top
  parts.push(
    `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="black"/>`,
  )
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${spec.title}</text>`,
  )
  parts.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="12">${spec.xLabel}</text>`,
  )
  parts.push(
    `<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${HEIGHT / 2})">${spec.yLabel}</text>`,
  )
  // corner tick labels in data (log10) coordinates
  parts.push(
    `<text x="${x0}" y="${y0 + 16}" font-size="10">${fmt(xLo)}</text>`,
    `<text x="${x1}" y="${y0 + 16}" text-anchor="end" font-size="10">${fmt(xHi)}</text>`,
    `<text x="${x0 - 6}" y="${y0}" text-anchor="end" font-size="10">${fmt(yLo)}</text>`,
    `<text x="${x0 - 6}" y="${y1 + 4}" text-anchor="end" font-size="10">${fmt(yHi)}</text>`,
  )
  for (const line of spec.lines) {
    const ya = line.intercept + line.slope * xLo
    const yb = line.intercept + line.slope * xHi
    const dash = line.dashed ? ` stroke-dasharray="6 4"` : ""
    const color = line.dashed ? "#c02020" : "#2040c0"
    parts.push(
      `<line x1="${fmt(sx(xLo))}" y1="${fmt(sy(ya))}" x2="${fmt(sx(xHi))}" y2="${fmt(sy(yb))}" stroke="${color}" stroke-width="1.5"${dash}/>`,
    )
  }
  for (const [px, py] of spec.points) {
    parts.push(
      `<circle cx="${fmt(sx(px))}" cy="${fmt(sy(py))}" r="4" fill="black"/>`,
    )
  }
  const legendY = MARGIN.top + 16
  spec.lines.forEach((line, i) => {
    const color = line.dashed ? "#c02020" : "#2040c0"
    parts.push(
      `<text x="${x1 - 8}" y="${legendY + 16 * i}" text-anchor="end" font-size="11" fill="${color}">${line.label}</text>`,
    )
  })
  parts.push(
    `<text x="${x0 + 8}" y="${y0 - 10}" font-size="11">${spec.annotation}</text>`,
  )
  parts.push(`</svg>`)
  return parts.join("\n") + "\n"
}

export interface BarPlotSpec {
  title: string
  labels: string[]
  /** log10 of the reported errors and tolerances */
  values: number[]
  limits: number[]
  annotation: string
}

/** Deterministic SVG for per-check error levels against tolerances. */
export function renderBarPlot(spec: BarPlotSpec): string {
  const all = spec.values.concat(spec.limits)
  const lo = Math.min(...all) - 1
  const hi = Math.max(...all) + 1
  const sy = linScale(lo, hi, HEIGHT - MARGIN.bottom, MARGIN.top)
  const n = spec.values.length
  const band = (WIDTH - MARGIN.left - MARGIN.right) / n

  const parts: string[] = []
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  )
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`)
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${spec.title}</text>`,
  )
  parts.push(
    `<text x="18" y="${HEIGHT / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${HEIGHT / 2})">log10 error</text>`,
  )
  for (let i = 0; i < n; i++) {
    const cx = MARGIN.left + band * (i + 0.5)
    const base = HEIGHT - MARGIN.bottom
    parts.push(
      `<rect x="${fmt(cx - band * 0.3)}" y="${fmt(sy(spec.values[i]))}" width="${fmt(band * 0.6)}" height="${fmt(base - sy(spec.values[i]))}" fill="#2040c0"/>`,
    )
    parts.push(
      `<line x1="${fmt(cx - band * 0.4)}" y1="${fmt(sy(spec.limits[i]))}" x2="${fmt(cx + band * 0.4)}" y2="${fmt(sy(spec.limits[i]))}" stroke="#c02020" stroke-width="1.5" stroke-dasharray="6 4"/>`,
    )
    parts.push(
      `<text x="${fmt(cx)}" y="${HEIGHT - MARGIN.bottom + 16}" text-anchor="middle" font-size="10">${spec.labels[i]}</text>`,
    )
  }
  parts.push(
    `<text x="${MARGIN.left + 8}" y="${MARGIN.top + 16}" font-size="11">${spec.annotation}</text>`,
  )
  parts.push(`</svg>`)
  return parts.join("\n") + "\n"
}
