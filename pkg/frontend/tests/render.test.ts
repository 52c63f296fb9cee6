import { readFileSync } from "node:fs"
import { dirname, join } from "node:path"
import { fileURLToPath } from "node:url"

import { describe, expect, it } from "vitest"

import { renderReportText } from "../src/render.js"

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures")

const SHIPPED = [
  "slab_report.csv",
  "stack_report.csv",
  "nikodym_report.csv",
  "identity_report.csv",
]

function syntheticCsv(slope: number): string {
  const lines = ["eta,area_E,area_F,ratio,miss_rate"]
  for (const eta of [0.2, 0.1, 0.05, 0.025]) {
    const ratio = 0.7 * eta ** slope
    lines.push(`${eta},${eta},1e-6,${ratio},0`)
  }
  return lines.join("\n") + "\n"
}

describe("renderReportText", () => {
  it("renders every shipped fixture to SVG", () => {
    for (const file of SHIPPED) {
      const text = readFileSync(join(FIXTURES, file), "utf8")
      const { svg } = renderReportText(text)
      expect(svg.startsWith("<svg")).toBe(true)
      expect(svg).toContain("</svg>")
      expect(svg).toContain("stroke-dasharray")
    }
  })

  it("is deterministic", () => {
    for (const file of SHIPPED) {
      const text = readFileSync(join(FIXTURES, file), "utf8")
      expect(renderReportText(text).svg).toBe(renderReportText(text).svg)
    }
  })

  it("draws fit and prediction lines with the annotation", () => {
    const text = readFileSync(join(FIXTURES, "slab_report.csv"), "utf8")
    const { svg, fit, predicted } = renderReportText(text, { title: "slab A" })
    expect(svg).toContain("slab A")
    expect(svg).toContain("fit: slope")
    expect(svg).toContain("predicted: slope")
    expect(svg).toContain("slope = ")
    expect(predicted).toBe(-0.5) // from the slope_pred column
    expect(fit).toBeDefined()
  })

  it("matches the prediction on a synthetic exact power law", () => {
    const { fit, predicted } = renderReportText(syntheticCsv(-0.5))
    expect(fit).toBeDefined()
    expect(predicted).toBe(-0.5)
    expect(Math.abs(fit!.slope - predicted!)).toBeLessThan(1e-6)
  })

  it("honors a prediction override", () => {
    const { predicted } = renderReportText(syntheticCsv(-0.5), { pred: -0.25 })
    expect(predicted).toBe(-0.25)
  })

  it("reports identity failures in the annotation", () => {
    const bad = "check,parameter,error,tolerance,status\n" +
      "scaling,2,0.5,1e-12,FAIL\n"
    const { svg } = renderReportText(bad)
    expect(svg).toContain("1 check(s) FAIL")
  })
})
