import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs"
import { tmpdir } from "node:os"
import { dirname, join } from "node:path"
import { fileURLToPath } from "node:url"

import { describe, expect, it } from "vitest"

import { main } from "../src/cli.js"

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures")

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "nilmax-plots-"))
}

describe("cli", () => {
  it("renders a fixture to the requested file", () => {
    const dir = tmp()
    const out = join(dir, "slab.svg")
    const code = main(["render", join(FIXTURES, "slab_report.csv"), "--out", out])
    expect(code).toBe(0)
    expect(readFileSync(out, "utf8")).toContain("</svg>")
  })

  it("renders twice to identical bytes", () => {
    const dir = tmp()
    const a = join(dir, "a.svg")
    const b = join(dir, "b.svg")
    const csv = join(FIXTURES, "nikodym_report.csv")
    expect(main(["render", csv, "--out", a])).toBe(0)
    expect(main(["render", csv, "--out", b])).toBe(0)
    expect(readFileSync(a, "utf8")).toBe(readFileSync(b, "utf8"))
  })

  it("fails on an empty CSV without writing a file", () => {
    const dir = tmp()
    const csv = join(dir, "empty.csv")
    const out = join(dir, "empty.svg")
    writeFileSync(csv, "")
    expect(main(["render", csv, "--out", out])).toBe(1)
    expect(existsSync(out)).toBe(false)
  })

  it("fails on a schema mismatch without writing a file", () => {
    const dir = tmp()
    const csv = join(dir, "odd.csv")
    const out = join(dir, "odd.svg")
    writeFileSync(csv, "a,b\n1,2\n")
    expect(main(["render", csv, "--out", out])).toBe(1)
    expect(existsSync(out)).toBe(false)
  })

  it("rejects bad usage", () => {
    expect(main([])).toBe(2)
    expect(main(["render"])).toBe(2)
  })
})
