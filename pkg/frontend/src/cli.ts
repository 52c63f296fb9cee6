#!/usr/bin/env node
import { readFileSync, writeFileSync } from "node:fs"
import { basename } from "node:path"

import { renderReportText } from "./render.js"

export function main(argv: string[]): number {
  if (argv.length === 0 || argv[0] !== "render") {
    process.stderr.write(
      "usage: nilmax-render render <csv> [--out FILE] [--pred SLOPE] [--title NAME]\n",
    )
    return 2
  }
  const args = argv.slice(1)
  let csvPath: string | undefined
  let outPath: string | undefined
  let pred: number | undefined
  let title: string | undefined
  for (let i = 0; i < args.length; i++) {
    const a = args[i]
    if (a === "--out") {
      outPath = args[++i]
    } else if (a === "--pred") {
      pred = Number(args[++i])
    } else if (a === "--title") {
      title = args[++i]
    } else if (csvPath === undefined) {
      csvPath = a
    } else {
      process.stderr.write(`unexpected argument: ${a}\n`)
      return 2
    }
  }
  if (csvPath === undefined) {
    process.stderr.write("missing CSV path\n")
    return 2
  }
  let text: string
  try {
    text = readFileSync(csvPath, "utf8")
  } catch (err) {
    process.stderr.write(`cannot read ${csvPath}: ${String(err)}\n`)
    return 1
  }
  try {
    const result = renderReportText(text, {
      pred,
      title: title ?? basename(csvPath).replace(/\.csv$/, ""),
    })
    const out = outPath ?? csvPath.replace(/\.csv$/, "") + ".svg"
    writeFileSync(out, result.svg)
    if (result.fit !== undefined) {
      process.stdout.write(
        `wrote ${out} (slope ${result.fit.slope.toPrecision(6)}, predicted ${
          result.predicted?.toPrecision(6)
        })\n`,
      )
    } else {
      process.stdout.write(`wrote ${out}\n`)
    }
    return 0
  } catch (err) {
    process.stderr.write(`render failed: ${err instanceof Error ? err.message : String(err)}\n`)
    return 1
  }
}

if (process.argv[1] !== undefined && import.meta.url.endsWith(basename(process.argv[1]))) {
  process.exit(main(process.argv.slice(2)))
}
