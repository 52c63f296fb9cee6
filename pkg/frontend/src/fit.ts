export class FitError extends Error {}

export interface FitResult {
  slope: number
  intercept: number
  stderr: number
  rSquared: number
  n: number
}

/** Ordinary least squares on (log x, log y). */
export function loglogFit(xs: number[], ys: number[]): FitResult {
  if (xs.length !== ys.length) {
    throw new FitError("x and y lengths differ")
  }
  if (xs.length < 3) {
    throw new FitError("need at least 3 points for a fit")
  }
  if (xs.some((v) => v <= 0) || ys.some((v) => v <= 0)) {
    throw new FitError("log-log fit needs positive values")
  }
  const lx = xs.map(Math.log)
  const ly = ys.map(Math.log)
  const n = lx.length
  const mx = lx.reduce((a, b) => a + b, 0) / n
  const my = ly.reduce((a, b) => a + b, 0) / n
  let sxx = 0
  let sxy = 0
  for (let i = 0; i < n; i++) {
    sxx += (lx[i] - mx) ** 2
    sxy += (lx[i] - mx) * (ly[i] - my)
  }
  if (sxx === 0) {
    throw new FitError("all x values coincide")
  }
  const slope = sxy / sxx
  const intercept = my - slope * mx
  let ssRes = 0
  let ssTot = 0
  for (let i = 0; i < n; i++) {
    ssRes += (ly[i] - (intercept + slope * lx[i])) ** 2
    ssTot += (ly[i] - my) ** 2
  }
  const stderr = n > 2 ? Math.sqrt(ssRes / (n - 2) / sxx) : 0
  const rSquared = ssTot > 0 ? 1 - ssRes / ssTot : 1
  return { slope, intercept, stderr, rSquared, n }
}
