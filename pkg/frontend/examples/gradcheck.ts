/**
 * Gradient-check example: compares sigBackward against central finite
 * differences computed through sig(), batching every perturbed path into
 * a single CLI call. Exits 0 when the worst scaled error is within 1e-6.
 */

import { pathBatch, sig, sigBackward, WordSetDescriptor } from "../src/index";

/** Small deterministic PRNG so the example is reproducible. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function runGradcheck(): number {
  const B = 2;
  const M = 3;
  const d = 2;
  const samples = M + 1;
  const wordset: WordSetDescriptor = { type: "truncated", d, depth: 3 };
  const h = 1e-5;

  const rand = mulberry32(12345);
  const base = new Float64Array(B * samples * d);
  for (let i = 0; i < base.length; i++) base[i] = rand() * 2 - 1;

  const width = 2 + 4 + 8; // truncated depth 3 over 2 letters
  const upstream = new Float64Array(B * width);
  for (let i = 0; i < upstream.length; i++) upstream[i] = rand() * 2 - 1;

  const analytic = sigBackward(
    pathBatch(base, B, samples, d),
    wordset,
    { data: upstream, rows: B, cols: width }
  );

  // one big batch holding +/- perturbations of every sample coordinate
  const nCoords = samples * d;
  const big = new Float64Array(2 * nCoords * B * samples * d);
  const steps = new Float64Array(B * nCoords);
  let row = 0;
  for (let c = 0; c < nCoords; c++) {
    for (const sign of [1, -1]) {
      for (let b = 0; b < B; b++) {
        const offset = row * samples * d;
        big.set(base.subarray(b * samples * d, (b + 1) * samples * d), offset);
        const step = h * Math.max(1, Math.abs(base[b * samples * d + c]));
        steps[b * nCoords + c] = step;
        big[offset + c] += sign * step;
        row++;
      }
    }
  }
  const sigs = sig(pathBatch(big, row, samples, d), wordset);

  const loss = (r: number, b: number): number => {
    let total = 0;
    for (let j = 0; j < width; j++) {
      total += upstream[b * width + j] * sigs.data[r * width + j];
    }
    return total;
  };

  let worst = 0;
  for (let c = 0; c < nCoords; c++) {
    for (let b = 0; b < B; b++) {
      const plusRow = (c * 2 + 0) * B + b;
      const minusRow = (c * 2 + 1) * B + b;
      const fd = (loss(plusRow, b) - loss(minusRow, b)) / (2 * steps[b * nCoords + c]);
      const an = analytic.data[b * samples * d + c];
      const err = Math.abs(an - fd) / Math.max(1, Math.abs(an), Math.abs(fd));
      worst = Math.max(worst, err);
    }
  }
  return worst;
}

if (require.main === module) {
  const worst = runGradcheck();
  const ok = worst <= 1e-6;
  console.log(
    `gradcheck: max scaled error ${worst.toExponential(3)} (tolerance 1e-6): ` +
      (ok ? "OK" : "FAIL")
  );
  process.exit(ok ? 0 : 1);
}
