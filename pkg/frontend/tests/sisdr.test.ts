import { describe, expect, it } from "vitest";

import { bssEval, siSdr } from "../src/index.js";
import { gaussian, mapPool, mulberry32 } from "./util.js";

/** Textbook scale-invariant SDR for one pair, computed entirely host-side. */
function siSdrClosedForm(ref: Float64Array, est: Float64Array): number {
  let dot = 0;
  let s2 = 0;
  let e2 = 0;
  for (let n = 0; n < ref.length; n++) {
    dot += ref[n]! * est[n]!;
    s2 += ref[n]! * ref[n]!;
    e2 += est[n]! * est[n]!;
  }
  return 10 * Math.log10((dot * dot) / (s2 * e2 - dot * dot));
}

describe("scale-invariant SDR", () => {
  it("matches the closed-form formula within 1e-8 dB on random pairs", async () => {
    const worst = await mapPool(
      Array.from({ length: 30 }, (_, i) => i),
      4,
      async (i) => {
        const rand = mulberry32(4000 + i);
        const T = 500 + Math.floor(rand() * 2500);
        const ref = gaussian(rand, T);
        const noise = gaussian(rand, T);
        const a = 0.2 + 4.8 * rand();
        const b = 0.05 + 0.95 * rand();
        const est = new Float64Array(T);
        for (let n = 0; n < T; n++) {
          est[n] = a * ref[n]! + b * noise[n]!;
        }
        const doc = await siSdr([ref], [est]);
        return Math.abs(doc.results.sdr![0]![0]! - siSdrClosedForm(ref, est));
      },
    );
    expect(Math.max(...worst)).toBeLessThan(1e-8);
  });

  it("saturates at the clamp ceiling for a rescaled copy", async () => {
    const ref = gaussian(mulberry32(5), 1500);
    const est = ref.map((x) => 2 * x);
    const doc = await siSdr([ref], [new Float64Array(est)]);
    // same operation order as the evaluator: 1 - x quantizes near 1, so the
    // residual is not exactly 1e-12 and the ceiling sits ~1e-4 dB above 120
    const clamped = 1 - 1e-12;
    const ceiling = 10 * Math.log10(clamped / (1 - clamped));
    expect(doc.results.sdr![0]![0]!).toBeCloseTo(ceiling, 9);
    expect(doc.diagnostics.clamp_events.length).toBeGreaterThan(0);
  });

  it("equals a filter-length-1 SDR-only evaluation exactly", async () => {
    const rand = mulberry32(6);
    const refs = [gaussian(rand, 900), gaussian(rand, 900)];
    const ests = refs.map((r) => {
      const noise = gaussian(rand, 900);
      return new Float64Array(r.map((x, n) => x + 0.2 * noise[n]!));
    });
    const [viaSiSdr, viaConfig] = await Promise.all([
      siSdr(refs, ests),
      bssEval(refs, ests, { filterLength: 1, metrics: ["sdr"] }),
    ]);
    expect(viaSiSdr.results).toStrictEqual(viaConfig.results);
    expect(viaConfig.config.filter_length).toBe(1);
    expect(viaConfig.results.sir).toBeNull();
    expect(viaConfig.results.sar).toBeNull();
  });
});
