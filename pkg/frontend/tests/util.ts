/** Shared test helpers: seeded PRNG and synthetic evaluation instances. */

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Standard normal samples via Box-Muller on the given uniform source. */
export function gaussian(rand: () => number, n: number): Float64Array {
  const out = new Float64Array(n);
  for (let i = 0; i < n; i += 2) {
    const r = Math.sqrt(-2 * Math.log(1 - rand()));
    const theta = 2 * Math.PI * rand();
    out[i] = r * Math.cos(theta);
    if (i + 1 < n) out[i + 1] = r * Math.sin(theta);
  }
  return out;
}

export interface Instance {
  refs: Float64Array[];
  ests: Float64Array[];
}

/**
 * Two references, two estimates: each estimate mixes its main reference,
 * a delayed copy of it, the other reference, and a little noise, so all
 * metrics land strictly between the clamp limits.
 */
export function makeInstance(seed: number, samples: number): Instance {
  const rand = mulberry32(seed);
  const refs = [gaussian(rand, samples), gaussian(rand, samples)];
  const ests = refs.map((main, m) => {
    const other = refs[1 - m]!;
    const noise = gaussian(rand, samples);
    const est = new Float64Array(samples);
    for (let n = 0; n < samples; n++) {
      est[n] = main[n]! + 0.4 * (main[n - 3] ?? 0) + 0.3 * other[n]! + 0.1 * noise[n]!;
    }
    return est;
  });
  return { refs, ests };
}

/** Run an async job per item with bounded concurrency, preserving order. */
export async function mapPool<T, R>(
  items: readonly T[],
  limit: number,
  job: (item: T, index: number) => Promise<R>,
): Promise<R[]> {
  const results = new Array<R>(items.length);
  let next = 0;
  const workers = Array.from({ length: Math.min(limit, items.length) }, async () => {
    while (next < items.length) {
      const i = next++;
      results[i] = await job(items[i]!, i);
    }
  });
  await Promise.all(workers);
  return results;
}
