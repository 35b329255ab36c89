import { execFile } from "node:child_process";
import { mkdtemp, readFile, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";

import { describe, expect, it } from "vitest";

import { bssEval, resolveCli, type EvalDocument } from "../src/index.js";
import { decodeWavFloat64, encodeWavFloat64 } from "../src/wav.js";
import { makeInstance, mapPool } from "./util.js";

const execFileP = promisify(execFile);
const FIXTURES = new URL("../../tests/fixtures/", import.meta.url);

/** Invoke the evaluator directly, bypassing this package entirely. */
async function evalViaCli(
  refs: Float64Array[],
  ests: Float64Array[],
  flags: string[],
): Promise<EvalDocument> {
  const dir = await mkdtemp(join(tmpdir(), "fastsdr-direct-"));
  try {
    const refPath = join(dir, "r.wav");
    const estPath = join(dir, "e.wav");
    await writeFile(refPath, encodeWavFloat64(refs, 8000));
    await writeFile(estPath, encodeWavFloat64(ests, 8000));
    const [cmd, ...prefix] = resolveCli();
    const { stdout } = await execFileP(
      cmd!,
      [...prefix, "eval", "--refs", refPath, "--ests", estPath, ...flags],
      { maxBuffer: 64 * 1024 * 1024 },
    );
    return JSON.parse(stdout) as EvalDocument;
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

describe("binding parity with the evaluator", () => {
  it("matches a direct CLI invocation bit for bit on 50 fixtures", async () => {
    const flags = ["--filter-length", "32", "--solver", "direct"];
    await mapPool(
      Array.from({ length: 50 }, (_, i) => i),
      4,
      async (seed) => {
        const { refs, ests } = makeInstance(1000 + seed, 1200);
        const [bound, direct] = await Promise.all([
          bssEval(refs, ests, { filterLength: 32, solver: "direct", sampleRate: 8000 }),
          evalViaCli(refs, ests, flags),
        ]);
        // toStrictEqual on JSON.parse output compares doubles exactly
        expect(bound.results).toStrictEqual(direct.results);
        expect(bound.diagnostics).toStrictEqual(direct.diagnostics);
      },
    );
  });

  it("reproduces the committed fixture document from decoded WAVs", async () => {
    const refs = decodeWavFloat64(await readFile(new URL("refs.wav", FIXTURES)));
    const ests = decodeWavFloat64(await readFile(new URL("ests.wav", FIXTURES)));
    const expected = JSON.parse(
      await readFile(new URL("expected.json", FIXTURES), "utf8"),
    ) as EvalDocument;

    const doc = await bssEval(refs.channels, ests.channels, {
      filterLength: 32,
      solver: "direct",
      sampleRate: refs.sampleRate,
    });
    expect(doc.results).toStrictEqual(expected.results);
    expect(doc.config.filter_length).toBe(expected.config.filter_length);
  });

  it("defaults to the iterative solver and reports its diagnostics", async () => {
    const { refs, ests } = makeInstance(7, 2000);
    const doc = await bssEval(refs, ests, { filterLength: 16 });
    expect(doc.config.solver).toBe("cgd");
    expect(doc.diagnostics.solver).toBe("cgd");
    expect(doc.diagnostics.cgd_iterations.every((n) => n === 10)).toBe(true);
    expect(doc.results.permutation).toEqual([0, 1]);
  });
});
