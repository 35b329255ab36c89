import { afterEach, describe, expect, it } from "vitest";

import {
  bssEval,
  DimensionError,
  resolveCli,
  siSdr,
  ValidationError,
  type Channels,
} from "../src/index.js";
import { gaussian, mulberry32 } from "./util.js";

describe("input validation", () => {
  it("rejects flat arrays before spawning anything", async () => {
    const flat = [1, 2, 3] as unknown as Channels;
    await expect(bssEval(flat, [[1, 2, 3]])).rejects.toBeInstanceOf(DimensionError);
    await expect(siSdr([[1, 2, 3]], flat)).rejects.toBeInstanceOf(DimensionError);
  });

  it("rejects empty and ragged channel sets", async () => {
    await expect(bssEval([], [[1]])).rejects.toBeInstanceOf(DimensionError);
    await expect(bssEval([new Float64Array(0)], [[1]])).rejects.toBeInstanceOf(DimensionError);
    await expect(
      bssEval(
        [
          [1, 2, 3],
          [1, 2],
        ],
        [[1, 2, 3]],
      ),
    ).rejects.toBeInstanceOf(DimensionError);
  });

  it("surfaces evaluator validation failures with their original names", async () => {
    const rand = mulberry32(11);
    const refs = [gaussian(rand, 400)];

    const short = [gaussian(rand, 300)];
    const mismatch = await bssEval(refs, short).catch((e) => e);
    expect(mismatch).toBeInstanceOf(ValidationError);
    expect(mismatch.exitCode).toBe(3);
    expect(mismatch.errorType).toBe("LengthMismatchError");

    const tooLong = await bssEval(refs, refs, { filterLength: 400 }).catch((e) => e);
    expect(tooLong).toBeInstanceOf(ValidationError);
    expect(tooLong.errorType).toBe("FilterTooLongError");
    expect(tooLong.message).toMatch(/filter/i);

    const zeros = await bssEval([new Float64Array(400)], [gaussian(rand, 400)], {
      filterLength: 8,
    }).catch((e) => e);
    expect(zeros).toBeInstanceOf(ValidationError);
    expect(zeros.errorType).toBe("ZeroSignalError");
  });
});

describe("cli resolution", () => {
  afterEach(() => {
    delete process.env.FASTSDR_CLI;
  });

  it("defaults to the installed module and honors the override", () => {
    delete process.env.FASTSDR_CLI;
    expect(resolveCli()).toEqual(["python3", "-m", "fastsdr"]);

    process.env.FASTSDR_CLI = "  /opt/venv/bin/python -m fastsdr ";
    expect(resolveCli()).toEqual(["/opt/venv/bin/python", "-m", "fastsdr"]);
  });

  it("reports a spawn failure distinctly from evaluator errors", async () => {
    process.env.FASTSDR_CLI = "definitely-not-a-real-binary-9z";
    const err = await bssEval([[1, 2, 3, 4]], [[1, 2, 3, 4]]).catch((e) => e);
    expect(err).toBeInstanceOf(Error);
    expect(err).not.toBeInstanceOf(ValidationError);
    expect(String(err.message)).toMatch(/process failed/);
  });
});
