/**
 * Minimal RIFF/WAVE codec for 64-bit IEEE float audio.
 *
 * Doubles survive encode/decode bit-for-bit, which is what lets a caller
 * hand sample arrays to the evaluator without losing precision at the file
 * boundary. Only format tag 3 (IEEE float) at 64 bits per sample is
 * supported; metric evaluation has no use for lossy integer PCM here.
 */

export interface WavData {
  sampleRate: number;
  /** One Float64Array per channel, all the same length. */
  channels: Float64Array[];
}

const FORMAT_IEEE_FLOAT = 3;

/** Encode channel-major float64 samples as an interleaved WAV file. */
export function encodeWavFloat64(channels: readonly Float64Array[], sampleRate: number): Buffer {
  if (channels.length === 0) {
    throw new Error("need at least one channel");
  }
  const length = channels[0]!.length;
  if (length === 0) {
    throw new Error("channels must not be empty");
  }
  for (const ch of channels) {
    if (ch.length !== length) {
      throw new Error("all channels must have the same length");
    }
  }
  if (!Number.isInteger(sampleRate) || sampleRate <= 0) {
    throw new Error(`sample rate must be a positive integer, got ${sampleRate}`);
  }

  const numChannels = channels.length;
  const blockAlign = numChannels * 8;
  const dataSize = length * blockAlign;
  const buf = Buffer.alloc(44 + dataSize);

  buf.write("RIFF", 0, "ascii");
  buf.writeUInt32LE(36 + dataSize, 4);
  buf.write("WAVE", 8, "ascii");
  buf.write("fmt ", 12, "ascii");
  buf.writeUInt32LE(16, 16);
  buf.writeUInt16LE(FORMAT_IEEE_FLOAT, 20);
  buf.writeUInt16LE(numChannels, 22);
  buf.writeUInt32LE(sampleRate, 24);
  buf.writeUInt32LE(sampleRate * blockAlign, 28);
  buf.writeUInt16LE(blockAlign, 32);
  buf.writeUInt16LE(64, 34);
  buf.write("data", 36, "ascii");
  buf.writeUInt32LE(dataSize, 40);

  let off = 44;
  for (let n = 0; n < length; n++) {
    for (let c = 0; c < numChannels; c++) {
      buf.writeDoubleLE(channels[c]![n]!, off);
      off += 8;
    }
  }
  return buf;
}

/** Decode a float64 WAV file into per-channel sample arrays. */
export function decodeWavFloat64(file: Buffer): WavData {
  if (file.length < 12 || file.toString("ascii", 0, 4) !== "RIFF" || file.toString("ascii", 8, 12) !== "WAVE") {
    throw new Error("not a RIFF/WAVE file");
  }

  let fmt: { numChannels: number; sampleRate: number; bits: number; tag: number } | null = null;
  let data: Buffer | null = null;

  // Chunks are 8-byte headers plus payload, padded to even sizes; readers
  // must skip the ones they do not know (scipy emits an extra "fact").
  let pos = 12;
  while (pos + 8 <= file.length) {
    const id = file.toString("ascii", pos, pos + 4);
    const size = file.readUInt32LE(pos + 4);
    const body = pos + 8;
    if (id === "fmt ") {
      if (size < 16) {
        throw new Error("fmt chunk too short");
      }
      fmt = {
        tag: file.readUInt16LE(body),
        numChannels: file.readUInt16LE(body + 2),
        sampleRate: file.readUInt32LE(body + 4),
        bits: file.readUInt16LE(body + 14),
      };
    } else if (id === "data") {
      data = file.subarray(body, body + size);
    }
    pos = body + size + (size % 2);
  }

  if (fmt === null || data === null) {
    throw new Error("missing fmt or data chunk");
  }
  if (fmt.tag !== FORMAT_IEEE_FLOAT || fmt.bits !== 64) {
    throw new Error(`unsupported WAV format: tag ${fmt.tag}, ${fmt.bits} bits (need IEEE float64)`);
  }
  if (fmt.numChannels < 1) {
    throw new Error("fmt chunk declares zero channels");
  }
  const frames = Math.floor(data.length / (fmt.numChannels * 8));
  if (frames === 0) {
    throw new Error("data chunk holds no complete frame");
  }

  const channels = Array.from({ length: fmt.numChannels }, () => new Float64Array(frames));
  let off = 0;
  for (let n = 0; n < frames; n++) {
    for (let c = 0; c < fmt.numChannels; c++) {
      channels[c]![n] = data.readDoubleLE(off);
      off += 8;
    }
  }
  return { sampleRate: fmt.sampleRate, channels };
}
