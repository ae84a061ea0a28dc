/** Test utilities: a minimal PNG writer for fixtures, an independent GIF
 * block walker for frame counting, and a tiny seeded PRNG.
 */

import * as zlib from "node:zlib";

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    c ^= buf[i];
    for (let k = 0; k < 8; k++) c = (c >>> 1) ^ (0xedb88320 & -(c & 1));
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + data.length);
  const dv = new DataView(out.buffer);
  dv.setUint32(0, data.length);
  for (let i = 0; i < 4; i++) out[4 + i] = type.charCodeAt(i);
  out.set(data, 8);
  dv.setUint32(8 + data.length, crc32(out.subarray(4, 8 + data.length)));
  return out;
}

/** Encode an (h, w, 3) pixel array as an 8-bit RGB PNG. */
export function encodePng(pixels: Uint8Array, width: number, height: number): Uint8Array {
  const ihdr = new Uint8Array(13);
  const dv = new DataView(ihdr.buffer);
  dv.setUint32(0, width);
  dv.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // color type RGB
  const raw = new Uint8Array(height * (1 + width * 3));
  for (let y = 0; y < height; y++) {
    raw[y * (1 + width * 3)] = 0; // filter none
    raw.set(
      pixels.subarray(y * width * 3, (y + 1) * width * 3),
      y * (1 + width * 3) + 1,
    );
  }
  const idat = new Uint8Array(zlib.deflateSync(raw));
  const parts = [
    new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ];
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let pos = 0;
  for (const p of parts) {
    out.set(p, pos);
    pos += p.length;
  }
  return out;
}

/** The 64x64 red|blue two-region fixture shared with the service tests. */
export function twoRegionPng(): Uint8Array {
  const w = 64;
  const h = 64;
  const px = new Uint8Array(w * h * 3);
  for (let y = 0; y < h; y++) {
    for (let x = 0; x < w; x++) {
      const i = (y * w + x) * 3;
      if (x < w / 2) {
        px[i] = 220;
        px[i + 1] = 30;
        px[i + 2] = 30;
      } else {
        px[i] = 30;
        px[i + 1] = 30;
        px[i + 2] = 220;
      }
    }
  }
  return encodePng(px, w, h);
}

/** Count image frames by walking GIF blocks (independent of any encoder). */
export function countGifFrames(data: Uint8Array): number {
  if (String.fromCharCode(...data.subarray(0, 6)) !== "GIF89a") {
    throw new Error("not a GIF89a stream");
  }
  const dv = new DataView(data.buffer, data.byteOffset);
  let pos = 6;
  const packed = data[pos + 4];
  pos += 7; // logical screen descriptor
  if (packed & 0x80) pos += 3 * (1 << ((packed & 7) + 1)); // global color table

  const skipSubBlocks = () => {
    for (;;) {
      const size = data[pos++];
      if (size === 0) return;
      pos += size;
    }
  };

  let frames = 0;
  for (;;) {
    const block = data[pos++];
    if (block === 0x3b) return frames; // trailer
    if (block === 0x21) {
      pos++; // extension label
      skipSubBlocks();
    } else if (block === 0x2c) {
      frames++;
      const flags = data[pos + 8];
      pos += 9;
      if (flags & 0x80) pos += 3 * (1 << ((flags & 7) + 1)); // local color table
      pos++; // LZW minimum code size
      skipSubBlocks();
    } else {
      throw new Error(`unknown block 0x${block.toString(16)} at ${pos - 1}`);
    }
    if (pos > dv.byteLength) throw new Error("truncated GIF");
  }
}

/** Deterministic PRNG (mulberry32) for sampled-form property tests. */
export function prng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
