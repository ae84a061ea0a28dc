/** Pure presentation helpers for the mask overlay and click markers. */

import type { Polarity } from "./types.js";

/** Mask tint: green at 40% opacity, matching the marker palette. */
export const MASK_TINT: [number, number, number, number] = [56, 161, 105, 102];

export const MARKER_RADIUS = 5;

export function markerColor(polarity: Polarity): string {
  return polarity === "positive" ? "#2f9e44" : "#e03131";
}

/**
 * Decoded mask pixels (white = subject) to a translucent tint layer.
 * Input and output are RGBA arrays of the same length.
 */
export function tintMask(maskRgba: Uint8ClampedArray): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(maskRgba.length);
  const [r, g, b, a] = MASK_TINT;
  for (let i = 0; i < maskRgba.length; i += 4) {
    if (maskRgba[i] > 127) {
      out[i] = r;
      out[i + 1] = g;
      out[i + 2] = b;
      out[i + 3] = a;
    }
  }
  return out;
}

/**
 * Map a pointer event position to image pixel coordinates.
 * Returns null when the hit falls outside the displayed image.
 */
export function pointerToImage(
  offsetX: number,
  offsetY: number,
  displayWidth: number,
  displayHeight: number,
  imageWidth: number,
  imageHeight: number,
): { x: number; y: number } | null {
  if (displayWidth <= 0 || displayHeight <= 0) return null;
  const x = Math.floor((offsetX / displayWidth) * imageWidth);
  const y = Math.floor((offsetY / displayHeight) * imageHeight);
  if (x < 0 || y < 0 || x >= imageWidth || y >= imageHeight) return null;
  return { x, y };
}
