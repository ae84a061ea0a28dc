/** Client-side animation-spec validation.
 *
 * Mirrors the service's rules exactly: any form this module accepts, the
 * service accepts (checked by a sampled-forms test against a live service).
 */

import type { AnimationSpecJson } from "./types.js";

const KINDS = ["hwave", "vwave", "jump"];

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

export function validateSpec(obj: unknown): string[] {
  const problems: string[] = [];
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    return ["animation spec must be a JSON object"];
  }
  const spec = obj as Record<string, unknown>;
  if (!KINDS.includes(spec.kind as string)) {
    problems.push(`kind must be one of ${KINDS.join("|")}, got ${JSON.stringify(spec.kind)}`);
  }

  const num = (
    name: string,
    fallback: number,
    cond: (v: number) => boolean,
    desc: string,
  ) => {
    const val = spec[name] === undefined ? fallback : spec[name];
    if (!isNumber(val) || !cond(val)) {
      problems.push(`${name} must be ${desc}, got ${JSON.stringify(val)}`);
    }
  };

  num("amplitude", 8.0, (v) => v >= 0, "a number >= 0");
  num("waves", 2.0, (v) => v > 0, "a number > 0");
  num("speed", 1.0, () => true, "a number");
  num("phase0", 0.0, () => true, "a number");
  num("frames", 24, (v) => Number.isInteger(v) && v >= 1, "an integer >= 1");
  num("duration", 2.0, (v) => v > 0, "a number > 0");

  const kfs = spec.keyframes;
  if (kfs !== undefined && kfs !== null) {
    problems.push(...validateKeyframes(kfs));
  }
  return problems;
}

function validateKeyframes(kfs: unknown): string[] {
  if (!Array.isArray(kfs)) return ["keyframes invalid: must be an array"];
  if (kfs.length < 2) return ["keyframes invalid: needs at least two keyframes"];
  const rows: { t: number; sx: number; sy: number; ty: number }[] = [];
  for (const kf of kfs) {
    if (typeof kf !== "object" || kf === null) {
      return ["keyframes invalid: entries must be objects"];
    }
    const k = kf as Record<string, unknown>;
    if (
      !isNumber(k.t) ||
      !isNumber(k.scale_x) ||
      !isNumber(k.scale_y) ||
      !isNumber(k.translate_y)
    ) {
      return ["keyframes invalid: entries need numeric t, scale_x, scale_y, translate_y"];
    }
    if (k.scale_x <= 0 || k.scale_y <= 0) {
      return ["keyframes invalid: scale factors must be > 0"];
    }
    rows.push({ t: k.t, sx: k.scale_x, sy: k.scale_y, ty: k.translate_y });
  }
  for (let i = 1; i < rows.length; i++) {
    if (rows[i].t <= rows[i - 1].t) return ["keyframes invalid: times must be strictly increasing"];
  }
  if (rows[0].t !== 0 || rows[rows.length - 1].t !== 1) {
    return ["keyframes invalid: timeline must start at 0 and end at 1"];
  }
  for (const i of [0, rows.length - 1]) {
    const r = rows[i];
    if (r.sx !== 1 || r.sy !== 1 || r.ty !== 0) {
      return ["keyframes invalid: first and last keyframes must be the rest pose"];
    }
  }
  return [];
}

/** Per-field check used by the form so only the edited field lights up. */
export function validateField(
  spec: AnimationSpecJson,
  field: keyof AnimationSpecJson,
  value: unknown,
): string[] {
  const candidate = { ...spec, [field]: value };
  return validateSpec(candidate).filter((p) => p.startsWith(String(field)) || field === "keyframes");
}
