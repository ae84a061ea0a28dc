export type Polarity = "positive" | "negative";

export type Tool = Polarity | "erase-click";

export interface UiClick {
  x: number;
  y: number;
  polarity: Polarity;
}

/** Wire shape of PUT /sessions/{id}/clicks. */
export interface ClickSetJson {
  positives: [number, number][];
  negatives: [number, number][];
}

export interface KeyframeJson {
  t: number;
  scale_x: number;
  scale_y: number;
  translate_y: number;
}

/** Wire shape of animation specs (POST /animation, frame previews). */
export interface AnimationSpecJson {
  kind: "hwave" | "vwave" | "jump";
  amplitude?: number;
  waves?: number;
  speed?: number;
  phase0?: number;
  frames?: number;
  duration?: number;
  keyframes?: KeyframeJson[] | null;
}

export function toClickSet(clicks: UiClick[]): ClickSetJson {
  return {
    positives: clicks.filter((c) => c.polarity === "positive").map((c) => [c.x, c.y]),
    negatives: clicks.filter((c) => c.polarity === "negative").map((c) => [c.x, c.y]),
  };
}

export function serializeClicks(clicks: UiClick[]): string {
  return JSON.stringify(toClickSet(clicks));
}
