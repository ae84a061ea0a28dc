/** UI state and the controller driving it.
 *
 * Pixels are never touched here: the mask, plate and frame fields hold the
 * service's response bytes verbatim, and the view layer only displays them.
 * Segmentation requests coalesce: at most one is in flight, and rapid click
 * edits collapse into a single request for the newest click list.
 */

import { ServiceClient, ServiceError } from "./api.js";
import {
  AnimationSpecJson,
  Polarity,
  Tool,
  UiClick,
  serializeClicks,
  toClickSet,
} from "./types.js";
import { validateSpec } from "./validate.js";

export interface UiState {
  sessionId: string | null;
  imageWidth: number;
  imageHeight: number;
  clicks: UiClick[];
  /** Serialized click list the current mask corresponds to. */
  acknowledgedClicks: string | null;
  maskPng: Uint8Array | null;
  platePng: Uint8Array | null;
  framePng: Uint8Array | null;
  activeTool: Tool;
  form: AnimationSpecJson;
  formErrors: string[];
  playhead: number;
  busy: boolean;
  error: string | null;
}

export const DEFAULT_FORM: AnimationSpecJson = {
  kind: "jump",
  amplitude: 8,
  waves: 2,
  speed: 1,
  phase0: 0,
  frames: 24,
  duration: 2,
};

const ERASE_RADIUS = 8;

export function initialState(): UiState {
  return {
    sessionId: null,
    imageWidth: 0,
    imageHeight: 0,
    clicks: [],
    acknowledgedClicks: null,
    maskPng: null,
    platePng: null,
    framePng: null,
    activeTool: "positive",
    form: { ...DEFAULT_FORM },
    formErrors: [],
    playhead: 0,
    busy: false,
    error: null,
  };
}

export class UiController {
  state: UiState = initialState();
  private syncPromise: Promise<void> | null = null;
  private listener: (s: UiState) => void;

  constructor(
    private client: ServiceClient,
    listener?: (s: UiState) => void,
  ) {
    this.listener = listener ?? (() => undefined);
  }

  private emit() {
    this.listener(this.state);
  }

  async open(png: Uint8Array, width: number, height: number): Promise<void> {
    this.state = initialState();
    this.state.busy = true;
    this.emit();
    try {
      this.state.sessionId = await this.client.createSession(png);
      this.state.imageWidth = width;
      this.state.imageHeight = height;
      this.state.error = null;
    } catch (e) {
      this.state.error = describe(e);
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  setTool(tool: Tool): void {
    this.state.activeTool = tool;
    this.emit();
  }

  /** Handle a pointer hit in image coordinates. Out-of-bounds: ignored. */
  placeClick(x: number, y: number): void {
    if (this.state.sessionId === null) return;
    if (x < 0 || y < 0 || x >= this.state.imageWidth || y >= this.state.imageHeight) {
      return; // no request either
    }
    if (this.state.activeTool === "erase-click") {
      this.eraseNear(x, y);
      return;
    }
    this.addClick(x, y, this.state.activeTool);
  }

  addClick(x: number, y: number, polarity: Polarity): void {
    this.state.clicks = [...this.state.clicks, { x, y, polarity }];
    this.emit();
    void this.sync();
  }

  eraseLastClick(): void {
    if (this.state.clicks.length === 0) return;
    this.state.clicks = this.state.clicks.slice(0, -1);
    this.emit();
    void this.sync();
  }

  private eraseNear(x: number, y: number): void {
    let best = -1;
    let bestD = ERASE_RADIUS * ERASE_RADIUS;
    this.state.clicks.forEach((c, i) => {
      const d = (c.x - x) ** 2 + (c.y - y) ** 2;
      if (d <= bestD) {
        best = i;
        bestD = d;
      }
    });
    if (best < 0) return;
    this.state.clicks = this.state.clicks.filter((_, i) => i !== best);
    this.emit();
    void this.sync();
  }

  /** Push the newest click list to the service.
   *
   * At most one request is in flight; edits made while waiting coalesce
   * into a follow-up request for the newest click list, and awaiting
   * sync() always joins the whole pass.
   */
  async sync(): Promise<void> {
    if (this.syncPromise !== null) {
      await this.syncPromise;
      return;
    }
    if (
      this.state.sessionId === null ||
      serializeClicks(this.state.clicks) === this.state.acknowledgedClicks
    ) {
      return;
    }
    const pass = this.runSyncPass().finally(() => {
      if (this.syncPromise === pass) this.syncPromise = null;
    });
    this.syncPromise = pass;
    await pass;
  }

  private async runSyncPass(): Promise<void> {
    this.state.busy = true;
    this.emit();
    try {
      for (;;) {
        const snapshot = serializeClicks(this.state.clicks);
        if (snapshot === this.state.acknowledgedClicks) break;
        if (toClickSet(this.state.clicks).positives.length === 0) {
          // nothing to segment; the service would reject, so clear locally
          this.state.maskPng = null;
          this.state.platePng = null;
          this.state.acknowledgedClicks = snapshot;
          this.state.error = null;
          break;
        }
        try {
          const mask = await this.client.updateClicks(
            this.state.sessionId!,
            toClickSet(this.state.clicks),
          );
          if (serializeClicks(this.state.clicks) !== snapshot) {
            continue; // stale response: clicks changed while waiting
          }
          this.state.maskPng = mask;
          this.state.platePng = null; // cache belongs to the old mask
          this.state.acknowledgedClicks = snapshot;
          this.state.error = null;
        } catch (e) {
          this.state.error = describe(e);
          break;
        }
      }
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  updateForm(field: keyof AnimationSpecJson, value: unknown): void {
    const candidate = { ...this.state.form, [field]: value };
    const problems = validateSpec(candidate);
    if (problems.length > 0) {
      this.state.formErrors = problems; // highlight without sending anything
      this.emit();
      return;
    }
    this.state.form = candidate as AnimationSpecJson;
    this.state.formErrors = [];
    this.emit();
  }

  async fetchPlate(): Promise<void> {
    if (this.state.sessionId === null || this.state.maskPng === null) return;
    this.state.busy = true;
    this.emit();
    try {
      this.state.platePng = await this.client.getInpaint(this.state.sessionId);
      this.state.error = null;
    } catch (e) {
      this.state.error = describe(e);
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  /** Fetch the frame at playhead t in [0, 1] for the current form. */
  async scrub(t: number): Promise<Uint8Array | null> {
    if (this.state.sessionId === null || this.state.maskPng === null) return null;
    if (this.state.formErrors.length > 0) return null;
    if (t < 0 || t > 1) return null;
    this.state.playhead = t;
    this.state.busy = true;
    this.emit();
    try {
      const frame = await this.client.getFrame(this.state.sessionId, t, this.state.form);
      this.state.framePng = frame;
      this.state.error = null;
      return frame;
    } catch (e) {
      this.state.error = describe(e);
      return null;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }

  /** Render the full clip; returns GIF bytes for the download trigger. */
  async exportGif(): Promise<Uint8Array | null> {
    if (this.state.sessionId === null || this.state.maskPng === null) return null;
    if (this.state.formErrors.length > 0) return null;
    this.state.busy = true;
    this.emit();
    try {
      const data = await this.client.renderAnimation(this.state.sessionId, this.state.form);
      this.state.error = null;
      return data;
    } catch (e) {
      this.state.error = describe(e);
      return null;
    } finally {
      this.state.busy = false;
      this.emit();
    }
  }
}

function describe(e: unknown): string {
  if (e instanceof ServiceError) return `${e.code}: ${e.message}`;
  return e instanceof Error ? e.message : String(e);
}
