/** Thin typed client for the stillmotion session API. */

import type { AnimationSpecJson, ClickSetJson } from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function raiseForStatus(r: Response): Promise<void> {
  if (r.ok) return;
  let code = "error";
  let message = `HTTP ${r.status}`;
  try {
    const body = await r.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // body was not the JSON error envelope; keep defaults
  }
  throw new ServiceError(r.status, code, message);
}

export class ServiceClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...a) => fetch(...a),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  async createSession(png: Uint8Array): Promise<string> {
    const r = await this.fetchImpl(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: png as unknown as BodyInit,
    });
    await raiseForStatus(r);
    return (await r.json()).id as string;
  }

  /** Returns the recomputed mask PNG bytes. */
  async updateClicks(id: string, clicks: ClickSetJson): Promise<Uint8Array> {
    const r = await this.fetchImpl(`${this.baseUrl}/sessions/${id}/clicks`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(clicks),
    });
    await raiseForStatus(r);
    return new Uint8Array(await r.arrayBuffer());
  }

  async getInpaint(id: string): Promise<Uint8Array> {
    const r = await this.fetchImpl(`${this.baseUrl}/sessions/${id}/inpaint`);
    await raiseForStatus(r);
    return new Uint8Array(await r.arrayBuffer());
  }

  async renderAnimation(id: string, spec: AnimationSpecJson): Promise<Uint8Array> {
    const r = await this.fetchImpl(`${this.baseUrl}/sessions/${id}/animation`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(spec),
    });
    await raiseForStatus(r);
    return new Uint8Array(await r.arrayBuffer());
  }

  async getFrame(id: string, t: number, spec?: AnimationSpecJson): Promise<Uint8Array> {
    const params = new URLSearchParams({ t: String(t) });
    if (spec !== undefined) params.set("spec", JSON.stringify(spec));
    const r = await this.fetchImpl(`${this.baseUrl}/sessions/${id}/frame?${params}`);
    await raiseForStatus(r);
    return new Uint8Array(await r.arrayBuffer());
  }

  async deleteSession(id: string): Promise<void> {
    const r = await this.fetchImpl(`${this.baseUrl}/sessions/${id}`, { method: "DELETE" });
    await raiseForStatus(r);
  }
}
