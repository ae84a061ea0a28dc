/** DOM wiring. All pixel data shown is a verbatim service response; this
 * layer only decodes for display and draws markers/tint on top.
 */

import { ServiceClient } from "./api.js";
import { MARKER_RADIUS, markerColor, pointerToImage, tintMask } from "./overlay.js";
import { UiController, UiState } from "./state.js";
import type { AnimationSpecJson, Tool } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const serviceUrl = el<HTMLInputElement>("service-url");
const fileInput = el<HTMLInputElement>("file-input");
const baseCanvas = el<HTMLCanvasElement>("base-canvas");
const overlayCanvas = el<HTMLCanvasElement>("overlay-canvas");
const banner = el<HTMLDivElement>("banner");
const busyBadge = el<HTMLSpanElement>("busy");
const frameImg = el<HTMLImageElement>("frame-preview");
const plateImg = el<HTMLImageElement>("plate-preview");
const scrubber = el<HTMLInputElement>("scrubber");
const formErrors = el<HTMLDivElement>("form-errors");

const params = new URLSearchParams(location.search);
serviceUrl.value = params.get("service") ?? "http://127.0.0.1:8000";

let controller = makeController();
let baseBitmap: ImageBitmap | null = null;

function makeController(): UiController {
  return new UiController(new ServiceClient(serviceUrl.value), render);
}

serviceUrl.addEventListener("change", () => {
  controller = makeController();
});

fileInput.addEventListener("change", async () => {
  const file = fileInput.files?.[0];
  if (!file) return;
  const bytes = new Uint8Array(await file.arrayBuffer());
  baseBitmap = await createImageBitmap(new Blob([bytes], { type: "image/png" }));
  baseCanvas.width = overlayCanvas.width = baseBitmap.width;
  baseCanvas.height = overlayCanvas.height = baseBitmap.height;
  baseCanvas.getContext("2d")!.drawImage(baseBitmap, 0, 0);
  await controller.open(bytes, baseBitmap.width, baseBitmap.height);
});

overlayCanvas.addEventListener("pointerdown", (ev) => {
  const rect = overlayCanvas.getBoundingClientRect();
  const hit = pointerToImage(
    ev.clientX - rect.left,
    ev.clientY - rect.top,
    rect.width,
    rect.height,
    controller.state.imageWidth,
    controller.state.imageHeight,
  );
  if (hit) controller.placeClick(hit.x, hit.y);
});

for (const tool of ["positive", "negative", "erase-click"] as Tool[]) {
  el<HTMLButtonElement>(`tool-${tool}`).addEventListener("click", () => {
    controller.setTool(tool);
  });
}
el<HTMLButtonElement>("undo-click").addEventListener("click", () => {
  controller.eraseLastClick();
});

el<HTMLButtonElement>("show-plate").addEventListener("click", async () => {
  await controller.fetchPlate();
  if (controller.state.platePng) {
    plateImg.src = URL.createObjectURL(
      new Blob([controller.state.platePng as BlobPart], { type: "image/png" }),
    );
  }
});

const FORM_FIELDS: (keyof AnimationSpecJson)[] = [
  "kind",
  "amplitude",
  "waves",
  "speed",
  "phase0",
  "frames",
  "duration",
];
for (const field of FORM_FIELDS) {
  const input = el<HTMLInputElement>(`form-${field}`);
  input.addEventListener("change", () => {
    const raw = input.value;
    controller.updateForm(field, field === "kind" ? raw : Number(raw));
  });
}

scrubber.addEventListener("input", () => {
  void controller.scrub(Number(scrubber.value)).then((frame) => {
    if (frame) {
      frameImg.src = URL.createObjectURL(new Blob([frame as BlobPart], { type: "image/png" }));
    }
  });
});

el<HTMLButtonElement>("export-gif").addEventListener("click", async () => {
  const data = await controller.exportGif();
  if (!data) return;
  const a = document.createElement("a");
  a.href = URL.createObjectURL(new Blob([data as BlobPart], { type: "image/gif" }));
  a.download = "stillmotion.gif";
  a.click();
});

async function render(state: UiState): Promise<void> {
  banner.textContent = state.error ?? "";
  banner.style.display = state.error ? "block" : "none";
  busyBadge.style.visibility = state.busy ? "visible" : "hidden";
  formErrors.textContent = state.formErrors.join("; ");

  for (const tool of ["positive", "negative", "erase-click"] as Tool[]) {
    el(`tool-${tool}`).classList.toggle("active", state.activeTool === tool);
  }

  const ctx = overlayCanvas.getContext("2d")!;
  ctx.clearRect(0, 0, overlayCanvas.width, overlayCanvas.height);
  if (state.maskPng) {
    const bitmap = await createImageBitmap(
      new Blob([state.maskPng as BlobPart], { type: "image/png" }),
    );
    const scratch = document.createElement("canvas");
    scratch.width = bitmap.width;
    scratch.height = bitmap.height;
    const sctx = scratch.getContext("2d")!;
    sctx.drawImage(bitmap, 0, 0);
    const data = sctx.getImageData(0, 0, bitmap.width, bitmap.height);
    sctx.putImageData(new ImageData(tintMask(data.data), bitmap.width, bitmap.height), 0, 0);
    ctx.drawImage(scratch, 0, 0, overlayCanvas.width, overlayCanvas.height);
  }
  for (const click of state.clicks) {
    ctx.beginPath();
    ctx.arc(click.x + 0.5, click.y + 0.5, MARKER_RADIUS, 0, 2 * Math.PI);
    ctx.fillStyle = markerColor(click.polarity === "positive" ? "positive" : "negative");
    ctx.fill();
    ctx.strokeStyle = "#ffffff";
    ctx.stroke();
  }
}
