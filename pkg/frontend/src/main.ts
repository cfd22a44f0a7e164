/** Browser entry point: wires the editor session to the DOM.
 *
 * All state lives in EditorSession; this file renders it and forwards
 * events. The preview socket drives both playback and post-edit pose
 * refreshes (an edit reloads the socket's motion and scrubs back to the
 * selected keyframe's knot time).
 */

import { ApiClient, ModelInfo, PreviewMessage, PoseSpace } from "./api.js";
import { newMotion } from "./document.js";
import { EditorSession } from "./session.js";
import { Camera } from "./skeleton.js";
import { drawScene } from "./render.js";

const api = new ApiClient("");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const motionSelect = el<HTMLSelectElement>("motion-select");
const loadButton = el<HTMLButtonElement>("load-button");
const newButton = el<HTMLButtonElement>("new-button");
const saveButton = el<HTMLButtonElement>("save-button");
const selfTestButton = el<HTMLButtonElement>("selftest-button");
const statusLine = el<HTMLSpanElement>("status-line");
const dirtyDot = el<HTMLSpanElement>("dirty-dot");
const frameList = el<HTMLUListElement>("frame-list");
const spaceSelect = el<HTMLSelectElement>("space-select");
const poseFields = el<HTMLDivElement>("pose-fields");
const effortGrid = el<HTMLDivElement>("effort-grid");
const supportFields = el<HTMLDivElement>("support-fields");
const canvas = el<HTMLCanvasElement>("preview-canvas");
const scrubBar = el<HTMLInputElement>("scrub-bar");
const timeLabel = el<HTMLSpanElement>("time-label");
const playButton = el<HTMLButtonElement>("play-button");
const pauseButton = el<HTMLButtonElement>("pause-button");
const rateInput = el<HTMLInputElement>("rate-input");

const ctx = canvas.getContext("2d")!;
const camera: Camera = { yaw: -2.2, pitch: 0.35, distance: 1.6, target: [0, 0, -0.2] };

let model: ModelInfo;
let session: EditorSession | null = null;
let preview: WebSocket | null = null;
let previewReady = false;

function setStatus(text: string, isError = false): void {
  statusLine.textContent = text;
  statusLine.className = isError ? "error" : "";
}

function fmt(x: number): string {
  return Number.isInteger(x) ? String(x) : x.toFixed(3);
}

// preview socket -------------------------------------------------------------

function handlePreview(msg: PreviewMessage): void {
  if (msg.type === "frame") {
    drawScene(ctx, model.links, msg.links, camera);
    scrubBar.value = String(msg.t);
    timeLabel.textContent = `${msg.t.toFixed(2)} s`;
  } else if (msg.type === "error") {
    setStatus(msg.detail, true);
  }
}

function ensurePreview(): WebSocket {
  if (preview && preview.readyState === WebSocket.OPEN) return preview;
  preview = api.openPreview(handlePreview);
  previewReady = false;
  preview.onopen = () => {
    previewReady = true;
    if (session) pushMotionToPreview();
  };
  return preview;
}

function pushMotionToPreview(scrubTo?: number): void {
  if (!session) return;
  const ws = ensurePreview();
  if (!previewReady) return;
  ws.send(JSON.stringify({ cmd: "load", motion: session.doc, rateHz: Number(rateInput.value) || 50 }));
  ws.send(JSON.stringify({ cmd: "scrub", t: scrubTo ?? session.cursor }));
}

// rendering ------------------------------------------------------------------

function renderFrameList(): void {
  frameList.replaceChildren();
  if (!session) return;
  const knots = session.knots;
  session.doc.frames.forEach((frame, i) => {
    const item = document.createElement("li");
    item.className = i === session!.selected ? "frame selected" : "frame";

    const label = document.createElement("span");
    label.textContent = `#${i} @ ${fmt(knots[i] ?? 0)}s`;
    label.onclick = () => {
      session!.selectFrame(i);
      refresh();
      pushMotionToPreview(knots[i]);
    };
    item.appendChild(label);

    const duration = document.createElement("input");
    duration.type = "number";
    duration.step = "0.1";
    duration.value = String(frame.duration);
    duration.title = "seconds to the next keyframe";
    duration.onchange = () => {
      if (!session!.setDuration(i, Number(duration.value))) {
        duration.value = String(frame.duration);
      }
      refresh();
    };
    item.appendChild(duration);

    for (const [text, action] of [
      ["+", () => { session!.selectFrame(i); session!.duplicateFrame(); }],
      ["x", () => session!.deleteFrame(i)],
      ["^", () => session!.moveFrame(i, -1)],
      ["v", () => session!.moveFrame(i, 1)],
    ] as const) {
      const button = document.createElement("button");
      button.textContent = text;
      button.onclick = () => {
        action();
        refresh();
        pushMotionToPreview();
      };
      item.appendChild(button);
    }
    frameList.appendChild(item);
  });
}

function numberField(labelText: string, value: number, onCommit: (v: number) => void): HTMLLabelElement {
  const label = document.createElement("label");
  label.textContent = labelText;
  const input = document.createElement("input");
  input.type = "number";
  input.step = "0.01";
  input.value = fmt(value);
  input.onchange = () => onCommit(Number(input.value));
  label.appendChild(input);
  return label;
}

async function renderPoseFields(): Promise<void> {
  poseFields.replaceChildren();
  if (!session) return;
  const space = session.space;
  const pose = await session.viewPose();

  const commit = (path: string) => async (v: number) => {
    const result = await session!.editPoseField(path, v);
    setStatus(result.clamped ? session!.warnings.join("; ") : "edited", result.clamped);
    await refresh();
    pushMotionToPreview(session!.knots[session!.selected]);
  };

  if (space === "joint") {
    const positions = (pose as { positions: number[] }).positions;
    model.jointOrder.forEach((name, i) => {
      poseFields.appendChild(numberField(name, positions[i] ?? 0, commit(`positions[${i}]`)));
    });
    return;
  }

  const walk = (node: unknown, prefix: string): void => {
    if (typeof node === "number") {
      poseFields.appendChild(numberField(prefix, node, commit(prefix)));
      return;
    }
    if (Array.isArray(node)) {
      node.forEach((child, i) => walk(child, `${prefix}[${i}]`));
      return;
    }
    if (node && typeof node === "object") {
      for (const [key, child] of Object.entries(node)) {
        walk(child, prefix ? `${prefix}.${key}` : key);
      }
    }
  };
  walk(pose, "");
}

function renderEfforts(): void {
  effortGrid.replaceChildren();
  if (!session) return;
  session.frame.efforts.forEach((effort, i) => {
    const input = document.createElement("input");
    input.type = "number";
    input.min = "0";
    input.max = "1";
    input.step = "0.05";
    input.value = fmt(effort);
    input.title = model.jointOrder[i] ?? `joint ${i}`;
    input.onchange = () => {
      const result = session!.editEffort(i, Number(input.value));
      input.value = fmt(session!.frame.efforts[i] ?? 0);
      setStatus(result.clamped ? session!.warnings.join("; ") : "edited", result.clamped);
      markDirty();
    };
    effortGrid.appendChild(input);
  });
}

function renderSupport(): void {
  supportFields.replaceChildren();
  if (!session) return;
  const names: Record<string, string> = { ll: "left leg", rl: "right leg", la: "left arm", ra: "right arm" };
  for (const key of ["ll", "rl", "la", "ra"] as const) {
    supportFields.appendChild(
      numberField(names[key]!, session.frame.support[key], (v) => {
        const result = session!.editSupport(key, v);
        setStatus(result.clamped ? session!.warnings.join("; ") : "edited", result.clamped);
        void refresh();
      }),
    );
  }
}

function markDirty(): void {
  dirtyDot.className = session?.dirty ? "dirty on" : "dirty";
}

async function refresh(): Promise<void> {
  renderFrameList();
  await renderPoseFields();
  renderEfforts();
  renderSupport();
  markDirty();
  if (session) {
    scrubBar.max = String(session.duration);
    timeLabel.textContent = `${session.cursor.toFixed(2)} s`;
  }
}

// top-bar actions ------------------------------------------------------------

async function refreshMotionList(): Promise<void> {
  const motions = await api.listMotions();
  motionSelect.replaceChildren();
  for (const summary of motions) {
    const option = document.createElement("option");
    option.value = summary.name;
    option.textContent = `${summary.name} (${summary.duration.toFixed(1)}s, ${summary.frames}f)`;
    motionSelect.appendChild(option);
  }
}

loadButton.onclick = async () => {
  try {
    session = await EditorSession.load(api, motionSelect.value);
    setStatus(`loaded ${session.doc.name}`);
    await refresh();
    pushMotionToPreview(0);
  } catch (err) {
    setStatus(String(err), true);
  }
};

newButton.onclick = async () => {
  const name = prompt("motion name");
  if (!name) return;
  session = EditorSession.fromDocument(api, newMotion(name, model.jointOrderHash));
  setStatus(`new motion ${name} (unsaved)`);
  await refresh();
  pushMotionToPreview(0);
};

saveButton.onclick = async () => {
  if (!session) return;
  try {
    const etag = await session.save();
    setStatus(`saved (etag ${etag.slice(0, 8)}…)`);
    await refreshMotionList();
  } catch (err: any) {
    if (err?.name === "ConflictError") {
      const overwrite = confirm("someone else saved this motion since you loaded it — overwrite?");
      if (overwrite) {
        const etag = await session.save({ force: true });
        setStatus(`saved over a newer version (etag ${etag.slice(0, 8)}…)`);
        return;
      }
    }
    setStatus(String(err?.message ?? err), true);
  }
  markDirty();
};

selfTestButton.onclick = async () => {
  if (!session) return;
  const results = await session.selfTest();
  const text = results
    .map((r) => `${r.space}: ${r.maxError.toExponential(1)}`)
    .join(", ");
  const ok = results.every((r) => r.maxError < 1e-9);
  setStatus(`round-trip self-test — ${text}`, !ok);
};

spaceSelect.onchange = async () => {
  session?.setSpace(spaceSelect.value as PoseSpace);
  await refresh();
};

// playback -------------------------------------------------------------------

playButton.onclick = () => {
  const ws = ensurePreview();
  if (previewReady && session) {
    pushMotionToPreview();
    ws.send(JSON.stringify({ cmd: "play" }));
  }
};

pauseButton.onclick = () => {
  if (preview && previewReady) preview.send(JSON.stringify({ cmd: "pause" }));
};

scrubBar.oninput = () => {
  if (!session) return;
  const t = session.scrub(Number(scrubBar.value));
  if (preview && previewReady) preview.send(JSON.stringify({ cmd: "scrub", t }));
};

// camera orbit ---------------------------------------------------------------

let dragging: { x: number; y: number } | null = null;
canvas.onmousedown = (ev) => (dragging = { x: ev.clientX, y: ev.clientY });
window.onmouseup = () => (dragging = null);
window.onmousemove = (ev) => {
  if (!dragging) return;
  camera.yaw -= (ev.clientX - dragging.x) * 0.01;
  camera.pitch = Math.min(1.4, Math.max(-1.4, camera.pitch + (ev.clientY - dragging.y) * 0.01));
  dragging = { x: ev.clientX, y: ev.clientY };
  if (session) pushMotionToPreview();
};
canvas.onwheel = (ev) => {
  ev.preventDefault();
  camera.distance = Math.min(5, Math.max(0.4, camera.distance * (ev.deltaY > 0 ? 1.1 : 0.9)));
  if (session) pushMotionToPreview();
};

// boot -----------------------------------------------------------------------

async function boot(): Promise<void> {
  model = await api.getModel();
  setStatus(`connected — ${model.name}, ${model.jointOrder.length} joints, ${model.totalMass.toFixed(1)} kg`);
  await refreshMotionList();
  ensurePreview();
}

boot().catch((err) => setStatus(String(err), true));
