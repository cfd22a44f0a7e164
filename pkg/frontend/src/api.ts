/** Typed client for the humotion service API.
 *
 * Every kinematic computation stays server-side; this module only moves
 * JSON documents back and forth and gives the failure modes names the
 * editor can branch on.
 */

import type { MotionDoc } from "./document.js";

export type PoseSpace = "joint" | "abstract" | "inverse";

export interface JointInfo {
  name: string;
  parent: string;
  child: string;
  axis: [number, number, number];
  limits: [number, number];
  index: number;
}

export interface LinkInfo {
  name: string;
  parent: string | null;
  offset: [number, number, number];
  mass: number;
}

export interface ModelInfo {
  apiVersion: number;
  name: string;
  totalMass: number;
  jointOrder: string[];
  jointOrderHash: string;
  joints: JointInfo[];
  links: LinkInfo[];
  dims: Record<string, number>;
}

/** Joint-space pose on the wire: 20 positions in canonical order. */
export interface JointPoseDoc {
  positions: number[];
}

export interface AbstractLegDoc {
  extension: number;
  footAngleX: number;
  footAngleY: number;
  legAngleX: number;
  legAngleY: number;
  legAngleZ: number;
}

export interface ArmDoc {
  extension: number;
  armAngleX: number;
  armAngleY: number;
}

export interface AbstractPoseDoc {
  leftLeg: AbstractLegDoc;
  rightLeg: AbstractLegDoc;
  leftArm: ArmDoc;
  rightArm: ArmDoc;
  headYaw: number;
  headPitch: number;
}

export interface InverseLegDoc {
  position: [number, number, number];
  orientation: [number, number, number, number];
}

export interface InversePoseDoc {
  leftLeg: InverseLegDoc;
  rightLeg: InverseLegDoc;
  leftArm: ArmDoc;
  rightArm: ArmDoc;
  headYaw: number;
  headPitch: number;
}

export type PoseDoc = JointPoseDoc | AbstractPoseDoc | InversePoseDoc;

export interface ConvertResult {
  space: PoseSpace;
  pose: PoseDoc;
  clamped: boolean;
}

export interface LinkTransform {
  position: [number, number, number];
  orientation: [number, number, number, number];
}

export interface FrameSample {
  t: number;
  positions: number[];
  velocities: number[];
  efforts: number[];
  support: Record<string, number>;
  links: Record<string, LinkTransform>;
}

export interface InterpolateResult {
  name: string;
  duration: number;
  rateHz: number;
  samples: FrameSample[];
}

export interface MotionSummary {
  name: string;
  etag: string;
  precondition: string;
  frames: number;
  duration: number;
}

export interface StoredMotion {
  raw: string;
  etag: string;
  doc: MotionDoc;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly fields: { field: string; message: string }[] = [],
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

/** A PUT lost the write race; `currentEtag` is what the store holds now. */
export class ConflictError extends ApiError {
  constructor(detail: string, readonly currentEtag: string | null) {
    super(412, detail);
    this.name = "ConflictError";
  }
}

async function errorFrom(res: Response): Promise<ApiError> {
  let detail = `${res.status} ${res.statusText}`;
  let fields: { field: string; message: string }[] = [];
  let currentEtag: string | null = null;
  try {
    const body = await res.json();
    if (typeof body.detail === "string") detail = body.detail;
    if (Array.isArray(body.errors)) fields = body.errors;
    if (typeof body.currentEtag === "string") currentEtag = body.currentEtag;
  } catch {
    // non-JSON error body; keep the status line
  }
  if (res.status === 412) return new ConflictError(detail, currentEtag);
  return new ApiError(res.status, detail, fields);
}

export interface PreviewFrame extends FrameSample {
  type: "frame";
  playing: boolean;
  duration: number;
}

export type PreviewMessage =
  | PreviewFrame
  | { type: "done"; t: number }
  | { type: "loaded"; name: string; duration: number }
  | { type: "error"; detail: string };

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const res = await fetch(this.baseUrl + path, init);
    if (!res.ok) throw await errorFrom(res);
    return res;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.request(path, init);
    return (await res.json()) as T;
  }

  getModel(): Promise<ModelInfo> {
    return this.json<ModelInfo>("/api/model");
  }

  async convert(from: PoseSpace, to: PoseSpace, pose: PoseDoc): Promise<ConvertResult> {
    return this.json<ConvertResult>("/api/convert", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ from, to, pose }),
    });
  }

  async interpolate(motion: MotionDoc, rateHz: number): Promise<InterpolateResult> {
    return this.json<InterpolateResult>("/api/interpolate", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ motion, rateHz }),
    });
  }

  async listMotions(): Promise<MotionSummary[]> {
    const body = await this.json<{ motions: MotionSummary[] }>("/api/motions");
    return body.motions;
  }

  async getMotion(name: string): Promise<StoredMotion> {
    const res = await this.request(`/api/motions/${encodeURIComponent(name)}`);
    const raw = await res.text();
    const etag = (res.headers.get("etag") ?? "").replace(/"/g, "");
    return { raw, etag, doc: JSON.parse(raw) as MotionDoc };
  }

  /** Store exact bytes; pass `ifMatch` to fail on a concurrent overwrite. */
  async putMotion(name: string, raw: string, ifMatch?: string): Promise<string> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (ifMatch !== undefined) headers["if-match"] = `"${ifMatch}"`;
    const body = await this.json<{ etag: string }>(
      `/api/motions/${encodeURIComponent(name)}`,
      { method: "PUT", headers, body: raw },
    );
    return body.etag;
  }

  /** Browser-only: open the playback preview socket. */
  openPreview(onMessage: (msg: PreviewMessage) => void): WebSocket {
    const ws = new WebSocket(this.baseUrl.replace(/^http/, "ws") + "/ws/preview");
    ws.onmessage = (ev) => onMessage(JSON.parse(ev.data as string) as PreviewMessage);
    return ws;
  }
}
