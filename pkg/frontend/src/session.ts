/** Editor session state machine.
 *
 * One session edits one motion document. The document always stays
 * joint-space canonical: switching the edit space only changes the view,
 * and a field edit in abstract or inverse space round-trips through the
 * service converter before anything is written back. The dirty flag
 * tracks unsaved changes; saving uses the store's ETag so a concurrent
 * writer surfaces as a conflict instead of being silently overwritten.
 */

import type { ConvertResult, PoseDoc, PoseSpace, StoredMotion } from "./api.js";
import { ConflictError } from "./api.js";
import {
  FrameDoc,
  MotionDoc,
  cloneFrame,
  cloneMotion,
  knotTimes,
  serializeMotion,
  totalDuration,
  validateMotion,
} from "./document.js";

/** The slice of the API the session needs; tests inject a fake. */
export interface SessionApi {
  convert(from: PoseSpace, to: PoseSpace, pose: PoseDoc): Promise<ConvertResult>;
  getMotion(name: string): Promise<StoredMotion>;
  putMotion(name: string, raw: string, ifMatch?: string): Promise<string>;
}

export interface EditResult {
  clamped: boolean;
}

export interface SelfTestResult {
  space: PoseSpace;
  maxError: number;
}

export class ValidationFailed extends Error {
  constructor(readonly errors: string[]) {
    super(`document is not valid: ${errors.join("; ")}`);
    this.name = "ValidationFailed";
  }
}

function setPath(target: unknown, path: string, value: number): void {
  const parts = path.replace(/\[(\d+)\]/g, ".$1").split(".");
  let node: any = target;
  for (const part of parts.slice(0, -1)) {
    node = node?.[part];
    if (node === undefined) throw new Error(`no field ${path}`);
  }
  const leaf = parts[parts.length - 1]!;
  if (typeof node?.[leaf] !== "number") throw new Error(`no numeric field ${path}`);
  node[leaf] = value;
}

export class EditorSession {
  doc: MotionDoc;
  etag: string | null;
  selected = 0;
  space: PoseSpace = "joint";
  dirty = false;
  cursor = 0;
  /** Inline notices from the latest operation (clamps, rejections). */
  warnings: string[] = [];

  private constructor(private readonly api: SessionApi, doc: MotionDoc, etag: string | null) {
    this.doc = doc;
    this.etag = etag;
  }

  static async load(api: SessionApi, name: string): Promise<EditorSession> {
    const stored = await api.getMotion(name);
    return new EditorSession(api, stored.doc, stored.etag);
  }

  /** Start from an unsaved document (new motion, imported file). */
  static fromDocument(api: SessionApi, doc: MotionDoc): EditorSession {
    const session = new EditorSession(api, cloneMotion(doc), null);
    session.dirty = true;
    return session;
  }

  get frame(): FrameDoc {
    const f = this.doc.frames[this.selected];
    if (!f) throw new Error(`no keyframe ${this.selected}`);
    return f;
  }

  get knots(): number[] {
    return knotTimes(this.doc);
  }

  get duration(): number {
    return totalDuration(this.doc);
  }

  selectFrame(index: number): void {
    if (index < 0 || index >= this.doc.frames.length) {
      throw new Error(`no keyframe ${index}`);
    }
    this.selected = index;
  }

  /** View-only: the document is never touched by a space switch. */
  setSpace(space: PoseSpace): void {
    this.space = space;
  }

  /** The selected frame's pose in the active edit space. */
  async viewPose(): Promise<PoseDoc> {
    const joint: PoseDoc = { positions: [...this.frame.positions] };
    if (this.space === "joint") return joint;
    const result = await this.api.convert("joint", this.space, joint);
    return result.pose;
  }

  /** Edit one numeric field of the pose in the active space.
   *
   * The edited pose converts back to joint space server-side before it is
   * stored, so out-of-range targets come back clamped and flagged.
   */
  async editPoseField(path: string, value: number): Promise<EditResult> {
    this.warnings = [];
    const pose = await this.viewPose();
    setPath(pose, path, value);
    const result = await this.api.convert(this.space, "joint", pose);
    const positions = (result.pose as { positions: number[] }).positions;
    this.frame.positions = [...positions];
    this.frame.poseSpace = this.space;
    this.dirty = true;
    if (result.clamped) {
      this.warnings.push(`${path}: value clamped to the reachable range`);
    }
    return { clamped: result.clamped };
  }

  editEffort(jointIndex: number, value: number): EditResult {
    this.warnings = [];
    const clamped = value < 0 || value > 1;
    this.frame.efforts[jointIndex] = Math.min(1, Math.max(0, value));
    this.dirty = true;
    if (clamped) this.warnings.push(`efforts[${jointIndex}]: clamped to [0, 1]`);
    return { clamped };
  }

  editSupport(key: keyof FrameDoc["support"], value: number): EditResult {
    this.warnings = [];
    const clamped = value < 0 || value > 1;
    this.frame.support[key] = Math.min(1, Math.max(0, value));
    this.dirty = true;
    if (clamped) this.warnings.push(`support.${key}: clamped to [0, 1]`);
    return { clamped };
  }

  editVelocity(jointIndex: number, value: number): void {
    this.warnings = [];
    this.frame.velocities[jointIndex] = value;
    this.dirty = true;
  }

  /** Durations drive the timeline; non-final frames must stay positive. */
  setDuration(index: number, value: number): boolean {
    this.warnings = [];
    const lastIndex = this.doc.frames.length - 1;
    if (index < lastIndex && !(value > 0)) {
      this.warnings.push(`frames[${index}].duration: must be positive`);
      return false;
    }
    this.doc.frames[index]!.duration = value;
    this.dirty = true;
    return true;
  }

  /** Insert a copy of the selected frame right after it and select it. */
  duplicateFrame(): void {
    const copy = cloneFrame(this.frame);
    this.doc.frames.splice(this.selected + 1, 0, copy);
    this.fixupDurations();
    this.selected += 1;
    this.dirty = true;
  }

  deleteFrame(index: number): boolean {
    this.warnings = [];
    if (this.doc.frames.length <= 2) {
      this.warnings.push("a motion needs at least two keyframes");
      return false;
    }
    this.doc.frames.splice(index, 1);
    this.selected = Math.min(this.selected, this.doc.frames.length - 1);
    this.dirty = true;
    return true;
  }

  moveFrame(index: number, delta: -1 | 1): boolean {
    const j = index + delta;
    if (j < 0 || j >= this.doc.frames.length) return false;
    const frames = this.doc.frames;
    [frames[index], frames[j]] = [frames[j]!, frames[index]!];
    this.fixupDurations();
    if (this.selected === index) this.selected = j;
    else if (this.selected === j) this.selected = index;
    this.dirty = true;
    return true;
  }

  private fixupDurations(): void {
    const lastIndex = this.doc.frames.length - 1;
    this.doc.frames.forEach((frame, i) => {
      if (i < lastIndex && !(frame.duration > 0)) frame.duration = 1.0;
    });
  }

  scrub(t: number): number {
    this.cursor = Math.min(this.duration, Math.max(0, t));
    return this.cursor;
  }

  serialize(): string {
    return serializeMotion(this.doc);
  }

  /** Validate, then PUT. Uses If-Match when an ETag is known so a
   * concurrent save raises ConflictError instead of clobbering; pass
   * force to take last-writer-wins after the user confirmed. */
  async save(options: { force?: boolean } = {}): Promise<string> {
    const errors = validateMotion(this.doc);
    if (errors.length > 0) throw new ValidationFailed(errors);
    const raw = this.serialize();
    const ifMatch = options.force ? undefined : this.etag ?? undefined;
    try {
      this.etag = await this.api.putMotion(this.doc.name, raw, ifMatch);
    } catch (err) {
      if (err instanceof ConflictError) throw err;
      throw err;
    }
    this.dirty = false;
    return this.etag;
  }

  async reload(): Promise<void> {
    const stored = await this.api.getMotion(this.doc.name);
    this.doc = stored.doc;
    this.etag = stored.etag;
    this.selected = Math.min(this.selected, this.doc.frames.length - 1);
    this.dirty = false;
  }

  /** Conversion round-trip self-test on the selected frame.
   *
   * Sends the stored joint pose out to each space and back, and reports
   * the worst per-joint recovery error. Pure check: nothing is written.
   */
  async selfTest(): Promise<SelfTestResult[]> {
    const joint: PoseDoc = { positions: [...this.frame.positions] };
    const results: SelfTestResult[] = [];
    for (const space of ["abstract", "inverse"] as const) {
      const there = await this.api.convert("joint", space, joint);
      const back = await this.api.convert(space, "joint", there.pose);
      const positions = (back.pose as { positions: number[] }).positions;
      let maxError = 0;
      for (let i = 0; i < positions.length; i++) {
        maxError = Math.max(maxError, Math.abs(positions[i]! - this.frame.positions[i]!));
      }
      results.push({ space, maxError });
    }
    return results;
  }
}
