/** Motion document model.
 *
 * The stored document is always joint-space canonical: frame positions are
 * the 20 joint angles, and a frame's optional `poseSpace` tag only records
 * which space the author last touched it in. Validation here mirrors the
 * service checks so a document that passes locally will be accepted on PUT.
 */

export const N_JOINTS = 20;
export const MOTION_SCHEMA_VERSION = 1;
export const PRECONDITIONS = ["standing", "prone", "supine", "leftSide", "rightSide"] as const;
export const POSE_SPACES = ["joint", "abstract", "inverse"] as const;
const NAME_RE = /^[A-Za-z0-9][A-Za-z0-9_\-]{0,63}$/;

export type Precondition = (typeof PRECONDITIONS)[number];

export interface SupportDoc {
  ll: number;
  rl: number;
  la: number;
  ra: number;
}

export interface FrameDoc {
  duration: number;
  positions: number[];
  velocities: number[];
  efforts: number[];
  support: SupportDoc;
  poseSpace?: "joint" | "abstract" | "inverse";
}

export interface MotionDoc {
  version: number;
  name: string;
  precondition: string;
  jointOrderHash: string;
  frames: FrameDoc[];
}

export function cloneMotion(doc: MotionDoc): MotionDoc {
  return structuredClone(doc);
}

export function cloneFrame(frame: FrameDoc): FrameDoc {
  return structuredClone(frame);
}

/** Start time of each keyframe; the last frame's duration never counts. */
export function knotTimes(doc: MotionDoc): number[] {
  const times = [0];
  for (let i = 0; i < doc.frames.length - 1; i++) {
    times.push(times[i]! + doc.frames[i]!.duration);
  }
  return times;
}

export function totalDuration(doc: MotionDoc): number {
  return doc.frames.slice(0, -1).reduce((acc, f) => acc + f.duration, 0);
}

function checkVector(errors: string[], path: string, value: unknown): value is number[] {
  if (!Array.isArray(value) || value.length !== N_JOINTS) {
    errors.push(`${path} must have ${N_JOINTS} entries`);
    return false;
  }
  if (!value.every((x) => typeof x === "number" && Number.isFinite(x))) {
    errors.push(`${path} must be finite numbers`);
    return false;
  }
  return true;
}

/** Schema errors in a document, empty when it is valid. */
export function validateMotion(doc: MotionDoc): string[] {
  const errors: string[] = [];
  if (doc.version !== MOTION_SCHEMA_VERSION) {
    errors.push(`version must be ${MOTION_SCHEMA_VERSION}`);
  }
  if (!NAME_RE.test(doc.name)) {
    errors.push("name must be alphanumeric with _ or -, at most 64 characters");
  }
  if (!(PRECONDITIONS as readonly string[]).includes(doc.precondition)) {
    errors.push(`precondition must be one of ${PRECONDITIONS.join(", ")}`);
  }
  if (!doc.jointOrderHash) {
    errors.push("jointOrderHash is missing");
  }
  if (doc.frames.length < 2) {
    errors.push("a motion needs at least two keyframes");
  }
  doc.frames.forEach((frame, i) => {
    const path = `frames[${i}]`;
    if (i < doc.frames.length - 1 && !(frame.duration > 0)) {
      errors.push(`${path}.duration must be positive`);
    }
    checkVector(errors, `${path}.positions`, frame.positions);
    checkVector(errors, `${path}.velocities`, frame.velocities);
    if (checkVector(errors, `${path}.efforts`, frame.efforts)) {
      if (frame.efforts.some((e) => e < 0 || e > 1)) {
        errors.push(`${path}.efforts must be in [0, 1]`);
      }
    }
    for (const key of ["ll", "rl", "la", "ra"] as const) {
      const v = frame.support?.[key];
      if (typeof v !== "number" || v < 0 || v > 1) {
        errors.push(`${path}.support.${key} must be in [0, 1]`);
      }
    }
    if (frame.poseSpace !== undefined && !(POSE_SPACES as readonly string[]).includes(frame.poseSpace)) {
      errors.push(`${path}.poseSpace must be one of ${POSE_SPACES.join(", ")}`);
    }
  });
  return errors;
}

/** Canonical serialization: two-space indent, trailing newline. */
export function serializeMotion(doc: MotionDoc): string {
  return JSON.stringify(doc, null, 2) + "\n";
}

export function newFrame(hashless: { positions?: number[] } = {}): FrameDoc {
  return {
    duration: 1.0,
    positions: hashless.positions ? [...hashless.positions] : new Array<number>(N_JOINTS).fill(0),
    velocities: new Array<number>(N_JOINTS).fill(0),
    efforts: new Array<number>(N_JOINTS).fill(0.5),
    support: { ll: 0.5, rl: 0.5, la: 0, ra: 0 },
  };
}

export function newMotion(name: string, jointOrderHash: string, precondition: Precondition = "standing"): MotionDoc {
  return {
    version: MOTION_SCHEMA_VERSION,
    name,
    precondition,
    jointOrderHash,
    frames: [newFrame(), newFrame()],
  };
}
