/** Stylized segment skeleton and its screen projection.
 *
 * The preview draws straight segments between parent and child link
 * origins using the transforms streamed from the service; no meshes, no
 * client-side kinematics. An orbiting perspective camera (z-up world)
 * turns the segments into 2D strokes for a canvas.
 */

import type { LinkInfo, LinkTransform } from "./api.js";

export type V3 = [number, number, number];

export interface Segment {
  name: string;
  from: V3;
  to: V3;
}

export function skeletonSegments(
  links: LinkInfo[],
  transforms: Record<string, LinkTransform>,
): Segment[] {
  const segments: Segment[] = [];
  for (const link of links) {
    if (!link.parent) continue;
    const parent = transforms[link.parent];
    const child = transforms[link.name];
    if (!parent || !child) continue;
    segments.push({ name: link.name, from: [...parent.position], to: [...child.position] });
  }
  return segments;
}

export interface Camera {
  /** Orbit angle around world z, radians. */
  yaw: number;
  /** Elevation above the horizon, radians, within (-pi/2, pi/2). */
  pitch: number;
  distance: number;
  target: V3;
}

export interface Viewport {
  width: number;
  height: number;
  /** Focal length in pixels. */
  focal: number;
}

export interface ProjectedPoint {
  x: number;
  y: number;
  /** Distance along the view axis; larger is farther away. */
  depth: number;
}

function sub(a: V3, b: V3): V3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function dot(a: V3, b: V3): number {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

function cross(a: V3, b: V3): V3 {
  return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
}

function normalize(a: V3): V3 {
  const n = Math.hypot(a[0], a[1], a[2]);
  return n > 0 ? [a[0] / n, a[1] / n, a[2] / n] : [0, 0, 0];
}

export function cameraEye(cam: Camera): V3 {
  const horizontal = Math.cos(cam.pitch) * cam.distance;
  return [
    cam.target[0] + horizontal * Math.cos(cam.yaw),
    cam.target[1] + horizontal * Math.sin(cam.yaw),
    cam.target[2] + Math.sin(cam.pitch) * cam.distance,
  ];
}

const NEAR = 0.05;

export function projectPoint(p: V3, cam: Camera, view: Viewport): ProjectedPoint | null {
  const eye = cameraEye(cam);
  const forward = normalize(sub(cam.target, eye));
  const right = normalize(cross(forward, [0, 0, 1]));
  const up = cross(right, forward);
  const d = sub(p, eye);
  const depth = dot(d, forward);
  if (depth < NEAR) return null;
  const x = view.width / 2 + (view.focal * dot(d, right)) / depth;
  const y = view.height / 2 - (view.focal * dot(d, up)) / depth;
  return { x, y, depth };
}

export interface ProjectedSegment {
  name: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  depth: number;
}

/** Project for painting; segments come back far-to-near. */
export function projectSegments(
  segments: Segment[],
  cam: Camera,
  view: Viewport,
): ProjectedSegment[] {
  const out: ProjectedSegment[] = [];
  for (const seg of segments) {
    const a = projectPoint(seg.from, cam, view);
    const b = projectPoint(seg.to, cam, view);
    if (!a || !b) continue;
    out.push({
      name: seg.name,
      x1: a.x,
      y1: a.y,
      x2: b.x,
      y2: b.y,
      depth: (a.depth + b.depth) / 2,
    });
  }
  out.sort((p, q) => q.depth - p.depth);
  return out;
}

/** Square ground grid lines centered under the target, in world space. */
export function groundGrid(extent: number, step: number): Segment[] {
  const lines: Segment[] = [];
  for (let k = -extent; k <= extent + 1e-9; k += step) {
    lines.push({ name: "grid", from: [k, -extent, 0], to: [k, extent, 0] });
    lines.push({ name: "grid", from: [-extent, k, 0], to: [extent, k, 0] });
  }
  return lines;
}
