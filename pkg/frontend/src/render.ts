/** Canvas painting for the skeleton preview. */

import type { LinkTransform, LinkInfo } from "./api.js";
import {
  Camera,
  Viewport,
  groundGrid,
  projectPoint,
  projectSegments,
  skeletonSegments,
} from "./skeleton.js";

export interface Theme {
  background: string;
  grid: string;
  bone: string;
  joint: string;
  sole: string;
}

export const DARK_THEME: Theme = {
  background: "#14161a",
  grid: "#2a2e36",
  bone: "#7fd1ff",
  joint: "#ffd166",
  sole: "#8aff80",
};

export function drawScene(
  ctx: CanvasRenderingContext2D,
  links: LinkInfo[],
  transforms: Record<string, LinkTransform>,
  cam: Camera,
  theme: Theme = DARK_THEME,
): void {
  const view: Viewport = {
    width: ctx.canvas.width,
    height: ctx.canvas.height,
    focal: ctx.canvas.height * 1.2,
  };
  ctx.fillStyle = theme.background;
  ctx.fillRect(0, 0, view.width, view.height);

  ctx.strokeStyle = theme.grid;
  ctx.lineWidth = 1;
  for (const line of projectSegments(groundGrid(0.5, 0.1), cam, view)) {
    ctx.beginPath();
    ctx.moveTo(line.x1, line.y1);
    ctx.lineTo(line.x2, line.y2);
    ctx.stroke();
  }

  const bones = projectSegments(skeletonSegments(links, transforms), cam, view);
  for (const bone of bones) {
    ctx.strokeStyle = bone.name.endsWith("Sole") ? theme.sole : theme.bone;
    ctx.lineWidth = bone.name.endsWith("Sole") ? 4 : 3;
    ctx.lineCap = "round";
    ctx.beginPath();
    ctx.moveTo(bone.x1, bone.y1);
    ctx.lineTo(bone.x2, bone.y2);
    ctx.stroke();
  }

  ctx.fillStyle = theme.joint;
  for (const [name, tf] of Object.entries(transforms)) {
    if (name === "trunk") continue;
    const p = projectPoint(tf.position, cam, view);
    if (!p) continue;
    ctx.beginPath();
    ctx.arc(p.x, p.y, 2.5, 0, 2 * Math.PI);
    ctx.fill();
  }
}
