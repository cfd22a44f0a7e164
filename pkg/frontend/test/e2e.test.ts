/** End-to-end editor criteria against a live humotion service.
 *
 * Spawns `python3 -m humotion serve` on a free port with a throwaway data
 * directory, then drives the real EditorSession through the three editor
 * guarantees: space toggling never rewrites the document, an abstract
 * extension edit lands correctly in the stored joint-space frame, and a
 * saved timeline reloads identically.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { ApiClient, ConflictError } from "../src/api.js";
import { MotionDoc, newMotion, serializeMotion } from "../src/document.js";
import { EditorSession } from "../src/session.js";

const KNEE_LEFT = 11;
const KNEE_RIGHT = 17;
const ELBOW_LEFT = 4;
const ELBOW_RIGHT = 7;

let child: ChildProcess;
let dataDir: string;
let api: ApiClient;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.once("error", reject);
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port assigned"));
      }
    });
  });
}

async function waitForService(base: string): Promise<void> {
  for (let attempt = 0; attempt < 150; attempt++) {
    try {
      const res = await fetch(base + "/api/model");
      if (res.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error("service did not come up");
}

/** A standing pose bent at knees and elbows, away from the straight-limb
 * branch points so inverse-space round trips are well conditioned. */
function bentDoc(name: string, hash: string): MotionDoc {
  const doc = newMotion(name, hash);
  for (const frame of doc.frames) {
    frame.positions[10] = -0.5; // left hip pitch
    frame.positions[KNEE_LEFT] = 1.0;
    frame.positions[13] = -0.5; // left ankle pitch
    frame.positions[16] = -0.5; // right hip pitch
    frame.positions[KNEE_RIGHT] = 1.0;
    frame.positions[19] = -0.5; // right ankle pitch
    frame.positions[ELBOW_LEFT] = -0.5;
    frame.positions[ELBOW_RIGHT] = -0.5;
  }
  doc.frames[0]!.duration = 0.8;
  return doc;
}

beforeAll(async () => {
  const port = await freePort();
  dataDir = mkdtempSync(join(tmpdir(), "humotion-editor-e2e-"));
  child = spawn("python3", ["-m", "humotion", "serve", "--port", String(port)], {
    env: { ...process.env, HUMOTION_DATA_DIR: dataDir },
    stdio: "ignore",
  });
  api = new ApiClient(`http://127.0.0.1:${port}`);
  await waitForService(api.baseUrl);
});

afterAll(async () => {
  if (child) {
    child.kill("SIGTERM");
    await new Promise((resolve) => child.once("exit", resolve));
  }
  rmSync(dataDir, { recursive: true, force: true });
});

describe("space toggling against the live converter", () => {
  it("leaves the loaded document byte-identical", async () => {
    const session = await EditorSession.load(api, "wave");
    const before = session.serialize();
    for (const space of ["abstract", "inverse", "joint", "abstract", "inverse"] as const) {
      session.setSpace(space);
      await session.viewPose();
    }
    expect(session.serialize()).toBe(before);
    expect(session.dirty).toBe(false);
  });

  it("round-trip self-test stays under 1e-9 on a well-conditioned pose", async () => {
    const model = await api.getModel();
    const doc = bentDoc("selftest_pose", model.jointOrderHash);
    await api.putMotion("selftest_pose", serializeMotion(doc));
    const session = await EditorSession.load(api, "selftest_pose");
    for (const result of await session.selfTest()) {
      expect(result.maxError).toBeLessThan(1e-9);
    }
  });
});

describe("abstract-space editing", () => {
  it("full extension straightens the knee in the stored joint frame", async () => {
    const model = await api.getModel();
    expect(model.jointOrder[KNEE_LEFT]).toBe("lKneePitch");

    const doc = bentDoc("bent_leg", model.jointOrderHash);
    await api.putMotion("bent_leg", serializeMotion(doc));

    const session = await EditorSession.load(api, "bent_leg");
    expect(session.frame.positions[KNEE_LEFT]).toBeCloseTo(1.0, 12);

    session.setSpace("abstract");
    const view = (await session.viewPose()) as { leftLeg: { extension: number } };
    expect(view.leftLeg.extension).toBeLessThan(1);

    const result = await session.editPoseField("leftLeg.extension", 1.0);
    expect(result.clamped).toBe(false);
    expect(Math.abs(session.frame.positions[KNEE_LEFT]!)).toBeLessThan(1e-9);
    // the other leg is untouched by a left-leg field edit
    expect(session.frame.positions[KNEE_RIGHT]).toBeCloseTo(1.0, 9);
    expect(session.frame.poseSpace).toBe("abstract");
    expect(session.dirty).toBe(true);
  });

  it("flags an unreachable inverse-space target as clamped", async () => {
    const model = await api.getModel();
    const doc = bentDoc("reach_test", model.jointOrderHash);
    await api.putMotion("reach_test", serializeMotion(doc));
    const session = await EditorSession.load(api, "reach_test");
    session.setSpace("inverse");
    const result = await session.editPoseField("leftLeg.position[2]", -2.0);
    expect(result.clamped).toBe(true);
    expect(session.warnings.length).toBeGreaterThan(0);
  });
});

describe("save and reload", () => {
  it("reproduces the timeline identically through the store", async () => {
    const model = await api.getModel();
    const doc = bentDoc("timeline_id", model.jointOrderHash);
    doc.frames[0]!.duration = 0.45;
    await api.putMotion("timeline_id", serializeMotion(doc));

    const session = await EditorSession.load(api, "timeline_id");
    session.setSpace("abstract");
    await session.editPoseField("leftLeg.extension", 0.9);
    session.editEffort(KNEE_LEFT, 0.65);
    session.editSupport("ll", 1.0);
    session.duplicateFrame();
    session.setDuration(1, 0.7);

    const savedRaw = session.serialize();
    const knotsBefore = session.knots;
    await session.save();
    expect(session.dirty).toBe(false);

    const stored = await api.getMotion("timeline_id");
    expect(stored.raw).toBe(savedRaw);

    const reloaded = await EditorSession.load(api, "timeline_id");
    expect(reloaded.doc).toEqual(session.doc);
    expect(reloaded.knots).toEqual(knotsBefore);
    expect(reloaded.etag).toBe(session.etag);
    expect(reloaded.serialize()).toBe(savedRaw);
  });

  it("a stale session conflicts on save and can force after warning", async () => {
    const model = await api.getModel();
    const doc = bentDoc("contended", model.jointOrderHash);
    await api.putMotion("contended", serializeMotion(doc));

    const alice = await EditorSession.load(api, "contended");
    const bern = await EditorSession.load(api, "contended");

    alice.editEffort(0, 0.9);
    await alice.save();

    bern.editEffort(0, 0.1);
    let conflict: ConflictError | null = null;
    try {
      await bern.save();
    } catch (err) {
      conflict = err as ConflictError;
    }
    expect(conflict).toBeInstanceOf(ConflictError);
    expect(conflict!.currentEtag).toBe(alice.etag);
    expect(bern.dirty).toBe(true);

    await bern.save({ force: true });
    const final = await api.getMotion("contended");
    expect(final.doc.frames[0]!.efforts[0]).toBe(0.1);
  });

  it("refuses to save a document that fails the schema locally", async () => {
    const model = await api.getModel();
    const session = EditorSession.fromDocument(api, newMotion("invalid_doc", model.jointOrderHash));
    session.frame.efforts[0] = 42;
    await expect(session.save()).rejects.toThrow("efforts");
  });
});
