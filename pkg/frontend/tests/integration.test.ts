/**
 * End-to-end viewer loop against a live geometry server.
 *
 * Spawns the Python server on a scratch port, creates a session from a
 * generated dataset, then drives the same controller/tracker wiring the
 * browser uses: a scripted drag end must issue exactly one select request,
 * apply the response, and color red exactly the critical-provenance ids.
 */
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { OrbitState, toCameraJson } from "../src/camera";
import { DragTracker } from "../src/controls";
import { buildSceneModel, redStreamlineIds, drawnStreamlineIds } from "../src/scene";
import { SelectionController } from "../src/selection";
import { SelectionJson, StreamlineJson } from "../src/types";

const PORT = 7941;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let workDir = "";

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      await fetch(`${BASE}/sessions/none/geometry?what=meshes`);
      return; // any HTTP response means the port is up
    } catch {
      await new Promise((r) => setTimeout(r, 200));
    }
  }
  throw new Error("server did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "isoflow-viewer-"));
  const gen = spawnSync("python3", [
    "-m", "isoflow.cli", "gen", "linear", "17", "17", "17",
    "-o", join(workDir, "lin.svf"), "-p", "center=[0.4,0.5,0.6]",
  ]);
  if (gen.status !== 0) {
    throw new Error(`dataset generation failed: ${gen.stderr}`);
  }
  server = spawn("python3", [
    "-m", "isoflow.cli", "serve", "--port", String(PORT),
  ], { stdio: "ignore" });
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill();
  if (workDir) {
    rmSync(workDir, { recursive: true, force: true });
  }
});

const orbit: OrbitState = {
  target: [0.5, 0.5, 0.5],
  distance: 2.5,
  azimuth: 0,
  elevation: 0.2,
  fovY: 0.9,
  width: 800,
  height: 600,
};

async function makeSession(client: ApiClient): Promise<string> {
  const info = await client.createSession(
    join(workDir, "lin.svf"), "scalar", "velocity",
  );
  await client.buildCandidates(info.session_id, {
    uniform_seed_count: 60,
    seeds_per_cp: 6,
    rng_seed: 1,
  });
  return info.session_id;
}

describe("viewer loop against a live server", () => {
  it("drag end: one request, applied response, red = critical ids", async () => {
    let selectCalls = 0;
    const counting = (url: string, init?: RequestInit) => {
      if (url.endsWith("/select")) {
        selectCalls += 1;
      }
      return fetch(url, init);
    };
    const client = new ApiClient(BASE, counting);
    const sid = await makeSession(client);
    await client.addIsosurface(sid, 0.2, 0.4);
    const candidates: StreamlineJson[] = await client.getStreamlines(sid);
    expect(candidates.length).toBeGreaterThan(0);
    const meshes = await client.getMeshes(sid);

    let applied: SelectionJson | null = null;
    let pending: Promise<boolean> | null = null;
    const controller = new SelectionController(client, sid, {
      onApply: (sel) => {
        applied = sel;
      },
    });
    controller.options.k = 8;
    controller.options.guarantee_critical = true;
    const tracker = new DragTracker(orbit, {
      onCameraChange: () => {},
      onDragEnd: (state) => {
        pending = controller.dragEnded(toCameraJson(state));
      },
    });

    tracker.pointerDown(400, 300);
    tracker.pointerMove(460, 300);
    tracker.pointerMove(520, 310);
    tracker.pointerUp();
    expect(pending).not.toBeNull();
    await pending!;

    expect(selectCalls).toBe(1);
    expect(applied).not.toBeNull();
    const selection = applied! as SelectionJson;
    expect(selection.chosen.length).toBeGreaterThan(0);
    expect(controller.selection).toBe(selection);

    const model = buildSceneModel(meshes, candidates, selection);
    const wantDrawn = selection.chosen
      .map((c) => c.streamline_id)
      .sort((a, b) => a - b);
    expect(drawnStreamlineIds(model)).toEqual(wantDrawn);
    const wantRed = selection.chosen
      .filter((c) => c.from_critical !== null)
      .map((c) => c.streamline_id)
      .sort((a, b) => a - b);
    expect(wantRed.length).toBeGreaterThan(0);
    expect(redStreamlineIds(model)).toEqual(wantRed);
  }, 60_000);

  it("rapid drags against the live server apply only the newest", async () => {
    const client = new ApiClient(BASE);
    const sid = await makeSession(client);

    const appliedCams: number[][] = [];
    const controller = new SelectionController(client, sid, {
      onApply: (_sel, cam) => appliedCams.push(cam.eye as number[]),
    });
    controller.options.k = 4;

    const camA = toCameraJson({ ...orbit, azimuth: 0.5 });
    const camB = toCameraJson({ ...orbit, azimuth: 2.1 });
    const p1 = controller.dragEnded(camA);
    const p2 = controller.dragEnded(camB);
    await Promise.all([p1, p2]);

    expect(controller.requestCount).toBe(2);
    expect(appliedCams.length).toBeLessThanOrEqual(1);
    if (appliedCams.length === 1) {
      expect(appliedCams[0]).toEqual(camB.eye);
    }
    // a follow-up drag from the latest camera still works
    const camC = toCameraJson({ ...orbit, azimuth: 3.0 });
    await controller.dragEnded(camC);
    expect(controller.selection).not.toBeNull();
  }, 60_000);
});
