import * as THREE from "three";
import { ApiClient } from "./api";
import { OrbitState, eyePosition, toCameraJson } from "./camera";
import { DragTracker } from "./controls";
import { makeScene } from "./render";
import { SelectionController } from "./selection";
import { buildSceneModel } from "./scene";
import { MeshJson, SelectionJson, StreamlineJson } from "./types";

function banner(text: string): void {
  const el = document.getElementById("banner")!;
  el.textContent = text;
  el.style.display = text ? "block" : "none";
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server") ?? "http://localhost:7870";
  const sessionId = params.get("session");
  if (sessionId === null) {
    banner("missing ?session=... (create one via POST /sessions)");
    return;
  }
  const client = new ApiClient(server);

  const canvas = document.getElementById("view") as HTMLCanvasElement;
  const width = canvas.clientWidth || 800;
  const height = canvas.clientHeight || 600;
  const renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
  renderer.setSize(width, height, false);

  let meshes: MeshJson[] = [];
  let candidates: StreamlineJson[] = [];
  let selection: SelectionJson | null = null;
  let ghost = false;

  const orbit: OrbitState = {
    target: [0.5, 0.5, 0.5],
    distance: 2.5,
    azimuth: 0,
    elevation: 0.3,
    fovY: 0.9,
    width,
    height,
  };

  const threeCamera = new THREE.PerspectiveCamera(
    (orbit.fovY * 180) / Math.PI,
    width / height,
    0.001,
    100,
  );

  function redraw(state: OrbitState): void {
    const eye = eyePosition(state);
    threeCamera.position.set(eye[0], eye[1], eye[2]);
    threeCamera.lookAt(...state.target);
    const scene = makeScene(buildSceneModel(meshes, candidates, selection, ghost));
    renderer.render(scene, threeCamera);
  }

  const controller = new SelectionController(client, sessionId, {
    onApply: (result) => {
      selection = result;
      banner("");
      redraw(tracker.camera);
    },
    onError: (err) => banner(`selection failed: ${err}`),
  });

  const tracker = new DragTracker(orbit, {
    onCameraChange: (state) => redraw(state),
    onDragEnd: (state) => void controller.dragEnded(toCameraJson(state)),
  });

  canvas.addEventListener("pointerdown", (e) => tracker.pointerDown(e.clientX, e.clientY));
  canvas.addEventListener("pointermove", (e) => tracker.pointerMove(e.clientX, e.clientY));
  window.addEventListener("pointerup", () => tracker.pointerUp());
  canvas.addEventListener("wheel", (e) => {
    e.preventDefault();
    tracker.wheel(e.deltaY);
  });

  async function reloadGeometry(): Promise<void> {
    meshes = await client.getMeshes(sessionId!);
    candidates = await client.getStreamlines(sessionId!);
  }

  function bindPanel(): void {
    const kSlider = document.getElementById("k") as HTMLInputElement;
    kSlider.addEventListener("change", () => {
      controller.options.k = Number(kSlider.value);
      void controller.requestSelection(toCameraJson(tracker.camera));
    });
    const modeBox = document.getElementById("mode") as HTMLInputElement;
    modeBox.addEventListener("change", () => {
      controller.options.mode = modeBox.checked ? "per-segment" : "coarse";
      void controller.requestSelection(toCameraJson(tracker.camera));
    });
    for (const id of ["guarantee", "density"] as const) {
      const box = document.getElementById(id) as HTMLInputElement;
      box.addEventListener("change", () => {
        if (id === "guarantee") controller.options.guarantee_critical = box.checked;
        else controller.options.density_control = box.checked;
        void controller.requestSelection(toCameraJson(tracker.camera));
      });
    }
    const ghostBox = document.getElementById("ghost") as HTMLInputElement;
    ghostBox.addEventListener("change", () => {
      ghost = ghostBox.checked;
      redraw(tracker.camera);
    });
  }

  async function fillIsovalueList(): Promise<void> {
    const cps = await client.getCriticalPoints(sessionId!);
    const list = document.getElementById("isovalues")!;
    const opacityInput = document.getElementById("opacity") as HTMLInputElement;
    for (const sug of cps.isovalue_suggestions) {
      const btn = document.createElement("button");
      btn.textContent = sug.suggested_isovalue.toPrecision(4);
      btn.addEventListener("click", async () => {
        await client.addIsosurface(
          sessionId!,
          sug.suggested_isovalue,
          Number(opacityInput.value),
        );
        await reloadGeometry();
        void controller.requestSelection(toCameraJson(tracker.camera));
      });
      list.appendChild(btn);
    }
  }

  try {
    await reloadGeometry();
    bindPanel();
    await fillIsovalueList();
    redraw(orbit);
    void controller.requestSelection(toCameraJson(orbit));
  } catch (err) {
    banner(`server unreachable: ${err}`);
  }
}

void start();
