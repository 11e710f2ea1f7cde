import * as THREE from "three";
import { describe, expect, it } from "vitest";
import { buildSceneModel } from "../src/scene";
import { makeScene, toThreeObjects } from "../src/render";
import { MeshJson, SelectionJson } from "../src/types";

const mesh: MeshJson = {
  surface_index: 0,
  isovalue: 0.1,
  opacity: 0.4,
  color: [0.3, 0.5, 0.8],
  vertices: [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [1, 1, 0],
  ],
  triangles: [
    [0, 1, 2],
    [1, 3, 2],
  ],
};

const selection: SelectionJson = {
  chosen: [
    { streamline_id: 0, E: 0.7, from_critical: 3, reason: "critical-guarantee" },
  ],
  rejected_density: [],
  camera: null,
};

const candidates = [
  { id: 0, from_critical: 3, points: [[0, 0, 0], [0.5, 0, 0], [1, 0, 0]] },
];

describe("three.js conversion", () => {
  it("builds one object per drawable with correct types", () => {
    const model = buildSceneModel([mesh], candidates, selection);
    const objects = toThreeObjects(model);
    expect(objects).toHaveLength(2);
    expect(objects[0]).toBeInstanceOf(THREE.Mesh);
    expect(objects[1]).toBeInstanceOf(THREE.Line);
    expect(objects[0].name).toBe("isosurface-0");
    expect(objects[1].name).toBe("streamline-0");
  });

  it("translucent surfaces get transparent materials without depth write", () => {
    const [obj] = toThreeObjects(buildSceneModel([mesh], [], null));
    const mat = (obj as THREE.Mesh).material as THREE.MeshLambertMaterial;
    expect(mat.transparent).toBe(true);
    expect(mat.opacity).toBeCloseTo(0.4);
    expect(mat.depthWrite).toBe(false);
  });

  it("opacity-0 mesh keeps a nonempty bounding box", () => {
    const invisible = { ...mesh, opacity: 0 };
    const [obj] = toThreeObjects(buildSceneModel([invisible], [], null));
    const box = new THREE.Box3().setFromObject(obj);
    expect(box.isEmpty()).toBe(false);
  });

  it("critical streamline material is red", () => {
    const model = buildSceneModel([], candidates, selection);
    const [obj] = toThreeObjects(model);
    const mat = (obj as THREE.Line).material as THREE.LineBasicMaterial;
    expect(mat.color.getHex()).toBe(0xcc2222);
  });

  it("makeScene adds lights plus the drawables", () => {
    const scene = makeScene(buildSceneModel([mesh], candidates, selection));
    const lights = scene.children.filter((c) => (c as THREE.Light).isLight);
    expect(lights.length).toBeGreaterThanOrEqual(2);
    expect(scene.children.length).toBe(lights.length + 2);
  });
});
