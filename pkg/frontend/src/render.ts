import * as THREE from "three";
import { SceneModel } from "./scene";

/** Build three.js objects from a scene model. Meshes are double-sided and
 * transparent when their opacity is below 1; three sorts transparent objects
 * back to front by default. Opacity 0 surfaces stay in the graph (invisible
 * but still present for bounding-box queries). */
export function toThreeObjects(model: SceneModel): THREE.Object3D[] {
  const objects: THREE.Object3D[] = [];

  for (const m of model.meshes) {
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute(
      "position",
      new THREE.Float32BufferAttribute(m.vertices.flat(), 3),
    );
    geometry.setIndex(m.triangles.flat());
    geometry.computeVertexNormals();
    const material = new THREE.MeshLambertMaterial({
      color: new THREE.Color(...m.color),
      transparent: m.opacity < 1,
      opacity: m.opacity,
      side: THREE.DoubleSide,
      depthWrite: m.opacity >= 1,
    });
    const mesh = new THREE.Mesh(geometry, material);
    mesh.name = `isosurface-${m.surfaceIndex}`;
    objects.push(mesh);
  }

  for (const p of model.polylines) {
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute(
      "position",
      new THREE.Float32BufferAttribute(p.points.flat(), 3),
    );
    const material = new THREE.LineBasicMaterial({
      color: p.color,
      transparent: p.opacity < 1,
      opacity: p.opacity,
    });
    const line = new THREE.Line(geometry, material);
    line.name = `streamline-${p.id}`;
    objects.push(line);
  }
  return objects;
}

export function makeScene(model: SceneModel): THREE.Scene {
  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0xffffff);
  scene.add(new THREE.AmbientLight(0xffffff, 0.6));
  const sun = new THREE.DirectionalLight(0xffffff, 0.8);
  sun.position.set(2, 3, 4);
  scene.add(sun);
  for (const obj of toThreeObjects(model)) {
    scene.add(obj);
  }
  return scene;
}
