import { CameraJson } from "./types";

export type Vec3 = [number, number, number];

/** Orbit camera state: spherical coordinates around a fixed target. */
export interface OrbitState {
  target: Vec3;
  distance: number;
  azimuth: number; // radians around +y, 0 looks down -z
  elevation: number; // radians above the horizontal plane
  fovY: number;
  width: number;
  height: number;
}

const MAX_ELEVATION = Math.PI / 2 - 1e-3;

export function clampElevation(e: number): number {
  return Math.max(-MAX_ELEVATION, Math.min(MAX_ELEVATION, e));
}

export function eyePosition(s: OrbitState): Vec3 {
  const ce = Math.cos(s.elevation);
  return [
    s.target[0] + s.distance * ce * Math.sin(s.azimuth),
    s.target[1] + s.distance * Math.sin(s.elevation),
    s.target[2] + s.distance * ce * Math.cos(s.azimuth),
  ];
}

/** Serialize for the server; the up vector stays world-y because elevation
 * never reaches the poles. */
export function toCameraJson(s: OrbitState): CameraJson {
  return {
    eye: eyePosition(s),
    target: [...s.target] as Vec3,
    up: [0, 1, 0],
    fov_y: s.fovY,
    width: s.width,
    height: s.height,
  };
}

export function cameraEquals(a: CameraJson, b: CameraJson, eps = 1e-9): boolean {
  const tri = (p: number[], q: number[]) =>
    p.every((v, i) => Math.abs(v - q[i]) <= eps);
  return (
    tri(a.eye, b.eye) &&
    tri(a.target, b.target) &&
    tri(a.up, b.up) &&
    Math.abs(a.fov_y - b.fov_y) <= eps &&
    a.width === b.width &&
    a.height === b.height
  );
}

/** True when the move is large enough to be worth a reselection request. */
export function cameraMoved(a: CameraJson, b: CameraJson, eps = 1e-6): boolean {
  return !cameraEquals(a, b, eps);
}

export function applyDrag(
  s: OrbitState,
  dxPixels: number,
  dyPixels: number,
): OrbitState {
  const perPixel = Math.PI / s.height;
  return {
    ...s,
    azimuth: s.azimuth - dxPixels * perPixel,
    elevation: clampElevation(s.elevation + dyPixels * perPixel),
  };
}

export function applyZoom(s: OrbitState, wheelDelta: number): OrbitState {
  const factor = Math.exp(wheelDelta * 0.001);
  return { ...s, distance: Math.max(1e-3, s.distance * factor) };
}
