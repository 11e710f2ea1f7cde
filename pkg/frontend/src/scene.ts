import { MeshJson, SelectionJson, StreamlineJson } from "./types";

export const COLOR_CRITICAL = 0xcc2222; // red: streamline seeded near a critical point
export const COLOR_PLAIN = 0x111111; // near-black
export const COLOR_GHOST = 0x888888;
export const GHOST_OPACITY = 0.05;

export interface PolylineDrawable {
  id: number;
  points: number[][];
  color: number;
  opacity: number;
  ghost: boolean;
}

export interface MeshDrawable {
  surfaceIndex: number;
  vertices: number[][];
  triangles: number[][];
  color: [number, number, number];
  opacity: number;
}

export interface SceneModel {
  meshes: MeshDrawable[];
  polylines: PolylineDrawable[];
}

/** Map server geometry plus the current selection to drawables. Only selected
 * streamlines are drawn solid; the full candidate set can be ghosted for
 * debugging. No other client-side filtering happens here. */
export function buildSceneModel(
  meshes: MeshJson[],
  candidates: StreamlineJson[],
  selection: SelectionJson | null,
  ghostCandidates = false,
): SceneModel {
  const byId = new Map(candidates.map((s) => [s.id, s]));
  const polylines: PolylineDrawable[] = [];
  const selectedIds = new Set<number>();

  for (const entry of selection?.chosen ?? []) {
    const line = byId.get(entry.streamline_id);
    if (line === undefined) {
      continue;
    }
    selectedIds.add(line.id);
    polylines.push({
      id: line.id,
      points: line.points,
      color: entry.from_critical !== null ? COLOR_CRITICAL : COLOR_PLAIN,
      opacity: 1.0,
      ghost: false,
    });
  }
  if (ghostCandidates) {
    for (const line of candidates) {
      if (!selectedIds.has(line.id)) {
        polylines.push({
          id: line.id,
          points: line.points,
          color: COLOR_GHOST,
          opacity: GHOST_OPACITY,
          ghost: true,
        });
      }
    }
  }
  return {
    meshes: meshes.map((m) => ({
      surfaceIndex: m.surface_index,
      vertices: m.vertices,
      triangles: m.triangles,
      color: m.color,
      opacity: m.opacity,
    })),
    polylines,
  };
}

export function drawnStreamlineIds(model: SceneModel): number[] {
  return model.polylines
    .filter((p) => !p.ghost)
    .map((p) => p.id)
    .sort((a, b) => a - b);
}

export function redStreamlineIds(model: SceneModel): number[] {
  return model.polylines
    .filter((p) => !p.ghost && p.color === COLOR_CRITICAL)
    .map((p) => p.id)
    .sort((a, b) => a - b);
}
