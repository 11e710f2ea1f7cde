/** JSON payload shapes exchanged with the geometry server. */

export interface CameraJson {
  eye: [number, number, number];
  target: [number, number, number];
  up: [number, number, number];
  fov_y: number;
  width: number;
  height: number;
  near?: number;
  far?: number;
}

export interface SessionInfo {
  session_id: string;
  dims: number[];
  origin: number[];
  spacing: number[];
  field_names: string[];
  cp_counts: Record<string, number>;
}

export interface MeshJson {
  surface_index: number;
  isovalue: number;
  opacity: number;
  color: [number, number, number];
  vertices: number[][];
  triangles: number[][];
}

export interface StreamlineJson {
  id: number;
  from_critical: number | null;
  points: number[][];
}

export interface ChosenJson {
  streamline_id: number;
  E: number;
  from_critical: number | null;
  reason: "entropy" | "critical-guarantee";
}

export interface SelectionJson {
  chosen: ChosenJson[];
  rejected_density: number[];
  camera: CameraJson | null;
}

export interface CriticalPointJson {
  id: number;
  kind: string;
  position: [number, number, number];
  value: number;
  field: string;
  cell: number[];
}

export interface IsovalueSuggestionJson {
  critical_point_id: number;
  suggested_isovalue: number;
  offset: number;
}

export interface CriticalPointsResponse {
  critical_points: CriticalPointJson[];
  isovalue_suggestions: IsovalueSuggestionJson[];
}

export interface SelectOptions {
  k: number;
  guarantee_critical: boolean;
  density_control: boolean;
  cell_stride: number;
  mode: "coarse" | "per-segment";
}
