"""Marching-cubes isosurfaces with per-surface opacity.

The 256-case triangle table is derived at import time by tracing the
isosurface polygon across cell faces: every crossing edge is paired with
exactly one partner on each of its two faces, so the crossing edges form
closed loops that are fan-triangulated. Faces with four crossings are
disambiguated by a fixed sign rule (the above-isovalue corners are kept
separated) that depends only on the face's corner signs, so adjacent cells
always agree and meshes stay watertight after welding. No asymptotic
decider is applied.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .volume import VolumeGrid, DataError
from .topology import CriticalPoint, KIND_SCALAR_MAX, KIND_SCALAR_MIN

# Corner c has offset bits (c&1, (c>>1)&1, (c>>2)&1) along (x, y, z).
_CORNER = np.array([[c & 1, (c >> 1) & 1, (c >> 2) & 1] for c in range(8)])

_EDGES = [(0, 1), (2, 3), (4, 5), (6, 7),
          (0, 2), (1, 3), (4, 6), (5, 7),
          (0, 4), (1, 5), (2, 6), (3, 7)]

_EDGE_OF = {frozenset(e): n for n, e in enumerate(_EDGES)}

# each face as a corner cycle (consecutive corners differ by one bit)
_FACES = [(0, 2, 6, 4),   # x = 0
          (1, 3, 7, 5),   # x = 1
          (0, 1, 5, 4),   # y = 0
          (2, 3, 7, 6),   # y = 1
          (0, 1, 3, 2),   # z = 0
          (4, 5, 7, 6)]   # z = 1


def _case_polygons(code: int) -> list[list[int]]:
    above = [(code >> c) & 1 for c in range(8)]
    crossing = [n for n, (a, b) in enumerate(_EDGES) if above[a] != above[b]]
    if not crossing:
        return []
    partners: dict[int, list[int]] = {e: [] for e in crossing}

    def pair(ea, eb):
        partners[ea].append(eb)
        partners[eb].append(ea)

    for face in _FACES:
        fedges = [_EDGE_OF[frozenset((face[n], face[(n + 1) % 4]))] for n in range(4)]
        fcross = [n for n in range(4) if fedges[n] in crossing]
        if len(fcross) == 2:
            pair(fedges[fcross[0]], fedges[fcross[1]])
        elif len(fcross) == 4:
            # alternating signs: cut off each above corner separately
            if above[face[0]]:
                pair(fedges[3], fedges[0])  # around corner 0
                pair(fedges[1], fedges[2])  # around corner 2
            else:
                pair(fedges[0], fedges[1])  # around corner 1
                pair(fedges[2], fedges[3])  # around corner 3

    polygons = []
    seen: set[int] = set()
    for start in crossing:
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            a, b = partners[cur]
            nxt = b if a == prev else a
            if nxt == start:
                break
            loop.append(nxt)
            seen.add(nxt)
            prev, cur = cur, nxt
        polygons.append(loop)
    return polygons


def _build_tri_table() -> list[list[tuple[int, int, int]]]:
    table = []
    for code in range(256):
        tris = []
        for poly in _case_polygons(code):
            for n in range(1, len(poly) - 1):
                tris.append((poly[0], poly[n], poly[n + 1]))
        table.append(tris)
    return table


TRI_TABLE = _build_tri_table()


@dataclass
class IsosurfaceMesh:
    surface_index: int
    isovalue: float
    opacity: float
    vertices: np.ndarray  # (N, 3) float64
    triangles: np.ndarray  # (M, 3) int32
    color: tuple[float, float, float] = (0.5, 0.6, 0.9)

    def is_empty(self) -> bool:
        return len(self.triangles) == 0

    def to_dict(self) -> dict:
        return {
            "surface_index": self.surface_index,
            "isovalue": self.isovalue,
            "opacity": self.opacity,
            "color": list(self.color),
            "vertices": [[float(v) for v in p] for p in self.vertices],
            "triangles": [[int(v) for v in t] for t in self.triangles],
        }


@dataclass
class IsovalueSuggestion:
    critical_point_id: int
    suggested_isovalue: float
    offset: float


def suggest_isovalues(grid: VolumeGrid, cps: list[CriticalPoint],
                      offset_fraction: float = 0.05) -> list[IsovalueSuggestion]:
    """One isovalue per scalar extremum, nudged into the field range.

    Maxima are offset downward and minima upward by offset_fraction of the
    field range, so the suggested level set actually encloses the extremum.
    """
    if not 0.0 < offset_fraction < 1.0:
        raise ValueError(f"offset_fraction must be in (0, 1), got {offset_fraction}")
    out = []
    for cp in cps:
        if cp.kind not in (KIND_SCALAR_MAX, KIND_SCALAR_MIN):
            raise DataError(f"critical point {cp.id} has kind {cp.kind}; "
                            "isovalue suggestions need scalar extrema")
        data = grid.scalar_field(cp.field).data
        offset = offset_fraction * float(data.max() - data.min())
        if cp.kind == KIND_SCALAR_MAX:
            iso = cp.value - offset
        else:
            iso = cp.value + offset
        out.append(IsovalueSuggestion(cp.id, iso, offset))
    return out


def _tri_gradient(corner_vals: np.ndarray, u: float, v: float, w: float,
                  spacing: np.ndarray) -> np.ndarray:
    """World-space gradient of the cell's trilinear interpolant at (u,v,w)."""
    c = corner_vals  # indexed by corner id
    def lerp2(a, b, c_, d, s, t):
        return (a * (1 - s) * (1 - t) + b * s * (1 - t)
                + c_ * (1 - s) * t + d * s * t)
    gx = lerp2(c[1] - c[0], c[3] - c[2], c[5] - c[4], c[7] - c[6], v, w)
    gy = lerp2(c[2] - c[0], c[3] - c[1], c[6] - c[4], c[7] - c[5], u, w)
    gz = lerp2(c[4] - c[0], c[5] - c[1], c[6] - c[2], c[7] - c[3], u, v)
    return np.array([gx, gy, gz]) / spacing


def polygonize(grid: VolumeGrid, field: str, isovalue: float, opacity: float = 0.4,
               surface_index: int = 0,
               color: tuple[float, float, float] = (0.5, 0.6, 0.9)) -> IsosurfaceMesh:
    """Standard marching cubes; triangle normals point toward increasing value.

    Vertices are emitted per cell (unwelded); see weld_vertices. An isovalue
    outside the field range yields an empty mesh.
    """
    if not 0.0 <= opacity <= 1.0:
        raise ValueError(f"opacity must be in [0, 1], got {opacity}")
    s = grid.scalar_view(field).astype(np.float64)
    nz, ny, nx = s.shape
    lo, _ = grid.bounds()
    sp = np.asarray(grid.spacing, dtype=np.float64)

    above = s > isovalue
    codes = np.zeros((nz - 1, ny - 1, nx - 1), dtype=np.uint16)
    for c, (ox, oy, oz) in enumerate(_CORNER):
        codes |= above[oz:oz + nz - 1, oy:oy + ny - 1, ox:ox + nx - 1].astype(np.uint16) << c

    hot = np.argwhere((codes != 0) & (codes != 255))  # (k, j, i) sorted C-order

    verts: list[np.ndarray] = []
    tris: list[tuple[int, int, int]] = []
    for k, j, i in hot:
        code = int(codes[k, j, i])
        case = TRI_TABLE[code]
        if not case:
            continue
        cv = s[k:k + 2, j:j + 2, i:i + 2]
        corner_vals = np.array([cv[o[2], o[1], o[0]] for o in _CORNER])
        base = lo + np.array([i, j, k]) * sp
        edge_vertex: dict[int, int] = {}
        edge_local: dict[int, np.ndarray] = {}

        def vertex_on(edge: int) -> int:
            got = edge_vertex.get(edge)
            if got is not None:
                return got
            a, b = _EDGES[edge]
            va, vb = corner_vals[a], corner_vals[b]
            t = (isovalue - va) / (vb - va)
            local = _CORNER[a] + t * (_CORNER[b] - _CORNER[a])
            verts.append(base + local * sp)
            edge_vertex[edge] = len(verts) - 1
            edge_local[edge] = local
            return edge_vertex[edge]

        for ea, eb, ec in case:
            ia, ib, ic = vertex_on(ea), vertex_on(eb), vertex_on(ec)
            pa, pb, pc = edge_local[ea], edge_local[eb], edge_local[ec]
            centroid = (pa + pb + pc) / 3.0
            grad = _tri_gradient(corner_vals, *centroid, sp)
            normal = np.cross((pb - pa) * sp, (pc - pa) * sp)
            if float(normal @ grad) < 0.0:
                ia, ib = ib, ia
            tris.append((ia, ib, ic))

    vertices = np.array(verts) if verts else np.zeros((0, 3))
    triangles = np.array(tris, dtype=np.int32) if tris else np.zeros((0, 3), dtype=np.int32)
    return IsosurfaceMesh(surface_index, float(isovalue), float(opacity),
                          vertices, triangles, color)


def weld_vertices(mesh: IsosurfaceMesh, radius: float = 1e-9) -> IsosurfaceMesh:
    """Merge coincident vertices (same position within radius)."""
    if len(mesh.vertices) == 0:
        return mesh
    keys = np.round(mesh.vertices / radius).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    new_verts = mesh.vertices[first]
    new_tris = inverse[mesh.triangles].astype(np.int32)
    return IsosurfaceMesh(mesh.surface_index, mesh.isovalue, mesh.opacity,
                          new_verts, new_tris, mesh.color)


def mesh_stats(mesh: IsosurfaceMesh) -> dict:
    """Triangle count, total area, edge-manifold closedness, bounding box."""
    if mesh.is_empty():
        return {"triangle_count": 0, "area": 0.0, "closed": True, "bbox": None}
    v = mesh.vertices
    t = mesh.triangles
    a = v[t[:, 1]] - v[t[:, 0]]
    b = v[t[:, 2]] - v[t[:, 0]]
    area = float(0.5 * np.linalg.norm(np.cross(a, b), axis=1).sum())

    edges = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    _, counts = np.unique(edges, axis=0, return_counts=True)
    closed = bool((counts == 2).all())

    bbox = {"min": [float(x) for x in v.min(axis=0)],
            "max": [float(x) for x in v.max(axis=0)]}
    return {"triangle_count": int(len(t)), "area": area, "closed": closed,
            "bbox": bbox}


def export_obj(meshes: list[IsosurfaceMesh], obj_path, mtl_path=None) -> None:
    """ASCII OBJ export; opacity goes into the material dissolve value."""
    lines = []
    mtl_lines = []
    if mtl_path is not None:
        lines.append(f"mtllib {mtl_path.name if hasattr(mtl_path, 'name') else mtl_path}")
    offset = 1
    for mesh in meshes:
        name = f"surface_{mesh.surface_index}"
        lines.append(f"o {name}")
        if mtl_path is not None:
            mtl_lines.append(f"newmtl {name}")
            r, g, b = mesh.color
            mtl_lines.append(f"Kd {r:.6g} {g:.6g} {b:.6g}")
            mtl_lines.append(f"d {mesh.opacity:.6g}")
            lines.append(f"usemtl {name}")
        for p in mesh.vertices:
            lines.append(f"v {p[0]:.9g} {p[1]:.9g} {p[2]:.9g}")
        for t in mesh.triangles:
            lines.append(f"f {t[0] + offset} {t[1] + offset} {t[2] + offset}")
        offset += len(mesh.vertices)
    with open(obj_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    if mtl_path is not None:
        with open(mtl_path, "w") as fh:
            fh.write("\n".join(mtl_lines) + "\n")
