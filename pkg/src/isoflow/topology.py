"""Critical points: scalar extrema on grid points, vector zeros in tets.

Scalar extrema come from strict comparison against the six axis-edge
neighbors. Vector zeros are found per tetrahedron: each hexahedral cell is
split into six tets around the main diagonal (i,j,k)-(i+1,j+1,k+1), and a
3x3 solve yields barycentric coordinates of the interpolated zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .volume import VolumeGrid, UnknownFieldError

KIND_SCALAR_MAX = "scalar-max"
KIND_SCALAR_MIN = "scalar-min"
KIND_VECTOR_ZERO = "vector-zero"

#: barycentric feasibility slack
INSIDE_EPS = 1e-9
#: world-distance radius for merging zeros found twice on shared tet faces
MERGE_RADIUS = 1e-6
#: |det| below this counts as a singular (degenerate) system
DET_EPS = 1e-12


@dataclass
class CriticalPoint:
    id: int
    position: np.ndarray  # world triple
    kind: str
    field: str
    value: float  # scalar value at point; 0.0 for vector-zero
    cell: tuple[int, int, int]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "position": [float(v) for v in self.position],
            "value": self.value,
            "field": self.field,
            "cell": list(self.cell),
        }


@dataclass
class TetCell:
    vertices: np.ndarray  # (4, 3) world positions P0..P3
    values: np.ndarray    # (4, 3) vector values at the vertices


@dataclass
class BarycentricSolution:
    p: float
    q: float
    r: float
    s: float
    inside: bool
    degenerate: bool = False
    position: np.ndarray | None = None


# Corner c of a cell has offset bits (c&1, (c>>1)&1, (c>>2)&1) along (x,y,z).
# Six tets share the 0-7 diagonal; each walks the axes in one permutation
# order. Odd permutations get their middle vertices swapped so all six tets
# have positive volume.
_AXIS_BIT = (1, 2, 4)


def _tet_corner_table() -> list[tuple[int, int, int, int]]:
    tets = []
    for perm in itertools.permutations((0, 1, 2)):
        i1 = _AXIS_BIT[perm[0]]
        i2 = i1 | _AXIS_BIT[perm[1]]
        # permutation parity: count inversions
        inv = sum(1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b])
        if inv % 2 == 0:
            tets.append((0, i1, i2, 7))
        else:
            tets.append((0, i2, i1, 7))
    return tets


TET_CORNERS = _tet_corner_table()

_CORNER_OFFSETS = np.array([[c & 1, (c >> 1) & 1, (c >> 2) & 1] for c in range(8)])


def extract_scalar_extrema(grid: VolumeGrid, field: str,
                           include_boundary: bool = False) -> list[CriticalPoint]:
    """Strict local extrema over the 6 axis-edge neighbors.

    Maxima first (value descending), then minima (value ascending);
    plateaus produce nothing. Boundary points only with include_boundary.
    """
    v = grid.scalar_view(field).astype(np.float64)  # (nz, ny, nx)
    nz, ny, nx = v.shape

    is_max = np.ones(v.shape, dtype=bool)
    is_min = np.ones(v.shape, dtype=bool)
    for axis in range(3):
        for sign in (-1, 1):
            shifted = np.roll(v, sign, axis=axis)
            # roll wraps; neutralize the wrapped slab with +-inf
            edge = [slice(None)] * 3
            edge[axis] = 0 if sign == 1 else -1
            lo_mask = shifted.copy()
            lo_mask[tuple(edge)] = -np.inf
            hi_mask = shifted.copy()
            hi_mask[tuple(edge)] = np.inf
            is_max &= v > lo_mask
            is_min &= v < hi_mask

    if not include_boundary:
        interior = np.zeros(v.shape, dtype=bool)
        interior[1:-1, 1:-1, 1:-1] = True
        is_max &= interior
        is_min &= interior

    lo, _ = grid.bounds()
    sp = np.asarray(grid.spacing)

    def collect(mask, kind, ascending):
        kk, jj, ii = np.nonzero(mask)
        vals = v[kk, jj, ii]
        order = np.argsort(vals, kind="stable")
        if not ascending:
            order = order[::-1]
        out = []
        for o in order:
            i, j, k = int(ii[o]), int(jj[o]), int(kk[o])
            pos = lo + np.array([i, j, k]) * sp
            cell = (min(i, nx - 2), min(j, ny - 2), min(k, nz - 2))
            out.append(CriticalPoint(0, pos, kind, field, float(vals[o]), cell))
        return out

    cps = collect(is_max, KIND_SCALAR_MAX, ascending=False)
    cps += collect(is_min, KIND_SCALAR_MIN, ascending=True)
    for n, cp in enumerate(cps):
        cp.id = n
    return cps


def _cell_corner_positions(grid: VolumeGrid, cell) -> np.ndarray:
    lo, _ = grid.bounds()
    sp = np.asarray(grid.spacing)
    base = np.asarray(cell)
    return lo + (base + _CORNER_OFFSETS) * sp


def decompose_cell_tets(grid: VolumeGrid, cell, field: str | None = None) -> list[TetCell]:
    """Six positively-oriented tets exactly tiling the cell.

    When a vector field name is given, tet vertex values are filled from
    its grid samples; otherwise they are zero.
    """
    pos = _cell_corner_positions(grid, cell)
    if field is not None:
        vv = grid.vector_view(field)
        i, j, k = cell
        vals = vv[k:k + 2, j:j + 2, i:i + 2].astype(np.float64)
        corner_vals = np.array([vals[o[2], o[1], o[0]] for o in _CORNER_OFFSETS])
    else:
        corner_vals = np.zeros((8, 3))
    return [
        TetCell(vertices=pos[list(cs)], values=corner_vals[list(cs)])
        for cs in TET_CORNERS
    ]


def find_vector_zero_in_tet(tet: TetCell) -> BarycentricSolution:
    """Solve for the interpolated zero of the tet's linear vector field.

    Columns of the system matrix are value_i - value_3 (i = 0..2); the
    right-hand side is -value_3. A near-zero determinant is reported as a
    degenerate (no zero) outcome.
    """
    v = tet.values
    M = np.column_stack([v[0] - v[3], v[1] - v[3], v[2] - v[3]])
    det = float(np.linalg.det(M))
    if abs(det) < DET_EPS:
        return BarycentricSolution(0.0, 0.0, 0.0, 1.0, inside=False, degenerate=True)
    p, q, r = np.linalg.solve(M, -v[3])
    s = 1.0 - p - q - r
    inside = bool(min(p, q, r, s) >= -INSIDE_EPS)
    position = None
    if inside:
        P = tet.vertices
        position = p * P[0] + q * P[1] + r * P[2] + s * P[3]
    return BarycentricSolution(float(p), float(q), float(r), float(s),
                               inside=inside, position=position)


def extract_vector_critical_points(grid: VolumeGrid, field: str) -> list[CriticalPoint]:
    """All merged interpolated zeros over every cell's six tets.

    Zeros on shared tet faces are found by adjacent tets; candidates are
    visited in (cell, tet) order and merged within MERGE_RADIUS.
    """
    vv = grid.vector_view(field).astype(np.float64)  # (nz, ny, nx, 3)
    nx, ny, nz = grid.dims
    lo, _ = grid.bounds()
    sp = np.asarray(grid.spacing)

    # corner values/positions for every cell, flat order k-major
    kk, jj, ii = np.meshgrid(np.arange(nz - 1), np.arange(ny - 1),
                             np.arange(nx - 1), indexing="ij")
    ci = ii.ravel()
    cj = jj.ravel()
    ck = kk.ravel()
    ncell = ci.size
    corner_vals = np.empty((8, ncell, 3))
    corner_pos = np.empty((8, ncell, 3))
    for c, (ox, oy, oz) in enumerate(_CORNER_OFFSETS):
        corner_vals[c] = vv[ck + oz, cj + oy, ci + ox]
        corner_pos[c] = lo + np.stack([ci + ox, cj + oy, ck + oz], axis=1) * sp

    found = []  # (cell_flat, tet_idx, position)
    for tidx, cs in enumerate(TET_CORNERS):
        v0, v1, v2, v3 = (corner_vals[c] for c in cs)
        M = np.stack([v0 - v3, v1 - v3, v2 - v3], axis=2)  # (ncell, 3, 3) columns
        det = np.linalg.det(M)
        ok = np.abs(det) >= DET_EPS
        if not ok.any():
            continue
        sol = np.linalg.solve(M[ok], -v3[ok][:, :, None])[:, :, 0]  # (n, 3)
        p, q, r = sol[:, 0], sol[:, 1], sol[:, 2]
        s = 1.0 - p - q - r
        inside = (p >= -INSIDE_EPS) & (q >= -INSIDE_EPS) & (r >= -INSIDE_EPS) & (s >= -INSIDE_EPS)
        if not inside.any():
            continue
        idx = np.nonzero(ok)[0][inside]
        P0, P1, P2, P3 = (corner_pos[c][idx] for c in cs)
        w = sol[inside]
        pos = (w[:, :1] * P0 + w[:, 1:2] * P1 + w[:, 2:3] * P2
               + (1.0 - w.sum(axis=1))[:, None] * P3)
        for n, cf in enumerate(idx):
            found.append((int(cf), tidx, pos[n]))

    found.sort(key=lambda t: (t[0], t[1]))
    cps: list[CriticalPoint] = []
    for cf, _tidx, pos in found:
        if any(np.linalg.norm(pos - cp.position) <= MERGE_RADIUS for cp in cps):
            continue
        cell = (int(ci[cf]), int(cj[cf]), int(ck[cf]))
        cps.append(CriticalPoint(len(cps), pos, KIND_VECTOR_ZERO, field, 0.0, cell))
    return cps


def extract_all(grid: VolumeGrid, scalar_field: str | None, vector_field: str | None,
                include_boundary: bool = False) -> list[CriticalPoint]:
    """Scalar extrema followed by vector zeros, ids renumbered globally."""
    cps: list[CriticalPoint] = []
    if scalar_field is not None:
        cps += extract_scalar_extrema(grid, scalar_field, include_boundary)
    if vector_field is not None:
        cps += extract_vector_critical_points(grid, vector_field)
    for n, cp in enumerate(cps):
        cp.id = n
    return cps
