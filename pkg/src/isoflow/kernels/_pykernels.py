"""Pure-numpy kernel implementations (fallback for the compiled core).

Both backends expose the same two entry points:

- trace_batch: fixed-step RK4 advection of many seeds through a
  trilinearly interpolated vector field, one direction at a time.
- ray_surface_counts: per-ray, per-surface triangle intersection counts
  for eye->target rays.

The numpy versions advance all live seeds per step and reduce the ray
casting to three (rays x triangles) matmuls, so they stay usable when the
compiled extension is unavailable.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"


def _sample_vec(vec: np.ndarray, origin: np.ndarray, spacing: np.ndarray,
                pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Trilinear vector samples at (N,3) world points + inside mask."""
    nz, ny, nx = vec.shape[:3]
    t = (pts - origin) / spacing
    inside = np.all((t >= 0.0) & (t <= [nx - 1, ny - 1, nz - 1]), axis=1)
    tc = np.clip(t, 0.0, [nx - 1, ny - 1, nz - 1])
    i = np.clip(np.floor(tc).astype(np.intp), 0, [nx - 2, ny - 2, nz - 2])
    f = tc - i
    ix, iy, iz = i[:, 0], i[:, 1], i[:, 2]
    fx, fy, fz = f[:, 0:1], f[:, 1:2], f[:, 2:3]
    out = np.zeros((len(pts), 3))
    for dz in (0, 1):
        wz = fz if dz else 1.0 - fz
        for dy in (0, 1):
            wy = fy if dy else 1.0 - fy
            for dx in (0, 1):
                wx = fx if dx else 1.0 - fx
                out += vec[iz + dz, iy + dy, ix + dx] * (wx * wy * wz)
    return out, inside


def trace_batch(vec: np.ndarray, origin, spacing, seeds: np.ndarray,
                h: float, max_steps: int, min_speed: float,
                direction: int) -> tuple[np.ndarray, np.ndarray]:
    """RK4-advect every seed up to max_steps in one direction.

    Returns (points, counts): points is (N, max_steps+1, 3) with row 0 the
    seed; counts[n] is the number of valid points for seed n (>= 1). A seed
    stops when its speed drops below min_speed, any RK4 stage or the next
    point leaves the domain, or max_steps is reached.
    """
    vec = np.ascontiguousarray(vec, dtype=np.float64)
    origin = np.asarray(origin, dtype=np.float64)
    spacing = np.asarray(spacing, dtype=np.float64)
    seeds = np.atleast_2d(np.asarray(seeds, dtype=np.float64))
    n = len(seeds)
    points = np.zeros((n, max_steps + 1, 3))
    points[:, 0] = seeds
    counts = np.ones(n, dtype=np.int64)

    pos = seeds.copy()
    _, active = _sample_vec(vec, origin, spacing, pos)
    active = active.copy()
    d = float(direction) * h

    for step in range(max_steps):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        p = pos[idx]
        k1, in1 = _sample_vec(vec, origin, spacing, p)
        speed = np.linalg.norm(k1, axis=1)
        ok = in1 & (speed >= min_speed)
        k2, in2 = _sample_vec(vec, origin, spacing, p + 0.5 * d * k1)
        ok &= in2
        k3, in3 = _sample_vec(vec, origin, spacing, p + 0.5 * d * k2)
        ok &= in3
        k4, in4 = _sample_vec(vec, origin, spacing, p + d * k3)
        ok &= in4
        nxt = p + (d / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        _, in5 = _sample_vec(vec, origin, spacing, nxt)
        ok &= in5

        good = idx[ok]
        pos[good] = nxt[ok]
        points[good, step + 1] = nxt[ok]
        counts[good] += 1
        active[idx[~ok]] = False
    return points, counts


def ray_surface_counts(eye, targets: np.ndarray, v0: np.ndarray, v1: np.ndarray,
                       v2: np.ndarray, tri_surface: np.ndarray, n_surfaces: int,
                       t_min: float = 1e-6, t_max: float = 1.0 - 1e-6,
                       block: int = 1024) -> np.ndarray:
    """Count triangle hits per surface for rays eye -> target.

    The ray parameter is scaled so t=1 lands on the target; only hits with
    t in (t_min, t_max) count. Degenerate triangles never hit.
    """
    eye = np.asarray(eye, dtype=np.float64)
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    counts = np.zeros((len(targets), n_surfaces), dtype=np.int32)
    if len(v0) == 0 or len(targets) == 0:
        return counts

    e1 = v1 - v0
    e2 = v2 - v0
    normal = np.cross(e1, e2)              # det = -dir . normal
    tvec = eye - v0
    qvec = np.cross(tvec, e1)
    c_u = np.cross(e2, tvec)               # u_num = dir . c_u
    t_num = np.einsum("ij,ij->i", e2, qvec)

    surf = np.asarray(tri_surface)
    for s0 in range(0, len(targets), block):
        dirs = targets[s0:s0 + block] - eye  # (B, 3)
        det = -(dirs @ normal.T)             # (B, M)
        u_num = dirs @ c_u.T
        v_num = dirs @ qvec.T
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / det
            u = u_num * inv
            v = v_num * inv
            t = t_num[None, :] * inv
        hit = ((np.abs(det) > 1e-12) & (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0)
               & (t > t_min) & (t < t_max))
        for s in range(n_surfaces):
            counts[s0:s0 + block, s] = hit[:, surf == s].sum(axis=1)
    return counts
