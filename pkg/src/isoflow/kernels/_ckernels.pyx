# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel core: per-seed RK4 advection and ray-triangle counting.

Semantics match _pykernels exactly; see that module for the contract.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, fabs

BACKEND = "c"


cdef inline bint _sample(double[:, :, :, ::1] vec,
                         double ox, double oy, double oz,
                         double sx, double sy, double sz,
                         double px, double py, double pz,
                         double* out) nogil:
    """Trilinear sample; returns False when the point is outside."""
    cdef Py_ssize_t nz = vec.shape[0], ny = vec.shape[1], nx = vec.shape[2]
    cdef double tx = (px - ox) / sx
    cdef double ty = (py - oy) / sy
    cdef double tz = (pz - oz) / sz
    if tx < 0 or ty < 0 or tz < 0 or tx > nx - 1 or ty > ny - 1 or tz > nz - 1:
        return False
    cdef Py_ssize_t i = <Py_ssize_t>floor(tx)
    cdef Py_ssize_t j = <Py_ssize_t>floor(ty)
    cdef Py_ssize_t k = <Py_ssize_t>floor(tz)
    if i > nx - 2: i = nx - 2
    if j > ny - 2: j = ny - 2
    if k > nz - 2: k = nz - 2
    cdef double fx = tx - i, fy = ty - j, fz = tz - k
    cdef double w
    cdef Py_ssize_t dx, dy, dz, c
    out[0] = 0.0; out[1] = 0.0; out[2] = 0.0
    for dz in range(2):
        for dy in range(2):
            for dx in range(2):
                w = ((fx if dx else 1.0 - fx)
                     * (fy if dy else 1.0 - fy)
                     * (fz if dz else 1.0 - fz))
                for c in range(3):
                    out[c] += w * vec[k + dz, j + dy, i + dx, c]
    return True


def trace_batch(vec, origin, spacing, seeds, double h, int max_steps,
                double min_speed, int direction):
    cdef double[:, :, :, ::1] v = np.ascontiguousarray(vec, dtype=np.float64)
    o = np.asarray(origin, dtype=np.float64)
    s = np.asarray(spacing, dtype=np.float64)
    cdef double ox = o[0], oy = o[1], oz = o[2]
    cdef double sx = s[0], sy = s[1], sz = s[2]
    seeds_arr = np.atleast_2d(np.asarray(seeds, dtype=np.float64))
    cdef double[:, ::1] sd = np.ascontiguousarray(seeds_arr)
    cdef Py_ssize_t n = sd.shape[0]
    pts_np = np.zeros((n, max_steps + 1, 3))
    counts_np = np.ones(n, dtype=np.int64)
    cdef double[:, :, ::1] pts = pts_np
    cdef long long[::1] counts = counts_np
    cdef double d = direction * h
    cdef double p[3]
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double q[3]
    cdef double nxt[3]
    cdef double speed
    cdef Py_ssize_t seed_i, step, c

    with nogil:
        for seed_i in range(n):
            for c in range(3):
                p[c] = sd[seed_i, c]
                pts[seed_i, 0, c] = p[c]
            if not _sample(v, ox, oy, oz, sx, sy, sz, p[0], p[1], p[2], k1):
                continue
            for step in range(max_steps):
                if not _sample(v, ox, oy, oz, sx, sy, sz, p[0], p[1], p[2], k1):
                    break
                speed = sqrt(k1[0] * k1[0] + k1[1] * k1[1] + k1[2] * k1[2])
                if speed < min_speed:
                    break
                for c in range(3):
                    q[c] = p[c] + 0.5 * d * k1[c]
                if not _sample(v, ox, oy, oz, sx, sy, sz, q[0], q[1], q[2], k2):
                    break
                for c in range(3):
                    q[c] = p[c] + 0.5 * d * k2[c]
                if not _sample(v, ox, oy, oz, sx, sy, sz, q[0], q[1], q[2], k3):
                    break
                for c in range(3):
                    q[c] = p[c] + d * k3[c]
                if not _sample(v, ox, oy, oz, sx, sy, sz, q[0], q[1], q[2], k4):
                    break
                for c in range(3):
                    nxt[c] = p[c] + (d / 6.0) * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c])
                if not _sample(v, ox, oy, oz, sx, sy, sz, nxt[0], nxt[1], nxt[2], q):
                    break
                for c in range(3):
                    p[c] = nxt[c]
                    pts[seed_i, step + 1, c] = p[c]
                counts[seed_i] += 1
    return pts_np, counts_np


def ray_surface_counts(eye, targets, v0, v1, v2, tri_surface, int n_surfaces,
                       double t_min=1e-6, double t_max=1.0 - 1e-6, block=None):
    eye_a = np.asarray(eye, dtype=np.float64)
    tg = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    a0 = np.ascontiguousarray(v0, dtype=np.float64)
    a1 = np.ascontiguousarray(v1, dtype=np.float64)
    a2 = np.ascontiguousarray(v2, dtype=np.float64)
    surf_np = np.ascontiguousarray(tri_surface, dtype=np.int32)
    counts_np = np.zeros((len(tg), n_surfaces), dtype=np.int32)
    if len(a0) == 0 or len(tg) == 0:
        return counts_np

    # per-triangle constants (ray-independent)
    e1 = a1 - a0
    e2 = a2 - a0
    normal_np = np.cross(e1, e2)
    tvec = eye_a - a0
    qvec_np = np.cross(tvec, e1)
    cu_np = np.cross(e2, tvec)
    tnum_np = np.einsum("ij,ij->i", e2, qvec_np)

    cdef double[:, ::1] tgv = np.ascontiguousarray(tg)
    cdef double[:, ::1] nrm = np.ascontiguousarray(normal_np)
    cdef double[:, ::1] qv = np.ascontiguousarray(qvec_np)
    cdef double[:, ::1] cu = np.ascontiguousarray(cu_np)
    cdef double[::1] tnum = np.ascontiguousarray(tnum_np)
    cdef int[::1] surf = surf_np
    cdef int[:, ::1] counts = counts_np
    cdef double ex = eye_a[0], ey = eye_a[1], ez = eye_a[2]
    cdef Py_ssize_t nray = tgv.shape[0], ntri = nrm.shape[0]
    cdef Py_ssize_t r, m
    cdef double dx, dy, dz, det, inv, u, vv, t

    with nogil:
        for r in range(nray):
            dx = tgv[r, 0] - ex
            dy = tgv[r, 1] - ey
            dz = tgv[r, 2] - ez
            for m in range(ntri):
                det = -(dx * nrm[m, 0] + dy * nrm[m, 1] + dz * nrm[m, 2])
                if fabs(det) <= 1e-12:
                    continue
                inv = 1.0 / det
                u = (dx * cu[m, 0] + dy * cu[m, 1] + dz * cu[m, 2]) * inv
                if u < 0.0:
                    continue
                vv = (dx * qv[m, 0] + dy * qv[m, 1] + dz * qv[m, 2]) * inv
                if vv < 0.0 or u + vv > 1.0:
                    continue
                t = tnum[m] * inv
                if t <= t_min or t >= t_max:
                    continue
                counts[r, surf[m]] += 1
    return counts_np
