"""View-dependent streamline scoring.

Each streamline is projected through a pinhole camera; the per-segment
projected pixel lengths d_j form a probability-like distribution
x_j = d~_j / D with D = sum(d_j), where d~_j is d_j attenuated by
(1 - alpha_k) once per isosurface intersection between the eye and the
segment midpoint. The score is the normalized entropy

    E = -(1 / log2(1+m)) * sum_j x_j log2 x_j,   0 log 0 = 0,

clamped to [0, 1]. The coarse variant applies the single-alpha penalty
E' = (1 - m0/m) E + (m0/m)(1 - alpha) E with m0 the occluded-segment
count instead of per-segment attenuation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .isosurface import IsosurfaceMesh
from .tracing import Streamline


class CameraError(ValueError):
    """Camera parameters violate the pinhole-model invariants."""


@dataclass
class Camera:
    eye: np.ndarray
    target: np.ndarray
    up: np.ndarray
    fov_y: float
    width: int
    height: int
    near: float = 1e-3
    far: float = 1e4

    def __post_init__(self):
        self.eye = np.asarray(self.eye, dtype=np.float64)
        self.target = np.asarray(self.target, dtype=np.float64)
        self.up = np.asarray(self.up, dtype=np.float64)
        if np.allclose(self.eye, self.target):
            raise CameraError("eye and target coincide")
        if not 0.0 < self.fov_y < np.pi:
            raise CameraError(f"fov_y must be in (0, pi), got {self.fov_y}")
        if self.near <= 0 or self.far <= self.near:
            raise CameraError("need 0 < near < far")
        fwd = self.target - self.eye
        fwd = fwd / np.linalg.norm(fwd)
        upn = self.up / np.linalg.norm(self.up)
        if np.linalg.norm(np.cross(fwd, upn)) < 1e-9:
            raise CameraError("up is parallel to the view direction")

    def basis(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Right, up, forward unit vectors (camera looks along forward)."""
        fwd = self.target - self.eye
        fwd = fwd / np.linalg.norm(fwd)
        right = np.cross(fwd, self.up)
        right = right / np.linalg.norm(right)
        up = np.cross(right, fwd)
        return right, up, fwd

    def to_dict(self) -> dict:
        return {
            "eye": [float(v) for v in self.eye],
            "target": [float(v) for v in self.target],
            "up": [float(v) for v in self.up],
            "fov_y": self.fov_y,
            "width": self.width,
            "height": self.height,
            "near": self.near,
            "far": self.far,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Camera":
        return cls(eye=d["eye"], target=d["target"], up=d.get("up", (0, 1, 0)),
                   fov_y=float(d["fov_y"]), width=int(d["width"]),
                   height=int(d["height"]), near=float(d.get("near", 1e-3)),
                   far=float(d.get("far", 1e4)))


@dataclass
class SegmentProjection:
    index: int
    d: float            # projected length, pixels
    d_weighted: float   # after occlusion attenuation
    occluder_count: int
    clipped: bool

    @property
    def occluded(self) -> bool:
        return self.occluder_count > 0


@dataclass
class EntropyScore:
    streamline_id: int
    E: float
    E_coarse: float
    m: int
    m0: int
    mode: str  # "coarse" | "per-segment"

    @property
    def effective(self) -> float:
        """Ranking key for selection under this score's mode."""
        return self.E_coarse if self.mode == "coarse" else self.E


def _project_points(cam: Camera, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pixel coords (N,2), view depth (N,), clipped mask (N,)."""
    right, up, fwd = cam.basis()
    rel = np.atleast_2d(pts) - cam.eye
    x = rel @ right
    y = rel @ up
    depth = rel @ fwd
    tan_half = np.tan(cam.fov_y / 2.0)
    aspect = cam.width / cam.height
    with np.errstate(divide="ignore", invalid="ignore"):
        ndc_x = x / (depth * tan_half * aspect)
        ndc_y = y / (depth * tan_half)
    clipped = ((depth < cam.near) | (depth > cam.far)
               | (np.abs(ndc_x) > 1.0) | (np.abs(ndc_y) > 1.0))
    px = (ndc_x + 1.0) * 0.5 * cam.width
    py = (1.0 - ndc_y) * 0.5 * cam.height
    pix = np.stack([px, py], axis=1)
    pix[clipped] = 0.0
    return pix, depth, clipped


def project_point(cam: Camera, p) -> tuple[tuple[float, float], float, bool]:
    """Project one world point: ((px, py), depth, clipped)."""
    pix, depth, clipped = _project_points(cam, np.asarray(p, dtype=np.float64))
    return (float(pix[0, 0]), float(pix[0, 1])), float(depth[0]), bool(clipped[0])


def _segment_lengths_px(cam: Camera, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-segment projected pixel length and clipped mask."""
    pix, _, clipped = _project_points(cam, points)
    d = np.linalg.norm(np.diff(pix, axis=0), axis=1)
    seg_clipped = clipped[:-1] | clipped[1:]
    d[seg_clipped] = 0.0
    return d, seg_clipped


def project_streamline(cam: Camera, s: Streamline) -> list[SegmentProjection]:
    d, seg_clipped = _segment_lengths_px(cam, s.points)
    return [SegmentProjection(j, float(d[j]), float(d[j]), 0, bool(seg_clipped[j]))
            for j in range(len(d))]


class OccluderSet:
    """Flattened triangle soup of all isosurfaces, for ray casting."""

    def __init__(self, meshes: list[IsosurfaceMesh]):
        self.alphas = np.array([m.opacity for m in meshes])
        v0, v1, v2, surf = [], [], [], []
        for n, mesh in enumerate(meshes):
            if mesh.is_empty():
                continue
            t = mesh.triangles
            v0.append(mesh.vertices[t[:, 0]])
            v1.append(mesh.vertices[t[:, 1]])
            v2.append(mesh.vertices[t[:, 2]])
            surf.append(np.full(len(t), n, dtype=np.int32))
        if v0:
            self.v0 = np.concatenate(v0)
            self.v1 = np.concatenate(v1)
            self.v2 = np.concatenate(v2)
            self.surf = np.concatenate(surf)
        else:
            self.v0 = self.v1 = self.v2 = np.zeros((0, 3))
            self.surf = np.zeros(0, dtype=np.int32)

    @property
    def n_surfaces(self) -> int:
        return len(self.alphas)

    def counts(self, eye: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """(N, n_surfaces) intersection counts for rays eye -> target."""
        if self.n_surfaces == 0:
            return np.zeros((len(targets), 0), dtype=np.int32)
        return kernels.ray_surface_counts(eye, targets, self.v0, self.v1,
                                          self.v2, self.surf, self.n_surfaces)


def occlusion_factors(cam: Camera, s: Streamline,
                      meshes: list[IsosurfaceMesh]) -> list[SegmentProjection]:
    """Project and attenuate each segment by the surfaces hiding its midpoint."""
    projs = project_streamline(cam, s)
    occ = OccluderSet(meshes)
    if occ.n_surfaces == 0:
        return projs
    mids = 0.5 * (s.points[:-1] + s.points[1:])
    counts = occ.counts(cam.eye, mids)
    factors = np.prod((1.0 - occ.alphas) ** counts, axis=1)
    for j, p in enumerate(projs):
        p.occluder_count = int(counts[j].sum())
        p.d_weighted = p.d * float(factors[j])
    return projs


def entropy_from_lengths(d: np.ndarray, d_weighted: np.ndarray, m: int) -> float:
    """Normalized entropy of x_j = d~_j / sum(d_j); 0 when nothing projects."""
    if m < 1:
        return 0.0
    D = float(np.sum(d))
    if D <= 0.0:
        return 0.0
    x = np.asarray(d_weighted, dtype=np.float64) / D
    nz = x > 0.0
    H = -float(np.sum(x[nz] * np.log2(x[nz])))
    E = H / np.log2(1.0 + m)
    return float(min(max(E, 0.0), 1.0))


def entropy_per_segment(projs: list[SegmentProjection], m: int) -> float:
    d = np.array([p.d for p in projs])
    dw = np.array([p.d_weighted for p in projs])
    return entropy_from_lengths(d, dw, m)


def entropy_coarse(E: float, m: int, m0: int, alpha: float) -> float:
    """Single-alpha occlusion penalty on a precomputed entropy."""
    if not 0 <= m0 <= m or m < 1:
        raise ValueError(f"need 0 <= m0 <= m, m >= 1; got m={m}, m0={m0}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return (1.0 - m0 / m) * E + (m0 / m) * (1.0 - alpha) * E


MODE_COARSE = "coarse"
MODE_PER_SEGMENT = "per-segment"


def score_all(cam: Camera, candidates: list[Streamline],
              meshes: list[IsosurfaceMesh], mode: str = MODE_PER_SEGMENT) -> list[EntropyScore]:
    """One EntropyScore per candidate, in input order.

    coarse: E is the plain projected-length entropy, E_coarse applies the
    single-alpha penalty with alpha = max surface opacity.
    per-segment: E is the attenuated entropy; E_coarse mirrors E.
    """
    if mode not in (MODE_COARSE, MODE_PER_SEGMENT):
        raise ValueError(f"unknown mode {mode!r}")
    occ = OccluderSet(meshes)
    alpha_max = float(occ.alphas.max()) if occ.n_surfaces else 0.0
    scores = []
    for s in candidates:
        m = s.segment_count
        d, _ = _segment_lengths_px(cam, s.points)
        if occ.n_surfaces:
            mids = 0.5 * (s.points[:-1] + s.points[1:])
            counts = occ.counts(cam.eye, mids)
            m0 = int(np.count_nonzero(counts.sum(axis=1)))
            factors = np.prod((1.0 - occ.alphas) ** counts, axis=1)
        else:
            m0 = 0
            factors = np.ones(m)
        E_plain = entropy_from_lengths(d, d, m)
        if mode == MODE_COARSE:
            E = E_plain
            E_c = entropy_coarse(E_plain, m, m0, alpha_max) if m >= 1 else 0.0
        else:
            E = entropy_from_lengths(d, d * factors, m)
            E_c = E
        scores.append(EntropyScore(s.id, E, E_c, m, m0, mode))
    return scores


def score_report(scores: list[EntropyScore],
                 candidates: list[Streamline]) -> list[dict]:
    """JSON-ready report rows sorted by E descending (ties by id)."""
    by_id = {s.id: s for s in candidates}
    rows = [
        {
            "id": sc.streamline_id,
            "E": sc.E,
            "E_coarse": sc.E_coarse,
            "m": sc.m,
            "m0": sc.m0,
            "from_critical": by_id[sc.streamline_id].from_critical,
        }
        for sc in scores
    ]
    rows.sort(key=lambda r: (-r["E"], r["id"]))
    return rows
