"""Candidate streamline generation: seeding and fixed-step RK4 tracing.

Seeds come from a deterministic counter-based generator (Philox): a block
of uniform seeds over the whole domain plus a small cluster in the
vicinity ball of each vector critical point. Each seed is traced both
forward and backward with raw (unnormalized) velocity.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .volume import VolumeGrid
from .topology import CriticalPoint

PROVENANCE_UNIFORM = "uniform"
PROVENANCE_CRITICAL = "critical"


@dataclass
class Seed:
    position: np.ndarray
    provenance: str  # PROVENANCE_UNIFORM | PROVENANCE_CRITICAL
    rng_index: int
    cp_id: int | None = None


@dataclass
class Streamline:
    id: int
    seed: Seed
    points: np.ndarray          # (n, 3), backward reversed + seed + forward
    segment_lengths: np.ndarray  # (n-1,) 3D arc lengths
    total_length: float
    from_critical: int | None = None

    @property
    def segment_count(self) -> int:
        return len(self.points) - 1

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "from_critical": self.from_critical,
            "points": [[float(v) for v in p] for p in self.points],
        }


@dataclass
class TraceConfig:
    step_size: float
    max_steps: int = 1000
    min_speed: float = 1e-9
    min_points: int = 8
    vicinity_radius: float = 0.1
    seeds_per_cp: int = 8
    uniform_seed_count: int = 500
    rng_seed: int = 0

    def __post_init__(self):
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.vicinity_radius <= 0:
            raise ValueError("vicinity_radius must be positive")

    @classmethod
    def for_grid(cls, grid: VolumeGrid, field: str, **overrides) -> "TraceConfig":
        """Defaults scaled to the grid: h = spacing/4, min_speed from RMS."""
        sp = np.asarray(grid.spacing)
        data = grid.vector_field(field).data.astype(np.float64).reshape(-1, 3)
        rms = float(np.sqrt(np.mean(np.sum(data**2, axis=1)))) or 1.0
        cfg = cls(
            step_size=0.25 * float(sp.min()),
            min_speed=1e-6 * rms,
            vicinity_radius=1.5 * float(sp.max()),
        )
        return replace(cfg, **overrides)


def make_seeds(grid: VolumeGrid, cps: list[CriticalPoint],
               cfg: TraceConfig) -> list[Seed]:
    """Uniform domain seeds plus vicinity-ball seeds around each critical point."""
    rng = np.random.Generator(np.random.Philox(cfg.rng_seed))
    lo, hi = grid.bounds()
    seeds: list[Seed] = []

    uni = rng.uniform(lo, hi, size=(cfg.uniform_seed_count, 3))
    for pos in uni:
        seeds.append(Seed(pos, PROVENANCE_UNIFORM, len(seeds)))

    for cp in cps:
        # uniform in the ball: isotropic direction, radius ~ r * u^(1/3)
        dirs = rng.normal(size=(cfg.seeds_per_cp, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = cfg.vicinity_radius * rng.uniform(size=cfg.seeds_per_cp) ** (1.0 / 3.0)
        pts = np.clip(cp.position + dirs * radii[:, None], lo, hi)
        for pos in pts:
            seeds.append(Seed(pos, PROVENANCE_CRITICAL, len(seeds), cp_id=cp.id))
    return seeds


def _stitch(fwd: np.ndarray, nf: int, bwd: np.ndarray, nb: int) -> np.ndarray:
    """Backward points reversed (seed excluded) + seed + forward points."""
    back = bwd[1:nb][::-1]
    return np.concatenate([back, fwd[:nf]])


def integrate_streamline(grid: VolumeGrid, field: str, seed: Seed,
                         cfg: TraceConfig, sid: int = 0) -> Streamline | None:
    lines = build_candidates_from_seeds(grid, field, [seed], cfg)
    if not lines:
        return None
    line = lines[0]
    line.id = sid
    return line


def build_candidates_from_seeds(grid: VolumeGrid, field: str, seeds: list[Seed],
                                cfg: TraceConfig) -> list[Streamline]:
    if not seeds:
        return []
    vec = grid.vector_view(field).astype(np.float64)
    pos = np.array([s.position for s in seeds])
    fwd, nf = kernels.trace_batch(vec, grid.origin, grid.spacing, pos,
                                  cfg.step_size, cfg.max_steps, cfg.min_speed, +1)
    bwd, nb = kernels.trace_batch(vec, grid.origin, grid.spacing, pos,
                                  cfg.step_size, cfg.max_steps, cfg.min_speed, -1)
    out: list[Streamline] = []
    for n, seed in enumerate(seeds):
        points = _stitch(fwd[n], int(nf[n]), bwd[n], int(nb[n]))
        if len(points) < max(cfg.min_points, 2):
            continue
        seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
        out.append(Streamline(
            id=len(out),
            seed=seed,
            points=points,
            segment_lengths=seg,
            total_length=float(seg.sum()),
            from_critical=seed.cp_id,
        ))
    return out


def build_candidates(grid: VolumeGrid, field: str, cps: list[CriticalPoint],
                     cfg: TraceConfig) -> list[Streamline]:
    """Seed, trace, and keep every streamline with enough points.

    Pure function of its inputs; ids are sequential in seed order.
    """
    seeds = make_seeds(grid, cps, cfg)
    return build_candidates_from_seeds(grid, field, seeds, cfg)


def candidates_to_json(candidates: list[Streamline]) -> list[dict]:
    return [s.to_dict() for s in candidates]
