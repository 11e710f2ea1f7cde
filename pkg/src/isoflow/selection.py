"""Budgeted streamline selection.

Greedy pick by descending score with two optional constraints: at least
one streamline per vector critical point (picked first, best candidate of
each point) and cell-exclusive density control (no two chosen streamlines
may touch the same, optionally stride-coarsened, grid cell).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .scoring import Camera, EntropyScore, MODE_PER_SEGMENT
from .tracing import Streamline
from .volume import VolumeGrid

REASON_ENTROPY = "entropy"
REASON_CRITICAL = "critical-guarantee"


@dataclass
class SelectionConfig:
    k: int
    guarantee_critical: bool = False
    density_control: bool = False
    cell_stride: int = 1
    mode: str = MODE_PER_SEGMENT

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.cell_stride < 1:
            raise ValueError("cell_stride must be >= 1")


@dataclass
class ChosenEntry:
    streamline_id: int
    E: float
    from_critical: int | None
    reason: str

    def to_dict(self) -> dict:
        return {"streamline_id": self.streamline_id, "E": self.E,
                "from_critical": self.from_critical, "reason": self.reason}


@dataclass
class SelectionResult:
    chosen: list[ChosenEntry]
    rejected_density: list[int]
    camera: Camera | None = None

    def chosen_ids(self) -> list[int]:
        return [c.streamline_id for c in self.chosen]

    def to_dict(self) -> dict:
        return {
            "chosen": [c.to_dict() for c in self.chosen],
            "rejected_density": list(self.rejected_density),
            "camera": self.camera.to_dict() if self.camera is not None else None,
        }


def cell_footprint(grid: VolumeGrid, s: Streamline, stride: int = 1) -> set[tuple[int, int, int]]:
    """Coarse-cell indices touched by the streamline's points."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    lo, _ = grid.bounds()
    sp = np.asarray(grid.spacing)
    nmax = np.asarray(grid.dims) - 2
    idx = np.floor((s.points - lo) / sp).astype(np.int64)
    idx = np.clip(idx, 0, nmax) // stride
    return {tuple(int(v) for v in row) for row in idx}


def select_streamlines(candidates: list[Streamline], scores: list[EntropyScore],
                       grid: VolumeGrid, cfg: SelectionConfig,
                       camera: Camera | None = None) -> SelectionResult:
    """Two-phase greedy selection; deterministic, ties broken by lower id.

    Phase 1 (guarantee on): per critical point, its best-scoring candidate,
    points visited in descending best score, subject to the density
    constraint and the budget. Phase 2: remaining budget by descending
    score; density conflicts are recorded in rejected_density.
    """
    by_id = {s.id: s for s in candidates}
    score_of = {sc.streamline_id: sc.effective for sc in scores}

    footprints: dict[int, set] = {}

    def fp(sid: int) -> set:
        if sid not in footprints:
            footprints[sid] = cell_footprint(grid, by_id[sid], cfg.cell_stride)
        return footprints[sid]

    used_cells: set = set()
    chosen: list[ChosenEntry] = []
    chosen_ids: set[int] = set()
    rejected: list[int] = []

    def feasible(sid: int) -> bool:
        return not cfg.density_control or used_cells.isdisjoint(fp(sid))

    def take(sid: int, reason: str):
        chosen.append(ChosenEntry(sid, score_of[sid], by_id[sid].from_critical, reason))
        chosen_ids.add(sid)
        if cfg.density_control:
            used_cells.update(fp(sid))

    if cfg.guarantee_critical:
        best: dict[int, int] = {}
        for s in candidates:
            if s.from_critical is None:
                continue
            cur = best.get(s.from_critical)
            if cur is None or (score_of[s.id], -s.id) > (score_of[cur], -cur):
                best[s.from_critical] = s.id
        order = sorted(best.items(), key=lambda kv: (-score_of[kv[1]], kv[1]))
        for _cp, sid in order:
            if len(chosen) >= cfg.k:
                break
            if sid in chosen_ids:
                continue
            if feasible(sid):
                take(sid, REASON_CRITICAL)

    ranked = sorted(candidates, key=lambda s: (-score_of[s.id], s.id))
    for s in ranked:
        if len(chosen) >= cfg.k:
            break
        if s.id in chosen_ids:
            continue
        if feasible(s.id):
            take(s.id, REASON_ENTROPY)
        else:
            rejected.append(s.id)

    return SelectionResult(chosen=chosen, rejected_density=rejected, camera=camera)
