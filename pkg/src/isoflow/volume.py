"""Regular-grid volume model: SVF file IO, trilinear sampling, synthetic fields.

All positions are world coordinates. Grid-index coordinates appear only
inside the sampling routines. Sample storage is x-fastest (index =
i + nx*(j + ny*k)); vector samples are interleaved (x,y,z per point).
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field as dc_field

import numpy as np

MAGIC = b"SVF1"

SCALAR = "scalar"
VECTOR3 = "vector3"


class VolumeError(Exception):
    """Base class for volume-layer failures."""


class FormatError(VolumeError):
    """File is not a parseable SVF container."""


class TruncationError(FormatError):
    """Header promises more payload bytes than the file holds."""


class DataError(VolumeError):
    """Payload violates grid invariants (NaN/Inf, bad dims, size mismatch)."""


class DomainError(VolumeError):
    """Sample position outside the grid bounds."""


class UnknownFieldError(VolumeError):
    """Named field not present in the grid (or wrong kind)."""


@dataclass
class Field:
    name: str
    kind: str  # SCALAR | VECTOR3
    data: np.ndarray  # flat float32, x-fastest

    def components(self) -> int:
        return 1 if self.kind == SCALAR else 3


@dataclass
class VolumeGrid:
    dims: tuple[int, int, int]
    origin: tuple[float, float, float]
    spacing: tuple[float, float, float]
    fields: list[Field] = dc_field(default_factory=list)

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.origin = tuple(float(v) for v in self.origin)
        self.spacing = tuple(float(v) for v in self.spacing)
        if any(d < 2 for d in self.dims):
            raise DataError(f"grid dims must all be >= 2, got {self.dims}")
        if any(s <= 0 for s in self.spacing):
            raise DataError(f"spacing must be positive, got {self.spacing}")
        seen = set()
        for f in self.fields:
            if f.kind not in (SCALAR, VECTOR3):
                raise DataError(f"field {f.name!r}: unknown kind {f.kind!r}")
            if f.name in seen:
                raise DataError(f"duplicate field name {f.name!r}")
            seen.add(f.name)
            f.data = np.ascontiguousarray(f.data, dtype=np.float32).ravel()
            want = self.sample_count() * f.components()
            if f.data.size != want:
                raise DataError(
                    f"field {f.name!r}: expected {want} values, got {f.data.size}"
                )

    def sample_count(self) -> int:
        nx, ny, nz = self.dims
        return nx * ny * nz

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.asarray(self.origin, dtype=np.float64)
        hi = lo + (np.asarray(self.dims) - 1) * np.asarray(self.spacing)
        return lo, hi

    def field(self, name: str) -> Field:
        for f in self.fields:
            if f.name == name:
                return f
        raise UnknownFieldError(f"no field named {name!r}")

    def scalar_field(self, name: str) -> Field:
        f = self.field(name)
        if f.kind != SCALAR:
            raise UnknownFieldError(f"field {name!r} is not scalar")
        return f

    def vector_field(self, name: str) -> Field:
        f = self.field(name)
        if f.kind != VECTOR3:
            raise UnknownFieldError(f"field {name!r} is not vector3")
        return f

    def scalar_view(self, name: str) -> np.ndarray:
        """Scalar samples shaped (nz, ny, nx); [k, j, i] indexing."""
        nx, ny, nz = self.dims
        return self.scalar_field(name).data.reshape(nz, ny, nx)

    def vector_view(self, name: str) -> np.ndarray:
        """Vector samples shaped (nz, ny, nx, 3)."""
        nx, ny, nz = self.dims
        return self.vector_field(name).data.reshape(nz, ny, nx, 3)

    def grid_points(self) -> np.ndarray:
        """World positions of all grid points, x-fastest flat order, (N, 3)."""
        nx, ny, nz = self.dims
        lo, _ = self.bounds()
        sp = np.asarray(self.spacing)
        k, j, i = np.meshgrid(np.arange(nz), np.arange(ny), np.arange(nx),
                              indexing="ij")
        idx = np.stack([i, j, k], axis=-1).reshape(-1, 3)
        return lo + idx * sp

    def __eq__(self, other) -> bool:
        if not isinstance(other, VolumeGrid):
            return NotImplemented
        if (self.dims, self.origin, self.spacing) != (other.dims, other.origin, other.spacing):
            return False
        if len(self.fields) != len(other.fields):
            return False
        for a, b in zip(self.fields, other.fields):
            if a.name != b.name or a.kind != b.kind:
                return False
            if not np.array_equal(a.data, b.data):
                return False
        return True


# ---------------------------------------------------------------------------
# SVF file format: b"SVF1" | uint32-LE header length | UTF-8 JSON header
# {dims, origin, spacing, fields:[{name, kind}]} | per-field float32-LE
# payloads in header order, x-fastest, vectors interleaved.
# ---------------------------------------------------------------------------

def save_svf(grid: VolumeGrid, path) -> None:
    header = {
        "dims": list(grid.dims),
        "origin": list(grid.origin),
        "spacing": list(grid.spacing),
        "fields": [{"name": f.name, "kind": f.kind} for f in grid.fields],
    }
    hbytes = json.dumps(header, separators=(",", ":"), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(hbytes)))
        fh.write(hbytes)
        for f in grid.fields:
            fh.write(np.asarray(f.data, dtype="<f4").tobytes())


def load_svf(path) -> VolumeGrid:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != MAGIC:
        raise FormatError(f"bad magic {raw[:4]!r}, expected {MAGIC!r}")
    if len(raw) < 8:
        raise TruncationError("file too short for header length")
    (hlen,) = struct.unpack("<I", raw[4:8])
    if len(raw) < 8 + hlen:
        raise TruncationError("header extends past end of file")
    try:
        header = json.loads(raw[8:8 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"unparseable header: {e}") from e
    try:
        dims = tuple(header["dims"])
        origin = tuple(header["origin"])
        spacing = tuple(header["spacing"])
        fdescs = header["fields"]
    except (KeyError, TypeError) as e:
        raise FormatError(f"header missing key: {e}") from e

    n = int(np.prod(dims))
    fields = []
    off = 8 + hlen
    for fd in fdescs:
        kind = fd["kind"]
        comps = 1 if kind == SCALAR else 3
        nbytes = 4 * n * comps
        if len(raw) < off + nbytes:
            raise TruncationError(
                f"field {fd['name']!r}: payload truncated "
                f"(need {nbytes} bytes at offset {off})"
            )
        data = np.frombuffer(raw[off:off + nbytes], dtype="<f4")
        off += nbytes
        bad = ~np.isfinite(data)
        if bad.any():
            idx = int(np.argmax(bad))
            raise DataError(f"field {fd['name']!r}: non-finite value at index {idx}")
        fields.append(Field(name=fd["name"], kind=kind, data=data))
    if off != len(raw):
        raise TruncationError(f"{len(raw) - off} trailing bytes after payload")
    return VolumeGrid(dims=dims, origin=origin, spacing=spacing, fields=fields)


# ---------------------------------------------------------------------------
# Trilinear sampling
# ---------------------------------------------------------------------------

def _inside_mask(grid: VolumeGrid, pts: np.ndarray) -> np.ndarray:
    lo, hi = grid.bounds()
    return np.all((pts >= lo) & (pts <= hi), axis=1)


def _trilinear(view: np.ndarray, grid: VolumeGrid, pts: np.ndarray) -> np.ndarray:
    """Trilinear interpolation at (N, 3) world points, assumed inside."""
    lo, _ = grid.bounds()
    sp = np.asarray(grid.spacing)
    nx, ny, nz = grid.dims
    t = (pts - lo) / sp
    i = np.clip(np.floor(t).astype(np.intp), 0, [nx - 2, ny - 2, nz - 2])
    f = t - i
    fx, fy, fz = f[:, 0], f[:, 1], f[:, 2]
    ix, iy, iz = i[:, 0], i[:, 1], i[:, 2]
    out = None
    for dz in (0, 1):
        wz = fz if dz else 1.0 - fz
        for dy in (0, 1):
            wy = fy if dy else 1.0 - fy
            for dx in (0, 1):
                wx = fx if dx else 1.0 - fx
                w = wx * wy * wz
                c = view[iz + dz, iy + dy, ix + dx].astype(np.float64)
                term = c * (w[:, None] if c.ndim == 2 else w)
                out = term if out is None else out + term
    return out


def sample_scalar(grid: VolumeGrid, field: str, p) -> float:
    pts = np.atleast_2d(np.asarray(p, dtype=np.float64))
    if not _inside_mask(grid, pts).all():
        raise DomainError(f"point {p} outside grid bounds")
    return float(_trilinear(grid.scalar_view(field), grid, pts)[0])


def sample_vector(grid: VolumeGrid, field: str, p) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(p, dtype=np.float64))
    if not _inside_mask(grid, pts).all():
        raise DomainError(f"point {p} outside grid bounds")
    return _trilinear(grid.vector_view(field), grid, pts)[0]


def sample_scalar_many(grid: VolumeGrid, field: str, pts: np.ndarray) -> np.ndarray:
    """Batch scalar sampling; caller guarantees points are inside."""
    return _trilinear(grid.scalar_view(field), grid, np.asarray(pts, dtype=np.float64))


def sample_vector_many(grid: VolumeGrid, field: str, pts: np.ndarray) -> np.ndarray:
    return _trilinear(grid.vector_view(field), grid, np.asarray(pts, dtype=np.float64))


# ---------------------------------------------------------------------------
# Synthetic analytic fields (test oracles and demo data)
# ---------------------------------------------------------------------------

SYNTHETIC_KINDS = ("constant", "linear", "rotation", "radial", "double-source")


def generate_synthetic(kind: str, dims, origin=(0.0, 0.0, 0.0), spacing=None,
                       params: dict | None = None) -> VolumeGrid:
    """Sample a named analytic field pair onto a grid.

    Every kind produces a scalar field named "scalar" and a vector field
    named "velocity" so any synthetic file can feed the full pipeline:

    - constant: scalar ``value``; vector ``vec``.
    - linear: scalar g.(x-c); vector A(x-c) (unique zero at c for
      nonsingular A).
    - rotation: vector (-(y-cy), (x-cx), 0) (critical line x=cx, y=cy);
      scalar -|x-c|^2.
    - radial: scalar -|x-c|^2 (unique interior maximum at c); vector -(x-c).
    - double-source: two Gaussian-weighted outflows; scalar is the sum of
      the two Gaussian bumps.
    """
    params = dict(params or {})
    dims = tuple(int(d) for d in dims)
    if spacing is None:
        # unit world extent per axis by default
        spacing = tuple(1.0 / (d - 1) for d in dims)
    grid = VolumeGrid(dims=dims, origin=origin, spacing=spacing, fields=[])
    lo, hi = grid.bounds()
    center = params.get("center", 0.5 * (lo + hi))
    c = np.asarray(center, dtype=np.float64)
    pts = grid.grid_points()

    if kind == "constant":
        s = np.full(len(pts), float(params.get("value", 0.0)))
        v = np.tile(np.asarray(params.get("vec", (0.0, 0.0, 0.0)), dtype=np.float64),
                    (len(pts), 1))
    elif kind == "linear":
        g = np.asarray(params.get("gradient", (1.0, 0.0, 0.0)), dtype=np.float64)
        A = np.asarray(params.get("matrix", np.eye(3)), dtype=np.float64)
        s = (pts - c) @ g
        v = (pts - c) @ A.T
    elif kind == "rotation":
        s = -np.sum((pts - c) ** 2, axis=1)
        v = np.stack([-(pts[:, 1] - c[1]), pts[:, 0] - c[0],
                      np.zeros(len(pts))], axis=1)
    elif kind == "radial":
        s = -np.sum((pts - c) ** 2, axis=1)
        v = -(pts - c)
    elif kind == "double-source":
        sigma = float(params.get("sigma", 0.15 * np.max(hi - lo)))
        c1 = np.asarray(params.get("c1", lo + 0.3 * (hi - lo)), dtype=np.float64)
        c2 = np.asarray(params.get("c2", lo + 0.7 * (hi - lo)), dtype=np.float64)
        g1 = np.exp(-np.sum((pts - c1) ** 2, axis=1) / sigma**2)
        g2 = np.exp(-np.sum((pts - c2) ** 2, axis=1) / sigma**2)
        s = g1 + g2
        v = (pts - c1) * g1[:, None] + (pts - c2) * g2[:, None]
    else:
        raise DataError(f"unknown synthetic kind {kind!r} "
                        f"(expected one of {SYNTHETIC_KINDS})")

    grid.fields.append(Field("scalar", SCALAR, s.astype(np.float32)))
    grid.fields.append(Field("velocity", VECTOR3, v.astype(np.float32).ravel()))
    # re-validate now that fields exist
    return VolumeGrid(dims=grid.dims, origin=grid.origin, spacing=grid.spacing,
                      fields=grid.fields)
