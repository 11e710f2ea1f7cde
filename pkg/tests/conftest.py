import numpy as np
import pytest

from isoflow import generate_synthetic
from isoflow.volume import VolumeGrid, Field, SCALAR, VECTOR3


def make_grid(dims=(5, 5, 5), origin=(0, 0, 0), spacing=None, fields=()):
    return VolumeGrid(dims=dims, origin=origin,
                      spacing=spacing or tuple(1.0 / max(d - 1, 1) for d in dims),
                      fields=list(fields))


def random_grid(rng, dims=(4, 5, 6), with_vector=True):
    n = int(np.prod(dims))
    fields = [Field("s", SCALAR, rng.normal(size=n).astype(np.float32))]
    if with_vector:
        fields.append(Field("v", VECTOR3, rng.normal(size=3 * n).astype(np.float32)))
    return make_grid(dims, fields=fields)


def sphere_grid(n=64, radius_field=True):
    """Unit-domain grid whose scalar is the distance to the center."""
    g = generate_synthetic("radial", (n, n, n))
    pts = g.grid_points()
    g.fields[0].data = np.linalg.norm(pts - 0.5, axis=1).astype(np.float32)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(42)
