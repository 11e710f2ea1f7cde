"""Batch command-line interface.

Commands: gen, extract-cp, candidates, select, serve. Data goes to stdout
as JSON lines, logs to stderr. Exit codes: 0 success, 1 usage error,
2 data error, 3 internal error.
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import isosurface, scoring, selection, topology, tracing, volume

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


def _log(msg: str, quiet: bool = False):
    if not quiet:
        print(msg, file=sys.stderr)


@click.group()
def app():
    """Integrated isosurface + streamline visualization pipeline."""


@app.command("gen")
@click.argument("kind")
@click.argument("nx", type=int)
@click.argument("ny", type=int)
@click.argument("nz", type=int)
@click.option("--out", "-o", required=True, type=click.Path(dir_okay=False))
@click.option("--param", "-p", multiple=True, help="key=value synthetic parameter")
@click.option("--quiet", is_flag=True)
def cmd_gen(kind, nx, ny, nz, out, param, quiet):
    """Write a synthetic SVF volume of the named analytic KIND."""
    params = {}
    for p in param:
        key, _, val = p.partition("=")
        try:
            params[key] = json.loads(val)
        except json.JSONDecodeError:
            params[key] = val
    grid = volume.generate_synthetic(kind, (nx, ny, nz), params=params)
    volume.save_svf(grid, out)
    _log(f"wrote {out}: dims={grid.dims} fields={[f.name for f in grid.fields]}", quiet)


@app.command("extract-cp")
@click.option("--input", "-i", "input_", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--field", "-f", required=True)
@click.option("--include-boundary", is_flag=True)
def cmd_extract_cp(input_, field, include_boundary):
    """Print critical points of FIELD as JSON lines."""
    grid = volume.load_svf(input_)
    f = grid.field(field)
    if f.kind == volume.SCALAR:
        cps = topology.extract_scalar_extrema(grid, field, include_boundary)
    else:
        cps = topology.extract_vector_critical_points(grid, field)
    for cp in cps:
        print(json.dumps(cp.to_dict()))


@app.command("candidates")
@click.option("--input", "-i", "input_", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--field", "-f", required=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False))
@click.option("--uniform-seeds", type=int, default=200)
@click.option("--seeds-per-cp", type=int, default=8)
@click.option("--seed", type=int, default=0, help="rng seed")
@click.option("--quiet", is_flag=True)
def cmd_candidates(input_, field, out, uniform_seeds, seeds_per_cp, seed, quiet):
    """Trace candidate streamlines and emit them as JSON."""
    grid = volume.load_svf(input_)
    cps = topology.extract_vector_critical_points(grid, field)
    cfg = tracing.TraceConfig.for_grid(grid, field,
                                       uniform_seed_count=uniform_seeds,
                                       seeds_per_cp=seeds_per_cp,
                                       rng_seed=seed)
    cands = tracing.build_candidates(grid, field, cps, cfg)
    payload = tracing.candidates_to_json(cands)
    if out:
        Path(out).write_text(json.dumps(payload))
    else:
        print(json.dumps(payload))
    _log(f"{len(cands)} candidates ({sum(1 for c in cands if c.from_critical is not None)}"
         " from critical vicinities)", quiet)


def _run_select(config: dict, overrides: dict) -> list[Path]:
    cfg = dict(config)
    cfg.update({k: v for k, v in overrides.items() if v is not None})

    grid = volume.load_svf(cfg["input"])
    scalar_field = cfg["scalar_field"]
    vector_field = cfg["vector_field"]
    outputs = Path(cfg["outputs"])
    outputs.mkdir(parents=True, exist_ok=True)

    cps_vec = topology.extract_vector_critical_points(grid, vector_field)

    meshes = []
    for n, spec_ in enumerate(cfg.get("isosurfaces", [])):
        mesh = isosurface.polygonize(grid, scalar_field, spec_["isovalue"],
                                     spec_.get("opacity", 0.4), surface_index=n)
        meshes.append(mesh)

    tcfg = tracing.TraceConfig.for_grid(grid, vector_field, **cfg.get("trace", {}))
    cands = tracing.build_candidates(grid, vector_field, cps_vec, tcfg)

    cam = scoring.Camera.from_dict(cfg["camera"])
    scfg = selection.SelectionConfig(**cfg.get("selection", {"k": 10}))
    scores = scoring.score_all(cam, cands, meshes, scfg.mode)
    result = selection.select_streamlines(cands, scores, grid, scfg, camera=cam)

    written: list[Path] = []
    try:
        obj = outputs / "meshes.obj"
        isosurface.export_obj(meshes, obj, outputs / "meshes.mtl")
        written += [obj, outputs / "meshes.mtl"]
        p = outputs / "streamlines_all.json"
        p.write_text(json.dumps(tracing.candidates_to_json(cands)))
        written.append(p)
        p = outputs / "scores.json"
        p.write_text(json.dumps(scoring.score_report(scores, cands)))
        written.append(p)
        p = outputs / "selection.json"
        p.write_text(json.dumps(result.to_dict()))
        written.append(p)
    except Exception:
        for w in written:
            w.unlink(missing_ok=True)
        raise
    return written


@app.command("select")
@click.option("--config", "-c", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "-i", "input_", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "-o", type=click.Path(file_okay=False))
@click.option("--seed", type=int, default=None, help="override trace rng seed")
@click.option("--quiet", is_flag=True)
def cmd_select(config, input_, out, seed, quiet):
    """Run the full pipeline per a RunConfig JSON file; write outputs."""
    cfg = json.loads(Path(config).read_text())
    overrides = {"input": input_, "outputs": out}
    if seed is not None:
        cfg.setdefault("trace", {})["rng_seed"] = seed
    written = _run_select(cfg, overrides)
    _log("wrote " + ", ".join(str(w) for w in written), quiet)


@app.command("serve")
@click.option("--port", type=int, default=7870, envvar="ISOFLOW_PORT")
@click.option("--host", default="127.0.0.1")
def cmd_serve(port, host):
    """Run the interactive HTTP service."""
    import uvicorn

    from .server import create_app
    uvicorn.run(create_app(), host=host, port=port, log_level="warning")


def main(argv=None) -> int:
    try:
        app.main(args=argv, standalone_mode=False)
        return EXIT_OK
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.UsageError as e:
        print(f"error: {e.format_message()}", file=sys.stderr)
        return EXIT_USAGE
    except (volume.VolumeError, scoring.CameraError, KeyError, ValueError,
            json.JSONDecodeError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return EXIT_DATA
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e!r}", file=sys.stderr)
        return EXIT_INTERNAL


def entry():  # console_scripts hook
    sys.exit(main())


if __name__ == "__main__":
    entry()
