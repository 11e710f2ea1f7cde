"""Acceptance gate: one test per release criterion, each printing PASS/FAIL.

Every test here re-states a contract the package must honor, at its stated
tolerance, and reports a single line so a release run reads as a checklist.
"""
import json
import time

import numpy as np
import pytest

from isoflow import generate_synthetic
from isoflow.cli import main as cli_main
from isoflow.isosurface import mesh_stats, polygonize, weld_vertices
from isoflow.scoring import (Camera, MODE_PER_SEGMENT, entropy_coarse,
                             entropy_from_lengths, occlusion_factors,
                             score_all)
from isoflow.selection import SelectionConfig, cell_footprint, select_streamlines
from isoflow.topology import extract_scalar_extrema, extract_vector_critical_points
from isoflow.tracing import (Seed, Streamline, TraceConfig, build_candidates,
                             integrate_streamline)

from isoflow.volume import Field, SCALAR

from conftest import make_grid, sphere_grid
from test_scoring import line, wall
from test_selection import brute_force_select, score
from test_topology import brute_force_extrema, cp_index_sets


def report(name, ok):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}")
    assert ok, name


class TestAcceptance:

    def test_coarse_entropy_identity(self):
        """10k random coarse-penalty evaluations match the closed form."""
        rng = np.random.default_rng(7)
        t0 = time.perf_counter()
        ok = True
        for _ in range(10_000):
            E = float(rng.uniform(0, 1))
            m = int(rng.integers(1, 200))
            m0 = int(rng.integers(0, m + 1))
            alpha = float(rng.uniform(0, 1))
            got = entropy_coarse(E, m, m0, alpha)
            if abs(got - (1 - alpha * m0 / m) * E) > 1e-12:
                ok = False
                break
        elapsed = time.perf_counter() - t0
        report(f"coarse entropy identity, 10k cases in {elapsed:.2f}s",
               ok and elapsed < 1.0)

    def test_entropy_analytic_values(self):
        """Four equal visible segments hit the closed form; an end-on view
        with zero projected length scores exactly zero."""
        E4 = entropy_from_lengths(np.ones(4), np.ones(4), 4)
        ok = abs(E4 - 2 / np.log2(5)) < 1e-9
        end_on = line([[0, 0, 0.5], [0, 0, 0.4], [0, 0, 0.3], [0, 0, 0.2],
                       [0, 0, 0.1]])
        cam = Camera(eye=(0, 0, 3), target=(0, 0, 0), up=(0, 1, 0),
                     fov_y=np.pi / 2, width=200, height=200)
        E0 = score_all(cam, [end_on], [])[0].E
        report("analytic entropy: E(4 equal)=2/log2(5), end-on E=0",
               ok and E0 == 0.0)

    def test_occlusion_monotonicity(self):
        """Raising surface opacity never raises any candidate's score, and an
        opaque sphere silences everything inside it. 500 candidates, <30s."""
        t0 = time.perf_counter()
        g = generate_synthetic("rotation", (33, 33, 33))
        cfg = TraceConfig.for_grid(g, "velocity", uniform_seed_count=520,
                                   seeds_per_cp=0, max_steps=300, rng_seed=5)
        cands = build_candidates(g, "velocity", [], cfg)[:500]
        cam = Camera(eye=(0.5, 0.5, 3.0), target=(0.5, 0.5, 0.5), up=(0, 1, 0),
                     fov_y=np.pi / 3, width=400, height=400)
        sg = sphere_grid(33)
        ok = len(cands) >= 400
        prev = None
        for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
            mesh = polygonize(sg, "scalar", 0.3, opacity=alpha)
            es = np.array([s.E for s in
                           score_all(cam, cands, [mesh], MODE_PER_SEGMENT)])
            if prev is not None and not np.all(es <= prev + 1e-12):
                ok = False
            prev = es
        center = np.array([0.5, 0.5, 0.5])
        mesh = polygonize(sg, "scalar", 0.3, opacity=1.0)
        scores = score_all(cam, cands, [mesh], MODE_PER_SEGMENT)
        for c, s in zip(cands, scores):
            if np.all(np.linalg.norm(c.points - center, axis=1) < 0.29):
                if s.E != 0.0:
                    ok = False
        elapsed = time.perf_counter() - t0
        report(f"occlusion monotonicity over alpha grid, {len(cands)} "
               f"candidates in {elapsed:.1f}s", ok and elapsed < 30.0)

    def test_two_surface_attenuation_product(self):
        """Stacked translucent walls attenuate by the product of their
        transparencies, independent of surface order."""
        cam = Camera(eye=(0, 0, 3), target=(0, 0, 0), up=(0, 1, 0),
                     fov_y=np.pi / 2, width=200, height=200)
        s = line([[0, 0, 0], [0.1, 0, 0]])
        ok = True
        rng = np.random.default_rng(11)
        for _ in range(50):
            a1, a2 = rng.uniform(0, 1, 2)
            f = occlusion_factors(cam, s, [wall(1.2, a1, 0), wall(0.6, a2, 1)])[0]
            r = occlusion_factors(cam, s, [wall(0.6, a2, 0), wall(1.2, a1, 1)])[0]
            want = f.d * (1 - a1) * (1 - a2)
            if abs(f.d_weighted - want) > 1e-12 or abs(r.d_weighted - want) > 1e-12:
                ok = False
        report("two-surface attenuation equals transparency product", ok)

    def test_vector_critical_points(self):
        """A linear field vanishing at c yields exactly one zero at c within
        1e-6 for 100 random interior targets; a constant field yields none."""
        t0 = time.perf_counter()
        rng = np.random.default_rng(13)
        ok = True
        for _ in range(100):
            c = rng.uniform(0.15, 0.85, 3)
            g = generate_synthetic("linear", (32, 32, 32),
                                   params={"center": tuple(c)})
            cps = extract_vector_critical_points(g, "velocity")
            if len(cps) != 1 or np.linalg.norm(cps[0].position - c) > 1e-6:
                ok = False
                break
        gconst = generate_synthetic("constant", (32, 32, 32),
                                    params={"vec": (0.3, -0.1, 0.2)})
        if extract_vector_critical_points(gconst, "velocity"):
            ok = False
        elapsed = time.perf_counter() - t0
        report(f"vector critical points, 100 random linear fields in "
               f"{elapsed:.1f}s", ok and elapsed < 20.0)

    def test_scalar_extrema_oracle(self):
        """Strict six-neighbor extremum detection matches an exhaustive
        per-sample oracle on 50 random fields."""
        rng = np.random.default_rng(17)
        ok = True
        for _ in range(50):
            vals = rng.normal(size=(16, 16, 16)).astype(np.float32)
            g = make_grid((16, 16, 16),
                          fields=[Field("scalar", SCALAR, vals.ravel())])
            got = cp_index_sets(g, extract_scalar_extrema(g, "scalar"))
            want = brute_force_extrema(g.scalar_view("scalar"))
            if got != want:
                ok = False
                break
        report("scalar extrema match exhaustive oracle on 50 random fields", ok)

    def test_marching_cubes(self):
        """Sphere mesh is closed with area within 2% of the analytic value;
        plane mesh vertices sit on the plane within 1e-6."""
        sg = sphere_grid(64)
        mesh = weld_vertices(polygonize(sg, "scalar", 0.3))
        stats = mesh_stats(mesh)
        area_ok = abs(stats["area"] - 4 * np.pi * 0.09) / (4 * np.pi * 0.09) < 0.02
        xs = np.linspace(0, 1, 16, dtype=np.float32)
        plane_vals = np.ascontiguousarray(
            np.broadcast_to(xs, (16, 16, 16)).astype(np.float32))
        pg = make_grid((16, 16, 16),
                       fields=[Field("scalar", SCALAR, plane_vals.ravel())])
        pm = polygonize(pg, "scalar", 0.5)
        plane_ok = pm.triangles.size > 0 and \
            np.max(np.abs(pm.vertices[:, 0] - 0.5)) < 1e-6
        report("marching cubes: closed sphere, 2% area, exact plane",
               stats["closed"] and area_ok and plane_ok)

    def test_rk4_order(self):
        """One-revolution radius error on the circular field shrinks at least
        8x per step halving, across three halvings."""
        g = generate_synthetic("rotation", (33, 33, 33))
        errs = []
        for steps in (64, 128, 256, 512):
            cfg = TraceConfig(step_size=2 * np.pi / steps, max_steps=steps,
                              min_points=2, min_speed=1e-12)
            s = integrate_streamline(
                g, "velocity", Seed(np.array([0.8, 0.5, 0.5]), "uniform", 0),
                cfg)
            errs.append(abs(np.linalg.norm(s.points[-1][:2] - 0.5) - 0.3))
        ratios = [errs[i] / errs[i + 1] for i in range(3)]
        report(f"RK4 convergence ratios {['%.1f' % r for r in ratios]}",
               all(r >= 8.0 for r in ratios))

    def test_selection_matches_oracle(self):
        """Greedy selection agrees with a brute-force phase-rule oracle on
        small scenes, and with a pure top-k sort when constraints are off."""
        g = generate_synthetic("rotation", (9, 9, 9))
        rng = np.random.default_rng(23)
        ok = True
        for trial in range(40):
            n = int(rng.integers(1, 13))
            cands, scores = [], []
            for sid in range(n):
                pts = rng.uniform(0.05, 0.95, (int(rng.integers(2, 6)), 3))
                seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
                cp = int(rng.integers(0, 3)) if rng.random() < 0.4 else None
                cands.append(Streamline(sid, Seed(pts[0], "uniform", sid), pts,
                                        seg, float(seg.sum()), cp))
                scores.append(score(sid, float(rng.uniform(0, 1))))
            cfg = SelectionConfig(k=int(rng.integers(0, n + 2)),
                                  guarantee_critical=bool(rng.random() < 0.5),
                                  density_control=bool(rng.random() < 0.5),
                                  cell_stride=int(rng.integers(1, 3)))
            res = select_streamlines(cands, scores, g, cfg)
            want_chosen, want_rejected = brute_force_select(cands, scores, g, cfg)
            if [(e.streamline_id, e.reason) for e in res.chosen] != want_chosen:
                ok = False
            if res.rejected_density != want_rejected:
                ok = False
            if cfg.density_control:
                seen = set()
                for e in res.chosen:
                    fp = cell_footprint(g, cands[e.streamline_id], cfg.cell_stride)
                    if fp & seen:
                        ok = False
                    seen |= fp
            plain = select_streamlines(
                cands, scores, g,
                SelectionConfig(k=cfg.k, guarantee_critical=False,
                                density_control=False))
            eff = {s.streamline_id: s.effective for s in scores}
            topk = sorted(range(n), key=lambda i: (-eff[i], i))[:cfg.k]
            if plain.chosen_ids() != topk:
                ok = False
        report("greedy selection matches brute-force oracle and top-k", ok)

    def test_view_dependence(self):
        """Side-on and end-on cameras pick different sets, and the selected
        mean score beats a random subset of equal size for both views."""
        g = generate_synthetic("rotation", (17, 17, 17))
        cfg = TraceConfig.for_grid(g, "velocity", uniform_seed_count=120,
                                   seeds_per_cp=0, max_steps=300, rng_seed=9)
        cands = build_candidates(g, "velocity", [], cfg)
        side = Camera(eye=(3.0, 0.5, 0.5), target=(0.5, 0.5, 0.5), up=(0, 1, 0),
                      fov_y=np.pi / 3, width=400, height=400)
        end = Camera(eye=(0.5, 0.5, 3.0), target=(0.5, 0.5, 0.5), up=(0, 1, 0),
                     fov_y=np.pi / 3, width=400, height=400)
        sel_cfg = SelectionConfig(k=8, density_control=False,
                                  guarantee_critical=False)
        sets, ok = [], True
        for cam in (side, end):
            scores = score_all(cam, cands, [])
            res = select_streamlines(cands, scores, g, sel_cfg)
            chosen = res.chosen_ids()
            sets.append(set(chosen))
            eff = {s.streamline_id: s.effective for s in scores}
            mean_sel = np.mean([eff[i] for i in chosen])
            rng = np.random.default_rng(0)
            for trial in range(20):
                subset = rng.choice(len(cands), size=len(chosen), replace=False)
                if mean_sel < np.mean([eff[int(i)] for i in subset]):
                    ok = False
        report("view dependence: camera-specific sets, selection beats random",
               ok and sets[0] != sets[1])

    def test_end_to_end_determinism(self, tmp_path, capsys):
        """Repeated full pipeline runs with a fixed config produce
        byte-identical output files."""
        svf = tmp_path / "rot.svf"
        assert cli_main(["gen", "rotation", "17", "17", "17", "-o", str(svf)]) == 0
        blobs = []
        for name in ("r1", "r2"):
            cfg = {
                "input": str(svf), "scalar_field": "scalar",
                "vector_field": "velocity",
                "isosurfaces": [{"isovalue": -0.09, "opacity": 0.5}],
                "trace": {"uniform_seed_count": 80, "rng_seed": 4,
                          "max_steps": 250},
                "selection": {"k": 6, "mode": "per-segment"},
                "camera": {"eye": [0.5, 0.5, 3.0], "target": [0.5, 0.5, 0.5],
                           "up": [0, 1, 0], "fov_y": 1.0, "width": 400,
                           "height": 300},
                "outputs": str(tmp_path / name),
            }
            cfgp = tmp_path / f"{name}.json"
            cfgp.write_text(json.dumps(cfg))
            assert cli_main(["select", "-c", str(cfgp)]) == 0
            blobs.append(b"".join(
                (tmp_path / name / f).read_bytes()
                for f in ("meshes.obj", "streamlines_all.json",
                          "scores.json", "selection.json")))
        capsys.readouterr()
        report("end-to-end pipeline byte-identical across reruns",
               blobs[0] == blobs[1])
