"""Acceptance criteria.

Each test prints exactly one ``PASS``/``FAIL`` line naming the criterion, the
measured value and the threshold, then asserts.  The lines are also gathered
into the terminal summary (see ``conftest.py``).
"""
import time
from fractions import Fraction

import numpy as np
import pytest
import shapely
from shapely.geometry import LineString, Point, Polygon

from medialparam import RunConfig, run_pipeline
from medialparam.cli import main
from medialparam.curves import sample_domain, winding_numbers
from medialparam.dipole import collect_sites, make_dipoles
from medialparam.io import write_domain
from medialparam.medial import EdgeLabel, VertexType
from medialparam.param import (eval_param, forward_bilinear, implicit_F, inverse_bilinear,
                               iso_contour, locate_face, to_param)
from medialparam.predicates import incircle_ccw, orient2d
from medialparam.remesh import mesh_stats
from medialparam.shapes import FIXTURES, capsule_domain, disk_domain
from medialparam.voronoi import delaunay, verify_voronoi, voronoi_dual

from conftest import FIXTURE_RUNS, record

EULER = {
    "capsule": [1], "disk": [1], "star": [1], "star_with_hole": [0],
    "ellipse_with_hole": [0], "l_with_holes": [-2], "three_components": [1, 1, 1],
}


def verdict(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {name}: {detail}"
    print(line)
    record(line)
    assert ok, line


def run(name, samples=None, sampling=None):
    n, strat = FIXTURE_RUNS[name]
    return run_pipeline(RunConfig(domain=FIXTURES[name](), samples=samples or n,
                                  sampling=sampling or strat))


def capsule_spine_error(samples):
    t0 = time.perf_counter()
    art = run_pipeline(RunConfig(domain=capsule_domain(), samples=samples))
    dt = time.perf_counter() - t0
    s = art.mesh.sverts
    err = float(np.hypot(np.maximum(np.abs(s[:, 0]) - 1.0, 0.0), s[:, 1]).max())
    return art, err, dt


def sign(x):
    return (x > 0) - (x < 0)


def orient_q(a, b, c):
    ax, ay, bx, by, cx, cy = map(Fraction, (*a, *b, *c))
    return sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def incircle_q(a, b, c, d):
    m = []
    for p in (a, b, c):
        x, y = Fraction(p[0]) - Fraction(d[0]), Fraction(p[1]) - Fraction(d[1])
        m.append((x, y, x * x + y * y))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = m
    return sign(a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1))


def seg_dist(p, a, b):
    ab = b - a
    t = np.einsum("mkj,kj->mk", p[:, None, :] - a[None], ab) / np.einsum("kj,kj->k", ab, ab)
    foot = a[None] + np.clip(t, 0, 1)[..., None] * ab[None]
    return np.linalg.norm(p[:, None, :] - foot, axis=2)


def interior_points(mesh, n, rng):
    lo, hi = mesh.points.min(axis=0), mesh.points.max(axis=0)
    out = []
    while len(out) < n:
        out += [p for p in rng.uniform(lo, hi, (4 * n, 2)) if locate_face(p, mesh) is not None]
    return np.array(out[:n])


def test_criterion_01_voronoi_oracle():
    t0 = time.perf_counter()
    failures, worst = [], 0.0
    for seed in range(20):
        pts = np.random.default_rng(seed).uniform(0, 1, (200, 2))
        rep = verify_voronoi(voronoi_dual(delaunay(pts, seed=seed)))
        worst = max(worst, rep.worst_violation)
        if not rep.passed:
            failures.append(seed)
    dom = disk_domain()
    sites = collect_sites(make_dipoles(sample_domain(dom, 36), dom))
    rep = verify_voronoi(voronoi_dual(delaunay(sites)))
    worst = max(worst, rep.worst_violation)
    dt = time.perf_counter() - t0
    ok = not failures and rep.passed and len(sites) == 72 and dt < 5
    verdict("1 (Voronoi oracle)", ok,
            f"20 random sets + 72 circle sites, failures {failures or 'none'}, "
            f"worst relative violation {worst:.2e} (<= 1e-9), {dt:.2f} s (< 5 s)")


def test_criterion_02_exact_predicates():
    rng = np.random.default_rng(2024)
    n = 100_000
    a, b = rng.uniform(-1, 1, (n, 2)), rng.uniform(-1, 1, (n, 2))
    c = a + rng.uniform(-1, 2, (n, 1)) * (b - a) + rng.uniform(-1e-14, 1e-14, (n, 2))
    tri = [tuple(map(tuple, x)) for x in zip(a.tolist(), b.tolist(), c.tolist())]
    ang = np.sort(rng.uniform(0, 2 * np.pi, (n, 4)), axis=1)
    circ = np.stack([np.cos(ang), np.sin(ang)], -1) + rng.uniform(-1e-14, 1e-14, (n, 4, 2))
    quads = [tuple(map(tuple, q)) for q in circ.tolist()]

    t0 = time.perf_counter()
    got_o = [orient2d(*t) for t in tri]
    ccw = [orient2d(*q[:3]) == 1 for q in quads]
    got_i = [incircle_ccw(*q) if ok else None for q, ok in zip(quads, ccw)]
    dt = time.perf_counter() - t0
    bad_o = sum(g != orient_q(*t) for g, t in zip(got_o, tri))
    bad_i = sum(g != incircle_q(*q) for g, q, ok in zip(got_i, quads, ccw) if ok)
    n_i = sum(ccw)
    ok = bad_o == 0 and bad_i == 0 and dt < 10
    verdict("2 (exact predicates)", ok,
            f"{n} orient2d + {n_i} incircle near-degenerate cases, mismatches "
            f"{bad_o}+{bad_i} (0 required), predicate time {dt:.2f} s (< 10 s)")


def test_criterion_03a_capsule_medial_axis():
    art, err, dt = capsule_spine_error(200)
    polar = len(art.labeled.vertices_of_type(VertexType.POLAR))
    branch = len(art.labeled.vertices_of_type(VertexType.BRANCH))
    ok = err <= 0.02 and polar == 2 and branch == 0 and dt < 2
    verdict("3a (capsule N=200)", ok,
            f"max spine distance {err:.3e} (<= 0.02), polar {polar} (2), branch {branch} (0), "
            f"{dt:.2f} s (< 2 s)")


def test_criterion_03b_capsule_convergence():
    _, e200, _ = capsule_spine_error(200)
    _, e400, dt = capsule_spine_error(400)
    ratio = e200 / e400
    verdict("3b (capsule N 200->400 convergence)", ratio >= 3 and dt < 2,
            f"max spine distance {e200:.3e} -> {e400:.3e}, ratio {ratio:.2f} (>= 3), "
            f"N=400 run {dt:.2f} s (< 2 s)")


def test_criterion_04_disk_degeneracy():
    art = run("disk", 36, "equal")
    mesh, lt = art.mesh, art.labeled
    spine = sorted(lt.spine_vertex_type)
    centroid = np.zeros(2)
    pole_ok = len(spine) == 1 and lt.spine_vertex_type[spine[0]] == VertexType.POLAR
    pole_dist = float(np.linalg.norm(lt.verts[spine[0]] - centroid))
    rng = np.random.default_rng(4)
    pts = interior_points(mesh, 1000, rng)
    r_eff = float(np.linalg.norm(mesh.bverts - centroid, axis=1).mean())
    r = np.array([to_param(p, mesh).r for p in pts])
    r_err = float(np.abs(r - np.linalg.norm(pts - centroid, axis=1) / r_eff).max())
    ok = (pole_ok and pole_dist <= 0.05 * r_eff and len(mesh.triangles) == 36
          and not mesh.quads and r_err <= 0.05)
    verdict("4 (disk degeneracy)", ok,
            f"single polar vertex {pole_ok} at {pole_dist:.2e} from centroid (<= {0.05 * r_eff:.3f}), "
            f"{len(mesh.triangles)} triangles / {len(mesh.quads)} quads (36 / 0), "
            f"max |r - polar r| {r_err:.4f} (<= 0.05)")


def _structure_problems(name, mesh):
    probs = []
    nb = mesh.n_boundary
    for f, face in enumerate(mesh.faces):
        nbf = sum(v < nb for v in face)
        if (len(face), nbf) not in ((4, 2), (3, 2)):
            probs.append(f"face {f} has {nbf} boundary of {len(face)}")
    for loop in mesh.loops:
        if not (np.diff(mesh.theta[loop]) > 0).all():
            probs.append("theta not increasing")
    polys = [Polygon(mesh.face_points(f)) for f in range(len(mesh.faces))]
    total = sum(p.area for p in polys)
    if not all(p.is_valid and p.exterior.is_ccw for p in polys):
        probs.append("invalid or CW face")
    if abs(shapely.union_all(polys).area - total) > 1e-9 * total:
        probs.append("faces overlap")
    if sorted(mesh_stats(mesh)["euler"]) != sorted(EULER[name]):
        probs.append(f"euler {mesh_stats(mesh)['euler']}")
    return probs


def test_criterion_05a_mesh_structure():
    problems = {}
    for name in sorted(FIXTURE_RUNS):
        p = _structure_problems(name, run(name).mesh)
        if p:
            problems[name] = p
    verdict("5a (mesh structure: face types, theta, disjointness, Euler)", not problems,
            f"7 fixtures, problems: {problems or 'none'}")


def test_criterion_05b_four_valence():
    bad, counts = {}, {}
    for name in sorted(FIXTURE_RUNS):
        mesh = run(name).mesh
        val = mesh_stats(mesh)["spine_valency"]
        nonpolar = [s for s in range(mesh.n_boundary, len(mesh.points))
                    if mesh.spine_type(s) != "pole"]
        counts[name] = len(nonpolar)
        off = sorted({val[s] for s in nonpolar if val[s] != 4})
        if off:
            bad[name] = {"valencies": off,
                         "kinds": sorted({mesh.spine_type(s) for s in nonpolar if val[s] != 4})}
    verdict("5b (every non-polar spine vertex 4-valent)", not bad,
            f"{sum(counts.values())} non-polar spine vertices over 7 fixtures, "
            f"violations: {bad or 'none'}")


def test_criterion_06_classification_and_fidelity():
    issues = {}
    worst_dist, worst_cross = 0.0, 0.0
    for name in sorted(FIXTURE_RUNS):
        art = run(name)
        lt, s, d = art.labeled, art.samples, art.dipoles
        msg = []
        if len(lt.E_B) + len(lt.E_L) + len(lt.E_S) + len(lt.E_out) != len(lt.edges):
            msg.append("labels not a partition")
        if sorted(b.curve_id for b in lt.boundary_loops) != list(range(len(art.domain))):
            msg.append("not one cycle per curve")
        for b in lt.boundary_loops:
            idx = s.loop_indices(b.curve_id)
            poly = lt.verts[b.verts]
            a, c = poly, np.roll(poly, -1, axis=0)
            dist = seg_dist(s.positions[idx], a, c)
            rel = dist.min(axis=1) / d.offsets[idx]
            direc = (c - a)[dist.argmin(axis=1)]
            direc /= np.linalg.norm(direc, axis=1)[:, None]
            t = s.tangents[idx]
            cr = np.abs(direc[:, 0] * t[:, 1] - direc[:, 1] * t[:, 0])
            worst_dist, worst_cross = max(worst_dist, rel.max()), max(worst_cross, cr.max())
            if rel.max() > 0.5 or cr.max() > 0.05:
                msg.append(f"curve {b.curve_id} fidelity")
        if msg:
            issues[name] = msg
    verdict("6 (classification totality, boundary fidelity)", not issues,
            f"7 fixtures, worst dist/delta {worst_dist:.2e} (<= 0.5), worst |dir x T| "
            f"{worst_cross:.2e} (<= 0.05), issues: {issues or 'none'}")


def test_criterion_07_roundtrip():
    rng = np.random.default_rng(7)
    worst_p, worst_uv, elapsed = 0.0, 0.0, 0.0
    for name in ("capsule", "star_with_hole"):
        mesh = run(name).mesh
        pts = interior_points(mesh, 1000, rng)
        t0 = time.perf_counter()
        back = np.array([eval_param(to_param(p, mesh), mesh) for p in pts])
        elapsed += time.perf_counter() - t0
        worst_p = max(worst_p, float(np.linalg.norm(back - pts, axis=1).max()))
        faces = rng.integers(0, len(mesh.faces), 1000)
        uv = rng.uniform(0, 1, (1000, 2))
        t0 = time.perf_counter()
        for f, (u, v) in zip(faces, uv):
            fp = mesh.face_points(f)
            if len(fp) == 3:
                v = min(v, 1 - 1e-6)  # u is undefined at a triangle apex
            uu, vv = inverse_bilinear(fp, forward_bilinear(fp, u, v))
            worst_uv = max(worst_uv, abs(uu - u), abs(vv - v))
        elapsed += time.perf_counter() - t0
    ok = worst_p <= 1e-9 and worst_uv <= 1e-9 and elapsed < 1
    verdict("7 (parametrization roundtrip)", ok,
            f"capsule + star_with_hole, max |eval(to_param(p)) - p| {worst_p:.2e}, max (u,v) "
            f"error {worst_uv:.2e} (<= 1e-9), {elapsed:.2f} s (< 1 s)")


def test_criterion_08a_sign_agreement():
    rng = np.random.default_rng(8)
    mism, total = 0, 0
    for name in ("star_with_hole", "l_with_holes", "three_components"):
        art = run(name)
        x0, y0, x1, y1 = art.domain.bbox()
        dense = np.vstack([c.polyline(256) for c in art.domain])
        gap = 2 * art.dipoles.offsets.max()
        pts = []
        while len(pts) < 3334:
            for p in rng.uniform((x0 - 0.5, y0 - 0.5), (x1 + 0.5, y1 + 0.5), (2000, 2)):
                if np.min(np.sum((dense - p) ** 2, axis=1)) > gap * gap:
                    pts.append(p)
        pts = np.array(pts[:3334])
        w = winding_numbers(pts, art.domain)
        mism += int(np.sum((implicit_F(pts, art.sites) > 0) != (w == 1)))
        total += len(pts)
    verdict("8a (sign(F) vs winding number)", mism == 0,
            f"{total} points farther than 2*delta_max from every curve, mismatches {mism} (0)")


def test_criterion_08b_F_zero_at_samples():
    worst = 0.0
    for name in sorted(FIXTURE_RUNS):
        art = run(name)
        worst = max(worst, float(np.abs(implicit_F(art.samples.positions, art.sites)).max()))
    verdict("8b (|F(P_i)| at samples)", worst <= 1e-12,
            f"max |F(P_i)| over 7 fixtures {worst:.2e} (<= 1e-12)")


def test_criterion_08c_F_converges_to_distance():
    dom = disk_domain()
    xs = np.linspace(-1.5, 1.5, 121)
    grid = np.column_stack([g.ravel() for g in np.meshgrid(xs, xs)])
    # signed distance to the sampled curve itself (positive inside)
    curve = dom[0].polyline(4096)
    sd = np.array([np.sqrt(np.min(np.sum((curve - p) ** 2, axis=1))) for p in grid])
    off = sd > 1e-9  # grid points on the curve keep sd = 0
    sd[off] *= np.where(winding_numbers(grid[off], dom) == 1, 1.0, -1.0)
    devs = []
    for n in (18, 36, 72):
        sites = collect_sites(make_dipoles(sample_domain(dom, n), dom))
        devs.append(float(np.abs(implicit_F(grid, sites) - sd).max()))
    ok = devs[0] > devs[1] > devs[2]
    verdict("8c (F -> signed distance, monotone in N)", ok,
            "max grid |F - sd| for N = 18, 36, 72: " + ", ".join(f"{d:.4f}" for d in devs)
            + " (must strictly decrease)")


def test_criterion_09_iso_contours():
    issues = {}
    for name in ("capsule", "disk", "star"):
        mesh = run(name).mesh
        msg = []
        (c1,) = iso_contour(mesh, 1.0, 0)
        if not (np.array_equal(c1[:-1], mesh.bverts) and np.array_equal(c1[0], c1[-1])):
            msg.append("r=1 != boundary")
        spine = iso_contour(mesh, 0.0, 0)
        spine_pts = np.vstack(spine)
        key = lambda p: (float(p[0]), float(p[1]))
        got = {frozenset((key(a), key(b))) for line in spine for a, b in zip(line, line[1:])}
        want = {frozenset((key(mesh.points[a]), key(mesh.points[b]))) for a, b in mesh.spine_edges}
        if got != want or {key(p) for p in spine_pts} != {key(p) for p in mesh.sverts}:
            msg.append("r=0 != spine")
        (half,) = iso_contour(mesh, 0.5, 0)
        ring = Polygon(half)
        inner = Point(spine_pts[0]) if len(spine_pts) == 1 else LineString(spine_pts)
        if not (np.array_equal(half[0], half[-1]) and LineString(half).is_simple and ring.is_valid):
            msg.append("r=0.5 not closed/simple")
        if not (Polygon(c1).contains(ring) and ring.contains(inner)):
            msg.append("r=0.5 not nested")
        if msg:
            issues[name] = msg
    verdict("9 (iso-contours r = 1, 0, 0.5)", not issues,
            f"capsule, disk, star: issues {issues or 'none'}")


def test_criterion_10_sampling_strategies():
    res = {}
    for strat in ("length", "equal"):
        art = run("three_components", 72, strat)
        lens = []
        for lp in art.mesh.loops:
            poly = art.mesh.points[lp]
            lens.append(float(np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1).mean()))
        res[strat] = max(lens) / min(lens)
    per = [c.perimeter for c in FIXTURES["three_components"]()]
    per_ratio = max(per) / min(per)
    ok = res["length"] <= 1.15 and res["equal"] > 1.15 and per_ratio >= 5 - 1e-9
    verdict("10 (sampling strategies)", ok,
            f"perimeter ratio {per_ratio:.2f}; mean-edge max/min: length-dependent "
            f"{res['length']:.3f} (<= 1.15), equal-count {res['equal']:.3f} (> 1.15)")


def test_criterion_11_determinism(tmp_path):
    src = tmp_path / "star_with_hole.json"
    write_domain(FIXTURES["star_with_hole"](), src)
    blobs = []
    for k in range(2):
        d = tmp_path / str(k)
        d.mkdir()
        code = main(["run", str(src), "--samples", "120", "--contours", "0.5",
                     "--svg", str(d / "o.svg"), "--mesh", str(d / "o.txt"),
                     "--field", str(d / "o.csv"), "--field-resolution", "41"])
        assert code == 0
        blobs.append([(d / f).read_bytes() for f in ("o.txt", "o.svg", "o.csv")])
    same = [a == b for a, b in zip(*blobs)]
    verdict("11 (determinism)", all(same),
            f"mesh/SVG/field byte-identical: {same}, sizes {[len(b) for b in blobs[0]]}")
