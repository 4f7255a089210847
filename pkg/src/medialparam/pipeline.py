"""End-to-end driver: domain -> dipoles -> Voronoi -> medial graph -> mesh -> outputs."""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, replace
from dataclasses import field as dc_field

from .curves import EQUAL_COUNT, DomainSpec, Samples, sample_domain
from .dipole import Dipoles, SiteSet, collect_sites, make_dipoles
from .errors import MedialParamError, PipelineError
from .io import parse_domain, write_field_csv, write_mesh
from .medial import (LabeledTess, classify_edges, collapse_short_edges, default_epsilon,
                     label_cells, type_spine_vertices)
from .param import FieldGrid, iso_contour, sample_field, to_param
from .remesh import RemeshedMesh, interpolative_remesh
from .svg import write_svg
from .voronoi import Triangulation, VoronoiTess, delaunay, verify_voronoi, voronoi_dual


@dataclass
class RunConfig:
    input: str | None = None
    domain: DomainSpec | None = None
    samples: int = 200
    sampling: str = EQUAL_COUNT
    alpha: float = 0.1
    epsilon_scale: float = 0.01
    epsilon: float | None = None
    frame_scale: float = 2.0
    contours: list = dc_field(default_factory=list)
    queries: list = dc_field(default_factory=list)
    svg: str | None = None
    mesh: str | None = None
    field: str | None = None
    field_resolution: int = 101
    seed: int = 0
    verify: bool = False


@dataclass
class Artifacts:
    config: RunConfig
    domain: DomainSpec | None = None
    samples: Samples | None = None
    dipoles: Dipoles | None = None
    sites: SiteSet | None = None
    triangulation: Triangulation | None = None
    tess: VoronoiTess | None = None
    labeled: LabeledTess | None = None
    mesh: RemeshedMesh | None = None
    verify_report: object = None
    contours: dict = dc_field(default_factory=dict)
    queries: list = dc_field(default_factory=list)
    field: FieldGrid | None = None
    timings: dict = dc_field(default_factory=dict)


@contextmanager
def _stage(name, art: Artifacts):
    t0 = time.perf_counter()
    try:
        yield
    except PipelineError:
        raise
    except (MedialParamError, OSError, ValueError) as exc:
        raise PipelineError(name, exc) from exc
    art.timings[name] = time.perf_counter() - t0


def run_pipeline(cfg: RunConfig) -> Artifacts:
    """Run every stage; errors are re-raised as :class:`PipelineError` tagged
    with the stage name."""
    art = Artifacts(cfg)
    with _stage("parse", art):
        art.domain = cfg.domain if cfg.domain is not None else parse_domain(cfg.input)
    with _stage("sample", art):
        art.samples = sample_domain(art.domain, cfg.samples, cfg.sampling)
    with _stage("dipoles", art):
        art.dipoles = make_dipoles(art.samples, art.domain, cfg.alpha)
        art.sites = collect_sites(art.dipoles)
    with _stage("delaunay", art):
        art.triangulation = delaunay(art.sites, seed=cfg.seed)
    with _stage("voronoi", art):
        art.tess = voronoi_dual(art.triangulation, cfg.frame_scale)
    if cfg.verify:
        with _stage("verify", art):
            art.verify_report = rep = verify_voronoi(art.tess)
            if not rep.passed:
                raise MedialParamError(
                    f"Voronoi oracle failed at vertex {rep.worst_vertex} "
                    f"(violation {rep.worst_violation:.3g}, area error {rep.area_error:.3g})")
    with _stage("classify", art):
        lt = classify_edges(art.tess, label_cells(art.tess, art.sites), art.sites)
    with _stage("collapse", art):
        eps = cfg.epsilon if cfg.epsilon is not None else default_epsilon(lt, cfg.epsilon_scale)
        lt = collapse_short_edges(lt, eps)
    with _stage("type", art):
        art.labeled = type_spine_vertices(lt)
    with _stage("remesh", art):
        mesh = interpolative_remesh(art.labeled)
        meta = dict(mesh.meta, alpha=cfg.alpha, samples=cfg.samples, sampling=cfg.sampling,
                    seed=cfg.seed)
        art.mesh = replace(mesh, meta=meta)
    if cfg.contours:
        with _stage("contours", art):
            curves = sorted({int(c) for c in art.mesh.curve_id[: art.mesh.n_boundary]})
            art.contours = {float(r): {c: iso_contour(art.mesh, float(r), c) for c in curves}
                            for r in cfg.contours}
    if cfg.queries:
        with _stage("query", art):
            for p in cfg.queries:
                try:
                    art.queries.append((tuple(p), to_param(p, art.mesh)))
                except MedialParamError as exc:
                    art.queries.append((tuple(p), exc))
    if cfg.field:
        with _stage("field", art):
            x0, y0, x1, y1 = art.domain.bbox()
            pad = 0.1 * max(x1 - x0, y1 - y0)
            art.field = sample_field(art.sites, (x0 - pad, y0 - pad, x1 + pad, y1 + pad),
                                     cfg.field_resolution)
    with _stage("write", art):
        if cfg.mesh:
            write_mesh(art.mesh, cfg.mesh)
        if cfg.svg:
            write_svg(art, cfg.svg)
        if cfg.field:
            write_field_csv(art.field, cfg.field)
    return art
