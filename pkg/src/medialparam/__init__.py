"""Medial-axis parametrization of planar domains bounded by cubic Bezier loops.

Dipole sites straddling the boundary are triangulated; the dual Voronoi
diagram yields both a boundary polyline and a discrete medial axis (spine).
Corner-cutting remeshing turns that graph into quads and polar triangle fans,
on which every interior point gets coordinates (curve, theta, r).
"""
from .curves import (EQUAL_COUNT, LENGTH_DEPENDENT, CurveLoop, DomainSpec, Samples,
                     sample_curve, sample_domain, winding_number, winding_numbers)
from .dipole import IN, OUT, Dipoles, SiteSet, collect_sites, make_dipoles
from .errors import (AmbiguousPointError, ClearanceError, DegenerateInputError,
                     DegenerateSitesError, FaceStructureError, InvalidArgumentError,
                     InversionError, MedialParamError, OrientationWarning, ParseError,
                     PipelineError, SelfIntersectionError, TopologyError, ValidationError)
from .io import parse_domain, read_mesh, write_domain, write_field_csv, write_mesh
from .medial import (EdgeLabel, LabeledTess, VertexType, build_medial, classify_edges,
                     collapse_short_edges, label_cells, type_spine_vertices)
from .param import (ParamPoint, eval_param, forward_bilinear, implicit_F, inverse_bilinear,
                    iso_contour, locate_face, sample_field, to_param)
from .pipeline import Artifacts, RunConfig, run_pipeline
from .predicates import incircle, orient2d
from .remesh import RemeshedMesh, build_faces, interpolative_remesh, mesh_stats
from .svg import write_svg
from .voronoi import Triangulation, VoronoiTess, delaunay, verify_voronoi, voronoi_dual

__version__ = "0.1.0"
