# %% [markdown]
# # Medial coordinates `(curve, theta, r)`
#
# `theta` runs along a boundary loop as normalised arc length, and `r` goes
# from 1 on the boundary to 0 on the spine. On a disk this is ordinary polar
# coordinates; elsewhere it bends to follow the medial axis.

# %%
from pathlib import Path

import numpy as np

from medialparam import RunConfig, run_pipeline
from medialparam.param import ParamPoint, eval_param, iso_contour, locate_face, to_param
from medialparam.shapes import FIXTURES
from medialparam.svg import write_svg

OUT = Path("notebook_output")
OUT.mkdir(exist_ok=True)
rng = np.random.default_rng(0)

# %% [markdown]
# ## Disk: a pure triangle fan

# %%
disk = run_pipeline(RunConfig(domain=FIXTURES["disk"](), samples=36))
mesh = disk.mesh
print(len(mesh.triangles), "triangles,", len(mesh.quads), "quads, pole at", mesh.sverts[0])
pts = rng.uniform(-1, 1, (2000, 2))
pts = pts[[locate_face(p, mesh) is not None for p in pts]]
r = np.array([to_param(p, mesh).r for p in pts])
r_eff = np.linalg.norm(mesh.bverts, axis=1).mean()
print("max |r - |p|/R| = %.4f" % np.abs(r - np.linalg.norm(pts, axis=1) / r_eff).max())

# %% [markdown]
# ## A star with a hole
#
# Every point maps to one `(curve, theta, r)` triple and back.

# %%
art = run_pipeline(RunConfig(domain=FIXTURES["star_with_hole"](), samples=120, sampling="length"))
mesh = art.mesh
for p in [(1.2, 0.3), (0.0, -1.4), (-1.5, 0.5)]:
    q = to_param(p, mesh)
    back = eval_param(q, mesh)
    print(p, "->", q, " back:", np.round(back, 12))

# %% [markdown]
# Walking along constant `theta` from the boundary inwards traces a limb-like
# radial line:

# %%
line = np.array([eval_param(ParamPoint(0, 0.1, r), mesh) for r in np.linspace(1, 0, 6)])
print(np.round(line, 4))

# %% [markdown]
# ## Iso-contours
#
# Contours of constant `r` nest between the boundary and the spine.

# %%
levels = (0.25, 0.5, 0.75)
contours = {r: {c: iso_contour(mesh, r, c) for c in (0, 1)} for r in levels}
for r in levels:
    print("r=%.2f: outer contour with %d points" % (r, len(contours[r][0][0])))
write_svg(art, OUT / "star_with_hole_contours.svg", contours)
print("wrote", OUT / "star_with_hole_contours.svg")
