# %% [markdown]
# # Sampling strategies and the implicit field
#
# Two loosely related experiments: how the sample budget is split across
# loops of very different size, and how the dipole field
# `F(p) = min|p - outer| - min|p - inner|` relates to signed distance.

# %%
import numpy as np

from medialparam import RunConfig, run_pipeline
from medialparam.curves import sample_domain, winding_numbers
from medialparam.dipole import collect_sites, make_dipoles
from medialparam.param import implicit_F
from medialparam.shapes import FIXTURES, disk_domain

# %% [markdown]
# ## Equal count versus length dependent
#
# The three-component fixture has loops whose perimeters differ by a factor
# of five. Equal counts give each loop the same number of samples; the
# length-dependent rule targets one edge length everywhere.

# %%
dom = FIXTURES["three_components"]()
print("perimeters:", [round(c.perimeter, 3) for c in dom])
for strategy in ("equal", "length"):
    mesh = run_pipeline(RunConfig(domain=dom, samples=72, sampling=strategy)).mesh
    means = []
    for loop in mesh.loops:
        p = mesh.points[loop]
        means.append(np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1).mean())
    print("%-6s mean edge per loop: %s  (max/min %.2f)"
          % (strategy, np.round(means, 3), max(means) / min(means)))

# %% [markdown]
# ## Sign of F
#
# F is positive inside and negative outside, away from a thin band around
# the curves.

# %%
art = run_pipeline(RunConfig(domain=FIXTURES["l_with_holes"](), samples=120, sampling="length"))
x0, y0, x1, y1 = art.domain.bbox()
pts = np.random.default_rng(1).uniform((x0 - 0.5, y0 - 0.5), (x1 + 0.5, y1 + 0.5), (3000, 2))
dense = np.vstack([c.polyline(256) for c in art.domain])
far = np.array([np.min(np.linalg.norm(dense - p, axis=1)) for p in pts]) > 2 * art.dipoles.offsets.max()
agree = (implicit_F(pts[far], art.sites) > 0) == (winding_numbers(pts[far], art.domain) == 1)
print("sign agreement on %d points: %s" % (far.sum(), agree.all()))

# %% [markdown]
# ## Does F approach the signed distance?
#
# Compare on a grid around the unit circle for growing sample counts.

# %%
dom = disk_domain()
xs = np.linspace(-1.5, 1.5, 61)
grid = np.column_stack([g.ravel() for g in np.meshgrid(xs, xs)])
sd = 1.0 - np.linalg.norm(grid, axis=1)
for n in (18, 36, 72, 144):
    sites = collect_sites(make_dipoles(sample_domain(dom, n), dom))
    dev = np.abs(implicit_F(grid, sites) - sd)
    near = np.abs(sd) < 0.1
    print("N=%4d  max deviation %.3f   within 0.1 of the curve %.3f" % (n, dev.max(), dev[near].max()))

# %% [markdown]
# The deviation does not shrink. Away from the curve the nearest inner and
# outer sites sit on the same dipole, so F saturates near twice the dipole
# offset instead of growing like the distance. That offset shrinks as N
# grows, so the far-field gap actually widens; even the band within 0.1 of
# the curve drifts upward for the same reason. What does converge is the
# zero set, which is the reconstructed boundary.
