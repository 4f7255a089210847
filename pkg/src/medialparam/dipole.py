"""Paired inside/outside Voronoi sites straddling each boundary sample."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import DomainSpec, Samples, winding_numbers
from .errors import ClearanceError, DegenerateSitesError, InvalidArgumentError

IN, OUT = 1, 0


@dataclass(frozen=True)
class Dipole:
    outer: np.ndarray
    inner: np.ndarray
    sample_idx: int
    offset: float


@dataclass(frozen=True, eq=False)
class Dipoles:
    """All dipoles of a sample set, one row per sample."""

    outer: np.ndarray
    inner: np.ndarray
    offsets: np.ndarray
    samples: Samples

    def __len__(self):
        return len(self.offsets)

    def __getitem__(self, i) -> Dipole:
        return Dipole(self.outer[i], self.inner[i], i, float(self.offsets[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))


def _loop_neighbours(samples: Samples):
    """Indices of the cyclic previous / next sample on the same loop."""
    prev = np.empty(len(samples), dtype=int)
    nxt = np.empty(len(samples), dtype=int)
    for cid in np.unique(samples.curve_ids):
        idx = samples.loop_indices(cid)
        prev[idx] = np.roll(idx, 1)
        nxt[idx] = np.roll(idx, -1)
    return prev, nxt


def make_dipoles(samples: Samples, domain: DomainSpec, alpha: float = 0.1,
                 check_clearance: bool = True) -> Dipoles:
    """Place a dipole on the normal line of every sample.

    The offset is ``alpha`` times the shorter of the two adjacent chords, the
    inner site sits on the left normal (towards the material).  Raises
    :class:`ClearanceError` if a site lands on the wrong side of the boundary
    or the spacing condition ``2 * offset <= 0.25 * |P[i+1] - P[i-1]|`` fails.
    """
    if not 0 < alpha <= 0.25:
        raise InvalidArgumentError(f"alpha must be in (0, 0.25], got {alpha}")
    pos, tan = samples.positions, samples.tangents
    prev, nxt = _loop_neighbours(samples)
    chord_prev = np.linalg.norm(pos - pos[prev], axis=1)
    chord_next = np.linalg.norm(pos[nxt] - pos, axis=1)
    offsets = alpha * np.minimum(chord_prev, chord_next)
    normals = np.column_stack([-tan[:, 1], tan[:, 0]])
    inner = pos + offsets[:, None] * normals
    outer = pos - offsets[:, None] * normals

    span = np.linalg.norm(pos[nxt] - pos[prev], axis=1)
    bad = np.flatnonzero(2 * offsets > 0.25 * span)
    if len(bad):
        i = int(bad[0])
        raise ClearanceError(f"sample {i}: dipole offset {offsets[i]:.3g} too large for "
                             f"neighbour spacing {span[i]:.3g}", sample=i)
    if check_clearance:
        w_in = winding_numbers(inner, domain)
        bad = np.flatnonzero(w_in != 1)
        if len(bad):
            i = int(bad[0])
            raise ClearanceError(f"sample {i}: inner site escaped the domain", sample=i)
        w_out = winding_numbers(outer, domain)
        bad = np.flatnonzero(w_out == 1)
        if len(bad):
            i = int(bad[0])
            raise ClearanceError(f"sample {i}: outer site lies inside the domain", sample=i)
    return Dipoles(outer, inner, offsets, samples)


@dataclass(frozen=True, eq=False)
class SiteSet:
    """Flat labelled site list: site ``2k`` is the inner, ``2k+1`` the outer site
    of sample ``k``."""

    points: np.ndarray
    labels: np.ndarray
    sample_idx: np.ndarray
    curve_ids: np.ndarray

    def __len__(self):
        return len(self.points)

    @property
    def inner_mask(self) -> np.ndarray:
        return self.labels == IN

    @property
    def inner(self) -> np.ndarray:
        return self.points[self.labels == IN]

    @property
    def outer(self) -> np.ndarray:
        return self.points[self.labels == OUT]


def collect_sites(dipoles: Dipoles) -> SiteSet:
    n = len(dipoles)
    pts = np.empty((2 * n, 2))
    pts[0::2] = dipoles.inner
    pts[1::2] = dipoles.outer
    labels = np.tile([IN, OUT], n)
    sample_idx = np.repeat(np.arange(n), 2)
    curve_ids = np.repeat(dipoles.samples.curve_ids, 2)
    if n:
        span = np.ptp(pts, axis=0)
        tol = 1e-12 * float(np.hypot(*span))
        if _has_close_pair(pts, tol):
            raise DegenerateSitesError("two dipole sites coincide (samples too close)")
    return SiteSet(pts, labels, sample_idx, curve_ids)


def _has_close_pair(pts, tol):
    if tol <= 0:
        return len(np.unique(pts, axis=0)) < len(pts)
    keys = [tuple(k) for k in np.floor((pts - pts.min(axis=0)) / tol).astype(np.int64)]
    buckets = {}
    for i, k in enumerate(keys):
        buckets.setdefault(k, []).append(i)
    for i, (kx, ky) in enumerate(keys):
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in buckets.get((kx + dx, ky + dy), ()):
                    if j > i and np.linalg.norm(pts[i] - pts[j]) <= tol:
                        return True
    return False
