"""Seeded samplers for base points and admissible tangent vectors."""

from __future__ import annotations

import math

import numpy as np

POLE_CONE = 1e-3
RADIUS_RANGE = (0.5, 2.0)


def rng_for(seed):
    return np.random.default_rng(seed)


def sample_x(rng, dim, box=1.0):
    """x uniform in the cube [-box, box]^dim."""
    return rng.uniform(-box, box, size=dim)


def sample_y(rng, bp, radius=RADIUS_RANGE, cone=POLE_CONE):
    """A vector with uniform direction in the a-unit sphere, outside the +-b cones.

    Directions are drawn in an a-orthonormal frame so that the cone test is
    the geometric angle to the axis measured by a.
    """
    L = np.linalg.cholesky(bp.a)          # a = L L^T
    axis = L.T @ bp.b_up
    axis = axis / np.linalg.norm(axis)
    cos_cone = math.cos(cone)
    while True:
        z = rng.standard_normal(bp.dim)
        n = np.linalg.norm(z)
        if n == 0.0:
            continue
        z = z / n
        if abs(float(z @ axis)) < cos_cone:
            break
    r = rng.uniform(*radius)
    return r * np.linalg.solve(L.T, z)


def sample_pair(rng, bp, **kw):
    return sample_y(rng, bp, **kw), sample_y(rng, bp, **kw)
