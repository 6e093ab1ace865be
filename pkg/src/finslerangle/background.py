"""Riemannian background: metric field a_ij(x), 1-form b_i(x), constants c and g.

Model fields are written with the primitives of :mod:`finslerangle.jets`, so the
same code evaluates plain values or x-seeded jets.  Evaluating on an order-3
x-jet gives exact partials da, d2a, d3a (and db, d2b), from which the
Christoffel symbols, the Riemann tensor and its covariant derivative follow.

Array conventions (derivative index always last):

* ``da[h, k, n] = d a_hk / d x^n``
* ``gamma[i, k, n] = a^i_{kn}``
* ``riemann[n, i, k, m] = a_n^i_{km}``
* ``nabla_riemann[k, h, t, i, j] = nabla_k a_h^t_{ij}``
* ``nabla_b[i, m] = nabla_i b_m``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from . import jets as J
from .errors import ConfigError, SingularMetric



@dataclass(frozen=True)
class BackgroundModel:
    """An analytic Riemannian background with a Finsleroid axis form.

    ``metric_fn(x)`` and ``bfield_fn(x)`` accept a point given either as an
    array or as a jet vector and return a_ij and b_i built from jet primitives.
    """

    name: str
    dim: int
    c: float
    g: float
    metric_fn: Callable = field(repr=False, compare=True)
    bfield_fn: Callable = field(repr=False, compare=True)
    params: tuple = ()

    def __post_init__(self):
        if self.dim < 3:
            raise ConfigError(f"dimension must be >= 3, got {self.dim}")
        if not 0.0 < self.c <= 1.0:
            raise ConfigError(f"c out of (0,1]: {self.c}")
        if not -2.0 < self.g < 2.0:
            raise ConfigError(f"g out of (-2,2): {self.g}")

    @property
    def h(self):
        """Homogeneity degree of the automorphism, sqrt(1 - g^2/4)."""
        return math.sqrt(1.0 - self.g * self.g / 4.0)

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def with_g(self, g):
        return replace(self, g=float(g))

    def with_c(self, c):
        return replace(self, c=float(c))

    def at(self, x):
        """All background data at the point ``x`` (cached)."""
        return _point(self, tuple(float(v) for v in np.asarray(x, dtype=float)))

    def metric(self, x):
        return np.asarray(J.value(self.metric_fn(np.asarray(x, dtype=float))), dtype=float)

    def bfield(self, x):
        return np.asarray(J.value(self.bfield_fn(np.asarray(x, dtype=float))), dtype=float)


@dataclass(frozen=True)
class BackgroundPoint:
    """Background quantities at one point; arrays follow the module conventions."""

    x: np.ndarray
    c: float
    g: float
    a: np.ndarray
    ainv: np.ndarray
    da: np.ndarray
    b: np.ndarray
    db: np.ndarray
    d2b: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    riemann: np.ndarray
    nabla_riemann: np.ndarray
    nabla_b: np.ndarray

    @property
    def dim(self):
        return self.a.shape[0]

    @property
    def h(self):
        return math.sqrt(1.0 - self.g * self.g / 4.0)

    @property
    def b_up(self):
        return self.ainv @ self.b

    @property
    def bt(self):
        """Unit-normalized axis form b_i / c."""
        return self.b / self.c

    @property
    def bt_up(self):
        return self.ainv @ self.b / self.c

    @property
    def nabla_bt(self):
        return self.nabla_b / self.c

    @property
    def nabla_bt_up(self):
        """nabla_i btilde^m, stored as [i, m]."""
        return self.nabla_b @ self.ainv.T / self.c

    @property
    def riemann_lower(self):
        """a_{nikm} = a_{ir} a_n^r_{km}."""
        return np.einsum("ir,nrkm->nikm", self.a, self.riemann)


def _lift_point(x, order):
    return J.lift(np.asarray(x, dtype=float), order=order)


@lru_cache(maxsize=4096)
def _point(model, xt):
    x = np.array(xt)
    xj = _lift_point(x, 3)
    aj = model.metric_fn(xj)
    bj = model.bfield_fn(xj)
    a = np.array(aj.val)
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise SingularMetric(f"metric not symmetric at {x}")
    eig = np.linalg.eigvalsh(a)
    if eig[0] <= 1e-12 * max(1.0, eig[-1]):
        raise SingularMetric(f"metric not positive definite at {x} (min eigenvalue {eig[0]:.3e})")
    ainv = np.linalg.inv(a)

    # jet of da in x (order 2), obtained by moving the first seed axis into the leading shape
    da_j = J.Jet._make(aj.d1, aj.d2, aj.d3)
    ainv_j = J.inv(aj.truncate(2))
    lower = da_j + da_j.transpose(0, 2, 1) - da_j.transpose(2, 0, 1)
    gamma_j = J.einsum("ih,hkn->ikn", ainv_j, lower) * 0.5
    gamma = gamma_j.val
    dgamma_j = J.Jet._make(gamma_j.d1, gamma_j.d2)  # [i, n, m, k] = d_k Gamma^i_nm
    riem_j = (dgamma_j.transpose(1, 0, 3, 2) - dgamma_j.transpose(1, 0, 2, 3)
              + J.einsum("unm,iuk->nikm", gamma_j.truncate(1), gamma_j.truncate(1))
              - J.einsum("unk,ium->nikm", gamma_j.truncate(1), gamma_j.truncate(1)))
    riemann = riem_j.val
    driem = np.moveaxis(riem_j.d1, -1, 0)  # [k, h, t, i, j]
    nabla_riemann = _nabla_riemann_from(driem, gamma, riemann)

    b = np.array(bj.val)
    db = np.array(bj.d1)  # [m, i] = d_i b_m
    nabla_b = db.T - np.einsum("kim,k->im", gamma, b)
    return BackgroundPoint(
        x=x, c=model.c, g=model.g, a=a, ainv=ainv, da=np.array(aj.d1), b=b, db=db,
        d2b=np.array(bj.d2), gamma=gamma, dgamma=np.array(gamma_j.d1), riemann=riemann,
        nabla_riemann=nabla_riemann, nabla_b=nabla_b,
    )


def _nabla_riemann_from(driem, gamma, riemann):
    return (driem
            + np.einsum("tku,huij->khtij", gamma, riemann)
            - np.einsum("ukh,utij->khtij", gamma, riemann)
            - np.einsum("uki,htuj->khtij", gamma, riemann)
            - np.einsum("ukj,htiu->khtij", gamma, riemann))


# --------------------------------------------------------------------- operations

def christoffel(model, x):
    """Christoffel symbols a^i_{kn} as an array ``[i, k, n]``."""
    return model.at(x).gamma


def riemann(model, x):
    """Riemann tensor a_n^i_{km} as an array ``[n, i, k, m]``."""
    return model.at(x).riemann


def nabla_riemann(model, x, method="analytic"):
    """nabla_k a_h^t_{ij}, indexed ``[k, h, t, i, j]``.

    ``method="fd"`` differentiates :func:`riemann` by Richardson-extrapolated
    central differences instead of using the exact third derivatives of a.
    """
    bp = model.at(x)
    if method == "analytic":
        return bp.nabla_riemann
    if method != "fd":
        raise ValueError(f"unknown method {method!r}")
    from .fd import xderiv
    driem = np.moveaxis(xderiv(lambda z: model.at(z).riemann, x), -1, 0)
    return _nabla_riemann_from(driem, bp.gamma, bp.riemann)


def nabla_b(model, x):
    """nabla_i b_m as ``[i, m]``."""
    return model.at(x).nabla_b


def riem_transport_coeffs(model, x, t):
    """Riemannian transport coefficients L^k_i(x, t) = -a^k_{ih} t^h, as ``[k, i]``."""
    return -np.einsum("kih,h->ki", model.at(x).gamma, np.asarray(t, dtype=float))


def nabla_metric(model, x):
    """nabla_i a_mn, which must vanish for the Levi-Civita connection; ``[i, m, n]``."""
    bp = model.at(x)
    return (np.moveaxis(bp.da, -1, 0)
            - np.einsum("kim,kn->imn", bp.gamma, bp.a)
            - np.einsum("kin,mk->imn", bp.gamma, bp.a))


def riemannian_angle(model, x, t1, t2):
    a = model.at(x).a
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    cosv = (t1 @ a @ t2) / math.sqrt((t1 @ a @ t1) * (t2 @ a @ t2))
    return math.acos(min(1.0, max(-1.0, cosv)))


def check_model(model, xs):
    """Validate model invariants at the sample points; returns the worst |a^ij b_i b_j - c^2|."""
    worst = 0.0
    for x in xs:
        bp = model.at(x)  # raises SingularMetric
        worst = max(worst, abs(bp.b @ bp.ainv @ bp.b - model.c ** 2))
    if worst > 1e-10:
        raise ConfigError(f"|b| deviates from c by {worst:.3e}")
    return worst


# --------------------------------------------------------------------- shipped models

def _const(xj, arr):
    arr = np.asarray(arr, dtype=float)
    if isinstance(xj, J.Jet):
        return J.constant(arr, xj.n, xj.order)
    return arr


def _dot(k, xj):
    if isinstance(xj, J.Jet):
        return J.einsum("i,i->", np.asarray(k, dtype=float), xj)
    return float(np.dot(k, xj))


def _rates(dim, rate, spread=0.6):
    # a fixed, dimension-dependent wave vector; deterministic so models hash stably
    return tuple(rate * (1.0 + spread * math.sin(1.3 * (i + 1))) for i in range(dim))


def _unit_field(xj, dim, k1, k2):
    """Unit (Euclidean) vector field rotating in the first three coordinates."""
    th = _dot(k1, xj)
    ps = _dot(k2, xj)
    comps = [J.cos(th) * J.cos(ps), J.sin(th) * J.cos(ps), J.sin(ps)]
    comps += [_const(xj, 0.0) * 1.0 for _ in range(dim - 3)]
    if isinstance(xj, J.Jet):
        comps = [c if isinstance(c, J.Jet) else _const(xj, c) for c in comps]
        return J.stack(comps)
    return np.array(comps, dtype=float)


def flat_model(dim=3, c=1.0, g=0.6):
    """Model (i): Euclidean metric and a constant axis form of norm c."""
    e1 = np.zeros(dim)
    e1[0] = c

    def metric(xj):
        return _const(xj, np.eye(dim))

    def bfield(xj):
        return _const(xj, e1)

    return BackgroundModel("flat", dim, float(c), float(g), metric, bfield)


def rotating_model(dim=3, c=1.0, g=0.6, rate=0.7):
    """Model (ii): Euclidean metric, b = c (cos th, sin th, 0, ...) with th = k.x."""
    k = _rates(dim, rate)

    def metric(xj):
        return _const(xj, np.eye(dim))

    def bfield(xj):
        th = _dot(k, xj)
        comps = [J.cos(th) * c, J.sin(th) * c] + [_const(xj, 0.0) for _ in range(dim - 2)]
        if isinstance(xj, J.Jet):
            return J.stack(comps)
        return np.array(comps, dtype=float)

    return BackgroundModel("rotating", dim, float(c), float(g), metric, bfield, (("rate", rate),))


def _conformal(name, dim, c, g, phi_fn, rate, params):
    k1 = _rates(dim, rate)
    k2 = _rates(dim, 0.6 * rate, spread=-0.4)

    def metric(xj):
        return J.exp(phi_fn(xj) * 2.0) * np.eye(dim)

    def bfield(xj):
        return _unit_field(xj, dim, k1, k2) * (J.exp(phi_fn(xj)) * c)

    return BackgroundModel(name, dim, float(c), float(g), metric, bfield, params)


def conformal_model(dim=3, c=1.0, g=0.6, amp=0.15, rate=0.5):
    """Model (iii): a = exp(2 phi) delta, b_i = c exp(phi) n_i with |n| = 1."""
    w = _rates(dim, 1.0, spread=0.5)

    def phi(xj):
        s = J.sin(_dot(w, xj)) * amp
        return s + J.cos(_dot(w[::-1], xj)) * (0.5 * amp)

    return _conformal("conformal", dim, c, g, phi, rate, (("amp", amp), ("rate", rate)))


def sphere_model(dim=3, c=1.0, g=0.6, curvature=0.5, rate=0.4):
    """Model (iv): constant sectional curvature via a = delta / (1 + K|x|^2/4)^2."""

    def phi(xj):
        if isinstance(xj, J.Jet):
            r2 = J.einsum("i,i->", xj, xj)
        else:
            r2 = float(np.dot(xj, xj))
        return -J.log(r2 * (curvature / 4.0) + 1.0)

    return _conformal("sphere", dim, c, g, phi, rate, (("curvature", curvature), ("rate", rate)))


MODELS = {
    "i": flat_model,
    "ii": rotating_model,
    "iii": conformal_model,
    "iv": sphere_model,
}
MODEL_ALIASES = {"flat": "i", "rotating": "ii", "conformal": "iii", "sphere": "iv"}


def make_model(model_id, **kwargs):
    key = MODEL_ALIASES.get(str(model_id).lower(), str(model_id).lower())
    if key not in MODELS:
        raise ConfigError(f"unknown model {model_id!r}; choose from {sorted(MODELS)}")
    return MODELS[key](**kwargs)


# --------------------------------------------------------------------- curves

@dataclass(frozen=True)
class CurvePath:
    """A base curve x(s), s in [0, 1], with its velocity."""

    x: Callable
    xdot: Callable
    closed: bool
    label: str = ""


def circle(center, radius, plane=(0, 1)):
    center = np.asarray(center, dtype=float)
    i, j = plane
    w = 2.0 * math.pi

    def x(s):
        p = center.copy()
        p[i] += radius * math.cos(w * s)
        p[j] += radius * math.sin(w * s)
        return p

    def xdot(s):
        v = np.zeros_like(center)
        v[i] = -radius * w * math.sin(w * s)
        v[j] = radius * w * math.cos(w * s)
        return v

    return CurvePath(x, xdot, True, f"circle(r={radius})")


def segment(start, end):
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    d = end - start
    return CurvePath(lambda s: start + s * d, lambda s: d.copy(), False, "segment")
