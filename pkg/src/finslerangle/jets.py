"""Truncated Taylor arithmetic ("jets") in the fiber variable.

A :class:`Jet` carries the value of a (possibly tensor-valued) function together
with its first, second and third partial derivatives with respect to ``n`` seed
variables.  Leading axes index tensor components; the trailing 1, 2 or 3 axes of
``d1``/``d2``/``d3`` index the seed variables.  All arithmetic broadcasts over
the leading axes like numpy does.

Only forward propagation is supported.  Derivatives are exact up to rounding,
which is what lets every fiber derivative in the library avoid finite
differences.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

DIVISION_FLOOR = 1e-14
SYMMETRY_RTOL = 1e-12

# einsum letters reserved for the seed (derivative) axes
_DLETTERS = "UVW"


def _x(a, k):
    """Append ``k`` singleton axes to ``a``."""
    a = np.asarray(a)
    return a[(Ellipsis,) + (None,) * k]


def _outer(p, q):
    return p[..., :, None] * q[..., None, :]


def _sym3(p2, q1):
    # p2_ij q_k + p2_ik q_j + p2_jk q_i
    return (p2[..., :, :, None] * q1[..., None, None, :]
            + p2[..., :, None, :] * q1[..., None, :, None]
            + p2[..., None, :, :] * q1[..., :, None, None])


def _cube(p):
    return p[..., :, None, None] * p[..., None, :, None] * p[..., None, None, :]


class Jet:
    """Value plus derivatives up to ``order`` with respect to ``n`` seeds."""

    __slots__ = ("val", "d1", "d2", "d3", "order")
    __array_priority__ = 1000

    def __init__(self, val, d1, d2=None, d3=None, order=None, check=True):
        val = np.asarray(val, dtype=float)
        d1 = np.asarray(d1, dtype=float)
        levels = [d1]
        if d2 is not None:
            levels.append(np.asarray(d2, dtype=float))
            if d3 is not None:
                levels.append(np.asarray(d3, dtype=float))
        if order is None:
            order = len(levels)
        if order not in (1, 2, 3):
            raise ValueError(f"jet order must be 1, 2 or 3, got {order}")
        if order > len(levels):
            raise ValueError("derivative arrays missing for requested order")
        n = d1.shape[-1]
        for k, d in enumerate(levels[:order], start=1):
            if d.shape != val.shape + (n,) * k:
                raise ValueError(f"d{k} has shape {d.shape}, expected {val.shape + (n,) * k}")
        self.val = val
        self.d1 = d1
        self.d2 = levels[1] if order >= 2 else None
        self.d3 = levels[2] if order >= 3 else None
        self.order = order
        if check:
            self.check_symmetry()

    @classmethod
    def _make(cls, val, d1, d2=None, d3=None):
        obj = object.__new__(cls)
        obj.val = val
        obj.d1 = d1
        obj.d2 = d2
        obj.d3 = d3
        obj.order = 1 if d2 is None else (2 if d3 is None else 3)
        return obj

    # ------------------------------------------------------------------ basics

    @property
    def n(self):
        return self.d1.shape[-1]

    @property
    def shape(self):
        return self.val.shape

    @property
    def ndim(self):
        return self.val.ndim

    def levels(self):
        return [d for d in (self.d1, self.d2, self.d3) if d is not None]

    def truncate(self, order):
        if order >= self.order:
            return self
        return Jet._make(self.val, self.d1, self.d2 if order >= 2 else None, None)

    def check_symmetry(self, rtol=SYMMETRY_RTOL):
        """Raise ``AssertionError`` if d2 / d3 are not symmetric in the seed axes."""
        if self.d2 is not None:
            scale = max(1.0, float(np.max(np.abs(self.d2), initial=0.0)))
            err = np.max(np.abs(self.d2 - np.swapaxes(self.d2, -1, -2)), initial=0.0)
            if err > rtol * scale:
                raise AssertionError(f"d2 not symmetric (err {err:.3e})")
        if self.d3 is not None:
            d3 = self.d3
            scale = max(1.0, float(np.max(np.abs(d3), initial=0.0)))
            for perm in ((-2, -1), (-3, -2)):
                err = np.max(np.abs(d3 - np.swapaxes(d3, *perm)), initial=0.0)
                if err > rtol * scale:
                    raise AssertionError(f"d3 not totally symmetric (err {err:.3e})")
        return True

    def __repr__(self):
        return f"Jet(shape={self.shape}, n={self.n}, order={self.order}, val={self.val!r})"

    def __len__(self):
        return self.val.shape[0]

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        if any(i is Ellipsis for i in idx):
            raise IndexError("Ellipsis indexing is not supported on jets")
        return Jet._make(self.val[idx], *(d[idx] for d in self.levels()))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def transpose(self, *axes):
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        nd = self.ndim
        out = [np.transpose(self.val, axes)]
        for k, d in enumerate(self.levels(), start=1):
            out.append(np.transpose(d, tuple(axes) + tuple(range(nd, nd + k))))
        return Jet._make(*out)

    @property
    def T(self):
        return self.transpose()

    def sum(self, axis=None):
        nd = self.ndim
        if axis is None:
            axis = tuple(range(nd))
        elif np.isscalar(axis):
            axis = (axis,)
        axis = tuple(a % nd for a in axis)
        return Jet._make(np.sum(self.val, axis=axis), *(np.sum(d, axis=axis) for d in self.levels()))

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        n = self.n
        out = [self.val.reshape(shape)]
        for k, d in enumerate(self.levels(), start=1):
            out.append(d.reshape(tuple(shape) + (n,) * k))
        return Jet._make(*out)

    # ------------------------------------------------------------- arithmetic

    def _scaled(self, c):
        c = np.asarray(c, dtype=float)
        return Jet._make(self.val * c, *(d * _x(c, k) for k, d in enumerate(self.levels(), start=1)))

    def _shifted(self, c):
        val = self.val + np.asarray(c, dtype=float)
        n = self.n
        return Jet._make(val, *(np.broadcast_to(d, val.shape + (n,) * k)
                                for k, d in enumerate(self.levels(), start=1)))

    def __neg__(self):
        return Jet._make(-self.val, *(-d for d in self.levels()))

    def __pos__(self):
        return self

    def __add__(self, other):
        if not isinstance(other, Jet):
            return self._shifted(other)
        _check_compatible(self, other)
        order = min(self.order, other.order)
        return Jet._make(self.val + other.val,
                         *(a + b for a, b in zip(self.levels()[:order], other.levels()[:order])))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._scaled(other)
        _check_compatible(self, other)
        u, v = self, other
        order = min(u.order, v.order)
        u0, v0 = u.val, v.val
        val = u0 * v0
        d1 = u.d1 * _x(v0, 1) + _x(u0, 1) * v.d1
        if order == 1:
            return Jet._make(val, d1)
        d2 = (u.d2 * _x(v0, 2) + _x(u0, 2) * v.d2
              + _outer(u.d1, v.d1) + _outer(v.d1, u.d1))
        if order == 2:
            return Jet._make(val, d1, d2)
        d3 = (u.d3 * _x(v0, 3) + _x(u0, 3) * v.d3
              + _sym3(u.d2, v.d1) + _sym3(v.d2, u.d1))
        return Jet._make(val, d1, d2, d3)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            if np.any(np.abs(other) < DIVISION_FLOOR):
                raise DomainError("division by a value below 1e-14")
            return self._scaled(1.0 / other)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, h):
        if isinstance(h, Jet):
            raise TypeError("jet exponents are not supported; use exp(h * log(u))")
        return power(self, h)


def _check_compatible(u, v):
    if u.n != v.n:
        raise ValueError(f"jets seeded in different spaces (n={u.n} vs n={v.n})")


def compose(u, f0, f1, f2=None, f3=None):
    """Apply a scalar function elementwise given its derivative values at ``u.val``."""
    d1 = _x(f1, 1) * u.d1
    if u.order == 1:
        return Jet._make(np.asarray(f0, dtype=float), d1)
    d2 = _x(f1, 2) * u.d2 + _x(f2, 2) * _outer(u.d1, u.d1)
    if u.order == 2:
        return Jet._make(np.asarray(f0, dtype=float), d1, d2)
    d3 = _x(f1, 3) * u.d3 + _x(f2, 3) * _sym3(u.d2, u.d1) + _x(f3, 3) * _cube(u.d1)
    return Jet._make(np.asarray(f0, dtype=float), d1, d2, d3)


def _value(u):
    return u.val if isinstance(u, Jet) else np.asarray(u, dtype=float)


def reciprocal(u):
    x = _value(u)
    if np.any(np.abs(x) < DIVISION_FLOOR):
        raise DomainError("division by a value below 1e-14")
    if not isinstance(u, Jet):
        return 1.0 / x
    r = 1.0 / x
    return compose(u, r, -r * r, 2 * r ** 3, -6 * r ** 4)


def sqrt(u):
    x = _value(u)
    if np.any(x < 0):
        raise DomainError(f"sqrt of negative value {np.min(x):.3e}")
    if not isinstance(u, Jet):
        return np.sqrt(x)
    if np.any(x < DIVISION_FLOOR):
        raise DomainError("sqrt derivative at zero")
    s = np.sqrt(x)
    return compose(u, s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x))


def power(u, h):
    """``u ** h`` for a real constant exponent ``h``."""
    x = _value(u)
    integral = float(h) == int(h)
    if not integral and np.any(x < 0):
        raise DomainError("non-integer power of a negative value")
    if not isinstance(u, Jet):
        return x ** h
    if h == 0:
        return Jet._make(np.ones_like(x), *(np.zeros_like(d) for d in u.levels()))
    if h == 1:
        return u
    if not integral and np.any(x < DIVISION_FLOOR):
        raise DomainError("non-integer power derivative at zero")
    if integral and h < 0 and np.any(np.abs(x) < DIVISION_FLOOR):
        raise DomainError("negative power of a value below 1e-14")
    return compose(u, x ** h, h * x ** (h - 1), h * (h - 1) * x ** (h - 2),
                   h * (h - 1) * (h - 2) * x ** (h - 3))


def exp(u):
    if not isinstance(u, Jet):
        return np.exp(u)
    e = np.exp(u.val)
    return compose(u, e, e, e, e)


def log(u):
    x = _value(u)
    if np.any(x <= 0):
        raise DomainError("log of a non-positive value")
    if not isinstance(u, Jet):
        return np.log(x)
    r = 1.0 / x
    return compose(u, np.log(x), r, -r * r, 2 * r ** 3)


def sin(u):
    if not isinstance(u, Jet):
        return np.sin(u)
    s, c = np.sin(u.val), np.cos(u.val)
    return compose(u, s, c, -s, -c)


def cos(u):
    if not isinstance(u, Jet):
        return np.cos(u)
    s, c = np.sin(u.val), np.cos(u.val)
    return compose(u, c, -s, -c, s)


def arctan(u):
    if not isinstance(u, Jet):
        return np.arctan(u)
    x = u.val
    r = 1.0 / (1.0 + x * x)
    return compose(u, np.arctan(x), r, -2 * x * r * r, (6 * x * x - 2) * r ** 3)


def arccos(u):
    x = _value(u)
    if np.any(np.abs(x) > 1):
        raise DomainError("arccos argument outside [-1, 1]")
    if not isinstance(u, Jet):
        return np.arccos(x)
    w = 1.0 - x * x
    if np.any(w < DIVISION_FLOOR):
        raise DomainError("arccos derivative at +-1")
    s = np.sqrt(w)
    return compose(u, np.arccos(x), -1.0 / s, -x / (s * w), -(1 + 2 * x * x) / (s * w * w))


def arctan2(y, x):
    """Elementwise ``atan2(y, x)``; smooth everywhere except the origin."""
    yv, xv = _value(y), _value(x)
    theta0 = np.arctan2(yv, xv)
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return theta0
    r2 = xv * xv + yv * yv
    if np.any(r2 < DIVISION_FLOOR):
        raise DomainError("arctan2 at the origin")
    # rotate the base point onto the positive x axis so that arctan stays regular
    num = y * xv - x * yv
    den = x * xv + y * yv
    rel = arctan(num / den)
    return rel + (theta0 - rel.val)


def lift(v, seed=None, order=1):
    """Coordinate functions ``y^k`` as jets at the point ``v``.

    With ``seed=None`` every coordinate is a seed (``d1`` is the identity).
    With an integer ``seed`` only that coordinate is differentiated (``n = 1``).
    """
    if order not in (1, 2, 3):
        raise ValueError(f"jet order must be 1, 2 or 3, got {order}")
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("lift expects a vector")
    dim = v.shape[0]
    if seed is None:
        d1 = np.eye(dim)
    else:
        if not 0 <= seed < dim:
            raise ValueError(f"seed index {seed} out of range for dimension {dim}")
        d1 = np.zeros((dim, 1))
        d1[seed, 0] = 1.0
    n = d1.shape[1]
    d2 = np.zeros((dim, n, n)) if order >= 2 else None
    d3 = np.zeros((dim, n, n, n)) if order >= 3 else None
    return Jet._make(v.copy(), d1, d2, d3)


def constant(v, n, order=1):
    v = np.asarray(v, dtype=float)
    return Jet._make(v, *(np.zeros(v.shape + (n,) * k) for k in range(1, order + 1)))


def stack(jets, axis=0):
    order = min(j.order for j in jets)
    jets = [j.truncate(order) for j in jets]
    if axis < 0:
        axis += jets[0].ndim + 1
    out = [np.stack([j.val for j in jets], axis=axis)]
    for k in range(order):
        out.append(np.stack([j.levels()[k] for j in jets], axis=axis))
    return Jet._make(*out)


def value(u):
    """Plain value of a jet or array."""
    return _value(u)


def einsum(spec, *operands):
    """``np.einsum`` where at most two operands are jets.

    Subscripts must use lowercase letters; ``U``, ``V``, ``W`` are reserved for
    the seed axes.
    """
    ins, out = spec.replace(" ", "").split("->")
    subs = ins.split(",")
    if len(subs) != len(operands):
        raise ValueError("subscript / operand count mismatch")
    jet_pos = [i for i, op in enumerate(operands) if isinstance(op, Jet)]
    plain = [op.val if isinstance(op, Jet) else op for op in operands]
    val = np.einsum(spec, *plain)
    if not jet_pos:
        return val
    if len(jet_pos) > 2:
        raise ValueError("einsum supports at most two jet operands")

    def term(parts):
        # parts: {operand index: (array, derivative letters)}
        ss, arrs, extra = [], [], ""
        for i, (s, op) in enumerate(zip(subs, plain)):
            if i in parts:
                arr, letters = parts[i]
                ss.append(s + letters)
                arrs.append(arr)
                extra += letters
            else:
                ss.append(s)
                arrs.append(op)
        return np.einsum(",".join(ss) + "->" + out + "".join(sorted(extra)), *arrs)

    if len(jet_pos) == 1:
        (i,) = jet_pos
        j = operands[i]
        levels = [term({i: (d, _DLETTERS[:k])}) for k, d in enumerate(j.levels(), start=1)]
        return Jet._make(val, *levels)

    i, k = jet_pos
    u, v = operands[i], operands[k]
    _check_compatible(u, v)
    order = min(u.order, v.order)
    d1 = term({i: (u.d1, "U")}) + term({k: (v.d1, "U")})
    if order == 1:
        return Jet._make(val, d1)
    cross = term({i: (u.d1, "U"), k: (v.d1, "V")})
    d2 = (term({i: (u.d2, "UV")}) + term({k: (v.d2, "UV")})
          + cross + np.swapaxes(cross, -1, -2))
    if order == 2:
        return Jet._make(val, d1, d2)
    d3 = term({i: (u.d3, "UVW")}) + term({k: (v.d3, "UVW")})
    for a, b in ((u, v), (v, u)):
        ia, ib = (i, k) if a is u else (k, i)
        d3 = d3 + (term({ia: (a.d2, "UV"), ib: (b.d1, "W")})
                   + term({ia: (a.d2, "UW"), ib: (b.d1, "V")})
                   + term({ia: (a.d2, "VW"), ib: (b.d1, "U")}))
    return Jet._make(val, d1, d2, d3)


def solve(T, r):
    """Solve ``T X = r`` where ``T`` (square, leading axes) and/or ``r`` are jets.

    ``r`` may be a vector or a matrix (solution has the same leading shape).
    """
    if not isinstance(T, Jet):
        T = np.asarray(T, dtype=float)
        if not isinstance(r, Jet):
            return np.linalg.solve(T, r)
        m = T.shape[0]
        return Jet._make(*(np.linalg.solve(T, d.reshape(m, -1)).reshape(d.shape)
                           for d in [r.val] + r.levels()))
    T0 = T.val
    m = T0.shape[0]
    rj = r if isinstance(r, Jet) else constant(r, T.n, T.order)
    order = min(T.order, rj.order)
    vec = rj.val.ndim == 1
    n = T.n

    def as_mat(a, k):
        return a.reshape((m, 1) + (n,) * k) if vec else a

    def sol(rhs):
        shp = rhs.shape
        return np.linalg.solve(T0, rhs.reshape(m, -1)).reshape(shp)

    r0 = as_mat(rj.val, 0)
    X0 = sol(r0)
    T1 = T.d1
    r1 = as_mat(rj.d1, 1)
    X1 = sol(r1 - np.einsum("abU,bk->akU", T1, X0))
    out = [X0, X1]
    if order >= 2:
        T2 = T.d2
        r2 = as_mat(rj.d2, 2)
        c = np.einsum("abU,bkV->akUV", T1, X1)
        X2 = sol(r2 - np.einsum("abUV,bk->akUV", T2, X0) - c - np.swapaxes(c, -1, -2))
        out.append(X2)
    if order >= 3:
        T3 = T.d3
        r3 = as_mat(rj.d3, 3)
        rhs = r3 - np.einsum("abUVW,bk->akUVW", T3, X0)
        rhs = rhs - (np.einsum("abUV,bkW->akUVW", T2, X1)
                     + np.einsum("abUW,bkV->akUVW", T2, X1)
                     + np.einsum("abVW,bkU->akUVW", T2, X1))
        rhs = rhs - (np.einsum("abU,bkVW->akUVW", T1, X2)
                     + np.einsum("abV,bkUW->akUVW", T1, X2)
                     + np.einsum("abW,bkUV->akUVW", T1, X2))
        out.append(sol(rhs))
    if vec:
        out = [a.reshape(a.shape[:1] + a.shape[2:]) for a in out]
    return Jet._make(*out)


def inv(T):
    m = value(T).shape[0]
    return solve(T, np.eye(m))
