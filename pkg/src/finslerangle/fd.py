"""Finite differences in x, shared by every consumer that differentiates a field."""

from __future__ import annotations

import numpy as np

FD_STEP = 1e-5


def step_for(x, i, rel=FD_STEP):
    return rel * max(1.0, abs(float(x[i])))


def xderiv(fn, x, rel=FD_STEP, richardson=True):
    """Partials of ``fn`` at ``x`` with respect to every coordinate.

    Central differences with one Richardson level, (4 D(h/2) - D(h)) / 3.
    The derivative index is appended last.  ``fn`` may return arrays or jets.
    """
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.shape[0]):
        cols.append(partial(fn, x, i, rel=rel, richardson=richardson))
    return _stack_last(cols)


def partial(fn, x, i, rel=FD_STEP, richardson=True):
    x = np.asarray(x, dtype=float)
    step = step_for(x, i, rel)

    def central(s):
        e = np.zeros_like(x)
        e[i] = s
        return (fn(x + e) - fn(x - e)) * (1.0 / (2.0 * s))

    d_full = central(step)
    if not richardson:
        return d_full
    d_half = central(step / 2.0)
    return (d_half * 4.0 - d_full) * (1.0 / 3.0)


def _stack_last(cols):
    from . import jets as J

    if isinstance(cols[0], J.Jet):
        return J.stack(cols, axis=cols[0].ndim)
    return np.stack([np.asarray(c, dtype=float) for c in cols], axis=-1)
