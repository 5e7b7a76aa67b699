"""B-spline primitives on uniformly structured knot sequences.

Two evaluation routes are provided.  ``cardinal_bspline`` evaluates the
degree-p cardinal B-spline (supported on [0, p+1], unit integral) through
the two-term degree-raising recurrence.  ``bspline_eval_all`` evaluates,
at a point of [0, 1], the p+1 B-splines of a knot sequence that are active
there, together with derivatives up to a requested order, via the
Cox-de Boor triangle.  Point evaluation is right-continuous at knots; x = 1
takes left limits so the last element is closed.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .exceptions import ConfigError


def cardinal_bspline(p, t):
    """Value of the degree-p cardinal B-spline at t (scalar or array).

    The degree-0 spline is the indicator of [0, 1), which fixes the
    right-continuous convention for every degree; the support is exactly
    [0, p+1].
    """
    if p < 0:
        raise ConfigError("degree must be >= 0")
    t = np.asarray(t, dtype=float)
    vals = [np.where((t - j >= 0.0) & (t - j < 1.0), 1.0, 0.0)
            for j in range(p + 1)]
    for k in range(1, p + 1):
        for j in range(p - k + 1):
            s = t - j
            vals[j] = (s / k) * vals[j] + ((k + 1 - s) / k) * vals[j + 1]
    out = vals[0]
    return float(out) if out.ndim == 0 else out


def cardinal_bspline_derivative(p, r, t):
    """r-th derivative of the degree-p cardinal B-spline at t.

    Uses the difference identity relating the derivative to two shifted
    splines of degree p-1, applied r times.  Right-continuous at knots;
    r = p (piecewise constant result) is allowed, r > p is rejected.
    """
    if p < 0:
        raise ConfigError("degree must be >= 0")
    if not 0 <= r <= p:
        raise ConfigError("derivative order must satisfy 0 <= r <= p")
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for k in range(r + 1):
        out = out + ((-1) ** k * comb(r, k)) * cardinal_bspline(p - r, t - k)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class KnotVector:
    """Knot sequence xi_{-p}, ..., xi_{n_el+p} for splines on [0, 1].

    ``values[i + p]`` holds xi_i.  The sequence is nondecreasing, strictly
    increasing across xi_1, ..., xi_{n_el-1}, and positioned so that
    xi_0 <= 0 < xi_1 and xi_{n_el-1} < 1 <= xi_{n_el}; knots outside [0, 1]
    carry no quadrature elements but shape the boundary B-splines.
    """

    p: int
    n_el: int
    values: np.ndarray

    def __post_init__(self):
        if self.p < 0:
            raise ConfigError("degree must be >= 0")
        if self.n_el < 1:
            raise ConfigError("need at least one element")
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.shape != (self.n_el + 2 * self.p + 1,):
            raise ConfigError("knot sequence has wrong length")
        if np.any(np.diff(vals) < 0):
            raise ConfigError("knots must be nondecreasing")
        interior = vals[self.p + 1:self.p + self.n_el]
        if interior.size and np.any(np.diff(interior) <= 0):
            raise ConfigError("interior knots must be strictly increasing")
        if not (self.knot(0) <= 0.0 < self.knot(1)):
            raise ConfigError("knots misplaced at the left end")
        if not (self.knot(self.n_el - 1) < 1.0 <= self.knot(self.n_el)):
            raise ConfigError("knots misplaced at the right end")

    def knot(self, i):
        """xi_i for -p <= i <= n_el + p."""
        return float(self.values[i + self.p])

    @property
    def num_basis(self):
        """Number of B-splines N_{-p}, ..., N_{n_el-1} on the sequence."""
        return self.n_el + self.p


@dataclass(frozen=True)
class BasisEval:
    """Active-window evaluation result.

    ``values[d, a]`` is the d-th derivative of B-spline number
    ``first_active + a`` (indices counted from -p).  Row 0 sums to one on
    [0, 1), higher rows sum to zero.
    """

    first_active: int
    values: np.ndarray


def find_spans(kv: KnotVector, xs):
    """Element index mu with xi_mu <= x < xi_{mu+1} for each x in [0, 1].

    x values equal to xi_{n_el} (when that knot is 1) are assigned to the
    last element, which realizes the left-limit convention at x = 1.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
        raise ConfigError("evaluation points must lie in [0, 1]")
    interior = kv.values[kv.p:kv.p + kv.n_el + 1]
    mu = np.searchsorted(interior, xs, side="right") - 1
    return np.clip(mu, 0, kv.n_el - 1).astype(np.intp)


def bspline_eval_batch(kv: KnotVector, r, xs):
    """Evaluate active B-splines and derivatives at many points.

    Returns (spans, values) with values of shape (len(xs), r+1, p+1); the
    B-splines active at xs[q] are numbers spans[q]-p, ..., spans[q].
    """
    if not 0 <= r <= kv.p:
        raise ConfigError("derivative order must satisfy 0 <= r <= p")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    spans = find_spans(kv, xs)
    return spans, _ders_basis(kv, spans, xs, r)


def bspline_eval_all(kv: KnotVector, r, x) -> BasisEval:
    """Evaluate the p+1 B-splines active at a single point x of [0, 1]."""
    spans, vals = bspline_eval_batch(kv, r, [x])
    return BasisEval(first_active=int(spans[0]) - kv.p, values=vals[0])


def _ders_basis(kv, spans, xs, r):
    # Cox-de Boor triangle with the derivative pass of the classical
    # ders-basis-funs algorithm, vectorized over the trailing point axis.
    p = kv.p
    t = kv.values
    nq = xs.shape[0]
    off = spans + p
    ndu = np.zeros((p + 1, p + 1, nq))
    ndu[0, 0] = 1.0
    left = np.zeros((p + 1, nq))
    right = np.zeros((p + 1, nq))
    for j in range(1, p + 1):
        left[j] = xs - t[off + 1 - j]
        right[j] = t[off + j] - xs
        saved = np.zeros(nq)
        for k in range(j):
            ndu[j, k] = right[k + 1] + left[j - k]
            temp = ndu[k, j - 1] / ndu[j, k]
            ndu[k, j] = saved + right[k + 1] * temp
            saved = left[j - k] * temp
        ndu[j, j] = saved

    ders = np.zeros((r + 1, p + 1, nq))
    ders[0] = ndu[:, p]
    for i in range(p + 1):
        a = np.zeros((2, p + 1, nq))
        a[0, 0] = 1.0
        s1, s2 = 0, 1
        for k in range(1, r + 1):
            d = np.zeros(nq)
            rk = i - k
            pk = p - k
            if i >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if i - 1 <= pk else p - i
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d = d + a[s2, j] * ndu[rk + j, pk]
            if i <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, i]
                d = d + a[s2, k] * ndu[i, pk]
            ders[k, i] = d
            s1, s2 = s2, s1

    fac = float(p)
    for k in range(1, r + 1):
        ders[k] *= fac
        fac *= p - k
    return np.moveaxis(ders, -1, 0)
