"""Galerkin assembly on spline spaces.

Matrices are assembled element by element with Gauss-Legendre quadrature:
p+1 points per element make the spline-spline integrands exact, loads and
error functionals use p+3 points.  Elements are the knot spans intersected
with [0, 1] (equivalently, consecutive breakpoints).  Reduced-space
matrices are congruence transforms of the B-spline Gram matrices by the
extraction; the direct quadrature route over the reduced basis exists in
the test suite as an independent oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError
from .spaces import SpaceSpec
from .splines import KnotVector, bspline_eval_batch

MAX_GAUSS = 32


def gauss_legendre(m):
    """Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1]."""
    if not 1 <= m <= MAX_GAUSS:
        raise ConfigError("gauss rule size out of range")
    return np.polynomial.legendre.leggauss(m)


def quadrature_grid(breaks, m):
    """Mapped Gauss points and weights over all elements, concatenated."""
    x, w = gauss_legendre(m)
    a = np.asarray(breaks[:-1], dtype=float)
    b = np.asarray(breaks[1:], dtype=float)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


@dataclass
class SymBandMatrix:
    """Symmetric banded matrix in packed lower form.

    ``band[d, j] == A[j + d, j]`` for 0 <= d <= bandwidth (entries running
    past the matrix edge are zero), the layout accepted by scipy's
    symmetric banded solvers.
    """

    n: int
    bandwidth: int
    band: np.ndarray

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ConfigError("matrix must be square")
        if not np.array_equal(a, a.T):
            raise ConfigError("matrix must be symmetric")
        nz = np.nonzero(a)
        bw = int(np.max(np.abs(nz[0] - nz[1]))) if nz[0].size else 0
        band = np.zeros((bw + 1, n))
        for d in range(bw + 1):
            band[d, :n - d] = np.diagonal(a, -d)
        return cls(n=n, bandwidth=bw, band=band)

    def to_dense(self):
        a = np.zeros((self.n, self.n))
        for d in range(self.bandwidth + 1):
            idx = np.arange(self.n - d)
            a[idx + d, idx] = self.band[d, :self.n - d]
            if d:
                a[idx, idx + d] = self.band[d, :self.n - d]
        return a

    def matvec(self, x):
        return self.to_dense() @ np.asarray(x, dtype=float)


def bspline_gram(knots: KnotVector, breaks, d, rule=None):
    """Gram matrix of the d-th derivatives of all B-splines on the knots.

    Integration runs over [0, 1] only.  The default rule (p+1 points) is
    exact for the piecewise-polynomial integrand.
    """
    p = knots.p
    if not 0 <= d <= p:
        raise ConfigError("derivative order out of range")
    m = p + 1 if rule is None else rule
    nb = knots.num_basis
    g = np.zeros((nb, nb))
    x, w = gauss_legendre(m)
    for a, b in zip(breaks[:-1], breaks[1:]):
        xs = 0.5 * (a + b) + 0.5 * (b - a) * x
        ws = 0.5 * (b - a) * w
        spans, vals = bspline_eval_batch(knots, d, xs)
        lo = int(spans[0])
        v = vals[:, d, :]
        block = np.einsum("qa,qb,q->ab", v, v, ws)
        g[lo:lo + p + 1, lo:lo + p + 1] += block
    return g


def _congruence(spec: SpaceSpec, d):
    g = bspline_gram(spec.knots, spec.breaks, d)
    a = spec.extraction @ g @ spec.extraction.T
    a = 0.5 * (a + a.T)
    return SymBandMatrix.from_dense(a)


def assemble_mass(spec: SpaceSpec) -> SymBandMatrix:
    """L2 Gram matrix of the reduced basis over [0, 1]."""
    return _congruence(spec, 0)


def assemble_stiffness(spec: SpaceSpec) -> SymBandMatrix:
    """H1-seminorm Gram matrix of the reduced basis over [0, 1]."""
    return _congruence(spec, 1)


def assemble_load(spec: SpaceSpec, f) -> np.ndarray:
    """Load vector (f, phi_i) with the p+3-point rule."""
    bb = bspline_load(spec.knots, spec.breaks, f)
    return spec.extraction @ bb


def bspline_load(knots: KnotVector, breaks, f, extra=2):
    """Load vector of f against all B-splines on the knots."""
    p = knots.p
    nb = knots.num_basis
    out = np.zeros(nb)
    xs, ws = quadrature_grid(breaks, p + 1 + extra)
    spans, vals = bspline_eval_batch(knots, 0, xs)
    fv = np.asarray(f(xs), dtype=float) * ws
    contrib = vals[:, 0, :] * fv[:, None]
    for a in range(p + 1):
        np.add.at(out, spans + a, contrib[:, a])
    return out


def error_b_coefficients(knots: KnotVector, breaks, bcoeffs, exact,
                         exact_d1=None, extra=2):
    """L2 and H1-seminorm errors of a spline given by B-spline coefficients.

    Returns (err_l2, err_h1); err_h1 is None when no derivative of the
    target is supplied.
    """
    p = knots.p
    bcoeffs = np.asarray(bcoeffs, dtype=float)
    r = 1 if exact_d1 is not None else 0
    xs, ws = quadrature_grid(breaks, p + 1 + extra)
    spans, vals = bspline_eval_batch(knots, r, xs)
    cols = spans[:, None] + np.arange(p + 1)[None, :]
    local = bcoeffs[cols]
    uh = np.sum(vals[:, 0, :] * local, axis=1)
    acc0 = float(np.sum(ws * (np.asarray(exact(xs), dtype=float) - uh) ** 2))
    if exact_d1 is None:
        return np.sqrt(acc0), None
    uh1 = np.sum(vals[:, 1, :] * local, axis=1)
    d1 = np.asarray(exact_d1(xs), dtype=float) - uh1
    return np.sqrt(acc0), np.sqrt(float(np.sum(ws * d1 ** 2)))


def function_error(spec: SpaceSpec, coeffs, exact, exact_d1=None):
    """Errors of a reduced-space function against a target on [0, 1]."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (spec.n,):
        raise ConfigError("coefficient vector has wrong length")
    bcoeffs = spec.extraction.T @ coeffs
    return error_b_coefficients(spec.knots, spec.breaks, bcoeffs, exact,
                                exact_d1)
