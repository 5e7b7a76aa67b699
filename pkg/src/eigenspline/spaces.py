"""Spline space constructions: full spaces and outlier-free subspaces.

A space is described by a :class:`SpaceSpec`: degree p, dimension n,
boundary type, and one of three kinds.

* ``FULL`` - the complete spline space on open uniform knots, with the
  boundary B-splines dropped as the boundary type requires.
* ``OPTIMAL`` - the dimension-n subspace on the shifted uniform grids whose
  basis functions satisfy extra even/odd derivative constraints at the
  endpoints; these match the spectral n-width bounds and carry no spurious
  high-frequency modes.
* ``REDUCED_UNIFORM`` - the even-degree variant on the plain uniform grid
  (Dirichlet only, constraints up to order p-1); for odd degree it
  coincides with ``OPTIMAL`` and is rejected.

Each reduced basis function is stored as one row of an extraction matrix
over the n_el + p B-splines of the knot sequence.  For Dirichlet-type
constraints the extraction is assembled from the closed-form two-block
reflection tiling; for the Neumann and mixed types it is the orthonormal
null space of the endpoint constraint functionals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np
from scipy.linalg import null_space

from .exceptions import ConfigError
from .splines import KnotVector, bspline_eval_all, bspline_eval_batch

MIN_ELEMENTS = 3


class BoundaryType(IntEnum):
    DIRICHLET = 0
    NEUMANN = 1
    MIXED = 2


class SpaceKind(str, Enum):
    FULL = "full"
    OPTIMAL = "optimal"
    REDUCED_UNIFORM = "reduced"


def optimal_breaks(p, n, bc) -> np.ndarray:
    """Break sequence of the dimension-n optimal subspace.

    The interior breakpoints sit on a uniform grid whose spacing and
    half-step shift depend on the boundary type and the parity of p:

    =========  ==========  =======================================
    boundary   spacing h   interior breaks
    =========  ==========  =======================================
    Dirichlet  1/(n+1)     k*h (p odd) or (k - 1/2)*h (p even)
    Neumann    1/n         (k - 1/2)*h (p odd) or k*h (p even)
    mixed      2/(2n+1)    k*h (p odd) or (k - 1/2)*h (p even)
    =========  ==========  =======================================
    """
    _, _, breaks = _uniform_layout(p, n, bc)
    return breaks


def _layout_params(p, n, bc):
    # Interior breakpoints are (2k - sigma)/den; element width 2/den.
    bc = BoundaryType(bc)
    if bc == BoundaryType.DIRICHLET:
        den, sigma, n_el = 2 * (n + 1), p % 2 == 0, n + 1 + (p % 2 == 0)
    elif bc == BoundaryType.NEUMANN:
        den, sigma, n_el = 2 * n, p % 2 == 1, n + (p % 2 == 1)
    else:
        den, sigma, n_el = 2 * n + 1, p % 2 == 0, n + 1
    return den, int(sigma), n_el


def _uniform_layout(p, n, bc):
    """Knot vector, element count and breaks of the optimal layout."""
    if n < 1:
        raise ConfigError("dimension must be >= 1")
    den, sigma, n_el = _layout_params(p, n, bc)
    idx = np.arange(-p, n_el + p + 1)
    knots = (2 * idx - sigma) / den
    kv = KnotVector(p=p, n_el=n_el, values=knots)
    interior = knots[p + 1:p + n_el]
    breaks = np.concatenate(([0.0], interior, [1.0]))
    return kv, n_el, breaks


def _open_uniform_layout(p, n_el):
    idx = np.clip(np.arange(-p, n_el + p + 1), 0, n_el)
    kv = KnotVector(p=p, n_el=n_el, values=idx / n_el)
    breaks = np.arange(n_el + 1) / n_el
    return kv, breaks


@dataclass(frozen=True)
class SpaceSpec:
    """Fully constructed spline space (build with :func:`make_space`)."""

    kind: SpaceKind
    p: int
    n: int
    bc: BoundaryType
    n_el: int
    h: float
    breaks: np.ndarray = field(repr=False)
    knots: KnotVector = field(repr=False)
    extraction: np.ndarray = field(repr=False)


def make_space(kind, p, n, bc) -> SpaceSpec:
    """Construct a space of the given kind, degree, dimension and boundary.

    Rejects inconsistent combinations (odd-degree or non-Dirichlet
    ReducedUniform, dimensions that leave fewer than three elements).
    """
    kind = SpaceKind(kind)
    bc = BoundaryType(bc)
    if p < 1:
        raise ConfigError("degree must be >= 1")
    if n < 1:
        raise ConfigError("dimension must be >= 1")

    if kind == SpaceKind.FULL:
        drop = {BoundaryType.DIRICHLET: 2, BoundaryType.NEUMANN: 0,
                BoundaryType.MIXED: 1}[bc]
        n_el = n - p + drop
        if n_el < MIN_ELEMENTS:
            raise ConfigError("dimension too small for this degree")
        kv, breaks = _open_uniform_layout(p, n_el)
        h = 1.0 / n_el
        extraction = _selection_extraction(n_el, p, bc)
    elif kind == SpaceKind.REDUCED_UNIFORM:
        if p % 2 == 1:
            raise ConfigError(
                "odd-degree reduced-uniform space coincides with the "
                "optimal one; build that instead")
        if bc != BoundaryType.DIRICHLET:
            raise ConfigError("reduced-uniform spaces are Dirichlet only")
        n_el = n
        # The periodic tiling stays well formed down to two elements, and
        # the two-element space is a meaningful smallest instance, so the
        # usual three-element floor is relaxed here.
        if n_el < 2:
            raise ConfigError("dimension too small")
        kv, breaks = _uniform_layout_reduced(p, n_el)
        h = 1.0 / n_el
        extraction = _tiled_extraction(n, p // 2, reduced=True)
    else:
        kv, n_el, breaks = _uniform_layout(p, n, bc)
        if n_el < MIN_ELEMENTS:
            raise ConfigError("dimension too small for this degree")
        h = 2.0 / _layout_params(p, n, bc)[0]
        if bc == BoundaryType.DIRICHLET:
            keep = (p + 1) // 2 if p % 2 == 1 else p // 2 + 1
            extraction = _tiled_extraction(n, keep, reduced=False)
        else:
            extraction = _nullspace_extraction(kv, *constrained_orders(
                SpaceKind.OPTIMAL, p, bc))

    if extraction.shape != (n, kv.num_basis):
        raise ConfigError("extraction construction lost rank")
    return SpaceSpec(kind=kind, p=p, n=n, bc=bc, n_el=n_el, h=h,
                     breaks=breaks, knots=kv, extraction=extraction)


def _uniform_layout_reduced(p, n_el):
    idx = np.arange(-p, n_el + p + 1)
    kv = KnotVector(p=p, n_el=n_el, values=idx / n_el)
    breaks = np.arange(n_el + 1) / n_el
    return kv, breaks


def constrained_orders(kind, p, bc):
    """Derivative orders forced to vanish at each endpoint (left, right).

    Dirichlet constrains the even orders, Neumann the odd ones, mixed is
    Dirichlet-like at 0 and Neumann-like at 1.  Full spaces constrain only
    what their dropped boundary functions encode and are not handled here.
    """
    kind = SpaceKind(kind)
    bc = BoundaryType(bc)
    top = p - 1 if kind == SpaceKind.REDUCED_UNIFORM else p
    even = tuple(range(0, top + 1, 2))
    odd = tuple(range(1, top + 1, 2))
    if bc == BoundaryType.DIRICHLET:
        return even, even
    if bc == BoundaryType.NEUMANN:
        return odd, odd
    return even, odd


def _tiled_extraction(m, keep, reduced):
    """Extraction from the periodic two-block reflection pattern.

    The m-row pattern repeats with period 2m (reduced) or 2m + 2, built
    from an identity block and a negated exchange block (with separating
    zero columns in the non-reduced case).  ``keep`` columns are taken on
    each side of a central identity, counting outward: left neighbours read
    the left block from its right edge, right neighbours read the right
    block from its left edge.
    """
    eye = np.eye(m)
    mir = -np.fliplr(eye)
    if reduced:
        bl = np.hstack([eye, mir])
        br = np.hstack([mir, eye])
    else:
        z = np.zeros((m, 1))
        bl = np.hstack([eye, z, mir, z])
        br = np.hstack([z, mir, z, eye])
    period = bl.shape[1]
    cols = []
    for j in range(keep, 0, -1):
        cols.append(bl[:, period - 1 - ((j - 1) % period)])
    cols.extend(eye.T)
    for j in range(1, keep + 1):
        cols.append(br[:, (j - 1) % period])
    return np.column_stack(cols) + 0.0


def _selection_extraction(n_el, p, bc):
    nb = n_el + p
    if bc == BoundaryType.DIRICHLET:
        keep = np.arange(1, nb - 1)
    elif bc == BoundaryType.NEUMANN:
        keep = np.arange(nb)
    else:
        keep = np.arange(1, nb)
    e = np.zeros((keep.size, nb))
    e[np.arange(keep.size), keep] = 1.0
    return e


def _endpoint_constraints(kv, orders, x):
    ev = bspline_eval_all(kv, kv.p, x)
    return ev.values[list(orders), :]


def _equilibrate(rows):
    # Unit row norms keep the SVD from trading accuracy in the small-scale
    # constraints (order 0) against the huge high-order derivative rows.
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def _nullspace_extraction(kv, left_orders, right_orders):
    """Orthonormal basis of the constrained subspace, one row per function.

    When the endpoint windows are disjoint the two (p+1)-column systems are
    solved separately and the untouched interior B-splines pass through as
    identity rows; otherwise one global null space is taken.
    """
    p, n_el, nb = kv.p, kv.n_el, kv.num_basis
    cl = _equilibrate(_endpoint_constraints(kv, left_orders, 0.0))
    cr = _equilibrate(_endpoint_constraints(kv, right_orders, 1.0))
    if n_el > p + 1:
        kl = null_space(cl).T
        kr = null_space(cr).T
        if kl.shape[0] != p + 1 - len(left_orders) \
                or kr.shape[0] != p + 1 - len(right_orders):
            raise ConfigError("endpoint constraints are rank deficient")
        rows = np.zeros((nb - len(left_orders) - len(right_orders), nb))
        rows[:kl.shape[0], :p + 1] = kl
        ni = n_el - p - 2
        rows[kl.shape[0]:kl.shape[0] + ni,
             p + 1:n_el - 1] = np.eye(ni)
        rows[kl.shape[0] + ni:, nb - p - 1:] = kr
        return rows
    cglob = np.zeros((len(left_orders) + len(right_orders), nb))
    cglob[:len(left_orders), :p + 1] = cl
    cglob[len(left_orders):, nb - p - 1:] = cr
    rows = null_space(cglob).T
    if rows.shape[0] != nb - cglob.shape[0]:
        raise ConfigError("endpoint constraints are rank deficient")
    return rows


def extraction_matrix(spec: SpaceSpec) -> np.ndarray:
    """Extraction matrix of the space: rows are reduced basis functions,
    columns the B-splines of ``spec.knots``."""
    return spec.extraction.copy()


def eval_reduced_basis(spec: SpaceSpec, x, r=0) -> np.ndarray:
    """Derivatives 0..r of all n reduced basis functions at one point.

    Returns an array of shape (r+1, n).
    """
    ev = bspline_eval_all(spec.knots, r, x)
    lo = ev.first_active + spec.p
    return ev.values @ spec.extraction[:, lo:lo + spec.p + 1].T


def reduced_basis_matrix(spec: SpaceSpec, xs, r=0) -> np.ndarray:
    """Derivatives 0..r of the reduced basis at many points: (r+1, nq, n)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    spans, vals = bspline_eval_batch(spec.knots, r, xs)
    nb = spec.knots.num_basis
    out = np.zeros((r + 1, xs.size, nb))
    cols = spans[:, None] + np.arange(spec.p + 1)[None, :]
    rows = np.arange(xs.size)[:, None]
    for d in range(r + 1):
        out[d][rows, cols] = vals[:, d, :]
    return out @ spec.extraction.T


def boundary_residuals(spec: SpaceSpec) -> float:
    """Worst normalized violation of the space's endpoint constraints.

    For every constrained derivative order the largest magnitude over the
    basis at the endpoint is divided by the largest magnitude of that
    derivative order over the element midpoints; the maximum ratio over
    all constrained (endpoint, order) pairs is returned.  Full spaces have
    no constraint set in this sense and are rejected.
    """
    if spec.kind == SpaceKind.FULL:
        raise ConfigError("full spaces carry no endpoint constraint set")
    left_orders, right_orders = constrained_orders(spec.kind, spec.p, spec.bc)
    mids = 0.5 * (spec.breaks[:-1] + spec.breaks[1:])
    interior = reduced_basis_matrix(spec, mids, r=spec.p)
    scale = np.max(np.abs(interior), axis=(1, 2))
    at0 = np.abs(eval_reduced_basis(spec, 0.0, r=spec.p)).max(axis=1)
    at1 = np.abs(eval_reduced_basis(spec, 1.0, r=spec.p)).max(axis=1)
    worst = 0.0
    for a in left_orders:
        worst = max(worst, at0[a] / scale[a])
    for a in right_orders:
        worst = max(worst, at1[a] / scale[a])
    return worst
