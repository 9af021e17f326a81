"""Flat (n-1)-discs, curve-disc intersection parity, and the window predicate.

A disc is the triple (center p, unit normal u, radius r): the set of points
``p + xi*v`` with ``v`` a unit vector orthogonal to ``u`` and ``0 <= xi < r``.
Classification counts transversal crossings of the curve through the disc's
hyperplane, splits them into interior / boundary / tangential by distance to
the center, and labels the disc by interior-hit parity.  Boundary and
tangential configurations carry zero measure; estimators reject and resample
them instead of guessing.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import get_backend
from ._kernels_numpy import (
    LABEL_BOUNDARY,
    LABEL_DEGENERATE,
    LABEL_EVEN,
    LABEL_ODD,
    LABEL_TANGENTIAL,
)
from .errors import PreconditionError
from .geometry import perp_decompose, unit

DEFAULT_GRID = 2048
# Relative to curve scale (plane / radius) or dimensionless (tangent).
DEFAULT_TOL_PLANE = 1e-12
DEFAULT_TOL_RADIUS = 1e-9
DEFAULT_TOL_TANGENT = 1e-9

LABEL_NAMES = {
    LABEL_EVEN: "even",
    LABEL_ODD: "odd",
    LABEL_BOUNDARY: "boundary",
    LABEL_TANGENTIAL: "tangential",
    LABEL_DEGENERATE: "degenerate",
}


@dataclass(frozen=True)
class Disc:
    """Disc (center, unit normal, radius); the normal is renormalized."""

    center: np.ndarray
    normal: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "normal", unit(self.normal))
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")


@dataclass(frozen=True)
class Window:
    """Ball window: the open ball of given center and radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if not self.radius > 0:
            raise ValueError("window radius must be positive")

    def diameter(self):
        return 2.0 * self.radius


@dataclass(frozen=True)
class Hit:
    """One curve-hyperplane crossing: parameter, point, distance to center."""

    s: float
    point: np.ndarray
    distance: float


@dataclass(frozen=True)
class DiscClass:
    """Classification of one disc against one curve."""

    interior_hits: tuple
    label: str
    count: int


def _wrapped_dist(s, at, span, closed):
    d = np.abs(s - at)
    return np.minimum(d, span - d) if closed else d


def build_partition(curve, grid=DEFAULT_GRID, refine_at=None, refine_factor=128):
    """Parameter partition plus curve-point table for the batch classifier.

    With ``refine_at`` set (the curvature estimator's known boundary-contact
    parameter), the cells near that parameter are subdivided ``refine_factor``
    times so that crossings close to the contact are still resolved, while a
    narrow band around the contact itself is deactivated: the contact is a
    constructed boundary point, not a crossing to count.

    Returns ``(snodes, Xnodes, node_check, itv_active)``; results are cached
    on the curve.
    """
    if grid < 64:
        raise ValueError("grid must be at least 64 intervals")
    cache = getattr(curve, "_partition_cache", None)
    if cache is None:
        cache = {}
        curve._partition_cache = cache
    key = (int(grid), refine_at, int(refine_factor))
    if key in cache:
        return cache[key]

    s0, s1 = curve.s0, curve.s1
    span = s1 - s0
    base = np.linspace(s0, s1, grid + 1)
    if refine_at is None:
        snodes = base
        node_check = np.ones(snodes.size, dtype=bool)
        itv_active = np.ones(snodes.size - 1, dtype=bool)
    else:
        ds = span / grid
        mids = 0.5 * (base[:-1] + base[1:])
        refine = _wrapped_dist(mids, refine_at, span, curve.closed) <= 2.0 * ds
        parts = []
        for i in range(grid):
            if refine[i]:
                parts.append(np.linspace(base[i], base[i + 1], refine_factor + 1)[:-1])
            else:
                parts.append(base[i : i + 1])
        parts.append(base[-1:])
        snodes = np.concatenate(parts)
        sub_ds = ds / refine_factor
        node_check = _wrapped_dist(snodes, refine_at, span, curve.closed) > 1.5 * sub_ds
        itv_mids = 0.5 * (snodes[:-1] + snodes[1:])
        itv_active = _wrapped_dist(itv_mids, refine_at, span, curve.closed) > 2.0 * sub_ds

    Xnodes = np.ascontiguousarray(curve.point(snodes))
    out = (snodes, Xnodes, node_check, itv_active)
    cache[key] = out
    return out


def classify_batch(
    curve,
    P,
    U,
    R,
    grid=DEFAULT_GRID,
    tol_plane=DEFAULT_TOL_PLANE,
    tol_radius=DEFAULT_TOL_RADIUS,
    tol_tangent=DEFAULT_TOL_TANGENT,
    refine_at=None,
    xi_max=np.inf,
    d_omega=np.inf,
):
    """Classify many discs at once; the hot path of every estimator.

    Parameters ``P`` (k, n), ``U`` (k, n, unit), ``R`` (k,).  ``tol_plane``
    and ``tol_radius`` are relative to the curve scale.  Returns arrays
    ``(labels, n_interior, s_star, xi_star, n_support)`` as documented on the
    backend's ``classify_discs``.
    """
    snodes, Xnodes, node_check, itv_active = build_partition(curve, grid, refine_at)
    scale = curve.scale()
    return get_backend().classify_discs(
        curve,
        snodes,
        Xnodes,
        node_check,
        itv_active,
        np.asarray(P, dtype=float),
        np.asarray(U, dtype=float),
        np.asarray(R, dtype=float),
        tol_plane * scale,
        tol_radius * scale,
        tol_tangent,
        float(xi_max),
        float(d_omega),
    )


def hyperplane_crossings(curve, p, u, grid=DEFAULT_GRID, tol=None):
    """Isolated roots of ``g(s) = (curve(s) - p) . u`` on the parameter range.

    Sign changes on a uniform grid of ``grid`` intervals are refined by
    bisection until ``|g| <= tol``.  Returns ``(roots, suspect)`` where
    ``suspect`` is True when ``|g|`` stays below ``tol`` across an entire grid
    interval (the curve hugs the hyperplane; root isolation is unreliable
    there).  Missed roots between grid nodes are a documented resolution
    limit; raise ``grid`` for adversarial curves.
    """
    if grid < 64:
        raise ValueError("grid must be at least 64 intervals")
    p = np.asarray(p, dtype=float)
    u = unit(u)
    if tol is None:
        tol = DEFAULT_TOL_PLANE * curve.scale()
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = np.linspace(curve.s0, curve.s1, grid + 1)
    g = (curve.point(s) - p) @ u
    small = np.abs(g) <= tol
    suspect = bool(np.any(small[:-1] & small[1:]))

    roots = []
    for j in np.nonzero(g[:-1] * g[1:] < 0.0)[0]:
        lo, hi = s[j], s[j + 1]
        glo = g[j]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            gm = float((curve.point(np.asarray(mid)) - p) @ u)
            if abs(gm) <= tol:
                lo = hi = mid
                break
            if gm * glo > 0.0:
                lo, glo = mid, gm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return np.array(roots), suspect


def classify_disc(
    curve,
    disc,
    tol_plane=DEFAULT_TOL_PLANE,
    tol_radius=DEFAULT_TOL_RADIUS,
    tol_tangent=DEFAULT_TOL_TANGENT,
    grid=DEFAULT_GRID,
):
    """Classify a single disc, returning the full interior-hit list.

    Exactly one label is assigned (the disc sets partition the disc space):
    ``degenerate`` when root isolation was ambiguous, else ``tangential`` /
    ``boundary`` when any crossing lies in those tolerance bands, else
    ``odd`` / ``even`` by interior-hit parity.
    """
    for t in (tol_plane, tol_radius, tol_tangent):
        if t <= 0:
            raise ValueError("tolerances must be positive")
    scale = curve.scale()
    roots, suspect = hyperplane_crossings(
        curve, disc.center, disc.normal, grid=grid, tol=tol_plane * scale
    )
    if suspect:
        return DiscClass((), "degenerate", 0)

    tol_r = tol_radius * scale
    hits = []
    any_tangential = False
    any_boundary = False
    for s in roots:
        z = curve.point(np.asarray(s))
        xi = float(np.linalg.norm(z - disc.center))
        if abs(float(curve.tangent(np.asarray(s)) @ disc.normal)) < tol_tangent:
            any_tangential = True
        elif abs(xi - disc.radius) <= tol_r:
            any_boundary = True
        elif xi < disc.radius - tol_r:
            hits.append(Hit(float(s), z, xi))
    if any_tangential:
        return DiscClass((), "tangential", 0)
    if any_boundary:
        return DiscClass((), "boundary", 0)
    hits.sort(key=lambda h: (h.distance, h.s))
    label = "odd" if len(hits) % 2 == 1 else "even"
    return DiscClass(tuple(hits), label, len(hits))


def canonical_hit(curve, disc, disc_class):
    """The selected curve point for a counted disc: the interior hit with
    minimal distance to the disc center, ties broken by smaller parameter.

    Returns None when the disc has no interior hit.  This selection makes the
    curve-to-disc parametrization injective on retained samples.
    """
    if disc_class.count == 0:
        return None
    return disc_class.interior_hits[0]


def boundary_meets_window(disc, window):
    """True when the disc's boundary sphere intersects the open ball window.

    Closed form: decompose q = center_disc - center_window against the disc
    normal; the minimum distance from the boundary (n-2)-sphere to the window
    center is ``sqrt(|q_par|^2 + (|q_perp| - r)^2)``, degenerating to
    ``sqrt(|q_par|^2 + r^2)`` when q is parallel to the normal.
    """
    return bool(
        _boundary_window_dist(
            disc.center[None, :],
            disc.normal[None, :],
            np.array([disc.radius]),
            window.center,
        )[0]
        < window.radius
    )


def _boundary_window_dist(P, U, R, center):
    q = P - center[None, :]
    q_dot_u = np.einsum("ij,ij->i", q, U)
    q_perp = q - q_dot_u[:, None] * U
    q_perp_norm = np.linalg.norm(q_perp, axis=1)
    return np.sqrt(q_dot_u**2 + (q_perp_norm - R) ** 2)


def boundary_meets_window_batch(P, U, R, window):
    """Vectorized window predicate for (k, n) disc batches."""
    return _boundary_window_dist(P, U, np.asarray(R, dtype=float), window.center) < window.radius


def check_curve_in_window(curve, window):
    """Raise unless the curve is contained in the window ball."""
    if curve.bounding_radius(center=window.center) >= window.radius:
        raise PreconditionError("curve is not contained in the window ball")
