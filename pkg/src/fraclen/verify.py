"""Independent numerical checks of the closed-form geometric factors.

Three parametrizations of disc space are exercised:

``frame``          (s, a, b, xi)    -> (center, normal)          in R^(2n)
``frame-radius``   (s, a, b, xi, r) -> (center, normal, radius)  in R^(2n+1)
``contact``        (s, a, b, r)     -> (center, normal, radius)  in R^(2n+1)

with center ``z + xi*a`` (or ``z + r*a`` for the contact map) and normal
``b``.  For each, the closed-form area-formula factor is compared against a
finite-difference Gram determinant built from central differences along a
basis of the domain tangent space that is orthonormal for the product-chart
metric (geodesic steps on the sphere factors, with the pair rotation counted
at unit chart speed).

The module also exposes the closed-form unit normal of the contact image and
its tangent directions, and a Monte-Carlo check of the direction-pair mass
identity used by the limit constant.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, PreconditionError
from .geometry import (
    ball_volume,
    check_ambient_dim,
    measure_uperp2,
    sample_perp_pair,
    stream_rng,
    unit,
)
from .length import EstimatorResult

MAP_IDS = ("frame", "frame-radius", "contact")
H_MIN = 1e-7
H_MAX = 1e-3


@dataclass(frozen=True)
class ManifoldPoint:
    """A domain point shared by the three maps; ``xi`` is ignored by the
    contact map and ``r`` by the frame map."""

    s: float
    a: np.ndarray
    b: np.ndarray
    xi: float
    r: float


@dataclass(frozen=True)
class JacobianReport:
    map_id: str
    point: ManifoldPoint
    fd_value: float
    closed_value: float
    rel_error: float
    h: float


def _perp_basis(a, b):
    """Orthonormal basis of the complement of span{a, b}."""
    n = a.size
    M = np.column_stack([a, b, np.eye(n)])
    q, _ = np.linalg.qr(M)
    return [q[:, j] for j in range(2, n)]


def closed_form_jacobian(map_id, curve, point):
    """Area-formula factor of the given map at ``point``.

    ``frame`` and ``frame-radius``: ``xi^(n-2) * |b . t(z)|``.
    ``contact``: ``r^(n-2) * sqrt((r^2 + 1)(a . t)^2 + 2 (b . t)^2)``.

    Both follow from the Gram determinant in the product-chart basis.  The
    image columns are ``(t,0,0)`` for curve motion, ``(xi e,0,0)`` /
    ``(0,e,0)`` for the sphere directions orthogonal to span{a, b}, and the
    pair rotation ``(xi b, -a, 0)``; the Gram couples only through the curve
    row, and the determinant collapses to ``xi^(2n-4) (b.t)^2`` for the frame
    maps.  The contact map replaces the offset column ``(a,0,0)`` by the
    radial-growth column ``(a,0,1)`` of squared norm 2, and the surviving
    couplings give ``r^(2n-4) ((r^2+1)(a.t)^2 + 2(b.t)^2)``.
    """
    n = curve.dim
    t = curve.tangent(np.asarray(point.s))
    if map_id in ("frame", "frame-radius"):
        return point.xi ** (n - 2) * abs(float(point.b @ t))
    if map_id == "contact":
        at = float(point.a @ t)
        bt = float(point.b @ t)
        r = point.r
        return r ** (n - 2) * math.sqrt((r * r + 1.0) * at * at + 2.0 * bt * bt)
    raise ConfigError(f"unknown map '{map_id}'")


def _map_image(map_id, curve, s, a, b, xi, r):
    z = curve.point(np.asarray(s))
    if map_id == "frame":
        return np.concatenate([z + xi * a, b])
    if map_id == "frame-radius":
        return np.concatenate([z + xi * a, b, [r]])
    return np.concatenate([z + r * a, b, [r]])


def fd_gram_jacobian(map_id, curve, point, h=1e-5):
    """Finite-difference Gram-determinant Jacobian of the given map.

    Central differences with step ``h`` along a tangent basis of the domain
    that is orthonormal in the product-chart metric (sphere metric for ``a``
    times fiber-sphere metric for ``b``), matching the measure realized by
    ``sample_perp_pair``: the unit-speed curve direction, the scalar
    directions (xi and/or r), geodesic great-circle steps of ``a`` and ``b``
    toward the orthogonal complement of span{a, b}, and the fiber-transported
    rotation of ``a`` toward ``b`` (angle ``h``; ``b`` follows so as to stay
    orthonormal, giving the in-plane pair rotation).
    """
    if map_id not in MAP_IDS:
        raise ConfigError(f"unknown map '{map_id}'")
    if not H_MIN <= h <= H_MAX:
        raise PreconditionError(f"step h must lie in [{H_MIN}, {H_MAX}]")
    s, a, b, xi, r = point.s, point.a, point.b, point.xi, point.r
    t = curve.tangent(np.asarray(s))
    if map_id in ("frame", "frame-radius"):
        if abs(float(b @ t)) <= 1e-6:
            raise PreconditionError("near-tangential frame: |b . t| too small")
        if not xi > 0:
            raise PreconditionError("xi must be positive")
    else:
        if float(a @ t) ** 2 + float(b @ t) ** 2 <= 1e-12:
            raise PreconditionError("contact frame: tangent invisible to (a, b)")
        if not r > 0:
            raise PreconditionError("r must be positive")

    speed = float(np.linalg.norm(curve.velocity(np.asarray(s))))

    def image(s_, a_, b_, xi_, r_):
        return _map_image(map_id, curve, s_, a_, b_, xi_, r_)

    moves = [lambda d: image(s + d / speed, a, b, xi, r)]
    if map_id in ("frame", "frame-radius"):
        moves.append(lambda d: image(s, a, b, xi + d, r))
    if map_id in ("frame-radius", "contact"):
        moves.append(lambda d: image(s, a, b, xi, r + d))
    for e in _perp_basis(a, b):
        moves.append(
            lambda d, e=e: image(s, math.cos(d) * a + math.sin(d) * e, b, xi, r)
        )
        moves.append(
            lambda d, e=e: image(s, a, math.cos(d) * b + math.sin(d) * e, xi, r)
        )

    def coupled(d):
        a2 = math.cos(d) * a + math.sin(d) * b
        b2 = math.cos(d) * b - math.sin(d) * a
        return image(s, a2, b2, xi, r)

    moves.append(coupled)

    cols = [(mv(h) - mv(-h)) / (2.0 * h) for mv in moves]
    D = np.column_stack(cols)
    gram = D.T @ D
    det = float(np.linalg.det(gram))
    return math.sqrt(max(det, 0.0))


def random_manifold_point(curve, rng):
    """Draw a well-conditioned domain point for Jacobian testing."""
    scale = curve.scale()
    n = curve.dim
    for _ in range(256):
        s = curve.s0 + (curve.s1 - curve.s0) * rng.random()
        a, b = sample_perp_pair(n, rng)
        t = curve.tangent(np.asarray(s))
        if abs(float(b @ t)) < 1e-2:
            continue
        xi = scale * (0.1 + 0.9 * rng.random())
        r = scale * (0.5 + rng.random())
        return ManifoldPoint(s=float(s), a=a, b=b, xi=float(xi), r=float(r))
    raise RuntimeError("failed to draw a well-conditioned point")


def verify_map(map_id, curve, n_points, h, seed):
    """Compare finite-difference and closed-form Jacobians at random points."""
    rng = stream_rng(seed, MAP_IDS.index(map_id))
    reports = []
    for _ in range(int(n_points)):
        pt = random_manifold_point(curve, rng)
        fd = fd_gram_jacobian(map_id, curve, pt, h=h)
        cf = closed_form_jacobian(map_id, curve, pt)
        rel = abs(fd - cf) / max(abs(cf), 1e-300)
        reports.append(
            JacobianReport(
                map_id=map_id, point=pt, fd_value=fd, closed_value=cf, rel_error=rel, h=h
            )
        )
    return reports


def normal_vector_m(p, u, r, z, t):
    """Unit normal, in disc space (center, normal, radius), to the set of
    discs whose boundary sphere touches the curve, at a configuration where
    the boundary passes through the curve point ``z`` with tangent ``t``.

    Requires ``z`` on the disc boundary (in-plane and at distance ``r``) and
    ``|u . t|`` bounded away from zero.
    """
    p = np.asarray(p, dtype=float)
    u = unit(u)
    z = np.asarray(z, dtype=float)
    t = unit(np.asarray(t, dtype=float))
    w = z - p
    wn = float(np.linalg.norm(w))
    if abs(float(w @ u)) > 1e-9 * max(wn, 1.0):
        raise PreconditionError("z is not in the disc's hyperplane")
    if abs(wn - r) > 1e-9 * max(r, 1.0):
        raise PreconditionError("z is not on the disc's boundary sphere")
    ut = float(u @ t)
    if abs(ut) < 1e-9:
        raise PreconditionError("tangential configuration: |u . t| too small")
    q = float((p - z) @ t) / ut
    vec = np.concatenate([z - p + q * u, q * (p - z), [r]])
    return vec / np.linalg.norm(vec)


def contact_tangent_directions(curve, s, a, b, r):
    """Spanning tangent directions, in disc space, of the contact map's image
    at ``(s, a, b, r)`` (disc center ``z + r*a``, normal ``b``).

    Families: curve motion ``(t, 0, 0)``; center translations ``(c, 0, 0)``
    and normal rotations ``(0, c, 0)`` for ``c`` orthogonal to span{a, b};
    radial growth ``(a, 0, 1)``; the pivot about the contact ``(r*b, -a, 0)``.
    """
    t = curve.tangent(np.asarray(s))
    n = t.size
    zero = np.zeros(n)
    dirs = [np.concatenate([t, zero, [0.0]])]
    for c in _perp_basis(a, b):
        dirs.append(np.concatenate([c, zero, [0.0]]))
        dirs.append(np.concatenate([zero, c, [0.0]]))
    dirs.append(np.concatenate([a, zero, [1.0]]))
    dirs.append(np.concatenate([r * b, -a, [0.0]]))
    return dirs


def verify_lemma_int(n, c, n_samples, seed, chunk=65536):
    """Monte-Carlo check of the direction-pair mass identity: the integral of
    ``|b . c|`` over orthonormal pairs (a, b), for any unit ``c``, equals
    ``4 a(n-1) a(n-2)`` with ``a(k)`` the unit-ball volume (8 pi for n = 3).
    """
    n = check_ambient_dim(n)
    c = unit(np.asarray(c, dtype=float))
    n_samples = int(n_samples)
    if n_samples < 1000:
        raise ConfigError("n_samples must be at least 1000")
    mass = measure_uperp2(n)
    total = []
    total_sq = []
    bounds = [(i, min(i + chunk, n_samples)) for i in range(0, n_samples, chunk)]
    for ci, (lo, hi) in enumerate(bounds):
        rng = stream_rng(seed, ci)
        _, b = sample_perp_pair(n, rng, size=hi - lo)
        v = mass * np.abs(b @ c)
        total.append(float(np.sum(v)))
        total_sq.append(float(np.sum(v * v)))
    mean = math.fsum(total) / n_samples
    var = max(math.fsum(total_sq) / n_samples - mean * mean, 0.0)
    return EstimatorResult(
        estimate=mean,
        std_error=math.sqrt(var / n_samples),
        n_samples=n_samples,
        n_rejected_degenerate=0,
        seed=int(seed),
        proposal={"target": lemma_int_target(n)},
    )


def lemma_int_target(n):
    """Exact value of the direction-pair mass identity."""
    n = check_ambient_dim(n)
    return 4.0 * ball_volume(n - 1) * ball_volume(n - 2)
