"""Vector arithmetic in R^n, sphere sampling, and measure constants.

Vectors are plain numpy arrays of length ``n`` with ``n >= 3`` (the disc
geometry this package is built on degenerates for ``n <= 2``).  Batched
quantities use arrays of shape ``(m, n)``.
"""

import numpy as np
from scipy.special import gammaln

from .errors import InvalidDimensionError

# Orthonormality tolerance used by constructors and predicates throughout.
ORTHO_TOL = 1e-12

MIN_AMBIENT_DIM = 3


def check_ambient_dim(n):
    """Validate an ambient dimension, returning it as an int."""
    n = int(n)
    if n < MIN_AMBIENT_DIM:
        raise InvalidDimensionError(f"ambient dimension must be >= 3, got {n}")
    return n


def unit(v):
    """Return v / |v|.

    Raises
    ------
    ValueError
        If ``v`` is (numerically) the zero vector.
    """
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0.0 or not np.isfinite(norm):
        raise ValueError("cannot normalize zero or non-finite vector")
    return v / norm


def perp_decompose(v, u):
    """Split ``v`` into components parallel and perpendicular to unit vector ``u``.

    Returns
    -------
    (parallel, perpendicular) : tuple of ndarray
        ``parallel = (v . u) u`` and ``perpendicular = v - parallel``.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    parallel = (v @ u) * u
    return parallel, v - parallel


def make_perp_pair(a, b):
    """Return an exactly orthonormal pair built from ``(a, b)``.

    ``a`` is normalized; ``b`` is Gram-Schmidt projected against ``a`` and
    normalized.  Inputs already orthonormal to within ``ORTHO_TOL`` pass
    through up to rounding.
    """
    a = unit(a)
    b = np.asarray(b, dtype=float)
    b = b - (b @ a) * a
    return a, unit(b)


def sample_unit_sphere(n, rng, size=None):
    """Draw uniformly from the unit sphere of R^n (Gaussian normalization).

    Parameters
    ----------
    n : int
        Ambient dimension, >= 1.
    rng : numpy.random.Generator
    size : int, optional
        If given, return ``(size, n)`` samples; otherwise a single ``(n,)``
        vector.
    """
    n = int(n)
    if n < 1:
        raise InvalidDimensionError(f"sphere dimension must be >= 1, got {n}")
    shape = (n,) if size is None else (size, n)
    g = rng.standard_normal(shape)
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    # Resampling the zero vector would break the fixed draw count per sample;
    # at float64 the event has probability ~1e-300 per draw, so guard instead.
    norm[norm == 0.0] = 1.0
    return g / norm


def sample_perp_pair(n, rng, size=None):
    """Draw an orthonormal pair (a, b): a uniform on the sphere of R^n,
    b uniform on the unit sphere of the hyperplane {a}^perp.

    This iterated product realizes the natural surface measure on the set of
    ordered orthonormal pairs: by orthogonal invariance the Jacobian between
    the product construction and the (2n-3)-dimensional surface measure is 1.

    Returns
    -------
    (a, b) : tuple of ndarray
        Each of shape ``(n,)`` or ``(size, n)``.
    """
    n = check_ambient_dim(n)
    a = sample_unit_sphere(n, rng, size=size)
    g = rng.standard_normal(a.shape)
    g = g - np.sum(g * a, axis=-1, keepdims=True) * a
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    norm[norm == 0.0] = 1.0
    return a, g / norm


def ball_volume(k):
    """Volume of the unit ball in R^k: pi^(k/2) / Gamma(k/2 + 1).

    Computed via log-Gamma for stability at large ``k``.  ``ball_volume(0)``
    is 1 by convention.
    """
    k = int(k)
    if k < 0:
        raise InvalidDimensionError(f"ball dimension must be >= 0, got {k}")
    return float(np.exp(0.5 * k * np.log(np.pi) - gammaln(0.5 * k + 1.0)))


def sphere_area(k):
    """Surface area of the unit sphere in R^k: 2 pi^(k/2) / Gamma(k/2)."""
    k = int(k)
    if k < 1:
        raise InvalidDimensionError(f"sphere ambient dimension must be >= 1, got {k}")
    return float(2.0 * np.exp(0.5 * k * np.log(np.pi) - gammaln(0.5 * k)))


def measure_uperp2(n):
    """Mass assigned to the set of ordered orthonormal pairs in R^n.

    Uniform pair sampling (``sample_perp_pair``) fixes the shape of the pair
    distribution; this constant fixes its total mass.  It is the unique
    normalization under which the direction-pair mass identity holds: for any
    unit ``c``, the integral of ``|b . c|`` equals
    ``4 ball_volume(n-1) ball_volume(n-2)``.  Since the marginal of ``b`` is
    uniform on the sphere (mean of ``|b . c|`` is
    ``2 ball_volume(n-1) / sphere_area(n)``), the constant evaluates to
    ``sphere_area(n)^2 / pi`` (16 pi for n = 3).  All estimators in this
    package use it, so their absolute normalizations are mutually consistent
    with that identity and with the limit constant.
    """
    n = check_ambient_dim(n)
    return sphere_area(n) ** 2 / np.pi


def derive_seed(seed, *ids):
    """Derive a reproducible child seed from a master seed and stream ids."""
    ss = np.random.SeedSequence([int(seed)] + [int(i) for i in ids])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def stream_rng(seed, *ids):
    """Generator for a (seed, stream ids) pair.

    Streams are independent across distinct id tuples and reproducible,
    which makes chunked estimators independent of worker count.
    """
    return np.random.default_rng(
        np.random.SeedSequence([int(seed)] + [int(i) for i in ids])
    )
