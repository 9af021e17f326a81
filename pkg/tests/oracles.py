"""Independent oracles for the test suite.

Everything here is derived from scratch with its own constants and its own
geometry, so that agreement with the package is a genuine cross-check rather
than a tautology.  The tensor-grid quadrature below was written (and frozen)
before the Monte-Carlo estimator was tuned against it.
"""

import math

import numpy as np

# Normalization of the orthonormal-pair measure in R^3, fixed by the mass
# identity: the integral of |b . c| over pairs equals 4 * a(2) * a(1) = 8 pi
# for any unit c.  The uniform-pair mean of |b . c| is 1/2, so the total mass
# is 16 pi.
PAIR_MASS_3 = 16.0 * math.pi


def segment_len_sigma(sigma, window_radius=2.0, grid=24):
    """Dense midpoint tensor-grid quadrature of the fractional length of the
    unit segment [-1/2, 1/2] x {0} x {0} in the ball of the given radius
    centered at the origin, for n = 3.

    Coordinates: segment parameter s, sphere angles (theta, phi) for the
    offset direction a, fiber angle psi for the normal b, and a power-law
    substituted offset variable v with xi = xi_max * v^(1/(1-sigma)) to
    resolve the xi^(-sigma) singularity at xi = 0.  The radial integral is
    exact: the window restricts r to an interval intersected with
    (xi, xi + d], and the integrand r^(1-n-sigma) has a closed-form
    antiderivative.  A plane with normal b meets the segment's line exactly
    once, at the sampled point itself (the offset xi * a is orthogonal to b),
    so the crossing parity is odd for every non-tangential configuration.
    """
    R = float(window_radius)
    d = 2.0 * R
    xi_max = d
    e = -1.0 - sigma  # 2 - n - sigma at n = 3
    g = int(grid)

    mid = (np.arange(g) + 0.5) / g
    s_grid = mid                      # segment parameter, unit speed
    th_grid = mid * np.pi
    ph_grid = mid * 2.0 * np.pi
    ps_grid = mid * 2.0 * np.pi
    v_grid = mid                      # xi = xi_max * v^(1/(1-sigma))

    xi = xi_max * v_grid ** (1.0 / (1.0 - sigma))
    xi_jac = xi_max * v_grid ** (sigma / (1.0 - sigma)) / (1.0 - sigma)

    cell = (1.0 / g) * (np.pi / g) * (2.0 * np.pi / g) ** 2 * (1.0 / g)
    # Angular measure: PAIR_MASS_3 spread over sin(theta) dtheta dphi dpsi
    # whose raw total is 8 pi^2.
    angular_scale = PAIR_MASS_3 / (8.0 * np.pi**2)

    # Vectorized over (phi, psi, v) for each (s, theta) pair.
    PH, PS, VI = np.meshgrid(ph_grid, ps_grid, np.arange(g), indexing="ij")
    PH = PH.ravel()
    PS = PS.ravel()
    VI = VI.ravel()
    XI = xi[VI]
    XJ = xi_jac[VI]

    total = 0.0
    for s in s_grid:
        z = np.array([s - 0.5, 0.0, 0.0])
        for th in th_grid:
            st, ct = math.sin(th), math.cos(th)
            ax = st * np.cos(PH)
            ay = st * np.sin(PH)
            az = np.full_like(PH, ct)
            # Fiber basis (e_theta, e_phi) orthogonal to a.
            cps, sps = np.cos(PS), np.sin(PS)
            bx = cps * ct * np.cos(PH) - sps * np.sin(PH)
            by = cps * ct * np.sin(PH) + sps * np.cos(PH)
            bz = -cps * st

            px = z[0] + XI * ax
            py = z[1] + XI * ay
            pz = z[2] + XI * az
            qb = -(px * bx + py * by + pz * bz)
            c2 = R * R - qb * qb
            ok = c2 > 0.0
            c = np.sqrt(np.where(ok, c2, 1.0))
            qx = -px - qb * bx
            qy = -py - qb * by
            qz = -pz - qb * bz
            qperp = np.sqrt(qx * qx + qy * qy + qz * qz)
            r_lo = np.maximum(XI, qperp - c)
            r_hi = np.minimum(XI + d, qperp + c)
            ok &= r_hi > r_lo
            with np.errstate(divide="ignore", invalid="ignore"):
                i_r = (r_hi**e - r_lo**e) / e
            bt = np.abs(bx)
            term = np.where(ok, bt * XI * i_r * XJ, 0.0)
            total += st * float(np.sum(term))
    return total * cell * angular_scale


def el_direction_reference(a, b, t, r, sigma, variational=False):
    """Independent transcription of the per-disc curvature direction: the
    in-plane direction -a + (a.t / b.t) b, scaled by
    sqrt((a.t)^2 + (b.t)^2) and divided by
    r^(1+sigma) * sqrt(2 + (1 + r^2) (a.t / b.t)^2)
    (with (2r)^(1+sigma) in the variational normalization)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    t = np.asarray(t, dtype=float)
    at = float(a @ t)
    bt = float(b @ t)
    rho = at / bt
    base = 2.0 * r if variational else r
    denom = base ** (1.0 + sigma) * math.sqrt(2.0 + (1.0 + r * r) * rho * rho)
    return (-a + rho * b) * math.sqrt(at * at + bt * bt) / denom


def circle_plane_crossings(center, radius, p, u):
    """Parameters (angles) where the circle of given center/radius in the
    xy-plane crosses the plane through p with normal u; independent closed
    form: solve A cos(g) + B sin(g) = C."""
    A = radius * u[0]
    B = radius * u[1]
    C = float((np.asarray(p) - np.asarray(center)) @ np.asarray(u))
    amp = math.hypot(A, B)
    if amp < abs(C):
        return []
    base = math.atan2(B, A)
    delta = math.acos(max(-1.0, min(1.0, C / amp)))
    return sorted({(base + delta) % (2 * math.pi), (base - delta) % (2 * math.pi)})
