"""Pure-numpy backend for the batch disc classifier.

Vectorizes over discs with matrix products against a precomputed node table
of curve points; sign-change intervals are refined by a fixed-iteration
vectorized bisection.  See ``discs.classify_batch`` for the driver.
"""

import numpy as np

LABEL_EVEN = 0
LABEL_ODD = 1
LABEL_BOUNDARY = 2
LABEL_TANGENTIAL = 3
LABEL_DEGENERATE = 4

_BISECT_ITERS = 64
_BLOCK = 2048


def classify_discs(
    curve,
    snodes,
    Xnodes,
    node_check,
    itv_active,
    P,
    U,
    Rr,
    tol_plane,
    tol_radius,
    tol_tangent,
    xi_max,
    d_omega,
):
    """Classify a batch of discs against a curve.

    Returns ``(labels, n_interior, s_star, xi_star, n_support)`` where
    ``s_star``/``xi_star`` describe the interior hit with minimal distance to
    the disc center (ties broken by smaller parameter), NaN when there is
    none, and ``n_support`` counts interior hits inside the importance-sampling
    support box (``xi <= xi_max`` and ``xi >= r - d_omega``).
    """
    k = P.shape[0]
    labels = np.zeros(k, dtype=np.int64)
    counts = np.zeros(k, dtype=np.int64)
    s_star = np.full(k, np.nan)
    xi_star = np.full(k, np.nan)
    n_support = np.zeros(k, dtype=np.int64)
    for lo in range(0, k, _BLOCK):
        hi = min(lo + _BLOCK, k)
        _classify_block(
            curve,
            snodes,
            Xnodes,
            node_check,
            itv_active,
            P[lo:hi],
            U[lo:hi],
            Rr[lo:hi],
            tol_plane,
            tol_radius,
            tol_tangent,
            xi_max,
            d_omega,
            labels[lo:hi],
            counts[lo:hi],
            s_star[lo:hi],
            xi_star[lo:hi],
            n_support[lo:hi],
        )
    return labels, counts, s_star, xi_star, n_support


def _classify_block(
    curve,
    snodes,
    Xnodes,
    node_check,
    itv_active,
    P,
    U,
    Rr,
    tol_plane,
    tol_radius,
    tol_tangent,
    xi_max,
    d_omega,
    labels,
    counts,
    s_star,
    xi_star,
    n_support,
):
    k = P.shape[0]
    pu = np.einsum("ij,ij->i", P, U)
    G = U @ Xnodes.T - pu[:, None]

    degenerate = np.any((np.abs(G) <= tol_plane) & node_check[None, :], axis=1)
    cross = (G[:, :-1] * G[:, 1:] < 0.0) & itv_active[None, :]
    ii, jj = np.nonzero(cross)

    if ii.size:
        lo = snodes[jj].copy()
        hi = snodes[jj + 1].copy()
        glo = G[ii, jj].copy()
        Ui = U[ii]
        pui = pu[ii]
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            gm = np.einsum("ij,ij->i", curve.point(mid), Ui) - pui
            take_lo = gm * glo > 0.0
            lo = np.where(take_lo, mid, lo)
            glo = np.where(take_lo, gm, glo)
            hi = np.where(take_lo, hi, mid)
        sc = 0.5 * (lo + hi)
        zc = curve.point(sc)
        xi = np.linalg.norm(zc - P[ii], axis=1)
        td = np.abs(np.einsum("ij,ij->i", curve.tangent(sc), Ui))
        r_i = Rr[ii]

        tang = td < tol_tangent
        bound = np.abs(xi - r_i) <= tol_radius
        interior = xi < r_i - tol_radius

        any_tang = np.bincount(ii[tang], minlength=k) > 0
        any_bound = np.bincount(ii[bound & ~tang], minlength=k) > 0
        counts[:] = np.bincount(ii[interior], minlength=k)

        in_support = interior & (xi <= xi_max) & (xi >= r_i - d_omega)
        n_support[:] = np.bincount(ii[in_support], minlength=k)

        if np.any(interior):
            i_int = ii[interior]
            xi_int = xi[interior]
            s_int = sc[interior]
            order = np.lexsort((s_int, xi_int, i_int))
            i_sorted = i_int[order]
            first = np.ones(i_sorted.size, dtype=bool)
            first[1:] = i_sorted[1:] != i_sorted[:-1]
            s_star[i_sorted[first]] = s_int[order][first]
            xi_star[i_sorted[first]] = xi_int[order][first]
    else:
        any_tang = np.zeros(k, dtype=bool)
        any_bound = np.zeros(k, dtype=bool)

    labels[:] = np.where(counts % 2 == 1, LABEL_ODD, LABEL_EVEN)
    labels[any_bound] = LABEL_BOUNDARY
    labels[any_tang] = LABEL_TANGENTIAL
    labels[degenerate] = LABEL_DEGENERATE
