"""Numba backend: jitted curve evaluation and per-disc classification loop.

Mirrors ``_kernels_numpy`` exactly (same partition contract, same tolerance
semantics, same fixed-iteration bisection); selected via the
``FRACLEN_BACKEND`` environment variable.
"""

import numba
import numpy as np

from .curves import KIND_CIRCLE_ARC, KIND_FOURIER, KIND_HELIX, KIND_SEGMENT
from ._kernels_numpy import (
    LABEL_BOUNDARY,
    LABEL_DEGENERATE,
    LABEL_EVEN,
    LABEL_ODD,
    LABEL_TANGENTIAL,
)

_BISECT_ITERS = 64
_TWO_PI = 2.0 * np.pi


@numba.njit(cache=True)
def _point(kind, data, aux, s, out):
    n = out.shape[0]
    if kind == KIND_SEGMENT:
        for d in range(n):
            out[d] = data[0, d] + s * (data[1, d] - data[0, d])
    elif kind == KIND_CIRCLE_ARC:
        radius = aux[0]
        ang = aux[1] + s * (aux[2] - aux[1])
        ca = radius * np.cos(ang)
        sa = radius * np.sin(ang)
        for d in range(n):
            out[d] = data[0, d] + ca * data[1, d] + sa * data[2, d]
    elif kind == KIND_HELIX:
        radius = aux[0]
        pitch = aux[1]
        ca = radius * np.cos(s)
        sa = radius * np.sin(s)
        for d in range(n):
            out[d] = data[0, d] + ca * data[1, d] + sa * data[2, d] + pitch * s * data[3, d]
    elif kind == KIND_FOURIER:
        n_harm = (data.shape[0] - 1) // 2
        for d in range(n):
            out[d] = data[0, d]
        for h in range(n_harm):
            ph = _TWO_PI * (h + 1) * s
            c = np.cos(ph)
            si = np.sin(ph)
            for d in range(n):
                out[d] += c * data[1 + h, d] + si * data[1 + n_harm + h, d]
    else:  # spline: aux holds breakpoints, data rows 4i..4i+3 the coefficients
        m = aux.shape[0] - 1
        i = np.searchsorted(aux, s) - 1
        if i < 0:
            i = 0
        elif i > m - 1:
            i = m - 1
        dt = s - aux[i]
        r0 = 4 * i
        for d in range(n):
            out[d] = (
                (data[r0, d] * dt + data[r0 + 1, d]) * dt + data[r0 + 2, d]
            ) * dt + data[r0 + 3, d]


@numba.njit(cache=True)
def _velocity(kind, data, aux, s, out):
    n = out.shape[0]
    if kind == KIND_SEGMENT:
        for d in range(n):
            out[d] = data[1, d] - data[0, d]
    elif kind == KIND_CIRCLE_ARC:
        radius = aux[0]
        span = aux[2] - aux[1]
        ang = aux[1] + s * span
        ca = -radius * span * np.sin(ang)
        sa = radius * span * np.cos(ang)
        for d in range(n):
            out[d] = ca * data[1, d] + sa * data[2, d]
    elif kind == KIND_HELIX:
        radius = aux[0]
        pitch = aux[1]
        ca = -radius * np.sin(s)
        sa = radius * np.cos(s)
        for d in range(n):
            out[d] = ca * data[1, d] + sa * data[2, d] + pitch * data[3, d]
    elif kind == KIND_FOURIER:
        n_harm = (data.shape[0] - 1) // 2
        for d in range(n):
            out[d] = 0.0
        for h in range(n_harm):
            w = _TWO_PI * (h + 1)
            ph = w * s
            c = np.cos(ph)
            si = np.sin(ph)
            for d in range(n):
                out[d] += w * (-si * data[1 + h, d] + c * data[1 + n_harm + h, d])
    else:
        m = aux.shape[0] - 1
        i = np.searchsorted(aux, s) - 1
        if i < 0:
            i = 0
        elif i > m - 1:
            i = m - 1
        dt = s - aux[i]
        r0 = 4 * i
        for d in range(n):
            out[d] = (3.0 * data[r0, d] * dt + 2.0 * data[r0 + 1, d]) * dt + data[r0 + 2, d]


@numba.njit(cache=True)
def _classify_kernel(
    kind,
    data,
    aux,
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
    n = P.shape[1]
    m1 = snodes.shape[0]
    g = np.empty(m1)
    z = np.empty(n)
    t = np.empty(n)

    for i in range(k):
        pu = 0.0
        for d in range(n):
            pu += P[i, d] * U[i, d]

        degenerate = False
        for j in range(m1):
            gj = -pu
            for d in range(n):
                gj += Xnodes[j, d] * U[i, d]
            g[j] = gj
            if node_check[j] and abs(gj) <= tol_plane:
                degenerate = True

        count = 0
        nsup = 0
        any_tang = False
        any_bound = False
        best_xi = np.inf
        best_s = np.nan
        have_best = False

        for j in range(m1 - 1):
            if not itv_active[j]:
                continue
            if g[j] * g[j + 1] >= 0.0:
                continue
            lo = snodes[j]
            hi = snodes[j + 1]
            glo = g[j]
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                _point(kind, data, aux, mid, z)
                gm = -pu
                for d in range(n):
                    gm += z[d] * U[i, d]
                if gm * glo > 0.0:
                    lo = mid
                    glo = gm
                else:
                    hi = mid
            sc = 0.5 * (lo + hi)
            _point(kind, data, aux, sc, z)
            xi = 0.0
            for d in range(n):
                diff = z[d] - P[i, d]
                xi += diff * diff
            xi = np.sqrt(xi)
            _velocity(kind, data, aux, sc, t)
            tn = 0.0
            td = 0.0
            for d in range(n):
                tn += t[d] * t[d]
                td += t[d] * U[i, d]
            td = abs(td) / np.sqrt(tn)

            r_i = Rr[i]
            if td < tol_tangent:
                any_tang = True
            elif abs(xi - r_i) <= tol_radius:
                any_bound = True
            elif xi < r_i - tol_radius:
                count += 1
                if xi <= xi_max and xi >= r_i - d_omega:
                    nsup += 1
                if xi < best_xi:
                    best_xi = xi
                    best_s = sc
                    have_best = True

        counts[i] = count
        n_support[i] = nsup
        if have_best:
            s_star[i] = best_s
            xi_star[i] = best_xi
        else:
            s_star[i] = np.nan
            xi_star[i] = np.nan

        if degenerate:
            labels[i] = LABEL_DEGENERATE
        elif any_tang:
            labels[i] = LABEL_TANGENTIAL
        elif any_bound:
            labels[i] = LABEL_BOUNDARY
        elif count % 2 == 1:
            labels[i] = LABEL_ODD
        else:
            labels[i] = LABEL_EVEN


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
    """Same contract as ``_kernels_numpy.classify_discs``."""
    kind, data, aux, _, _ = curve.kernel_repr()
    k = P.shape[0]
    labels = np.zeros(k, dtype=np.int64)
    counts = np.zeros(k, dtype=np.int64)
    s_star = np.empty(k)
    xi_star = np.empty(k)
    n_support = np.zeros(k, dtype=np.int64)
    _classify_kernel(
        kind,
        data,
        aux,
        snodes,
        Xnodes,
        node_check,
        itv_active,
        np.ascontiguousarray(P),
        np.ascontiguousarray(U),
        np.ascontiguousarray(Rr),
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
    )
    return labels, counts, s_star, xi_star, n_support
