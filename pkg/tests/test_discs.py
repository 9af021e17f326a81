import math

import numpy as np
import pytest

from fraclen import (
    Disc,
    Window,
    boundary_meets_window,
    canonical_hit,
    classify_disc,
    hyperplane_crossings,
)
from fraclen.discs import boundary_meets_window_batch, check_curve_in_window
from fraclen.errors import PreconditionError

from oracles import circle_plane_crossings


def test_circle_crossings_match_closed_form(circle):
    p = np.array([0.3, -0.1, 0.2])
    u = np.array([0.2, 0.9, 0.1])
    u = u / np.linalg.norm(u)
    roots, suspect = hyperplane_crossings(circle, p, u)
    assert not suspect
    expected = circle_plane_crossings(np.zeros(3), 1.0, p, u)
    got = sorted((2 * math.pi * r) % (2 * math.pi) for r in roots)
    assert len(got) == len(expected)
    for g, e in zip(got, expected):
        assert g == pytest.approx(e, abs=1e-9)


# The plane y = 0.3 cuts the unit circle at (+/-c1, 0.3, 0) with
# c1 = sqrt(1 - 0.09); the crossings sit at generic parameters, away from
# the closed curve's seam and the classifier's grid nodes.
_C1 = math.sqrt(1.0 - 0.09)


def test_classify_circle_odd_and_even(circle):
    both = classify_disc(circle, Disc(center=[0, 0.3, 0], normal=[0, 1, 0], radius=1.5))
    assert both.label == "even"
    assert both.count == 2
    one = classify_disc(circle, Disc(center=[0.8, 0.3, 0], normal=[0, 1, 0], radius=0.5))
    assert one.label == "odd"
    assert one.count == 1
    none = classify_disc(circle, Disc(center=[5, 0.3, 0], normal=[0, 1, 0], radius=0.5))
    assert none.label == "even"
    assert none.count == 0


def test_classify_boundary_and_tangential(circle):
    # Near crossing at distance exactly equal to the radius: boundary.
    b = classify_disc(
        circle, Disc(center=[_C1 + 0.5, 0.3, 0], normal=[0, 1, 0], radius=0.5)
    )
    assert b.label == "boundary"
    # Disc in the plane of the circle: the curve hugs the hyperplane.
    t = classify_disc(circle, Disc(center=[0, 0, 0], normal=[0, 0, 1], radius=0.5))
    assert t.label == "degenerate"


def test_canonical_hit_is_nearest(circle):
    disc = Disc(center=[0.6, 0.3, 0], normal=[0, 1, 0], radius=2.0)
    dc = classify_disc(circle, disc)
    assert dc.count == 2
    hit = canonical_hit(circle, disc, dc)
    assert np.allclose(hit.point, [_C1, 0.3, 0], atol=1e-9)
    assert hit.distance == pytest.approx(_C1 - 0.6, abs=1e-9)


def test_window_predicate_closed_form_vs_sampling():
    rng = np.random.default_rng(3)
    window = Window(center=np.array([0.2, -0.1, 0.4]), radius=1.3)
    phis = np.linspace(0, 2 * math.pi, 4096, endpoint=False)
    for _ in range(50):
        p = rng.normal(size=3)
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        r = float(rng.uniform(0.1, 2.0))
        disc = Disc(center=p, normal=u, radius=r)
        # Brute force: march around the boundary circle.
        e1 = np.linalg.qr(np.column_stack([u, np.eye(3)]))[0][:, 1]
        e2 = np.cross(u, e1)
        ring = p + r * (np.cos(phis)[:, None] * e1 + np.sin(phis)[:, None] * e2)
        dmin = float(np.min(np.linalg.norm(ring - window.center, axis=1)))
        brute = dmin < window.radius
        if abs(dmin - window.radius) < 1e-3:
            continue  # too close to call at this angular resolution
        assert boundary_meets_window(disc, window) == brute
        assert bool(
            boundary_meets_window_batch(p[None, :], u[None, :], [r], window)[0]
        ) == brute


def test_check_curve_in_window(segment):
    check_curve_in_window(segment, Window(center=np.zeros(3), radius=2.0))
    with pytest.raises(PreconditionError):
        check_curve_in_window(segment, Window(center=np.zeros(3), radius=0.4))
