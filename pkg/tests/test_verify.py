import math

import numpy as np
import pytest

from fraclen import (
    closed_form_jacobian,
    fd_gram_jacobian,
    make_curve,
    normal_vector_m,
    verify_lemma_int,
    verify_map,
)
from fraclen.errors import PreconditionError
from fraclen.geometry import sample_perp_pair, stream_rng
from fraclen.verify import (
    ManifoldPoint,
    contact_tangent_directions,
    lemma_int_target,
    random_manifold_point,
)


@pytest.fixture(scope="module")
def segment4():
    return make_curve(
        {
            "kind": "segment",
            "dimension": 4,
            "start": [-0.5, 0, 0, 0],
            "end": [0.5, 0.3, 0.1, 0.2],
        }
    )


@pytest.mark.parametrize("map_id", ["frame", "frame-radius", "contact"])
def test_jacobians_match_closed_forms_n3(helix, map_id):
    reports = verify_map(map_id, helix, 10, 1e-5, 2026)
    assert max(r.rel_error for r in reports) <= 1e-5


@pytest.mark.parametrize("map_id", ["frame", "frame-radius", "contact"])
def test_jacobians_match_closed_forms_n4(segment4, map_id):
    reports = verify_map(map_id, segment4, 10, 1e-5, 2027)
    assert max(r.rel_error for r in reports) <= 1e-5


def test_frame_and_frame_radius_agree(helix):
    # The radius enters the frame-radius map as an untouched coordinate, so
    # its Jacobian factor is identical to the frame map's at any r.
    rng = stream_rng(5, 0)
    for _ in range(5):
        pt = random_manifold_point(helix, rng)
        assert closed_form_jacobian("frame", helix, pt) == closed_form_jacobian(
            "frame-radius", helix, pt
        )
        fd_a = fd_gram_jacobian("frame", helix, pt, h=1e-5)
        fd_b = fd_gram_jacobian("frame-radius", helix, pt, h=1e-5)
        assert fd_a == pytest.approx(fd_b, rel=1e-9)


def test_fd_preconditions(helix):
    rng = stream_rng(6, 0)
    pt = random_manifold_point(helix, rng)
    with pytest.raises(PreconditionError):
        fd_gram_jacobian("frame", helix, pt, h=1.0)
    bad = ManifoldPoint(s=pt.s, a=pt.a, b=pt.b, xi=-1.0, r=pt.r)
    with pytest.raises(PreconditionError):
        fd_gram_jacobian("frame", helix, bad, h=1e-5)


def _random_boundary_config(rng, n=3):
    a, b = sample_perp_pair(n, rng)
    r = float(rng.uniform(0.3, 2.0))
    z = rng.normal(size=n)
    p = z + r * a  # z sits on the boundary sphere of disc (p, b, r)
    t = rng.normal(size=n)
    t /= np.linalg.norm(t)
    return p, b, r, z, t, a


def test_normal_vector_unit_and_orthogonal():
    rng = stream_rng(8, 0)
    checked = 0
    while checked < 100:
        p, u, r, z, t, a = _random_boundary_config(rng)
        if abs(u @ t) < 1e-2 or abs(a @ t) + abs(u @ t) < 1e-2:
            continue
        m = normal_vector_m(p, u, r, z, t)
        assert abs(np.linalg.norm(m) - 1.0) <= 1e-12
        # m is normal to the contact set: orthogonal to every tangent
        # direction of the touching-disc manifold at this configuration.
        curve = make_curve(
            {"kind": "segment", "dimension": 3, "start": z - t, "end": z + t}
        )
        for d in contact_tangent_directions(curve, 0.5, a, u, r):
            assert abs(m @ d) <= 1e-8 * max(1.0, np.linalg.norm(d))
        # The normal-rotation block of m is orthogonal to the disc normal.
        assert abs(m[3:6] @ u) <= 1e-9
        checked += 1


def test_normal_vector_preconditions():
    z = np.zeros(3)
    t = np.array([1.0, 0.0, 0.0])
    with pytest.raises(PreconditionError):
        normal_vector_m([0.5, 0, 0], [0, 1, 0], 1.0, z, t)  # z not on boundary
    with pytest.raises(PreconditionError):
        normal_vector_m([1.0, 0, 0], [0, 0, 1], 1.0, z, t)  # tangential u


def test_lemma_int_targets():
    assert lemma_int_target(3) == pytest.approx(8.0 * math.pi, rel=1e-13)
    assert lemma_int_target(4) == pytest.approx(16.0 * math.pi**2 / 3.0, rel=1e-13)


@pytest.mark.parametrize("n", [3, 4])
def test_lemma_int_estimate(n):
    c = np.eye(n)[0]
    res = verify_lemma_int(n, c, 200000, 314)
    target = lemma_int_target(n)
    assert abs(res.estimate - target) <= 3.0 * res.std_error
    # Rotation invariance: a different direction gives a statistically
    # consistent estimate.
    c2 = np.ones(n) / math.sqrt(n)
    res2 = verify_lemma_int(n, c2, 200000, 315)
    assert abs(res2.estimate - target) <= 3.0 * res2.std_error
