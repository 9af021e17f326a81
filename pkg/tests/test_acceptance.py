"""Acceptance gate: ten criteria, each printing one PASS/FAIL line.

Run with ``pytest -v -s tests/test_acceptance.py`` to see the lines as they
complete.  Sample counts follow the acceptance specification; the whole
module takes a few minutes.
"""

import math
import time

import numpy as np
import pytest

from fraclen import (
    Window,
    cli,
    kappa_sigma,
    len_sigma,
    limit_constant,
    limit_sweep,
    make_curve,
    normal_vector_m,
    scale_curve,
    verify_lemma_int,
    verify_map,
)
from fraclen.geometry import ball_volume, sample_perp_pair, stream_rng
from fraclen.verify import contact_tangent_directions, lemma_int_target

from oracles import segment_len_sigma

SIGMA_GRID = [0.5, 0.7, 0.9, 0.95, 0.99]
WORKERS = 4


def report(index, name, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {index:2d} [{status}] {name}: {detail}")
    assert ok, f"criterion {index} ({name}): {detail}"


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


def test_criterion_1_limit_theorem(segment, circle, window2):
    t0 = time.time()
    details = []
    ok = True
    for curve, label in ((segment, "segment"), (circle, "circle")):
        _, extra = limit_sweep(
            curve, window2, SIGMA_GRID, 1_000_000, 20260801, workers=WORKERS
        )
        target = limit_constant(3) * curve.arclength()
        rel = abs(extra["value"] - target) / target
        ok &= rel < 0.10
        details.append(f"{label}: extrapolated {extra['value']:.4f} vs {target:.4f} ({100*rel:.1f}%)")
    elapsed = time.time() - t0
    ok &= elapsed < 300.0
    report(1, "limit theorem", ok, "; ".join(details) + f"; {elapsed:.0f}s")


def test_criterion_2_pair_mass_identity():
    ok = True
    details = []
    for n in (3, 4, 5):
        res = verify_lemma_int(n, np.eye(n)[0], 1_000_000, 77)
        target = lemma_int_target(n)
        z = abs(res.estimate - target) / res.std_error
        ok &= z <= 3.0 and res.std_error <= 0.003 * target
        details.append(f"n={n}: {res.estimate:.4f} vs {target:.4f} (z={z:.2f})")
    report(2, "direction-pair mass identity", ok, "; ".join(details))


def test_criterion_3_jacobians(helix, segment4):
    worst = 0.0
    for curve in (helix, segment4):
        for map_id in ("frame", "frame-radius", "contact"):
            reports = verify_map(map_id, curve, 100, 1e-5, 31415)
            worst = max(worst, max(r.rel_error for r in reports))
    report(3, "finite-difference Jacobians", worst <= 1e-5, f"worst rel_error {worst:.2e}")


def test_criterion_4_boundary_normal():
    rng = stream_rng(2718, 0)
    worst_norm = 0.0
    worst_ortho = 0.0
    checked = 0
    while checked < 100:
        a, b = sample_perp_pair(3, rng)
        r = float(rng.uniform(0.3, 2.0))
        z = rng.normal(size=3)
        t = rng.normal(size=3)
        t /= np.linalg.norm(t)
        if abs(b @ t) < 1e-2:
            continue
        p = z + r * a
        m = normal_vector_m(p, b, r, z, t)
        worst_norm = max(worst_norm, abs(float(np.linalg.norm(m)) - 1.0))
        curve = make_curve(
            {"kind": "segment", "dimension": 3, "start": z - t, "end": z + t}
        )
        for d in contact_tangent_directions(curve, 0.5, a, b, r):
            worst_ortho = max(
                worst_ortho, abs(float(m @ d)) / max(1.0, float(np.linalg.norm(d)))
            )
        checked += 1
    ok = worst_norm <= 1e-12 and worst_ortho <= 1e-8
    report(
        4,
        "contact-set normal",
        ok,
        f"unit-norm defect {worst_norm:.2e}, orthogonality defect {worst_ortho:.2e}",
    )


def test_criterion_5_segment_curvature_zero(segment):
    ok = True
    details = []
    for i, sigma in enumerate((0.3, 0.5, 0.8)):
        res = kappa_sigma(segment, 0.5, sigma, 1_000_000, 4000 + i)
        vectors = [res.kappa_vector] + [vec for _, vec in res.sweep]
        z = max(
            abs(c) / max(se, 1e-15)
            for vec in vectors
            for c, se in zip(vec, res.std_error_vector)
        )
        ok &= z <= 3.0
        details.append(f"sigma={sigma}: max |z|={z:.2f}")
    report(5, "straight-line curvature zero", ok, "; ".join(details))


def test_criterion_6_circle_curvature_sign(circle):
    res = kappa_sigma(circle, 0.0, 0.5, 1_000_000, 6001)
    z_in = -res.kappa_vector[0] / res.std_error_vector[0]
    z_out = abs(res.kappa_vector[2]) / res.std_error_vector[2]
    ok = z_in > 5.0 and z_out <= 3.0
    report(
        6,
        "circle curvature sign",
        ok,
        f"inward z={z_in:.1f} (>5 needed), out-of-plane |z|={z_out:.2f} (<=3 needed)",
    )


def test_criterion_7_scaling_covariance(segment, window2):
    lam, sigma = 2.0, 0.7
    base = len_sigma(segment, window2, sigma, 200_000, 70, workers=WORKERS)
    scaled = len_sigma(
        scale_curve(segment, lam),
        Window(center=np.zeros(3), radius=lam * window2.radius),
        sigma,
        200_000,
        71,
        workers=WORKERS,
    )
    factor = lam ** (2.0 - sigma)
    combined = math.hypot(scaled.std_error, factor * base.std_error)
    z = abs(scaled.estimate - factor * base.estimate) / combined
    report(
        7,
        "scaling covariance",
        z <= 3.0,
        f"ratio {scaled.estimate / base.estimate:.4f} vs {factor:.4f} (z={z:.2f})",
    )


def test_criterion_8_estimator_cross_check(segment, window2):
    can = len_sigma(segment, window2, 0.7, 100_000, 80, workers=WORKERS)
    mult = len_sigma(
        segment, window2, 0.7, 100_000, 80, workers=WORKERS, estimator="multiplicity"
    )
    combined = max(math.hypot(can.std_error, mult.std_error), 1e-15)
    z = abs(can.estimate - mult.estimate) / combined
    report(
        8,
        "unbiasing cross-check",
        z <= 3.0,
        f"canonical {can.estimate:.4f} vs multiplicity {mult.estimate:.4f} (z={z:.2f})",
    )


def test_criterion_9_tensor_grid_oracle(segment, window2):
    sigma = 0.9
    res = len_sigma(segment, window2, sigma, 200_000, 90, workers=WORKERS)
    coarse = segment_len_sigma(sigma, grid=16)
    fine = segment_len_sigma(sigma, grid=24)
    band = 3.0 * res.std_error + abs(fine - coarse)
    diff = abs(res.estimate - fine)
    report(
        9,
        "tensor-grid oracle",
        diff <= band,
        f"MC {res.estimate:.3f}+/-{res.std_error:.3f} vs oracle {fine:.3f} "
        f"(|diff| {diff:.3f} <= band {band:.3f})",
    )


def test_criterion_10_determinism(tmp_path):
    commands = [
        ["length", "--curve", "segment", "--window-radius", "2", "--sigma", "0.7",
         "--samples", "20000", "--seed", "10"],
        ["curvature", "--curve", "circle", "--s", "0.25", "--sigma", "0.5",
         "--samples", "20000", "--seed", "11"],
        ["verify-lemma-int", "--n", "3", "--samples", "20000", "--seed", "12"],
    ]
    ok = True
    for i, argv in enumerate(commands):
        out = tmp_path / f"run{i}.csv"
        payloads = []
        for _ in range(2):
            assert cli.main(argv + ["--out", str(out)]) == 0
            payloads.append(out.read_bytes())
        ok &= payloads[0] == payloads[1]
    # Worker count must not change the numbers (headers record it, so
    # compare the non-comment payload).
    base = commands[0]
    numeric = []
    for w in ("1", "3"):
        out = tmp_path / f"workers{w}.csv"
        assert cli.main(base + ["--workers", w, "--out", str(out)]) == 0
        numeric.append(
            [l for l in out.read_bytes().splitlines() if not l.startswith(b"#")]
        )
    ok &= numeric[0] == numeric[1]
    report(10, "byte-identical determinism", ok, "reruns and worker counts agree")
