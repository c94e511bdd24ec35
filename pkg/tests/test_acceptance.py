"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines; every
criterion is asserted at its stated tolerance.
"""

import math

import numpy as np
import pytest

import z2harmonic.lawlor as lw
from z2harmonic.asymptotics import coefficients, invert
from z2harmonic.ellipsoidal import (HalfAxes, SheetPoint, branch_coordinate,
                                    focal_coefficient_residual, focal_roots,
                                    from_cartesian, metric_orthogonality_report,
                                    sym_identity_check, to_cartesian)
from z2harmonic.harmonic import (branch_coefficient, continue_along_path,
                                 evaluate, evaluate_at, harmonic_family,
                                 harmonicity_report)
from z2harmonic.twistor import TwistorParams, compare_to_harmonic
from z2harmonic.twistor import coefficients as twistor_coefficients


def check(num, description, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] criterion {num:2d}: {description} {detail}")
    assert ok, f"criterion {num}: {description} {detail}"


def agm_complete_elliptic(k):
    """Independent AGM oracle for the complete elliptic integral K."""
    a, b = 1.0, math.sqrt(1.0 - k * k)
    while abs(a - b) > 1e-16:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def test_criterion_01_closed_form_asymptotics():
    c3 = coefficients([1.0, 1.0])
    ok3 = (abs(c3.a0 - math.pi / 4) <= 1e-8
           and np.max(np.abs(c3.a - [math.pi / 8, math.pi / 8, -math.pi / 4])) <= 1e-8)
    c4 = coefficients([1.0, 1.0, 1.0])
    ok4 = (abs(c4.a0 - 0.5) <= 1e-8
           and np.max(np.abs(c4.a - [1 / 3, 1 / 3, 1 / 3, -1.0])) <= 1e-8)
    check(1, "closed-form coefficients at equal axes (n=3, n=4)", ok3 and ok4)


def test_criterion_02_elliptic_value():
    a0 = coefficients([2.0, 1.0]).a0
    oracle = agm_complete_elliptic(math.sqrt(3) / 2) / 2
    check(2, "a0(2,1) against AGM elliptic oracle", abs(a0 - oracle) <= 1e-8,
          f"(diff {abs(a0 - oracle):.2e})")


def test_criterion_03_trace_consistency():
    worst = 0.0
    for n in (3, 4, 5):
        rng = np.random.default_rng(40 + n)
        for _ in range(10):
            h = rng.uniform(0.4, 3.0, size=n - 1)
            c = coefficients(h)
            worst = max(worst, abs(c.a[-1] - c.an_integral))
    check(3, "both a_n routes agree for 30 seeded axes", worst <= 1e-12,
          f"(worst {worst:.2e})")


def test_criterion_04_harmonicity():
    fam = harmonic_family([2.0, 1.0])
    rep = harmonicity_report(fam, 1.5, 4.0, count=20, seed=3, delta=1e-3)
    bound_ok = rep.metrics["max_residual"] <= 1e-5
    # the O(delta^2) rate is certified at delta = 4e-3, where the truncation
    # term dominates the machine-precision stencil noise (~1e-7 at 5e-4)
    rate = harmonicity_report(fam, 1.5, 4.0, count=20, seed=3, delta=4e-3)
    rate_ok = rate.metrics["ratio"] >= 3.5
    check(4, "FD Laplacian residual bound and O(delta^2) decay",
          bound_ok and rate_ok,
          f"(max {rep.metrics['max_residual']:.2e}, ratio {rate.metrics['ratio']:.2f})")


def test_criterion_05_monodromy():
    fam = harmonic_family([2.0, 1.0])
    taus = np.linspace(0.0, 2.0 * math.pi, 201)
    loop = np.column_stack([2.0 + 0.6 * np.cos(taus), np.zeros_like(taus),
                            0.6 * np.sin(taus)])
    vals = continue_along_path(fam, loop, "+")
    linking_ok = abs(vals[-1][0] + vals[0][0]) <= 1e-8
    trivial = np.column_stack([3.5 + 0.4 * np.cos(taus), 0.3 + np.zeros_like(taus),
                               0.4 * np.sin(taus)])
    vals2 = continue_along_path(fam, trivial, "+")
    trivial_ok = abs(vals2[-1][0] - vals2[0][0]) <= 1e-8
    check(5, "loop monodromy -1, contractible loop +1", linking_ok and trivial_ok,
          f"(defects {abs(vals[-1][0] + vals[0][0]):.1e}, "
          f"{abs(vals2[-1][0] - vals2[0][0]):.1e})")


def test_criterion_06_branch_nondegeneracy():
    fam = harmonic_family([2.0, 1.0])
    h1_sq = 4.0
    mu1, alpha = 1.3, 0.3
    B = branch_coefficient(fam, SheetPoint(mu=[mu1, 0.0, 0.0], signs=[1, 1])).B
    radii, remainders, coeffs = [], [], []
    for target in np.geomspace(1e-4 * h1_sq, 1e-2 * h1_sq, 9):
        # |z| = mu1 rho^2 / (2 h1 h2) -> rho placing |z| at the target radius
        rho = math.sqrt(target * 2 * 2.0 / mu1)
        sp = SheetPoint(mu=[mu1, rho * math.sin(alpha), rho * math.cos(alpha)],
                        signs=[1, 1])
        f = evaluate(fam, sp, rel_tol=1e-13, abs_tol=1e-16)
        z, zh = branch_coordinate(fam.axes, sp)
        radii.append(abs(z))
        remainders.append(abs(f - B * (zh ** 3).real))
        coeffs.append(f / (zh ** 3).real)
    slope = float(np.polyfit(np.log(radii), np.log(remainders), 1)[0])
    coeff_ok = abs(coeffs[0] / B - 1.0) <= 1e-2
    spot1 = branch_coefficient(fam, SheetPoint(mu=[1.0, 0.0, 0.0], signs=[1, 1])).B
    spot2 = branch_coefficient(fam, SheetPoint(mu=[2.0, 0.0, 0.0], signs=[1, 1])).B
    spots_ok = (abs(spot1 + 2.0 / 3.0) <= 1e-12
                and abs(spot2 + 2.0 ** 1.5 / 3.0) <= 1e-12)
    check(6, "near-branch exponent 2.5 and leading coefficient B",
          abs(slope - 2.5) <= 0.2 and coeff_ok and spots_ok,
          f"(slope {slope:.3f}, coeff dev {abs(coeffs[0] / B - 1):.2e})")


def test_criterion_07_far_field():
    results = []
    for h in ([2.0, 1.0], [2.0, 1.5, 1.0]):
        n = len(h) + 1
        fam = harmonic_family(h)
        truth = coefficients(h)
        rng = np.random.default_rng(5)
        # decay exponent along 3 rays
        slopes = []
        for _ in range(3):
            ray = rng.normal(size=n)
            ray /= np.linalg.norm(ray)
            radii = np.geomspace(8 * h[0], 60 * h[0], 6)
            rem = []
            for r in radii:
                x = r * ray
                fx = evaluate_at(fam, x, "+")
                rem.append(abs(fx - (truth.a0 - float((truth.a * x ** 2).sum()))))
            slopes.append(np.polyfit(np.log(radii), np.log(rem), 1)[0])
        ray_ok = all(abs(s + (n - 2)) <= 0.2 for s in slopes)
        # sphere |x| = 50 h1: the trace-free quadric is identified on one
        # sphere; a0 needs the r^(2-n) monopole separated with a second
        # sphere (on a single sphere that tail is constant and shifts a0
        # by ~6e-3 at n=3 for any implementation)
        R = 50 * h[0]
        pts = rng.normal(size=(50, n))
        pts = R * pts / np.linalg.norm(pts, axis=1)[:, None]
        vals = np.array([evaluate_at(fam, p, "+") for p in pts])
        A = np.column_stack([np.ones(len(pts))] +
                            [-(pts[:, i] ** 2) + pts[:, -1] ** 2 for i in range(n - 1)])
        coef, *_ = np.linalg.lstsq(A, vals, rcond=None)
        a_fit = np.concatenate([coef[1:], [-coef[1:].sum()]])
        quad_ok = np.max(np.abs(a_fit - truth.a) / np.abs(truth.a)) <= 1e-4
        pts2 = rng.normal(size=(50, n))
        pts2 = 70 * h[0] * pts2 / np.linalg.norm(pts2, axis=1)[:, None]
        allp = np.vstack([pts, pts2])
        allv = np.concatenate([vals, [evaluate_at(fam, p, "+") for p in pts2]])
        r = np.linalg.norm(allp, axis=1)
        A2 = np.column_stack([np.ones(len(allp))] +
                             [-(allp[:, i] ** 2) + allp[:, -1] ** 2 for i in range(n - 1)] +
                             [r ** (2 - n)])
        coef2, *_ = np.linalg.lstsq(A2, allv, rcond=None)
        a0_ok = abs(coef2[0] - truth.a0) / truth.a0 <= 1e-4
        results.append(ray_ok and quad_ok and a0_ok)
    check(7, "far-field decay exponent and sphere recovery (n=3,4)", all(results))


def test_criterion_08_inversion():
    ok = True
    details = []
    for h in ([2.0, 1.0], [3.0, 2.0, 1.0]):
        target = coefficients(h).a[:-1]
        res = invert(target)
        dev = float(np.max(np.abs(res.h - np.asarray(h)) / np.asarray(h)))
        details.append(f"{dev:.1e}")
        ok = ok and dev <= 1e-8
    res = invert([math.pi / 8, math.pi / 8], c0=math.pi / 16)
    scale_ok = abs(res.scale - 0.5) <= 1e-8 and np.allclose(res.h, 0.5, atol=1e-8)
    check(8, "coefficient-map inversion roundtrips and exact scale step",
          ok and scale_ok, f"(deviations {', '.join(details)})")


def test_criterion_09_twistor():
    pi2 = math.pi ** 2
    c0 = np.array(twistor_coefficients(TwistorParams(eps=0.0)))
    coeff_ok = np.max(np.abs(c0 - [pi2, pi2 / 2, pi2 / 2, pi2])) <= 1e-8
    rep = compare_to_harmonic(TwistorParams(eps=0.5), samples=10, seed=7)
    point_ok = rep.metrics["max_rel_deviation"] <= 1e-6
    ratio_ok = True
    for eps in (0.2, 0.5, 0.8):
        c = np.array(twistor_coefficients(TwistorParams(eps=eps)))
        a = coefficients([math.sqrt(1 + eps), math.sqrt(1 - eps)])
        targets = np.array([a.a0, a.a[0], a.a[1], -a.a[2]])
        ratios = c / targets
        ratio_ok = ratio_ok and np.max(np.abs(ratios / ratios[0] - 1.0)) <= 1e-8
    check(9, "twistor coefficients, pointwise ratio, ratio identity",
          coeff_ok and point_ok and ratio_ok,
          f"(pointwise dev {rep.metrics['max_rel_deviation']:.2e})")


def test_criterion_10_neck_angles():
    rng = np.random.default_rng(0)
    sum_ok = True
    for _ in range(10):
        c = rng.uniform(0.3, 3.0, size=int(rng.integers(3, 6)))
        sum_ok = sum_ok and abs(lw.phis(lw.NeckParams(c=c)).sum() - math.pi) <= 1e-10
    sym = lw.phis(lw.NeckParams(c=[1.0, 1.0, 1.0]))
    sym_ok = np.max(np.abs(sym - math.pi / 3)) <= 1e-10
    rep = lw.angle_match([2.0, 1.0], [10.0, 20.0, 40.0])
    slope_ok = (abs(rep.metrics["min_slope"] + 3.0) <= 0.5
                and abs(rep.metrics["max_slope"] + 3.0) <= 0.5)
    excess_ok = (rep.metrics["min_excess"] > 0
                 and abs(rep.metrics["excess_slope"] + 3.0) <= 0.5)
    check(10, "neck angle sums, symmetric angles, cubic angle matching",
          sum_ok and sym_ok and slope_ok and excess_ok,
          f"(slopes [{rep.metrics['min_slope']:.2f}, {rep.metrics['max_slope']:.2f}])")


def test_criterion_11_neck_convergence():
    rep = lw.convergence_harness([2.0, 1.0], [5.0, 10.0, 20.0, 40.0],
                                 count=5, seed=1, guard=0.25)
    errors = rep.tables["errors"]
    decreasing = bool(np.all(np.diff(errors, axis=1) < 0))
    check(11, "rescaled neck potentials converge with ratio >= 1.8 per doubling",
          decreasing and rep.metrics["min_ratio_per_doubling"] >= 1.8,
          f"(min ratio {rep.metrics['min_ratio_per_doubling']:.2f})")


def test_criterion_12_coordinates():
    axes = HalfAxes(h=[2.0, 1.0])
    rng = np.random.default_rng(100)
    worst = 0.0
    checked = 0
    while checked < 100:
        mu = np.array([rng.uniform(1.0, 2.0), rng.uniform(-1.0, 1.0),
                       rng.uniform(-2.5, 2.5)])
        if mu[-1] ** 2 + mu[-2] ** 2 < 1e-4:
            continue
        sp = SheetPoint(mu=mu, signs=rng.choice([-1.0, 1.0], size=2))
        x = to_cartesian(axes, sp)
        back = from_cartesian(axes, x, sheet=sp.sheet)
        worst = max(worst, float(np.max(np.abs(to_cartesian(axes, back) - x)))
                    / max(1.0, float(np.max(np.abs(x)))))
        checked += 1
    roundtrip_ok = worst <= 1e-10
    lemma_ok = True
    for n in (3, 4, 5, 6):
        rng2 = np.random.default_rng(300 + n)
        y = np.arange(1.0, n) * 0.9 + rng2.uniform(0.0, 0.3, size=n - 1)
        for k in range(n - 1):
            for l in range(n - 1):
                expect = 1.0 if k == l else 0.0
                lemma_ok = lemma_ok and abs(
                    sym_identity_check(y, k, l) - expect) <= 1e-12
    rep = metric_orthogonality_report(
        axes, SheetPoint(mu=[math.sqrt(2.5), 0.5, 1.0], signs=[1, 1]))
    metric_ok = (rep.metrics["max_offdiagonal"] <= 1e-6
                 and rep.metrics["max_diagonal_rel_error"] <= 1e-6)
    focal_ok = True
    for n in (3, 4, 5):
        rng3 = np.random.default_rng(500 + n)
        h = np.sort(rng3.uniform(0.5, 3.0, size=n - 1))[::-1]
        h = HalfAxes(h=h + np.arange(n - 1)[::-1] * 0.2)
        focal_ok = focal_ok and focal_coefficient_residual(h, focal_roots(h)) <= 1e-12
    check(12, "roundtrip, symmetric-polynomial identity, metric, focal roots",
          roundtrip_ok and lemma_ok and metric_ok and focal_ok,
          f"(roundtrip worst {worst:.1e})")
