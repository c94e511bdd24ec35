"""Neck geometry tests: angles, projections, the potential, small-angle
limits, and the convergence harness."""

import math

import numpy as np
import pytest

import z2harmonic.lawlor as lw
from z2harmonic.asymptotics import coefficients
from z2harmonic.errors import PreconditionError
from z2harmonic.numerics import integrate_finite


def test_params_validation():
    with pytest.raises(PreconditionError):
        lw.NeckParams(c=[1.0, -1.0, 2.0])
    with pytest.raises(PreconditionError):
        lw.NeckParams(c=[1.0, 1.0])
    with pytest.raises(PreconditionError):
        lw.NeckPoint(w=np.array([1.0, 1.0, 0.0]), s=0.0)


def test_symmetric_angles():
    ph = lw.phis(lw.NeckParams(c=[1.0, 1.0, 1.0]))
    assert np.allclose(ph, math.pi / 3, atol=1e-12)


def test_angle_sum_seeded():
    rng = np.random.default_rng(0)
    for _ in range(10):
        c = rng.uniform(0.3, 3.0, size=int(rng.integers(3, 6)))
        total = lw.phis(lw.NeckParams(c=c)).sum()
        assert total == pytest.approx(math.pi, abs=1e-10)


def test_angle_hierarchy_small_parameters():
    # c = (1/2, 1, 10): the first two angles are O(1/10), the last takes the rest
    ph = lw.phis(lw.NeckParams(c=[0.5, 1.0, 10.0]))
    assert ph[0] < 0.2 and ph[1] < 0.2
    assert ph[2] == pytest.approx(math.pi - ph[0] - ph[1], abs=1e-12)


def test_psi_odd_increasing():
    p = lw.NeckParams(c=[0.7, 1.3, 2.0])
    psi_eval, ph = lw.angles(p)
    vals = [psi_eval(0, s) for s in (-1.0, -0.3, 0.0, 0.3, 1.0)]
    assert vals[0] == -vals[4] and vals[1] == -vals[3] and vals[2] == 0.0
    assert np.all(np.diff(vals) > 0)
    assert 2 * psi_eval(0, 50.0) < ph[0]


def test_projection_center():
    p = lw.small_angle_params([2.0, 1.0], 10.0)
    w = np.array([0.6, 0.48, 0.64])
    x, y = lw.project(p, lw.NeckPoint(w=w, s=0.0))
    assert np.allclose(x, [1.2, 0.48, 0.0], atol=1e-14)
    assert np.allclose(y, [0.0, 0.0, 0.64], atol=1e-14)
    # w_n = 0 at s = 0 lands on the branching ellipsoid sum c_k^2 x_k^2 = 1
    w2 = np.array([0.6, 0.8, 0.0])
    x2, _ = lw.project(p, lw.NeckPoint(w=w2, s=0.0))
    assert (x2[:2] ** 2 * np.array([0.25, 1.0])).sum() == pytest.approx(1.0, abs=1e-14)
    assert x2[-1] == 0.0


def test_projection_involution():
    p = lw.small_angle_params([2.0, 1.0], 7.0)
    pt = lw.NeckPoint(w=np.array([0.6, 0.48, 0.64]), s=0.8)
    x1, y1 = lw.project(p, pt)
    x2, y2 = lw.project(p, pt.involution())
    assert np.allclose(x1, x2, atol=1e-14)
    assert np.allclose(y1, -y2, atol=1e-14)


def test_m_prime_positive_on_positive_s():
    rng = np.random.default_rng(6)
    for _ in range(5):
        c = rng.uniform(0.4, 4.0, size=int(rng.integers(3, 6)))
        p = lw.NeckParams(c=c)
        s = np.linspace(1e-3, 3.0, 40)
        _, _, mp = lw._m_d_mprime(p, s)
        assert mp.min() > 0
        # the last component is even in s: positive on the whole range
        s_full = np.linspace(-3.0, 3.0, 41)
        _, _, mp_full = lw._m_d_mprime(p, s_full)
        assert mp_full[-1].min() > 0


def test_potential_normalization_and_parity():
    p = lw.small_angle_params([2.0, 1.0], 12.0)
    pt0 = lw.NeckPoint(w=np.array([0.6, 0.48, 0.64]), s=0.0)
    assert lw.potential(p, pt0) == 0.0
    pt = lw.NeckPoint(w=np.array([0.6, 0.48, 0.64]), s=0.9)
    v = lw.potential(p, pt)
    assert lw.potential(p, pt.involution()) == pytest.approx(-v, abs=1e-12)


def test_potential_path_independence():
    # two-leg route: vary w along the s = 0 ellipsoid first, then move in s
    # at fixed w; the first leg contributes nothing because the fiber
    # components vanish against the frozen base directions there
    p = lw.small_angle_params([2.0, 1.0], 9.0)
    w_start = np.array([1.0, 0.0, 0.0])
    w_mid = np.array([0.6, 0.48, 0.64])

    def w_of(tau):
        w = (1 - tau) * w_start + tau * w_mid
        return w / np.linalg.norm(w)

    def leg1_kernel(taus):
        # sum_i y_i dx_i/dtau along the arc, x and y from the projections
        out = np.empty_like(taus)
        dt = 1e-6
        for k, tau in enumerate(taus):
            ptm = lw.NeckPoint(w=w_of(tau - dt), s=0.0)
            ptp = lw.NeckPoint(w=w_of(tau + dt), s=0.0)
            pt0 = lw.NeckPoint(w=w_of(tau), s=0.0)
            xm, _ = lw.project(p, ptm)
            xp, _ = lw.project(p, ptp)
            _, y0 = lw.project(p, pt0)
            out[k] = float(y0 @ (xp - xm)) / (2 * dt)
        return out

    leg1 = integrate_finite(leg1_kernel, 0.0, 1.0, rel_tol=1e-9, abs_tol=1e-11).value
    assert abs(leg1) <= 1e-10
    direct = lw.potential(p, lw.NeckPoint(w=w_mid, s=0.85))
    assert leg1 + direct == pytest.approx(direct, abs=1e-10)


def test_phi_n_limit_and_correction():
    # phi_n(t) -> pi with correction  -t^-1 int_{-inf}^{inf} C'(y^2)/C(y^2)^{3/2} dy
    # and O(t^-3) remainder (same log-derivative identity as the angle sum)
    c_base = np.array([0.5, 1.0])
    sig = np.array([1.0, c_base[0] ** 2 + c_base[1] ** 2, (c_base[0] * c_base[1]) ** 2])

    def C(y2):
        return sig[0] + sig[1] * y2 + sig[2] * y2 * y2

    def Cp(y2):
        return sig[1] + 2 * sig[2] * y2

    from z2harmonic.numerics import integrate_semi_infinite
    corr = 2 * integrate_semi_infinite(
        lambda y: Cp(y * y) / C(y * y) ** 1.5).value
    res = []
    for t in (10.0, 20.0):
        phi_n = lw.phis(lw.NeckParams(c=np.concatenate([c_base, [t]])))[-1]
        res.append(abs(phi_n - (math.pi - corr / t)))
    assert res[0] / res[1] == pytest.approx(8.0, rel=0.4)


@pytest.mark.parametrize("t_pair", [(10.0, 20.0)])
def test_limit_profiles_second_order_in_t(t_pair):
    c_base = np.array([0.5, 1.0])
    s = 0.8
    betas, beta_n = lw.limit_profiles(c_base, s)
    errs = []
    for t in t_pair:
        p = lw.NeckParams(c=np.concatenate([c_base, [t]]))
        e_i = max(abs(t * lw.psi(p, i, s) - betas[i]) for i in range(2))
        e_n = abs(t * (lw.psi(p, 2, s) - math.atan(s * t)) - beta_n)
        errs.append((e_i, e_n))
    for k in range(2):
        ratio = errs[0][k] / errs[1][k]
        assert ratio == pytest.approx(4.0, rel=0.4)


def test_limit_profiles_at_zero():
    betas, beta_n = lw.limit_profiles([0.5, 1.0], 0.0)
    assert np.all(betas == 0.0) and beta_n == 0.0


def test_limit_fiber_structure():
    c_base = np.array([0.5, 1.0])
    axis = np.array([0.0, 0.0, 1.0])
    assert np.linalg.norm(lw.limit_fiber(c_base, axis, 0.0)) == pytest.approx(1.0)
    equator = np.array([1.0, 0.0, 0.0])
    assert np.linalg.norm(lw.limit_fiber(c_base, equator, 0.0)) == 0.0


def test_fiber_nonvanishing_report():
    rep = lw.fiber_nonvanishing([0.5, 1.0])
    assert rep.passed
    assert rep.metrics["grid_min"] > 0
    assert rep.metrics["center_value"] == 0.0


def test_angle_match_report():
    rep = lw.angle_match([2.0, 1.0], [10.0, 20.0, 40.0])
    assert rep.passed
    assert rep.metrics["min_slope"] == pytest.approx(-3.0, abs=0.5)
    assert rep.metrics["excess_slope"] == pytest.approx(-3.0, abs=0.5)
    assert np.all(rep.tables["excess"] > 0)
    # t phi_i approaches 4 a_i (full-line integral identity)
    a = coefficients([2.0, 1.0]).a
    t = 60.0
    ph = lw.phis(lw.small_angle_params([2.0, 1.0], t))
    assert np.allclose(t * ph[:2], 4 * a[:2], rtol=2e-3)
    assert abs(ph.sum() - math.pi) <= 1e-10


def test_convergence_harness():
    rep = lw.convergence_harness([2.0, 1.0], [5.0, 10.0, 20.0, 40.0],
                                 count=3, seed=1)
    assert rep.passed
    assert rep.metrics["min_ratio_per_doubling"] >= 1.8
    errors = rep.tables["errors"]
    assert np.all(np.diff(errors, axis=1) < 0)


def test_convergence_harness_branch_normalized_sample():
    # s = 0, w_n = 0 sits on the branching set: both sides vanish
    p = lw.small_angle_params([2.0, 1.0], 10.0)
    pt = lw.NeckPoint(w=np.array([0.6, 0.8, 0.0]), s=0.0)
    assert lw.potential(p, pt) == 0.0
    x, _ = lw.project(p, pt)
    assert x[0] ** 2 / 4 + x[1] ** 2 == pytest.approx(1.0, abs=1e-12)


def test_involution_swapped_sample_same_error():
    h = [2.0, 1.0]
    pt = lw.NeckPoint(w=np.array([0.6, 0.48, 0.64]), s=0.7)
    rep1 = lw.convergence_harness(h, [5.0, 10.0], points=[pt])
    rep2 = lw.convergence_harness(h, [5.0, 10.0], points=[pt.involution()])
    assert np.allclose(rep1.tables["errors"], rep2.tables["errors"], rtol=1e-9)


def test_special_lagrangian_residual():
    # the graph of the rescaled potential satisfies
    # Im det(I + i Hess / c_n) = 0 at every neck parameter
    pt = lw.NeckPoint(w=np.array([0.6, 0.48, 0.64]), s=0.7)
    for t in (5.0, 10.0, 20.0):
        p = lw.small_angle_params([2.0, 1.0], t)
        H = lw.graph_hessian(p, pt)
        resid = abs(np.linalg.det(np.eye(3) + 1j * H / t).imag)
        assert resid <= 1e-9
        assert np.max(np.abs(H - H.T)) <= 1e-7  # Lagrangian graph: symmetric Hessian
