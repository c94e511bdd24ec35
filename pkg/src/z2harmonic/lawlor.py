"""Lawlor-neck geometry: angle quadratures, the intrinsic (w, s)
parametrization, base/fiber projections, the two-valued potential obtained
by integrating the restricted Liouville form, small-angle limit profiles,
and the harness verifying that the rescaled neck potentials converge to
the branched harmonic function.

Data: c = (c_1, ..., c_n) > 0 with

    P(y^2) = (prod_k (1 + c_k^2 y^2) - 1) / y^2          (polynomial in y^2),
    psi_i(s) = int_0^s c_i^2 dy / ((1 + c_i^2 y^2) sqrt(P(y^2))),
    phi_i    = int_{-inf}^{inf} of the same kernel,       sum_i phi_i = pi.

A neck point is (w, s) with |w| = 1.  The base and fiber projections are

    x = ( m_i(s) w_i , -m_n(s) w_n ),   m_i = cos(psi_i) sqrt(c_i^-2 + s^2),
                                        m_n = sin(psi_n) sqrt(c_n^-2 + s^2),
    y = ( d_i(s) w_i , d_n(s) w_n ),    d_i = c_n sqrt(c_i^-2 + s^2) sin(psi_i),
                                        d_n = sqrt(1 + s^2 c_n^2) cos(psi_n),

where the d's carry the explicit factor c_n (the large parameter t of the
small-angle family), so the potential below is already the rescaled object
t * F compared against the harmonic function.  The potential is the line
integral of sum_i y_i dx_i along fixed-w curves from s = 0, where it is
normalized to vanish (the fiber components vanish against the frozen base
directions on the central ellipsoid):

    F(w, s) = int_0^s ( sum_{i<n} d_i w_i^2 m_i' - d_n w_n^2 m_n' ) du.

Small-angle limits (C(x) = prod_{k<n} (1 + c_k^2 x), Ct(x) = (C(x)-1)/x):

    beta_i(s) = int_0^s c_i^2 du / ((1 + c_i^2 u^2) sqrt(C(u^2))),
    beta_n(s) = -int_0^s Ct(u^2) du / (C(u^2) + sqrt(C(u^2))),

with t psi_i -> beta_i and t (psi_n - arctan(st)) -> beta_n, both with
O(t^-2) error, and the limiting fiber projection

    Pr_Y^inf = ( w_i beta_i(s) sqrt(c_i^-2 + s^2), w_n (1 - s beta_n(s)) ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ellipsoidal as ell
from .asymptotics import coefficients as quadric_coefficients
from .errors import BranchProximityError, PreconditionError
from .harmonic import evaluate_at, harmonic_family
from .numerics import integrate_finite, integrate_semi_infinite
from .report import VerificationReport, fit_loglog_slope

# fixed-order Gauss nodes for the vectorized inner angle quadratures
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_GL01_NODES = 0.5 * (_GL_NODES + 1.0)
_GL01_WEIGHTS = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class NeckParams:
    """Positive parameters c_1..c_n; c_n plays the large-t role in the
    small-angle family."""

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "c", c)
        if c.ndim != 1 or c.size < 3:
            raise PreconditionError("need at least three parameters (ambient R^3)")
        if not np.all(c > 0):
            raise PreconditionError("neck parameters must be positive")

    @property
    def n(self):
        return self.c.size

    def P(self, y2):
        """(prod_k (1 + c_k^2 y^2) - 1)/y^2 as an explicit polynomial in y^2."""
        sig = ell.elementary_symmetric(self.c ** 2)[1:]  # sigma_1..sigma_n
        out = np.zeros_like(np.asarray(y2, dtype=float))
        for coeff in sig[::-1]:
            out = out * y2 + coeff
        return out


@dataclass(frozen=True)
class NeckPoint:
    w: np.ndarray
    s: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        object.__setattr__(self, "w", w)
        if abs(np.linalg.norm(w) - 1.0) > 1e-9:
            raise PreconditionError("w must be a unit vector")

    def involution(self):
        w = self.w.copy()
        w[-1] = -w[-1]
        return NeckPoint(w=w, s=-self.s)


def _psi_kernel(params, i, y):
    ci2 = params.c[i] ** 2
    return ci2 / ((1.0 + ci2 * y * y) * np.sqrt(params.P(y * y)))


def psi(params, i, s, rel_tol=1e-12, abs_tol=1e-14):
    """Angle function psi_i(s), odd and strictly increasing (adaptive route)."""
    if s == 0.0:
        return 0.0
    res = integrate_finite(lambda y: _psi_kernel(params, i, y), 0.0, abs(s),
                           rel_tol=rel_tol, abs_tol=abs_tol)
    return float(np.sign(s)) * res.value


def psi_prime(params, i, s):
    return float(_psi_kernel(params, i, np.asarray(s, dtype=float)))


def phis(params, rel_tol=1e-12, abs_tol=1e-14):
    """Asymptotic plane angles phi_i = full-line integral of the psi kernel."""
    out = np.empty(params.n)
    for i in range(params.n):
        out[i] = 2.0 * integrate_semi_infinite(
            lambda y: _psi_kernel(params, i, y),
            rel_tol=rel_tol, abs_tol=abs_tol).value
    return out


def angles(params, rel_tol=1e-12, abs_tol=1e-14):
    """(psi evaluator, phi vector) pair."""

    def psi_eval(i, s):
        return psi(params, i, s, rel_tol=rel_tol, abs_tol=abs_tol)

    return psi_eval, phis(params, rel_tol=rel_tol, abs_tol=abs_tol)


def _psi_vectorized(params, u):
    """psi_i(u_j) for all i and a vector of u's, via fixed-order Gauss rules.

    For i < n the kernel is smooth on the scale of the c_i, so a scaled
    64-point rule is near machine accuracy.  For i = n (the large-c_n
    direction) the kernel has an arctan(c_n s) boundary layer; substituting
    y = tan(v)/c_n flattens it:
        psi_n(u) = int_0^{arctan(c_n u)} dv / sqrt(C(y^2) + Ct(y^2)/c_n^2),
    with y = tan(v)/c_n, which the same rule resolves uniformly in c_n.
    """
    u = np.asarray(u, dtype=float)
    n = params.n
    cn = params.c[-1]
    sig_base = ell.elementary_symmetric(params.c[:-1] ** 2)

    def C_and_Ct(y2):
        cc = np.zeros_like(y2)
        for coeff in sig_base[:0:-1]:
            cc = cc * y2 + coeff
        return 1.0 + y2 * cc, cc  # C(y2), (C(y2)-1)/y2

    out = np.empty((n, u.size))
    nodes = np.abs(u)[:, None] * _GL01_NODES[None, :]          # (m, 64)
    p_vals = params.P(nodes * nodes)
    sqrt_p = np.sqrt(p_vals)
    for i in range(n - 1):
        ci2 = params.c[i] ** 2
        kern = ci2 / ((1.0 + ci2 * nodes * nodes) * sqrt_p)
        out[i] = np.abs(u) * (kern @ _GL01_WEIGHTS)
    vmax = np.arctan(cn * np.abs(u))
    v = vmax[:, None] * _GL01_NODES[None, :]
    y = np.tan(v) / cn
    c_v, ct_v = C_and_Ct(y * y)
    kern_n = 1.0 / np.sqrt(c_v + ct_v / (cn * cn))
    out[-1] = vmax * (kern_n @ _GL01_WEIGHTS)
    return out * np.sign(u)[None, :]


def _sqrt_r(params, s):
    """sqrt(c_k^-2 + s^2) for all k, vectorized over s."""
    s = np.asarray(s, dtype=float)
    return np.sqrt(1.0 / params.c[:, None] ** 2 + s[None, :] ** 2)


def _m_d_mprime(params, s):
    """m_k(s), d_k(s), m_k'(s) stacked as (3, n, len(s)) for vector s."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    n = params.n
    cn = params.c[-1]
    psis = _psi_vectorized(params, s)
    r = _sqrt_r(params, s)
    dr = s[None, :] / r
    trig_c = np.cos(psis)
    trig_s = np.sin(psis)
    pprime = np.empty_like(psis)
    for i in range(n):
        pprime[i] = _psi_kernel(params, i, s)
    m = trig_c * r
    m[-1] = trig_s[-1] * r[-1]
    d = cn * r * trig_s
    d[-1] = np.sqrt(1.0 + (s * cn) ** 2) * trig_c[-1]
    mp = -trig_s * pprime * r + trig_c * dr
    mp[-1] = trig_c[-1] * pprime[-1] * r[-1] + trig_s[-1] * dr[-1]
    return m, d, mp


def project(params, pt):
    """Base and fiber projections (x, y) of a neck point."""
    m, d, _ = _m_d_mprime(params, np.array([pt.s]))
    x = m[:, 0] * pt.w
    x[-1] = -m[-1, 0] * pt.w[-1]
    y = d[:, 0] * pt.w
    return x, y


def potential(params, pt, rel_tol=1e-10, abs_tol=1e-12):
    """Two-valued potential: line integral of sum_i y_i dx_i from s = 0
    along the fixed-w curve; odd under the neck involution."""
    if pt.s == 0.0:
        return 0.0
    w2 = pt.w ** 2

    def kernel(u):
        m, d, mp = _m_d_mprime(params, u)
        integrand = (d[:-1] * mp[:-1] * w2[:-1, None]).sum(axis=0)
        integrand -= d[-1] * mp[-1] * w2[-1]
        return integrand

    res = integrate_finite(kernel, 0.0, abs(pt.s), rel_tol=rel_tol, abs_tol=abs_tol)
    return float(np.sign(pt.s)) * res.value


def limit_profiles(c_base, s, rel_tol=1e-12, abs_tol=1e-14):
    """(beta_1..beta_{n-1}, beta_n) at parameter s for the small-angle family."""
    c_base = np.asarray(c_base, dtype=float)
    if not np.all(c_base > 0):
        raise PreconditionError("base parameters must be positive")
    sig = ell.elementary_symmetric(c_base ** 2)

    def C(y2):
        cc = np.zeros_like(y2)
        for coeff in sig[:0:-1]:
            cc = cc * y2 + coeff
        return 1.0 + y2 * cc

    def Ct(y2):
        cc = np.zeros_like(y2)
        for coeff in sig[:0:-1]:
            cc = cc * y2 + coeff
        return cc

    betas = np.zeros(c_base.size)
    beta_n = 0.0
    if s != 0.0:
        for i, ci in enumerate(c_base):
            betas[i] = float(np.sign(s)) * integrate_finite(
                lambda y: ci ** 2 / ((1 + ci ** 2 * y * y) * np.sqrt(C(y * y))),
                0.0, abs(s), rel_tol=rel_tol, abs_tol=abs_tol).value
        beta_n = -float(np.sign(s)) * integrate_finite(
            lambda y: Ct(y * y) / (C(y * y) + np.sqrt(C(y * y))),
            0.0, abs(s), rel_tol=rel_tol, abs_tol=abs_tol).value
    return betas, beta_n


def limit_fiber(c_base, w, s):
    """Limiting fiber projection Pr_Y^inf at (w, s)."""
    c_base = np.asarray(c_base, dtype=float)
    betas, beta_n = limit_profiles(c_base, s)
    head = w[:-1] * betas * np.sqrt(1.0 / c_base ** 2 + s * s)
    tail = w[-1] * (1.0 - s * beta_n)
    return np.concatenate([head, [tail]])


def small_angle_params(h, t):
    """c_t = (1/h_1, ..., 1/h_{n-1}, t)."""
    h = np.asarray(h, dtype=float)
    return NeckParams(c=np.concatenate([1.0 / h, [float(t)]]))


def angle_match(h, t_list, rel_tol=1e-12, abs_tol=1e-14):
    """Compare the neck angles phi_i(t) with the graph angles of the
    rescaled harmonic differential:

        phit_i = 2 arctan(2 a_i / t), i < n;  phit_n = pi + 2 arctan(2 a_n / t).

    Reports per-t errors |phi_i - phit_i|, their fitted decay exponent
    (expected about 3), and the positive excess sum(phit) - pi with its
    decay exponent.
    """
    h = np.asarray(h, dtype=float)
    t_list = np.asarray(t_list, dtype=float)
    asym = quadric_coefficients(h, rel_tol=rel_tol, abs_tol=abs_tol)
    a = asym.a
    n = h.size + 1
    errors = np.empty((t_list.size, n))
    excess = np.empty(t_list.size)
    for k, t in enumerate(t_list):
        params = small_angle_params(h, t)
        phi = phis(params, rel_tol=rel_tol, abs_tol=abs_tol)
        phit = np.empty(n)
        phit[:-1] = 2.0 * np.arctan(2.0 * a[:-1] / t)
        phit[-1] = np.pi + 2.0 * np.arctan(2.0 * a[-1] / t)
        errors[k] = np.abs(phi - phit)
        excess[k] = phit.sum() - np.pi
    slopes = np.array([fit_loglog_slope(t_list, errors[:, i]) for i in range(n)])
    excess_slope = fit_loglog_slope(t_list, excess)
    phi_sums = []
    for t in t_list:
        phi_sums.append(float(phis(small_angle_params(h, t)).sum()))
    passed = bool(np.all(np.abs(slopes + 3.0) <= 0.5) and np.all(excess > 0)
                  and abs(excess_slope + 3.0) <= 0.5)
    return VerificationReport(
        name="angle_match",
        passed=passed,
        metrics={"min_slope": float(slopes.min()), "max_slope": float(slopes.max()),
                 "excess_slope": float(excess_slope),
                 "min_excess": float(excess.min())},
        tables={"t": t_list, "errors": errors, "excess": excess,
                "phi_sum_minus_pi": np.array(phi_sums) - np.pi},
    )


def convergence_harness(h, t_list, points=None, count=5, seed=0, guard=0.25,
                        rel_tol=1e-10, abs_tol=1e-12):
    """Error table e(t) = |F_t(w, s) - f(Pr_X(w, s))| over neck points.

    F_t is the rescaled potential of the small-angle neck c_t; the harmonic
    value is taken on the sheet consistent with the first t (the potential
    and the function are both two-valued and odd, so the matching sign is
    fixed per sample).  Samples whose projection lands within the branch
    tolerance are skipped with a notice.  Checks that e(t) decreases with
    ratio >= 1.8 per doubling of t.
    """
    h = np.asarray(h, dtype=float)
    t_list = np.asarray(t_list, dtype=float)
    fam = harmonic_family(h)
    n = h.size + 1
    if points is None:
        rng = np.random.default_rng(seed)
        points = []
        while len(points) < count:
            w = rng.normal(size=n)
            w /= np.linalg.norm(w)
            s = rng.uniform(0.5, 1.1)
            if s * s + w[-1] ** 2 < guard:
                continue
            points.append(NeckPoint(w=w, s=s))
    table = np.full((len(points), t_list.size), np.nan)
    notes = []
    signs = np.zeros(len(points))
    for j, pt in enumerate(points):
        for k, t in enumerate(t_list):
            params = small_angle_params(h, t)
            x, _ = project(params, pt)
            try:
                fh = evaluate_at(fam, x, "+", rel_tol=1e-13, abs_tol=1e-15)
            except BranchProximityError:
                notes.append(f"sample {j}: projection at t={t} is branch-proximate; skipped")
                break
            val = potential(params, pt, rel_tol=rel_tol, abs_tol=abs_tol)
            if signs[j] == 0:
                signs[j] = 1.0 if abs(val - fh) <= abs(val + fh) else -1.0
            table[j, k] = abs(val - signs[j] * fh)
    ratios = table[:, :-1] / table[:, 1:]
    valid = ~np.isnan(table).any(axis=1)
    per_doubling = ratios[valid] ** (1.0 / np.log2(t_list[1:] / t_list[:-1]))[None, :]
    min_ratio = float(np.nanmin(per_doubling)) if valid.any() else np.nan
    passed = bool(valid.any() and np.all(table[valid, :-1] > table[valid, 1:])
                  and min_ratio >= 1.8)
    return VerificationReport(
        name="neck_potential_convergence",
        passed=passed,
        metrics={"min_ratio_per_doubling": min_ratio,
                 "max_final_error": float(np.nanmax(table[:, -1])) if valid.any() else np.nan},
        tables={"t": t_list, "errors": table,
                "points_w": np.array([p.w for p in points]),
                "points_s": np.array([p.s for p in points]),
                "match_sign": signs},
        notes=notes,
    )


def fiber_nonvanishing(c_base, s_grid=None, dirs=64, seed=0, exclusion=0.1):
    """Grid minimum of |Pr_Y^inf| outside a ball around {s = 0, w_n = 0}.

    The limiting fiber vanishes exactly on that set; the report evaluates
    |Pr_Y^inf| on a seeded grid of unit directions and s values, returning
    the minimum over the region s^2 + w_n^2 >= exclusion^2 (expected
    strictly positive) and the value at the excluded center (expected 0).
    """
    c_base = np.asarray(c_base, dtype=float)
    m = c_base.size
    if s_grid is None:
        s_grid = np.linspace(-2.0, 2.0, 33)
    rng = np.random.default_rng(seed)
    ws = rng.normal(size=(dirs, m + 1))
    ws /= np.linalg.norm(ws, axis=1)[:, None]
    axis = np.zeros(m + 1)
    axis[-1] = 1.0
    equator = np.zeros(m + 1)
    equator[0] = 1.0
    ws = np.vstack([ws, axis, equator])
    min_norm = np.inf
    argmin = None
    for s in s_grid:
        betas, beta_n = limit_profiles(c_base, float(s))
        head_scale = betas * np.sqrt(1.0 / c_base ** 2 + s * s)
        tail_scale = 1.0 - s * beta_n
        for w in ws:
            if s * s + w[-1] ** 2 < exclusion ** 2:
                continue
            v = np.concatenate([w[:-1] * head_scale, [w[-1] * tail_scale]])
            norm = float(np.linalg.norm(v))
            if norm < min_norm:
                min_norm = norm
                argmin = (w.copy(), float(s))
    center = float(np.linalg.norm(limit_fiber(c_base, equator, 0.0)))
    return VerificationReport(
        name="limit_fiber_nonvanishing",
        passed=bool(min_norm > 0.0 and center == 0.0),
        metrics={"grid_min": min_norm, "center_value": center,
                 "exclusion_radius": exclusion},
        tables={"argmin_w": argmin[0], "argmin_s": argmin[1]},
    )


def graph_hessian(params, pt, delta=1e-5):
    """Hessian of the rescaled potential as a function of the base point,
    from the graph structure: D(Pr_Y) (D(Pr_X))^{-1} in the local chart
    (w_1..w_{n-1}, s) with w_n = sqrt(1 - |w'|^2) (requires w_n > 0.1).

    Used by the special-Lagrangian residual spot check
    Im det(I + i Hess/c_n) -> 0.
    """
    n = params.n
    if pt.w[-1] <= 0.1:
        raise PreconditionError("chart requires w_n > 0.1")
    coords = np.concatenate([pt.w[:-1], [pt.s]])

    def maps(q):
        whead = q[:-1]
        wn = np.sqrt(1.0 - (whead ** 2).sum())
        w = np.concatenate([whead, [wn]])
        p = NeckPoint(w=w, s=q[-1])
        return project(params, p)

    jx = np.empty((n, n))
    jy = np.empty((n, n))
    for j in range(n):
        step = np.zeros(n)
        step[j] = delta
        xp, yp = maps(coords + step)
        xm, ym = maps(coords - step)
        jx[:, j] = (xp - xm) / (2 * delta)
        jy[:, j] = (yp - ym) / (2 * delta)
    return jy @ np.linalg.inv(jx)
