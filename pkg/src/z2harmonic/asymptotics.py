"""Far-field quadric coefficients of the branched harmonic function and the
numerical inversion of the coefficient map.

For arbitrary positive semi-axes h (equal values allowed here; the
integrals stay regular) and S(y) = prod_j (y + h_j^2):

    a_i = (prod_j h_j / 2) int_0^inf du / ((u^2 + h_i^2) sqrt(S(u^2))),  i < n,
    a_n = -sum_{i<n} a_i
        = -(prod_j h_j / 2) int_0^inf S'(u^2)/S(u^2)^{3/2} du   (consistency route),
    a_0 = (prod_j h_j / 2) int_0^inf du / sqrt(S(u^2)),

so the far field is a_0 - sum_i a_i x_i^2 + O(|x|^{2-n}).  The map
(1/h_1, ..., 1/h_{n-1}) -> (a_1, ..., a_{n-1}) is homogeneous of degree 1,
equivalently a_i(s h) = a_i(h)/s and a_0(s h) = s a_0(h); inversion solves
for the direction with damped Newton on log h and fixes the scale exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericFailure, PreconditionError
from .numerics import (DEFAULT_ABS_TOL, DEFAULT_REL_TOL, integrate_semi_infinite)
from .report import VerificationReport


def _as_axes(h):
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size < 2:
        raise PreconditionError("need at least two semi-axes")
    if not np.all(h > 0):
        raise PreconditionError("semi-axes must be positive")
    return h


def _S(h2, y):
    out = np.ones_like(y)
    for v in h2:
        out = out * (y + v)
    return out


@dataclass(frozen=True)
class QuadricAsymptote:
    """Far-field data: constant term a0 and quadric coefficients a_1..a_n.

    a[:-1] > 0, a[-1] < 0, and a[-1] is reported from the trace-free
    relation; `an_integral` is the independent S'-integral route kept for
    consistency checking.
    """

    a0: float
    a: np.ndarray
    an_integral: float


def coefficients(h, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Quadric asymptote coefficients for arbitrary positive axes."""
    h = _as_axes(h)
    h2 = h * h
    pref = float(np.prod(h)) / 2.0
    n = h.size + 1
    a = np.empty(n)
    for i in range(n - 1):
        a[i] = pref * integrate_semi_infinite(
            lambda u: 1.0 / ((u * u + h2[i]) * np.sqrt(_S(h2, u * u))),
            rel_tol=rel_tol, abs_tol=abs_tol).value
    a[-1] = -a[:-1].sum()

    def sprime_kernel(u):
        u2 = u * u
        s = _S(h2, u2)
        sp = np.zeros_like(u2)
        for i in range(n - 1):
            term = np.ones_like(u2)
            for j in range(n - 1):
                if j != i:
                    term = term * (u2 + h2[j])
            sp = sp + term
        return sp / s ** 1.5

    an_int = -pref * integrate_semi_infinite(sprime_kernel,
                                             rel_tol=rel_tol, abs_tol=abs_tol).value
    a0 = pref * integrate_semi_infinite(
        lambda u: 1.0 / np.sqrt(_S(h2, u * u)),
        rel_tol=rel_tol, abs_tol=abs_tol).value
    return QuadricAsymptote(a0=a0, a=a, an_integral=an_int)


def scaling_check(h, s, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Verify a_i(s h) = a_i(h)/s and a_0(s h) = s a_0(h)."""
    if s <= 0:
        raise PreconditionError("scale must be positive")
    h = _as_axes(h)
    base = coefficients(h, rel_tol=rel_tol, abs_tol=abs_tol)
    scaled = coefficients(s * h, rel_tol=rel_tol, abs_tol=abs_tol)
    err_a = float(np.max(np.abs(scaled.a - base.a / s) / np.abs(base.a / s)))
    err_a0 = abs(scaled.a0 - s * base.a0) / abs(s * base.a0)
    passed = err_a <= 1e-10 and err_a0 <= 1e-10
    return VerificationReport(
        name="scaling_laws",
        passed=passed,
        metrics={"max_quadric_rel_error": err_a, "constant_rel_error": float(err_a0),
                 "scale": float(s)},
        tables={"a_base": base.a, "a_scaled": scaled.a,
                "a0_base": base.a0, "a0_scaled": scaled.a0},
    )


def phi_gradient_check(h, delta_scale=1e-3, rel_tol=DEFAULT_REL_TOL,
                       abs_tol=DEFAULT_ABS_TOL):
    """Differentiation-under-the-integral identity for Phi = a0 / prod h.

    Checks dPhi/dh_i = -(h_i / prod_j h_j) a_i against Richardson central
    differences of Phi(h) = (1/2) int_0^inf du / sqrt(S(u^2)).
    """
    h = _as_axes(h)

    def phi(hh):
        h2 = hh * hh
        return 0.5 * integrate_semi_infinite(
            lambda u: 1.0 / np.sqrt(_S(h2, u * u)),
            rel_tol=rel_tol, abs_tol=abs_tol).value

    asym = coefficients(h, rel_tol=rel_tol, abs_tol=abs_tol)
    closed = -(h / np.prod(h)) * asym.a[:-1]
    fd = np.empty(h.size)
    for i in range(h.size):
        d = delta_scale * h[i]

        def along(step):
            hh = h.copy()
            hh[i] += step
            return phi(hh)

        g1 = (along(d) - along(-d)) / (2 * d)
        g2 = (along(d / 2) - along(-d / 2)) / d
        fd[i] = (4.0 * g2 - g1) / 3.0
    err = float(np.max(np.abs(fd - closed) / np.maximum(np.abs(closed), 1e-300)))
    return VerificationReport(
        name="phi_gradient_identity",
        passed=err <= 1e-8,
        metrics={"max_rel_error": err},
        tables={"fd_gradient": fd, "closed_form": closed},
    )


@dataclass(frozen=True)
class InversionResult:
    h: np.ndarray
    scale: float
    iterations: int
    residual: float


def invert(target_a, c0=None, tol=1e-10, max_iter=60, initial=None,
           rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Find axes whose quadric coefficients match target_a (componentwise
    relative tolerance `tol`), via damped Newton with a finite-difference
    Jacobian in log h.

    Degree -1 homogeneity in h pre-scales the initial guess; when the
    constant term c0 is given, the exact scale step s = sqrt(c0/a0(h))
    rescales the solution so that s * f_{s h} has constant term c0 and the
    same quadric.  Raises NumericFailure carrying the best iterate on
    non-convergence.
    """
    target = np.asarray(target_a, dtype=float)
    if target.ndim != 1 or target.size < 2 or not np.all(target > 0):
        raise PreconditionError("targets must be at least two strictly positive values")
    if c0 is not None and c0 <= 0:
        raise PreconditionError("constant term must be positive")
    m = target.size

    def residual(log_h):
        asym = coefficients(np.exp(log_h), rel_tol=rel_tol, abs_tol=abs_tol)
        return asym.a[:m] / target - 1.0

    if initial is None:
        # equal-axes closed form: a_i(c, .., c) = I_n / (2 c) with
        # I_n = int_0^inf (1 + v^2)^(-(n+1)/2) dv
        i_n = integrate_semi_infinite(lambda v: (1 + v * v) ** (-(m + 2) / 2),
                                      rel_tol=1e-10, abs_tol=1e-12).value
        gm_t = float(np.exp(np.mean(np.log(target))))
        c = i_n / (2.0 * gm_t)
        direction = 1.0 / target
        direction /= np.exp(np.mean(np.log(direction)))
        initial = c * direction
    log_h = np.log(np.asarray(initial, dtype=float))
    r = residual(log_h)
    best = (np.linalg.norm(r, np.inf), log_h.copy())
    iterations = 0
    fd_step = 1e-6
    while np.linalg.norm(r, np.inf) > tol and iterations < max_iter:
        iterations += 1
        jac = np.empty((m, m))
        for j in range(m):
            probe = log_h.copy()
            probe[j] += fd_step
            jac[:, j] = (residual(probe) - r) / fd_step
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            raise NumericFailure("singular Jacobian in coefficient inversion",
                                 best_value=np.exp(best[1]), best_error=best[0])
        lam = 1.0
        norm0 = np.linalg.norm(r, np.inf)
        while lam >= 2.0 ** -20:
            r_try = residual(log_h + lam * step)
            if np.linalg.norm(r_try, np.inf) < norm0:
                log_h = log_h + lam * step
                r = r_try
                break
            lam *= 0.5
        else:
            break  # no descent; report best iterate below
        if np.linalg.norm(r, np.inf) < best[0]:
            best = (np.linalg.norm(r, np.inf), log_h.copy())
    res_norm = float(np.linalg.norm(r, np.inf))
    h_dir = np.exp(log_h)
    if res_norm > tol:
        raise NumericFailure(
            f"inversion stalled at residual {best[0]:.3e} after {iterations} iterations",
            best_value=np.exp(best[1]), best_error=best[0])
    if c0 is None:
        return InversionResult(h=h_dir, scale=1.0, iterations=iterations,
                               residual=res_norm)
    a0 = coefficients(h_dir, rel_tol=rel_tol, abs_tol=abs_tol).a0
    s = float(np.sqrt(c0 / a0))
    return InversionResult(h=s * h_dir, scale=s, iterations=iterations,
                           residual=res_norm)
