"""Assembly and evaluation of the two-valued harmonic function attached to
a branching ellipsoid with semi-axes h.

With S(y) = prod_j (y + h_j^2) and focal roots p_1 > ... > p_{n-1}, the
separated building blocks are

    f_0(mu_n)   = int_0^{mu_n} du / sqrt(S(u^2)),
    f_{2,i}(mu) = (mu_n^2 + p_i) int_0^{mu_n} du / ((u^2 + p_i)^2 sqrt(S(u^2)))
                  * prod_{j=1}^{n-1} (mu_j^2 - p_i),

both odd under the sheet involution, and the normalized combination

    f = (prod_j h_j / n) * ( f_0 + (-1)^(n-2) sum_i f_{2,i} / prod_{j!=i}(p_i - p_j) ).

Near the branching set f = Re(B z^{3/2}) + O(|z|^{5/2}) with

    B = -(2^{3/2}/3) prod_{j<=n-2} sqrt(mu_j) / prod_j sqrt(h_j) < 0,

and on a single-valued far-field branch f = a_0 - sum a_i x_i^2 + O(|x|^{2-n}).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import ellipsoidal as ell
from .errors import ContinuationError, PreconditionError
from .numerics import (DEFAULT_ABS_TOL, DEFAULT_REL_TOL, fd_gradient,
                       fd_gradient_richardson, fd_laplacian, integrate_finite,
                       integrate_semi_infinite)
from .report import VerificationReport


@dataclass(frozen=True)
class HarmonicFamily:
    """Immutable evaluation context: axes, focal roots, combination weights."""

    axes: ell.HalfAxes
    roots: ell.FocalRoots
    denom: np.ndarray       # prod_{j != i} (p_i - p_j)
    norm: float             # prod_j h_j / n = sqrt(sigma_{n-1}(h)) / n
    sign: float             # (-1)^(n-2)

    @property
    def n(self):
        return self.axes.n


@dataclass(frozen=True)
class BranchExpansion:
    """Leading cube-root-squared coefficient at a branch point."""

    B: float
    zhalf_frame: complex    # prefactor of (mu_n + i mu_{n-1}) in z^(1/2)


def harmonic_family(axes):
    if not isinstance(axes, ell.HalfAxes):
        axes = ell.HalfAxes(h=axes)
    roots = ell.focal_roots(axes)
    p = roots.p
    denom = np.array([np.prod(p[i] - np.delete(p, i)) for i in range(p.size)])
    if np.any(denom == 0):
        raise PreconditionError("focal roots failed to separate; axes too degenerate")
    return HarmonicFamily(axes=axes, roots=roots, denom=denom,
                          norm=axes.prod_h / axes.n,
                          sign=(-1.0) ** (axes.n - 2))


def f0(axes, mu_n, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Odd bounded kernel int_0^{mu_n} du/sqrt(S(u^2))."""
    if mu_n == 0.0:
        return 0.0
    res = integrate_finite(lambda u: 1.0 / np.sqrt(axes.S(u * u)),
                           0.0, abs(mu_n), rel_tol=rel_tol, abs_tol=abs_tol)
    return float(np.sign(mu_n)) * res.value


def f0_limit(axes, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Supremum of f0: the full half-line integral."""
    return integrate_semi_infinite(lambda u: 1.0 / np.sqrt(axes.S(u * u)),
                                   rel_tol=rel_tol, abs_tol=abs_tol).value


def f2_radial(fam, i, mu_n, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """The mu_n-dependent factor (mu_n^2 + p_i) int_0^{mu_n} du/((u^2+p_i)^2 sqrt(S))."""
    if mu_n == 0.0:
        return 0.0
    p = fam.roots.p[i]
    axes = fam.axes

    def g(u):
        u2 = u * u
        return 1.0 / ((u2 + p) ** 2 * np.sqrt(axes.S(u2)))

    res = integrate_finite(g, 0.0, abs(mu_n), rel_tol=rel_tol, abs_tol=abs_tol)
    return (mu_n * mu_n + p) * float(np.sign(mu_n)) * res.value


def f2_radial_limit(fam, i, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Half-line value of the inner integral alone (used for far-field checks)."""
    p = fam.roots.p[i]
    axes = fam.axes
    return integrate_semi_infinite(
        lambda u: 1.0 / ((u * u + p) ** 2 * np.sqrt(axes.S(u * u))),
        rel_tol=rel_tol, abs_tol=abs_tol).value


def f2i(fam, i, sp, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Quadratically-growing odd harmonic block f_{2,i}."""
    mu2 = sp.mu[:-1] ** 2
    factor = float(np.prod(mu2 - fam.roots.p[i]))
    return f2_radial(fam, i, sp.mu[-1], rel_tol=rel_tol, abs_tol=abs_tol) * factor


class InnerIntegralTable:
    """Optional speed path: the inner integrals of every block tabulated on
    a geometric grid with cumulative panels.

    The default evaluation path recomputes every integral adaptively, which
    keeps results bit-reproducible for fixed tolerances; interpolation from
    this table is an explicit opt-in and is accurate to roughly the grid
    resolution to the fourth power (cubic interpolation on a smooth odd
    integrand).
    """

    def __init__(self, fam, mu_max, points=256, rel_tol=DEFAULT_REL_TOL,
                 abs_tol=DEFAULT_ABS_TOL):
        if mu_max <= 0 or points < 16:
            raise PreconditionError("need mu_max > 0 and at least 16 grid points")
        self.fam = fam
        grid = np.geomspace(mu_max / points ** 2, mu_max, points)
        self.grid = np.concatenate([[0.0], grid])
        m = fam.roots.p.size
        self.tables = np.zeros((m, self.grid.size))
        self.slopes = np.zeros((m, self.grid.size))
        axes = fam.axes
        for i in range(m):
            p = fam.roots.p[i]

            def g(u, p=p):
                u2 = u * u
                return 1.0 / ((u2 + p) ** 2 * np.sqrt(axes.S(u2)))

            acc = 0.0
            for k in range(1, self.grid.size):
                acc += integrate_finite(g, self.grid[k - 1], self.grid[k],
                                        rel_tol=rel_tol, abs_tol=abs_tol).value
                self.tables[i, k] = acc
            self.slopes[i] = g(self.grid)

    def inner(self, i, mu_n):
        """Interpolated int_0^{|mu_n|} du/((u^2+p_i)^2 sqrt(S)), sign applied.

        Cubic Hermite on each cell: node values from cumulative panels and
        exact node slopes from the closed-form integrand."""
        a = abs(mu_n)
        if a > self.grid[-1]:
            raise PreconditionError(f"|mu_n| = {a} exceeds the table range {self.grid[-1]}")
        k = int(np.searchsorted(self.grid, a, side="right") - 1)
        if k >= self.grid.size - 1:
            k = self.grid.size - 2
        h = self.grid[k + 1] - self.grid[k]
        t = (a - self.grid[k]) / h
        y0, y1 = self.tables[i, k], self.tables[i, k + 1]
        d0, d1 = self.slopes[i, k] * h, self.slopes[i, k + 1] * h
        t2, t3 = t * t, t * t * t
        val = ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0
               + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1)
        return float(np.sign(mu_n)) * float(val)

    def f2_radial(self, i, mu_n):
        p = self.fam.roots.p[i]
        return (mu_n * mu_n + p) * self.inner(i, mu_n)


def evaluate(fam, sp, rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Sheetwise value at a SheetPoint (pure mu-space route)."""
    mu_n = sp.mu[-1]
    if mu_n == 0.0:
        return 0.0  # the function vanishes on the cut disc
    acc = f0(fam.axes, mu_n, rel_tol=rel_tol, abs_tol=abs_tol)
    for i in range(fam.roots.p.size):
        acc += fam.sign * f2i(fam, i, sp, rel_tol=rel_tol, abs_tol=abs_tol) / fam.denom[i]
    return fam.norm * acc


def evaluate_at(fam, x, sheet="+", rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL,
                branch_tol=None):
    """Cartesian entry point; routes through the inverse coordinate map."""
    sp = ell.from_cartesian(fam.axes, x, sheet=sheet, branch_tol=branch_tol)
    return evaluate(fam, sp, rel_tol=rel_tol, abs_tol=abs_tol)


def _pair(sp):
    return np.array([sp.mu[-2], sp.mu[-1]])


def _evaluate_continued(fam, x, ref_pair, rel_tol, abs_tol):
    """Value at x on the sheet whose (mu_{n-1}, mu_n) pair is nearest ref_pair.

    This is the involution-aware stencil evaluation used by the gradient
    and Laplacian helpers: it follows the locally-continuous branch even
    when a finite-difference stencil straddles the cut disc.
    """
    sp = ell.from_cartesian(fam.axes, x, sheet="+")
    pair = _pair(sp)
    if np.linalg.norm(pair - ref_pair) <= np.linalg.norm(-pair - ref_pair):
        chosen = sp
    else:
        chosen = sp.involution()
    return evaluate(fam, chosen, rel_tol=rel_tol, abs_tol=abs_tol)


def gradient(fam, x, sheet="+", delta=1e-5, richardson=True,
             rel_tol=1e-13, abs_tol=1e-15):
    """Central-difference gradient on the sheet through x.

    Stencil values are continued from the center's involution
    representative, so stencils that cross the cut disc stay on the
    smooth branch of the double cover.
    """
    x = np.asarray(x, dtype=float)
    center = ell.from_cartesian(fam.axes, x, sheet=sheet)
    ref = _pair(center)

    def g(y):
        return _evaluate_continued(fam, y, ref, rel_tol, abs_tol)

    if richardson:
        return fd_gradient_richardson(g, x, delta)
    return fd_gradient(g, x, delta)


def branch_coefficient(fam, sp, tol=1e-12):
    """Leading expansion coefficient B at a branch-locus point (mu_n = mu_{n-1} = 0)."""
    mu = sp.mu
    scale = fam.axes.h[0]
    if abs(mu[-1]) > tol * scale or abs(mu[-2]) > tol * scale:
        raise PreconditionError("branch_coefficient requires mu_n = mu_{n-1} = 0")
    lead = float(np.prod(mu[:-2]))
    p_h = fam.axes.prod_h
    B = -(2.0 ** 1.5 / 3.0) * np.sqrt(lead) / np.sqrt(p_h)
    frame = complex(np.sqrt(lead) / np.sqrt(2.0 * p_h), 0.0)
    return BranchExpansion(B=float(B), zhalf_frame=frame)


def continue_along_path(fam, path, start_sheet="+",
                        rel_tol=DEFAULT_REL_TOL, abs_tol=DEFAULT_ABS_TOL):
    """Track the continuous branch along a polyline of Cartesian points.

    At each vertex the involution representative nearest (in the
    (mu_{n-1}, mu_n) plane) to the previous one is chosen; if the nearest
    and the mirrored candidate are nearly equidistant the continuation is
    ambiguous and a ContinuationError carrying the step index is raised.
    Returns a list of (value, sheet) pairs, one per vertex.
    """
    path = np.asarray(path, dtype=float)
    if path.ndim != 2 or path.shape[1] != fam.n:
        raise PreconditionError("path must be an (m, n) array of Cartesian points")
    out = []
    prev = None
    for k in range(path.shape[0]):
        sp = ell.from_cartesian(fam.axes, path[k], sheet="+")
        if prev is None:
            chosen = sp if sp.sheet == start_sheet else sp.involution()
        else:
            pair = _pair(sp)
            d_plus = np.linalg.norm(pair - prev)
            d_minus = np.linalg.norm(-pair - prev)
            if min(d_plus, d_minus) > 0.8 * max(d_plus, d_minus):
                raise ContinuationError(
                    f"ambiguous continuation at step {k}: candidate distances "
                    f"{d_plus:.3e} / {d_minus:.3e}", index=k)
            chosen = sp if d_plus <= d_minus else sp.involution()
        prev = _pair(chosen)
        out.append((evaluate(fam, chosen, rel_tol=rel_tol, abs_tol=abs_tol),
                    chosen.sheet))
    return out


def quadric_coefficients(fam, i):
    """The degree-2 ellipsoidal harmonic P_i = (mu_n^2+p_i) prod_j (mu_j^2-p_i)
    expressed as the Cartesian quadric C_0 + sum_j C_j x_j^2.

    Follows from P_i = (-1)^(n-1) W(p_i) with W the monic polynomial whose
    coefficients are the signed symmetric functions of the squared
    coordinates.
    """
    n = fam.n
    h2 = fam.axes.h2
    p = fam.roots.p[i]
    sig_h = ell.elementary_symmetric(h2)
    sgn = (-1.0) ** (n - 1)
    # constant part: W(p) with x = 0, i.e. sigma_k(mu) -> sigma_k(h), sigma_n -> 0
    c0 = p ** n
    for k in range(1, n):
        c0 += (-1.0) ** k * sig_h[k] * p ** (n - k)
    coeffs = np.empty(n)
    for j in range(n - 1):
        acc = 0.0
        sig_omit = ell.elementary_symmetric_omit(h2, j)
        for k in range(1, n):
            acc += (-1.0) ** k * (-sig_omit[k - 1]) * p ** (n - k)
        coeffs[j] = sgn * acc
    acc = 0.0
    for k in range(1, n):
        acc += (-1.0) ** k * (-sig_h[k - 1]) * p ** (n - k)
    acc += (-1.0) ** n * (-sig_h[n - 1])
    coeffs[n - 1] = sgn * acc
    return sgn * c0, coeffs


def q_polynomial(fam, i):
    """Ascending coefficients Q_0..Q_{n-2} of the separation polynomial for
    p_i, solved inductively from the quadratic-solution recurrence, plus
    the closure residual M_0 - p Q_0 (zero when p_i is a true focal root).
    """
    c = fam.axes.S_coefficients()
    n = fam.n
    M = np.array([2.0 * (-1.0) ** j * (j + 1) * c[j] for j in range(n)])
    p = fam.roots.p[i]
    Q = np.empty(n - 1)
    Q[n - 2] = -M[n - 1]
    for j in range(n - 2, 0, -1):
        Q[j - 1] = p * Q[j] - M[j]
    closure = M[0] - p * Q[0]
    return Q, float(closure)


def harmonicity_report(fam, r_inner, r_outer, count=20, seed=0, delta=1e-3,
                       rel_tol=1e-13, abs_tol=1e-15, branch_margin=0.05):
    """Finite-difference Laplacian residuals at seeded points of a shell.

    Points are drawn uniformly in direction with radius uniform in
    [r_inner, r_outer]; draws landing within `branch_margin * h_1` of the
    branching set (in the (mu_{n-1}, mu_n) distance proxy) are rejected so
    the stencil stays on a smooth branch.  Reports the max |Laplacian| at
    steps delta and delta/2, their ratio, and the Richardson value.
    """
    rng = np.random.default_rng(seed)
    n = fam.n
    h1 = fam.axes.h[0]
    guard = (branch_margin * h1) ** 2
    pts = []
    attempts = 0
    while len(pts) < count and attempts < 100 * count:
        attempts += 1
        direction = rng.normal(size=n)
        direction /= np.linalg.norm(direction)
        x = direction * rng.uniform(r_inner, r_outer)
        try:
            sp = ell.from_cartesian(fam.axes, x, sheet="+")
        except Exception:
            continue
        if sp.mu[-1] ** 2 + sp.mu[-2] ** 2 < guard:
            continue
        pts.append((x, sp))
    if len(pts) < count:
        raise PreconditionError("could not seed enough points away from the branch")

    res_d = np.empty(count)
    res_h = np.empty(count)
    for k, (x, sp) in enumerate(pts):
        ref = _pair(sp)

        def g(y):
            return _evaluate_continued(fam, y, ref, rel_tol, abs_tol)

        res_d[k] = fd_laplacian(g, x, delta)
        res_h[k] = fd_laplacian(g, x, 0.5 * delta)
    max_d = float(np.max(np.abs(res_d)))
    max_h = float(np.max(np.abs(res_h)))
    ratio = max_d / max_h if max_h > 0 else np.inf
    richardson = float(np.max(np.abs((4.0 * res_h - res_d) / 3.0)))
    return VerificationReport(
        name="harmonicity",
        passed=bool(ratio >= 3.5),
        metrics={"max_residual": max_d, "max_residual_half_step": max_h,
                 "ratio": ratio, "max_richardson_residual": richardson,
                 "observed_order": float(np.log2(ratio)) if max_h > 0 else np.inf,
                 "delta": delta},
        tables={"residual": res_d, "residual_half_step": res_h,
                "points": np.array([p[0] for p in pts])},
    )
