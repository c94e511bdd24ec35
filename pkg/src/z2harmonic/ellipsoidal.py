"""Modified ellipsoidal coordinates on the double cover of R^n branched
along the codimension-2 ellipsoid  E_h : sum_i x_i^2/h_i^2 = 1, x_n = 0.

Conventions (n >= 3, semi-axes h_1 > ... > h_{n-1} > 0):

  * coordinates mu = (mu_1, ..., mu_n) interlace the axes through their
    squares:  -mu_n^2 <= 0 <= mu_{n-1}^2 <= h_{n-1}^2 <= ... <= mu_1^2 <= h_1^2,
    with mu_1..mu_{n-2} >= 0 and mu_{n-1}, mu_n signed;
  * S(y) = prod_j (y + h_j^2);
  * forward map:
        x_i^2 = (h_i^2 + mu_n^2) prod_{j<n} (h_i^2 - mu_j^2)
                / (h_i^2 prod_{j != i} (h_i^2 - h_j^2)),     i < n,
        x_n^2 = prod_j mu_j^2 / prod_j h_j^2,
    with sign(x_n) = sign(mu_{n-1} mu_n) and the signs of x_1..x_{n-1}
    carried separately;
  * the involution (mu_{n-1}, mu_n) -> (-mu_{n-1}, -mu_n) fixes the
    Cartesian image and swaps the two sheets; sheet "+" means mu_n > 0,
    or mu_n == 0 and mu_{n-1} > 0.

The inverse map uses the fact that {mu_1^2, ..., mu_{n-1}^2, -mu_n^2} is
exactly the spectrum of the symmetric matrix diag(h_1^2,..,h_{n-1}^2, 0)
- x x^T (rank-one form of the confocal equation), which is found by a
backward-stable symmetric eigensolve.  This handles the degenerate
configurations x_i = 0, where roots sit on the interlacing-cell
boundaries, without any endpoint case analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchProximityError, NumericFailure, PreconditionError
from .numerics import find_root_bracketed
from .report import VerificationReport

MIN_RELATIVE_GAP = 1e-9
BRANCH_TOL_FACTOR = 1e-16  # flags mu_n^2 + mu_{n-1}^2 < factor * h_1^2


def elementary_symmetric(values):
    """All elementary symmetric polynomials e_0..e_m of the given values."""
    vals = np.asarray(values, dtype=float)
    e = np.zeros(vals.size + 1)
    e[0] = 1.0
    for v in vals:
        e[1:] += v * e[:-1]
    return e


def elementary_symmetric_omit(values, i):
    """e_0..e_{m-1} of the values with index i removed."""
    vals = np.asarray(values, dtype=float)
    return elementary_symmetric(np.delete(vals, i))


@dataclass(frozen=True)
class HalfAxes:
    """Semi-axes h_1 > h_2 > ... > h_{n-1} > 0 of the branching ellipsoid.

    Strictly decreasing with relative gaps >= 1e-9; coordinate work
    degenerates for (near-)equal axes, so callers must perturb.  The
    far-field coefficient integrals (asymptotics module) accept arbitrary
    positive axes and do not go through this type.
    """

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        object.__setattr__(self, "h", h)
        if h.ndim != 1 or h.size < 2:
            raise PreconditionError("need at least two semi-axes (ambient dimension >= 3)")
        if not np.all(h > 0):
            raise PreconditionError("semi-axes must be positive")
        gaps = (h[:-1] - h[1:]) / h[0]
        if not np.all(gaps >= MIN_RELATIVE_GAP):
            raise PreconditionError(
                f"semi-axes must be strictly decreasing with relative gaps >= {MIN_RELATIVE_GAP}")

    @property
    def n(self):
        """Ambient dimension."""
        return self.h.size + 1

    @property
    def h2(self):
        return self.h * self.h

    @property
    def prod_h(self):
        return float(np.prod(self.h))

    def S(self, y):
        """S(y) = prod_j (y + h_j^2), vectorized in y."""
        y = np.asarray(y, dtype=float)
        out = np.ones_like(y)
        for h2j in self.h2:
            out = out * (y + h2j)
        return out

    def S_prime(self, y):
        """S'(y) = sum_i prod_{j != i} (y + h_j^2)."""
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        for i in range(self.h.size):
            term = np.ones_like(y)
            for j, h2j in enumerate(self.h2):
                if j != i:
                    term = term * (y + h2j)
            out = out + term
        return out

    def S_coefficients(self):
        """Ascending coefficients c_k of S(y) = sum_k c_k y^k; c_k = sigma_{n-1-k}(h^2)."""
        sig = elementary_symmetric(self.h2)
        return sig[::-1].copy()

    def sigma(self, k):
        """k-th elementary symmetric polynomial of the squared axes."""
        return float(elementary_symmetric(self.h2)[k])

    def branch_tolerance(self):
        return BRANCH_TOL_FACTOR * float(self.h2[0])


@dataclass(frozen=True)
class FocalRoots:
    """The n-1 positive roots p_1 > ... > p_{n-1} of S(-y) - y S'(-y) = 0.

    They interlace the squared axes as
    0 < p_{n-1} < h_{n-1}^2 < p_{n-2} < ... < h_2^2 < p_1 < h_1^2
    and satisfy d/dy (y S(y)) = n prod_l (y + p_l) coefficient-wise.
    """

    p: np.ndarray


def focal_polynomial(axes, y):
    """T(y) = S(-y) - y S'(-y), evaluated stably from products."""
    y = np.asarray(y, dtype=float)
    s = np.ones_like(y)
    for h2j in axes.h2:
        s = s * (h2j - y)
    sp = np.zeros_like(y)
    for i in range(axes.h.size):
        term = np.ones_like(y)
        for j, h2j in enumerate(axes.h2):
            if j != i:
                term = term * (h2j - y)
        sp = sp + term
    return s - y * sp


def focal_roots(axes):
    """Isolate the focal roots by bisection in their interlacing brackets."""
    h2 = axes.h2
    m = h2.size
    brackets = [(h2[k + 1], h2[k]) for k in range(m - 1)] + [(0.0, h2[m - 1])]
    roots = np.empty(m)
    for k, (lo, hi) in enumerate(brackets):
        tlo = float(focal_polynomial(axes, lo))
        thi = float(focal_polynomial(axes, hi))
        if tlo == 0.0 or thi == 0.0 or (tlo > 0) == (thi > 0):
            raise NumericFailure(
                f"focal bracket ({lo}, {hi}) lost its sign change; axes too degenerate")
        roots[k] = find_root_bracketed(lambda y: focal_polynomial(axes, y), lo, hi,
                                       tol=1e-15)
    return FocalRoots(p=roots)


def focal_coefficient_residual(axes, roots):
    """Max relative coefficient error of d/dy (y S(y)) = n prod_l (y + p_l)."""
    c = axes.S_coefficients()
    lhs = (np.arange(c.size) + 1.0) * c          # coefficients of d/dy(y S)
    rhs = axes.n * elementary_symmetric(roots.p)[::-1]
    return float(np.max(np.abs(lhs - rhs) / np.abs(lhs)))


@dataclass(frozen=True)
class SheetPoint:
    """A point on the branched double cover.

    mu[-2] and mu[-1] are the signed pair (mu_{n-1}, mu_n); the leading
    entries are nonnegative.  `signs` are the signs of x_1..x_{n-1}.
    """

    mu: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.asarray(self.mu, dtype=float))
        object.__setattr__(self, "signs", np.asarray(self.signs, dtype=float))

    @property
    def sheet(self):
        mun = self.mu[-1]
        if mun > 0 or (mun == 0 and self.mu[-2] > 0):
            return "+"
        if mun < 0 or (mun == 0 and self.mu[-2] < 0):
            return "-"
        return "branch"

    def involution(self):
        mu = self.mu.copy()
        mu[-2] = -mu[-2]
        mu[-1] = -mu[-1]
        return SheetPoint(mu=mu, signs=self.signs.copy())


def validate_sheet_point(axes, sp, tol=1e-12):
    """Check the interlacing inequalities (with a small relative slack)."""
    mu = sp.mu
    h = axes.h
    n = axes.n
    if mu.size != n or sp.signs.size != n - 1:
        raise PreconditionError("SheetPoint arrays have the wrong length")
    slack = tol * h[0]
    for j in range(n - 2):
        if not (h[j + 1] - slack <= mu[j] <= h[j] + slack):
            raise PreconditionError(
                f"mu_{j + 1} = {mu[j]} violates interlacing [{h[j + 1]}, {h[j]}]")
    if abs(mu[-2]) > h[-1] + slack:
        raise PreconditionError(f"|mu_(n-1)| = {abs(mu[-2])} exceeds h_(n-1) = {h[-1]}")
    if not np.all(np.abs(sp.signs) == 1.0):
        raise PreconditionError("sign flags must be +-1")


def to_cartesian(axes, sp):
    """Forward coordinate map; verifies nonnegativity before square roots."""
    validate_sheet_point(axes, sp)
    h2 = axes.h2
    n = axes.n
    mu = sp.mu
    mu2 = mu * mu
    mun2 = mu2[-1]
    x = np.empty(n)
    scale = float(h2[0]) ** (n - 1)
    for i in range(n - 1):
        num = (h2[i] + mun2) * np.prod(h2[i] - mu2[:-1])
        den = h2[i] * np.prod(h2[i] - np.delete(h2, i))
        xi2 = num / den
        if xi2 < -1e-12 * scale:
            raise PreconditionError(f"squared coordinate x_{i + 1}^2 = {xi2} is negative")
        x[i] = sp.signs[i] * np.sqrt(max(xi2, 0.0))
    xn2 = float(np.prod(mu2) / np.prod(h2))
    x[-1] = np.sign(mu[-2] * mu[-1]) * np.sqrt(max(xn2, 0.0))
    return x


def sigma_mu_from_cartesian(axes, x):
    """sigma_1..sigma_n of {mu_1^2, .., mu_{n-1}^2, -mu_n^2} as affine
    combinations of the squared coordinates."""
    x = np.asarray(x, dtype=float)
    n = axes.n
    h2 = axes.h2
    sig_h = elementary_symmetric(h2)
    sig_mu = np.empty(n + 1)
    sig_mu[0] = 1.0
    xn2 = x[-1] ** 2
    for k in range(1, n):
        acc = sig_h[k] - sig_h[k - 1] * xn2
        for i in range(n - 1):
            acc -= elementary_symmetric_omit(h2, i)[k - 1] * x[i] ** 2
        sig_mu[k] = acc
    sig_mu[n] = -sig_h[n - 1] * xn2
    return sig_mu[1:]


def confocal_spectrum(axes, x):
    """Ascending eigenvalues of diag(h^2, 0) - x x^T.

    These are (-mu_n^2, mu_{n-1}^2, ..., mu_1^2): the root multiset of the
    degree-n monic polynomial with coefficients sigma_k(mu)."""
    x = np.asarray(x, dtype=float)
    if x.size != axes.n or not np.all(np.isfinite(x)):
        raise PreconditionError("point must be a finite vector of the ambient dimension")
    d = np.concatenate([axes.h2, [0.0]])
    return np.linalg.eigvalsh(np.diag(d) - np.outer(x, x))


def from_cartesian(axes, x, sheet="+", branch_tol=None):
    """Inverse coordinate map onto the requested sheet.

    Raises BranchProximityError when mu_n^2 + mu_{n-1}^2 falls below the
    branch tolerance (default 1e-16 * h_1^2).  Points with some x_i = 0
    (roots colliding with interlacing-cell endpoints) are handled exactly
    by the eigenvalue route.
    """
    if sheet not in ("+", "-"):
        raise PreconditionError(f"sheet must be '+' or '-', got {sheet!r}")
    x = np.asarray(x, dtype=float)
    if branch_tol is None:
        branch_tol = axes.branch_tolerance()
    n = axes.n
    h2 = axes.h2
    ev = confocal_spectrum(axes, x)
    mun2 = max(0.0, -float(ev[0]))
    mu2 = ev[1:][::-1].copy()          # descending: mu_1^2 >= ... >= mu_{n-1}^2
    # clip eigenvalue roundoff into the closed interlacing cells
    cells_hi = h2
    cells_lo = np.concatenate([h2[1:], [0.0]])
    mu2 = np.minimum(np.maximum(mu2, cells_lo), cells_hi)
    if mun2 + mu2[-1] < branch_tol:
        raise BranchProximityError(
            f"point {x.tolist()} is within branch tolerance of the branching ellipsoid")
    mu = np.empty(n)
    mu[:-1] = np.sqrt(mu2)
    mu[-1] = np.sqrt(mun2)
    signs = np.where(x[:-1] >= 0, 1.0, -1.0)
    want_plus = sheet == "+"
    xn = x[-1]
    if xn < 0:
        # sign(x_n) = sign(mu_{n-1} mu_n) forces opposite signs in the pair
        pair = (-mu[-2], mu[-1]) if want_plus else (mu[-2], -mu[-1])
    else:
        # covers x_n > 0 and the x_n = 0 slice, where one entry vanishes
        pair = (mu[-2], mu[-1]) if want_plus else (-mu[-2], -mu[-1])
    mu[-2], mu[-1] = pair
    return SheetPoint(mu=mu, signs=signs)


def branch_coordinate(axes, sp):
    """Complex normal coordinate z and its half power z^(1/2).

    z      = (prod_{j<=n-2} mu_j / (2 prod_i h_i)) (mu_n^2 - mu_{n-1}^2 + 2i mu_{n-1} mu_n)
    z^(1/2) = (prod_{j<=n-2} sqrt(mu_j) / (sqrt(2) prod_i sqrt(h_i))) (mu_n + i mu_{n-1})
    """
    mu = sp.mu
    lead = float(np.prod(mu[:-2]))
    z = lead / (2.0 * axes.prod_h) * complex(mu[-1] ** 2 - mu[-2] ** 2,
                                             2.0 * mu[-2] * mu[-1])
    zhalf = (np.sqrt(lead) / np.sqrt(2.0 * axes.prod_h)) * complex(mu[-1], mu[-2])
    return z, zhalf


def sym_identity_check(y, k, l):
    """sum_i (-1)^(m-1-k) y_i^l sigma_{i,m-1-k}(y) / prod_{j!=i}(y_i - y_j).

    For m distinct values this equals the Kronecker delta delta_{lk}
    (inverse-Vandermonde row identity); returned so tests can measure the
    floating-point departure from it.
    """
    y = np.asarray(y, dtype=float)
    m = y.size
    if np.unique(y).size != m:
        raise PreconditionError("entries must be distinct")
    if not (0 <= k <= m - 1 and 0 <= l <= m - 1):
        raise PreconditionError("indices must lie in [0, m-1]")
    total = 0.0
    for i in range(m):
        sig = elementary_symmetric_omit(y, i)[m - 1 - k]
        denom = np.prod(y[i] - np.delete(y, i))
        total += (-1.0) ** (m - 1 - k) * y[i] ** l * sig / denom
    return float(total)


def metric_diagonal(axes, sp):
    """Closed-form diagonal metric coefficients (g_11, ..., g_nn) in mu."""
    mu2 = sp.mu ** 2
    h2 = axes.h2
    n = axes.n
    g = np.empty(n)
    mun2 = mu2[-1]
    for i in range(n - 1):
        num = (mun2 + mu2[i]) * np.prod(np.delete(mu2[:-1], i) - mu2[i])
        den = np.prod(h2 - mu2[i])
        g[i] = num / den
    g[-1] = np.prod(mu2[:-1] + mun2) / np.prod(h2 + mun2)
    return g


def metric_orthogonality_report(axes, sp, delta=None):
    """Compare the finite-difference Jacobian of the forward map with the
    closed-form orthogonal metric.

    Reports the largest normalized off-diagonal inner product of the
    coordinate tangent vectors and the largest relative error of the
    diagonal coefficients.  Requires strict interlacing with enough margin
    for the central-difference step.
    """
    n = axes.n
    mu = sp.mu
    h = axes.h
    if delta is None:
        delta = 1e-6 * h[0]
    # margins to the interlacing boundaries, per coordinate
    lo = np.concatenate([h[1:], [-h[-1]], [-np.inf]])
    hi = np.concatenate([h[:-1], [h[-1]], [np.inf]])
    margin = np.minimum(mu - lo, hi - mu)
    if np.any(margin < 4 * delta):
        raise PreconditionError("point too close to an interlacing boundary for the FD step")
    cols = []
    for j in range(n):
        mup = mu.copy()
        mum = mu.copy()
        mup[j] += delta
        mum[j] -= delta
        xp = to_cartesian(axes, SheetPoint(mu=mup, signs=sp.signs))
        xm = to_cartesian(axes, SheetPoint(mu=mum, signs=sp.signs))
        cols.append((xp - xm) / (2 * delta))
    jac = np.column_stack(cols)
    gram = jac.T @ jac
    diag = np.diag(gram)
    off = gram - np.diag(diag)
    denom = np.sqrt(np.outer(diag, diag))
    max_off = float(np.max(np.abs(off) / denom))
    closed = metric_diagonal(axes, sp)
    max_diag_err = float(np.max(np.abs(diag - closed) / np.abs(closed)))
    passed = max_off <= 1e-6 and max_diag_err <= 1e-6
    return VerificationReport(
        name="metric_orthogonality",
        passed=passed,
        metrics={"max_offdiagonal": max_off, "max_diagonal_rel_error": max_diag_err,
                 "fd_step": delta},
        tables={"fd_diagonal": diag, "closed_form_diagonal": closed},
    )
