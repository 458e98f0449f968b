"""Scalar thresholds for mixed p-spin models.

Everything here is deterministic numerics on the mixture function xi:

* replica_fixed_point_map / beta_d: the dynamical threshold as the smallest
  inverse temperature at which F(q; beta) = E[cosh(aZ) tanh^2(aZ)] /
  E[cosh(aZ)], a = beta sqrt(xi'(q)), acquires a fixed point q in (0, 1].
  The Gaussian tilt by cosh(aZ) is absorbed by recentring: F equals
  E[tanh^2(a Y)] with Y ~ N(a, 1), which is what the quadrature evaluates.
* bar_beta_d / bar_beta_d_spherical: first-moment comparison thresholds
  inf_q 2 sqrt(xi'(1)) phi(h(q)) / (xi(1) - xi(q)) with h(q) the Gaussian
  quantile of (1+q)/2, and its spherical analogue with numerator
  sqrt(xi'(1)(1 - q^2)).
* large_p_constants: the large-p limit of the spherical comparison curve
  w(lam) = sqrt(2 lam) / (1 - e^{-lam}) after the substitution q = 1 - lam/p,
  plus the smallest level C whose sublevel interval [lam2, lam1] has
  lam1/lam2 >= 3.
* beta_d_spherical, beta_c_bounds, e_alg, u_dual: closed forms and one
  adaptive quadrature.
* ogp_band_pure_p: the overlap band (q_low, q_high) = (1 - delta/p,
  1 - p^{-(1+delta)}) built from the largest delta with
  v(delta) sqrt(1+delta) < 1 + eps', v(lam) = lam / (1 - e^{-lam}).

Infima follow one recipe: coarse grid scan (first/smallest argmin wins),
then golden-section refinement of the bracketing cell to width 1e-10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from .errors import AccuracyError, DomainError
from .mixture import MixtureSpec, xi

__all__ = [
    "ThresholdReport",
    "OgpBand",
    "OgpBandReport",
    "LargePConstants",
    "replica_fixed_point_map",
    "beta_d",
    "bar_beta_d",
    "bar_beta_d_spherical",
    "large_p_constants",
    "beta_d_spherical",
    "beta_c_bounds",
    "e_alg",
    "u_dual",
    "u_objective",
    "ogp_band_pure_p",
    "v_rate",
    "w_rate",
    "gauss_pdf",
    "half_quantile",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_QUAD_NODES = 201


def gauss_pdf(h):
    """Standard normal density."""
    return np.exp(-0.5 * np.asarray(h, dtype=np.float64) ** 2) / _SQRT_2PI


def half_quantile(q):
    """h(q) = Phi^{-1}((1+q)/2), evaluated as -Phi^{-1}((1-q)/2).

    The reflected form keeps full precision as q -> 1, where (1+q)/2 would
    round to 1.
    """
    return -ndtri((1.0 - np.asarray(q, dtype=np.float64)) / 2.0)


@lru_cache(maxsize=8)
def _gauss_hermite(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for E[f(Z)], Z ~ N(0,1): sum w_i f(z_i)."""
    z, w = hermegauss(n)
    return z, w / _SQRT_2PI


@dataclass
class ThresholdReport:
    """A computed scalar plus where/how it was found."""

    name: str
    value: float
    minimizer: float | None = None
    settings: dict = field(default_factory=dict)


@dataclass(frozen=True)
class LargePConstants:
    """Large-p spherical comparison constants.

    limit = inf_lam w(lam); attained at lambda_star.  level is the smallest
    value C of w whose sublevel set [lambda2, lambda1] spans a ratio
    lambda1/lambda2 >= 3.
    """

    limit: float
    lambda_star: float
    level: float
    lambda2: float
    lambda1: float


@dataclass(frozen=True)
class OgpBand:
    """Forbidden overlap window (q_low, q_high) with its metric radii.

    r = (1 - q_high)/2 and R = (1 - q_low)/2 convert the overlap window into
    normalized Hamming distances: overlap in (q_low, q_high) is distance in
    (r, R).  eps is the energy-band half-width the window was certified for
    (None for hand-built bands), delta the construction parameter, rate_c the
    exponential rate used by exceptional-set membership thresholds.
    """

    q_low: float
    q_high: float
    eps: float | None = None
    delta: float | None = None
    rate_c: float = 0.1

    def __post_init__(self) -> None:
        # q_low == q_high is allowed: a degenerate window that may be empty
        # at a given parity grid, useful for edge-case probes.
        if not (-1.0 <= self.q_low <= self.q_high <= 1.0):
            raise DomainError(
                f"need -1 <= q_low <= q_high <= 1, got ({self.q_low}, {self.q_high})"
            )
        if self.eps is not None and not self.eps > 0:
            raise DomainError(f"eps must be positive, got {self.eps}")
        if self.delta is not None and not self.delta > 0:
            raise DomainError(f"delta must be positive, got {self.delta}")
        if not self.rate_c > 0:
            raise DomainError(f"rate_c must be positive, got {self.rate_c}")

    @property
    def r(self) -> float:
        return (1.0 - self.q_high) / 2.0

    @property
    def R(self) -> float:
        return (1.0 - self.q_low) / 2.0

    @classmethod
    def from_radii(cls, r: float, R: float, **kw) -> "OgpBand":
        return cls(q_low=1.0 - 2.0 * R, q_high=1.0 - 2.0 * r, **kw)


def _golden_min(f, lo: float, hi: float, tol: float = 1e-10) -> float:
    """Golden-section minimum of a unimodal f on [lo, hi], to width tol."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _grid_then_golden(f, grid: np.ndarray, values: np.ndarray,
                      lo_cap: float, hi_cap: float, tol: float = 1e-10):
    """Refine the first grid argmin by golden section in its bracketing cell."""
    i = int(np.argmin(values))
    lo = grid[i - 1] if i > 0 else lo_cap
    hi = grid[i + 1] if i + 1 < len(grid) else hi_cap
    x = _golden_min(f, max(lo, lo_cap), min(hi, hi_cap), tol)
    return x, f(x)


def replica_fixed_point_map(spec: MixtureSpec, beta: float, q: float,
                            nodes: int = _QUAD_NODES) -> float:
    """F(q; beta) = E[cosh(aZ) tanh^2(aZ)] / E[cosh(aZ)], a = beta sqrt(xi'(q)).

    Evaluated in the tilted form E[tanh^2(a(a+Z))].  A second rule with fewer
    nodes cross-checks the result; on disagreement the integral is recomputed
    adaptively, and failure to converge raises AccuracyError.
    """
    if beta < 0:
        raise DomainError(f"beta must be >= 0, got {beta}")
    if not 0.0 <= q <= 1.0:
        raise DomainError(f"q must be in [0, 1], got {q}")
    a = beta * math.sqrt(xi(spec, q, 1))
    if a == 0.0:
        return 0.0
    value = _fp_tilted(a, nodes)
    check = _fp_tilted(a, max(nodes // 2, 60))
    if abs(value - check) > 1e-9:
        # tanh^2 transitions over width ~1/a near z = -a; split there so the
        # adaptive rule sees smooth pieces on both sides.
        def integrand(z):
            return math.tanh(a * (a + z)) ** 2 * math.exp(-0.5 * z * z) / _SQRT_2PI

        lo, e1 = quad(integrand, -np.inf, -a, epsabs=1e-13, epsrel=1e-13,
                      limit=300)
        hi, e2 = quad(integrand, -a, np.inf, epsabs=1e-13, epsrel=1e-13,
                      limit=300)
        err = e1 + e2
        if err > 1e-10:
            raise AccuracyError("fixed-point map quadrature did not converge", err)
        return lo + hi
    return value


def _fp_tilted(a, nodes: int = _QUAD_NODES):
    """E[tanh^2(a(a+Z))] for scalar or array a, by Gauss-Hermite."""
    z, w = _gauss_hermite(nodes)
    a = np.asarray(a, dtype=np.float64)
    t = np.tanh(a[..., None] * (a[..., None] + z))
    return np.squeeze((t * t) @ w)[()]


def _beta_d_qgrid() -> np.ndarray:
    # Linear grid plus a geometric tail toward q = 1 so fixed points at
    # 1 - q = O(1/p) are resolved for large p.
    lin = np.arange(1e-3, 1.0 + 1e-12, 1e-3)
    tail = 1.0 - np.geomspace(1e-7, 0.2, 400)
    grid = np.unique(np.concatenate([lin, tail]))
    return grid[(grid > 0.0) & (grid <= 1.0)]


def _has_fixed_point(spec: MixtureSpec, beta: float, grid: np.ndarray) -> bool:
    """Does F(.; beta) - id reach >= 0 somewhere on (0, 1]?

    Grid scan first; the best cell is then refined by golden section so a
    tangency between grid points still counts.
    """
    a = beta * np.sqrt(xi(spec, grid, 1))
    vals = _fp_tilted(a) - grid
    if np.any(vals >= 0.0):
        return True
    i = int(np.argmax(vals))
    lo = grid[i - 1] if i > 0 else grid[0] / 2.0
    hi = grid[i + 1] if i + 1 < len(grid) else 1.0
    spec_ = spec

    def neg_gap(q: float) -> float:
        aa = beta * math.sqrt(xi(spec_, q, 1))
        return -(float(_fp_tilted(np.array(aa))) - q)

    qstar = _golden_min(neg_gap, lo, hi, 1e-10)
    return -neg_gap(qstar) >= 0.0


def beta_d(spec: MixtureSpec, tol: float = 1e-8) -> ThresholdReport:
    """Dynamical threshold: smallest beta with a nontrivial fixed point.

    Bisection on [0, 2 sqrt(2 log 2)] of the fixed-point existence predicate.
    The reported minimizer is the smallest fixed point q* at beta_d + tol.
    """
    grid = _beta_d_qgrid()
    lo, hi = 0.0, 2.0 * math.sqrt(2.0 * math.log(2.0))
    if _has_fixed_point(spec, lo, grid):
        raise DomainError("fixed point already present at beta = 0")
    if not _has_fixed_point(spec, hi, grid):
        raise DomainError(f"no fixed point at upper bracket beta = {hi}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _has_fixed_point(spec, mid, grid):
            hi = mid
        else:
            lo = mid
    value = 0.5 * (lo + hi)

    beta_probe = value + tol
    a = beta_probe * np.sqrt(xi(spec, grid, 1))
    vals = _fp_tilted(a) - grid

    def gap(q: float) -> float:
        aa = beta_probe * math.sqrt(xi(spec, q, 1))
        return float(_fp_tilted(np.array(aa))) - q

    qstar = None
    nonneg = np.nonzero(vals >= 0.0)[0]
    if len(nonneg) > 0:
        j = int(nonneg[0])
        if j > 0:
            qstar = brentq(gap, grid[j - 1], grid[j], xtol=1e-12)
        else:
            # Map exceeds the identity already at the left edge of the grid;
            # the smallest fixed point is the first downward crossing.
            down = np.nonzero((vals[:-1] >= 0.0) & (vals[1:] < 0.0))[0]
            if len(down) > 0:
                k = int(down[0])
                qstar = brentq(gap, grid[k], grid[k + 1], xtol=1e-12)
            else:
                qstar = 1.0
    else:
        # Just above threshold the excursion above the identity can be much
        # narrower than the grid; refine the best cell as in the bisection.
        i = int(np.argmax(vals))
        lo_b = grid[i - 1] if i > 0 else grid[0] / 2.0
        hi_b = grid[i + 1] if i + 1 < len(grid) else 1.0
        qpeak = _golden_min(lambda q: -gap(q), lo_b, hi_b, 1e-12)
        if gap(qpeak) >= 0.0 and gap(lo_b) < 0.0:
            qstar = brentq(gap, lo_b, qpeak, xtol=1e-12)
    return ThresholdReport(
        name="beta_d",
        value=value,
        minimizer=qstar,
        settings={"tol": tol, "nodes": _QUAD_NODES, "bracket": (0.0, hi)},
    )


def _inf_objective(f_vec, f_scalar, name: str, settings: dict) -> ThresholdReport:
    grid = np.arange(1e-4, 1.0, 1e-4)
    values = f_vec(grid)
    qstar, val = _grid_then_golden(f_scalar, grid, values, 1e-13, 1.0 - 1e-13)
    settings = dict(settings, grid_step=1e-4, refine_width=1e-10)
    return ThresholdReport(name=name, value=val, minimizer=qstar, settings=settings)


def bar_beta_d(spec: MixtureSpec) -> ThresholdReport:
    """inf_q 2 sqrt(xi'(1)) phi(h(q)) / (xi(1) - xi(q)) over q in (0, 1)."""
    s = math.sqrt(xi(spec, 1.0, 1))
    xi1 = xi(spec, 1.0)

    def vec(q):
        return 2.0 * s * gauss_pdf(half_quantile(q)) / (xi1 - xi(spec, q))

    return _inf_objective(vec, lambda q: float(vec(np.asarray(q))), "bar_beta_d", {})


def bar_beta_d_spherical(spec: MixtureSpec) -> ThresholdReport:
    """inf_q sqrt(xi'(1)(1 - q^2)) / (xi(1) - xi(q)) over q in (0, 1)."""
    d1 = xi(spec, 1.0, 1)
    xi1 = xi(spec, 1.0)

    def vec(q):
        return np.sqrt(d1 * (1.0 - q * q)) / (xi1 - xi(spec, q))

    return _inf_objective(
        vec, lambda q: float(vec(np.asarray(q))), "bar_beta_d_spherical", {}
    )


def v_rate(lam):
    """v(lam) = lam / (1 - e^{-lam}); increasing, v(0+) = 1."""
    lam = np.asarray(lam, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = lam / -np.expm1(-lam)
    return np.where(lam == 0.0, 1.0, out)[()]


def w_rate(lam):
    """w(lam) = sqrt(2 lam) / (1 - e^{-lam}), the large-p comparison curve."""
    lam = np.asarray(lam, dtype=np.float64)
    return np.sqrt(2.0 * lam) / -np.expm1(-lam)


def large_p_constants() -> LargePConstants:
    """Minimum of w plus the smallest level with sublevel ratio >= 3."""
    grid = np.arange(1e-4, 20.0, 1e-4)
    lam_star, limit = _grid_then_golden(
        lambda x: float(w_rate(x)), grid, w_rate(grid), 1e-13, 25.0
    )

    def sublevel(v: float) -> tuple[float, float]:
        lam2 = brentq(lambda x: w_rate(x) - v, 1e-14, lam_star, xtol=1e-14)
        hi = lam_star
        while w_rate(2.0 * hi) <= v:
            hi *= 2.0
        lam1 = brentq(lambda x: w_rate(x) - v, lam_star, 2.0 * hi, xtol=1e-13)
        return lam2, lam1

    lo, hi = limit + 1e-9, 6.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        l2, l1 = sublevel(mid)
        if l1 / l2 >= 3.0:
            hi = mid
        else:
            lo = mid
    level = 0.5 * (lo + hi)
    lam2, lam1 = sublevel(level)
    return LargePConstants(
        limit=limit, lambda_star=lam_star, level=level, lambda2=lam2, lambda1=lam1
    )


def beta_d_spherical(p: int) -> float:
    """sqrt((p-1)^{p-1} / (p (p-2)^{p-2})) for the pure spherical model, p >= 3."""
    if not isinstance(p, (int, np.integer)) or p < 3:
        raise DomainError(f"p must be an integer >= 3, got {p}")
    logv = (p - 1) * math.log(p - 1) - math.log(p)
    if p > 3:
        logv -= (p - 2) * math.log(p - 2)
    return math.exp(0.5 * logv)


def beta_c_bounds(p: int) -> tuple[float, float]:
    """[(1 - 2^{-p}) sqrt(2 log 2), sqrt(2 log 2)] for the pure p-spin."""
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise DomainError(f"p must be an integer >= 2, got {p}")
    hi = math.sqrt(2.0 * math.log(2.0))
    return ((1.0 - 2.0 ** (-p)) * hi, hi)


def e_alg(spec: MixtureSpec, quad_tol: float = 1e-10) -> float:
    """Algorithmic energy density: integral of sqrt(xi''(x)) over [0, 1]."""
    val, err = quad(
        lambda x: math.sqrt(xi(spec, x, 2)), 0.0, 1.0,
        epsabs=quad_tol, epsrel=quad_tol, limit=200,
    )
    if err > 10.0 * max(quad_tol, quad_tol * abs(val)):
        raise AccuracyError("e_alg quadrature did not converge", err)
    return val


def u_objective(h: float, q: float) -> float:
    """u(h) - h q with u(h) = E|g + h| = h(2 Phi(h) - 1) + 2 phi(h)."""
    return h * (2.0 * ndtr(h) - 1.0) + 2.0 * float(gauss_pdf(h)) - h * q


def u_dual(q: float) -> tuple[float, float]:
    """Minimizer and minimum of u(h) - h q over h >= 0.

    Stationarity gives h* = Phi^{-1}((1+q)/2) and minimum 2 phi(h*).
    """
    if not 0.0 <= q < 1.0:
        raise DomainError(f"q must be in [0, 1), got {q}")
    h_star = float(half_quantile(q))
    return h_star, 2.0 * float(gauss_pdf(h_star))


@dataclass(frozen=True)
class OgpBandReport:
    """Band construction outcome for the pure p-spin at a given p."""

    p: int
    eps_prime: float
    delta: float
    q_low: float
    q_high: float
    beta_floor: float
    beta_ceiling: float
    eps: float
    feasible: bool
    reasons: tuple[str, ...]
    band: OgpBand | None


def ogp_band_pure_p(p: int, eps_prime: float, rate_c: float = 0.1) -> OgpBandReport:
    """Overlap band for the pure p-spin from the largest admissible delta.

    delta is the largest value with v(delta) sqrt(1 + delta) < 1 + eps'
    (bisection; the map is increasing from 1 at 0+).  The window is
    q_low = 1 - delta/p, q_high = 1 - p^{-(1+delta)}.  eps is half the
    smallest relative margin, over the window, of

        2 sqrt(xi'(1)) phi(h(q)) + beta xi(q) < (1 - eps) beta xi(1)

    at beta = beta_floor = (1+eps') sqrt(2 log p / p).  Infeasibility at this
    p (window inverted, no positive margin, or beta_floor >= beta_ceiling) is
    reported via the flag, never an exception.
    """
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise DomainError(f"p must be an integer >= 2, got {p}")
    if not eps_prime > 0:
        raise DomainError(f"eps_prime must be positive, got {eps_prime}")

    target = 1.0 + eps_prime
    hi = 1.0
    while v_rate(hi) * math.sqrt(1.0 + hi) < target:
        hi *= 2.0
    lo = 1e-12
    while hi - lo > 1e-12 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if v_rate(mid) * math.sqrt(1.0 + mid) < target:
            lo = mid
        else:
            hi = mid
    delta = lo

    q_low = 1.0 - delta / p
    q_high = 1.0 - p ** (-(1.0 + delta))
    beta_floor = target * math.sqrt(2.0 * math.log(p) / p)
    beta_ceiling = (1.0 - eps_prime) * math.sqrt(2.0 * math.log(2.0))

    reasons: list[str] = []
    if not q_low < q_high:
        reasons.append("window inverted: p^{-delta} >= delta at this p")
    if not beta_floor < beta_ceiling:
        reasons.append("no admissible beta: beta_floor >= beta_ceiling")

    eps = 0.0
    if q_low < q_high:
        qs = np.linspace(q_low, q_high, 65)
        margins = 1.0 - (
            2.0 * math.sqrt(p) * gauss_pdf(half_quantile(qs)) + beta_floor * qs**p
        ) / beta_floor
        min_margin = float(np.min(margins))
        if min_margin <= 0.0:
            reasons.append("energy-margin condition fails inside the window")
        else:
            eps = 0.5 * min_margin

    feasible = not reasons
    band = None
    if feasible:
        band = OgpBand(q_low=q_low, q_high=q_high, eps=eps, delta=delta, rate_c=rate_c)
    return OgpBandReport(
        p=int(p), eps_prime=eps_prime, delta=delta, q_low=q_low, q_high=q_high,
        beta_floor=beta_floor, beta_ceiling=beta_ceiling, eps=eps,
        feasible=feasible, reasons=tuple(reasons), band=band,
    )
