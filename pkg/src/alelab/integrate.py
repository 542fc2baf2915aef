"""Fibre integrals over the local model {r <= 1} / Gamma.

Radial mode integrates cohomogeneity-one densities with a vectorised
bisection Gauss-Legendre rule; mc mode averages scrambled Sobol points over
an annulus.  fibre_F splits int f c2(glued metric) over the gluing regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import qmc

from .ade import ZetaPath, vanishing_order
from .chern import FOUR_PI2, c2_density_real
from .glue import (ALEFamily, BackgroundOrbifoldMetric, CscKGluedMetric, GluingSchedule, K3GluedMetric,
                   _step_values, sphere_points)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


class IntegrationError(RuntimeError):
    pass


class SymmetryError(IntegrationError):
    pass


def orbit_volume(gamma_order: int) -> float:
    """Volume of the unit S^3 / Gamma."""
    return 2 * math.pi ** 2 / gamma_order


@dataclass
class IntegralPlan:
    mode: str = "radial"
    r_range: tuple = (0.0, 1.0)
    tol: float = 1e-8
    n_samples: int = 1 << 20
    seed: int = 0
    gamma_order: int = 2
    symmetry_threshold: float = 1e-6
    symmetry_samples: int = 32
    max_rounds: int = 48
    replicates: int = 8

    def __post_init__(self):
        if self.mode not in ("radial", "mc"):
            raise ValueError(f"unknown integration mode {self.mode!r}")
        if self.gamma_order < 1:
            raise ValueError("|Gamma| must be positive")

    @property
    def orbit_volume(self) -> float:
        return orbit_volume(self.gamma_order)


# ---------------------------------------------------------------------------
# radial mode


def _gl_panels(fun, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * _GL_X
    vals = np.asarray(fun(x.ravel()), dtype=float).reshape(x.shape)
    return half * (vals @ _GL_W)


def _adaptive(fun, edges, tol, max_rounds):
    """Bisect panels until each panel's two-half estimate agrees with the
    whole-panel estimate within its share of ``tol``.  Returns (value, err)."""
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    total_len = edges[-1] - edges[0]
    whole = _gl_panels(fun, a, b)
    value, err = 0.0, 0.0
    for _ in range(max_rounds):
        m = 0.5 * (a + b)
        halves = _gl_panels(fun, np.concatenate([a, m]), np.concatenate([m, b]))
        left, right = halves[: len(a)], halves[len(a):]
        est = left + right
        e = np.abs(est - whole)
        ok = e <= np.maximum(tol * (b - a) / total_len, 4e-16 * np.abs(est))
        # accumulate in panel order so the sum is stable for a fixed plan
        value += float(np.sum(est[ok]))
        err += float(np.sum(e[ok]))
        if ok.all():
            return value, err
        keep = ~ok
        a = np.concatenate([a[keep], m[keep]])
        b = np.concatenate([m[keep], b[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        order = np.argsort(a, kind="stable")
        a, b, whole = a[order], b[order], whole[order]
    # out of rounds: keep the unresolved panels, flag them through err
    return value + float(np.sum(whole)), err + float(np.sum(e[keep]))


def log_breakpoints(lo: float, hi: float, scale: float, per_decade: int = 4) -> np.ndarray:
    """Geometric breakpoints resolving structure at ``scale`` inside (lo, hi)."""
    lo_p = max(lo, scale * 1e-3)
    hi_p = min(hi, scale * 1e3) if math.isfinite(hi) else scale * 1e3
    if not lo_p < hi_p:
        return np.array([])
    n = max(2, int(per_decade * math.log10(hi_p / lo_p)) + 1)
    pts = np.geomspace(lo_p, hi_p, n)
    return pts[(pts > lo) & (pts < hi)]


def radial_integral(density: Callable, plan: IntegralPlan | None = None, r_range=None, breakpoints=(),
                    full_output: bool = False):
    """orbit_volume * int density(r) r^3 dr over ``r_range``.

    ``density`` maps an array of radii to values.  An infinite upper end is
    mapped to a finite interval by r = lo + x / (1 - x).
    """
    plan = plan or IntegralPlan()
    lo, hi = r_range if r_range is not None else plan.r_range
    lo, hi = float(lo), float(hi)
    if not 0 <= lo < hi:
        raise ValueError(f"bad radial range ({lo}, {hi})")
    bps = np.unique(np.asarray([x for x in breakpoints if lo < x < hi], dtype=float))
    if math.isfinite(hi):
        def fun(r):
            return density(r) * r ** 3
        edges = np.concatenate([[lo], bps, [hi]])
    else:
        def fun(x):
            s = x - lo
            r = lo + s / (1.0 - s)
            return density(r) * r ** 3 / (1.0 - s) ** 2
        xb = (bps - lo) / (1.0 + bps - lo) + lo
        edges = np.concatenate([[lo], xb, [lo + 1.0]])
    val, err = _adaptive(fun, edges, plan.tol / plan.orbit_volume, plan.max_rounds)
    val, err = val * plan.orbit_volume, err * plan.orbit_volume
    return (val, err) if full_output else val


# ---------------------------------------------------------------------------
# Monte Carlo mode


def _annulus_points(u: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Map unit-cube samples to uniform points of the annulus lo < |x| < hi in R^4."""
    r = (lo ** 4 + u[:, 0] * (hi ** 4 - lo ** 4)) ** 0.25
    s = u[:, 1]
    th1 = 2 * math.pi * u[:, 2]
    th2 = 2 * math.pi * u[:, 3]
    a, c = np.sqrt(s), np.sqrt(1.0 - s)
    return r[:, None] * np.stack([a * np.cos(th1), a * np.sin(th1), c * np.cos(th2), c * np.sin(th2)], axis=1)


def mc_integral_4d(density: Callable, region, n: int, seed: int = 0, gamma_order: int = 2,
                   replicates: int = 8, chunk: int = 20000):
    """(estimate, standard error) of int over the annulus region / Gamma.

    The standard error is taken across ``replicates`` independent Sobol
    scramblings, each holding 2^m >= n / replicates points.
    """
    if n < 100:
        raise ValueError("mc_integral_4d needs n >= 100 samples for a meaningful error bar")
    lo, hi = region
    if not 0 <= lo < hi < math.inf:
        raise ValueError(f"bad annulus ({lo}, {hi})")
    m = max(4, math.ceil(math.log2(n / replicates)))
    vol = 0.5 * math.pi ** 2 * (hi ** 4 - lo ** 4) / gamma_order
    children = np.random.SeedSequence(seed).spawn(replicates)
    means = []
    for ss in children:
        u = qmc.Sobol(4, scramble=True, seed=np.random.default_rng(ss)).random_base2(m)
        P = _annulus_points(u, lo, hi)
        acc = 0.0
        for k in range(0, len(P), chunk):
            acc += float(np.sum(np.asarray(density(P[k:k + chunk]), dtype=float)))
        means.append(acc / len(P))
    means = np.array(means)
    return vol * float(means.mean()), vol * float(means.std(ddof=1) / math.sqrt(replicates))


# ---------------------------------------------------------------------------
# symmetry gate and tails


def symmetry_check(density: Callable, r: float, n_samples: int = 32, seed: int = 0) -> float:
    """Spread (max - min) / max|value| of a chart density over the sphere of radius r."""
    if not r > 0:
        raise ValueError("symmetry check needs r > 0")
    v = np.asarray(density(sphere_points(n_samples, seed) * r), dtype=float)
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return 0.0
    return float((v.max() - v.min()) / scale)


@dataclass
class TailFit:
    limit: float
    amplitude: float
    residual: float


def tail_extrapolate(radii, values, m: float, full_output: bool = False):
    """Limit c of values(R) = c + A R^-m by least squares on (1, R^-m).

    Rejects data whose successive differences do not shrink like a tail of
    that order.
    """
    R = np.asarray(radii, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(R) < 3 or len(R) != len(v):
        raise ValueError("tail extrapolation needs at least 3 (radius, value) pairs")
    order = np.argsort(R)
    R, v = R[order], v[order]
    dv = np.diff(v)
    scale = max(float(np.max(np.abs(v))), 1e-300)
    if np.any(np.abs(dv) > 1e-13 * scale):
        same_sign = np.all(np.sign(dv) == np.sign(dv[0]))
        shrinking = np.all(np.abs(dv[1:]) <= np.abs(dv[:-1]) * 1.01)
        if not (same_sign and shrinking):
            raise IntegrationError(f"values {v.tolist()} are not a monotone tail of order {m}")
    A = np.stack([np.ones_like(R), R ** (-m)], axis=1)
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    resid = v - A @ coef
    spread = max(float(np.max(np.abs(coef[1] * R ** (-m)))), 1e-14 * scale)
    rel = float(np.sqrt(np.mean(resid ** 2)) / spread)
    if rel > 0.05 and spread > 1e-12 * scale:
        raise IntegrationError(f"tail does not decay like R^-{m} (relative residual {rel:.3g})")
    fit = TailFit(float(coef[0]), float(coef[1]), rel)
    return fit if full_output else fit.limit


# ---------------------------------------------------------------------------
# test functions


@dataclass
class TestFunction:
    """Radial profile G of the ambient radius rho; f~_t(x) = G(rho_t(x)).

    rho_t = (|x|^2 + |y|^2 + 2|z|^2)^(1/4) for the fibre embedded as
    xy - z^2 = const, so f~_0(r) = G(r) and f~_t is pulled back along the
    holomorphic embedding of the deformed fibre.
    """

    __test__ = False  # not a pytest class

    profile: Callable
    name: str = "custom"
    support: float = 0.75

    @property
    def value_at_origin(self) -> float:
        return float(self.profile(np.array([0.0]))[0])

    def __call__(self, r) -> np.ndarray:
        return np.asarray(self.profile(np.asarray(r, dtype=float)), dtype=float)

    def pulled_back(self, family: ALEFamily | None, t: float) -> Callable:
        if family is None or t == 0:
            return self
        return lambda r: self(family.ambient_radius(t, r))


def _cut_values(rho):
    return _step_values((np.asarray(rho, dtype=float) - 0.55) / 0.15)


def gaussian_bump(sigma: float = 0.3, amplitude: float = 1.0) -> TestFunction:
    """amplitude * exp(-rho^2/sigma^2), cut off smoothly on [0.55, 0.7]."""
    return TestFunction(lambda rho: amplitude * np.exp(-(rho / sigma) ** 2) * (1.0 - _cut_values(rho)),
                        f"gaussian(sigma={sigma})")


def vanishing_bump(sigma: float = 0.3) -> TestFunction:
    """rho^2 exp(-rho^2/sigma^2) with the same cut-off; zero at the bubble point."""
    return TestFunction(lambda rho: (rho / sigma) ** 2 * np.exp(-(rho / sigma) ** 2) * (1.0 - _cut_values(rho)),
                        f"vanishing(sigma={sigma})")


def plateau(value: float = 1.0) -> TestFunction:
    """Constant on rho <= 0.55, cut off on [0.55, 0.7]."""
    return TestFunction(lambda rho: value * (1.0 - _cut_values(rho)), f"plateau({value})")


def zero_function() -> TestFunction:
    return TestFunction(lambda rho: np.zeros_like(np.asarray(rho, dtype=float)), "zero")


TEST_FUNCTIONS = {"gaussian": gaussian_bump, "vanishing": vanishing_bump, "plateau": plateau, "zero": zero_function}


# ---------------------------------------------------------------------------
# F~(t) by regions


@dataclass
class RegionValue:
    region: str
    lo: float
    hi: float
    value: float
    error: float
    mode: str


@dataclass
class FibreConfig:
    path: ZetaPath
    test_function: TestFunction = field(default_factory=gaussian_bump)
    beta: float = 0.51
    delta: float = -1.9
    background: BackgroundOrbifoldMetric = field(default_factory=BackgroundOrbifoldMetric)
    plan: IntegralPlan = field(default_factory=IntegralPlan)
    symmetrize: bool = True
    pullback: bool = True
    direction_seed: int = 7

    @property
    def p(self) -> int:
        return vanishing_order(self.path)[0]

    @property
    def d(self) -> int:
        return self.path.d

    def schedule(self, t: float, flavor: str = "cscK") -> GluingSchedule:
        return GluingSchedule(t, self.p, self.d, self.beta, self.delta, flavor)


def eh_c2_density(triple) -> Callable:
    """Radial c2 density of an Eguchi-Hanson triple: |Rm|^2 / (32 pi^2)
    (Ricci-flat Kähler identity; the chart volume form is Euclidean)."""
    return lambda r: triple.rm_norm2_exact(r) / (8 * FOUR_PI2)


def _radial_direction(seed: int) -> np.ndarray:
    return sphere_points(1, seed)[0]


def gated_integral(dens_pts: Callable, lo: float, hi: float, plan: IntegralPlan, name: str = "region",
                   direction_seed: int = 7, breakpoints=()) -> RegionValue:
    """int_{lo < r <= hi} of a chart density; radial when the density passes
    the symmetry gate at a few probe radii, Monte Carlo otherwise."""
    probe = np.geomspace(lo, hi, 4)[1:] if lo > 0 else np.geomspace(hi * 1e-2, hi, 3)
    probe = np.append(probe, 0.5 * (lo + hi))
    spread = max(symmetry_check(dens_pts, r, plan.symmetry_samples) for r in probe)
    if plan.mode == "radial" and spread <= plan.symmetry_threshold:
        e = _radial_direction(direction_seed)
        val, err = radial_integral(lambda r: dens_pts(np.asarray(r)[:, None] * e), plan, (lo, hi),
                                   breakpoints, full_output=True)
        return RegionValue(name, lo, hi, val, err, "radial")
    val, se = mc_integral_4d(dens_pts, (lo, hi), plan.n_samples, plan.seed, plan.gamma_order, plan.replicates)
    return RegionValue(name, lo, hi, val, se, "mc")


def region_integral(metric, f_radial: Callable, lo: float, hi: float, plan: IntegralPlan, name: str,
                    direction_seed: int = 7, breakpoints=()) -> RegionValue:
    """int_{lo < r <= hi} f c2(metric), cut at the test-function support."""
    hi_eff = min(hi, 0.75)
    if lo >= hi_eff:
        return RegionValue(name, lo, hi, 0.0, 0.0, "vacuous")

    def dens_pts(P):
        return f_radial(np.linalg.norm(P, axis=1)) * c2_density_real(metric, P)

    out = gated_integral(dens_pts, lo, hi_eff, plan, name, direction_seed, breakpoints)
    out.hi = hi
    return out


def _core_value(triple, f_radial, hi, plan, name="core") -> RegionValue:
    hi_eff = min(hi, 0.75)
    a = triple.a
    dens = eh_c2_density(triple)
    val, err = radial_integral(lambda r: f_radial(r) * dens(r), plan, (0.0, hi_eff),
                               log_breakpoints(0.0, hi_eff, a), full_output=True)
    return RegionValue(name, 0.0, hi, val, err, "radial")


def fibre_F(t: float, flavor: str, config: FibreConfig):
    """F~(t) = sum over regions of int f~_t c2(glued metric), with breakdown."""
    schedule = config.schedule(t, flavor)
    family = ALEFamily(config.path)
    triple = family.triple_at(t)
    f_rad = config.test_function.pulled_back(family if config.pullback else None, t)
    plan = config.plan
    edges = (0.0,) + schedule.boundaries + (math.inf,)
    names = schedule.region_names
    if flavor == "cscK":
        metric = CscKGluedMetric(schedule, family, config.background, config.symmetrize)
    else:
        metric = K3GluedMetric(schedule, family)
    rows = [_core_value(triple, f_rad, edges[1], plan)]
    for name, lo, hi in zip(names[1:], edges[1:-1], edges[2:]):
        bps = log_breakpoints(lo, min(hi, 0.75), triple.a) if lo < 10 * triple.a else ()
        rows.append(region_integral(metric, f_rad, lo, hi, plan, name, config.direction_seed, bps))
    return float(sum(r.value for r in rows)), rows


def background_integral(test_function: TestFunction, background: BackgroundOrbifoldMetric | None = None,
                        plan: IntegralPlan | None = None, r_max: float = 1.0, direction_seed: int = 7) -> RegionValue:
    """int_{r <= r_max} f c2(g0) for the background orbifold metric."""
    background = background or BackgroundOrbifoldMetric()
    plan = plan or IntegralPlan()
    return region_integral(background, test_function, 0.0, r_max, plan, "background", direction_seed)


def orbifold_euler(gamma_order: int, rank: int | None = None) -> float:
    """e_orb of the ALE space = (rank + 1) - 1/|Gamma| (A_n: |Gamma| = n + 1)."""
    n = gamma_order - 1 if rank is None else rank
    return n + 1 - 1.0 / gamma_order


def eh_c2_cumulative(a: float, R, plan: IntegralPlan | None = None) -> np.ndarray:
    """int_{r <= R} c2(EH) for each R, by radial quadrature."""
    from .ale import eh_triple
    plan = plan or IntegralPlan()
    tr = eh_triple(a)
    dens = eh_c2_density(tr)
    return np.array([radial_integral(dens, plan, (0.0, float(Rk)), log_breakpoints(0.0, float(Rk), a))
                     for Rk in np.atleast_1d(R)])
