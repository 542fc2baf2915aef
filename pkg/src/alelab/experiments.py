"""t-sweeps, exponent fits, bubbling tables, L^p scans and region-rate tables."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np

from .ade import ZetaPath, build_root_system, is_nondegenerate, vanishing_order
from .chern import c2_density_real
from .glue import (ALEFamily, BackgroundOrbifoldMetric, GluingSchedule, K3GluedMetric, ScheduleError,
                   metric_deviation, sphere_points, validity_bound)
from .integrate import (FibreConfig, IntegralPlan, RegionValue, TestFunction, _core_value, background_integral,
                        fibre_F, gated_integral, orbifold_euler, zero_function)

SCHEMA_VERSION = "alelab.results/1"


class FitError(ValueError):
    pass


class DegeneratePathError(ValueError):
    pass


# ---------------------------------------------------------------------------
# grids and fits


def default_grid(flavor: str, p: int, beta: float = 0.51, n: int = 10, ratio: float = 2.0) -> np.ndarray:
    """n geometric points, ratio ``ratio``, largest at 0.9 x validity bound."""
    top = 0.9 * validity_bound(flavor, p, beta)
    return top / ratio ** np.arange(n)


def check_grid(grid, flavor: str, p: int, d: int, beta: float, delta: float) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or len(g) < 2:
        raise ScheduleError("grid needs at least two points")
    if not np.all(np.diff(g) < 0):
        raise ScheduleError("grid must be strictly decreasing")
    q = g[1:] / g[:-1]
    if not np.allclose(q, q[0], rtol=1e-9):
        raise ScheduleError("grid must be geometric")
    for t in g:
        GluingSchedule(float(t), p, d, beta, delta, flavor)  # raises beyond validity
    return g


@dataclass
class ExponentFit:
    gamma: float
    C: float
    residual: float
    used: list
    excluded: list
    ok: bool
    status: str

    def model(self, x):
        return self.C * np.asarray(x, dtype=float) ** self.gamma


def fit_power(x, y, err=None, noise_factor: float = 10.0, min_points: int = 4, max_residual: float = 0.2,
              floor: float = 0.0) -> ExponentFit:
    """Least-squares slope of log|y| against log x on points above the noise floor."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y, dtype=float))
    e = np.zeros_like(y) if err is None else np.abs(np.asarray(err, dtype=float))
    usable = np.isfinite(y) & (y > noise_factor * e) & (y > floor) & (x > 0)
    if usable.sum() < min_points:
        raise FitError(f"signal below integration noise: {int(usable.sum())} usable points of {len(x)}")
    lx, ly = np.log(x[usable]), np.log(y[usable])
    slope, icpt = np.polyfit(lx, ly, 1)
    res = float(np.sqrt(np.mean((ly - (slope * lx + icpt)) ** 2)))
    ok = res <= max_residual
    status = "ok" if ok else f"residual {res:.3f} above {max_residual}"
    return ExponentFit(float(slope), float(math.exp(icpt)), res, x[usable].tolist(), x[~usable].tolist(), ok,
                       status)


def reparameterize(fit: ExponentFit, d: int) -> ExponentFit:
    """The same model in the variable t = s^d: gamma_t = gamma_s / d."""
    return ExponentFit(fit.gamma / d, fit.C, fit.residual, [u ** d for u in fit.used],
                       [u ** d for u in fit.excluded], fit.ok, fit.status)


# ---------------------------------------------------------------------------
# sweep of F~


@dataclass
class SweepResult:
    t: np.ndarray
    F: np.ndarray
    errors: np.ndarray
    breakdown: list
    limit: float
    limit_parts: dict
    p: int
    d: int
    flavor: str
    test_function: str
    fit: ExponentFit | None = None
    status: str = "ok"
    provenance: dict = field(default_factory=dict)

    @property
    def deviation(self) -> np.ndarray:
        return self.F - self.limit

    @property
    def gamma_base(self) -> float | None:
        """Exponent in the base variable t = s^d."""
        return None if self.fit is None else self.fit.gamma / self.d

    def rows(self) -> list[dict]:
        out = []
        for t, F, err, parts in zip(self.t, self.F, self.errors, self.breakdown):
            for rv in parts:
                out.append({"t": t, "F": F, "F_error": err, "region": rv.region, "value": rv.value,
                            "error": rv.error, "mode": rv.mode})
        return out

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA_VERSION, "kind": "sweep", "flavor": self.flavor, "p": self.p, "d": self.d,
            "test_function": self.test_function, "t": self.t.tolist(), "F": self.F.tolist(),
            "errors": self.errors.tolist(), "limit": self.limit, "limit_parts": self.limit_parts,
            "breakdown": [[asdict(r) for r in parts] for parts in self.breakdown],
            "fit": None if self.fit is None else asdict(self.fit), "gamma_base": self.gamma_base,
            "status": self.status, "provenance": self.provenance,
        }


def require_nondegenerate(path: ZetaPath):
    verdict = is_nondegenerate(path, build_root_system(path.kind, path.rank))
    if not verdict:
        raise DegeneratePathError(f"degenerate path (witness {verdict.witness})")
    return verdict


def config_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()[:16]


def sweep_F(path: ZetaPath, flavor: str = "cscK", f: TestFunction | None = None, grid=None,
            config: FibreConfig | None = None, fit: bool = True) -> SweepResult:
    """F~(t) over a geometric grid, its limit F~(0+) from independent pieces,
    and the fitted exponent of F~(t) - F~(0+)."""
    require_nondegenerate(path)
    config = config or FibreConfig(path)
    if f is not None:
        config.test_function = f
    p = vanishing_order(path)[0]
    grid = default_grid(flavor, p, config.beta) if grid is None else grid
    grid = check_grid(grid, flavor, p, path.d, config.beta, config.delta)
    Fs, errs, parts = [], [], []
    for t in grid:
        F, rows = fibre_F(float(t), flavor, config)
        Fs.append(F)
        errs.append(sum(r.error for r in rows))
        parts.append(rows)
    bg = background_integral(config.test_function, config.background, config.plan)
    gamma_order = config.plan.gamma_order
    e_orb = orbifold_euler(gamma_order, path.rank)
    f0 = config.test_function.value_at_origin
    limit = bg.value + f0 * e_orb
    res = SweepResult(np.asarray(grid), np.asarray(Fs), np.asarray(errs) + bg.error, parts, limit,
                      {"background": bg.value, "background_error": bg.error, "f_x0": f0, "e_orb": e_orb},
                      p, path.d, flavor, config.test_function.name,
                      provenance={"seed": config.plan.seed, "beta": config.beta, "delta": config.delta})
    if fit:
        try:
            res.fit = fit_exponent(res)
            res.status = res.fit.status
        except FitError as exc:
            res.status = f"no signal: {exc}"
    return res


def fit_exponent(sweep: SweepResult | None = None, t=None, F=None, limit=None, errors=None,
                 min_points: int = 4) -> ExponentFit:
    """gamma, C with |F(t) - F(0+)| ~ C t^gamma (t the path variable)."""
    if sweep is not None:
        t, F, limit, errors = sweep.t, sweep.F, sweep.limit, sweep.errors
    t = np.asarray(t, dtype=float)
    if len(t) < min_points:
        raise FitError(f"signal below integration noise: only {len(t)} grid points")
    dev = np.asarray(F, dtype=float) - limit
    return fit_power(t, dev, errors, min_points=min_points, floor=1e-14 * max(1.0, abs(limit)))


# ---------------------------------------------------------------------------
# bubbling


@dataclass
class BubblingTable:
    rows: list
    fit: ExponentFit | None
    extrapolated: float
    extrapolation_error: float
    prediction: float
    mismatch_sigma: float
    flagged: bool
    status: str


def bubbling_profile(path: ZetaPath, t_grid=None, f: TestFunction | None = None, config: FibreConfig | None = None,
                     e_orb: float | None = None) -> BubblingTable:
    """Core mass int_{r <= b} f~ c2(h_t) against f(x0) e_orb; flags a
    mismatch above 10 sigma between the eps -> 0 extrapolation and the prediction."""
    require_nondegenerate(path)
    config = config or FibreConfig(path)
    if f is not None:
        config.test_function = f
    p = vanishing_order(path)[0]
    t_grid = default_grid("cscK", p, config.beta) if t_grid is None else t_grid
    t_grid = check_grid(t_grid, "cscK", p, path.d, config.beta, config.delta)
    e_orb = orbifold_euler(config.plan.gamma_order, path.rank) if e_orb is None else e_orb
    tf = config.test_function
    pred = tf.value_at_origin * e_orb
    family = ALEFamily(path)
    rows = []
    for t in t_grid:
        s = config.schedule(float(t))
        rv = _core_value(family.triple_at(float(t)), tf.pulled_back(family if config.pullback else None, float(t)),
                         s.b, config.plan)
        rows.append({"t": float(t), "epsilon": s.epsilon, "b": s.b, "mass": rv.value, "error": rv.error,
                     "prediction": pred, "deviation": rv.value - pred})
    eps = np.array([r["epsilon"] for r in rows])
    mass = np.array([r["mass"] for r in rows])
    err = np.array([r["error"] for r in rows])
    try:
        fit = fit_power(eps, mass - pred, err, floor=1e-14)
        status = fit.status
    except FitError as exc:
        fit, status = None, f"no signal: {exc}"
    # extrapolate mass = M0 + c eps^2 and compare M0 with the prediction
    A = np.stack([np.ones_like(eps), eps ** 2], axis=1)
    coef, *_ = np.linalg.lstsq(A, mass, rcond=None)
    resid = mass - A @ coef
    dof = max(len(eps) - 2, 1)
    cov = np.linalg.inv(A.T @ A) * float(resid @ resid) / dof
    sigma = math.sqrt(max(cov[0, 0], 0.0)) + float(err.max()) + 1e-12
    z = abs(coef[0] - pred) / sigma
    return BubblingTable(rows, fit, float(coef[0]), sigma, pred, float(z), bool(z > 10), status)


# ---------------------------------------------------------------------------
# K3 surrogate: L^p source norms and pointwise region rates


def k3_config_metric(path: ZetaPath, t: float, config: FibreConfig, **kw) -> K3GluedMetric:
    s = config.schedule(t, "K3")
    return K3GluedMetric(s, ALEFamily(path), **kw)


@dataclass
class LpScan:
    rows: list
    fits: dict
    predicted: dict
    passed: dict


class _SourceCache:
    """Memoizes |f_t| and the volume density per sample array, so several
    exponents reuse one evaluation of the glued metric."""

    def __init__(self, metric: K3GluedMetric):
        self.metric = metric
        self.store: dict = {}

    def __call__(self, P):
        key = (P.shape, hash(P.tobytes()))
        if key not in self.store:
            self.store[key] = (np.abs(self.metric.ma_source(P)), self.metric.volume_density(P))
        return self.store[key]


def lp_norm_source(metric: K3GluedMetric, p_exp: float, plan: IntegralPlan, r_max: float = 1.0,
                   cache: _SourceCache | None = None) -> tuple:
    """(||f_t||_{L^p}, error) over r <= r_max against the glued volume form."""
    s = metric.schedule
    sq = math.sqrt(s.epsilon)
    edges = [sq, 2 * sq, 0.5, 0.75, r_max]
    cache = cache or _SourceCache(metric)

    def dens(P):
        f, vol = cache(P)
        return f ** p_exp * vol

    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        rv = gated_integral(dens, lo, hi, plan, "lp")
        total += rv.value
        err += rv.error
    total = max(total, 0.0)
    norm = total ** (1.0 / p_exp)
    nerr = (norm / (p_exp * total) * err) if total > 0 else err
    return norm, nerr


def lp_scan(path: ZetaPath, t_grid=None, p_list=(1.1, 4.0 / 3.0), config: FibreConfig | None = None,
            tolerance: float = 0.3) -> LpScan:
    """Fitted exponent of ||f_t||_{L^p} against eps, compared with 2 + 2/p."""
    for q in p_list:
        if not 1.0 < q <= 4.0 / 3.0 + 1e-12:
            raise ValueError(f"p = {q} outside (1, 4/3]: the L^p bound is only available there")
    require_nondegenerate(path)
    config = config or FibreConfig(path, plan=IntegralPlan(n_samples=1 << 14))
    p = vanishing_order(path)[0]
    t_grid = default_grid("K3", p, config.beta) if t_grid is None else t_grid
    t_grid = check_grid(t_grid, "K3", p, path.d, config.beta, config.delta)
    rows = []
    for t in t_grid:
        m = k3_config_metric(path, float(t), config)
        cache = _SourceCache(m)
        for q in p_list:
            n, e = lp_norm_source(m, q, config.plan, cache=cache)
            rows.append({"t": float(t), "epsilon": m.schedule.epsilon, "p": q, "norm": n, "error": e})
    fits, pred, passed = {}, {}, {}
    for q in p_list:
        sel = [r for r in rows if r["p"] == q]
        fit = fit_power([r["epsilon"] for r in sel], [r["norm"] for r in sel], [r["error"] for r in sel],
                        floor=1e-300)
        fits[q] = fit
        pred[q] = 2 + 2 / q
        passed[q] = bool(fit.ok and abs(fit.gamma - pred[q]) <= tolerance)
    return LpScan(rows, fits, pred, passed)


@dataclass
class RateRow:
    flavor: str
    region: str
    quantity: str
    variable: str
    predicted: float | None
    fitted: float | None
    residual: float | None
    passed: bool
    bound_ok: bool
    status: str
    values: list = field(default_factory=list)


def _rate_row(flavor, region, quantity, variable, predicted, x, y, err=None, tol=0.4, floor=0.0,
              exact_tol: float | None = None) -> RateRow:
    y = np.abs(np.asarray(y, dtype=float))
    if exact_tol is not None:
        ok = bool(np.all(y <= exact_tol))
        return RateRow(flavor, region, quantity, variable, None, None, None, ok, ok,
                       "exact" if ok else f"max {y.max():.3g} above {exact_tol:g}", y.tolist())
    if np.all(y <= max(floor, 0.0)):
        return RateRow(flavor, region, quantity, variable, predicted, None, None, True, True,
                       "vacuous: identically zero to rounding", y.tolist())
    try:
        fit = fit_power(x, y, err, floor=floor)
    except FitError as exc:
        return RateRow(flavor, region, quantity, variable, predicted, None, None, False, False, str(exc), y.tolist())
    match = abs(fit.gamma - predicted) <= tol
    bound_ok = fit.gamma >= predicted - tol
    status = fit.status if fit.ok else fit.status
    if fit.ok and not match:
        status = "faster than predicted" if bound_ok else "slower than predicted"
    return RateRow(flavor, region, quantity, variable, predicted, fit.gamma, fit.residual, bool(fit.ok and match),
                   bool(bound_ok), status, y.tolist())


def _cscK_rows(path, t_grid, config: FibreConfig) -> list[RateRow]:
    p = vanishing_order(path)[0]
    runs = [fibre_F(float(t), "cscK", config)[1] for t in t_grid]
    eps = np.asarray(t_grid) ** (p / 2)
    bg = background_integral(config.test_function, config.background, config.plan)
    f0 = config.test_function.value_at_origin
    e_orb = orbifold_euler(config.plan.gamma_order, path.rank)
    limits = {"core": f0 * e_orb, "inner_annulus": 0.0, "transition_annulus": 0.0, "background": bg.value,
              "outside": 0.0}
    orders = {"core": (2.0, "epsilon"), "inner_annulus": (2.0, "epsilon"), "transition_annulus": (2.0, "epsilon"),
              "background": (1.0, "t"), "outside": (float(path.d), "t")}
    rows = []
    for k, name in enumerate(["core", "inner_annulus", "transition_annulus", "background", "outside"]):
        vals = [run[k] for run in runs]
        pred, var = orders[name]
        x = eps if var == "epsilon" else np.asarray(t_grid)
        if all(v.mode == "vacuous" for v in vals):
            rows.append(RateRow("cscK", name, "contribution", var, pred, None, None, True, True,
                                "vacuous: test function has no support here", [0.0] * len(vals)))
            continue
        dev = [v.value - limits[name] for v in vals]
        err = [v.error + (bg.error if name == "background" else 0.0) for v in vals]
        rows.append(_rate_row("cscK", name, "contribution", var, pred, x, dev, err, floor=1e-14))
    return rows


def _region_points(lo: float, hi: float, n_r: int = 5, n_dir: int = 12, seed: int = 11) -> tuple:
    r = np.geomspace(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo), n_r)
    d = sphere_points(n_dir, seed)
    P = (r[:, None, None] * d[None]).reshape(-1, 4)
    return P, np.repeat(r, n_dir)


def _k3_quantities(path, t: float, config: FibreConfig) -> dict:
    m = k3_config_metric(path, t, config)
    s = m.schedule
    sq = math.sqrt(s.epsilon)
    triple = m.triple
    hat0 = BackgroundOrbifoldMetric(eta=m.hat_phi0)
    out = {}

    def c2_scaled(field, P, ref_g):
        vol = np.sqrt(np.linalg.det(np.moveaxis(ref_g, (0, 1), (-2, -1))))
        return c2_density_real(field, P) / vol

    regions = {"core": (0.2 * sq, sq), "inner_annulus": (sq, 2 * sq), "outer_annulus": (2 * sq, 0.5),
               "transition_annulus": (0.5, 0.75), "background": (0.75, 1.0)}
    for name, (lo, hi) in regions.items():
        if hi <= lo:
            continue
        P, r = _region_points(lo, hi)
        g = m.fields(P, 0).g.value
        f = m.ma_source(P)
        if name in ("core", "inner_annulus"):
            ref = triple.fields(P, 0).g.value
            ref_field = triple
        else:
            ref = hat0.metric(P, 0).value
            ref_field = hat0
        dev = metric_deviation(g, ref)
        dc2 = c2_scaled(m, P, ref) - c2_scaled(ref_field, P, ref)
        weight = r ** 4 if name == "outer_annulus" else np.ones_like(r)
        out[name] = {"metric": float(np.max(dev * weight)), "source": float(np.max(np.abs(f) * weight)),
                     "c2": float(np.max(np.abs(dc2) * weight))}
    return out


_K3_PREDICTIONS = {
    # region: {quantity: (order, variable) or "exact"}
    "core": {"metric": "exact", "source": "exact"},
    "inner_annulus": {"metric": (1.0, "epsilon"), "source": (2.0, "epsilon"), "c2": (1.0, "epsilon")},
    "outer_annulus": {"metric": (4.0, "epsilon"), "source": (4.0, "epsilon"), "c2": (4.0, "epsilon")},
    "transition_annulus": {"metric": (1.0, "t"), "source": (4.0, "epsilon"), "c2": (1.0, "t")},
    "background": {"metric": (1.0, "t"), "source": "exact", "c2": (1.0, "t")},
}


def _k3_rows(path, t_grid, config: FibreConfig) -> list[RateRow]:
    p = vanishing_order(path)[0]
    t_grid = np.asarray(t_grid, dtype=float)
    eps = t_grid ** (p / 2)
    data = [_k3_quantities(path, float(t), config) for t in t_grid]
    floors = {"metric": 1e-13, "source": 1e-13, "c2": 1e-14}
    rows = []
    for region, preds in _K3_PREDICTIONS.items():
        for qty, pred in preds.items():
            y = [d[region][qty] for d in data]
            if pred == "exact":
                rows.append(_rate_row("K3", region, qty, "-", None, None, y, exact_tol=1e-12))
                continue
            order, var = pred
            x = eps if var == "epsilon" else t_grid
            label = qty + (" * r^4" if region == "outer_annulus" else "")
            rows.append(_rate_row("K3", region, label, var, order, x, y, floor=floors[qty]))
    return rows


def region_rate_table(path: ZetaPath, t_grid=None, flavor: str = "cscK", config: FibreConfig | None = None) -> list:
    """Per-region fitted orders against the predicted ones.

    cscK rows fit |contribution(t) - lim contribution| of each region to F~;
    K3 rows fit pointwise sups of metric deviation, source and c2 deviation.
    """
    require_nondegenerate(path)
    config = config or FibreConfig(path)
    p = vanishing_order(path)[0]
    t_grid = default_grid(flavor, p, config.beta) if t_grid is None else t_grid
    t_grid = check_grid(t_grid, flavor, p, path.d, config.beta, config.delta)
    return _cscK_rows(path, t_grid, config) if flavor == "cscK" else _k3_rows(path, t_grid, config)


# ---------------------------------------------------------------------------
# artifacts


def atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA_VERSION}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def json_text(obj) -> str:
    def enc(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (np.floating, np.integer, np.bool_)):
            return o.item()
        raise TypeError(type(o).__name__)
    if isinstance(obj, dict) and "schema" not in obj:
        obj = {"schema": SCHEMA_VERSION, **obj}
    return json.dumps(obj, indent=2, sort_keys=True, default=enc) + "\n"


def svg_loglog(series: list[tuple], title: str = "", width: int = 480, height: int = 360) -> str:
    """Minimal log-log plot; series = [(label, x, y, fitted_model_or_None)]."""
    pts = [(x, y) for _, xs, ys, _ in series for x, y in zip(xs, ys) if x > 0 and abs(y) > 0]
    if not pts:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"></svg>\n'
    lx = np.log10([p[0] for p in pts])
    ly = np.log10([abs(p[1]) for p in pts])
    x0, x1 = lx.min(), lx.max() + 1e-9
    y0, y1 = ly.min(), ly.max() + 1e-9
    pad = 40

    def X(v):
        return pad + (math.log10(v) - x0) / (x1 - x0) * (width - 2 * pad)

    def Y(v):
        return height - pad - (math.log10(abs(v)) - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<text x="{pad}" y="20" font-size="13">{title} ({SCHEMA_VERSION})</text>',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#888"/>']
    for k, (label, xs, ys, model) in enumerate(series):
        c = colors[k % len(colors)]
        for x, y in zip(xs, ys):
            if x > 0 and abs(y) > 0:
                out.append(f'<circle cx="{X(x):.2f}" cy="{Y(y):.2f}" r="3" fill="{c}"/>')
        if model is not None:
            xs_ok = [x for x in xs if x > 0]
            a, b = min(xs_ok), max(xs_ok)
            out.append(f'<line x1="{X(a):.2f}" y1="{Y(model(a)):.2f}" x2="{X(b):.2f}" y2="{Y(model(b)):.2f}" '
                       f'stroke="{c}"/>')
        out.append(f'<text x="{width - pad - 150}" y="{pad + 15 * (k + 1)}" font-size="11" fill="{c}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def rate_rows_dicts(rows: list[RateRow]) -> list[dict]:
    return [{k: v for k, v in asdict(r).items() if k != "values"} for r in rows]


__all__ = ["SCHEMA_VERSION", "FitError", "DegeneratePathError", "default_grid", "check_grid", "ExponentFit",
           "fit_power", "reparameterize", "SweepResult", "sweep_F", "fit_exponent", "BubblingTable",
           "bubbling_profile", "LpScan", "lp_scan", "RateRow", "region_rate_table", "atomic_write", "csv_text",
           "json_text", "svg_loglog", "zero_function", "RegionValue"]
