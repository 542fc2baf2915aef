"""Command line interface: ``python -m alelab <command> [--config PATH] ...``.

Every command resolves its configuration against the defaults below, writes
the resolved config next to its artifacts and replaces artifacts atomically.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys

import numpy as np

SCHEMA_CONFIG = "alelab.config/1"

DEFAULTS = {
    "schema": SCHEMA_CONFIG,
    "family": {"kind": "A", "rank": 1, "zeta_c": {"1": [[1, 0], [-1, 0]]}, "zeta_r": {}, "d": 2},
    "flavor": "cscK",
    "gluing": {"beta": 0.51, "delta": -1.9, "eta_c": 0.1, "symmetrize": True, "hat_phi0": "flat",
               "deformation_power": None},
    "test_function": {"name": "gaussian", "sigma": 0.3},
    "grid": {"values": None, "top": None, "n": 10, "ratio": 2.0},
    "plan": {"mode": "radial", "tol": 1e-8, "n_samples": 1 << 20, "seed": 0, "symmetry_threshold": 1e-6},
    "lp": {"p_list": [1.1, 4.0 / 3.0], "n_samples": 1 << 13},
    "eh": {"a": 1.0, "radii": [20.0, 40.0, 80.0], "decay_order": 8},
    "root_system": {"kind": "A", "rank": 2},
    "bott_chern": {"n_points": 100, "amplitude": 0.05, "sigma": 0.6, "nodes": 32, "seed": 0},
    "threads": 1,
}

COMMANDS = ("root-system", "check-nondegenerate", "c2-integral", "sweep", "fit", "bubbling", "lp-scan",
            "bott-chern-check", "region-rates")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config


def _merge(base: dict, user: dict, where: str = "config") -> dict:
    out = copy.deepcopy(base)
    for k, v in user.items():
        if k not in base:
            raise ConfigError(f"{where}.{k}: unknown key")
        b = base[k]
        if isinstance(b, dict) and k not in ("zeta_c", "zeta_r"):
            if not isinstance(v, dict):
                raise ConfigError(f"{where}.{k}: expected an object, got {type(v).__name__}")
            out[k] = _merge(b, v, f"{where}.{k}")
        elif isinstance(b, bool) and not isinstance(v, bool):
            raise ConfigError(f"{where}.{k}: expected true/false")
        elif isinstance(b, (int, float)) and not isinstance(b, bool) and not isinstance(v, (int, float)):
            raise ConfigError(f"{where}.{k}: expected a number, got {v!r}")
        elif isinstance(b, str) and not isinstance(v, str):
            raise ConfigError(f"{where}.{k}: expected a string, got {v!r}")
        else:
            out[k] = v
    return out


def resolve_config(path: str | None, seed: int | None = None, threads: int | None = None) -> dict:
    user = {}
    if path:
        with open(path) as fh:
            try:
                user = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: top level must be an object")
        if user.get("schema", SCHEMA_CONFIG) != SCHEMA_CONFIG:
            raise ConfigError(f"config.schema: expected {SCHEMA_CONFIG!r}, got {user['schema']!r}")
    cfg = _merge(DEFAULTS, user)
    if seed is not None:
        cfg["plan"]["seed"] = int(seed)
        cfg["bott_chern"]["seed"] = int(seed)
    if threads is not None:
        cfg["threads"] = int(threads)
    if cfg["flavor"] not in ("cscK", "K3"):
        raise ConfigError("config.flavor: must be 'cscK' or 'K3'")
    return cfg


def build_path(cfg: dict):
    from .ade import make_path
    fam = cfg["family"]
    try:
        zc = {int(k): [tuple(x) if isinstance(x, list) else x for x in v] for k, v in fam["zeta_c"].items()}
        zr = {int(k): v for k, v in fam.get("zeta_r", {}).items()}
        return make_path(fam["kind"], int(fam["rank"]), zc, zr or None, d=int(fam["d"]))
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"config.family: {exc}") from None


def build_fibre_config(cfg: dict, path=None, n_samples: int | None = None):
    from .glue import BackgroundOrbifoldMetric
    from .integrate import TEST_FUNCTIONS, FibreConfig, IntegralPlan
    path = path or build_path(cfg)
    tf = cfg["test_function"]
    name = tf["name"]
    if name not in TEST_FUNCTIONS:
        raise ConfigError(f"config.test_function.name: unknown {name!r} (choose from {sorted(TEST_FUNCTIONS)})")
    kwargs = {k: v for k, v in tf.items() if k != "name"}
    if name == "plateau":
        kwargs = {"value": kwargs.get("value", 1.0)}
    elif name == "zero":
        kwargs = {}
    plan = cfg["plan"]
    ip = IntegralPlan(mode=plan["mode"], tol=plan["tol"], n_samples=n_samples or plan["n_samples"],
                      seed=plan["seed"], symmetry_threshold=plan["symmetry_threshold"])
    g = cfg["gluing"]
    return FibreConfig(path, TEST_FUNCTIONS[name](**kwargs), beta=g["beta"], delta=g["delta"],
                       background=BackgroundOrbifoldMetric(c=g["eta_c"]), plan=ip, symmetrize=g["symmetrize"])


def build_grid(cfg: dict, flavor: str, p: int):
    from .experiments import default_grid
    gr = cfg["grid"]
    if gr["values"] is not None:
        return np.asarray(gr["values"], dtype=float)
    if gr["top"] is None:
        return default_grid(flavor, p, cfg["gluing"]["beta"], gr["n"], gr["ratio"])
    top = float(gr["top"])
    if top <= 0:
        raise ConfigError("config.grid.top: must be positive")
    return top / float(gr["ratio"]) ** np.arange(int(gr["n"]))


# ---------------------------------------------------------------------------
# output


class Output:
    def __init__(self, out_dir: str | None, formats: list[str], command: str):
        self.out_dir = out_dir
        self.formats = formats
        self.command = command
        self.pending: list[tuple[str, str]] = []

    def add(self, suffix: str, text: str):
        self.pending.append((suffix, text))

    def flush(self, cfg: dict):
        """Write everything at the end so a failed run leaves no partial artifacts."""
        if not self.out_dir:
            return []
        from .experiments import atomic_write, json_text
        written = []
        for suffix, text in self.pending:
            fmt = suffix.rsplit(".", 1)[-1]
            if fmt not in self.formats:
                continue
            p = os.path.join(self.out_dir, f"{self.command}{suffix}")
            atomic_write(p, text)
            written.append(p)
        p = os.path.join(self.out_dir, f"{self.command}.config.json")
        atomic_write(p, json_text(cfg))
        written.append(p)
        return written


# ---------------------------------------------------------------------------
# commands


def cmd_root_system(cfg, args, out):
    from .ade import build_root_system
    from .experiments import json_text
    rs_cfg = cfg["root_system"]
    rs = build_root_system(args.kind or rs_cfg["kind"], args.rank or rs_cfg["rank"])
    info = {"label": rs.label, "rank": rs.rank, "n_roots": len(rs.roots), "weyl_order": rs.weyl_order,
            "exponents": rs.exponents(), "gamma_order": rs.gamma_order, "cstar_weights": list(rs.cstar_weights),
            "cartan_matrix": rs.cartan_matrix.tolist(), "positive_roots": [list(r) for r in rs.positive_roots]}
    print(f"{rs.label}: {len(rs.roots)} roots, |W| = {rs.weyl_order}, exponents {info['exponents']}, "
          f"|Gamma| = {rs.gamma_order}")
    out.add(".json", json_text({"kind": "root-system", **info}))
    out.add(".csv", _csv([{"root": " ".join(map(str, r)), "height": sum(r)} for r in rs.positive_roots]))
    return 0


def cmd_check_nondegenerate(cfg, args, out):
    from .ade import build_root_system, is_nondegenerate, predicted_holder_exponent
    from .experiments import json_text
    path = build_path(cfg)
    v = is_nondegenerate(path, build_root_system(path.kind, path.rank))
    verdict = "nondegenerate" if v else "degenerate"
    print(f"verdict: {verdict}  (p = {v.p}, d = {v.d})")
    if not v:
        print(f"witness: {v.witness}")
    else:
        print(f"predicted Holder exponent: {predicted_holder_exponent(path)}")
    out.add(".json", json_text({"kind": "check-nondegenerate", "verdict": verdict, "p": v.p, "d": v.d,
                                "witness": None if v.witness is None else str(v.witness),
                                "path": path.to_json()}))
    return 0


def cmd_c2_integral(cfg, args, out):
    from .experiments import json_text
    from .integrate import IntegralPlan, eh_c2_cumulative, tail_extrapolate
    eh = cfg["eh"]
    a = args.a if args.a is not None else eh["a"]
    radii = np.asarray(eh["radii"], dtype=float) * a
    plan = IntegralPlan(tol=cfg["plan"]["tol"] * 1e-2)
    vals = eh_c2_cumulative(a, radii, plan)
    fit = tail_extrapolate(radii, vals, eh["decay_order"], full_output=True)
    err = abs(fit.limit - vals[-1]) + plan.tol
    print(f"c2 integral (Eguchi-Hanson, a = {a:g}): {fit.limit:.4f} ± {err:.1e}")
    for R, v in zip(radii, vals):
        print(f"  R = {R:8.2f}  cumulative = {v:.12f}")
    print(f"  tail fit: amplitude {fit.amplitude:.4g} R^-{eh['decay_order']}, relative residual {fit.residual:.2e}")
    out.add(".json", json_text({"kind": "c2-integral", "a": a, "radii": radii.tolist(), "cumulative": vals.tolist(),
                                "limit": fit.limit, "error": err, "tail_amplitude": fit.amplitude,
                                "tail_residual": fit.residual}))
    out.add(".csv", _csv([{"R": float(R), "cumulative": float(v)} for R, v in zip(radii, vals)]))
    ok = abs(fit.limit - 1.5) <= 0.005
    return 0 if ok or not args.strict else 1


def cmd_sweep(cfg, args, out):
    from .ade import vanishing_order
    from .experiments import csv_text, json_text, svg_loglog, sweep_F
    path = build_path(cfg)
    fc = build_fibre_config(cfg, path)
    grid = build_grid(cfg, cfg["flavor"], vanishing_order(path)[0])
    res = sweep_F(path, cfg["flavor"], grid=grid, config=fc)
    print(f"F~(0+) = {res.limit:.10f}  (background {res.limit_parts['background']:.3e}, "
          f"f(x0) e_orb = {res.limit_parts['f_x0'] * res.limit_parts['e_orb']:.6f})")
    for t, F in zip(res.t, res.F):
        print(f"  t = {t:.4e}  F~ = {F:.10f}  F~ - F~(0+) = {F - res.limit:+.3e}")
    if res.fit is not None:
        print(f"gamma (path variable) = {res.fit.gamma:.4f}, gamma (base) = {res.gamma_base:.4f}, "
              f"residual {res.fit.residual:.3g}, status {res.status}")
    else:
        print(f"fit: {res.status}")
    out.add(".json", json_text(res.to_json()))
    out.add(".csv", csv_text(res.rows()))
    model = res.fit.model if res.fit is not None else None
    out.add(".svg", svg_loglog([("|F~(t) - F~(0+)|", res.t, res.deviation, model)], "sweep"))
    ok = res.fit is not None and res.fit.ok and res.gamma_base >= 1.0 / res.d - 0.05
    return 0 if ok or not args.strict else 1


def cmd_fit(cfg, args, out):
    from .experiments import fit_exponent, json_text
    if not args.input:
        raise ConfigError("fit needs --input pointing at a sweep JSON artifact")
    with open(args.input) as fh:
        data = json.load(fh)
    try:
        t, F, limit, errs = data["t"], data["F"], data["limit"], data["errors"]
    except KeyError as exc:
        raise ConfigError(f"{args.input}: missing field {exc}") from None
    fit = fit_exponent(t=t, F=F, limit=limit, errors=errs)
    d = int(data.get("d", 1))
    print(f"gamma = {fit.gamma:.4f}  C = {fit.C:.4g}  residual = {fit.residual:.3g}  gamma/d = {fit.gamma / d:.4f}")
    out.add(".json", json_text({"kind": "fit", "gamma": fit.gamma, "C": fit.C, "residual": fit.residual,
                                "gamma_base": fit.gamma / d, "status": fit.status}))
    return 0 if fit.ok or not args.strict else 1


def cmd_bubbling(cfg, args, out):
    from .ade import vanishing_order
    from .experiments import bubbling_profile, csv_text, json_text, svg_loglog
    path = build_path(cfg)
    fc = build_fibre_config(cfg, path)
    grid = build_grid(cfg, "cscK", vanishing_order(path)[0])
    tab = bubbling_profile(path, grid, config=fc)
    for r in tab.rows:
        print(f"  t = {r['t']:.4e}  eps = {r['epsilon']:.4e}  mass = {r['mass']:.10f}  deviation = {r['deviation']:+.3e}")
    order = None if tab.fit is None else tab.fit.gamma
    print(f"prediction f(x0) e_orb = {tab.prediction:.6f}; extrapolated {tab.extrapolated:.6f} "
          f"({tab.mismatch_sigma:.2f} sigma{', FLAGGED' if tab.flagged else ''}); deviation order in eps: "
          f"{'n/a' if order is None else f'{order:.3f}'}")
    out.add(".json", json_text({"kind": "bubbling", "rows": tab.rows, "order": order, "status": tab.status,
                                "prediction": tab.prediction, "extrapolated": tab.extrapolated,
                                "mismatch_sigma": tab.mismatch_sigma, "flagged": tab.flagged}))
    out.add(".csv", csv_text(tab.rows))
    out.add(".svg", svg_loglog([("|mass - f(x0) e_orb|", [r["epsilon"] for r in tab.rows],
                                 [r["deviation"] for r in tab.rows], tab.fit.model if tab.fit else None)],
                               "bubbling"))
    ok = tab.fit is not None and tab.fit.ok and tab.fit.gamma >= 1.8 and not tab.flagged
    return 0 if ok or not args.strict else 1


def cmd_lp_scan(cfg, args, out):
    from .ade import vanishing_order
    from .experiments import csv_text, json_text, lp_scan, svg_loglog
    path = build_path(cfg)
    fc = build_fibre_config(cfg, path, n_samples=cfg["lp"]["n_samples"])
    grid = build_grid(cfg, "K3", vanishing_order(path)[0])
    sc = lp_scan(path, grid, cfg["lp"]["p_list"], fc)
    for q, fit in sc.fits.items():
        print(f"p = {q:.4f}: fitted {fit.gamma:.3f}, predicted {sc.predicted[q]:.3f}, residual {fit.residual:.3g} "
              f"-> {'PASS' if sc.passed[q] else 'FAIL'}")
    out.add(".json", json_text({"kind": "lp-scan", "rows": sc.rows,
                                "fits": {str(q): {"gamma": f.gamma, "residual": f.residual} for q, f in sc.fits.items()},
                                "predicted": {str(q): v for q, v in sc.predicted.items()},
                                "passed": {str(q): v for q, v in sc.passed.items()}}))
    out.add(".csv", csv_text(sc.rows))
    series = [(f"p = {q:.3g}", [r["epsilon"] for r in sc.rows if r["p"] == q],
               [r["norm"] for r in sc.rows if r["p"] == q], sc.fits[q].model) for q in sc.fits]
    out.add(".svg", svg_loglog(series, "L^p norm of the source"))
    return 0 if all(sc.passed.values()) or not args.strict else 1


def bump_pair(amplitude: float, sigma: float):
    """Flat potential and flat + a Gaussian bump (both I0-hermitian)."""
    def flat(X):
        return X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]

    def bumped(X):
        u = flat(X)
        return u + (u * (-1.0 / sigma ** 2)).exp() * amplitude

    return flat, bumped


def cmd_bott_chern_check(cfg, args, out):
    from .chern import HermitianField, TransgressionPath, bott_chern_residual
    from .experiments import csv_text, json_text
    bc = cfg["bott_chern"]
    flat, bumped = bump_pair(bc["amplitude"], bc["sigma"])
    path = TransgressionPath(HermitianField.from_potential(flat), HermitianField.from_potential(bumped), bc["nodes"])
    rng = np.random.default_rng(bc["seed"])
    pts = rng.uniform(-0.8, 0.8, size=(bc["n_points"], 4))
    res, diff, rhs = bott_chern_residual(path, pts)
    print(f"Bott-Chern identity at {len(pts)} points: max relative residual {res.max():.3e} "
          f"(max |c2(g) - c2(h)| = {np.abs(diff).max():.3e})")
    rows = [{"x1": p[0], "x2": p[1], "x3": p[2], "x4": p[3], "c2_difference": d, "ddc_tau": r, "residual": e}
            for p, d, r, e in zip(pts.tolist(), diff.tolist(), rhs.tolist(), res.tolist())]
    out.add(".json", json_text({"kind": "bott-chern-check", "max_residual": float(res.max()), "n_points": len(pts)}))
    out.add(".csv", csv_text(rows))
    return 0 if res.max() <= 1e-6 or not args.strict else 1


def cmd_region_rates(cfg, args, out):
    from .ade import vanishing_order
    from .experiments import csv_text, json_text, rate_rows_dicts, region_rate_table
    path = build_path(cfg)
    flavor = cfg["flavor"]
    fc = build_fibre_config(cfg, path)
    grid = build_grid(cfg, flavor, vanishing_order(path)[0])
    rows = region_rate_table(path, grid, flavor, fc)
    for r in rows:
        fitted = "-" if r.fitted is None else f"{r.fitted:6.3f}"
        pred = "exact" if r.predicted is None else f"{r.predicted:4.1f}"
        print(f"  {r.flavor:4s} {r.region:19s} {r.quantity:14s} [{r.variable:7s}] predicted {pred:>5s} "
              f"fitted {fitted:>6s}  {'PASS' if r.passed else 'FAIL'}  {r.status}")
    d = rate_rows_dicts(rows)
    out.add(".json", json_text({"kind": "region-rates", "flavor": flavor, "grid": list(map(float, grid)), "rows": d}))
    out.add(".csv", csv_text(d))
    return 0 if all(r.passed for r in rows) or not args.strict else 1


def _csv(rows):
    from .experiments import csv_text
    return csv_text(rows)


HANDLERS = {
    "root-system": cmd_root_system, "check-nondegenerate": cmd_check_nondegenerate, "c2-integral": cmd_c2_integral,
    "sweep": cmd_sweep, "fit": cmd_fit, "bubbling": cmd_bubbling, "lp-scan": cmd_lp_scan,
    "bott-chern-check": cmd_bott_chern_check, "region-rates": cmd_region_rates,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config; missing keys take the defaults")
    common.add_argument("--out", metavar="DIR", help="directory for artifacts (nothing is written without it)")
    common.add_argument("--seed", type=int, help="overrides plan.seed")
    common.add_argument("--threads", type=int, help="worker cap, recorded in the resolved config")
    common.add_argument("--strict", action="store_true", help="nonzero exit when an acceptance check fails")
    common.add_argument("--format", action="append", choices=("csv", "json", "svg"),
                        help="artifact formats (repeatable; default csv and json)")
    p = argparse.ArgumentParser(prog="alelab", description="ALE gluing laboratory")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "root-system":
            sp.add_argument("--kind", choices=("A", "D", "E"))
            sp.add_argument("--rank", type=int)
        if name == "c2-integral":
            sp.add_argument("--a", type=float, help="Eguchi-Hanson scale")
        if name == "fit":
            sp.add_argument("--input", metavar="PATH", help="sweep JSON artifact")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args.config, args.seed, args.threads)
        if cfg["threads"] < 1:
            raise ConfigError("config.threads: must be at least 1")
        out = Output(args.out, args.format or ["csv", "json"], args.command)
        status = HANDLERS[args.command](cfg, args, out)
        for p in out.flush(cfg):
            print(f"wrote {p}")
        return status
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"{args.command} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
