import numpy as np
import pytest
from hypothesis import given, strategies as st

from alelab.ade import make_path
from alelab.chern import chern_connection, riemann_from_connection
from alelab.glue import (ALEFamily, BackgroundOrbifoldMetric, CscKGluedMetric, GluingSchedule, K3GluedMetric,
                         ScheduleError, classify_region, cutoff, hermitianize, metric_deviation, min_eigenvalue,
                         power_field, rho_field, seam_audit, smooth_step, sphere_points, weighted_holder_norm)
from alelab.jets import Jet, coordinates

from oracles import loglog_slope


@pytest.fixture(scope="module")
def family():
    return ALEFamily(make_path("A", 1, {1: [(1, 0), (-1, 0)]}, d=2))


@pytest.fixture(scope="module")
def background():
    return BackgroundOrbifoldMetric()


# cut-off

def test_cutoff_vanishes_below_lower_edge():
    jet = cutoff(0.5, 1.0, 2.0)
    assert np.all(jet.coeffs == 0.0)


def test_cutoff_is_one_above_upper_edge():
    jet = cutoff(3.0, 1.0, 2.0)
    assert jet.coeffs[0] == 1.0
    assert np.all(jet.coeffs[1:] == 0.0)


def test_cutoff_midpoint_is_half():
    assert float(cutoff(1.5, 1.0, 2.0).value) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("x1,x2", [(2.0, 1.0), (1.0, 1.0)])
def test_cutoff_rejects_empty_interval(x1, x2):
    with pytest.raises(ValueError):
        cutoff(1.2, x1, x2)


def test_step_derivatives_flat_at_ends():
    # all derivatives up to order 4 vanish at both ends
    for x in (0.0, 1.0):
        jet = smooth_step(coordinates(np.array([[x, 0, 0, 0]]), 4)[0])
        assert np.all(np.abs(jet.coeffs[1:]) == 0.0)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_step_monotone(x, y):
    lo, hi = sorted((x, y))
    assert smooth_step(lo) <= smooth_step(hi)


@given(st.floats(0.0, 1.0))
def test_step_symmetry(x):
    assert smooth_step(x) + smooth_step(1.0 - x) == pytest.approx(1.0, abs=1e-14)


# schedule and regions

def test_schedule_parameters():
    s = GluingSchedule(1e-4, p=2, beta=0.6)
    assert s.epsilon == pytest.approx(1e-4)
    assert s.b == pytest.approx(1e-4 ** 0.6)
    assert s.boundaries == pytest.approx((s.b, 2 * s.b, 4 * s.b, 1.0))


@pytest.mark.parametrize("kw", [dict(t=0.0), dict(t=1.0), dict(t=1e-3, beta=0.5), dict(t=1e-3, delta=0.1),
                                dict(t=1e-3, delta=-2.0), dict(t=1e-3, flavor="other"), dict(t=0.5),
                                dict(t=0.01, flavor="K3")])
def test_schedule_rejects_bad_parameters(kw):
    with pytest.raises(ScheduleError):
        GluingSchedule(**kw)


def test_classify_examples():
    s = GluingSchedule(1e-3)
    assert classify_region(3 * s.b, s) == "transition_annulus"
    assert classify_region(0.5 * s.b, s) == "core"
    assert classify_region(1.5, s) == "outside"
    k3 = GluingSchedule(1e-4, flavor="K3")
    assert classify_region(0.6, k3) == "transition_annulus"
    assert classify_region(0.3, k3) == "outer_annulus"


def test_classify_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        classify_region(0.0, GluingSchedule(1e-3))


@given(st.floats(1e-9, 10.0), st.sampled_from(["cscK", "K3"]))
def test_regions_partition_radii(r, flavor):
    s = GluingSchedule(1e-5, flavor=flavor)
    tag = classify_region(r, s)
    hits = [name for name, (lo, hi) in s.region_intervals().items() if lo < r <= hi]
    assert hits == [tag]


# cscK gluing

def test_background_check(background):
    lam, C = background.check()
    assert lam > 0.5
    assert C == pytest.approx(0.1, rel=1e-12)


def test_cscK_core_equals_ale_metric(family, background):
    s = GluingSchedule(1e-3)
    m = CscKGluedMetric(s, family, background)
    P = sphere_points(50, 3) * (0.5 * s.b)
    g = m.fields(P, 1).g
    ref = m.triple.fields(P, 1).g
    assert np.max(np.abs(g.coeffs - ref.coeffs)) <= 1e-13


def test_cscK_background_region_unchanged(family, background):
    s = GluingSchedule(1e-3)
    m = CscKGluedMetric(s, family, background, symmetrize=False)
    P = sphere_points(50, 4) * 0.9
    assert 0.9 >= 4 * s.b
    assert np.array_equal(m.tilde(P, 1).coeffs, background.metric(P, 1).coeffs)


def test_cscK_seams_continuous(family, background):
    s = GluingSchedule(3e-3)
    rows = seam_audit(CscKGluedMetric(s, family, background), s, gap=1e-6)
    assert len(rows) == 3
    assert max(row[3] for row in rows) <= 1e-4


def test_cscK_positive(family, background):
    s = GluingSchedule(3e-3)
    m = CscKGluedMetric(s, family, background)
    rng = np.random.default_rng(11)
    P = sphere_points(5000, 12) * np.exp(rng.uniform(np.log(s.b), 0.0, 5000))[:, None]
    assert min_eigenvalue(m.fields(P, 0).g.value).min() >= 0.5


def test_cscK_deviation_scales_like_b_squared(family, background):
    sups, bs = [], []
    dirs = sphere_points(64, 1)
    for t in 1e-6 * 2.0 ** -np.arange(6):
        s = GluingSchedule(t)
        m = CscKGluedMetric(s, family, background, symmetrize=False)
        P = (dirs[None] * np.linspace(s.b, 4 * s.b, 30)[:, None, None]).reshape(-1, 4)
        sups.append(np.abs(m.tilde(P, 0).value - background.metric(P, 0).value).max())
        bs.append(s.b)
    assert loglog_slope(bs, sups) == pytest.approx(2.0, abs=0.3)


def test_cscK_curvature_matches_background_far_out(family, background):
    def riemann(fields):
        _, gamma = chern_connection(fields.g, fields.I)
        return riemann_from_connection(gamma).value

    direction = np.array([0.5, 0.5, 0.5, -0.5])
    rows = []
    for t in (1e-5, 4e-6, 1.6e-6):
        s = GluingSchedule(t)
        m = CscKGluedMetric(s, family, background)
        for r in (0.3, 0.5, 0.9):
            assert r >= 4 * s.b
            P = (r * direction)[None]
            rows.append((s.epsilon, r, np.abs(riemann(m.fields(P, 2)) - riemann(background.fields(P, 2))).max()))
    rows = np.array(rows)
    A = np.c_[np.log(rows[:, 0]), np.log(rows[:, 1]), np.ones(len(rows))]
    eps_power, r_power, _ = np.linalg.lstsq(A, np.log(rows[:, 2]), rcond=None)[0]
    assert eps_power == pytest.approx(4.0, abs=0.3)
    assert r_power == pytest.approx(-6.0, abs=0.3)


def test_hermitianize_idempotent_and_fixes_hermitian(family):
    P = sphere_points(20, 5) * 0.4
    f = family.triple_at(1e-3).fields(P, 1)
    rng = np.random.default_rng(0)
    A = rng.normal(size=(4, 4, 20))
    g = Jet.constant(A + A.transpose(1, 0, 2), 1)
    h = hermitianize(g, f.I)
    assert np.max(np.abs(hermitianize(h, f.I).coeffs - h.coeffs)) <= 1e-13
    assert np.max(np.abs(hermitianize(f.g, f.I).coeffs - f.g.coeffs)) <= 1e-12


# K3 gluing

@pytest.mark.parametrize("t", [1e-4, 1e-5])
def test_K3_core_is_ale_and_source_free(family, t):
    s = GluingSchedule(t, flavor="K3")
    m = K3GluedMetric(s, family)
    r0 = np.sqrt(s.epsilon)
    P = sphere_points(200, 1) * np.linspace(0.3 * r0, r0, 200)[:, None]
    g, ref = m.fields(P, 0).g.value, m.reference(P, "ale", 0).value
    assert np.abs(g - ref).max() <= 1e-13 * np.abs(ref).max()
    assert np.abs(m.ma_source(P)).max() <= 1e-12


def test_K3_outer_deviation_tracks_eps4_r4(family):
    ratios = []
    for t in (1e-4, 1e-5):
        s = GluingSchedule(t, flavor="K3")
        m = K3GluedMetric(s, family)
        P = sphere_points(200, 1) * np.linspace(2 * np.sqrt(s.epsilon), 0.5, 200)[:, None]
        r = np.linalg.norm(P, axis=1)
        d = metric_deviation(m.fields(P, 0).g.value, m.reference(P, "hat0", 0).value)
        ratios.append((d * r ** 4).max() / s.epsilon ** 4)
        assert (np.abs(m.ma_source(P)) * r ** 4).max() <= ratios[-1] * s.epsilon ** 4
    assert ratios[0] == pytest.approx(ratios[1], rel=0.05)


# weighted Hölder norms

def _grid(s, n=400, seed=0):
    rng = np.random.default_rng(seed)
    return sphere_points(n, seed) * np.exp(rng.uniform(np.log(s.epsilon), 0.0, n))[:, None]


def test_holder_of_constant():
    s = GluingSchedule(1e-3)
    const = lambda P, order: Jet.constant(np.full(len(P), -2.5), order)
    est = weighted_holder_norm(const, s, 2, 0.5, 0.0, _grid(s))
    assert est.total == pytest.approx(2.5, abs=1e-12)


def test_holder_of_weight_power():
    s = GluingSchedule(1e-3)
    delta = -1.9
    est = weighted_holder_norm(power_field(rho_field(s), delta), s, 0, 0.0, delta, _grid(s))
    assert est.terms[0] == pytest.approx(1.0, abs=1e-12)


def test_holder_monotone_in_samples(family, background):
    s = GluingSchedule(1e-3)
    m = CscKGluedMetric(s, family, background, symmetrize=False)
    fn = lambda P, order: m.tilde(P, order) - background.metric(P, order)
    P = _grid(s, 600, 2)
    small = weighted_holder_norm(fn, s, 1, 0.5, -1.9, P[:300])
    big = weighted_holder_norm(fn, s, 1, 0.5, -1.9, P)
    assert big.total >= small.total


def test_holder_rejects_origin():
    s = GluingSchedule(1e-3)
    const = lambda P, order: Jet.constant(np.ones(len(P)), order)
    with pytest.raises(ValueError):
        weighted_holder_norm(const, s, 0, 0.5, -1.0, np.zeros((3, 4)))


def test_holder_bounded_over_decade(family, background):
    totals = []
    for t in (1e-3, 3e-4, 1e-4):
        s = GluingSchedule(t)
        m = CscKGluedMetric(s, family, background, symmetrize=False)
        fn = lambda P, order: m.tilde(P, order) - background.metric(P, order)
        totals.append(weighted_holder_norm(fn, s, 2, 0.5, -1.9, _grid(s, 1500, 3)).total)
    assert max(totals) <= 1.5 * totals[0]
