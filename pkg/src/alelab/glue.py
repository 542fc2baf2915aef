"""Glued metric families near a degenerating A1 point.

Two constructions live here:

* the cscK approximant: the ALE metric on the core r <= b, the background
  orbifold metric g0 = dd^c_0(r^2 + eta) beyond 4b, cut-off interpolations in
  between, then averaged over the fibre complex structure J_t;
* the almost Ricci-flat metric dd^c_t(r^2 + phi~_t), where the potential is
  spliced from the ALE correction phi_zeta, a background potential and its
  t-deformation.

Radii are Euclidean radii on the C^2 cover.  All fields are returned as real
4x4 metric jets together with the complex structure they are hermitian for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.spatial import cKDTree

from .ade import ZetaPath, a1_scalar
from .ale import I0, GeometryError, TripleJets, eh_triple, wedge_coefficient
from .chern import ddc_real, FOUR_PI2
from .jets import HermMatrix2Jet, Jet, coordinates, einsum, inv, stack

_EDGE = 0.01  # below this distance to 0 or 1 the base step is 0 or 1 to double precision


class ScheduleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# cut-off


def _step_values(v):
    v = np.asarray(v, dtype=float)
    mid = (v > _EDGE) & (v < 1 - _EDGE)
    vs = np.where(mid, v, 0.5)
    y = 1.0 / (1.0 - vs) - 1.0 / vs
    out = 1.0 / (1.0 + np.exp(-y))
    return np.where(mid, out, np.where(v >= 1 - _EDGE, 1.0, 0.0))


def smooth_step(x):
    """chi(x) = s(x) / (s(x) + s(1 - x)), s(x) = exp(-1/x) for x > 0.

    Works on floats, arrays and jets.  Within 0.01 of the ends the value is
    replaced by the exact 0 or 1; the neglected part is below exp(-90).
    """
    if not isinstance(x, Jet):
        return _step_values(x)
    v = np.asarray(x.value, dtype=float)
    mid = (v > _EDGE) & (v < 1 - _EDGE)
    xs = Jet(x.coeffs.copy(), x.order)
    xs.coeffs[0] = np.where(mid, v, 0.5)
    y = (1.0 - xs).reciprocal() - xs.reciprocal()
    chi = ((-y).exp() + 1.0).reciprocal()
    c = np.where(mid, chi.coeffs, 0.0)
    c[0] = np.where(v >= 1 - _EDGE, 1.0, c[0])
    return Jet(c, x.order)


def cutoff(x, x1: float, x2: float, order: int = 4):
    """chi_{x1,x2}(x) = chi((x - x1) / (x2 - x1)).

    ``x`` may be a jet (composition) or a real number; a real number is
    promoted to the jet of the identity, so the result carries the
    derivatives d^k chi_{x1,x2}/dx^k in its first slot.
    """
    if not x1 < x2:
        raise ValueError(f"cut-off needs x1 < x2, got {x1} >= {x2}")
    if not isinstance(x, Jet):
        x = coordinates(np.stack([np.asarray(x, dtype=float)] + [np.zeros_like(np.asarray(x, dtype=float))] * 3, -1),
                        order)[0]
    return smooth_step((x - x1) * (1.0 / (x2 - x1)))


# ---------------------------------------------------------------------------
# schedule and regions

REGIONS = ("core", "inner_annulus", "transition_annulus", "outer_annulus", "background", "outside")


def validity_bound(flavor: str, p: int, beta: float) -> float:
    """Largest admissible t, shrunk by 10%: 4b < 1 (cscK), 2 eps^1/2 < 1/2 (K3)."""
    if flavor == "cscK":
        return 0.9 * 4.0 ** (-2.0 / (p * beta))
    if flavor == "K3":
        return 0.9 * 16.0 ** (-2.0 / p)
    raise ScheduleError(f"unknown flavor {flavor!r}")


@dataclass(frozen=True)
class GluingSchedule:
    t: float
    p: int = 1
    d: int = 1
    beta: float = 0.51
    delta: float = -1.9
    flavor: str = "cscK"

    def __post_init__(self):
        if self.flavor not in ("cscK", "K3"):
            raise ScheduleError(f"unknown flavor {self.flavor!r}")
        if not 0 < self.t < 1:
            raise ScheduleError(f"t must lie in (0, 1), got {self.t}")
        if self.p < 1 or self.d < 1:
            raise ScheduleError("p and d are positive integers")
        if not self.beta > 0.5:
            raise ScheduleError("beta must exceed 1/2")
        if not -2 < self.delta < 0:
            raise ScheduleError("delta must lie in (-2, 0)")
        tmax = validity_bound(self.flavor, self.p, self.beta)
        if self.t > tmax:
            raise ScheduleError(f"t = {self.t:g} beyond the validity bound {tmax:g} for {self.flavor}")

    @property
    def epsilon(self) -> float:
        return self.t ** (self.p / 2)

    @property
    def b(self) -> float:
        return self.epsilon ** self.beta

    @property
    def boundaries(self) -> tuple:
        if self.flavor == "cscK":
            b = self.b
            return (b, 2 * b, 4 * b, 1.0)
        s = math.sqrt(self.epsilon)
        return (s, 2 * s, 0.5, 0.75, 1.0)

    @property
    def region_names(self) -> tuple:
        if self.flavor == "cscK":
            return ("core", "inner_annulus", "transition_annulus", "background", "outside")
        return ("core", "inner_annulus", "outer_annulus", "transition_annulus", "background", "outside")

    def region_intervals(self) -> dict:
        edges = (0.0,) + self.boundaries + (math.inf,)
        return {name: (edges[i], edges[i + 1]) for i, name in enumerate(self.region_names)}

    def with_t(self, t: float) -> "GluingSchedule":
        return GluingSchedule(t, self.p, self.d, self.beta, self.delta, self.flavor)


def classify_region(r, schedule: GluingSchedule):
    """Region tag for radius r (right-closed intervals); arrays give arrays."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("radius must be positive")
    idx = np.searchsorted(np.asarray(schedule.boundaries), r_arr, side="left")
    names = np.array(schedule.region_names, dtype=object)
    if np.ndim(idx) == 0:
        return str(names[int(idx)])
    return names[idx]


def weight_rho(r, schedule: GluingSchedule):
    """rho_t: eps for r <= eps, r on [eps, 1], 1 beyond."""
    return np.clip(np.asarray(r, dtype=float), schedule.epsilon, 1.0)


# ---------------------------------------------------------------------------
# ALE family along a zeta path


class ALEFamily:
    """Rotated Eguchi-Hanson triples along an A1 period path.

    The period (zeta_r, zeta_c) is reduced to the A1 scalars by pairing with
    the unit root; the triple has a^2 = |(zeta_r, zeta_c)| and distinguished
    direction (zeta_r, Re zeta_c, Im zeta_c) / a^2.
    """

    def __init__(self, path: ZetaPath):
        if path.kind != "A" or path.rank != 1:
            raise GeometryError("instanton metrics are realised for A1 only")
        self.path = path
        self._cache: dict = {}

    def periods(self, t: float):
        zr, zc = self.path.evaluate(t)
        xr = float(zr[0] - zr[1]) / math.sqrt(2.0)
        return xr, a1_scalar(zc)

    def triple_at(self, t: float):
        if t not in self._cache:
            xr, c = self.periods(t)
            n = np.array([xr, c.real, c.imag])
            a2 = float(np.linalg.norm(n))
            if a2 == 0:
                raise GeometryError(f"period vanishes at t = {t}")
            self._cache[t] = eh_triple(math.sqrt(a2), tuple(n / a2))
        return self._cache[t]

    def embedding(self, t: float, points) -> np.ndarray:
        """Holomorphic coordinates (x, y, z) of the fibre in C^3 with
        xy - z^2 = zeta^2 / 4, for a deformation period (zeta_r = 0)."""
        xr, c = self.periods(t)
        if xr != 0:
            raise GeometryError("embedding implemented for deformation periods (zeta_r = 0)")
        P = np.asarray(points, dtype=float)
        z = P[..., 0] + 1j * P[..., 1]
        w = P[..., 2] + 1j * P[..., 3]
        u = np.sum(P * P, axis=-1)
        S = np.sqrt(u * u + abs(c) ** 2)
        k = c * c / (S + u)
        hol = np.stack([z * z, w * w, z * w])
        ahol = np.stack([np.conj(w) ** 2, np.conj(z) ** 2, -np.conj(z * w)])
        return ((S + u) * hol + k * ahol) / (2 * u)

    def ambient_radius(self, t: float, r):
        """(|x|^2 + |y|^2 + 2|z|^2)^(1/4) pulled back to the chart; equals r at t = 0."""
        xr, c = self.periods(t)
        if xr != 0:
            raise GeometryError("ambient radius implemented for deformation periods (zeta_r = 0)")
        r = np.asarray(r, dtype=float)
        return (r ** 4 + 0.5 * abs(c) ** 2) ** 0.25


# ---------------------------------------------------------------------------
# background orbifold metric


def _as_matrix_factor(s: Jet) -> Jet:
    return Jet(s.coeffs[:, None, None], s.order)


def _u(X):
    return X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]


def _metric_from_potential(pot: Jet) -> Jet:
    return HermMatrix2Jet.from_potential(pot).real_metric()


def _I0_jet(order, batch_shape):
    return Jet.constant(np.broadcast_to(I0[(...,) + (None,) * len(batch_shape)], (4, 4) + tuple(batch_shape)).copy(),
                        order)


@dataclass
class BackgroundOrbifoldMetric:
    """g0 = dd^c_0(r^2 + eta), eta Gamma-invariant and O(r^4); default 0.1 r^4."""

    eta: Callable | None = None
    c: float = 0.1

    def eta_of(self, X) -> Jet:
        if self.eta is not None:
            return self.eta(X)
        u = _u(X)
        return u * u * self.c

    def potential(self, X) -> Jet:
        return _u(X) + self.eta_of(X)

    def metric(self, points, order: int = 2) -> Jet:
        return _metric_from_potential(self.potential(coordinates(np.asarray(points, dtype=float), order + 2)))

    def fields(self, points, order: int = 2) -> TripleJets:
        g = self.metric(points, order)
        I = _I0_jet(order, g.shape[2:])
        return TripleJets(g, I, I, I)

    def check(self, n: int = 2000, seed: int = 0):
        """(min eigenvalue of g0 on r <= 1, C with |eta| <= C r^4), sampled."""
        rng = np.random.default_rng(seed)
        P = rng.normal(size=(n, 4))
        P *= (rng.uniform(0.05, 1.0, n) / np.linalg.norm(P, axis=1))[:, None]
        g = np.moveaxis(self.metric(P, 0).value, (0, 1), (-2, -1))
        lam = float(np.linalg.eigvalsh(g).min())
        eta = self.eta_of(coordinates(P, 0)).value
        C = float(np.max(np.abs(eta) / np.sum(P * P, axis=1) ** 2))
        return lam, C


# ---------------------------------------------------------------------------
# hermitianization


def hermitianize(g: Jet, J: Jet) -> Jet:
    """h(u, v) = (g(Ju, Jv) + g(u, v)) / 2."""
    J = J.truncate(min(J.order, g.order))
    g = g.truncate(J.order)
    JgJ = einsum("ca...,cb...->ab...", J, einsum("cd...,db...->cb...", g, J))
    return (JgJ + g) * 0.5


# ---------------------------------------------------------------------------
# piecewise assembly


def _flat_points(points):
    P = np.asarray(points, dtype=float)
    return P.reshape(-1, 4), P.shape[:-1]


def _assemble(parts, n, order, tensor_shape, batch_shape) -> Jet:
    """Scatter per-group jets (index array, jet) into one jet over n points."""
    from .jets import n_coeffs
    c = np.zeros((n_coeffs(order),) + tuple(tensor_shape) + (n,))
    for idx, jet in parts:
        c[..., idx] = jet.truncate(order).coeffs
    return Jet(c.reshape(c.shape[:-1] + tuple(batch_shape)), order)


class CscKGluedMetric:
    """h_t (or h~_t with ``symmetrize=False``) on the chart, as (g, J_t)."""

    def __init__(self, schedule: GluingSchedule, family: ALEFamily,
                 background: BackgroundOrbifoldMetric | None = None, symmetrize: bool = True):
        if schedule.flavor != "cscK":
            raise ScheduleError("cscK glued metric needs a cscK schedule")
        self.schedule = schedule
        self.family = family
        self.background = background or BackgroundOrbifoldMetric()
        self.symmetrize = symmetrize
        self.triple = family.triple_at(schedule.t)

    def _piece(self, name, P, order):
        b = self.schedule.b
        if name == "core":
            return self.triple.fields(P, order).g
        if name == "inner_annulus":
            X = coordinates(P, order)
            r = _u(X).sqrt()
            chi = cutoff(r, b, 2 * b)
            gz = self.triple.fields(P, order).g
            eye = Jet.constant(np.broadcast_to(np.eye(4)[..., None], (4, 4, len(P))).copy(), order)
            return eye + (gz - eye) * _as_matrix_factor(1.0 - chi)
        if name == "transition_annulus":
            X = coordinates(P, order + 2)
            r = _u(X).sqrt()
            chi = cutoff(r, 2 * b, 4 * b)
            return _metric_from_potential(_u(X) + chi * self.background.eta_of(X))
        return self.background.metric(P, order)

    def tilde(self, points, order: int = 2) -> Jet:
        P, batch = _flat_points(points)
        r = np.linalg.norm(P, axis=1)
        if np.any(r <= 0):
            raise ValueError("the chart excludes the origin")
        tags = classify_region(r, self.schedule)
        parts = []
        for name in set(tags.tolist()):
            idx = np.nonzero(tags == name)[0]
            parts.append((idx, self._piece(name, P[idx], order)))
        return _assemble(parts, len(P), order, (4, 4), batch)

    def fields(self, points, order: int = 2) -> TripleJets:
        J = self.triple.fields(points, order).I
        g = self.tilde(points, order)
        if self.symmetrize:
            g = hermitianize(g, J)
        return TripleJets(g, J, J, J)


def glued_metric_cscK(points, schedule: GluingSchedule, family: ALEFamily,
                      background: BackgroundOrbifoldMetric | None = None, order: int = 2,
                      symmetrize: bool = True) -> TripleJets:
    return CscKGluedMetric(schedule, family, background, symmetrize).fields(points, order)


# ---------------------------------------------------------------------------
# almost Ricci-flat family


def harmonic_quartic(X) -> Jet:
    """|z|^4 + |w|^4 - 4|z|^2|w|^2: harmonic, Gamma-invariant, not pluriharmonic."""
    a = X[0] * X[0] + X[1] * X[1]
    c = X[2] * X[2] + X[3] * X[3]
    return a * a + c * c - a * c * 4.0


def shear_potential(lam: float = 0.5) -> Callable:
    """|z + lam w^3|^2 + |w|^2 - r^2: the flat metric in the holomorphic,
    volume-preserving coordinates (z + lam w^3, w); nonzero at order r^4."""

    def phi(X):
        # Re(conj(z) w^3) with z = X0 + i X1, w = X2 + i X3
        w2r = X[2] * X[2] - X[3] * X[3]
        w2i = X[2] * X[3] * 2.0
        w3r = w2r * X[2] - w2i * X[3]
        w3i = w2r * X[3] + w2i * X[2]
        re = X[0] * w3r + X[1] * w3i
        aw = X[2] * X[2] + X[3] * X[3]
        return re * (2.0 * lam) + aw * aw * aw * (lam * lam)

    return phi


def zero_potential(X) -> Jet:
    return X[0] * 0.0


def radial_quartic(c: float = 0.1) -> Callable:
    def phi(X):
        u = _u(X)
        return u * u * c
    return phi


BACKGROUND_POTENTIALS = {"flat": lambda: zero_potential, "shear": shear_potential, "radial": radial_quartic}


def metric_from_form(omega: Jet, J: Jet) -> Jet:
    """g = -J^T omega for omega(u, v) = g(Ju, v)."""
    J = J.truncate(omega.order)
    return einsum("ca...,cb...->ab...", J, omega) * -1.0


class K3GluedMetric:
    """g~_t = dd^c_t(r^2 + phi~_t), J_t the ALE structure at t.

    ``hat_phi0`` stands in for the background Ricci-flat potential and
    ``psi`` for its deformation, phi^_t = phi^_0 + t^q psi.  Default: flat
    orbifold background (phi^_0 = 0, exactly Ricci-flat), the harmonic
    quartic (Ricci-flat to first order) and q = 2p, so the background moves
    at the rate |zeta(t)|^2 = eps^4 of the complex structure itself.  q = 1
    gives a background that moves linearly in t; the source on the
    {1/2 <= r <= 3/4} band is then O(t) instead of O(eps^4).
    """

    def __init__(self, schedule: GluingSchedule, family: ALEFamily,
                 hat_phi0: Callable | None = None, psi: Callable | None = None, psi_scale: float = 1.0,
                 deformation_power: float | None = None):
        if schedule.flavor != "K3":
            raise ScheduleError("K3 glued metric needs a K3 schedule")
        self.schedule = schedule
        self.family = family
        self.hat_phi0 = hat_phi0 or zero_potential
        self.psi = psi or harmonic_quartic
        self.psi_scale = psi_scale
        self.deformation_power = 2.0 * schedule.p if deformation_power is None else float(deformation_power)
        self.triple = family.triple_at(schedule.t)

    def hat_phi_t(self, X) -> Jet:
        return self.hat_phi0(X) + self.psi(X) * (self.schedule.t ** self.deformation_power * self.psi_scale)

    def potential(self, points, order: int) -> Jet:
        """r^2 + phi~_t as a jet of the given order."""
        P = np.asarray(points, dtype=float)
        X = coordinates(P, order)
        u = _u(X)
        r = u.sqrt()
        s = math.sqrt(self.schedule.epsilon)
        chi1 = cutoff(r, s, 2 * s)
        chi2 = cutoff(r, 0.5, 0.75)
        phiz = self.triple.ale_potential(P, order)
        phi = (1.0 - chi1) * phiz + chi1 * (1.0 - chi2) * self.hat_phi0(X) + chi2 * self.hat_phi_t(X)
        return u + phi

    def kahler_form(self, points, order: int = 2) -> Jet:
        J = self.triple.fields(points, order + 1).I
        return ddc_real(self.potential(points, order + 2), J)

    def fields(self, points, order: int = 2) -> TripleJets:
        J = self.triple.fields(points, order + 1).I
        g = metric_from_form(ddc_real(self.potential(points, order + 2), J), J)
        J = J.truncate(g.order)
        return TripleJets(g, J, J, J)

    def reference(self, points, which: str = "hat0", order: int = 2) -> Jet:
        """Comparison metrics: 'hat0' = dd^c_0(r^2 + phi^_0), 'hat_t' =
        dd^c_t(r^2 + phi^_t), 'ale' = g_zeta(t)."""
        P = np.asarray(points, dtype=float)
        if which == "ale":
            return self.triple.fields(P, order).g
        X = coordinates(P, order + 2)
        if which == "hat0":
            return _metric_from_potential(_u(X) + self.hat_phi0(X))
        if which == "hat_t":
            J = self.triple.fields(P, order + 1).I
            return metric_from_form(ddc_real(_u(X) + self.hat_phi_t(X), J), J)
        raise ValueError(which)

    def ma_source(self, points) -> np.ndarray:
        """f_t = log(Omega_t ^ Omegabar_t / omega~_t^2) with Omega_t the ALE
        holomorphic 2-form normalised so that Omega ^ Omegabar = 2 omega_ALE^2
        in the 4-form coefficient convention used here."""
        P = np.asarray(points, dtype=float)
        f = self.triple.fields(P, 1)
        J = f.I
        w = ddc_real(self.potential(P, 2), J).value
        oJ = f.kahler_form("J").value
        oK = f.kahler_form("K").value
        oo = wedge_coefficient(oJ + 1j * oK, oJ - 1j * oK).real
        ww = wedge_coefficient(w, w)
        if np.any(np.abs(ww) < 1e-300):
            raise ValueError("degenerate glued Kähler form")
        return np.log(oo / (2.0 * ww))

    def volume_density(self, points) -> np.ndarray:
        """sqrt(det g~_t) against dx1..dx4."""
        g = np.moveaxis(self.fields(points, 0).g.value, (0, 1), (-2, -1))
        return np.sqrt(np.linalg.det(g))


def glued_metric_K3(points, schedule: GluingSchedule, family: ALEFamily, hat_phi0: Callable | None = None,
                    psi: Callable | None = None, order: int = 2) -> TripleJets:
    return K3GluedMetric(schedule, family, hat_phi0, psi).fields(points, order)


# ---------------------------------------------------------------------------
# diagnostics


def metric_deviation(g: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """|g - ref| measured by ref: sqrt(tr(ref^-1 D ref^-1 D)), batch last."""
    G = np.moveaxis(np.asarray(g), (0, 1), (-2, -1))
    R = np.moveaxis(np.asarray(ref), (0, 1), (-2, -1))
    Ri = np.linalg.inv(R)
    M = Ri @ (G - R)
    return np.sqrt(np.abs(np.einsum("...ij,...ji->...", M, M)))


def min_eigenvalue(g: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(np.moveaxis(np.asarray(g), (0, 1), (-2, -1)))[..., 0]


def sphere_points(n: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    P = rng.normal(size=(n, 4))
    return P / np.linalg.norm(P, axis=1)[:, None]


def seam_audit(metric, schedule: GluingSchedule, n_dirs: int = 8, gap: float = 1e-6, seed: int = 0):
    """Rows (r, region, min-eigenvalue, seam-jump) at every interior seam.

    The jump is the largest metric-component change between r - gap and
    r + gap along the sampled directions.
    """
    dirs = sphere_points(n_dirs, seed)
    rows = []
    for rs in schedule.boundaries[:-1]:
        lo = metric.fields(dirs * (rs - gap), 0).g.value
        hi = metric.fields(dirs * (rs + gap), 0).g.value
        jump = float(np.max(np.abs(hi - lo)))
        lam = float(min(min_eigenvalue(lo).min(), min_eigenvalue(hi).min()))
        rows.append((rs, classify_region(rs, schedule), lam, jump))
    return rows


# ---------------------------------------------------------------------------
# weighted Hölder norms


def _derivative_norms(jet: Jet, k: int) -> list[np.ndarray]:
    """Euclidean norms |d^j f| (all index orderings) for j = 0..k; batch is the
    last axis, tensor components are summed."""
    from .jets import tables
    t = tables(jet.order)
    out = []
    for j in range(k + 1):
        acc = 0.0
        for i, alpha in enumerate(t.multi.tolist()):
            if sum(alpha) != j:
                continue
            mult = math.factorial(j) / math.prod(math.factorial(a) for a in alpha)
            part = jet.coeffs[i] * t.fact[i]
            acc = acc + mult * part ** 2
        acc = np.asarray(acc)
        while acc.ndim > 1:
            acc = acc.sum(axis=0)
        out.append(np.sqrt(acc))
    return out


def _top_tensor(jet: Jet, k: int) -> np.ndarray:
    """All order-k partials and components flattened, shape (n, m)."""
    from .jets import tables
    t = tables(jet.order)
    rows = []
    for i, alpha in enumerate(t.multi.tolist()):
        if sum(alpha) == k:
            mult = math.sqrt(math.factorial(k) / math.prod(math.factorial(a) for a in alpha))
            rows.append((jet.coeffs[i] * t.fact[i] * mult).reshape(-1, jet.coeffs.shape[-1]))
    return np.concatenate(rows, axis=0).T


@dataclass
class HolderEstimate:
    total: float
    terms: list = field(default_factory=list)  # sup rho^{j - delta} |d^j f|, j = 0..k
    holder: float = 0.0
    n_pairs: int = 0


def weighted_holder_norm(field_fn: Callable, schedule: GluingSchedule, k: int, alpha: float, delta: float,
                         sample_plan) -> HolderEstimate:
    """Sampled weighted C^{k,alpha}_delta norm of a chart field.

    ``field_fn(points, order)`` returns a jet (scalar or tensor) over the
    sample points.  Derivatives are Euclidean partials; the Hölder quotient
    runs over sample pairs with |x - y| <= min(rho(x), rho(y)) / 2, weighted
    by min(rho)^{k + alpha - delta}.  Adding samples never lowers the result.
    """
    if k > 2 or k < 0:
        raise ValueError("k must be 0, 1 or 2")
    P = np.asarray(sample_plan, dtype=float).reshape(-1, 4)
    r = np.linalg.norm(P, axis=1)
    if np.any(r <= 0):
        raise ValueError("sample plan touches the origin")
    jet = field_fn(P, k)
    jet = Jet(jet.coeffs.reshape(jet.coeffs.shape[:-1] + (len(P),)) if jet.coeffs.shape[-1] != len(P)
              else jet.coeffs, jet.order)
    rho = weight_rho(r, schedule)
    norms = _derivative_norms(jet, k)
    terms = [float(np.max(rho ** (j - delta) * norms[j])) for j in range(k + 1)]
    T = _top_tensor(jet, k) * (rho ** (k + alpha - delta))[:, None]
    holder, npairs = 0.0, 0
    if len(P) > 1 and alpha > 0:
        tree = cKDTree(P)
        pairs = tree.query_pairs(0.5 * float(rho.max()), output_type="ndarray")
        if len(pairs):
            i, j = pairs[:, 0], pairs[:, 1]
            dist = np.linalg.norm(P[i] - P[j], axis=1)
            ok = (dist <= 0.5 * np.minimum(rho[i], rho[j])) & (dist > 0)
            i, j, dist = i[ok], j[ok], dist[ok]
            npairs = len(i)
            if npairs:
                wmin = np.minimum(rho[i], rho[j]) ** (k + alpha - delta)
                # weight each side by the common min(rho) so the quotient is symmetric
                Ti = T[i] / (rho[i] ** (k + alpha - delta))[:, None]
                Tj = T[j] / (rho[j] ** (k + alpha - delta))[:, None]
                q = wmin * np.linalg.norm(Ti - Tj, axis=1) / dist ** alpha
                holder = float(q.max())
    return HolderEstimate(sum(terms) + holder, terms, holder, npairs)


def rho_field(schedule: GluingSchedule) -> Callable:
    """rho_t as a chart field (piecewise: constant eps, r, constant 1)."""

    def fn(points, order):
        P = np.asarray(points, dtype=float)
        X = coordinates(P, order)
        r = _u(X).sqrt()
        v = r.value
        c = r.coeffs.copy()
        lo, hi = v <= schedule.epsilon, v >= 1.0
        c[1:] = np.where(lo | hi, 0.0, c[1:])
        c[0] = np.where(lo, schedule.epsilon, np.where(hi, 1.0, c[0]))
        return Jet(c, order)

    return fn


def power_field(base: Callable, q: float) -> Callable:
    def fn(points, order):
        return base(points, order) ** q
    return fn
