"""Curvature and characteristic forms.

Two independent routes to the Chern curvature:

* hermitian route: components h_{i jbar} with respect to the standard
  structure I0, curvature Theta_{k lbar} = -d_lbar(H^-T d_k H^T) (holomorphic
  coordinate frame, works for any I0-hermitian metric);
* real route: Levi-Civita connection of the real metric g, corrected by the
  torsion term g(D_X Y, Z) = g(LC_X Y, Z) - 1/2 domega(JX, Y, Z) for a general
  hermitian (g, J); components are read off in a complex frame of T^{1,0}.

The second Chern form is c2 = -(1/4 pi^2) P(Theta), P = ((tr Theta)^2 - tr Theta^2)/2;
densities are reported against dx1^dx2^dx3^dx4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ale import D_X1, D_X3, I0, HyperkahlerTriple, TripleJets, projected_frame, wedge_coefficient
from .jets import (ComplexJet, HermMatrix2Jet, Jet, coordinates, einsum, inv, stack, complex_stack,
                   herm_to_real, logdet)

FOUR_PI2 = 4 * math.pi ** 2
# dz1^dzb1^dz2^dzb2 = -4 dx1^dx2^dx3^dx4
COORD_FRAME_VOLUME = -4.0
# sign in front of the torsion term; fixed by requiring D J = 0
TORSION_SIGN = -1.0


class CurvatureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# metric field adaptors


class RealHermitianField:
    """Hermitian structure given by a callable X -> (g, J) of 4x4 jets."""

    def __init__(self, fn: Callable):
        self.fn = fn

    def fields(self, points, order: int = 2) -> TripleJets:
        g, J = self.fn(coordinates(np.asarray(points, dtype=float), order))
        return TripleJets(g, J, J, J)


class HermitianField:
    """I0-hermitian metric given by a callable X -> HermMatrix2Jet."""

    def __init__(self, fn: Callable, extra_order: int = 0):
        self.fn = fn
        self.extra_order = extra_order  # jet orders consumed by fn

    @classmethod
    def from_potential(cls, potential: Callable) -> "HermitianField":
        return cls(lambda X: HermMatrix2Jet.from_potential(potential(X)), extra_order=2)

    def __call__(self, X) -> HermMatrix2Jet:
        return self.fn(X)

    def herm(self, points, order: int) -> HermMatrix2Jet:
        return self.fn(coordinates(np.asarray(points, dtype=float), order + self.extra_order))

    def fields(self, points, order: int = 2) -> TripleJets:
        g = self.herm(points, order).real_metric()
        J = Jet.constant(np.broadcast_to(I0[(...,) + (None,) * (len(g.shape) - 2)], g.shape).copy(), order)
        return TripleJets(g, J, J, J)


def _real_fields(metric_field, points, order) -> TripleJets:
    if isinstance(metric_field, (HyperkahlerTriple, RealHermitianField, HermitianField)) \
            or hasattr(metric_field, "fields"):
        return metric_field.fields(points, order)
    if callable(metric_field):
        g = metric_field(coordinates(np.asarray(points, dtype=float), order))
        return TripleJets(g, None, None, None)
    raise TypeError(f"unsupported metric field {type(metric_field).__name__}")


# ---------------------------------------------------------------------------
# real curvature


def _perm(j: Jet, spec: str) -> Jet:
    a, b = spec.split("->")
    return Jet(np.einsum(f"Z{a}...->Z{b}...", j.coeffs), j.order)


def _check_metric(g: Jet):
    v = np.moveaxis(g.value, (0, 1), (-2, -1))
    if np.any(~np.isfinite(v)) or np.any(np.abs(np.linalg.det(v)) < 1e-300):
        raise CurvatureError("singular metric at point")


def levi_civita(g: Jet):
    """(g^-1, Gamma) with Gamma[a, c, b] = Gamma^a_{cb}, one order lower than g."""
    _check_metric(g)
    ginv = inv(g).truncate(g.order - 1)
    dg = stack([g.derivative(c) for c in range(4)])  # dg[c, a, b] = d_c g_ab
    low = (_perm(dg, "bdc->dbc") + _perm(dg, "cdb->dbc") - dg) * 0.5  # Gamma_{d, bc}
    return ginv, einsum("ad...,dbc...->abc...", ginv, low)


def chern_connection(g: Jet, J: Jet):
    """Connection coefficients of the Chern connection of (g, J)."""
    ginv, gam = levi_civita(g)
    W = einsum("ca...,cb...->ab...", J, g)  # omega_ab
    dW = stack([W.derivative(c) for c in range(4)])  # dW[p, q, r] = d_p W_qr
    domega = dW + _perm(dW, "qrp->pqr") + _perm(dW, "rpq->pqr")
    Jl = J.truncate(g.order - 1)
    # (s/2) J^p_c domega_{p b a}, index order [a, c, b]
    tors = einsum("pc...,pba...->acb...", Jl, domega) * (0.5 * TORSION_SIGN)
    return ginv, gam + einsum("ea...,acb...->ecb...", ginv, tors)


def riemann_from_connection(gam: Jet) -> Jet:
    """R[a, b, c, d] = R^a_{bcd}, i.e. R(d_c, d_d) d_b = R^a_{bcd} d_a."""
    dG = stack([gam.derivative(c) for c in range(4)])  # dG[c, a, d, b] = d_c Gamma^a_{db}
    g1 = gam.truncate(gam.order - 1)
    quad = einsum("ace...,edb...->abcd...", g1, g1)
    return _perm(dG, "cadb->abcd") - _perm(dG, "dacb->abcd") + quad - _perm(quad, "abdc->abcd")


def covariant_derivative_endo(gam: Jet, E: Jet) -> Jet:
    """(D_c E)^a_b as a jet with index order [c, a, b]."""
    El = E.truncate(gam.order)
    dE = stack([E.derivative(c) for c in range(4)]).truncate(gam.order)
    return dE + einsum("ace...,eb...->cab...", gam, El) - einsum("ae...,ecb...->cab...", El, gam)


def riemann_data(metric_field, points):
    """(|Rm|^2, Ric, Sc) of the real metric: full tensor norm with all indices
    raised, Ricci tensor R_bd = R^a_{bad}, scalar curvature."""
    f = _real_fields(metric_field, points, 2)
    g = f.g
    ginv, gam = levi_civita(g)
    R = riemann_from_connection(gam).value
    g0, gi = g.value, ginv.value
    Rl = np.einsum("ae...,ebcd...->abcd...", g0, R)
    Rup = np.einsum("ae...,bf...,cg...,dh...,efgh...->abcd...", gi, gi, gi, gi, Rl)
    norm2 = np.einsum("abcd...,abcd...->...", Rl, Rup)
    ric = np.einsum("abad...->bd...", R)
    sc = np.einsum("bd...,bd...->...", gi, ric)
    return norm2, ric, sc


def ricci_norm(metric_field, points) -> np.ndarray:
    """|Ric|_g = sqrt(Ric_ab Ric_cd g^ac g^bd), chart independent."""
    _, ric, _ = riemann_data(metric_field, points)
    g = _real_fields(metric_field, points, 0).g.value
    gi = np.moveaxis(np.linalg.inv(np.moveaxis(g, (0, 1), (-2, -1))), (-2, -1), (0, 1))
    return np.sqrt(np.abs(np.einsum("ab...,cd...,ac...,bd...->...", ric, ric, gi, gi)))


# ---------------------------------------------------------------------------
# Chern curvature data


@dataclass
class CurvatureData:
    """Chern curvature at a batch of points (batch axes last).

    R[i, j, k, l] = R^i_{j k lbar} in the frame ``frame_id``; ``frame_volume``
    is the coefficient of th1^thb1^th2^thb2 against dx1^dx2^dx3^dx4 for the
    dual coframe; ``rm_norm2`` is the hermitian norm sum |R^i_{jklbar}|^2 in a
    unitary frame (g(e_a, ebar_b) = delta), which is a quarter of the real
    tensor norm for Kähler metrics.
    """

    R: np.ndarray
    rm_norm2: np.ndarray
    ricci: np.ndarray
    scalar_curv: np.ndarray
    frame_id: str
    frame_volume: np.ndarray
    frame_metric: np.ndarray = field(repr=False, default=None)


def _unitary_change(H):
    """C with C^T H conj(C) = 1, batched over leading axes."""
    L = np.linalg.cholesky(H)
    return np.swapaxes(np.linalg.inv(L), -1, -2)


def _hermitian_norm(R, H):
    """Sum |R|^2 after moving to a unitary frame; R[i,j,k,l], H[a,b], batch last."""
    Rb = np.moveaxis(R, (0, 1, 2, 3), (-4, -3, -2, -1))
    Hb = np.moveaxis(H, (0, 1), (-2, -1))
    C = _unitary_change(Hb)
    Ci = np.linalg.inv(C)
    Rp = np.einsum("...ia,...abcd,...bj,...ck,...dl->...ijkl", Ci, Rb, C, C, C.conj())
    return np.sum(np.abs(Rp) ** 2, axis=(-4, -3, -2, -1))


def _finish(R, H, frame_id, vol, scalar):
    ricci = np.einsum("iikl...->kl...", R)
    return CurvatureData(R, _hermitian_norm(R, H), ricci, scalar, frame_id, vol, H)


def _frame_arrays(frame, f: TripleJets, points):
    """Frame vectors e (4, 2, batch) and duals (2, 4, batch)."""
    Ival = np.moveaxis(f.I.value, (0, 1), (-2, -1))
    pts = np.asarray(points, dtype=float).reshape(-1, 4)
    batch = Ival.shape[:-2]
    Iflat = Ival.reshape(-1, 4, 4)
    es, ds = [], []
    for n in range(len(Iflat)):
        if isinstance(frame, str) and frame == "asymptotic":
            if np.linalg.norm(pts[n]) < 1.0:
                raise CurvatureError("asymptotic frame needs r >= 1")
        if isinstance(frame, str) and frame == "coordinate":
            e1, e2, duals = projected_frame(Iflat[n], (D_X1, D_X3))
        else:
            e1, e2, duals = projected_frame(Iflat[n])
        E = np.stack([e1, e2], axis=1)
        if not isinstance(frame, str):
            E = E @ np.asarray(frame)
            basis = np.concatenate([E, E.conj()], axis=1)
            if abs(np.linalg.det(basis)) < 1e-12:
                raise CurvatureError("degenerate frame")
            duals = np.linalg.inv(basis)[:2]
        es.append(E)
        ds.append(duals)
    E = np.moveaxis(np.array(es).reshape(batch + (4, 2)), (-2, -1), (0, 1))
    D = np.moveaxis(np.array(ds).reshape(batch + (2, 4)), (-2, -1), (0, 1))
    return E, D


def chern_curvature(metric_field, point, frame="coordinate") -> CurvatureData:
    """Chern curvature R^i_{jklbar} at ``point`` (or a batch of points).

    ``metric_field`` is a :class:`HermitianField` (hermitian route, coordinate
    frame dz, dw; a 2x2 complex matrix as ``frame`` changes frame) or a
    triple / :class:`RealHermitianField` (real route; ``frame`` is
    "coordinate" for the projection of d/dx1, d/dx3 onto T^{1,0},
    "asymptotic" for the projection of d/dz0, d/dw0 (r >= 1 only), or a 2x2
    complex change applied to the latter).
    """
    point = np.asarray(point, dtype=float)
    if isinstance(metric_field, HermitianField):
        return _chern_hermitian(metric_field, point, frame)
    f = _real_fields(metric_field, point, 2)
    if f.I is None:
        raise CurvatureError("real route needs a complex structure")
    ginv, gam = chern_connection(f.g, f.I)
    Rr = riemann_from_connection(gam).value  # [a, b, c, d]
    E, D = _frame_arrays(frame, f, point)
    Rc = np.einsum("ia...,abcd...,bj...,ck...,dl...->ijkl...", D, Rr, E, E, E.conj())
    H = np.einsum("ak...,ab...,bl...->kl...", E, f.g.value, E.conj())
    th = np.concatenate([D[:1], D[:1].conj(), D[1:], D[1:].conj()], axis=0)
    vol = np.linalg.det(np.moveaxis(th, (0, 1), (-2, -1))).real
    _, _, sc = riemann_data_from_jet(f.g)
    fid = frame if isinstance(frame, str) else "custom"
    return _finish(Rc, H, fid, vol, sc)


def riemann_data_from_jet(g: Jet):
    ginv, gam = levi_civita(g)
    R = riemann_from_connection(gam).value
    ric = np.einsum("abad...->bd...", R)
    return R, ric, np.einsum("bd...,bd...->...", ginv.value, ric)


def hermitian_curvature(h: HermMatrix2Jet) -> ComplexJet:
    """Theta[i, j, k, l] = R^i_{j k lbar} in the frame d/dz, d/dw (two orders lower)."""
    H = h.entries
    Ht = ComplexJet(Jet(np.swapaxes(H.re.coeffs, 1, 2), H.order), Jet(np.swapaxes(H.im.coeffs, 1, 2), H.order))
    Hti = HermMatrix2Jet(Ht, hermitian=False).inverse().entries
    conn = []
    for d in ("z", "w"):
        dH = Ht.d(d)
        Hi = ComplexJet(Hti.re.truncate(dH.order), Hti.im.truncate(dH.order))
        conn.append(_cmatmul(Hi, dH))
    rows = []
    for k in range(2):
        rows.append([-(conn[k].d(b)) for b in ("zb", "wb")])
    # stacked as [k, l, i, j] -> reorder to [i, j, k, l]
    T = complex_stack(rows)
    perm = lambda j: Jet(np.einsum("Zklij...->Zijkl...", j.coeffs), j.order)
    return ComplexJet(perm(T.re), perm(T.im))


def _cmatmul(a: ComplexJet, b: ComplexJet) -> ComplexJet:
    s = "ij...,jk...->ik..."
    return ComplexJet(einsum(s, a.re, b.re) - einsum(s, a.im, b.im), einsum(s, a.re, b.im) + einsum(s, a.im, b.re))


def _chern_hermitian(field: HermitianField, point, frame) -> CurvatureData:
    h = field.herm(point, 2)
    T = hermitian_curvature(h)
    R = T.value
    H = 0.5 * h.entries.value  # g(d_i, dbar_j) = h_{i jbar} / 2
    vol = np.full(R.shape[4:], COORD_FRAME_VOLUME)
    if not isinstance(frame, str):
        C = np.asarray(frame, dtype=complex)
        Ci = np.linalg.inv(C)
        R = np.einsum("ia,abcd...,bj,ck,dl->ijkl...", Ci, R, C, C, C.conj())
        H = np.einsum("ak,ab...,bl->kl...", C, H, C.conj())
        vol = vol * np.abs(np.linalg.det(Ci)) ** 2
        fid = "custom"
    elif frame == "coordinate":
        fid = "coordinate"
    else:
        raise CurvatureError("hermitian route supports the coordinate frame or an explicit change of frame")
    _, _, sc = riemann_data_from_jet(h.real_metric())
    return _finish(R, H, fid, vol, sc)


# ---------------------------------------------------------------------------
# characteristic forms


def wedge11(A, B):
    """Coefficient of th1^thb1^th2^thb2 in A ^ B for (1,1)-forms A_{k lbar}, B_{k lbar}."""
    return A[0, 0] * B[1, 1] + A[1, 1] * B[0, 0] - A[0, 1] * B[1, 0] - A[1, 0] * B[0, 1]


def chern_weil_p(R):
    """P(Theta) = ((tr Theta)^2 - tr(Theta^Theta)) / 2 as a coefficient of th1^thb1^th2^thb2."""
    tr = np.einsum("iikl...->kl...", R)
    M = np.einsum("ijkl...,jimn...->klmn...", R, R)
    trsq = M[0, 0, 1, 1] + M[1, 1, 0, 0] - M[0, 1, 1, 0] - M[1, 0, 0, 1]
    return 0.5 * (wedge11(tr, tr) - trsq)


def c2_density(curv: CurvatureData) -> np.ndarray:
    """Second Chern form as a density against dx1^dx2^dx3^dx4."""
    val = -chern_weil_p(curv.R) / FOUR_PI2 * curv.frame_volume
    return np.real_if_close(val, tol=1e6).real


def c2_density_real(metric_field, points) -> np.ndarray:
    """Frame-free c2 from the real Chern curvature using complex traces
    tr_C A = (tr A - i tr(JA)) / 2 and the real 4-form wedge."""
    f = _real_fields(metric_field, points, 2)
    _, gam = chern_connection(f.g, f.I)
    R = riemann_from_connection(gam).value
    J = f.I.value
    trR = 0.5 * (np.einsum("aacd...->cd...", R) - 1j * np.einsum("ab...,bacd...->cd...", J, R))
    RR = np.einsum("abcd...,bBef...->aBcdef...", R, R)
    trRR = 0.5 * (np.einsum("aacdef...->cdef...", RR) - 1j * np.einsum("ab...,bacdef...->cdef...", J, RR))
    def wedge_pairs(M):
        return (M[0, 1, 2, 3] - M[0, 2, 1, 3] + M[0, 3, 1, 2]
                + M[1, 2, 0, 3] - M[1, 3, 0, 2] + M[2, 3, 0, 1])
    P = 0.5 * (wedge_coefficient(trR, trR) - wedge_pairs(trRR))
    return (-P / FOUR_PI2).real


def ddc_form(potential: Callable, points, order: int = 2) -> Jet:
    """Real 2-form matrix of dd^c phi (normalised by dd^c r^2 = flat form)."""
    h = HermMatrix2Jet.from_potential(potential(coordinates(np.asarray(points, dtype=float), order + 2)))
    g = h.real_metric()
    return einsum("ca...,cb...->ab...", Jet.constant(np.broadcast_to(I0[(...,) + (None,) * (len(g.shape) - 2)], g.shape).copy(), g.order), g)


def ddc_real(phi: Jet, J: Jet) -> Jet:
    """dd^c_J phi = -1/4 d(dphi o J) as a real 2-form matrix (one order lower
    than J, two lower than phi)."""
    grad = stack(phi.gradient())  # d_a phi
    Jl = J.truncate(grad.order)
    alpha = einsum("a...,ab...->b...", grad, Jl)  # (dphi o J)_b
    da = stack([alpha.derivative(a) for a in range(4)])  # da[a, b] = d_a alpha_b
    return (da - _perm(da, "ba->ab")) * (-0.25)


def ddc_11(tau: ComplexJet) -> np.ndarray:
    """dd^c of a (1,1)-form tau_{k lbar} (two orders of jets), as a density
    against dx1^dx2^dx3^dx4: (i/2) d dbar tau, wedge in e = dz1^dzb1^dz2^dzb2."""
    hol, ahol = ("z", "w"), ("zb", "wb")
    T = [[tau.d(ahol[n]).d(hol[m]) for n in range(2)] for m in range(2)]
    # T[m][n][k, l] = d_m d_nbar tau_{k lbar}; form dz^m^dzb^n^dz^k^dzb^l
    def comp(m, n, k, l):
        return T[m][n].value[k, l]
    e = comp(0, 0, 1, 1) + comp(1, 1, 0, 0) - comp(0, 1, 1, 0) - comp(1, 0, 0, 1)
    return (0.5j * e * COORD_FRAME_VOLUME)


# ---------------------------------------------------------------------------
# Bott-Chern transgression


def _herm_combine(a: HermMatrix2Jet, b: HermMatrix2Jet, s: float) -> HermMatrix2Jet:
    ea, eb = a.entries, b.entries
    return HermMatrix2Jet(ea * (1 - s) + eb * s, hermitian=False)


@dataclass
class TransgressionPath:
    """Linear path k_s = h + s (g - h) between two I0-hermitian metric fields."""

    h: Callable
    g: Callable
    nodes: int = 32

    def __post_init__(self):
        self.h = self.h if isinstance(self.h, HermitianField) else HermitianField(self.h)
        self.g = self.g if isinstance(self.g, HermitianField) else HermitianField(self.g)
        if self.h.extra_order != self.g.extra_order:
            raise CurvatureError("endpoint fields must consume the same number of jet orders")
        if self.nodes < 16:
            raise CurvatureError("s-quadrature needs at least 16 nodes")
        x, w = np.polynomial.legendre.leggauss(self.nodes)
        self.s_nodes = 0.5 * (x + 1)
        self.s_weights = 0.5 * w

    def endpoints(self, X):
        return self.h(X), self.g(X)

    def k(self, s, X) -> HermMatrix2Jet:
        hh, gg = self.endpoints(X)
        return _herm_combine(hh, gg, s)

    def N(self, s, X) -> ComplexJet:
        """N_s = kdot_s k_s^-1 = (g - h) k_s^-1."""
        hh, gg = self.endpoints(X)
        ks = _herm_combine(hh, gg, s)
        return _cmatmul(gg.entries - hh.entries, ks.inverse().entries)


def _check_positive(k: HermMatrix2Jet):
    v = k.entries.value
    H = np.moveaxis(v, (0, 1), (-2, -1))
    H = 0.5 * (H + np.swapaxes(H.conj(), -1, -2))
    if np.any(np.linalg.eigvalsh(H) <= 0):
        raise CurvatureError("k_s is not positive definite at a quadrature node")


def bott_chern_tau(path: TransgressionPath, point, order: int = 2) -> ComplexJet:
    """tau_{k lbar} with c2(g) - c2(h) = dd^c tau (repo normalisation of dd^c).

    tau = 2/(4 pi^2 i) int_0^1 [tr L tr Theta - tr(L Theta)] ds with
    L = H^-T dH^T/ds paired with the curvature of the same trivialisation.
    Returned as a complex jet of order ``order`` (2 suffices for dd^c).
    """
    X = coordinates(np.asarray(point, dtype=float), order + 2 + path.h.extra_order)
    hh, gg = path.endpoints(X)
    if np.allclose(hh.entries.re.coeffs, gg.entries.re.coeffs, atol=0, rtol=0) and \
            np.allclose(hh.entries.im.coeffs, gg.entries.im.coeffs, atol=0, rtol=0):
        z = Jet(np.zeros((hh.entries.re.coeffs.shape[0],) + hh.entries.shape), order + 2).truncate(order)
        return ComplexJet(z, z)
    dt = gg.entries - hh.entries
    dtT = _ctrans(dt)
    acc = None
    for s, w in zip(path.s_nodes, path.s_weights):
        ks = _herm_combine(hh, gg, s)
        _check_positive(ks)
        Theta = hermitian_curvature(ks)  # [i, j, k, l], order `order`
        kT_inv = HermMatrix2Jet(_ctrans(ks.entries), hermitian=False).inverse().entries
        L = _cmatmul(kT_inv, dtT)
        L = ComplexJet(L.re.truncate(order), L.im.truncate(order))
        trL = ComplexJet(*(Jet((p[0, 0] + p[1, 1]).coeffs[:, None, None], order) for p in (L.re, L.im)))
        trT = ComplexJet(_ctr(Theta.re), _ctr(Theta.im))
        LT = _cein("ij...,jikl...->kl...", L, Theta)
        term = trT * trL - LT
        acc = term * w if acc is None else acc + term * w
    c = 2.0 / FOUR_PI2
    # divide by i
    return ComplexJet(acc.im * c, -acc.re * c)


def _ctrans(c: ComplexJet) -> ComplexJet:
    return ComplexJet(Jet(np.swapaxes(c.re.coeffs, 1, 2), c.re.order), Jet(np.swapaxes(c.im.coeffs, 1, 2), c.im.order))


def _ctr(j: Jet) -> Jet:
    return Jet(np.einsum("Ziikl...->Zkl...", j.coeffs), j.order)


def _cein(spec, a: ComplexJet, b: ComplexJet) -> ComplexJet:
    return ComplexJet(einsum(spec, a.re, b.re) - einsum(spec, a.im, b.im), einsum(spec, a.re, b.im) + einsum(spec, a.im, b.re))


def c2_hermitian_field(fn, points) -> np.ndarray:
    fn = fn if isinstance(fn, HermitianField) else HermitianField(fn)
    return c2_density(chern_curvature(fn, points))


def bott_chern_residual(path: TransgressionPath, points) -> np.ndarray:
    """|c2(g) - c2(h) - dd^c tau| / max|c2(g) - c2(h)| at each point."""
    points = np.asarray(points, dtype=float)
    diff = c2_hermitian_field(path.g, points) - c2_hermitian_field(path.h, points)
    tau = bott_chern_tau(path, points)
    rhs = ddc_11(tau)
    scale = max(np.max(np.abs(diff)), 1e-300)
    return np.abs(diff - rhs) / scale, diff, rhs


# ---------------------------------------------------------------------------
# Monge-Ampère source


def ma_source(omega_tilde, Omega, point) -> np.ndarray:
    """f = log(Omega ^ Omegabar / (2 omega^2)).

    ``omega_tilde`` and ``Omega`` are callables returning 2-form matrices
    (real, resp. complex; tensor axes first).  The factor 2 makes f vanish for
    a hyperkähler pair (omega_I, omega_J + i omega_K).
    """
    w = np.asarray(omega_tilde(point))
    O = np.asarray(Omega(point))
    ww = wedge_coefficient(w, w)
    if np.any(np.abs(ww) < 1e-300):
        raise CurvatureError("degenerate Kähler form")
    oo = wedge_coefficient(O, O.conj()).real
    return np.log(oo / (2.0 * ww))
