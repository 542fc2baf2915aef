"""Closed-form ALE hyperkähler geometry on a chart of the C^2 cover.

Conventions used across the package:

* chart coordinates x = (x1, x2, x3, x4), z = x1 + i x2, w = x3 + i x4;
* the standard complex structure I0 sends d1 -> d2 and d3 -> d4;
* a Kähler form and its metric are related by omega(u, v) = g(J u, v), so as
  matrices W = J^T g and J = -g^{-1} W;
* dd^c phi = -1/4 d(d phi o J), normalised so that dd^c r^2 is the flat form
  dx1^dx2 + dx3^dx4;
* Vol = omega^2 / 2, which equals the Riemannian volume form.

The Eguchi-Hanson metric of scale a is the Kähler metric of the potential
Phi(u) = sqrt(u^2 + a^4) + a^2 log(u / (sqrt(u^2 + a^4) + a^2)), u = r^2,
whose complex Hessian has determinant one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .jets import (ComplexJet, HermMatrix2Jet, Jet, coordinates, einsum, inv,
                   matmul, stack, transpose)

# flat structures; columns are images of the coordinate vectors
I0 = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float)
# omega_J = Re(dz^dw) = dx1^dx3 - dx2^dx4, omega_K = Im(dz^dw) = dx1^dx4 + dx2^dx3
W_J = np.zeros((4, 4))
W_J[0, 2], W_J[1, 3] = 1.0, -1.0
W_J -= W_J.T
W_K = np.zeros((4, 4))
W_K[0, 3], W_K[1, 2] = 1.0, 1.0
W_K -= W_K.T
W_I0 = I0.T.copy()  # flat Kaehler form dx1^dx2 + dx3^dx4
J0 = -W_J
K0 = -W_K


class GeometryError(ValueError):
    pass


def radius(points) -> np.ndarray:
    return np.linalg.norm(np.asarray(points, dtype=float), axis=-1)


def gamma_generator(n: int) -> np.ndarray:
    """Real 4x4 matrix of (z, w) -> (e^{2 pi i/n} z, e^{-2 pi i/n} w)."""
    c, s = math.cos(2 * math.pi / n), math.sin(2 * math.pi / n)
    return np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, c, s], [0, 0, -s, c]])


@dataclass(frozen=True)
class ALEChart:
    """A point of the C^2 cover away from the origin."""

    gamma_kind: str
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != 4:
            raise GeometryError("chart points have four real coordinates")
        if self.r <= 0:
            raise GeometryError("the origin is not a chart point")

    @property
    def r(self) -> float:
        return float(np.linalg.norm(self.coords))

    @property
    def z(self) -> complex:
        return complex(self.coords[0], self.coords[1])

    @property
    def w(self) -> complex:
        return complex(self.coords[2], self.coords[3])

    def act(self, k: int = 1) -> "ALEChart":
        """Apply the k-th power of the generator of the cyclic group."""
        if not self.gamma_kind.upper().startswith("A"):
            raise GeometryError("group action implemented for cyclic (type A) groups")
        n = int(self.gamma_kind[1:]) + 1
        g = np.linalg.matrix_power(gamma_generator(n), k)
        return ALEChart(self.gamma_kind, tuple(g @ np.asarray(self.coords)))


# ---------------------------------------------------------------------------
# quaternion helpers


def quat_mul(p, q):
    p0, p1, p2, p3 = p
    q0, q1, q2, q3 = q
    return np.array([
        p0 * q0 - p1 * q1 - p2 * q2 - p3 * q3,
        p0 * q1 + p1 * q0 + p2 * q3 - p3 * q2,
        p0 * q2 - p1 * q3 + p2 * q0 + p3 * q1,
        p0 * q3 + p1 * q2 - p2 * q1 + p3 * q0,
    ])


def quat_to_rotation(q) -> np.ndarray:
    """Rotation matrix of v -> q v q^-1 on imaginary quaternions."""
    q = np.asarray(q, dtype=float) / np.linalg.norm(q)
    cols = []
    for e in np.eye(3):
        v = quat_mul(quat_mul(q, np.concatenate([[0.0], e])), q * np.array([1, -1, -1, -1]))
        cols.append(v[1:])
    return np.array(cols).T


def rotation_quaternion(direction) -> np.ndarray:
    """A unit quaternion q with q i q^-1 = direction."""
    n = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise GeometryError("direction must be a unit vector")
    if n[0] < -1 + 1e-12:
        return np.array([0.0, 0.0, 1.0, 0.0])
    q = np.array([1.0 + n[0], 0.0, -n[2], n[1]])
    return q / np.linalg.norm(q)


def left_mult(q) -> np.ndarray:
    """Matrix of left multiplication by q when i, j, k act as I0, J0, K0."""
    return q[0] * np.eye(4) + q[1] * I0 + q[2] * J0 + q[3] * K0


# ---------------------------------------------------------------------------
# evaluated triple


@dataclass
class TripleJets:
    """Jets of all triple fields at a batch of points (tensors first)."""

    g: Jet
    I: Jet
    J: Jet
    K: Jet

    @property
    def structures(self):
        return (self.I, self.J, self.K)

    def kahler_form(self, which: str) -> Jet:
        X = {"I": self.I, "J": self.J, "K": self.K}[which]
        return einsum("ca...,cb...->ab...", X, self.g)


def _pullback_tensor(kind: str, m: Jet, A: np.ndarray, Ainv: np.ndarray) -> Jet:
    if kind == "covariant":
        return Jet(np.einsum("ca,Zcd...,db->Zab...", A, m.coeffs, A), m.order)
    if kind == "endomorphism":
        return Jet(np.einsum("ac,Zcd...,db->Zab...", Ainv, m.coeffs, A), m.order)
    raise ValueError(kind)


def _linear_coords(points, order: int, A: np.ndarray) -> list[Jet]:
    y = coordinates(points, order)
    return [sum((y[b] * A[a, b] for b in range(4) if A[a, b] != 0), Jet.constant(np.zeros(np.shape(points)[:-1]), order))
            for a in range(4)]


class HyperkahlerTriple:
    """Base class: fields are computed in 'source' coordinates x and pulled
    back along a linear map x = A y."""

    A: np.ndarray = np.eye(4)

    def _source_fields(self, X: list[Jet]) -> TripleJets:  # pragma: no cover - abstract
        raise NotImplementedError

    def _source_potential(self, X: list[Jet]) -> Jet:
        raise GeometryError(f"{type(self).__name__} has no closed-form Kähler potential")

    # public API ---------------------------------------------------------
    def fields(self, points, order: int = 2) -> TripleJets:
        points = np.asarray(points, dtype=float)
        X = _linear_coords(points, order, self.A)
        src = self._source_fields(X)
        Ainv = np.linalg.inv(self.A)
        g = _pullback_tensor("covariant", src.g, self.A, Ainv)
        return TripleJets(g, *(_pullback_tensor("endomorphism", E, self.A, Ainv) for E in src.structures))

    def metric(self, points, order: int = 2) -> Jet:
        return self.fields(points, order).g

    def kahler_potential(self, points, order: int = 4) -> Jet:
        """Potential of the distinguished Kähler form w.r.t. the distinguished
        complex structure (pulls back as a scalar)."""
        X = _linear_coords(np.asarray(points, dtype=float), order, self.A)
        return self._source_potential(X)

    def with_linear_map(self, A) -> "HyperkahlerTriple":
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new.A = np.asarray(A, dtype=float)
        return new


class EguchiHanson(HyperkahlerTriple):
    """Eguchi-Hanson metric of scale a with its hyperkähler triple rotated so
    that the distinguished Kähler class points along ``direction``; the chart
    is chosen so that the distinguished complex structure tends to I0."""

    def __init__(self, a: float, direction=(1.0, 0.0, 0.0)):
        if not a > 0:
            raise GeometryError("Eguchi-Hanson scale must be positive")
        self.a = float(a)
        self.direction = tuple(float(x) for x in direction)
        q = rotation_quaternion(self.direction)
        self.rotation = quat_to_rotation(q)
        self.A = left_mult(q)

    @property
    def zeta(self):
        """Period point (zeta_r, zeta_c) for A1 in the scalar normalisation
        a^2 = |zeta|."""
        n = np.array(self.direction) * self.a ** 2
        return float(n[0]), complex(n[1], n[2])

    def radial_functions(self, u: Jet):
        a4 = self.a ** 4
        S = (u * u + a4).sqrt()
        fp = S / u
        fpp = -a4 / (u * u * S)
        return S, fp, fpp

    def _source_fields(self, X):
        u = X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]
        S, fp, _ = self.radial_functions(u)
        # g = fp Q + (u / S) P with P, Q the projectors onto span(x, I0 x) and
        # span(J0 x, K0 x); both are assembled from outer products so nothing
        # cancels near the bolt, where fp ~ a^2/u and u / S ~ u/a^2
        radial = S.reciprocal()
        fq = fp * u.reciprocal()

        def turn(M):
            return [sum((X[b] * M[a, b] for b in range(4) if M[a, b] != 0), 0 * X[0]) for a in range(4)]
        Ix, Jx, Kx = turn(I0), turn(J0), turn(K0)
        rows = []
        for i in range(4):
            row = []
            for j in range(4):
                row.append((X[i] * X[j] + Ix[i] * Ix[j]) * radial + (Jx[i] * Jx[j] + Kx[i] * Kx[j]) * fq)
            rows.append(row)
        g = stack(rows)
        ginv = inv(g)
        I = Jet.constant(np.broadcast_to(I0[(...,) + (None,) * len(u.shape)], (4, 4) + u.shape).copy(), u.order)
        J = -matmul(ginv, W_J)
        K = -matmul(ginv, W_K)
        R = self.rotation
        E = (I, J, K)
        rot = [sum((E[j] * R[j, k] for j in range(3) if R[j, k] != 0), 0 * I) for k in range(3)]
        return TripleJets(g, *rot)

    def _source_potential(self, X):
        u = X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]
        S = (u * u + self.a ** 4).sqrt()
        if np.allclose(self.direction, (1.0, 0.0, 0.0)):
            return S + (u / (S + self.a ** 2)).log() * self.a ** 2
        if abs(self.direction[0]) < 1e-14:
            return S
        raise GeometryError("closed-form potential available for directions e1 or orthogonal to e1")

    def ale_potential(self, points, order: int = 4) -> Jet:
        """phi_zeta = potential - r^2, which is O(r^-2)."""
        X = _linear_coords(np.asarray(points, dtype=float), order, self.A)
        u = X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]
        return self._source_potential(X) - u

    def herm_metric(self, points, order: int = 2) -> HermMatrix2Jet:
        """h_{i jbar} = d_i d_jbar Phi; only for the I0-aligned triple."""
        if not np.allclose(self.direction, (1.0, 0.0, 0.0)):
            raise GeometryError("hermitian components w.r.t. I0 need direction e1")
        return HermMatrix2Jet.from_potential(self.kahler_potential(points, order + 2))

    def rm_norm2_exact(self, r):
        """Closed-form real norm R_abcd R^abcd = 384 a^8 / (r^4 + a^4)^3."""
        r = np.asarray(r, dtype=float)
        return 384.0 * self.a ** 8 / (r ** 4 + self.a ** 4) ** 3

    def resolution_potential(self, Y) -> Jet:
        """Kähler potential in the resolution chart (lam, mu) = (w/z, z^2).

        The cover chart degenerates at the bolt (radial metric ~ r^2/a^2), so
        curvature there loses digits like (a/r)^4.  In (lam, mu) the metric is
        smooth across the bolt mu = 0: dropping the pluriharmonic log|mu| from
        a^2 log u leaves S - a^2 log(S + a^2) + a^2 log(1 + |lam|^2), with
        u^2 = |mu|^2 (1 + |lam|^2)^2.  Only the I0-aligned metric is covered.
        """
        lam2 = Y[0] * Y[0] + Y[1] * Y[1] + 1.0
        u2 = (Y[2] * Y[2] + Y[3] * Y[3]) * lam2 * lam2
        a2 = self.a ** 2
        S = (u2 + a2 * a2).sqrt()
        return S - (S + a2).log() * a2 + lam2.log() * a2


def to_resolution_chart(points) -> np.ndarray:
    """Real coordinates of (w/z, z^2) for cover points (z, w).

    Where |z| < |w| the roles of z and w are swapped first; the swap is an
    isometry of every I0-aligned Eguchi-Hanson metric, so one potential serves
    both charts.
    """
    pts = np.asarray(points, dtype=float)
    z = pts[..., 0] + 1j * pts[..., 1]
    w = pts[..., 2] + 1j * pts[..., 3]
    if np.any((np.abs(z) == 0) & (np.abs(w) == 0)):
        raise GeometryError("the origin of the cover has no image in the resolution chart")
    swap = np.abs(z) < np.abs(w)
    z, w = np.where(swap, w, z), np.where(swap, z, w)
    lam, mu = w / z, z * z
    return np.stack([lam.real, lam.imag, mu.real, mu.imag], axis=-1)


def eh_triple(a: float, direction=(1.0, 0.0, 0.0)) -> EguchiHanson:
    return EguchiHanson(a, direction)


class GibbonsHawking(HyperkahlerTriple):
    """Multi-centre Gibbons-Hawking metric V^-1 (dtau + A)^2 + V dx^2 on
    coordinates (x1, x2, x3, tau), with V = sum 1/(2|x - p_i|).

    Each centre carries a Dirac string running vertically away from the
    centroid of the configuration, so the segment between two centres on the
    x3 axis is a regular region of the chart.
    """

    def __init__(self, centers, string_signs=None):
        c = np.atleast_2d(np.asarray(centers, dtype=float))
        if c.shape[1] != 3 or len(c) == 0:
            raise GeometryError("centres are points of R^3")
        for i in range(len(c)):
            for j in range(i):
                if np.linalg.norm(c[i] - c[j]) < 1e-12:
                    raise GeometryError("degenerate (wall) configuration: coincident centres")
        self.centers = c
        mid = c[:, 2].mean()
        if string_signs is None:
            string_signs = [1.0 if (p[2] >= mid) else -1.0 for p in c]
        self.signs = [float(s) for s in string_signs]
        self.A = np.eye(4)

    def regauged(self, point) -> "GibbonsHawking":
        """Same metric with every Dirac string pointing away from ``point``.

        Flipping a string is the local coordinate change tau -> tau +- phi, so
        curvature invariants at ``point`` do not change, while the chart stays
        well conditioned there (the gauge potential blows up along a string).
        """
        x3 = float(np.asarray(point, dtype=float)[2])
        signs = [1.0 if x3 < p[2] else -1.0 for p in self.centers]
        return GibbonsHawking(self.centers, signs)

    def potentials(self, X):
        V = 0
        A = [0, 0, 0]
        for p, s in zip(self.centers, self.signs):
            dx, dy, dz = X[0] - p[0], X[1] - p[1], X[2] - p[2]
            rho = (dx * dx + dy * dy + dz * dz).sqrt()
            V = V + rho.reciprocal() * 0.5
            # 1/2 (cos theta - s) dphi = s/2 (x dy - y dx) / (rho (rho - s dz)).
            # Where s dz > 0 (the string side) rho - s dz cancels, so there it is
            # formed as (dx^2 + dy^2) / (rho + s dz) instead
            m = (s * np.asarray(dz.value) > 0).astype(float)
            direct = rho - dz * s
            alt = (dx * dx + dy * dy) / (rho + dz * (s * m) + rho * (1 - m))
            f = (rho * (direct * (1 - m) + alt * m)).reciprocal() * (0.5 * s)
            A[0] = A[0] - f * dy
            A[1] = A[1] + f * dx
        A[2] = 0 * V
        return V, A

    def _source_fields(self, X):
        V, A = self.potentials(X)
        Vi = V.reciprocal()
        zero = 0 * V
        # one-form theta = dtau + A in coordinates (x1, x2, x3, tau)
        theta = [A[0], A[1], A[2], zero + 1.0]
        rows = []
        for a in range(4):
            row = []
            for b in range(4):
                e = Vi * theta[a] * theta[b]
                if a == b and a < 3:
                    e = e + V
                row.append(e)
            rows.append(row)
        g = stack(rows)
        ginv = inv(g)
        forms = []
        for k in range(3):
            i, j = (k + 1) % 3, (k + 2) % 3
            W = [[zero for _ in range(4)] for _ in range(4)]
            # theta ^ dx_k
            for a in range(4):
                W[a][k] = W[a][k] + theta[a]
                W[k][a] = W[k][a] - theta[a]
            W[i][j] = W[i][j] - V
            W[j][i] = W[j][i] + V
            forms.append(stack(W))
        I, J, K = (-matmul(ginv, W) for W in forms)
        # the third form enters with the opposite sign so that IJ = K
        return TripleJets(g, I, J, -K)


def gh_triple(centers, string_signs=None) -> GibbonsHawking:
    return GibbonsHawking(centers, string_signs)


# ---------------------------------------------------------------------------
# dilation, frames, holomorphic form


def dilate(obj, alpha: float):
    """Pull back along H_alpha: y -> alpha y.

    Accepts a triple (returns the pulled-back triple), a chart point, or a
    callable scalar field of coordinate jets (returns the pulled-back field).
    """
    if not alpha > 0:
        raise GeometryError("dilation factor must be positive")
    if isinstance(obj, HyperkahlerTriple):
        return obj.with_linear_map(obj.A @ (alpha * np.eye(4)))
    if isinstance(obj, ALEChart):
        return ALEChart(obj.gamma_kind, tuple(alpha * np.asarray(obj.coords)))
    if callable(obj):
        return lambda X: obj([x * alpha for x in X])
    raise TypeError(f"cannot dilate {type(obj).__name__}")


def complex_structure_at(triple: HyperkahlerTriple, point, which: str = "I") -> np.ndarray:
    f = triple.fields(np.asarray(point, dtype=float), order=0)
    return {"I": f.I, "J": f.J, "K": f.K}[which].value


D_Z0 = np.array([0.5, -0.5j, 0, 0])
D_W0 = np.array([0, 0, 0.5, -0.5j])


D_X1 = np.array([1.0, 0, 0, 0], dtype=complex)
D_X3 = np.array([0, 0, 1.0, 0], dtype=complex)


def projected_frame(I: np.ndarray, base=(D_Z0, D_W0)):
    """(1,0) frame e^k = (v - i I v)/2 for v in ``base`` (default d/dz0, d/dw0), plus duals."""
    e1 = 0.5 * (base[0] - 1j * (I @ base[0]))
    e2 = 0.5 * (base[1] - 1j * (I @ base[1]))
    basis = np.stack([e1, e2, e1.conj(), e2.conj()], axis=1)
    duals = np.linalg.inv(basis)[:2]
    return e1, e2, duals


def asymptotic_frame(triple: HyperkahlerTriple, point):
    """Frame of T^{1,0} for the distinguished structure; needs r >= 1."""
    point = np.asarray(point, dtype=float)
    if np.linalg.norm(point) < 1.0:
        raise GeometryError("asymptotic frame is defined on r >= 1 only")
    return projected_frame(complex_structure_at(triple, point, "I"))


def holomorphic_2form(triple: HyperkahlerTriple, points, order: int = 0) -> ComplexJet:
    """Omega = omega_J + i omega_K for the distinguished structure I (matrix
    of the 2-form, tensor axes first).  In the flat case this is dz^dw."""
    f = triple.fields(points, order)
    return ComplexJet(f.kahler_form("J"), f.kahler_form("K"))


def wedge_coefficient(alpha, beta):
    """Coefficient of dx1^dx2^dx3^dx4 in alpha ^ beta for 2-form matrices
    (tensor axes first; complex or real numpy arrays)."""
    a, b = alpha, beta
    return (a[0, 1] * b[2, 3] - a[0, 2] * b[1, 3] + a[0, 3] * b[1, 2]
            + a[1, 2] * b[0, 3] - a[1, 3] * b[0, 2] + a[2, 3] * b[0, 1])


def flat_triple() -> EguchiHanson:
    """The a -> 0 limit realised with a tiny scale (flat to rounding at r >~ 1e-3)."""
    return EguchiHanson(1e-8)
