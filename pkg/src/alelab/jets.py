"""Truncated Taylor jets in four real chart variables.

A :class:`Jet` stores the Taylor coefficients ``c_alpha = d^alpha f / alpha!``
of a field for every multi-index ``alpha`` of total degree at most ``order``.
The leading axis of the coefficient array runs over multi-indices; any
trailing axes are carried along untouched, so one jet can hold a whole batch
of points or a tensor of components (or both).

Multi-indices are enumerated by degree first, so the table of a lower order
is a prefix of the table of any higher order and truncation is a slice.
"""

from __future__ import annotations

import contextlib
import itertools
import math
from fractions import Fraction
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

try:  # extended precision for finite-difference oracles; optional
    import mpmath
except ImportError:  # pragma: no cover
    mpmath = None

NVARS = 4
DEFAULT_ORDER = 4


class JetDomainError(ValueError):
    """Raised when a jet operation leaves the domain of the scalar function."""


class FDStencilError(RuntimeError):
    """Raised when a finite-difference stencil point cannot be evaluated."""


# ---------------------------------------------------------------------------
# multi-index tables


@dataclass(frozen=True)
class _Tables:
    order: int
    multi: np.ndarray  # (M, 4) int
    index: dict
    fact: np.ndarray  # alpha!
    degree: np.ndarray
    prod_i: np.ndarray
    prod_j: np.ndarray
    prod_starts: np.ndarray
    prod_k: np.ndarray
    deriv_src: tuple  # per variable, indices into this table for order-1 result
    deriv_fac: tuple


def _enumerate(order: int) -> list[tuple[int, ...]]:
    out = []
    for deg in range(order + 1):
        for combo in itertools.combinations_with_replacement(range(NVARS), deg):
            alpha = [0] * NVARS
            for v in combo:
                alpha[v] += 1
            out.append(tuple(alpha))
    return out


def n_coeffs(order: int) -> int:
    return math.comb(order + NVARS, NVARS)


@lru_cache(maxsize=None)
def tables(order: int) -> _Tables:
    multi = _enumerate(order)
    index = {a: i for i, a in enumerate(multi)}
    arr = np.array(multi, dtype=np.int64)
    fact = np.array([math.prod(math.factorial(k) for k in a) for a in multi], dtype=float)
    degree = arr.sum(axis=1)

    pi, pj, pk = [], [], []
    for i, a in enumerate(multi):
        for j, b in enumerate(multi):
            if degree[i] + degree[j] > order:
                continue
            pi.append(i)
            pj.append(j)
            pk.append(index[tuple(x + y for x, y in zip(a, b))])
    pi, pj, pk = np.array(pi), np.array(pj), np.array(pk)
    perm = np.argsort(pk, kind="stable")
    pi, pj, pk = pi[perm], pj[perm], pk[perm]
    starts = np.searchsorted(pk, np.arange(len(multi)))

    dsrc, dfac = [], []
    if order > 0:
        lower = multi[: n_coeffs(order - 1)]
        for v in range(NVARS):
            src, fac = [], []
            for b in lower:
                up = list(b)
                up[v] += 1
                src.append(index[tuple(up)])
                fac.append(b[v] + 1)
            dsrc.append(np.array(src))
            dfac.append(np.array(fac, dtype=float))
    return _Tables(order, arr, index, fact, degree, pi, pj, starts, pk,
                   tuple(dsrc), tuple(dfac))


def multi_index(alpha: Sequence[int]) -> int:
    """Position of a multi-index in the (order independent) enumeration."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != NVARS or min(alpha) < 0:
        raise ValueError(f"bad multi-index {alpha}")
    return tables(sum(alpha)).index[alpha]


# ---------------------------------------------------------------------------
# elementwise helpers that also accept mpmath object arrays


def _is_obj(x) -> bool:
    if isinstance(x, np.ndarray):
        return x.dtype == object
    return mpmath is not None and isinstance(x, mpmath.mpf)


def _apply(name: str, x):
    if mpmath is not None and isinstance(x, mpmath.mpf):
        return getattr(mpmath, name)(x)
    if _is_obj(x):
        return np.frompyfunc(getattr(mpmath, name), 1, 1)(x)
    return getattr(np, name)(x)


def _as_array(x):
    if isinstance(x, np.ndarray):
        return x
    if mpmath is not None and isinstance(x, mpmath.mpf):
        return np.array(x, dtype=object)
    return np.asarray(x, dtype=float)


# ---------------------------------------------------------------------------


class Jet:
    """Truncated Taylor expansion around a (batch of) base point(s)."""

    __slots__ = ("coeffs", "order")
    __array_priority__ = 100  # make ndarray * Jet defer to Jet.__rmul__

    def __init__(self, coeffs, order: int):
        coeffs = _as_array(coeffs)
        if coeffs.shape[0] != n_coeffs(order):
            raise ValueError(
                f"expected {n_coeffs(order)} coefficients for order {order}, got {coeffs.shape[0]}")
        self.coeffs = coeffs
        self.order = order

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER) -> "Jet":
        value = _as_array(value)
        c = np.zeros((n_coeffs(order),) + value.shape, dtype=value.dtype if _is_obj(value) else float)
        if _is_obj(value):
            c[...] = mpmath.mpf(0)
        c[0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, k: int, value, order: int = DEFAULT_ORDER) -> "Jet":
        jet = cls.constant(value, order)
        if order >= 1:
            e = [0] * NVARS
            e[k] = 1
            jet.coeffs[multi_index(e)] = 1
        return jet

    # basic properties -----------------------------------------------------
    @property
    def value(self):
        return self.coeffs[0]

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    def coeff(self, alpha) -> np.ndarray:
        return self.coeffs[multi_index(alpha)]

    def partial(self, alpha) -> np.ndarray:
        """Mixed partial derivative d^alpha at the base point."""
        if sum(alpha) > self.order:
            raise ValueError(f"partial of degree {sum(alpha)} exceeds jet order {self.order}")
        return self.coeff(alpha) * math.prod(math.factorial(a) for a in alpha)

    def partials(self) -> dict:
        t = tables(self.order)
        return {tuple(a): self.coeffs[i] * t.fact[i] for i, a in enumerate(t.multi.tolist())}

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError("cannot raise the order of a jet")
        return Jet(self.coeffs[: n_coeffs(order)], order)

    def derivative(self, k: int) -> "Jet":
        """d/dx_k, returned as a jet of one order less."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        t = tables(self.order)
        fac = t.deriv_fac[k].reshape((-1,) + (1,) * len(self.shape))
        return Jet(self.coeffs[t.deriv_src[k]] * fac, self.order - 1)

    def gradient(self) -> list["Jet"]:
        return [self.derivative(k) for k in range(NVARS)]

    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return Jet(self.coeffs[(slice(None),) + idx], self.order)

    def reshape(self, *shape) -> "Jet":
        return Jet(self.coeffs.reshape((self.coeffs.shape[0],) + tuple(shape)), self.order)

    def moveaxis(self, src, dst) -> "Jet":
        return Jet(np.moveaxis(self.coeffs, src + 1 if src >= 0 else src, dst + 1 if dst >= 0 else dst), self.order)

    def sum(self, axis) -> "Jet":
        axis = axis + 1 if axis >= 0 else axis
        return Jet(self.coeffs.sum(axis=axis), self.order)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.shape}, value={self.value!r})"

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.order == self.order:
                return self, other
            n = min(self.order, other.order)
            return self.truncate(n), other.truncate(n)
        return self, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is None:
            c = a.coeffs.copy() if not np.ndim(other) else a.coeffs + 0 * _as_array(other)[None]
            c[0] = c[0] + other
            return Jet(c, a.order)
        return Jet(a.coeffs + b.coeffs, a.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coeffs, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is None:
            other = _as_array(other)
            return Jet(a.coeffs * other[None], a.order)
        t = tables(a.order)
        terms = a.coeffs[t.prod_i] * b.coeffs[t.prod_j]
        return Jet(np.add.reduceat(terms, t.prod_starts, axis=0), a.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        other = _as_array(other)
        if np.any(other == 0):
            raise JetDomainError("division by zero")
        return Jet(self.coeffs / other[None], self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, q):
        if isinstance(q, Jet):
            return (self.log() * q).exp()
        if float(q) == int(q) and q >= 0:
            return _int_power(self, int(q))
        if float(q) == int(q):
            if np.any(self.value == 0):
                raise JetDomainError("negative power of a jet with zero value")
        elif np.any(self.value <= 0):
            raise JetDomainError("fractional power of a jet with non-positive value")
        a0 = self.value
        coefs = [a0 ** q]
        binom = 1.0
        for k in range(1, self.order + 1):
            binom = binom * (q - k + 1) / k
            coefs.append(binom * a0 ** (q - k))
        return _compose(self, coefs)

    # univariate functions ------------------------------------------------
    def reciprocal(self) -> "Jet":
        if np.any(self.value == 0):
            raise JetDomainError("division by a jet with zero value")
        a0 = self.value
        inv = 1 / a0 if not _is_obj(a0) else np.frompyfunc(lambda v: 1 / v, 1, 1)(a0)
        coefs = [inv]
        for k in range(1, self.order + 1):
            coefs.append(-coefs[-1] * inv)
        return _compose(self, coefs)

    def sqrt(self) -> "Jet":
        if np.any(self.value <= 0):
            raise JetDomainError("sqrt of a jet with non-positive value")
        return self ** 0.5

    def exp(self) -> "Jet":
        e = _apply("exp", self.value)
        coefs = [e / math.factorial(k) for k in range(self.order + 1)]
        return _compose(self, coefs)

    def log(self) -> "Jet":
        if np.any(self.value <= 0):
            raise JetDomainError("log of a jet with non-positive value")
        a0 = self.value
        coefs = [_apply("log", a0)]
        for k in range(1, self.order + 1):
            coefs.append(((-1) ** (k - 1) / k) / a0 ** k)
        return _compose(self, coefs)


def _int_power(a: Jet, n: int) -> Jet:
    result = Jet.constant(np.ones_like(a.value) if not _is_obj(a.value) else a.value * 0 + 1, a.order)
    base = a
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def _compose(a: Jet, taylor: list) -> Jet:
    """Evaluate sum_k taylor[k] (a - a0)^k by Horner's rule (nilpotent delta)."""
    delta = Jet(a.coeffs.copy(), a.order)
    delta.coeffs[0] = delta.coeffs[0] * 0
    result = Jet.constant(taylor[a.order], a.order)
    for k in range(a.order - 1, -1, -1):
        result = result * delta
        result.coeffs[0] = result.coeffs[0] + taylor[k]
    return result


def jet_arith(op: str, a: Jet, b=None) -> Jet:
    """Dispatch one of add, sub, mul, div, sqrt, log, exp, pow."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "pow":
        return a ** b
    if op in ("sqrt", "log", "exp"):
        if b is not None:
            raise TypeError(f"{op} takes one argument")
        return getattr(a, op)()
    raise ValueError(f"unknown jet operation {op!r}")


# ---------------------------------------------------------------------------
# tensor helpers


def coordinates(points, order: int = DEFAULT_ORDER) -> list[Jet]:
    """The four coordinate functions as jets based at ``points`` (shape (..., 4))."""
    points = _as_array(points)
    if points.shape[-1] != NVARS:
        raise ValueError("points must have a trailing axis of length 4")
    return [Jet.variable(k, points[..., k], order) for k in range(NVARS)]


def stack(jets: Sequence, axis: int = 0) -> Jet:
    """Stack jets (nested lists allowed) into one tensor-valued jet."""
    if isinstance(jets[0], (list, tuple)):
        jets = [stack(row, axis=0) for row in jets]
    order = min(j.order for j in jets)
    arrays = [j.truncate(order).coeffs for j in jets]
    shape = np.broadcast_shapes(*(a.shape for a in arrays))
    arrays = [np.broadcast_to(a, shape) for a in arrays]
    return Jet(np.stack(arrays, axis=axis + 1), order)


def einsum(spec: str, a: Jet, b) -> Jet:
    """Contract two tensor-valued jets; ``spec`` uses numpy syntax with ``...``
    standing for the batch axes, e.g. ``"ij...,jk...->ik..."``."""
    ins, out = spec.split("->")
    sa, sb = ins.split(",")
    if not isinstance(b, Jet):
        b = _as_array(b)
        return Jet(np.einsum(f"Z{sa},{sb}->Z{out}", a.coeffs, b), a.order)
    a, b = a._coerce(b)
    t = tables(a.order)
    terms = np.einsum(f"Z{sa},Z{sb}->Z{out}", a.coeffs[t.prod_i], b.coeffs[t.prod_j])
    return Jet(np.add.reduceat(terms, t.prod_starts, axis=0), a.order)


def const_einsum(spec: str, m, a: Jet) -> Jet:
    """Contract a constant array with a jet, e.g. ``"ij,jk...->ik..."``."""
    ins, out = spec.split("->")
    sm, sa = ins.split(",")
    return Jet(np.einsum(f"{sm},Z{sa}->Z{out}", m, a.coeffs), a.order)


def matmul(a: Jet, b) -> Jet:
    if isinstance(b, Jet):
        return einsum("ij...,jk...->ik...", a, b)
    return Jet(np.einsum("Zij...,jk->Zik...", a.coeffs, _as_array(b)), a.order)


def transpose(a: Jet) -> Jet:
    return Jet(np.swapaxes(a.coeffs, 1, 2), a.order)


def _to_last(m: np.ndarray) -> np.ndarray:
    return np.moveaxis(m, (0, 1), (-2, -1))


def _from_last(m: np.ndarray) -> np.ndarray:
    return np.moveaxis(m, (-2, -1), (0, 1))


def _batch_inv(m: np.ndarray) -> np.ndarray:
    return _from_last(np.linalg.inv(_to_last(m)))


def inv(a: Jet) -> Jet:
    """Inverse of a square-matrix-valued jet (axes 0, 1 of the tensor shape)."""
    a0inv = _batch_inv(a.value)
    if np.any(~np.isfinite(a0inv)):
        raise JetDomainError("singular matrix jet")
    b0 = Jet.constant(a0inv, a.order)
    e = Jet(a.coeffs.copy(), a.order)
    e.coeffs[0] = 0
    x = -matmul(b0, e)  # nilpotent
    result = b0
    term = b0
    for _ in range(a.order):
        term = matmul(x, term)
        result = result + term
    return result


def logdet(a: Jet) -> Jet:
    """log det of a matrix jet whose value has positive determinant."""
    d0 = np.linalg.det(_to_last(a.value))
    if np.any(d0 <= 0):
        raise JetDomainError("matrix jet with non-positive determinant")
    b0 = _batch_inv(a.value)
    e = Jet(a.coeffs.copy(), a.order)
    e.coeffs[0] = 0
    x = einsum("ij...,jk...->ik...", Jet.constant(b0, a.order), e)
    result = Jet.constant(np.log(d0), a.order)
    power = x
    for k in range(1, a.order + 1):
        tr = Jet(np.einsum("Zii...->Z...", power.coeffs), a.order)
        result = result + tr * ((-1) ** (k + 1) / k)
        if k < a.order:
            power = matmul(power, x)
    return result


# ---------------------------------------------------------------------------
# complex jets


class ComplexJet:
    """A complex field held as a pair of real jets."""

    __slots__ = ("re", "im")
    __array_priority__ = 100

    def __init__(self, re: Jet, im: Jet | None = None):
        if im is None:
            im = Jet(np.zeros_like(re.coeffs), re.order)
        if im.order != re.order:
            n = min(re.order, im.order)
            re, im = re.truncate(n), im.truncate(n)
        self.re = re
        self.im = im

    @property
    def order(self) -> int:
        return self.re.order

    @property
    def value(self):
        return self.re.value + 1j * self.im.value

    @property
    def shape(self):
        return np.broadcast_shapes(self.re.shape, self.im.shape)

    def partial(self, alpha):
        return self.re.partial(alpha) + 1j * self.im.partial(alpha)

    def conj(self) -> "ComplexJet":
        return ComplexJet(self.re, -self.im)

    def __getitem__(self, idx):
        return ComplexJet(self.re[idx], self.im[idx])

    def truncate(self, order):
        return ComplexJet(self.re.truncate(order), self.im.truncate(order))

    def derivative(self, k):
        return ComplexJet(self.re.derivative(k), self.im.derivative(k))

    def d(self, which: str) -> "ComplexJet":
        """Complex derivative: which in {'z', 'zb', 'w', 'wb'}."""
        k = {"z": 0, "zb": 0, "w": 2, "wb": 2}[which]
        sign = -1 if which in ("z", "w") else 1
        a = self.derivative(k)
        b = self.derivative(k + 1)
        # 0.5 * (d_k + sign * i d_{k+1})
        return ComplexJet((a.re - sign * b.im) * 0.5, (a.im + sign * b.re) * 0.5)

    def _coerce(self, other):
        if isinstance(other, ComplexJet):
            return other
        if isinstance(other, Jet):
            return ComplexJet(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            other = np.asarray(other)
            return ComplexJet(self.re + np.real(other), self.im + np.imag(other))
        return ComplexJet(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexJet(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            other = np.asarray(other)
            if np.iscomplexobj(other):
                x, y = np.real(other), np.imag(other)
                return ComplexJet(self.re * x - self.im * y, self.re * y + self.im * x)
            return ComplexJet(self.re * other, self.im * other)
        return ComplexJet(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def abs2(self) -> Jet:
        return self.re * self.re + self.im * self.im

    def reciprocal(self) -> "ComplexJet":
        n = self.abs2()
        if np.any(n.value == 0):
            raise JetDomainError("division by a complex jet with zero value")
        ninv = n.reciprocal()
        return ComplexJet(self.re * ninv, -self.im * ninv)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return self * (1 / np.asarray(other))
        return self * o.reciprocal()

    def __repr__(self) -> str:
        return f"ComplexJet(order={self.order}, value={self.value!r})"


def complex_einsum(spec: str, a: ComplexJet, b: ComplexJet) -> ComplexJet:
    rr = einsum(spec, a.re, b.re)
    ii = einsum(spec, a.im, b.im)
    ri = einsum(spec, a.re, b.im)
    ir = einsum(spec, a.im, b.re)
    return ComplexJet(rr - ii, ri + ir)


def complex_stack(jets: Sequence, axis: int = 0) -> ComplexJet:
    def parts(x, attr):
        if isinstance(x, (list, tuple)):
            return [parts(y, attr) for y in x]
        if isinstance(x, Jet):
            return x if attr == "re" else Jet(np.zeros_like(x.coeffs), x.order)
        return getattr(x, attr)
    return ComplexJet(stack(parts(jets, "re"), axis), stack(parts(jets, "im"), axis))


class HermMatrix2Jet:
    """2x2 matrix of complex jets, typically the components h_{i jbar}."""

    __slots__ = ("entries", "hermitian")

    def __init__(self, entries: ComplexJet, hermitian: bool = True, tol: float = 1e-10):
        if entries.shape[:2] != (2, 2):
            raise ValueError("HermMatrix2Jet needs a (2, 2, ...) complex jet")
        self.entries = entries
        self.hermitian = hermitian
        if hermitian:
            err = self.hermitian_defect()
            scale = max(1.0, float(np.max(np.abs(entries.re.coeffs))))
            if err > tol * scale:
                raise ValueError(f"matrix is not hermitian (defect {err:.3e})")

    @classmethod
    def from_potential(cls, phi: Jet) -> "HermMatrix2Jet":
        """h_{i jbar} = d_i d_jbar phi for a real potential."""
        p = ComplexJet(phi)
        names = ("z", "w")
        rows = [[p.d(names[i]).d(names[j] + "b") for j in range(2)] for i in range(2)]
        ent = complex_stack(rows)
        # remove rounding asymmetry: the diagonal is real by construction
        return cls(ent, hermitian=True)

    @property
    def order(self) -> int:
        return self.entries.order

    def __getitem__(self, ij) -> ComplexJet:
        return self.entries[ij]

    def hermitian_defect(self) -> float:
        e = self.entries
        dre = e.re.coeffs - np.swapaxes(e.re.coeffs, 1, 2)
        dim = e.im.coeffs + np.swapaxes(e.im.coeffs, 1, 2)
        return float(max(np.max(np.abs(dre)), np.max(np.abs(dim))))

    def det(self) -> ComplexJet:
        e = self.entries
        return e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]

    def inverse(self) -> "HermMatrix2Jet":
        e = self.entries
        dinv = self.det().reciprocal()
        rows = [[e[1, 1] * dinv, -e[0, 1] * dinv], [-e[1, 0] * dinv, e[0, 0] * dinv]]
        return HermMatrix2Jet(complex_stack(rows), hermitian=False)

    def real_metric(self) -> Jet:
        """Riemannian metric g = Re(h_{i jbar} dz^i dzbar^j) in x-coordinates."""
        return herm_to_real(self.entries)


def herm_to_real(h: ComplexJet) -> Jet:
    """4x4 real symmetric matrix of Re(h_{ij} dz^i dzbar^j)."""
    # dz^i = dx_{2i} + i dx_{2i+1}; g(d_a, d_b) = Re sum h_ij dz^i(d_a) conj(dz^j(d_b))
    dz = np.array([[1, 1j, 0, 0], [0, 0, 1, 1j]])  # dz^i(d_a)
    # g_ab = Re sum_ij h_ij dz^i_a conj(dz^j_b), symmetrized
    m = np.einsum("ia,jb->ijab", dz, dz.conj())
    re = np.einsum("ijab,Zij...->Zab...", m.real, h.re.coeffs) - np.einsum("ijab,Zij...->Zab...", m.imag, h.im.coeffs)
    g = 0.5 * (re + np.swapaxes(re, 1, 2))
    return Jet(g, h.order)


# ---------------------------------------------------------------------------
# finite-difference oracle

@lru_cache(maxsize=None)
def central_stencil(m: int) -> dict:
    """Fourth-order accurate central difference weights for d^m/dx^m (unit
    step), as exact fractions."""
    if m == 0:
        return {0: Fraction(1)}
    p = (m + 1) // 2 + 1
    offs = list(range(-p, p + 1))
    n = len(offs)
    # solve sum_j w_j o_j^k = m! delta_km by exact Gauss-Jordan elimination
    rows = [[Fraction(o) ** k for o in offs] + [Fraction(math.factorial(m) if k == m else 0)]
            for k in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        lead = rows[col][col]
        rows[col] = [x / lead for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[col])]
    return {o: rows[i][n] for i, o in enumerate(offs) if rows[i][n] != 0}


def _eval_points(field, pts, precision):
    """Evaluate ``field`` at rows of ``pts`` with order-0 jets, batched."""
    if precision:
        with mpmath.workdps(precision):
            arr = np.empty(pts.shape, dtype=object)
            for idx in np.ndindex(pts.shape):
                arr[idx] = pts[idx]
            vals = field(coordinates(arr, 0)).value
            return [mpmath.mpf(v) for v in np.asarray(vals, dtype=object).ravel()]
    vals = np.asarray(field(coordinates(np.asarray(pts, dtype=float), 0)).value, dtype=float).ravel()
    if not np.all(np.isfinite(vals)):
        raise JetDomainError("non-finite value")
    return list(vals)


def fd_crosscheck(field: Callable[[list], Jet], point, order: int, step: float,
                  precision: int | None = 50) -> float:
    """Largest relative deviation between jet partials and central differences.

    ``field`` maps a list of four coordinate jets to a scalar jet.  Partials up
    to ``order`` are compared with tensor-product central differences (fourth
    order accurate, so the deviation is O(step^2) or better).  Stencil values
    use mpmath with ``precision`` digits (``None`` for plain floats) so that
    rounding does not swamp high-order differences.  Each partial's deviation
    is taken relative to the largest partial of the same degree.
    """
    if mpmath is None:
        precision = None
    point = np.asarray(point, dtype=float)
    jet = field(coordinates(point, order))
    if jet.order < order:
        raise ValueError("field returned a jet of lower order than requested")
    exact = {a: v for a, v in jet.partials().items() if sum(a) <= order}

    offsets = set()
    for a in exact:
        for combo in itertools.product(*[list(central_stencil(k)) for k in a]):
            offsets.add(combo)
    offsets = sorted(offsets)

    def to_point(off):
        if precision:
            with mpmath.workdps(precision):
                return [mpmath.mpf(float(point[k])) + off[k] * mpmath.mpf(step) for k in range(NVARS)]
        return list(point + np.asarray(off, dtype=float) * step)

    pts = [to_point(o) for o in offsets]
    try:
        flat = _eval_points(field, np.array(pts, dtype=object if precision else float), precision)
    except (JetDomainError, ZeroDivisionError, ValueError, FloatingPointError):
        # locate the offending stencil point
        for off, pt in zip(offsets, pts):
            try:
                _eval_points(field, np.array([pt], dtype=object if precision else float), precision)
            except (JetDomainError, ZeroDivisionError, ValueError, FloatingPointError) as exc:
                raise FDStencilError(
                    f"field evaluation failed at stencil point {[float(c) for c in pt]}: {exc}") from exc
        raise
    values = dict(zip(offsets, flat))

    scale = {}
    for a, v in exact.items():
        scale[sum(a)] = max(scale.get(sum(a), 0.0), float(np.max(np.abs(v))))

    worst = 0.0
    for a, ref in exact.items():
        with (mpmath.workdps(precision) if precision else contextlib.nullcontext()):
            acc = 0
            for combo in itertools.product(*[list(central_stencil(k).items()) for k in a]):
                off = tuple(c[0] for c in combo)
                w = math.prod(c[1] for c in combo)
                w = mpmath.mpf(w.numerator) / w.denominator if precision else float(w)
                acc = acc + w * values[off]
            h = mpmath.mpf(step) if precision else step
            fd = float(acc / h ** sum(a))
        denom = scale[sum(a)]
        dev = abs(fd - float(ref)) / denom if denom else abs(fd)
        worst = max(worst, dev)
    return worst
