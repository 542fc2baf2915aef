"""ADE root data, deformation paths and the non-degeneracy classifier."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

FLOAT_TOL = 1e-12
DEFAULT_TRUNCATION = 8

# degrees of the three generating invariants of the binary polyhedral group
_DE_WEIGHTS = {
    ("E", 6): (8, 12, 6),
    ("E", 7): (12, 18, 8),
    ("E", 8): (20, 30, 12),
}


class ADEError(ValueError):
    pass


# ---------------------------------------------------------------------------
# root systems


def cartan_matrix(kind: str, rank: int) -> np.ndarray:
    kind = kind.upper()
    valid = (kind == "A" and rank >= 1) or (kind == "D" and rank >= 4) or (kind == "E" and rank in (6, 7, 8))
    if not valid:
        raise ADEError(f"invalid ADE label {kind}{rank}")
    c = 2 * np.eye(rank, dtype=int)
    if kind == "A":
        edges = [(i, i + 1) for i in range(rank - 1)]
    elif kind == "D":
        edges = [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
    else:
        # Bourbaki labelling: chain 1-3-4-5-..., node 2 attached to node 4
        chain = [0, 2, 3] + list(range(4, rank))
        edges = [(chain[i], chain[i + 1]) for i in range(len(chain) - 1)] + [(1, 3)]
    for i, j in edges:
        c[i, j] = c[j, i] = -1
    return c


def _positive_roots(cartan: np.ndarray) -> list[tuple[int, ...]]:
    """Positive roots in the simple-root basis, grown by adding simple roots.

    For simply-laced systems a positive root beta != alpha_i extends to
    beta + alpha_i exactly when (beta, alpha_i) = -1.
    """
    n = cartan.shape[0]
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        new = []
        for beta in frontier:
            b = np.array(beta)
            for i in range(n):
                if b @ cartan[:, i] == -1:
                    gamma = tuple(int(x) for x in b + np.eye(n, dtype=int)[i])
                    if gamma not in roots:
                        roots.add(gamma)
                        new.append(gamma)
        frontier = new
    return sorted(roots, key=lambda r: (sum(r), r))


@dataclass(frozen=True)
class RootSystem:
    kind: str
    rank: int
    roots: tuple  # integer coefficient vectors in the simple-root basis
    cartan_matrix: np.ndarray
    weyl_order: int
    cstar_weights: tuple

    def pairing(self, u, v):
        """Cartan pairing of two vectors given in the simple-root basis."""
        c = self.cartan_matrix
        return sum(u[i] * c[i, j] * v[j] for i in range(self.rank) for j in range(self.rank))

    @property
    def positive_roots(self) -> tuple:
        return tuple(r for r in self.roots if sum(r) > 0)

    def exponents(self) -> list[int]:
        """Exponents read off from the height distribution of positive roots."""
        heights = [sum(r) for r in self.positive_roots]
        counts = [heights.count(k) for k in range(1, max(heights) + 2)]
        # exponent m occurs counts[m-1] - counts[m] times
        ex = []
        for m in range(1, len(counts)):
            ex += [m] * (counts[m - 1] - counts[m])
        return ex

    def ambient_roots(self) -> list[tuple[int, ...]]:
        """Roots as e_i - e_j in R^{n+1} (type A only)."""
        if self.kind != "A":
            raise ADEError("ambient coordinates are provided for type A only")
        out = []
        for r in self.roots:
            v = [0] * (self.rank + 1)
            for i, c in enumerate(r):
                v[i] += c
                v[i + 1] -= c
            out.append(tuple(v))
        return out

    @property
    def label(self) -> str:
        return f"{self.kind}{self.rank}"

    @property
    def gamma_order(self) -> int:
        """Order of the finite subgroup of SU(2) attached to the diagram."""
        if self.kind == "A":
            return self.rank + 1
        if self.kind == "D":
            return 4 * (self.rank - 2)
        return {6: 24, 7: 48, 8: 120}[self.rank]


def build_root_system(kind: str, rank: int) -> RootSystem:
    kind = kind.upper()
    c = cartan_matrix(kind, rank)
    pos = _positive_roots(c)
    roots = tuple(sorted(set(pos) | {tuple(-x for x in r) for r in pos}, key=lambda r: (sum(r), r)))
    for r in roots:
        v = np.array(r)
        if v @ c @ v != 2:
            raise AssertionError(f"root {r} has norm {v @ c @ v}")
    rs = RootSystem(kind, rank, roots, c, 0, ())
    weyl = math.prod(m + 1 for m in rs.exponents())
    if kind == "A":
        weights = (rank + 1, rank + 1, 2)
    elif kind == "D":
        weights = (2 * rank - 4, 2 * rank - 2, 4)
    else:
        weights = _DE_WEIGHTS[(kind, rank)]
    return RootSystem(kind, rank, roots, c, weyl, weights)


# ---------------------------------------------------------------------------
# deformation paths


def _num(x):
    """Normalize an input number: exact rationals stay exact."""
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, Rational):
        return Fraction(x)
    return float(x)


def _is_zero(x) -> bool:
    return x == 0 if isinstance(x, Fraction) else abs(x) <= FLOAT_TOL


@dataclass(frozen=True)
class ZetaPath:
    """zeta(t) = zeta_r(t) + zeta_c(t) as truncated power series.

    ``zeta_r[k]`` is the real coefficient vector of t^k; ``zeta_c[k]`` the
    complex one, stored as (re, im) vectors.  Vectors live in the ambient
    h_i coordinates for type A and in the simple-root basis otherwise.
    """

    kind: str
    rank: int
    zeta_r: tuple
    zeta_c: tuple  # tuple of (re_vector, im_vector)
    d: int = 1
    truncation_order: int = DEFAULT_TRUNCATION
    basis: str = "ambient"

    def __post_init__(self):
        if self.d < 1:
            raise ADEError("base-change degree must be a positive integer")
        dim = self.dim
        if len(self.zeta_r) != self.truncation_order + 1 or len(self.zeta_c) != self.truncation_order + 1:
            raise ADEError("series must carry truncation_order + 1 coefficients")
        for v in self.zeta_r:
            if len(v) != dim:
                raise ADEError("inconsistent coefficient length")
        for re, im in self.zeta_c:
            if len(re) != dim or len(im) != dim:
                raise ADEError("inconsistent coefficient length")
        if not all(_is_zero(x) for x in self.coefficient(0)):
            raise ADEError("zeta(0) must vanish")
        if self.kind == "A" and self.basis == "ambient":
            for k in range(self.truncation_order + 1):
                for vec in (self.zeta_r[k], self.zeta_c[k][0], self.zeta_c[k][1]):
                    if not _is_zero(sum(vec)):
                        raise ADEError(f"type-A coefficients must be trace free (order {k})")

    @property
    def dim(self) -> int:
        return self.rank + 1 if (self.kind == "A" and self.basis == "ambient") else self.rank

    def coefficient(self, k: int) -> tuple:
        """Concatenated (zeta_r, Re zeta_c, Im zeta_c) coefficient of t^k."""
        re, im = self.zeta_c[k]
        return tuple(self.zeta_r[k]) + tuple(re) + tuple(im)

    def evaluate(self, t: float):
        """(zeta_r(t), zeta_c(t)) as float and complex numpy vectors."""
        zr = np.zeros(self.dim)
        zc = np.zeros(self.dim, dtype=complex)
        for k in range(self.truncation_order + 1):
            zr += np.array([float(x) for x in self.zeta_r[k]]) * t ** k
            re, im = self.zeta_c[k]
            zc += (np.array([float(x) for x in re]) + 1j * np.array([float(x) for x in im])) * t ** k
        return zr, zc

    def scaled(self, c) -> "ZetaPath":
        c = _num(c)
        return ZetaPath(self.kind, self.rank,
                        tuple(tuple(c * x for x in v) for v in self.zeta_r),
                        tuple((tuple(c * x for x in re), tuple(c * x for x in im)) for re, im in self.zeta_c),
                        self.d, self.truncation_order, self.basis)

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        def enc(x):
            return str(x) if isinstance(x, Fraction) and x.denominator != 1 else (
                int(x) if isinstance(x, Fraction) else float(x))
        return {
            "schema": "alelab.zeta_path/1",
            "kind": self.kind,
            "rank": self.rank,
            "basis": self.basis,
            "d": self.d,
            "truncation_order": self.truncation_order,
            "zeta_r": [[enc(x) for x in v] for v in self.zeta_r],
            "zeta_c": [[[enc(a), enc(b)] for a, b in zip(re, im)] for re, im in self.zeta_c],
        }

    @classmethod
    def from_json(cls, data) -> "ZetaPath":
        if isinstance(data, str):
            data = json.loads(data)
        zr = tuple(tuple(_num(x) for x in v) for v in data["zeta_r"])
        zc = tuple((tuple(_num(p[0]) for p in v), tuple(_num(p[1]) for p in v)) for v in data["zeta_c"])
        return cls(data["kind"], int(data["rank"]), zr, zc, int(data["d"]),
                   int(data["truncation_order"]), data.get("basis", "ambient"))


def make_path(kind: str, rank: int, zeta_c: dict, zeta_r: dict | None = None, d: int = 1,
              truncation_order: int = DEFAULT_TRUNCATION, basis: str = "ambient") -> ZetaPath:
    """Build a path from sparse {power: vector} dictionaries; complex entries
    may be Python complex numbers or (re, im) pairs."""
    dim = rank + 1 if (kind.upper() == "A" and basis == "ambient") else rank
    zero = tuple(Fraction(0) for _ in range(dim))
    zr = [zero] * (truncation_order + 1)
    zc = [(zero, zero)] * (truncation_order + 1)
    for k, v in (zeta_r or {}).items():
        zr[k] = tuple(_num(x) for x in v)
    for k, v in zeta_c.items():
        if k > truncation_order:
            raise ADEError("coefficient beyond truncation order")
        re, im = [], []
        for x in v:
            if isinstance(x, (tuple, list)):
                re.append(_num(x[0]))
                im.append(_num(x[1]))
            elif isinstance(x, complex):
                re.append(float(x.real))
                im.append(float(x.imag))
            else:
                re.append(_num(x))
                im.append(Fraction(0))
        zc[k] = (tuple(re), tuple(im))
    return ZetaPath(kind.upper(), rank, tuple(zr), tuple(zc), d, truncation_order, basis)


def vanishing_order(path: ZetaPath):
    """Least p with a nonzero coefficient, and that coefficient (zeta_dot)."""
    for k in range(path.truncation_order + 1):
        coef = path.coefficient(k)
        if not all(_is_zero(x) for x in coef):
            dim = path.dim
            zeta_dot = (coef[:dim], tuple(complex(a, b) if not (isinstance(a, Fraction) and isinstance(b, Fraction))
                                          else (a, b) for a, b in zip(coef[dim:2 * dim], coef[2 * dim:])))
            return k, zeta_dot
    raise ADEError("order exceeds truncation: path vanishes identically")


@dataclass(frozen=True)
class NondegeneracyVerdict:
    nondegenerate: bool
    p: int
    d: int
    witness: object = None  # violating root or the string "p > d"
    pairings: dict = field(default_factory=dict)

    def __bool__(self):
        return self.nondegenerate


def _root_vectors(path: ZetaPath, rs: RootSystem):
    if path.kind != rs.kind or path.rank != rs.rank:
        raise ADEError(f"path type {path.kind}{path.rank} does not match {rs.label}")
    if path.basis == "ambient" and rs.kind == "A":
        return list(zip(rs.roots, rs.ambient_roots())), lambda v, w: sum(a * b for a, b in zip(v, w))
    c = rs.cartan_matrix
    return [(r, r) for r in rs.roots], lambda v, w: sum(v[i] * int(c[i, j]) * w[j]
                                                         for i in range(rs.rank) for j in range(rs.rank))


def is_nondegenerate(path: ZetaPath, rs: RootSystem) -> NondegeneracyVerdict:
    """Wall check for the leading coefficient and the inequality p <= d."""
    p, _ = vanishing_order(path)
    coef = path.coefficient(p)
    dim = path.dim
    comps = (coef[:dim], coef[dim:2 * dim], coef[2 * dim:])
    pairs, pair = _root_vectors(path, rs)
    pairings = {}
    witness = None
    for label, vec in pairs:
        vals = tuple(pair(comp, vec) for comp in comps)
        pairings[label] = vals
        if witness is None and all(_is_zero(v) for v in vals):
            witness = label
    if p > path.d:
        return NondegeneracyVerdict(False, p, path.d, "p > d", pairings)
    if witness is not None:
        ambient = dict(pairs)[witness]
        return NondegeneracyVerdict(False, p, path.d, ambient, pairings)
    return NondegeneracyVerdict(True, p, path.d, None, pairings)


def predicted_holder_exponent(path: ZetaPath, rs: RootSystem | None = None) -> Fraction:
    rs = rs or build_root_system(path.kind, path.rank)
    verdict = is_nondegenerate(path, rs)
    if not verdict:
        raise ADEError(f"path is degenerate (witness {verdict.witness}); the Hölder bound does not apply")
    return Fraction(1, path.d)


def an_family_to_zeta(h_series: Sequence[Sequence], d: int,
                      truncation_order: int = DEFAULT_TRUNCATION) -> ZetaPath:
    """Type-A path from the roots h_i(t) of xy + prod(z - h_i(t)) = 0.

    Each ``h_series[i]`` lists the coefficients of t^0, t^1, ...; entries may
    be real, complex or (re, im) pairs.  The tuple is re-centred so that it is
    trace free at every order.
    """
    lengths = {len(h) for h in h_series}
    if len(lengths) != 1:
        raise ADEError("inconsistent series lengths")
    m = len(h_series)
    if m < 2:
        raise ADEError("need at least two roots h_i")
    length = lengths.pop()
    if length > truncation_order + 1:
        raise ADEError("series longer than the truncation order")

    def split(x):
        if isinstance(x, (tuple, list)):
            return _num(x[0]), _num(x[1])
        if isinstance(x, complex):
            return float(x.real), float(x.imag)
        return _num(x), Fraction(0)

    zc = {}
    for k in range(length):
        re = [split(h[k])[0] for h in h_series]
        im = [split(h[k])[1] for h in h_series]
        mr, mi = sum(re) / m, sum(im) / m
        zc[k] = [(a - mr, b - mi) for a, b in zip(re, im)]
    return make_path("A", m - 1, zc, d=d, truncation_order=truncation_order)


def a1_scalar(zeta_c: np.ndarray) -> complex:
    """Complex A1 period (h1 - h2)/sqrt(2): pairing with the unit root vector."""
    return complex(zeta_c[0] - zeta_c[1]) / math.sqrt(2.0)
