import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from alelab.jets import (FDStencilError, Jet, JetDomainError, coordinates, fd_crosscheck, jet_arith,
                         n_coeffs)
from alelab.ale import eh_triple

small = st.floats(-2.0, 2.0, allow_nan=False)
point = st.tuples(small, small, small, small)


def test_product_of_coordinates():
    x = coordinates(np.array([1.0, 2.0, 0.0, 0.0]))
    p = jet_arith("mul", x[0], x[1])
    parts = p.partials()
    assert parts[(0, 0, 0, 0)] == 2.0
    assert parts[(1, 0, 0, 0)] == 2.0
    assert parts[(0, 1, 0, 0)] == 1.0
    assert parts[(1, 1, 0, 0)] == 1.0
    others = [v for a, v in parts.items() if a not in {(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0)}]
    assert np.all(np.asarray(others) == 0)


def test_log_of_one_is_zero_jet():
    assert np.all(jet_arith("log", Jet.constant(1.0)).coeffs == 0)


def test_sqrt_against_finite_differences():
    def field(X):
        return jet_arith("sqrt", X[0] * X[0] + 3.0)
    assert fd_crosscheck(field, [1.0, 0.0, 0.0, 0.0], 4, 1e-3) <= 1e-6


def test_polynomial_crosscheck():
    def field(X):
        return X[0] * X[0] * X[0] * X[1]
    assert fd_crosscheck(field, [0.3, -0.7, 0.2, 1.1], 3, 1e-2) <= 1e-8


def test_eh_potential_crosscheck():
    tri = eh_triple(1.0)

    def field(X):
        u = X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3]
        S = (u * u + 1.0).sqrt()
        return S + (u / (S + 1.0)).log()
    pt = np.array([2.0, 0.0, 0.0, 0.0])
    assert fd_crosscheck(field, pt, 2, 1e-3) <= 1e-5
    # same field through the triple's own potential
    assert np.isclose(tri.kahler_potential(pt).value, field(coordinates(pt)).value)


def test_pole_on_stencil_raises():
    def field(X):
        return (X[0] - 0.01).reciprocal()
    with pytest.raises(FDStencilError, match="stencil point"):
        fd_crosscheck(field, [0.0, 0.0, 0.0, 0.0], 2, 1e-2, precision=None)


@pytest.mark.parametrize("op,arg", [("log", 0.0), ("sqrt", -1.0), ("log", -2.0)])
def test_domain_errors(op, arg):
    with pytest.raises(JetDomainError):
        jet_arith(op, Jet.constant(arg))


def test_division_by_zero_jet():
    with pytest.raises(JetDomainError):
        jet_arith("div", Jet.constant(1.0), Jet.constant(0.0))


def test_unknown_operation():
    with pytest.raises(ValueError):
        jet_arith("tan", Jet.constant(1.0))


def test_table_size():
    assert n_coeffs(4) == 70
    assert sum(1 for a in Jet.constant(0.0).partials() if sum(a) == 4) == 35


def test_halving_step_quarters_deviation():
    def field(X):
        return (X[0] * X[1] + X[2] * X[2] + 2.0).log() * (X[3] * 0.5).exp()
    pt = [0.4, 0.3, -0.2, 0.1]
    d1 = fd_crosscheck(field, pt, 2, 4e-2)
    d2 = fd_crosscheck(field, pt, 2, 2e-2)
    assert d2 <= d1 / 4


@given(point)
def test_order_zero_truncation_matches_scalar(p):
    X = coordinates(np.array(p))
    f = ((X[0] * X[1] + 5.0).sqrt() * X[2].exp() + X[3] * X[3]) / (X[0] * X[0] + 1.0)
    x1, x2, x3, x4 = p
    ref = (math.sqrt(x1 * x2 + 5.0) * math.exp(x3) + x4 * x4) / (x1 * x1 + 1.0)
    assert np.isclose(f.truncate(0).value, ref, rtol=1e-13)


@given(point)
def test_commutative_and_associative(p):
    X = coordinates(np.array(p))
    a, b, c = X[0] + 1.5, X[1] * X[2] - 0.5, X[3].exp()
    np.testing.assert_allclose((a * b).coeffs, (b * a).coeffs, rtol=0, atol=0)
    np.testing.assert_allclose((a + b).coeffs, (b + a).coeffs, rtol=0, atol=0)
    np.testing.assert_allclose(((a * b) * c).coeffs, (a * (b * c)).coeffs, rtol=1e-12, atol=1e-12)


@given(point)
def test_mixed_partials_symmetric_by_construction(p):
    X = coordinates(np.array(p))
    f = (X[0] * X[0] * X[1] * X[1] + 2.0).log() * X[2]
    # d/dx0 d/dx1 through successive derivatives in either order
    d01 = f.derivative(0).derivative(1)
    d10 = f.derivative(1).derivative(0)
    np.testing.assert_array_equal(d01.coeffs, d10.coeffs)
