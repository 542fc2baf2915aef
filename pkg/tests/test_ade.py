import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import brute_force_wall

from alelab.ade import (ADEError, ZetaPath, an_family_to_zeta, build_root_system, is_nondegenerate, make_path,
                        predicted_holder_exponent, vanishing_order)

ROOT_COUNTS = {("A", 1): 2, ("A", 2): 6, ("A", 5): 30, ("D", 4): 24, ("D", 5): 40, ("E", 6): 72, ("E", 7): 126,
               ("E", 8): 240}
WEYL = {("A", 3): 24, ("D", 4): 192, ("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600}


@pytest.mark.parametrize("kind,rank", sorted(ROOT_COUNTS))
def test_root_counts_and_norms(kind, rank):
    rs = build_root_system(kind, rank)
    assert len(rs.roots) == ROOT_COUNTS[(kind, rank)]
    roots = set(rs.roots)
    for r in rs.roots:
        assert rs.pairing(r, r) == 2
        assert tuple(-x for x in r) in roots


@pytest.mark.parametrize("kind,rank", sorted(WEYL))
def test_weyl_order(kind, rank):
    assert build_root_system(kind, rank).weyl_order == WEYL[(kind, rank)]


@pytest.mark.parametrize("n", range(1, 6))
def test_weyl_order_type_a_factorial(n):
    assert build_root_system("A", n).weyl_order == math.factorial(n + 1)


def test_a1_data():
    rs = build_root_system("A", 1)
    assert sorted(rs.roots) == [(-1,), (1,)]
    assert rs.cartan_matrix.tolist() == [[2]]
    assert rs.weyl_order == 2
    assert tuple(rs.cstar_weights) == (2, 2, 2)


def test_a2_data():
    rs = build_root_system("A", 2)
    assert len(rs.roots) == 6 and rs.weyl_order == 6
    assert tuple(rs.cstar_weights) == (3, 3, 2)


def test_e8_against_lattice_enumeration():
    # norm-2 vectors of the E8 lattice: integer or half-integer coordinates with even sum
    count = 0
    for v in itertools.product(range(-1, 2), repeat=8):
        if sum(x * x for x in v) == 2 and sum(v) % 2 == 0:
            count += 1
    for signs in itertools.product((-1, 1), repeat=8):
        if sum(1 for s in signs if s < 0) % 2 == 0:
            count += 1
    assert count == len(build_root_system("E", 8).roots)


@pytest.mark.parametrize("kind,rank", [("D", 2), ("E", 9), ("E", 5), ("B", 2), ("A", 0)])
def test_invalid_labels(kind, rank):
    with pytest.raises(ADEError):
        build_root_system(kind, rank)


def test_vanishing_order_single_term():
    path = make_path("A", 1, {1: [(1, 0), (-1, 0)]})
    p, dot = vanishing_order(path)
    assert p == 1
    assert dot[1][0] == (1, 0)


def test_vanishing_order_leading_term():
    path = make_path("A", 1, {3: [1, -1], 5: [2, -2]})
    assert vanishing_order(path)[0] == 3


def test_vanishing_order_zero_path():
    path = make_path("A", 1, {}, truncation_order=6)
    with pytest.raises(ADEError, match="truncation"):
        vanishing_order(path)


def test_a1_nondegenerate():
    v = is_nondegenerate(make_path("A", 1, {1: [1, -1]}, d=2), build_root_system("A", 1))
    assert v and v.p == 1


def test_a2_wall_example():
    v = is_nondegenerate(make_path("A", 2, {1: [1, 1, -2]}), build_root_system("A", 2))
    assert not v
    assert tuple(v.witness) in {(1, -1, 0), (-1, 1, 0)}


def test_p_greater_than_d():
    v = is_nondegenerate(make_path("A", 1, {3: [1, -1]}, d=2), build_root_system("A", 1))
    assert not v and v.witness == "p > d"


def test_predicted_exponent():
    assert predicted_holder_exponent(make_path("A", 1, {1: [1, -1]}, d=2)) == Fraction(1, 2)
    assert predicted_holder_exponent(make_path("A", 1, {1: [1, -1]}, d=1)) == 1
    with pytest.raises(ADEError):
        predicted_holder_exponent(make_path("A", 2, {1: [1, 1, -2]}))


def test_eh_family_from_roots():
    path = an_family_to_zeta([[0, 1], [0, -1]], d=2)
    p, dot = vanishing_order(path)
    assert p == 1
    assert dot[1] == ((1, 0), (-1, 0))


def test_constant_roots_give_zero_path():
    path = an_family_to_zeta([[2, 0], [2, 0]], d=1)
    with pytest.raises(ADEError):
        vanishing_order(path)


def test_cube_roots_of_unity_nondegenerate():
    w = complex(-0.5, math.sqrt(3) / 2)
    path = an_family_to_zeta([[0, 1], [0, w], [0, w * w]], d=1)
    assert vanishing_order(path)[0] == 1
    assert is_nondegenerate(path, build_root_system("A", 2))


def test_inconsistent_lengths():
    with pytest.raises(ADEError):
        an_family_to_zeta([[0, 1], [0]], d=1)


def test_json_round_trip():
    path = make_path("A", 2, {1: [(Fraction(1, 3), 1), (Fraction(-1, 3), 0), (0, -1)]}, d=2)
    back = ZetaPath.from_json(path.to_json())
    assert back == path
    assert path.to_json()["schema"] == "alelab.zeta_path/1"


fracs = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def rational_a_paths(draw, rank):
    comps = []
    for _ in range(3):
        v = [draw(fracs) for _ in range(rank)]
        if draw(st.booleans()):
            # land on a wall often enough to exercise both branches
            v[0] = v[1] if rank > 1 else v[0]
        v.append(-sum(v))
        comps.append(v)
    if draw(st.booleans()):
        j = draw(st.integers(0, rank - 1))
        for v in comps:
            v[j + 1] = v[j]
            v[-1] = 0
            v[-1] = -sum(v)
    return comps


def _path_from(comps, rank):
    zr, re, im = comps
    return make_path("A", rank, {1: list(zip(re, im))}, {1: zr}, d=1)


@pytest.mark.parametrize("rank", [2, 3])
@given(data=st.data())
def test_classifier_matches_brute_force(rank, data):
    comps = data.draw(rational_a_paths(rank))
    if all(x == 0 for v in comps for x in v):
        return
    path = _path_from(comps, rank)
    v = is_nondegenerate(path, build_root_system("A", rank))
    assert bool(v) == (not brute_force_wall(comps, rank))


@given(data=st.data(), c=st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(lambda x: x != 0))
def test_classifier_scale_and_permutation_invariant(data, c):
    comps = data.draw(rational_a_paths(2))
    if all(x == 0 for v in comps for x in v):
        return
    rs = build_root_system("A", 2)
    path = _path_from(comps, 2)
    base = bool(is_nondegenerate(path, rs))
    assert bool(is_nondegenerate(path.scaled(c), rs)) == base
    perm = data.draw(st.permutations(range(3)))
    permuted = [[v[k] for k in perm] for v in comps]
    assert bool(is_nondegenerate(_path_from(permuted, 2), rs)) == base
