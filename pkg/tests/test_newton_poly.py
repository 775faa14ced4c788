from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hexlat.errors import SubprincipalMonomialError, UnsupportedSupportError
from hexlat.newton_poly import (
    CUBIC_WEIGHT,
    QUARTIC_WEIGHT,
    TaylorSupport,
    build_polyhedron,
    check_r_nondegenerate_quartic,
    is_r_nondegenerate,
    quasi_homogeneous_filter,
    reduce_dimension,
    varchenko_bound,
)

NORMAL1 = TaylorSupport.from_exponents([(2, 0), (1, 2), (0, 4)])
NORMAL2 = TaylorSupport.from_exponents([(2, 0), (0, 3)])
MORSE = TaylorSupport.from_exponents([(2, 0), (0, 2)])


def test_quartic_family():
    p = build_polyhedron(NORMAL1)
    assert p.distance == Fraction(4, 3)
    assert p.principal_face_dim == 1 and p.k == 1
    assert [p.vertices[i] for i in p.principal_face] == [(0, 4), (2, 0)]
    # (1, 2) lies on the edge, so it is not a vertex
    assert p.vertices == ((0, 4), (2, 0))
    assert varchenko_bound(p) == (Fraction(-3, 4), 0)


def test_cubic_family():
    p = build_polyhedron(NORMAL2)
    assert p.distance == Fraction(6, 5)
    assert p.principal_face_dim == 1
    assert varchenko_bound(p) == (Fraction(-5, 6), 0)


def test_morse():
    p = build_polyhedron(MORSE)
    assert p.distance == 1
    assert varchenko_bound(p) == (Fraction(-1), 0)


def test_exact_types():
    beta, p = varchenko_bound(build_polyhedron(NORMAL1))
    assert isinstance(beta, Fraction) and isinstance(p, int)


def test_vertex_principal_face():
    p = build_polyhedron(TaylorSupport.from_exponents([(2, 2), (4, 0), (0, 5)]))
    assert p.distance == 2
    assert p.principal_face_dim == 0 and p.k == 2
    assert varchenko_bound(p) == (Fraction(-1, 2), 1)


def test_ray_principal_face():
    p = build_polyhedron(TaylorSupport.from_exponents([(3, 1), (5, 0)]))
    assert p.distance == 3
    assert p.principal_face_dim == 1


def test_json_report():
    d = build_polyhedron(NORMAL1).to_dict()
    assert d == {
        "vertices": [[0, 4], [2, 0]],
        "distance_num": 4,
        "distance_den": 3,
        "face_dim": 1,
        "bound_beta_num": -3,
        "bound_beta_den": 4,
        "bound_p": 0,
    }


def test_parse():
    s = TaylorSupport.parse("2,0;1,2:-1/2; 0,4")
    assert s.monomials == {(2, 0): 1, (1, 2): Fraction(-1, 2), (0, 4): 1}
    assert TaylorSupport({(1, 1): 0, (2, 0): 3}).exponents == [(2, 0)]
    with pytest.raises(ValueError):
        build_polyhedron(TaylorSupport({}))


exponents = st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), min_size=1, max_size=8)


@given(exponents)
def test_distance_swap_invariant(exps):
    a = build_polyhedron(TaylorSupport.from_exponents(exps))
    b = build_polyhedron(TaylorSupport.from_exponents([(j, i) for i, j in exps]))
    assert a.distance == b.distance
    assert a.principal_face_dim == b.principal_face_dim


@given(exponents, st.integers(0, 9), st.integers(0, 9), st.integers(1, 3))
def test_interior_monomials_are_irrelevant(exps, a, b, shift):
    base = build_polyhedron(TaylorSupport.from_exponents(exps))
    # any point dominated by a support point is strictly inside after a positive shift
    p = exps[(a + b) % len(exps)]
    inner = (p[0] + shift, p[1] + a % 2)
    more = build_polyhedron(TaylorSupport.from_exponents(exps + [inner]))
    assert more.vertices == base.vertices
    assert more.distance == base.distance
    assert more.principal_face == base.principal_face


@given(exponents)
def test_diagonal_point_on_boundary(exps):
    p = build_polyhedron(TaylorSupport.from_exponents(exps))
    d = p.distance
    verts = p.vertices
    # (m, m) with m = max(a, b) lies in the polyhedron for every vertex, and the
    # whole polyhedron sits in the half plane x + y >= min(a + b)
    lo = min(max(Fraction(a), Fraction(b)) for a, b in verts)
    assert d <= lo
    assert d >= min(Fraction(a + b, 2) for a, b in verts)


@pytest.mark.parametrize("coeffs, ok", [((1, 1, 0), True), ((1, 2, 1), False), ((-1, -1, 0), True), ((0, 1, 1), False)])
def test_quartic_nondegeneracy(coeffs, ok):
    assert check_r_nondegenerate_quartic(*coeffs) is ok


def test_quartic_all_zero():
    with pytest.raises(ValueError):
        check_r_nondegenerate_quartic(0, 0, 0)


def test_filter():
    s = TaylorSupport.from_exponents([(2, 0), (1, 2), (0, 4), (0, 5)])
    lo, hi = quasi_homogeneous_filter(s, QUARTIC_WEIGHT)
    assert set(lo.monomials) == {(2, 0), (1, 2), (0, 4)}
    assert set(hi.monomials) == {(0, 5)}
    s = TaylorSupport.from_exponents([(2, 0), (0, 3), (1, 2)])
    lo, hi = quasi_homogeneous_filter(s, CUBIC_WEIGHT)
    assert set(lo.monomials) == {(2, 0), (0, 3)}
    assert set(hi.monomials) == {(1, 2)}
    with pytest.raises(SubprincipalMonomialError):
        quasi_homogeneous_filter(TaylorSupport.from_exponents([(1, 0)]), CUBIC_WEIGHT)
    with pytest.raises(ValueError):
        quasi_homogeneous_filter(s, (0, 1))


def test_general_nondegeneracy():
    assert is_r_nondegenerate(TaylorSupport({(2, 0): 1, (1, 2): 1, (0, 4): 0.0}))
    assert not is_r_nondegenerate(TaylorSupport({(2, 0): 1, (1, 2): 2, (0, 4): 1}))
    assert is_r_nondegenerate(TaylorSupport({(2, 0): -2, (0, 3): 0.5}))
    with pytest.raises(UnsupportedSupportError):
        is_r_nondegenerate(TaylorSupport.from_exponents([(3, 0), (0, 3)]))


def test_dimension_reduction():
    assert reduce_dimension(Fraction(-3, 4), 0, 2) == (Fraction(-7, 4), 0)
    assert reduce_dimension(Fraction(-1, 2), 1, 1) == (Fraction(-1), 1)
