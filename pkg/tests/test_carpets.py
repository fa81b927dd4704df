from itertools import combinations
from math import comb

import pytest

from k3carpets.carpets import (
    CarpetParams,
    alpha_kernel_check,
    alpha_of_mixed_minor,
    carpet_generators,
    degree_two_monomials,
    quadric_rank,
    quadric_vector,
    rank3_witness,
    resonance_minors,
    scroll_matrix_minors,
)
from k3carpets.errors import DomainError, ParameterError
from k3carpets.groebner import buchberger_complete, normal_form, normal_form_over_q
from k3carpets.linalg import rational_rank
from k3carpets.ring import Ring

E_VALUES = [(2, 1), (0, 1), (-1, 1), (5, 6)]


def strs(basis):
    return [str(g) for g in basis]


def test_generators_2_2():
    B = carpet_generators(CarpetParams(2, 2))
    assert strs(B) == ["x1^2-x0*x2", "x2*y0-2*x1*y1+x0*y2", "y1^2-y0*y2"]


def test_generators_1_1_is_a_square():
    B = carpet_generators(CarpetParams(1, 1))
    R = B.ring
    f = R.x(1) * R.y(0) - R.x(0) * R.y(1)
    assert strs(B) == ["x1^2*y0^2-2*x0*x1*y0*y1+x0^2*y1^2"]
    assert B[0] == f * f


def test_lead_order_3_2():
    B = carpet_generators(CarpetParams(3, 2))
    R = B.ring
    assert [R.format_monomial(m) for m in B.lead_terms] == ["x1^2", "x1*x2", "x2^2", "x2*y0", "x3*y0", "y1^2"]


def test_b_equals_one_cubics():
    B = carpet_generators(CarpetParams(4, 1, 3, 7))
    assert [g.degree() for g in B] == [2] * 6 + [3] * 3
    assert strs(B)[6:] == [
        "x2*y0^2-3*x1*y0*y1+7*x0*y1^2",
        "x3*y0^2-3*x2*y0*y1+7*x1*y1^2",
        "x4*y0^2-3*x3*y0*y1+7*x2*y1^2",
    ]


def test_count_6_6():
    assert len(carpet_generators(CarpetParams(6, 6))) == 55


@pytest.mark.parametrize("e", E_VALUES + [(1, -1)])
def test_census_and_leads(e):
    for a in range(1, 9):
        for b in range(1, a + 1):
            B = carpet_generators(CarpetParams(a, b, *e))
            if b >= 2:
                assert len(B) == comb(a + b - 1, 2) == comb(a, 2) + comb(b, 2) + (a - 1) * (b - 1)
            assert all(g.lead_coefficient() in (1, -1) for g in B)
            assert len(set(B.lead_codes)) == len(B)
            keys = [(g.degree(), -g.lead_code()) for g in B]
            assert keys == sorted(keys)
            assert all(g.is_multihomogeneous() for g in B)


def test_bad_params():
    for a, b in [(0, 0), (2, 3), (1, 0)]:
        with pytest.raises(ParameterError):
            CarpetParams(a, b)


def test_scroll_minors():
    R = Ring(2, 2)
    mins = scroll_matrix_minors(2, 2, 1, R)
    assert len(mins) == 6
    target = R.parse("x1*y1-x2*y0")
    assert target in mins or -target in mins
    mons = degree_two_monomials(R)
    assert rational_rank([quadric_vector(m, mons) for m in mins]) == 6


@pytest.mark.parametrize("t1,t2", [(1, 2), (2, 3), (1, -1)])
def test_identity_for_q(t1, t2):
    a, b = 4, 3
    B = carpet_generators(CarpetParams(a, b, t1 + t2, t1 * t2))
    R = B.ring
    x, y = R.x, R.y

    def det(p, q, r, s):
        return p * s - q * r

    for i in range(a - 1):
        for j in range(b - 1):
            q = x(i + 2) * y(j) - (t1 + t2) * x(i + 1) * y(j + 1) + t1 * t2 * x(i) * y(j + 2)
            rhs = t2 * det(x(i), y(j + 1), x(i + 1), t1 * y(j + 2)) - det(x(i + 1), y(j), x(i + 2), t1 * y(j + 1))
            assert q == rhs
            assert q in B.generators


def test_alpha_values():
    P = CarpetParams(2, 2)
    assert alpha_of_mixed_minor(0, 0, P) == (2, 0)
    P = CarpetParams(5, 3)
    assert alpha_of_mixed_minor(4, 2, P) == (0, 6)
    with pytest.raises(ParameterError):
        alpha_of_mixed_minor(5, 0, P)


def test_alpha_kernel():
    for a in range(2, 5):
        for b in range(2, a + 1):
            chk = alpha_kernel_check(CarpetParams(a, b))
            assert chk.minor_count == comb(a + b, 2)
            assert chk.kernel_dim == comb(a + b - 1, 2)
            assert chk.generators_in_kernel and chk.generators_span_kernel


def test_rank3_witness():
    P = CarpetParams(2, 2)
    w = rank3_witness(0, 0, P)
    R = w.ring
    assert quadric_rank(w) == 3
    q = carpet_generators(P)[1]
    assert w - q == R.parse("x0*x2-x1^2") + R.parse("y0*y2-y1^2")
    with pytest.raises(ParameterError):
        rank3_witness(1, 0, P)


def test_quadric_ranks():
    R = Ring(3, 2)
    assert quadric_rank(R.parse("x0*x2-x1^2")) == 3
    assert quadric_rank(R.parse("x0*x3-x1*x2")) == 4
    assert quadric_rank(R.parse("x0^2")) == 1
    assert quadric_rank(R.parse("x0*x3-x1*x2").reduce_mod(3)) == 4
    with pytest.raises(ParameterError):
        quadric_rank(R.parse("x0^3"))
    with pytest.raises(ParameterError):
        quadric_rank(R.parse("x0^2+x1"))
    with pytest.raises(DomainError):
        quadric_rank(R.parse("x0*x3-x1*x2").reduce_mod(2))


def test_low_rank_quadrics_span_2_2():
    P = CarpetParams(2, 2)
    R = P.ring()
    quads = [R.parse("x1^2-x0*x2"), R.parse("y1^2-y0*y2"), rank3_witness(0, 0, P)]
    assert all(quadric_rank(q) <= 3 for q in quads)
    mons = degree_two_monomials(R)
    gens = [quadric_vector(g, mons) for g in carpet_generators(P)]
    vecs = [quadric_vector(q, mons) for q in quads]
    assert rational_rank(vecs) == 3 == rational_rank(vecs + gens)


@pytest.mark.parametrize("e,k", [((0, 1), 2), ((-1, 1), 3)])
def test_resonance_membership(e, k):
    for n in (k + 1, k + 2):
        P = CarpetParams(n, n, *e)
        B = carpet_generators(P)
        mins = resonance_minors(P, k)
        assert len(mins) == comb(2 * n - 2 * k + 2, 2)
        assert all(normal_form(m, B).is_zero() for m in mins)


def test_resonance_k1_is_the_scroll_matrix():
    P = CarpetParams(3, 3)
    B = carpet_generators(P)
    R = B.ring
    mins = resonance_minors(P, 1)
    xblock = [g for g in mins if all(m[R.a + 1 :] == (0,) * (R.b + 1) for m, _ in g.terms())]
    assert len(xblock) == 3
    assert all(g in B.generators for g in xblock)
    assert all(normal_form(g, B).is_zero() for g in xblock)
    with pytest.raises(ParameterError):
        resonance_minors(CarpetParams(2, 2), 2)


@pytest.mark.parametrize("t1,t2", [(1, 2), (2, 3), (1, -1), (2, -3)])
def test_union_of_two_scrolls(t1, t2):
    for a in range(2, 5):
        for b in range(2, a + 1):
            B = carpet_generators(CarpetParams(a, b, t1 + t2, t1 * t2))
            R = B.ring
            m1 = scroll_matrix_minors(a, b, t1, R)
            m2 = scroll_matrix_minors(a, b, t2, R)
            for minors in (m1, m2):
                G = buchberger_complete(minors)
                assert all(normal_form_over_q(g, G).is_zero() for g in B)
            mons = degree_two_monomials(R)
            V1 = [quadric_vector(m, mons) for m in m1]
            V2 = [quadric_vector(m, mons) for m in m2]
            inter = rational_rank(V1) + rational_rank(V2) - rational_rank(V1 + V2)
            assert inter == comb(a + b - 1, 2)
