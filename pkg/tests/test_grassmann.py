from itertools import combinations

import pytest
from hypothesis import given

from dvfourfold.exactfield import QQ, Matrix, random_matrix, rank
from dvfourfold.grassmann import (
    AmbientMismatch, NotInChart, PencilLine, RankDeficient, choose_complement,
    chart_coordinates, contains, coordinate_subspace, dim_intersection, intersect,
    limit_point, plucker_vector, span, subspace_from_plucker, subspace_from_rows, subspace_sum,
)

from conftest import F101, F10007, matrices


def e(i, n=10):
    return [1 if j == i else 0 for j in range(n)]


def test_canonical_form_ignores_row_order_and_scaling():
    rows = [[1, 2, 3, 4], [0, 1, 1, 0], [2, 5, 7, 8]]
    a = subspace_from_rows(Matrix.from_rows(rows, QQ))
    b = subspace_from_rows(Matrix.from_rows([rows[1], [3, 6, 9, 12]], QQ))
    assert a == b and a.dim == 2


def test_coordinate_intersections():
    a = coordinate_subspace(range(0, 6), 10, QQ)
    b = coordinate_subspace(range(3, 9), 10, QQ)
    assert intersect(a, b) == coordinate_subspace([3, 4, 5], 10, QQ)
    assert dim_intersection(a, b) == 3
    assert subspace_sum(a, b) == coordinate_subspace(range(9), 10, QQ)
    assert intersect(a, a) == a
    with pytest.raises(AmbientMismatch):
        intersect(a, coordinate_subspace([0], 9, QQ))


def test_random_pair_intersection_generic(rng):
    a = subspace_from_rows(random_matrix(6, 10, F10007, rng))
    b = subspace_from_rows(random_matrix(6, 10, F10007, rng))
    assert dim_intersection(a, b) == 2
    meet = intersect(a, b)
    assert all(contains(a, v) and contains(b, v) for v in meet.rows)


def test_shared_k3_dimension(rng):
    k3 = random_matrix(3, 10, F10007, rng)
    w1 = subspace_from_rows(k3.vstack(random_matrix(3, 10, F10007, rng)))
    w2 = subspace_from_rows(k3.vstack(random_matrix(3, 10, F10007, rng)))
    assert dim_intersection(w1, w2) == 3
    assert intersect(w1, w2) == subspace_from_rows(k3)


def test_greedy_complement():
    inside = coordinate_subspace(range(6), 10, QQ)
    of = coordinate_subspace(range(3), 10, QQ)
    assert choose_complement(inside, of) == coordinate_subspace([3, 4, 5], 10, QQ)


def test_complement_with_avoid_list(rng):
    inside = coordinate_subspace(range(6), 10, F101)
    of = coordinate_subspace(range(3), 10, F101)
    avoid = coordinate_subspace([3, 4, 5], 10, F101)
    c = choose_complement(inside, of, rng, avoid=[avoid])
    assert c.dim == 3 and dim_intersection(c, of) == 0 and dim_intersection(c, avoid) == 0


def test_plucker_basics():
    ident = Matrix.from_rows([e(0, 5), e(1, 5)], QQ)
    p = plucker_vector(ident)
    assert p[0] == 1 and all(x == 0 for x in p[1:])
    m = Matrix.from_rows([[1, 2, 3, 4, 5], [0, 1, 7, 2, 1]], QQ)
    scaled = Matrix.from_rows([[3, 6, 9, 12, 15], [0, 1, 7, 2, 1]], QQ)
    assert plucker_vector(scaled) == [3 * x for x in plucker_vector(m)]
    with pytest.raises(RankDeficient):
        plucker_vector(Matrix.from_rows([[1, 2], [2, 4]], QQ))


def test_plucker_relation_gr24(rng):
    # p01 p23 - p02 p13 + p03 p12 = 0 on Gr(2,4)
    for _ in range(20):
        p = dict(zip(combinations(range(4), 2), plucker_vector(random_matrix(2, 4, F10007, rng))))
        rel = p[0, 1] * p[2, 3] - p[0, 2] * p[1, 3] + p[0, 3] * p[1, 2]
        assert F10007.is_zero(F10007.norm(rel))


@given(matrices(F10007, 3, 7))
def test_plucker_round_trip(m):
    if rank(m) < 3:
        return
    s = subspace_from_rows(m)
    assert subspace_from_plucker(plucker_vector(m), 3, 7, F10007) == s


def test_chart_round_trip_and_miss():
    s = coordinate_subspace([0, 1, 2], 9, QQ)
    cp = chart_coordinates(s, (0, 1, 2))
    assert cp.coords.is_zero() and cp.to_subspace() == s
    with pytest.raises(NotInChart):
        chart_coordinates(s, (0, 1, 3))


@given(matrices(QQ, 3, 9))
def test_chart_round_trip_random(m):
    if rank(m.submatrix(range(3), (0, 1, 3))) < 3:
        return
    s = subspace_from_rows(m)
    assert chart_coordinates(s, (0, 1, 3)).to_subspace() == s


def test_limit_of_coordinate_pencil():
    # t (0 | e3) + (e0 | 0) tends to the span of e3-row in the first row
    f = QQ
    base = Matrix.from_rows([e(0, 4), e(1, 4)], f)
    d = Matrix.from_rows([e(3, 4), [0] * 4], f)
    assert limit_point(PencilLine(base, d)) == span([e(3, 4), e(1, 4)], f, 4)


def test_limit_of_constant_pencil_is_base():
    base = Matrix.from_rows([e(0, 4), e(1, 4)], QQ)
    assert limit_point(PencilLine(base, Matrix.zeros(2, 4, QQ))) == subspace_from_rows(base)


def test_limit_point_is_grassmannian_point(rng):
    for _ in range(10):
        base = random_matrix(3, 9, F10007, rng)
        d = random_matrix(3, 9, F10007, rng)
        lim = limit_point(PencilLine(base, d))
        assert lim.dim == 3
        # a full-rank direction gives its own row space
        if rank(d) == 3:
            assert lim == subspace_from_rows(d)
