import pytest
from hypothesis import given, strategies as st

from dvfourfold.exactfield import QQ, Matrix, make_rng, random_matrix
from dvfourfold.grassmann import chart_coordinates, contains
from dvfourfold.harness import ScenarioConfig, gen_instance
from dvfourfold.quadric_cycles import (
    D1_DIRECTION_COORDS, D1_PIVOTS, RankMismatch, build_chain, chain_with_rank_one,
    corrupt_dual, d1_limit, d2_line_invariance, direction_to_nm, is_pure,
    l49_linear_coefficients, l49_witness, nm_to_direction, o_to_o1, quadric_chart,
    quadric_value, rank_two_direction, verify_chain,
)
from dvfourfold.triangle import chart_matrix, chart_value, frame_from_triangle
from dvfourfold.trivector import Alternating3Form, evaluate

from conftest import F10007


@pytest.fixture(scope="module")
def chart():
    inst, subs = gen_instance(ScenarioConfig("triangle", seed=21))
    return quadric_chart(frame_from_triangle(inst, *subs))


def test_frame_form_is_pure(chart):
    assert is_pure(chart.alpha)
    impure = chart.alpha + Alternating3Form.elementary(0, 1, 3, 9, F10007)
    assert not is_pure(impure)


def test_quadric_is_chart_value(chart):
    # on a pure frame form, α'(I | N | M) is exactly the bilinear pairing
    rng = make_rng(0)
    for _ in range(10):
        n, m = F10007.random_vector(9, rng), F10007.random_vector(9, rng)
        assert quadric_value(chart, n, m) == chart_value(chart.alpha, n, m)


def test_chain_isotropy_and_factorization(chart):
    rng = make_rng(1)
    chain = build_chain(chart, rng=rng)
    rep = verify_chain(chart, chain, 30, rng)
    assert rep.ok
    assert rep.a_checked == [30] * 10 and rep.b_checked == [30] * 9
    assert all(a.dim == 9 for a in chain.A) and all(b.dim == 10 for b in chain.B)


def test_chain_b_contains_neighbouring_a(chart):
    chain = build_chain(chart, rng=make_rng(2))
    for i in range(9):
        for v in chain.A[i].rows + chain.A[i + 1].rows:
            assert contains(chain.B[i], v)


def test_corrupted_dual_is_caught(chart):
    rng = make_rng(3)
    bad = corrupt_dual(build_chain(chart, rng=rng), rng)
    rep = verify_chain(chart, bad, 5, rng)
    assert not rep.ok
    assert {i for i, _ in rep.a_failures} >= {1}


def test_o_to_o1_matches_chart_change():
    rng = make_rng(4)
    for _ in range(100):
        n, m = F10007.random_vector(9, rng), F10007.random_vector(9, rng)
        if F10007.is_zero(n[6]):
            continue
        direct = chart_coordinates(chart_matrix(n, m, F10007), D1_PIVOTS)
        assert o_to_o1(n, m, F10007) == direct
        # n'_1 = -n_1/n_7 and n'_7 = 1/n_7 in 1-based chart names
        inv7 = F10007.inv(n[6])
        assert direct.coord(0, 2) == F10007.norm(-n[0] * inv7)


def test_o_to_o1_over_rationals():
    n = [1, 2, 3, 4, 5, 6, 7, 8, 9]
    m = [2, 0, 1, 0, 3, 0, 1, 1, 1]
    direct = chart_coordinates(chart_matrix(n, m, QQ), D1_PIVOTS)
    assert o_to_o1(n, m, QQ) == direct


def _rank_one(rng):
    u, w = F10007.random_vector(3, rng), F10007.random_vector(6, rng)
    return Matrix._raw([[F10007.norm(u[s] * w[j]) for j in range(6)] for s in range(3)], F10007, 6)


def test_d1_limit_routes_agree(chart):
    rng = make_rng(5)
    for _ in range(10):
        lim = d1_limit(chart, _rank_one(rng), random_matrix(3, 6, F10007, rng))
        assert lim.plucker_agrees and lim.in_D1


def test_d1_direction_coordinates_ignore_base(chart):
    rng = make_rng(6)
    d = _rank_one(rng)
    a = d1_limit(chart, d, random_matrix(3, 6, F10007, rng))
    b = d1_limit(chart, d, random_matrix(3, 6, F10007, rng))
    if a.pivots == b.pivots == D1_PIVOTS:
        assert all(a.point.coord(r, c) == b.point.coord(r, c) for r, c in D1_DIRECTION_COORDS)


def test_d1_rejects_wrong_rank(chart):
    with pytest.raises(RankMismatch):
        d1_limit(chart, random_matrix(3, 6, F10007, make_rng(7)), Matrix.zeros(3, 6, F10007))


def test_l49_witness_and_linear_expression(chart):
    rng = make_rng(8)
    for i in (0, 4, 8):
        chain, d = chain_with_rank_one(chart, i, rng)
        n, m = direction_to_nm(d)
        assert contains(chain.A[i], n + m)
        wit = l49_witness(chart, d, 100, rng)
        assert not F10007.is_zero(wit.value)
        coef = l49_linear_coefficients(chart.alpha, wit.point)
        rows = [list(r) for r in wit.point.rows]
        zeroed = [list(r) for r in rows]
        zeroed[0][6:9] = [0, 0, 0]
        expect = evaluate(chart.alpha, *zeroed) + sum(coef[k] * rows[0][6 + k] for k in range(3))
        assert F10007.norm(expect) == wit.value


def test_d2_isotropic_line_stays_on_x(chart):
    rng = make_rng(9)
    chain = build_chain(chart, rng=rng)
    d = rank_two_direction(chain.a_generators(3), F10007, rng)
    rep = d2_line_invariance(chart, d, 3, rng)
    assert rep.invariant and rep.on_X and rep.line_in_quadric


def test_d2_generic_line_invariant(chart):
    rng = make_rng(10)
    units = [[1 if c == r else 0 for c in range(18)] for r in range(18)]
    d = rank_two_direction(units, F10007, rng)
    rep = d2_line_invariance(chart, d, 3, rng)
    assert rep.invariant and rep.consistent


@given(st.lists(st.integers(0, 10006), min_size=18, max_size=18))
def test_nm_direction_round_trip(xs):
    n, m = xs[:9], xs[9:]
    assert direction_to_nm(nm_to_direction(n, m, F10007)) == (n, m)
