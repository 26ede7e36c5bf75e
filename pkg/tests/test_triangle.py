import pytest
import sympy
from hypothesis import given, strategies as st

from dvfourfold.exactfield import QQ, Matrix, determinant, make_rng, random_matrix
from dvfourfold.grassmann import dim_intersection, intersect
from dvfourfold.harness import WITNESS_BLOCKS, ScenarioConfig, gen_instance, witness_components
from dvfourfold.triangle import (
    SingularQ1, SingularQ3, WrongStratum, classify_pair, complete_triangle,
    flip_second_chart_row, frame_from_pair, frame_from_triangle, hyperbolic_dual_basis,
    in_triangle_variety, is_nondegenerate, pairing_from_form, pairing_matrix_from_blocks,
    phi_system, psi_system, published_block_matrix, reduction_criterion, reduction_criterion_q1,
    solve_triangle,
)
from dvfourfold.trivector import FrameComponents, form_from_components, frame_components, is_zero_on

from conftest import F101, F10007

# golden value from the sympy oracle below, frozen before the pairing code was trusted
WITNESS_DET = -2


def sympy_witness_det():
    """Pairing built symbolically: coefficient of n_a m_b in α'(I | N | M)."""
    n = sympy.symbols("n0:9")
    m = sympy.symbols("m0:9")
    chart = sympy.Matrix([[1 if c == s else 0 for c in range(3)] + list(n[3 * s:3 * s + 3])
                          + list(m[3 * s:3 * s + 3]) for s in range(3)])
    value = 0
    for i in range(3):
        for j in range(3):
            for k in range(3):
                q = WITNESS_BLOCKS[f"Q{i + 1}"][j][k]
                if q:
                    value += q * chart.extract([0, 1, 2], [i, 3 + j, 6 + k]).det()
    value = sympy.expand(value)
    pairing = sympy.Matrix(9, 9, lambda a, b: value.coeff(n[a]).coeff(m[b]))
    return pairing.det()


def test_witness_oracle_value():
    assert sympy_witness_det() == WITNESS_DET


def test_witness_determinant_exact():
    q = witness_components(QQ)
    pm = pairing_matrix_from_blocks(q)
    assert determinant(pm.M) == WITNESS_DET
    assert determinant(published_block_matrix(q)) == WITNESS_DET
    assert pairing_from_form(form_from_components(q)).M == pm.M
    assert reduction_criterion(q) and reduction_criterion_q1(q)


@pytest.fixture(scope="module")
def pair():
    return gen_instance(ScenarioConfig("pair", seed=11))


@pytest.fixture(scope="module")
def tri():
    return gen_instance(ScenarioConfig("triangle", seed=11))


def test_completion_postconditions(pair):
    inst, (w1, w2) = pair
    comp = solve_triangle(inst, w1, w2, make_rng(0))
    w3 = comp.w3
    assert is_zero_on(inst.alpha, w3)
    assert dim_intersection(w3, w1) == dim_intersection(w3, w2) == 3
    assert intersect(intersect(w1, w2), w3).dim == 0
    assert comp.phi_det != 0 and comp.psi_det != 0
    assert in_triangle_variety(inst, w1, w2, w3)


def test_completion_idempotent_and_symmetric(pair):
    inst, (w1, w2) = pair
    w3 = complete_triangle(inst, w1, w2)
    assert complete_triangle(inst, w1, w3) == w2
    assert complete_triangle(inst, w2, w1) == w3


def test_completion_frame_independent(pair):
    inst, (w1, w2) = pair
    a = solve_triangle(inst, w1, w2, make_rng(1)).w3
    b = solve_triangle(inst, w1, w2, make_rng(2), greedy=False).w3
    assert a == b


def test_recovers_seeded_triangle(tri):
    inst, (w1, w2, w3) = tri
    assert complete_triangle(inst, w1, w2) == w3


def test_wrong_strata():
    for kind, d in (("stratum4", 4), ("stratum5", 5)):
        inst, (w1, w2) = gen_instance(ScenarioConfig(kind, seed=1))
        assert classify_pair(inst, w1, w2) == d
        with pytest.raises(WrongStratum):
            solve_triangle(inst, w1, w2)


def test_completion_systems_on_frame(pair):
    inst, (w1, w2) = pair
    a9 = frame_from_pair(inst, w1, w2).alpha_prime
    assert phi_system(a9)[0].shape == psi_system(a9)[0].shape == (9, 9)
    zero = form_from_components(FrameComponents(*(Matrix.zeros(3, 3, F10007) for _ in range(3))))
    assert phi_system(zero)[0].is_zero() and psi_system(zero)[0].is_zero()


def test_pairing_direct_equals_blocks(tri):
    inst, subs = tri
    frame = frame_from_triangle(inst, *subs)
    q = frame_components(frame.alpha_prime)
    assert pairing_from_form(frame).M == pairing_matrix_from_blocks(q).M
    assert flip_second_chart_row(pairing_matrix_from_blocks(q).M) == published_block_matrix(q)


@given(st.integers(0, 2**32))
def test_reduction_criteria_match_determinant(seed):
    rng = make_rng(seed)
    q = FrameComponents(*(random_matrix(3, 3, F101, rng) for _ in range(3)))
    nondeg = is_nondegenerate(pairing_matrix_from_blocks(q))
    try:
        assert reduction_criterion(q) == nondeg
    except SingularQ3:
        pass
    try:
        assert reduction_criterion_q1(q) == nondeg
    except SingularQ1:
        pass


def test_degenerate_blocks_detected():
    # Q1 = Q2 = Q3 = I: Q1 Q3^-1 Q2 - Q2 Q3^-1 Q1 = 0
    q = FrameComponents(*(Matrix.identity(3, QQ) for _ in range(3)))
    assert not reduction_criterion(q)
    assert not is_nondegenerate(pairing_matrix_from_blocks(q))


def test_hyperbolic_dual_basis(rng):
    q = witness_components(QQ)
    pm = pairing_matrix_from_blocks(q)
    v = random_matrix(9, 9, QQ, rng)
    vs = hyperbolic_dual_basis(pm, v)
    assert v @ pm.M @ vs.T() == Matrix.identity(9, QQ)
