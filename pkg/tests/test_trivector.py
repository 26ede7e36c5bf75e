from itertools import permutations

import pytest
import sympy
from sympy.combinatorics import Permutation
from hypothesis import given, strategies as st

from dvfourfold.exactfield import QQ, make_rng, random_matrix
from dvfourfold.grassmann import coordinate_subspace, subspace_from_rows
from dvfourfold.trivector import (
    Alternating3Form, DimensionMismatch, EmptyKernel, FrameComponents, block_type,
    constraint_rank, evaluate, form_from_components, frame_components, is_zero_on, mixed_part,
    random_form_vanishing_on, restrict, triples, vanishing_kernel,
)

from conftest import F101, F10007


def brute_evaluate(form, u, v, w):
    # sum over all ordered index triples with the signed coefficient
    n = form.ambient_dim
    total = 0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                total += form.coeff(i, j, k) * u[i] * v[j] * w[k]
    return form.field.norm(form.field.zero + total)


def random_form(n, field, rng):
    return Alternating3Form.from_vector(field.random_vector(len(triples(n)), rng), n, field)


def test_elementary_form_is_determinant():
    form = Alternating3Form.elementary(0, 1, 2, 3, QQ)
    m = sympy.Matrix([[2, 1, 0], [3, -1, 4], [1, 5, 7]])
    assert evaluate(form, *m.tolist()) == m.det()


def test_coeff_signs():
    form = Alternating3Form(4, QQ, {(0, 1, 3): 5})
    for p in permutations((0, 1, 3)):
        sign = Permutation([sorted(p).index(x) for x in p]).signature()
        assert form.coeff(*p) == 5 * sign
    assert form.coeff(0, 0, 3) == 0


def test_bad_shapes():
    with pytest.raises(DimensionMismatch):
        Alternating3Form(11, QQ)
    with pytest.raises(ValueError):
        Alternating3Form(5, QQ, {(2, 1, 0): 1})
    with pytest.raises(DimensionMismatch):
        evaluate(Alternating3Form(4, QQ), [1] * 4, [1] * 4, [1] * 3)


def test_evaluate_matches_brute_force(rng):
    for field in (QQ, F10007):
        form = random_form(6, field, rng)
        for _ in range(5):
            u, v, w = (field.random_vector(6, rng) for _ in range(3))
            assert evaluate(form, u, v, w) == brute_evaluate(form, u, v, w)


@given(st.integers(0, 2**32), st.sampled_from([QQ, F101]))
def test_alternating_and_trilinear(seed, field):
    rng = make_rng(seed)
    form = random_form(5, field, rng)
    u, v, w, x = (field.random_vector(5, rng) for _ in range(4))
    c = field.random(rng)
    val = evaluate(form, u, v, w)
    assert evaluate(form, v, u, w) == field.norm(-val)
    assert field.is_zero(evaluate(form, u, u, w))
    ux = [field.norm(a + c * b) for a, b in zip(u, x)]
    assert evaluate(form, ux, v, w) == field.norm(val + c * evaluate(form, x, v, w))


def test_vanishing_on_coordinate_subspace():
    w = coordinate_subspace(range(6), 10, QQ)
    assert is_zero_on(Alternating3Form.elementary(0, 6, 7, 10, QQ), w)
    assert not is_zero_on(Alternating3Form.elementary(0, 1, 2, 10, QQ), w)


def test_restrict_then_zero_check(rng):
    w = subspace_from_rows(random_matrix(6, 10, F10007, rng))
    form = random_form_vanishing_on([w], F10007, rng)
    assert restrict(form, w).is_zero()
    assert is_zero_on(form, w)


@pytest.mark.parametrize("models,expected", [
    ([range(6)], 20),
    ([range(3, 9), [6, 7, 8, 0, 1, 2]], 39),
    ([range(3, 9), [6, 7, 8, 0, 1, 2], range(6)], 57),
])
def test_constraint_ranks(models, expected):
    subs = [coordinate_subspace(m, 10, F10007) for m in models]
    assert constraint_rank(subs, 10, F10007) == expected
    assert vanishing_kernel(subs, 10, F10007).nrows == 120 - expected


def test_empty_kernel():
    whole = coordinate_subspace(range(4), 4, QQ)
    with pytest.raises(EmptyKernel):
        random_form_vanishing_on([whole], QQ, make_rng(0), n=4)


def test_frame_components_round_trip(rng):
    q = FrameComponents(*(random_matrix(3, 3, QQ, rng) for _ in range(3)))
    form = form_from_components(q)
    assert frame_components(form) == q
    assert mixed_part(form) == form
    assert evaluate(form, [1] + [0] * 8, [0] * 4 + [1] + [0] * 4, [0] * 8 + [1]) == q.Q1[1, 2]


def test_block_type():
    assert block_type((0, 4, 8)) == (1, 1, 1)
    assert block_type((0, 1, 8)) == (2, 0, 1)
