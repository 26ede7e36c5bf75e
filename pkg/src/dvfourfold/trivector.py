"""Alternating 3-forms on F^n.

A form is stored by its coefficients on strictly increasing index triples
(i < j < k), ordered lexicographically when flattened to a vector.  The
value on three vectors is the sum over stored triples of the coefficient
times the 3×3 minor of (u, v, w) on those columns.

Restricted coefficients depend on the basis used for the subspace (here
always the canonical RREF basis); vanishing and ranks do not.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DVError
from .exactfield import FieldSpec, Matrix, kernel_basis, rank
from .grassmann import Subspace


class DimensionMismatch(DVError):
    pass


class TooSmall(DVError):
    pass


class EmptyKernel(DVError):
    pass


def triples(n: int) -> list[tuple[int, int, int]]:
    return list(combinations(range(n), 3))


def _sort_sign(i, j, k):
    sign = 1
    if i > j:
        i, j, sign = j, i, -sign
    if j > k:
        j, k, sign = k, j, -sign
    if i > j:
        i, j, sign = j, i, -sign
    return (i, j, k), sign


@dataclass(frozen=True)
class Alternating3Form:
    ambient_dim: int
    field: FieldSpec
    coeffs: dict = dc_field(default_factory=dict)  # only nonzero entries

    def __post_init__(self):
        if not 3 <= self.ambient_dim <= 10:
            raise DimensionMismatch(f"ambient dimension {self.ambient_dim} outside 3..10")
        clean = {}
        for key, val in self.coeffs.items():
            i, j, k = key
            if not (0 <= i < j < k < self.ambient_dim):
                raise ValueError(f"coefficient key {key} is not strictly increasing in range")
            val = self.field(val)
            if not self.field.is_zero(val):
                clean[(i, j, k)] = val
        object.__setattr__(self, "coeffs", clean)

    def coeff(self, i: int, j: int, k: int):
        """Coefficient on (i, j, k) in any order, with the permutation sign."""
        if len({i, j, k}) < 3:
            return self.field.zero
        key, sign = _sort_sign(i, j, k)
        return self.field.norm(sign * self.coeffs.get(key, self.field.zero))

    def vector(self) -> list:
        z = self.field.zero
        return [self.coeffs.get(t, z) for t in triples(self.ambient_dim)]

    @classmethod
    def from_vector(cls, vec: Sequence, n: int, field: FieldSpec) -> "Alternating3Form":
        ts = triples(n)
        if len(vec) != len(ts):
            raise DimensionMismatch(f"expected {len(ts)} coefficients, got {len(vec)}")
        return cls(n, field, {t: v for t, v in zip(ts, vec)})

    @classmethod
    def elementary(cls, i: int, j: int, k: int, n: int, field: FieldSpec) -> "Alternating3Form":
        key, sign = _sort_sign(i, j, k)
        return cls(n, field, {key: sign})

    def __add__(self, other: "Alternating3Form") -> "Alternating3Form":
        if other.ambient_dim != self.ambient_dim or other.field != self.field:
            raise DimensionMismatch("forms live on different spaces")
        out = dict(self.coeffs)
        for key, v in other.coeffs.items():
            out[key] = self.field.norm(out.get(key, 0) + v)
        return Alternating3Form(self.ambient_dim, self.field, out)

    def scale(self, c) -> "Alternating3Form":
        return Alternating3Form(self.ambient_dim, self.field,
                                {k: self.field.norm(c * v) for k, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs


def evaluate(form: Alternating3Form, u: Sequence, v: Sequence, w: Sequence):
    n = form.ambient_dim
    if not (len(u) == len(v) == len(w) == n):
        raise DimensionMismatch(f"vectors must have length {n}")
    total = 0
    for (i, j, k), a in form.coeffs.items():
        vj, vk, wj, wk = v[j], v[k], w[j], w[k]
        total += a * (u[i] * (vj * wk - vk * wj)
                      - u[j] * (v[i] * wk - vk * w[i])
                      + u[k] * (v[i] * wj - vj * w[i]))
    return form.field.norm(form.field.zero + total)


def evaluate_rows(form: Alternating3Form, m: Matrix):
    """Value on the three rows of a 3×n matrix."""
    if m.nrows != 3:
        raise DimensionMismatch("need exactly three rows")
    return evaluate(form, *m.rows)


def restrict_to_basis(form: Alternating3Form, basis: Matrix) -> Alternating3Form:
    """Pull the form back along the inclusion whose image rows are ``basis``."""
    d = basis.nrows
    if d < 3:
        raise TooSmall(f"cannot restrict a 3-form to dimension {d}")
    if basis.ncols != form.ambient_dim:
        raise DimensionMismatch("basis rows do not live in the form's space")
    r = basis.rows
    return Alternating3Form(d, form.field, {(a, b, c): evaluate(form, r[a], r[b], r[c])
                                            for a, b, c in triples(d)})


def restrict(form: Alternating3Form, s: Subspace) -> Alternating3Form:
    return restrict_to_basis(form, s.basis)


def is_zero_on(form: Alternating3Form, s: Subspace) -> bool:
    # exhaustive over all basis triples
    if s.dim < 3:
        raise TooSmall(f"subspace of dimension {s.dim}")
    r = s.rows
    return all(form.field.is_zero(evaluate(form, r[a], r[b], r[c])) for a, b, c in triples(s.dim))


def _minors3(u, v, w, n, field):
    norm = field.norm
    return [norm(u[i] * (v[j] * w[k] - v[k] * w[j])
                 - u[j] * (v[i] * w[k] - v[k] * w[i])
                 + u[k] * (v[i] * w[j] - v[j] * w[i]) + field.zero)
            for i, j, k in triples(n)]


def vanishing_constraint_matrix(subspaces: Sequence[Subspace], n: int, field: FieldSpec) -> Matrix:
    """Rows: (subspace, basis triple); columns: coefficient triples of a form on F^n."""
    rows = []
    for s in subspaces:
        if s.dim < 3:
            raise TooSmall(f"subspace of dimension {s.dim}")
        if s.ambient_dim != n:
            raise DimensionMismatch("subspace ambient dimension differs from n")
        b = s.rows
        for a, bb, c in triples(s.dim):
            rows.append(_minors3(b[a], b[bb], b[c], n, field))
    return Matrix._raw(rows, field, len(triples(n)))


def vanishing_kernel(subspaces: Sequence[Subspace], n: int, field: FieldSpec) -> Matrix:
    if not subspaces:
        return Matrix.identity(len(triples(n)), field)
    return kernel_basis(vanishing_constraint_matrix(subspaces, n, field))


def random_form_vanishing_on(subspaces: Sequence[Subspace], field: FieldSpec, rng: np.random.Generator,
                             n: int = 10, kernel: Matrix | None = None) -> Alternating3Form:
    """Uniform random element of the space of forms vanishing on every listed subspace."""
    ker = vanishing_kernel(subspaces, n, field) if kernel is None else kernel
    if ker.nrows == 0:
        raise EmptyKernel("no nonzero form vanishes on all listed subspaces")
    c = field.random_vector(ker.nrows, rng)
    return Alternating3Form.from_vector(ker.vecmul(c), n, field)


def constraint_rank(subspaces: Sequence[Subspace], n: int, field: FieldSpec) -> int:
    return rank(vanishing_constraint_matrix(subspaces, n, field))


# --- frame components ----------------------------------------------------

@dataclass(frozen=True)
class FrameComponents:
    """Q_i[j][k] = α'(e_i, f_j, g_k) for frame bases e (K1), f (K2), g (K3)."""

    Q1: Matrix
    Q2: Matrix
    Q3: Matrix

    @property
    def blocks(self) -> tuple[Matrix, Matrix, Matrix]:
        return self.Q1, self.Q2, self.Q3

    @property
    def field(self) -> FieldSpec:
        return self.Q1.field


def frame_components(form9: Alternating3Form) -> FrameComponents:
    """Read off the K1⊗K2⊗K3 blocks of a form written in the ordered frame basis.

    Frame basis order: K1 = indices 0-2, K2 = 3-5, K3 = 6-8.
    """
    if form9.ambient_dim != 9:
        raise DimensionMismatch("frame components need a form on the 9-dimensional frame space")
    f = form9.field
    qs = [Matrix._raw([[form9.coeff(i, 3 + j, 6 + k) for k in range(3)] for j in range(3)], f, 3)
          for i in range(3)]
    return FrameComponents(*qs)


def form_from_components(q: FrameComponents) -> Alternating3Form:
    """The purely mixed form sum_i e_i* ∧ Q_i on the 9-dimensional frame space."""
    coeffs = {}
    for i, qi in enumerate(q.blocks):
        for j in range(3):
            for k in range(3):
                coeffs[(i, 3 + j, 6 + k)] = qi[j, k]
    return Alternating3Form(9, q.field, coeffs)


FRAME_BLOCKS = (range(0, 3), range(3, 6), range(6, 9))


def block_type(triple: Sequence[int]) -> tuple[int, int, int]:
    """How many indices of a triple fall in K1, K2, K3."""
    return tuple(sum(1 for t in triple if t in blk) for blk in FRAME_BLOCKS)


def mixed_part(form9: Alternating3Form) -> Alternating3Form:
    return Alternating3Form(9, form9.field,
                            {t: v for t, v in form9.coeffs.items() if block_type(t) == (1, 1, 1)})
