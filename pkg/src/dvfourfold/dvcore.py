"""Membership in X ⊂ Gr(3,10) and F(X) ⊂ Gr(6,10), tangent spaces of F(X), Z_W incidence."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from .errors import DVError
from .exactfield import FieldSpec, Matrix, kernel_basis
from .grassmann import Subspace, is_subspace, subspace_from_rows
from .trivector import Alternating3Form, evaluate, is_zero_on

AMBIENT = 10


class WrongDimension(DVError):
    pass


class NotOnFX(DVError):
    pass


@dataclass(frozen=True)
class DVInstance:
    alpha: Alternating3Form
    provenance: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.alpha.ambient_dim != AMBIENT:
            raise WrongDimension("a Debarre-Voisin instance needs a 3-form on a 10-dimensional space")

    @property
    def field(self) -> FieldSpec:
        return self.alpha.field


def _need_dim(s: Subspace, d: int):
    if s.dim != d or s.ambient_dim != AMBIENT:
        raise WrongDimension(f"expected a {d}-dimensional subspace of F^{AMBIENT}, got {s.dim} in F^{s.ambient_dim}")


def in_X(inst: DVInstance, v3: Subspace) -> bool:
    _need_dim(v3, 3)
    return inst.field.is_zero(evaluate(inst.alpha, *v3.rows))


def in_FX(inst: DVInstance, w6: Subspace) -> bool:
    _need_dim(w6, 6)
    return is_zero_on(inst.alpha, w6)


def canonical_complement(w: Subspace) -> Matrix:
    """Unit vectors on the non-pivot columns of W's RREF basis."""
    f = w.field
    free = [j for j in range(w.ambient_dim) if j not in w.pivots]
    return Matrix._raw([[f.one if j == c else f.zero for j in range(w.ambient_dim)] for c in free],
                       f, w.ambient_dim)


def tangent_system(alpha: Alternating3Form, w6: Subspace, complement: Matrix | None = None) -> Matrix:
    """20×24 matrix of the linearised vanishing conditions.

    Unknown phi[a][r] (flattened a*4 + r) is the coefficient of complement
    vector c_r in phi(b_a); row (a<b<c) is
    α(φ b_a, b_b, b_c) + α(b_a, φ b_b, b_c) + α(b_a, b_b, φ b_c).
    """
    comp = canonical_complement(w6) if complement is None else complement
    b = w6.rows
    c = comp.rows
    k, m = len(b), len(c)
    rows = []
    for a1, a2, a3 in combinations(range(k), 3):
        row = [alpha.field.zero] * (k * m)
        for r in range(m):
            row[a1 * m + r] = alpha.field.norm(row[a1 * m + r] + evaluate(alpha, c[r], b[a2], b[a3]))
            row[a2 * m + r] = alpha.field.norm(row[a2 * m + r] + evaluate(alpha, b[a1], c[r], b[a3]))
            row[a3 * m + r] = alpha.field.norm(row[a3 * m + r] + evaluate(alpha, b[a1], b[a2], c[r]))
        rows.append(row)
    return Matrix._raw(rows, alpha.field, k * m)


def fx_tangent_space(inst: DVInstance, w6: Subspace, complement: Matrix | None = None) -> Matrix:
    """Rows span the tangent directions to F(X) at W inside Hom(W, V/W)."""
    if not in_FX(inst, w6):
        raise NotOnFX("W is not a point of F(X)")
    return kernel_basis(tangent_system(inst.alpha, w6, complement))


def zw_contains(inst: DVInstance, v3: Subspace, w6: Subspace) -> bool:
    _need_dim(v3, 3)
    _need_dim(w6, 6)
    return is_subspace(v3, w6)


def sample_zw_point(inst: DVInstance, w6: Subspace, rng: np.random.Generator) -> Subspace:
    _need_dim(w6, 6)
    f = w6.field
    while True:
        coeffs = Matrix._raw([f.random_vector(6, rng) for _ in range(3)], f, 6)
        v3 = subspace_from_rows(coeffs @ w6.basis)
        if v3.dim == 3:
            return v3
