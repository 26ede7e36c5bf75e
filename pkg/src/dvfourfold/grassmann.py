"""Subspaces in canonical form, Grassmannian charts, Plücker vectors, pencil limits.

Columns are 0-based throughout.  A subspace is stored by the RREF of any
spanning set, so two subspaces are equal exactly when their stored bases
are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DVError
from .exactfield import FieldSpec, Matrix, Singular, determinant, invert, kernel_basis, rank, rref

COMPLEMENT_RETRIES = 32


class AmbientMismatch(DVError):
    pass


class Exhausted(DVError):
    pass


class RankDeficient(DVError):
    pass


class NotInChart(DVError):
    pass


class NotDecomposable(DVError):
    pass


@dataclass(frozen=True)
class Subspace:
    basis: Matrix
    pivots: tuple

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    @property
    def ambient_dim(self) -> int:
        return self.basis.ncols

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def rows(self) -> tuple:
        return self.basis.rows

    def __repr__(self):
        return f"Subspace(dim={self.dim}, n={self.ambient_dim}, rows={self.basis.to_strings()})"


def subspace_from_rows(rows: Matrix) -> Subspace:
    r, piv = rref(rows)
    return Subspace(Matrix(r.rows[:len(piv)], r.field, r.ncols), tuple(piv))


def span(vectors: Iterable[Sequence], field: FieldSpec, n: int) -> Subspace:
    return subspace_from_rows(Matrix.from_rows(list(vectors), field, n))


def coordinate_subspace(indices: Iterable[int], n: int, field: FieldSpec) -> Subspace:
    rows = [[1 if j == i else 0 for j in range(n)] for i in sorted(indices)]
    return span(rows, field, n)


def _same_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim or a.field != b.field:
        raise AmbientMismatch(f"ambient {a.ambient_dim}/{a.field!r} vs {b.ambient_dim}/{b.field!r}")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _same_ambient(a, b)
    return subspace_from_rows(a.basis.vstack(b.basis))


def dim_intersection(a: Subspace, b: Subspace) -> int:
    _same_ambient(a, b)
    return a.dim + b.dim - rank(a.basis.vstack(b.basis))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Kernel of [A^T | -B^T] gives pairs (x, y) with x A = y B; keep x A."""
    _same_ambient(a, b)
    f = a.field
    stacked = a.basis.T().hstack((-b.basis).T())
    ker = kernel_basis(stacked)
    if ker.nrows == 0:
        return Subspace(Matrix.zeros(0, a.ambient_dim, f), ())
    xs = Matrix._raw([r[:a.dim] for r in ker.rows], f, a.dim)
    return subspace_from_rows(xs @ a.basis)


def contains(a: Subspace, v: Sequence) -> bool:
    f = a.field
    if len(v) != a.ambient_dim:
        raise AmbientMismatch("vector length does not match ambient dimension")
    return rank(a.basis.vstack(Matrix.from_rows([v], f, a.ambient_dim))) == a.dim


def is_subspace(small: Subspace, big: Subspace) -> bool:
    _same_ambient(small, big)
    return dim_intersection(small, big) == small.dim


def choose_complement(inside: Subspace, of: Subspace, rng: np.random.Generator | None = None,
                      avoid: Sequence[Subspace] = (), greedy: bool = True) -> Subspace:
    """A complement C of ``of`` inside ``inside`` with C ∩ A = 0 for every A in ``avoid``.

    First try greedy selection of canonical basis rows of ``inside``; on an
    avoid-list failure (or with ``greedy=False``) draw random complements,
    up to 32 attempts.
    """
    _same_ambient(inside, of)
    if dim_intersection(of, inside) != of.dim:
        raise ValueError("`of` is not contained in `inside`")
    need = inside.dim - of.dim
    f = inside.field

    def ok(c: Subspace) -> bool:
        return (c.dim == need and dim_intersection(c, of) == 0
                and all(dim_intersection(c, a) == 0 for a in avoid))

    chosen = []
    current = of.basis
    cur_rank = of.dim
    for row in inside.rows:
        if len(chosen) == need:
            break
        trial = current.vstack(Matrix._raw([row], f, inside.ambient_dim))
        r = rank(trial)
        if r > cur_rank:
            chosen.append(row)
            current, cur_rank = trial, r
    first = span(chosen, f, inside.ambient_dim) if chosen else Subspace(
        Matrix.zeros(0, inside.ambient_dim, f), ())
    if greedy and ok(first):
        return first
    if rng is None:
        raise Exhausted("greedy complement violates the avoid-list and no rng was given")
    for _ in range(COMPLEMENT_RETRIES):
        coeffs = Matrix._raw([f.random_vector(inside.dim, rng) for _ in range(need)], f, inside.dim)
        c = subspace_from_rows(coeffs @ inside.basis)
        if ok(c):
            return c
    raise Exhausted(f"no admissible complement after {COMPLEMENT_RETRIES} random attempts")


# --- Plücker coordinates -------------------------------------------------

def plucker_vector(m: Matrix) -> list:
    """All k×k minors of a k×n matrix, column sets in lexicographic order."""
    k, n = m.shape
    out = [determinant(m.submatrix(range(k), cols)) for cols in combinations(range(n), k)]
    if all(m.field.is_zero(x) for x in out):
        raise RankDeficient("matrix rows are dependent")
    return out


def _perm_sign(seq: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def subspace_from_plucker(p: Sequence, k: int, n: int, field: FieldSpec) -> Subspace:
    """Rebuild the subspace of a decomposable Plücker vector.

    Pick the first column set S with p_S != 0.  The representative X with
    X_S = I has X[r][j] = sign(T) p(sorted T) / p_S, where T is S with its
    r-th entry replaced by j and sign(T) is the sign of the sort of T.
    """
    sets = list(combinations(range(n), k))
    index = {s: i for i, s in enumerate(sets)}
    lead = next((i for i, x in enumerate(p) if not field.is_zero(x)), None)
    if lead is None:
        raise RankDeficient("zero Plücker vector")
    S = sets[lead]
    inv_ps = field.inv(p[lead])
    rows = []
    for r in range(k):
        row = []
        for j in range(n):
            if j in S:
                row.append(field.one if j == S[r] else field.zero)
                continue
            T = list(S)
            T[r] = j
            val = p[index[tuple(sorted(T))]]
            row.append(field.norm(_perm_sign(T) * val * inv_ps))
        rows.append(row)
    x = Matrix._raw(rows, field, n)
    check = plucker_vector(x)
    scale = p[lead]
    if any(not field.is_zero(field.norm(a * scale - b)) for a, b in zip(check, p)):
        raise NotDecomposable("Plücker vector does not satisfy the Plücker relations")
    return subspace_from_rows(x)


# --- charts --------------------------------------------------------------

@dataclass(frozen=True)
class ChartPoint:
    ambient_dim: int
    k: int
    pivots: tuple
    coords: Matrix  # k × (n - k), non-pivot columns in increasing order

    @property
    def free_columns(self) -> list[int]:
        return [j for j in range(self.ambient_dim) if j not in self.pivots]

    def matrix(self) -> Matrix:
        f = self.coords.field
        rows = [[f.zero] * self.ambient_dim for _ in range(self.k)]
        for r, pc in enumerate(self.pivots):
            rows[r][pc] = f.one
        for c, j in enumerate(self.free_columns):
            for r in range(self.k):
                rows[r][j] = self.coords[r, c]
        return Matrix._raw(rows, f, self.ambient_dim)

    def to_subspace(self) -> Subspace:
        return subspace_from_rows(self.matrix())

    def coord(self, r: int, col: int):
        """Coordinate in row r at ambient column ``col`` (must be a free column)."""
        return self.coords[r, self.free_columns.index(col)]


def chart_coordinates(s: Subspace | Matrix, pivots: Sequence[int]) -> ChartPoint:
    m = s.basis if isinstance(s, Subspace) else s
    k, n = m.shape
    pivots = tuple(pivots)
    if len(pivots) != k or list(pivots) != sorted(set(pivots)):
        raise ValueError("pivots must be k strictly increasing columns")
    try:
        inv = invert(m.submatrix(range(k), pivots))
    except Singular:
        raise NotInChart(f"columns {pivots} are dependent on this point") from None
    x = inv @ m
    free = [j for j in range(n) if j not in pivots]
    return ChartPoint(n, k, pivots, x.submatrix(range(k), free))


# --- pencils -------------------------------------------------------------

@dataclass(frozen=True)
class PencilLine:
    """The line t -> t * direction + base in k×n matrices."""

    base: Matrix
    direction: Matrix

    def at(self, t) -> Matrix:
        return self.direction.scale(t) + self.base


def interpolate_coefficients(values_at: Sequence[Sequence], ts: Sequence, field: FieldSpec) -> list[list]:
    """Coefficients c_d (d = 0..len(ts)-1) with sum_d c_d t^d = values_at[i] at t = ts[i]."""
    vander = Matrix.from_rows([[field.norm(field(t) ** d) for d in range(len(ts))] for t in ts], field)
    vinv = invert(vander)
    cols = list(zip(*values_at))
    # coefficient vector for each coordinate is vinv @ values
    per_coord = [vinv.apply(c) for c in cols]
    return [list(c) for c in zip(*per_coord)]


def polynomial_plucker(line: PencilLine) -> list[list]:
    """Coefficients (lowest degree first) of the Plücker vector of t·D + B, degree ≤ k."""
    f = line.base.field
    k = line.base.nrows
    if f.is_prime_field and f.modulus <= k:
        raise ValueError("field too small to interpolate")
    ts = list(range(k + 1))
    vals = []
    for t in ts:
        m = line.at(f(t))
        vals.append([determinant(m.submatrix(range(k), cols))
                     for cols in combinations(range(m.ncols), k)])
    return interpolate_coefficients(vals, ts, f)


def leading_plucker(line: PencilLine) -> tuple[int, list]:
    coeffs = polynomial_plucker(line)
    f = line.base.field
    for d in range(len(coeffs) - 1, -1, -1):
        if any(not f.is_zero(x) for x in coeffs[d]):
            return d, coeffs[d]
    raise RankDeficient("pencil is identically rank deficient")


def limit_point(line: PencilLine) -> Subspace:
    """Limit as t -> ∞ of the row space of t·direction + base."""
    if line.direction.is_zero():
        return subspace_from_rows(line.base)
    _, lead = leading_plucker(line)
    k, n = line.base.shape
    return subspace_from_plucker(lead, k, n, line.base.field)
