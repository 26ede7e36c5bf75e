"""Pairs and triangles of points of F(X), the K1⊗K2⊗K3 pairing, triangle completion.

Frame basis convention (used for every 9-dimensional object here): the
ordered basis of V9 = K1 ⊕ K2 ⊕ K3 lists the canonical bases of K1
(e_0..e_2), K2 (f_0..f_2) and K3 (g_0..g_2), so frame indices 0-2, 3-5,
6-8.

Pairing convention.  A chart point of O is the 3×9 matrix (I | N | M);
n_a with a = 3s + j is N[s][j] (coefficient of f_j in row s) and m_b with
b = 3t + k is M[t][k].  The pairing matrix P has P[a][b] equal to the
coefficient of n_a m_b in α'(I | N | M).  Expanding the determinant gives,
in 3×3 blocks indexed by chart rows (s, t),

    P = [[  0,  Q3, -Q2],
         [-Q3,   0,  Q1],
         [ Q2, -Q1,   0]]

with Q_i[j][k] = α'(e_i, f_j, g_k).  The commonly printed block layout
[[0,-Q3,-Q2],[Q3,0,-Q1],[Q2,Q1,0]] equals S P S for
S = diag(1,1,1,-1,-1,-1,1,1,1), i.e. it is the same pairing after
replacing the second chart row by its negative.  Both have the same
determinant.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dvcore import DVInstance, NotOnFX, in_FX
from .errors import DVError
from .exactfield import FieldSpec, Matrix, NoSolution, Singular, determinant, invert, rank, solve_linear
from .grassmann import (
    Subspace,
    choose_complement,
    dim_intersection,
    intersect,
    subspace_from_rows,
    subspace_sum,
)
from .trivector import Alternating3Form, FrameComponents, evaluate, frame_components, restrict_to_basis

PAIRS = list(combinations(range(3), 2))


class WrongStratum(DVError):
    pass


class DegenerateSystem(DVError):
    pass


class VerificationFailed(DVError):
    pass


class SingularQ3(DVError):
    pass


class SingularQ1(DVError):
    pass


class Degenerate(DVError):
    pass


class FrameError(DVError):
    pass


@dataclass(frozen=True)
class TriangleFrame:
    K1: Subspace
    K2: Subspace
    K3: Subspace
    V9: Subspace
    ordered_basis: Matrix  # 9×10: K1 rows, K2 rows, K3 rows
    alpha_prime: Alternating3Form

    @property
    def field(self) -> FieldSpec:
        return self.ordered_basis.field

    def lift(self, coords) -> list:
        """Frame coordinates (length 9) to a vector of the ambient space."""
        return self.ordered_basis.vecmul(coords)


def build_frame(alpha: Alternating3Form, K1: Subspace, K2: Subspace, K3: Subspace) -> TriangleFrame:
    for a, b in ((K1, K2), (K1, K3), (K2, K3)):
        if dim_intersection(a, b) != 0:
            raise FrameError("frame subspaces are not pairwise transversal")
    if not (K1.dim == K2.dim == K3.dim == 3):
        raise FrameError("frame subspaces must be 3-dimensional")
    basis = K1.basis.vstack(K2.basis).vstack(K3.basis)
    if rank(basis) != 9:
        raise FrameError("K1 + K2 + K3 is not 9-dimensional")
    v9 = subspace_from_rows(basis)
    return TriangleFrame(K1, K2, K3, v9, basis, restrict_to_basis(alpha, basis))


def classify_pair(inst: DVInstance, w1: Subspace, w2: Subspace) -> int | None:
    """Dimension of W1 ∩ W2 when it is at least 3 (the stratum index), else None."""
    for w in (w1, w2):
        if not in_FX(inst, w):
            raise NotOnFX("pair member is not a point of F(X)")
    d = dim_intersection(w1, w2)
    return d if d >= 3 else None


def frame_from_pair(inst: DVInstance, w1: Subspace, w2: Subspace,
                    rng: np.random.Generator | None = None, greedy: bool = True) -> TriangleFrame:
    """K3 = W1 ∩ W2, K2 ⊂ W1 a complement of K3, K1 ⊂ W2 a complement of K3 with K1 ∩ K2 = 0.

    K1 ∩ K3 = 0 is imposed as well, since K1 + K2 + K3 must be direct.
    """
    if dim_intersection(w1, w2) != 3:
        raise WrongStratum(f"dim(W1 ∩ W2) = {dim_intersection(w1, w2)}, expected 3")
    k3 = intersect(w1, w2)
    k2 = choose_complement(w1, k3, rng, greedy=greedy)
    k1 = choose_complement(w2, k3, rng, avoid=[k2], greedy=greedy)
    return build_frame(inst.alpha, k1, k2, k3)


def frame_from_triangle(inst: DVInstance, w1: Subspace, w2: Subspace, w3: Subspace) -> TriangleFrame:
    """K1 = W2 ∩ W3, K2 = W3 ∩ W1, K3 = W1 ∩ W2."""
    ks = [intersect(w2, w3), intersect(w3, w1), intersect(w1, w2)]
    if any(k.dim != 3 for k in ks):
        raise WrongStratum("triangle sides do not meet in 3-dimensional spaces")
    return build_frame(inst.alpha, *ks)


# --- pairing ---------------------------------------------------------------

@dataclass(frozen=True)
class PairingMatrix:
    M: Matrix
    blocks: FrameComponents | None = None

    @property
    def field(self) -> FieldSpec:
        return self.M.field

    def value(self, n, m):
        """n^T M m."""
        return self.field.norm(sum(a * b for a, b in zip(n, self.M.apply(m))) + self.field.zero)


def _assemble(blocks, field) -> Matrix:
    z = Matrix.zeros(3, 3, field)
    grid = [[blocks.get((s, t), z) for t in range(3)] for s in range(3)]
    rows = []
    for s in range(3):
        for j in range(3):
            rows.append([grid[s][t][j, k] for t in range(3) for k in range(3)])
    return Matrix._raw(rows, field, 9)


def pairing_matrix_from_blocks(q: FrameComponents) -> PairingMatrix:
    Q1, Q2, Q3 = q.blocks
    blocks = {(0, 1): Q3, (1, 0): -Q3, (0, 2): -Q2, (2, 0): Q2, (1, 2): Q1, (2, 1): -Q1}
    return PairingMatrix(_assemble(blocks, q.field), q)


def published_block_matrix(q: FrameComponents) -> Matrix:
    """The block matrix in its commonly printed sign layout."""
    Q1, Q2, Q3 = q.blocks
    blocks = {(0, 1): -Q3, (1, 0): Q3, (0, 2): -Q2, (2, 0): Q2, (1, 2): -Q1, (2, 1): Q1}
    return _assemble(blocks, q.field)


SECOND_ROW_FLIP = (1, 1, 1, -1, -1, -1, 1, 1, 1)


def flip_second_chart_row(m: Matrix) -> Matrix:
    """S m S with S = diag(SECOND_ROW_FLIP)."""
    f = m.field
    s = SECOND_ROW_FLIP
    return Matrix._raw([[f.norm(s[i] * s[j] * m[i, j]) for j in range(9)] for i in range(9)], f, 9)


def chart_matrix(n, m, field: FieldSpec) -> Matrix:
    """The 3×9 matrix (I | N | M) from flattened 9-vectors n, m."""
    rows = []
    for s in range(3):
        rows.append([field.one if c == s else field.zero for c in range(3)]
                    + [field(x) for x in n[3 * s:3 * s + 3]]
                    + [field(x) for x in m[3 * s:3 * s + 3]])
    return Matrix._raw(rows, field, 9)


def chart_value(alpha9: Alternating3Form, n, m):
    return evaluate(alpha9, *chart_matrix(n, m, alpha9.field).rows)


def pairing_from_form(frame: TriangleFrame | Alternating3Form, scale=(1, 1)) -> PairingMatrix:
    """Coefficient of n_a m_b in α'(I | N | M), by inclusion-exclusion of direct evaluations.

    α' is affine-linear in each chart entry separately, so with only n_a = c and
    m_b = d nonzero the value is P00 + c x + d y + c d P[a][b].
    """
    alpha9 = frame.alpha_prime if isinstance(frame, TriangleFrame) else frame
    f = alpha9.field
    c, d = f(scale[0]), f(scale[1])
    zero = [f.zero] * 9

    def unit(i, v):
        e = list(zero)
        e[i] = v
        return e

    p00 = chart_value(alpha9, zero, zero)
    pn = [chart_value(alpha9, unit(a, c), zero) for a in range(9)]
    pm = [chart_value(alpha9, zero, unit(b, d)) for b in range(9)]
    inv_cd = f.inv(f.norm(c * d))
    rows = []
    for a in range(9):
        row = []
        for b in range(9):
            v = chart_value(alpha9, unit(a, c), unit(b, d))
            row.append(f.norm((v - pn[a] - pm[b] + p00) * inv_cd))
        rows.append(row)
    return PairingMatrix(Matrix._raw(rows, f, 9), frame_components(alpha9))


def is_nondegenerate(pm: PairingMatrix) -> bool:
    return not pm.field.is_zero(determinant(pm.M))


def reduction_matrix(q: FrameComponents) -> Matrix:
    """Q1 Q3^-1 Q2 - Q2 Q3^-1 Q1 (the Schur complement after pivoting on Q3)."""
    Q1, Q2, Q3 = q.blocks
    try:
        q3i = invert(Q3)
    except Singular:
        raise SingularQ3("Q3 is singular") from None
    return Q1 @ q3i @ Q2 - Q2 @ q3i @ Q1


def reduction_criterion(q: FrameComponents) -> bool:
    return not q.field.is_zero(determinant(reduction_matrix(q)))


def reduction_criterion_q1(q: FrameComponents) -> bool:
    """det(Q3 Q1^-1 Q2 - Q2 Q1^-1 Q3) != 0: the same test pivoting on Q1 instead."""
    Q1, Q2, Q3 = q.blocks
    try:
        q1i = invert(Q1)
    except Singular:
        raise SingularQ1("Q1 is singular") from None
    return not q.field.is_zero(determinant(Q3 @ q1i @ Q2 - Q2 @ q1i @ Q3))


def hyperbolic_dual_basis(pm: PairingMatrix, v: Matrix) -> Matrix:
    """Rows v*_b with v_a^T P v*_b = δ_ab, i.e. V P V*^T = I."""
    if v.shape != (9, 9) or rank(v) != 9:
        raise ValueError("need nine independent n-side vectors")
    try:
        return invert(v @ pm.M).T()
    except Singular:
        raise Degenerate("pairing is degenerate") from None


# --- triangle completion -----------------------------------------------------

def phi_system(alpha9: Alternating3Form) -> tuple[Matrix, list]:
    """Linear system for φ: K1 -> K3 (unknown 3i + j = coefficient of g_j in φ(e_i)).

    Row (pair a<b, c):  α'(e_a, φ e_b, f_c) + α'(φ e_a, e_b, f_c) = -α'(e_a, e_b, f_c).
    """
    f = alpha9.field
    A, rhs = [], []
    for a, b in PAIRS:
        for c in range(3):
            row = [f.zero] * 9
            for j in range(3):
                row[3 * b + j] = f.norm(row[3 * b + j] + alpha9.coeff(a, 6 + j, 3 + c))
                row[3 * a + j] = f.norm(row[3 * a + j] + alpha9.coeff(6 + j, b, 3 + c))
            A.append(row)
            rhs.append(f.norm(-alpha9.coeff(a, b, 3 + c)))
    return Matrix._raw(A, f, 9), rhs


def psi_system(alpha9: Alternating3Form) -> tuple[Matrix, list]:
    """Linear system for ψ: K2 -> K3 (unknown 3i + j = coefficient of g_j in ψ(f_i)).

    Row (pair b<c, a):  α'(e_a, ψ f_b, f_c) + α'(e_a, f_b, ψ f_c) = -α'(e_a, f_b, f_c).
    """
    f = alpha9.field
    A, rhs = [], []
    for b, c in PAIRS:
        for a in range(3):
            row = [f.zero] * 9
            for j in range(3):
                row[3 * b + j] = f.norm(row[3 * b + j] + alpha9.coeff(a, 6 + j, 3 + c))
                row[3 * c + j] = f.norm(row[3 * c + j] + alpha9.coeff(a, 3 + b, 6 + j))
            A.append(row)
            rhs.append(f.norm(-alpha9.coeff(a, 3 + b, 3 + c)))
    return Matrix._raw(A, f, 9), rhs


@dataclass(frozen=True)
class TriangleCompletion:
    w3: Subspace
    frame: TriangleFrame
    phi: list
    psi: list
    phi_det: object
    psi_det: object
    checks: dict


def _solve_unique(a: Matrix, rhs: list, name: str):
    det = determinant(a)
    try:
        sol = solve_linear(a, rhs)
    except NoSolution:
        raise DegenerateSystem(f"{name} system is inconsistent") from None
    if not sol.unique:
        raise DegenerateSystem(f"{name} system has rank {sol.rank} < 9")
    return sol.x, det


def triangle_checks(inst: DVInstance, w1: Subspace, w2: Subspace, w3: Subspace) -> dict:
    return {
        "w3_in_FX": in_FX(inst, w3),
        "dim_w3_w1_is_3": dim_intersection(w3, w1) == 3,
        "dim_w3_w2_is_3": dim_intersection(w3, w2) == 3,
        "triple_intersection_zero": intersect(intersect(w1, w2), w3).dim == 0,
    }


def solve_triangle(inst: DVInstance, w1: Subspace, w2: Subspace,
                   rng: np.random.Generator | None = None, greedy: bool = True) -> TriangleCompletion:
    """Find the unique W3 completing (W1, W2) to a triangle, with all postconditions checked."""
    stratum = classify_pair(inst, w1, w2)
    if stratum != 3:
        raise WrongStratum(f"pair lies in stratum {stratum}, expected 3")
    frame = frame_from_pair(inst, w1, w2, rng, greedy=greedy)
    a9 = frame.alpha_prime
    phi, phi_det = _solve_unique(*phi_system(a9), "phi")
    psi, psi_det = _solve_unique(*psi_system(a9), "psi")
    f = a9.field
    rows = []
    for i in range(3):
        v = [f.zero] * 9
        v[i] = f.one
        for j in range(3):
            v[6 + j] = phi[3 * i + j]
        rows.append(frame.lift(v))
    for i in range(3):
        v = [f.zero] * 9
        v[3 + i] = f.one
        for j in range(3):
            v[6 + j] = psi[3 * i + j]
        rows.append(frame.lift(v))
    w3 = subspace_from_rows(Matrix._raw(rows, f, w1.ambient_dim))
    if w3.dim != 6:
        raise VerificationFailed("completed space is not 6-dimensional")
    checks = triangle_checks(inst, w1, w2, w3)
    if not all(checks.values()):
        failed = [k for k, v in checks.items() if not v]
        raise VerificationFailed(f"triangle postconditions failed: {failed}")
    return TriangleCompletion(w3, frame, phi, psi, phi_det, psi_det, checks)


def complete_triangle(inst: DVInstance, w1: Subspace, w2: Subspace,
                      rng: np.random.Generator | None = None) -> Subspace:
    return solve_triangle(inst, w1, w2, rng).w3


def in_triangle_variety(inst: DVInstance, w1: Subspace, w2: Subspace, w3: Subspace) -> bool:
    for w in (w1, w2, w3):
        if not in_FX(inst, w):
            raise NotOnFX("triangle vertex is not a point of F(X)")
    pairwise = all(dim_intersection(a, b) >= 3 for a, b in ((w1, w2), (w2, w3), (w1, w3)))
    return pairwise and intersect(intersect(w1, w2), w3).dim == 0


def direct_sum_ok(frame: TriangleFrame) -> bool:
    s = subspace_sum(subspace_sum(frame.K1, frame.K2), frame.K3)
    return s.dim == 9 and s == frame.V9
