"""Chart-level cycle computations on Gr(3, V9) for a triangle frame.

Points of the chart O are 3×9 matrices (I | N | M), flattened to an
18-vector (n, m) with n_a = N[a // 3][a % 3], m_b = M[b // 3][b % 3].
On a triangle frame α' has only K1⊗K2⊗K3 support, so α'(I | N | M) is the
bilinear form n^T P m of the pairing matrix P.

Boundary charts O' are named by their pivot columns (0-based).  The chart
used for D1 has pivots (0, 1, 3); its coordinates are stored as a 3×6
matrix over the free columns (2, 4, 5, 6, 7, 8).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DVError
from .exactfield import FieldSpec, Matrix, kernel_basis, random_invertible, rank
from .grassmann import ChartPoint, NotInChart, PencilLine, chart_coordinates, contains, limit_point, span
from .triangle import (
    PairingMatrix,
    TriangleFrame,
    chart_value,
    hyperbolic_dual_basis,
    is_nondegenerate,
    pairing_from_form,
)
from .trivector import Alternating3Form, block_type, evaluate, frame_components

D1_PIVOTS = (0, 1, 3)
# two K1 columns and one non-K1 column; the standard chart first
D1_PIVOT_FALLBACKS = (D1_PIVOTS,) + tuple(
    tuple(sorted(p + (c,))) for p in combinations(range(3), 2) for c in range(3, 9)
    if tuple(sorted(p + (c,))) != D1_PIVOTS)
# (row, ambient column) of O' coordinates fixed by the pencil direction alone
D1_DIRECTION_COORDS = ((0, 2), (1, 2), (2, 2), (2, 4), (2, 5), (2, 6), (2, 7), (2, 8))
D1_FIBER_COORDS = tuple((r, c) for r in (0, 1) for c in (4, 5, 6, 7, 8))


class NotPure(DVError):
    pass


class RankMismatch(DVError):
    pass


class ChartMiss(DVError):
    pass


class NotFound(DVError):
    pass


@dataclass(frozen=True)
class QuadricChart:
    frame: TriangleFrame
    pairing: PairingMatrix

    @property
    def alpha(self) -> Alternating3Form:
        return self.frame.alpha_prime

    @property
    def field(self) -> FieldSpec:
        return self.frame.field


def is_pure(alpha9: Alternating3Form) -> bool:
    return all(block_type(t) == (1, 1, 1) for t in alpha9.coeffs)


def quadric_chart(frame: TriangleFrame) -> QuadricChart:
    if not is_pure(frame.alpha_prime):
        raise NotPure("α' has support outside K1⊗K2⊗K3; the frame is not a triangle frame")
    return QuadricChart(frame, pairing_from_form(frame))


def quadric_value(chart: QuadricChart, n: Sequence, m: Sequence):
    return chart_value(chart.alpha, n, m)


def split_nm(x: Sequence) -> tuple[list, list]:
    return list(x[:9]), list(x[9:])


# --- cycle chain -----------------------------------------------------------

@dataclass(frozen=True)
class CycleChain:
    v: Matrix       # 9 n-side rows
    v_star: Matrix  # 9 m-side rows, hyperbolic duals
    A: tuple        # A[i] = <v_i..v_8, v*_0..v*_{i-1}>, i = 0..9 (Subspaces of F^18)
    B: tuple        # B[i] = <v_i..v_8, v*_0..v*_i>,     i = 0..8

    def n_vec(self, i: int) -> list:
        return list(self.v.row(i)) + [self.v.field.zero] * 9

    def m_vec(self, i: int) -> list:
        return [self.v.field.zero] * 9 + list(self.v_star.row(i))

    def a_generators(self, i: int) -> list:
        return [self.n_vec(j) for j in range(i, 9)] + [self.m_vec(j) for j in range(i)]

    def b_generators(self, i: int) -> list:
        return [self.n_vec(j) for j in range(i, 9)] + [self.m_vec(j) for j in range(i + 1)]


def assemble_chain(v: Matrix, v_star: Matrix) -> CycleChain:
    f = v.field
    partial = CycleChain(v, v_star, (), ())
    A = tuple(span(partial.a_generators(i), f, 18) for i in range(10))
    B = tuple(span(partial.b_generators(i), f, 18) for i in range(9))
    return CycleChain(v, v_star, A, B)


def build_chain(chart: QuadricChart, v: Matrix | None = None,
                rng: np.random.Generator | None = None) -> CycleChain:
    if v is None:
        if rng is None:
            raise ValueError("either v or rng is required")
        v = random_invertible(9, chart.field, rng)
    return assemble_chain(v, hyperbolic_dual_basis(chart.pairing, v))


def _combine(gens: list, coeffs: list, field: FieldSpec) -> list:
    out = [0] * 18
    for c, g in zip(coeffs, gens):
        if c:
            for j, x in enumerate(g):
                out[j] += c * x
    return [field.norm(field.zero + x) for x in out]


@dataclass
class ChainReport:
    samples: int
    a_checked: list = dc_field(default_factory=list)
    a_failures: list = dc_field(default_factory=list)   # (i, point) pairs
    b_checked: list = dc_field(default_factory=list)
    b_failures: list = dc_field(default_factory=list)
    b_zero_hits: int = 0
    b_zero_misplaced: int = 0

    @property
    def ok(self) -> bool:
        return not self.a_failures and not self.b_failures and not self.b_zero_misplaced

    def to_dict(self, field: FieldSpec) -> dict:
        def pts(fails):
            return [{"index": i, "point": [field.to_str(x) for x in p]} for i, p in fails]
        return {
            "samples": self.samples,
            "A_checked": self.a_checked,
            "A_failures": pts(self.a_failures),
            "B_checked": self.b_checked,
            "B_failures": pts(self.b_failures),
            "B_zero_hits": self.b_zero_hits,
            "B_zero_misplaced": self.b_zero_misplaced,
        }


def verify_chain(chart: QuadricChart, chain: CycleChain, samples: int,
                 rng: np.random.Generator) -> ChainReport:
    """Sample points of every A_i (q must vanish) and every B_i (q must equal c_i d_i)."""
    f = chart.field
    rep = ChainReport(samples)
    for i in range(10):
        gens = chain.a_generators(i)
        for _ in range(samples):
            x = _combine(gens, f.random_vector(len(gens), rng), f)
            if not f.is_zero(quadric_value(chart, *split_nm(x))):
                rep.a_failures.append((i, x))
        rep.a_checked.append(samples)
    for i in range(9):
        # v_i..v_8 come first and v*_i last, so c_i, d_i are the end coefficients
        gens = chain.b_generators(i)
        for _ in range(samples):
            coeffs = f.random_vector(len(gens), rng)
            x = _combine(gens, coeffs, f)
            q = quadric_value(chart, *split_nm(x))
            c_i, d_i = coeffs[0], coeffs[-1]
            if not f.is_zero(q - c_i * d_i):
                rep.b_failures.append((i, x))
            elif f.is_zero(q):
                rep.b_zero_hits += 1
                if not (contains(chain.A[i], x) or contains(chain.A[i + 1], x)):
                    rep.b_zero_misplaced += 1
        rep.b_checked.append(samples)
    return rep


def corrupt_dual(chain: CycleChain, rng: np.random.Generator, index: int = 0) -> CycleChain:
    """Negative control: add a random n-side-independent perturbation to v*_index."""
    f = chain.v.field
    rows = [list(r) for r in chain.v_star.rows]
    rows[index] = [f.norm(x + f.random_nonzero(rng)) for x in rows[index]]
    return assemble_chain(chain.v, Matrix._raw(rows, f, 9))


# --- polynomials in t (coefficients lowest degree first) --------------------

def _ptrim(p, f):
    p = list(p)
    while p and f.is_zero(p[-1]):
        p.pop()
    return p


def _padd(a, b, f):
    n = max(len(a), len(b))
    return _ptrim([f.norm((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) + f.zero)
                   for i in range(n)], f)


def _pneg(a, f):
    return [f.norm(-x) for x in a]


def _psub(a, b, f):
    return _padd(a, _pneg(b, f), f)


def _pmul(a, b, f):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _ptrim([f.norm(f.zero + x) for x in out], f)


def _limit_ratio(num, den, f):
    """lim_{t->∞} num(t)/den(t); ChartMiss if it diverges or den ≡ 0."""
    if not den:
        raise ChartMiss("denominator vanishes identically")
    if len(num) > len(den):
        raise ChartMiss("coordinate diverges along the pencil")
    if len(num) < len(den):
        return f.zero
    return f.div(num[-1], den[-1])


def o_to_o1_numerators(n, m, mul, sub, one):
    """Transition O -> O' (pivots 0, 1, 3): numerators over the common denominator n_7.

    n, m are 0-based flattened chart coordinates (so the 1-based n_7 is n[6]).
    Returns the 3×6 numerator grid over O' free columns (2, 4, 5, 6, 7, 8).
    """
    n7 = n[6]
    row0 = [sub(0, n[0]), sub(mul(n[1], n7), mul(n[0], n[7])), sub(mul(n[2], n7), mul(n[0], n[8])),
            sub(mul(m[0], n7), mul(n[0], m[6])), sub(mul(m[1], n7), mul(n[0], m[7])),
            sub(mul(m[2], n7), mul(n[0], m[8]))]
    row1 = [sub(0, n[3]), sub(mul(n[4], n7), mul(n[3], n[7])), sub(mul(n[5], n7), mul(n[3], n[8])),
            sub(mul(m[3], n7), mul(n[3], m[6])), sub(mul(m[4], n7), mul(n[3], m[7])),
            sub(mul(m[5], n7), mul(n[3], m[8]))]
    row2 = [one, n[7], n[8], m[6], m[7], m[8]]
    return [row0, row1, row2], n7


def o_to_o1(n, m, field: FieldSpec) -> ChartPoint:
    """Explicit rational transition of a point of O into the D1 chart O'."""
    n = [field(x) for x in n]
    m = [field(x) for x in m]
    if field.is_zero(n[6]):
        raise ChartMiss("n_7 = 0: point is outside O'")

    def sub(a, b):
        return field.norm(a - b + field.zero)

    def mul(a, b):
        return field.norm(a * b)

    nums, den = o_to_o1_numerators(n, m, mul, sub, field.one)
    inv = field.inv(den)
    return ChartPoint(9, 3, D1_PIVOTS, Matrix._raw([[field.norm(x * inv) for x in r] for r in nums], field, 6))


def _pencil_polys(direction: Matrix, base: Matrix):
    """Entries of t·(0|D) + (I|B) as linear polynomials, 3×9."""
    f = direction.field
    out = []
    for s in range(3):
        row = [_ptrim([f.one if c == s else f.zero], f) for c in range(3)]
        row += [_ptrim([base[s, c], direction[s, c]], f) for c in range(6)]
        out.append(row)
    return out


def _transition_limit_explicit(direction: Matrix, base: Matrix) -> ChartPoint:
    f = direction.field
    x = _pencil_polys(direction, base)
    n = [x[a // 3][3 + a % 3] for a in range(9)]
    m = [x[b // 3][6 + b % 3] for b in range(9)]
    nums, den = o_to_o1_numerators(n, m, lambda a, b: _pmul(a, b, f),
                                   lambda a, b: _psub(a if a != 0 else [], b, f), [f.one])
    coords = [[_limit_ratio(num, den, f) for num in r] for r in nums]
    return ChartPoint(9, 3, D1_PIVOTS, Matrix._raw(coords, f, 6))


def _transition_limit_generic(direction: Matrix, base: Matrix, pivots: tuple) -> ChartPoint:
    """Limit of X_S(t)^-1 X(t) via the adjugate: numerators adj(X_S) X, denominator det X_S."""
    f = direction.field
    x = _pencil_polys(direction, base)
    xs = [[x[r][c] for c in pivots] for r in range(3)]

    def minor(r0, r1, c0, c1):
        return _psub(_pmul(xs[r0][c0], xs[r1][c1], f), _pmul(xs[r0][c1], xs[r1][c0], f), f)

    # adj[i][j] = cofactor C[j][i]
    adj = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            cols = [c for c in range(3) if c != i]
            m = minor(rows[0], rows[1], cols[0], cols[1])
            adj[i][j] = m if (i + j) % 2 == 0 else _pneg(m, f)
    det = []
    for c in range(3):
        det = _padd(det, _pmul(xs[0][c], adj[c][0], f), f)
    free = [c for c in range(9) if c not in pivots]
    coords = []
    for i in range(3):
        row = []
        for c in free:
            num = []
            for k in range(3):
                num = _padd(num, _pmul(adj[i][k], x[k][c], f), f)
            row.append(_limit_ratio(num, det, f))
        coords.append(row)
    return ChartPoint(9, 3, pivots, Matrix._raw(coords, f, 6))


def full_pencil(direction: Matrix, base: Matrix) -> PencilLine:
    f = direction.field
    ident = Matrix.identity(3, f)
    return PencilLine(ident.hstack(base), Matrix.zeros(3, 3, f).hstack(direction))


@dataclass(frozen=True)
class D1Limit:
    point: ChartPoint
    pivots: tuple
    plucker_agrees: bool
    in_D1: bool


def d1_limit(chart: QuadricChart | None, direction: Matrix, base: Matrix) -> D1Limit:
    """Limit in a boundary chart of t·(0|N0|M0) + (I|N1|M1) for a rank-one direction.

    Uses the explicit O -> O' transition when its pivots work, otherwise the
    first chart of ``D1_PIVOT_FALLBACKS`` in which the limit exists.  The
    result is cross-checked against the Plücker leading-term limit.
    """
    if direction.shape != (3, 6) or base.shape != (3, 6):
        raise ValueError("direction and base must be 3×6 (N | M) blocks")
    if rank(direction) != 1:
        raise RankMismatch(f"direction has rank {rank(direction)}, expected 1")
    point = None
    for pivots in D1_PIVOT_FALLBACKS:
        try:
            if pivots == D1_PIVOTS:
                point = _transition_limit_explicit(direction, base)
            else:
                point = _transition_limit_generic(direction, base, pivots)
            break
        except ChartMiss:
            continue
    if point is None:
        raise ChartMiss("limit lies in none of the boundary charts")
    lim = limit_point(full_pencil(direction, base))
    try:
        agrees = chart_coordinates(lim, point.pivots) == point
    except NotInChart:
        agrees = False
    k1_rank = rank(point.matrix().submatrix(range(3), range(3)))
    return D1Limit(point, point.pivots, agrees, k1_rank == 2)


# --- boundary witnesses ------------------------------------------------------

def rank_one_n_direction(field: FieldSpec, rng: np.random.Generator) -> Matrix:
    """A random rank-one 3×6 direction (N0 | 0) with the entries the D1 chart needs nonzero."""
    u = field.random_vector(3, rng)
    w = field.random_vector(3, rng)
    u[2] = field.random_nonzero(rng)
    w[0] = field.random_nonzero(rng)
    return Matrix._raw([[field.norm(u[s] * w[j]) for j in range(3)] + [field.zero] * 3
                        for s in range(3)], field, 6)


def direction_to_nm(direction: Matrix) -> tuple[list, list]:
    n = [direction[a // 3, a % 3] for a in range(9)]
    m = [direction[b // 3, 3 + b % 3] for b in range(9)]
    return n, m


def nm_to_direction(n: Sequence, m: Sequence, field: FieldSpec) -> Matrix:
    return Matrix._raw([list(n[3 * s:3 * s + 3]) + list(m[3 * s:3 * s + 3]) for s in range(3)], field, 6)


def chain_with_rank_one(chart: QuadricChart, i: int, rng: np.random.Generator,
                        attempts: int = 32) -> tuple[CycleChain, Matrix]:
    """Chain whose basis vector v_i is a rank-one (N0 | 0); returns (chain, direction)."""
    f = chart.field
    for _ in range(attempts):
        d = rank_one_n_direction(f, rng)
        n, _ = direction_to_nm(d)
        rows = [f.random_vector(9, rng) for _ in range(9)]
        rows[i] = n
        v = Matrix._raw(rows, f, 9)
        if rank(v) == 9:
            return build_chain(chart, v), d
    raise NotFound("could not build a chain with a rank-one basis vector")


@dataclass(frozen=True)
class L49Witness:
    point: Matrix
    value: object
    trial: int
    fiber_base: ChartPoint


def l49_witness(chart: QuadricChart, direction: Matrix, trials: int,
                rng: np.random.Generator) -> L49Witness:
    """A point of the D1 fiber over ``direction`` at which α' does not vanish.

    The fiber point is the O' limit of t·direction + (I|0|0); its coordinates
    m'_1..m'_6 (rows 0-1, K3 columns) are free along the fiber and are
    redrawn at random up to ``trials`` times.
    """
    f = chart.field
    if rank(direction) != 1:
        raise RankMismatch("direction must have rank one")
    n, m = direction_to_nm(direction)
    if not f.is_zero(quadric_value(chart, n, m)):
        raise ValueError("direction is not on the quadric")
    base = d1_limit(chart, direction, Matrix.zeros(3, 6, f)).point
    free = base.free_columns
    for trial in range(trials):
        coords = [list(r) for r in base.coords.rows]
        for r in (0, 1):
            for c in (6, 7, 8):
                coords[r][free.index(c)] = f.random(rng)
        p = ChartPoint(9, 3, base.pivots, Matrix._raw(coords, f, 6)).matrix()
        val = evaluate(chart.alpha, *p.rows)
        if not f.is_zero(val):
            return L49Witness(p, val, trial, base)
    raise NotFound(f"no point off X' in {trials} draws")


def l49_linear_coefficients(alpha9: Alternating3Form, point: Matrix) -> list:
    """Predicted coefficients of m'_1..m'_3 in α'(p) for a D1-chart point p (pivots 0, 1, 3).

    Writing α' = Σ_k Q'_k ∧ g_k*, the coefficient of m'_k is
    Q'_k(x, y) = Σ_ij Q_i[j][k] x_i y_j with x = (0, 1, n'_4) the K1 part of
    row 1 and y = (1, n'_8, n'_9) the K2 part of row 2 (valid when n'_7 = 0).
    """
    q = frame_components(alpha9)
    f = alpha9.field
    x = point.row(1)[0:3]
    y = point.row(2)[3:6]
    return [f.norm(sum(q.blocks[i][j, k] * x[i] * y[j] for i in range(3) for j in range(3)) + f.zero)
            for k in range(3)]


# --- D2 --------------------------------------------------------------------------

def rank_two_direction(gens: Sequence[Sequence], field: FieldSpec, rng: np.random.Generator,
                       attempts: int = 32) -> Matrix:
    """A rank-two (N0 | M0) in the span of ``gens`` (18-vectors), via a forced left kernel vector."""
    for _ in range(attempts):
        c = field.random_vector(3, rng)
        if all(field.is_zero(x) for x in c):
            continue
        # c^T D = 0 is 6 linear conditions on the combination coefficients
        cond_rows = []
        for col in range(6):
            cond_rows.append([field.norm(sum(c[s] * g[(s * 3 + col) if col < 3 else 9 + s * 3 + col - 3]
                                             for s in range(3)) + field.zero) for g in gens])
        ker = kernel_basis(Matrix._raw(cond_rows, field, len(gens)))
        if ker.nrows == 0:
            continue
        lam = ker.vecmul(field.random_vector(ker.nrows, rng))
        x = _combine(list(gens), lam, field)
        d = nm_to_direction(*split_nm(x), field)
        if rank(d) == 2:
            return d
    raise NotFound("no rank-two direction found in the given span")


@dataclass(frozen=True)
class D2Report:
    values: tuple       # α' at the rescaled representative for each sampled t, then t = ∞
    invariant: bool
    on_X: bool
    line_in_quadric: bool
    consistent: bool


def d2_representative(direction: Matrix, t, field: FieldSpec) -> Matrix:
    """Rows (c | 0), (e_i/t | D_i), (e_j/t | D_j) with c a left kernel vector of D.

    ``t=None`` gives the limit t -> ∞.
    """
    ker = kernel_basis(direction.T())
    if ker.nrows != 1:
        raise RankMismatch("direction must have rank two")
    c = list(ker.row(0))
    r = next(i for i, x in enumerate(c) if not field.is_zero(x))
    inv = field.inv(c[r])
    c = [field.norm(x * inv) for x in c]
    rows = [c + [field.zero] * 6]
    tinv = field.zero if t is None else field.inv(t)
    for i in range(3):
        if i == r:
            continue
        head = [tinv if col == i else field.zero for col in range(3)]
        rows.append(head + list(direction.row(i)))
    return Matrix._raw(rows, field, 9)


def d2_line_invariance(chart: QuadricChart, direction: Matrix, trials: int,
                       rng: np.random.Generator) -> D2Report:
    f = chart.field
    if rank(direction) != 2:
        raise RankMismatch("direction must have rank two")
    ts = []
    while len(ts) < 2 * trials:
        t = f.random_nonzero(rng)
        if t not in ts:
            ts.append(t)
    vals = [evaluate(chart.alpha, *d2_representative(direction, t, f).rows) for t in ts]
    vals.append(evaluate(chart.alpha, *d2_representative(direction, None, f).rows))
    invariant = all(v == vals[0] for v in vals)
    on_x = f.is_zero(vals[0])
    n, m = direction_to_nm(direction)
    in_quadric = f.is_zero(quadric_value(chart, n, m))
    return D2Report(tuple(vals), invariant, on_x, in_quadric, on_x == in_quadric)


def pairing_ok(chart: QuadricChart) -> bool:
    return is_nondegenerate(chart.pairing)
