"""Exact scalars over Q and GF(p), and a small dense matrix kernel.

Scalars are plain Python objects: ``Fraction`` for Q, ``int`` residues in
``[0, p)`` for GF(p).  A :class:`FieldSpec` carries the operations that
differ between the two (normalisation, inversion, parsing).  Matrices are
immutable tuples of tuples tagged with their field.

Randomness always comes from an explicitly passed ``numpy.random.Generator``
backed by PCG64 (see :func:`make_rng`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from sympy import isprime

from .errors import DVError

Q_RANDOM_RANGE = 9


class NotSquare(DVError):
    pass


class Singular(DVError):
    pass


class NoSolution(DVError):
    pass


class FieldMismatch(DVError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    kind: str  # "Q" or "GF"
    modulus: int | None = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.modulus is not None:
                raise ValueError("Q takes no modulus")
        elif self.kind == "GF":
            if self.modulus is None or self.modulus < 2 or not isprime(self.modulus):
                raise ValueError(f"GF modulus must be prime, got {self.modulus}")
            if self.modulus >= 2**61:
                raise ValueError("GF modulus must be below 2**61")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @property
    def is_prime_field(self) -> bool:
        return self.kind == "GF"

    @property
    def zero(self):
        return 0 if self.is_prime_field else Fraction(0)

    @property
    def one(self):
        return 1 if self.is_prime_field else Fraction(1)

    def __call__(self, x):
        """Coerce an int, Fraction or scalar string into this field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.is_prime_field:
            if isinstance(x, Fraction):
                return x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus
            return int(x) % self.modulus
        return Fraction(x)

    def norm(self, x):
        # for Q, Fraction arithmetic already keeps lowest terms
        return x % self.modulus if self.is_prime_field else x

    def inv(self, x):
        if self.is_prime_field:
            x %= self.modulus
            if x == 0:
                raise ZeroDivisionError("inverse of zero in GF(p)")
            return pow(x, -1, self.modulus)
        if x == 0:
            raise ZeroDivisionError("inverse of zero in Q")
        return 1 / Fraction(x)

    def div(self, a, b):
        return self.norm(a * self.inv(b))

    def is_zero(self, x) -> bool:
        return x == 0 if not self.is_prime_field else x % self.modulus == 0

    def to_str(self, x) -> str:
        if self.is_prime_field:
            return str(int(x) % self.modulus)
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

    def parse(self, s: str):
        s = s.strip()
        if "/" in s:
            num, den = s.split("/")
            return self(Fraction(int(num), int(den)))
        return self(int(s))

    def random(self, rng: np.random.Generator):
        if self.is_prime_field:
            return int(rng.integers(0, self.modulus))
        return Fraction(int(rng.integers(-Q_RANDOM_RANGE, Q_RANDOM_RANGE + 1)))

    def random_vector(self, n: int, rng: np.random.Generator) -> list:
        if self.is_prime_field:
            return [int(v) for v in rng.integers(0, self.modulus, size=n)]
        return [Fraction(int(v)) for v in rng.integers(-Q_RANDOM_RANGE, Q_RANDOM_RANGE + 1, size=n)]

    def random_nonzero(self, rng: np.random.Generator):
        while True:
            x = self.random(rng)
            if not self.is_zero(x):
                return x

    @property
    def label(self) -> str:
        return "q" if not self.is_prime_field else f"gf:{self.modulus}"

    @classmethod
    def from_label(cls, label: str) -> "FieldSpec":
        label = label.strip().lower()
        if label in ("q", "qq", "rational"):
            return QQ
        if label.startswith("gf:"):
            return GF(int(label[3:]))
        raise ValueError(f"bad field label {label!r}; expected 'q' or 'gf:P'")

    def __repr__(self):
        return "QQ" if not self.is_prime_field else f"GF({self.modulus})"


QQ = FieldSpec("Q")


def GF(p: int) -> FieldSpec:
    return FieldSpec("GF", p)


DEFAULT_PRIME = 10007


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator; ``seed`` may be an int or a ``SeedSequence``."""
    return np.random.Generator(np.random.PCG64(seed))


def child_seed(seed: int, *counter: int) -> np.random.SeedSequence:
    """Counter-based seed derivation: (master seed, counters) -> independent stream.

    The stream for a given counter tuple never depends on how many other
    streams were derived before it, so parallel scheduling cannot change it.
    """
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(counter))


@dataclass(frozen=True)
class Matrix:
    rows: tuple
    field: FieldSpec
    ncols: int

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], field: FieldSpec, ncols: int | None = None) -> "Matrix":
        rows = tuple(tuple(field(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for an empty matrix")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(rows, field, ncols)

    @classmethod
    def _raw(cls, rows, field, ncols):
        # rows already normalised in field
        return cls(tuple(tuple(r) for r in rows), field, ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: FieldSpec) -> "Matrix":
        return cls._raw([[field.zero] * ncols for _ in range(nrows)], field, ncols)

    @classmethod
    def identity(cls, n: int, field: FieldSpec) -> "Matrix":
        return cls._raw(
            [[field.one if i == j else field.zero for j in range(n)] for i in range(n)], field, n
        )

    @classmethod
    def diag(cls, values: Sequence, field: FieldSpec) -> "Matrix":
        n = len(values)
        return cls.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], field)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def T(self) -> "Matrix":
        if not self.rows:
            return Matrix._raw([[] for _ in range(self.ncols)], self.field, 0)
        return Matrix._raw([list(c) for c in zip(*self.rows)], self.field, self.nrows)

    def _check(self, other: "Matrix"):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        norm = self.field.norm
        if not other.rows:
            return Matrix.zeros(self.nrows, other.ncols, self.field)
        cols = list(zip(*other.rows))
        out = [[norm(sum((a * b for a, b in zip(r, c)), self.field.zero)) for c in cols] for r in self.rows]
        return Matrix._raw(out, self.field, other.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        norm = self.field.norm
        return Matrix._raw([[norm(a + b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                           self.field, self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        norm = self.field.norm
        return Matrix._raw([[norm(a - b) for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                           self.field, self.ncols)

    def __neg__(self) -> "Matrix":
        norm = self.field.norm
        return Matrix._raw([[norm(-a) for a in r] for r in self.rows], self.field, self.ncols)

    def scale(self, c) -> "Matrix":
        norm = self.field.norm
        return Matrix._raw([[norm(c * a) for a in r] for r in self.rows], self.field, self.ncols)

    def apply(self, v: Sequence) -> list:
        """Matrix times column vector."""
        norm = self.field.norm
        return [norm(sum((a * b for a, b in zip(r, v)), self.field.zero)) for r in self.rows]

    def vecmul(self, v: Sequence) -> list:
        """Row vector times matrix."""
        norm = self.field.norm
        out = [0] * self.ncols
        for c, r in zip(v, self.rows):
            if c:
                for j, a in enumerate(r):
                    out[j] += c * a
        return [norm(self.field.zero + x) for x in out]

    def vstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.ncols != other.ncols:
            raise ValueError("column mismatch in vstack")
        return Matrix(self.rows + other.rows, self.field, self.ncols)

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._raw([a + b for a, b in zip(self.rows, other.rows)], self.field,
                           self.ncols + other.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._raw([[self.rows[i][j] for j in cols] for i in rows], self.field, len(cols))

    def is_zero(self) -> bool:
        return all(self.field.is_zero(a) for r in self.rows for a in r)

    def to_strings(self) -> list[list[str]]:
        return [[self.field.to_str(a) for a in r] for r in self.rows]

    def __repr__(self):
        return f"Matrix({self.to_strings()}, {self.field!r})"


def _rref_rows(rows: list[list], field: FieldSpec, ncols: int) -> tuple[list[list], list[int]]:
    # first nonzero entry scanning columns left to right, rows top to bottom
    m = [list(r) for r in rows]
    norm = field.norm
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
        inv = field.inv(m[r][c])
        prow = [norm(a * inv) for a in m[r]]
        m[r] = prow
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    row = m[i]
                    m[i] = [norm(a - f * b) if b != 0 else a for a, b in zip(row, prow)]
        pivots.append(c)
        r += 1
    return m, pivots


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    rows, pivots = _rref_rows(m.rows, m.field, m.ncols)
    return Matrix._raw(rows, m.field, m.ncols), pivots


def rank(m: Matrix) -> int:
    return len(_rref_rows(m.rows, m.field, m.ncols)[1])


def kernel_basis(m: Matrix) -> Matrix:
    """Rows spanning {x : m x = 0}, one per free column of the RREF."""
    f = m.field
    rows, pivots = _rref_rows(m.rows, f, m.ncols)
    pivset = set(pivots)
    basis = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        v = [f.zero] * m.ncols
        v[free] = f.one
        for r, pc in enumerate(pivots):
            v[pc] = f.norm(-rows[r][free])
        basis.append(v)
    return Matrix._raw(basis, f, m.ncols)


@dataclass(frozen=True)
class Solution:
    x: list
    unique: bool
    rank: int


def solve_linear(a: Matrix, b: Sequence) -> Solution:
    """Solve ``a x = b``; raises :class:`NoSolution` when inconsistent.

    When the kernel is nontrivial, the returned ``x`` sets free variables to
    zero and ``unique`` is False.
    """
    if len(b) != a.nrows:
        raise ValueError("right-hand side length does not match rows")
    f = a.field
    aug = [list(r) + [f(v)] for r, v in zip(a.rows, b)]
    rows, pivots = _rref_rows(aug, f, a.ncols + 1)
    if a.ncols in pivots:
        raise NoSolution("inconsistent linear system")
    x = [f.zero] * a.ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][a.ncols]
    return Solution(x, len(pivots) == a.ncols, len(pivots))


def determinant(m: Matrix):
    if m.nrows != m.ncols:
        raise NotSquare(f"determinant of {m.shape} matrix")
    f = m.field
    norm = f.norm
    a = [list(r) for r in m.rows]
    n = len(a)
    det = f.one
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return f.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = norm(-det)
        det = norm(det * a[c][c])
        inv = f.inv(a[c][c])
        for i in range(c + 1, n):
            fac = a[i][c]
            if fac != 0:
                fac = norm(fac * inv)
                a[i] = [norm(x - fac * y) for x, y in zip(a[i], a[c])]
    return det


def invert(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise NotSquare(f"inverse of {m.shape} matrix")
    n = m.nrows
    f = m.field
    aug = [list(r) + [f.one if i == j else f.zero for j in range(n)] for i, r in enumerate(m.rows)]
    rows, pivots = _rref_rows(aug, f, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise Singular("matrix is not invertible")
    return Matrix._raw([r[n:] for r in rows], f, n)


def random_matrix(nrows: int, ncols: int, field: FieldSpec, rng: np.random.Generator) -> Matrix:
    """Uniform entries over GF(p); integers in [-9, 9] over Q."""
    flat = field.random_vector(nrows * ncols, rng)
    return Matrix._raw([flat[i * ncols:(i + 1) * ncols] for i in range(nrows)], field, ncols)


def random_invertible(n: int, field: FieldSpec, rng: np.random.Generator, attempts: int = 64) -> Matrix:
    for _ in range(attempts):
        g = random_matrix(n, n, field, rng)
        if rank(g) == n:
            return g
    raise Singular("could not draw an invertible matrix")
