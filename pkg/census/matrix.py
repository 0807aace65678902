"""Dense square matrices over a FieldCtx and their scalar invariants.

This is the reference (one matrix at a time) implementation. Exhaustive
censuses go through :mod:`census.kernels`, which evaluates the same functions
on whole stacks of matrices and is tested against this module.
"""

import re
from dataclasses import dataclass

from .exceptions import DimensionMismatch, MatrixParseError

MAX_DIM = 12

# Laplace beats Ryser below this size.
RYSER_FROM = 4

_TOKEN = re.compile(r"\([^)]*\)|[^,\s]+")


@dataclass(frozen=True)
class FMatrix:
    """An n x n matrix of field elements, stored row-major."""

    ctx: object
    rows: tuple

    def __post_init__(self):
        n = len(self.rows)
        if n > MAX_DIM:
            raise DimensionMismatch(f"matrices are limited to {MAX_DIM}x{MAX_DIM}, got n={n}")
        if any(len(row) != n for row in self.rows):
            raise DimensionMismatch("matrix must be square")
        for row in self.rows:
            for a in row:
                if not self.ctx.contains(a):
                    raise MatrixParseError(f"{a!r} is not an element of {self.ctx}")

    @classmethod
    def from_rows(cls, ctx, rows):
        rows = tuple(tuple(ctx.coerce(a) for a in row) for row in rows)
        if not rows:
            raise DimensionMismatch("matrix needs at least one row")
        return cls(ctx, rows)

    @classmethod
    def identity(cls, ctx, n):
        return cls(
            ctx, tuple(tuple(ctx.one if i == j else ctx.zero for j in range(n)) for i in range(n))
        )

    @classmethod
    def zeros(cls, ctx, n):
        return cls(ctx, tuple((ctx.zero,) * n for _ in range(n)))

    @classmethod
    def from_index(cls, ctx, n, index):
        """Matrix number ``index`` of the census odometer (last entry fastest)."""
        q = ctx.q
        digits = []
        for _ in range(n * n):
            index, d = divmod(index, q)
            digits.append(ctx.element(d))
        digits.reverse()
        return cls(ctx, tuple(tuple(digits[i * n:(i + 1) * n]) for i in range(n)))

    @classmethod
    def random(cls, ctx, n, rng):
        """Uniform random matrix drawn from a numpy Generator."""
        draws = rng.integers(0, ctx.q, size=(n, n))
        return cls(ctx, tuple(tuple(ctx.element(int(d)) for d in row) for row in draws))

    @property
    def n(self):
        return len(self.rows)

    def __getitem__(self, pos):
        i, j = pos
        return self.rows[i][j]

    def __str__(self):
        return ";".join(",".join(self.ctx.format(a) for a in row) for row in self.rows)

    def to_index(self):
        index = 0
        for row in self.rows:
            for a in row:
                index = index * self.ctx.q + self.ctx.index(a)
        return index

    def replace(self, i, j, value):
        rows = [list(row) for row in self.rows]
        rows[i][j] = self.ctx.coerce(value)
        return FMatrix(self.ctx, tuple(tuple(row) for row in rows))

    def minor(self, i, j):
        """A_ij: delete row i and column j."""
        return self.submatrix((i,), (j,))

    def submatrix(self, drop_rows, drop_cols):
        """Delete a set of rows and a set of columns, e.g. A_(1i)(j1)."""
        if len(set(drop_rows)) != len(set(drop_cols)):
            raise DimensionMismatch("must delete as many rows as columns")
        keep_cols = [c for c in range(self.n) if c not in drop_cols]
        return FMatrix(
            self.ctx,
            tuple(
                tuple(row[c] for c in keep_cols)
                for r, row in enumerate(self.rows)
                if r not in drop_rows
            ),
        )

    def scale_row(self, i, factor):
        rows = list(self.rows)
        rows[i] = tuple(self.ctx.mul(factor, a) for a in rows[i])
        return FMatrix(self.ctx, tuple(rows))

    def transpose(self):
        return FMatrix(self.ctx, tuple(zip(*self.rows)))

    def direct_sum(self, other):
        """Block diagonal self ⊕ other."""
        f = self.ctx
        n, m = self.n, other.n
        top = tuple(row + (f.zero,) * m for row in self.rows)
        bottom = tuple((f.zero,) * n + row for row in other.rows)
        return FMatrix(f, top + bottom)

    def matmul(self, other):
        f = self.ctx
        cols = list(zip(*other.rows))
        return FMatrix(
            f,
            tuple(
                tuple(_dot(f, row, col) for col in cols)
                for row in self.rows
            ),
        )


def _dot(f, xs, ys):
    total = f.zero
    for x, y in zip(xs, ys):
        total = f.add(total, f.mul(x, y))
    return total


def parse_matrix(ctx, text):
    """Parse "1,2,0;0,1,1;2,2,1" (tuples such as "(1,2)" for extension fields)."""
    rows = []
    for row_text in text.strip().split(";"):
        tokens = _TOKEN.findall(row_text)
        if not tokens:
            raise MatrixParseError(f"empty row in matrix literal {text!r}")
        rows.append([ctx.parse_element(tok) for tok in tokens])
    try:
        return FMatrix.from_rows(ctx, rows)
    except DimensionMismatch as exc:
        raise MatrixParseError(f"{text!r} is not a square matrix") from exc


def block_identity(ctx, r, k):
    """Id_r ⊕ 0_(k-r)."""
    return FMatrix(
        ctx,
        tuple(
            tuple(ctx.one if i == j and i < r else ctx.zero for j in range(k))
            for i in range(k)
        ),
    )


def per_laplace(A):
    """Permanent by expansion along the first row."""
    f = A.ctx
    n = A.n
    if n == 0:
        return f.one
    if n == 1:
        return A[0, 0]
    total = f.zero
    for j in range(n):
        a = A[0, j]
        if not f.is_zero(a):
            total = f.add(total, f.mul(a, per_laplace(A.minor(0, j))))
    return total


def per_ryser(A):
    """Permanent by Ryser's inclusion-exclusion over column subsets.

    Subsets are visited in Gray-code order so each step adds or removes one
    column from the running row sums. The sign (-1)^(n-|S|) is applied as
    field negation, which is the identity in characteristic 2.
    """
    f = A.ctx
    n = A.n
    if n == 0:
        return f.one
    row_sums = [f.zero] * n
    in_subset = [False] * n
    size = 0
    total = f.zero
    for step in range(1, 1 << n):
        j = (step & -step).bit_length() - 1
        if in_subset[j]:
            row_sums = [f.sub(s, A[i, j]) for i, s in enumerate(row_sums)]
            size -= 1
        else:
            row_sums = [f.add(s, A[i, j]) for i, s in enumerate(row_sums)]
            size += 1
        in_subset[j] = not in_subset[j]
        prod = f.one
        for s in row_sums:
            prod = f.mul(prod, s)
            if f.is_zero(prod):
                break
        total = f.sub(total, prod) if (n - size) % 2 else f.add(total, prod)
    return total


def per(A, algorithm="auto"):
    if algorithm == "laplace" or (algorithm == "auto" and A.n < RYSER_FROM):
        return per_laplace(A)
    return per_ryser(A)


def laplace_row(A, i):
    """Σ_j a_ij per(A_ij), the expansion of per A along row i."""
    f = A.ctx
    total = f.zero
    for j in range(A.n):
        total = f.add(total, f.mul(A[i, j], per(A.minor(i, j))))
    return total


def _echelon(ctx, rows):
    """Row-reduce in place; returns (rank, pivot product, swap parity)."""
    f = ctx
    rows = [list(r) for r in rows]
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    rank = 0
    pivots = f.one
    swaps = 0
    for c in range(n_cols):
        pivot_row = next((r for r in range(rank, n_rows) if not f.is_zero(rows[r][c])), None)
        if pivot_row is None:
            continue
        if pivot_row != rank:
            rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
            swaps += 1
        pivot = rows[rank][c]
        pivots = f.mul(pivots, pivot)
        inv = f.inv(pivot)
        for r in range(rank + 1, n_rows):
            if not f.is_zero(rows[r][c]):
                factor = f.mul(rows[r][c], inv)
                rows[r] = [f.sub(x, f.mul(factor, y)) for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank, pivots, swaps


def det(A):
    """Determinant by Gaussian elimination, pivoting on the first nonzero entry."""
    f = A.ctx
    if A.n == 0:
        return f.one
    rank, pivots, swaps = _echelon(f, A.rows)
    if rank < A.n:
        return f.zero
    return f.neg(pivots) if swaps % 2 else pivots


def rank(A, ctx=None):
    """Rank of an FMatrix, or of a rectangular list of rows when ctx is given."""
    if isinstance(A, FMatrix):
        return _echelon(A.ctx, A.rows)[0]
    if ctx is None:
        raise DimensionMismatch("rank of a plain row list needs the field")
    widths = {len(row) for row in A}
    if len(widths) > 1:
        raise DimensionMismatch("rows have different lengths")
    return _echelon(ctx, [[ctx.coerce(a) for a in row] for row in A])[0]


def per_compound(A, algorithm="auto"):
    """Â: entry (i, j) is per(A_ij), not transposed.

    The compound of a 1x1 matrix is [[1]] (the permanent of the empty matrix).
    """
    n = A.n
    return FMatrix(
        A.ctx,
        tuple(tuple(per(A.minor(i, j), algorithm) for j in range(n)) for i in range(n)),
    )


def bilinear(x, A, y):
    f = A.ctx
    if len(x) != A.n or len(y) != A.n:
        raise DimensionMismatch(
            f"vectors of length {len(x)} and {len(y)} do not fit a {A.n}x{A.n} form"
        )
    x = [f.coerce(a) for a in x]
    y = [f.coerce(a) for a in y]
    total = f.zero
    for i, xi in enumerate(x):
        if not f.is_zero(xi):
            total = f.add(total, f.mul(xi, _dot(f, A.rows[i], y)))
    return total


def bilinear_zero(x, A, y):
    """True iff x^tr A y = 0."""
    return A.ctx.is_zero(bilinear(x, A, y))
