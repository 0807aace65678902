"""Vectorized evaluation over stacks of matrices.

Arrays hold element *indices* (see :mod:`census.gf`) as int64, with the
matrix axes last: a stack of n x n matrices has shape ``(..., n, n)``. The
arithmetic objects below implement the field operations elementwise on such
arrays and agree with :class:`census.gf.FieldCtx` element for element.
"""

from functools import lru_cache

import numpy as np
from sympy import primefactors

from .matrix import RYSER_FROM

DEFAULT_BATCH = 2**16


class PrimeArith:
    """GF(p) arithmetic on residue arrays."""

    def __init__(self, ctx):
        p = ctx.p
        self.p = p
        self.q = p
        self._inv = np.array([0] + [pow(a, -1, p) for a in range(1, p)], dtype=np.int64)

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        """Elementwise inverse; maps 0 to 0 so masked lanes stay harmless."""
        return self._inv[a]


class ExtensionArith:
    """GF(p^k) arithmetic on index arrays.

    Addition works digit by digit in base p; multiplication goes through
    discrete log/antilog tables of a primitive element.
    """

    def __init__(self, ctx):
        self.p = ctx.p
        self.k = ctx.k
        self.q = ctx.q
        self.weights = [ctx.p**j for j in range(ctx.k)]
        generator = _primitive_element(ctx)
        order = self.q - 1
        self._exp = np.zeros(order, dtype=np.int64)
        self._log = np.zeros(self.q, dtype=np.int64)
        x = ctx.one
        for e in range(order):
            idx = ctx.index(x)
            self._exp[e] = idx
            self._log[idx] = e
            x = ctx.mul(x, generator)

    def _digitwise(self, a, b, op):
        out = 0
        for w in self.weights:
            out = out + (op(a // w % self.p, b // w % self.p) % self.p) * w
        return out

    def add(self, a, b):
        return self._digitwise(a, b, np.add)

    def sub(self, a, b):
        return self._digitwise(a, b, np.subtract)

    def neg(self, a):
        return self._digitwise(0, a, np.subtract)

    def mul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        prod = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, prod)

    def inv(self, a):
        a = np.asarray(a)
        return np.where(a == 0, 0, self._exp[-self._log[a] % (self.q - 1)])


def _primitive_element(ctx):
    order = ctx.q - 1
    factors = primefactors(order)
    for idx in range(1, ctx.q):
        g = ctx.element(idx)
        if all(ctx.pow(g, order // f) != ctx.one for f in factors):
            return g
    raise AssertionError(f"{ctx} has no primitive element")


@lru_cache(maxsize=None)
def arith_for(ctx):
    return PrimeArith(ctx) if ctx.is_prime_field else ExtensionArith(ctx)


def decode(ctx, n, start, stop):
    """Matrices number start..stop-1 of the odometer, as a (B, n, n) stack."""
    q = ctx.q
    powers = q ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
    idx = np.arange(start, stop, dtype=np.int64)
    return ((idx[:, None] // powers) % q).reshape(-1, n, n)


def decode_vectors(ctx, length, start, stop):
    """Vectors number start..stop-1 of F^length, same digit order as decode."""
    q = ctx.q
    powers = q ** np.arange(length - 1, -1, -1, dtype=np.int64)
    idx = np.arange(start, stop, dtype=np.int64)
    return (idx[:, None] // powers) % q


def minor(A, i, j):
    return np.delete(np.delete(A, i, axis=-2), j, axis=-1)


def per_laplace(ar, A):
    n = A.shape[-1]
    if n == 0:
        return np.ones(A.shape[:-2], dtype=np.int64)
    if n == 1:
        return A[..., 0, 0]
    total = np.zeros(A.shape[:-2], dtype=np.int64)
    for j in range(n):
        total = ar.add(total, ar.mul(A[..., 0, j], per_laplace(ar, minor(A, 0, j))))
    return total


def per_ryser(ar, A):
    """Ryser's formula in Gray-code order; signs applied as field negation."""
    n = A.shape[-1]
    if n == 0:
        return np.ones(A.shape[:-2], dtype=np.int64)
    row_sums = np.zeros(A.shape[:-1], dtype=np.int64)
    total = np.zeros(A.shape[:-2], dtype=np.int64)
    in_subset = [False] * n
    size = 0
    for step in range(1, 1 << n):
        j = (step & -step).bit_length() - 1
        column = A[..., :, j]
        if in_subset[j]:
            row_sums = ar.sub(row_sums, column)
            size -= 1
        else:
            row_sums = ar.add(row_sums, column)
            size += 1
        in_subset[j] = not in_subset[j]
        prod = row_sums[..., 0]
        for i in range(1, n):
            prod = ar.mul(prod, row_sums[..., i])
        total = ar.sub(total, prod) if (n - size) % 2 else ar.add(total, prod)
    return total


def per(ar, A, algorithm="auto"):
    if algorithm == "laplace" or (algorithm == "auto" and A.shape[-1] < RYSER_FROM):
        return per_laplace(ar, A)
    return per_ryser(ar, A)


def eliminate(ar, A):
    """Gaussian elimination on a (B, rows, cols) stack.

    Returns (det, rank). det is only meaningful for square input; pivots are
    the first nonzero entry of each column, as in the scalar det.
    """
    A = np.array(A, dtype=np.int64, copy=True)
    batch, n_rows, n_cols = A.shape
    lanes = np.arange(batch)
    row_ids = np.arange(n_rows)
    rank = np.zeros(batch, dtype=np.int64)
    det = np.ones(batch, dtype=np.int64)
    for c in range(n_cols):
        target = np.minimum(rank, n_rows - 1)
        candidates = (A[:, :, c] != 0) & (row_ids[None, :] >= rank[:, None])
        has = candidates.any(axis=1)
        pivot_at = np.where(has, candidates.argmax(axis=1), target)
        swap = has & (pivot_at != target)
        if swap.any():
            sl, st, sp = lanes[swap], target[swap], pivot_at[swap]
            held = A[sl, st].copy()
            A[sl, st] = A[sl, sp]
            A[sl, sp] = held
            det[swap] = ar.neg(det[swap])
        pivot_row = A[lanes, target]
        pivot = pivot_row[:, c]
        below = (row_ids[None, :] > rank[:, None]) & has[:, None]
        factor = np.where(below, ar.mul(A[:, :, c], ar.inv(pivot)[:, None]), 0)
        A = ar.sub(A, ar.mul(factor[:, :, None], pivot_row[:, None, :]))
        det = np.where(has, ar.mul(det, pivot), 0)
        rank = rank + has
    return det, rank


def det(ar, A):
    return eliminate(ar, A)[0]


def rank(ar, A):
    return eliminate(ar, A)[1]


def compound(ar, A, algorithm="auto"):
    """Stack of permanental compounds, entry (i, j) = per(A_ij)."""
    n = A.shape[-1]
    if n == 1:
        return np.ones(A.shape, dtype=np.int64)
    entries = [
        [per(ar, minor(A, i, j), algorithm) for j in range(n)]
        for i in range(n)
    ]
    return np.stack([np.stack(row, axis=-1) for row in entries], axis=-2)


def bilinear(ar, X, M, Y):
    """x^tr M y for each row pair of X, Y; M is a fixed (k, k) index array."""
    k = M.shape[0]
    total = np.zeros(X.shape[0], dtype=np.int64)
    for i in range(k):
        for j in range(k):
            if M[i, j]:
                term = ar.mul(ar.mul(X[:, i], int(M[i, j])), Y[:, j])
                total = ar.add(total, term)
    return total


def _batches(start, stop, batch):
    for lo in range(start, stop, batch):
        yield lo, min(lo + batch, stop)


def tally_range(kind, ctx, n, start, stop, algorithm="auto", form=None, batch=DEFAULT_BATCH):
    """Exact counts for one contiguous index range; returns a list of ints.

    kind "joint": q*q cells indexed per * q + det.
    kind "nr": n + 1 cells, rank of the compound of matrices with per 0.
    kind "vr": 1 cell, pairs (x, y) in F^n x F^n with x^tr form y = 0; the
        index range runs over q^(2n) pairs.
    kind "split3": six cells D', D'', D''', P', P'', P''' of 3x3 matrices.
    """
    ar = arith_for(ctx)
    q = ctx.q
    if kind == "joint":
        counts = np.zeros(q * q, dtype=np.int64)
    elif kind == "nr":
        counts = np.zeros(n + 1, dtype=np.int64)
    elif kind == "vr":
        counts = np.zeros(1, dtype=np.int64)
        M = np.asarray(form, dtype=np.int64)
    elif kind == "split3":
        counts = np.zeros(6, dtype=np.int64)
    else:
        raise ValueError(f"unknown tally kind {kind!r}")

    for lo, hi in _batches(start, stop, batch):
        if kind == "vr":
            pairs = decode_vectors(ctx, 2 * n, lo, hi)
            values = bilinear(ar, pairs[:, :n], M, pairs[:, n:])
            counts[0] += int(np.count_nonzero(values == 0))
            continue
        A = decode(ctx, n, lo, hi)
        if kind == "joint":
            cells = per(ar, A, algorithm) * q + det(ar, A)
            counts += np.bincount(cells, minlength=q * q)
        elif kind == "nr":
            zero = A[per(ar, A, algorithm) == 0]
            if len(zero):
                counts += np.bincount(rank(ar, compound(ar, zero, algorithm)), minlength=n + 1)
        else:
            counts += _split3(ar, A)
    return [int(c) for c in counts]


def _split3(ar, A):
    corner = A[:, 2, 2] != 0
    block = A[:, 1:, 1:]
    det_zero = det(ar, A) == 0
    per_zero = per_laplace(ar, A) == 0
    det_block_zero = det(ar, block) == 0
    per_block_zero = per_laplace(ar, block) == 0
    return np.array(
        [
            np.count_nonzero(det_zero & corner & det_block_zero),
            np.count_nonzero(det_zero & corner & ~det_block_zero),
            np.count_nonzero(det_zero & ~corner),
            np.count_nonzero(per_zero & corner & per_block_zero),
            np.count_nonzero(per_zero & corner & ~per_block_zero),
            np.count_nonzero(per_zero & ~corner),
        ],
        dtype=np.int64,
    )


def sample_hits(ctx, n, statistic, target, trials, seed_seq, algorithm="auto", batch=DEFAULT_BATCH):
    """Draw `trials` uniform matrices from PCG64(seed_seq) and count stat == target."""
    ar = arith_for(ctx)
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    hits = 0
    remaining = trials
    while remaining:
        size = min(batch, remaining)
        A = rng.integers(0, ctx.q, size=(size, n, n), dtype=np.int64)
        values = det(ar, A) if statistic == "det" else per(ar, A, algorithm)
        hits += int(np.count_nonzero(values == target))
        remaining -= size
    return hits
