"""Converter maps with per A = det Φ(A) and the prescribed per/det family.

A :class:`ConverterSpec` bundles a map with the input space it is defined on,
so that :mod:`census.services.verification_service` can sweep or sample that
space and check the defining identity.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional

from .exceptions import DimensionMismatch, EvenCharacteristic, PreconditionViolated, ZeroAlpha
from .matrix import FMatrix, det, per

logger = logging.getLogger(__name__)


def _require_dim(A, n, name):
    if A.n != n:
        raise DimensionMismatch(f"{name} takes {n}x{n} matrices, got {A.n}x{A.n}")


def polya_2x2(A):
    """[[a11, -a12], [a21, a22]]: its determinant is per A."""
    _require_dim(A, 2, "polya_2x2")
    return A.replace(0, 1, A.ctx.neg(A[0, 1]))


def psi33(A):
    """Negate a11 and a22 of a 3x3 matrix with a33 = 0."""
    _require_dim(A, 3, "psi33")
    f = A.ctx
    if not f.is_zero(A[2, 2]):
        raise PreconditionViolated("psi33 is only defined when a33 = 0")
    return A.replace(0, 0, f.neg(A[0, 0])).replace(1, 1, f.neg(A[1, 1]))


def ex1_converter(A):
    """Id_(n-1) ⊕ [per A]."""
    f = A.ctx
    return FMatrix.identity(f, A.n - 1).direct_sum(FMatrix.from_rows(f, [[per(A)]]))


def _half(ctx):
    if ctx.p == 2:
        raise EvenCharacteristic(f"1/2 does not exist in {ctx}")
    return ctx.half()


def ex2_exchanger(A, m=None):
    """A 2x2 core ⊕ Id_(m-2) whose permanent is det A and whose determinant is per A.

    In characteristic 2 permanent and determinant coincide, so the result is
    A itself, padded to A ⊕ Id_(m-n) when m > n.
    """
    f = A.ctx
    m = A.n if m is None else m
    if m < 2:
        raise DimensionMismatch(f"ex2 output must be at least 2x2, got m={m}")
    if f.p == 2:
        if m < A.n:
            raise DimensionMismatch(f"cannot embed a {A.n}x{A.n} input into {m}x{m}")
        return A if m == A.n else A.direct_sum(FMatrix.identity(f, m - A.n))
    half = _half(f)
    d, p = det(A), per(A)
    core = FMatrix.from_rows(
        f,
        [
            [f.one, f.mul(half, f.sub(d, p))],
            [f.one, f.mul(half, f.add(d, p))],
        ],
    )
    return core.direct_sum(FMatrix.identity(f, m - 2)) if m > 2 else core


def delta_family(ctx, n, lam, mu, alpha):
    """[[α, (λ-μ)/2], [1, (λ+μ)/(2α)]] ⊕ Id_(n-2): permanent λ, determinant μ."""
    if n < 2:
        raise DimensionMismatch(f"delta_family needs n >= 2, got {n}")
    half = _half(ctx)
    lam, mu, alpha = ctx.coerce(lam), ctx.coerce(mu), ctx.coerce(alpha)
    if ctx.is_zero(alpha):
        raise ZeroAlpha("alpha must be nonzero")
    core = FMatrix.from_rows(
        ctx,
        [
            [alpha, ctx.mul(half, ctx.sub(lam, mu))],
            [ctx.one, ctx.div(ctx.mul(half, ctx.add(lam, mu)), alpha)],
        ],
    )
    return core.direct_sum(FMatrix.identity(ctx, n - 2)) if n > 2 else core


@dataclass(frozen=True)
class ConverterSpec:
    """A map on n x n matrices with per A = det Φ(A).

    Exchangers also satisfy det A = per Φ(A). Entries listed in pinned_zero
    are held at zero on the domain (psi33 lives on the a33 = 0 slice).
    """

    name: str
    n: int
    m: int
    transform: Callable
    exchanger: bool = False
    pinned_zero: tuple = ()
    # Set by get_converter only; other processes rebuild registered specs by name.
    registered: bool = False

    def free_positions(self):
        return [
            (i, j) for i in range(self.n) for j in range(self.n) if (i, j) not in self.pinned_zero
        ]

    def domain_size(self, ctx):
        return ctx.q ** len(self.free_positions())

    def input_at(self, ctx, index):
        """Input number ``index``, odometer order over the free entries."""
        rows = [[ctx.zero] * self.n for _ in range(self.n)]
        for i, j in reversed(self.free_positions()):
            index, digit = divmod(index, ctx.q)
            rows[i][j] = ctx.element(digit)
        return FMatrix.from_rows(ctx, rows)

    def random_input(self, ctx, rng):
        A = FMatrix.random(ctx, self.n, rng)
        for i, j in self.pinned_zero:
            A = A.replace(i, j, ctx.zero)
        return A

    def describe(self, ctx, item):
        return str(item)

    def check(self, ctx, A) -> Optional[str]:
        """None when the identity holds for A, otherwise what went wrong."""
        image = self.transform(A)
        if image.n != self.m:
            return f"image is {image.n}x{image.n}, expected {self.m}x{self.m}"
        lhs, rhs = per(A), det(image)
        if lhs != rhs:
            return f"per A = {ctx.format(lhs)} but det Φ(A) = {ctx.format(rhs)}"
        if self.exchanger:
            lhs, rhs = det(A), per(image)
            if lhs != rhs:
                return f"det A = {ctx.format(lhs)} but per Φ(A) = {ctx.format(rhs)}"
        return None


@dataclass(frozen=True)
class FamilySpec:
    """The prescribed-value family, checked over all triples (λ, μ, α ≠ 0)."""

    name: str
    n: int
    m: int
    registered: bool = False

    def domain_size(self, ctx):
        return ctx.q * ctx.q * (ctx.q - 1)

    def input_at(self, ctx, index):
        q = ctx.q
        index, a = divmod(index, q - 1)
        lam, mu = divmod(index, q)
        return ctx.element(lam), ctx.element(mu), ctx.element(a + 1)

    def random_input(self, ctx, rng):
        lam, mu = (int(v) for v in rng.integers(0, ctx.q, size=2))
        alpha = int(rng.integers(1, ctx.q))
        return ctx.element(lam), ctx.element(mu), ctx.element(alpha)

    def describe(self, ctx, item):
        lam, mu, alpha = item
        return f"lambda={ctx.format(lam)}, mu={ctx.format(mu)}, alpha={ctx.format(alpha)}"

    def check(self, ctx, item) -> Optional[str]:
        lam, mu, alpha = item
        D = delta_family(ctx, self.n, lam, mu, alpha)
        if per(D) != lam:
            return f"per = {ctx.format(per(D))}, expected {ctx.format(lam)}"
        if det(D) != mu:
            return f"det = {ctx.format(det(D))}, expected {ctx.format(mu)}"
        return None


CONVERTERS = ("polya2", "psi33", "ex1", "ex2", "delta")


def get_converter(name, n=None, m=None):
    """Registered converter by name; n and m default to the smallest valid sizes."""
    if name == "polya2":
        return ConverterSpec("polya2", 2, 2, polya_2x2, registered=True)
    if name == "psi33":
        return ConverterSpec("psi33", 3, 3, psi33, pinned_zero=((2, 2),), registered=True)
    if name == "ex1":
        n = n or 3
        return ConverterSpec("ex1", n, n, ex1_converter, registered=True)
    if name == "ex2":
        n = n or 2
        m = m or max(n, 2)
        return ConverterSpec(
            "ex2", n, m, lambda A: ex2_exchanger(A, m), exchanger=True, registered=True
        )
    if name == "delta":
        n = n or 2
        return FamilySpec("delta", n, n, registered=True)
    raise ValueError(f"unknown converter {name!r}; choose from {', '.join(CONVERTERS)}")


def check_range(spec, ctx, start, stop):
    """Check inputs start..stop-1; returns (checked, first failing index or -1)."""
    for index in range(start, stop):
        if spec.check(ctx, spec.input_at(ctx, index)) is not None:
            return index - start + 1, index
    return stop - start, -1
