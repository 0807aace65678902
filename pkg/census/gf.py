"""Finite fields GF(p^k) with deterministic construction.

Elements of a prime field are plain residues ``0..p-1``. Elements of an
extension field are coefficient tuples ``(c0, c1, ..., c_{k-1})`` of a
polynomial in the generator, lowest degree first. Every element also has an
integer *index* ``0..q-1`` (its base-p digits are the coefficients, lowest
first); the index is the element's position in :meth:`FieldCtx.elements` and
is the representation the numpy kernels work with.
"""

import itertools
import logging
import numbers
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache

from sympy import isprime

from .exceptions import (
    DegreeTooLarge,
    DivisionByZero,
    FieldSpecError,
    MatrixParseError,
    NotPrime,
)

logger = logging.getLogger(__name__)

MAX_ORDER = 2**16

_FIELD_SPEC = re.compile(r"^\s*(\d+)\s*(?:\^\s*(\d+))?\s*$")


def _poly_rem(num, den, p):
    """Remainder of num / den over GF(p); den is monic, lists are low-first."""
    rem = list(num)
    dd = len(den) - 1
    for deg in range(len(rem) - 1, dd - 1, -1):
        c = rem[deg] % p
        if c:
            shift = deg - dd
            for j, dj in enumerate(den):
                rem[shift + j] = (rem[shift + j] - c * dj) % p
    return [c % p for c in rem[:dd]]


def _is_irreducible(modulus, p):
    """Trial division by every monic polynomial of degree 1..k//2."""
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not any(_poly_rem(modulus, (*low, 1), p)):
                return False
    return True


def smallest_irreducible(p, k):
    """Lexicographically smallest monic irreducible of degree k over GF(p).

    Coefficient tuples are compared constant term first.
    """
    if k == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=k):
        candidate = (*low, 1)
        if _is_irreducible(candidate, p):
            return candidate
    raise AssertionError(f"no irreducible polynomial of degree {k} over GF({p})")


@dataclass(frozen=True)
class FieldCtx:
    """The field GF(p^k) with arithmetic on canonical elements.

    Instances are immutable and cheap to pickle, so they can be handed to
    census worker processes as-is.
    """

    p: int
    k: int
    modulus: tuple

    @property
    def q(self):
        return self.p**self.k

    @property
    def is_prime_field(self):
        return self.k == 1

    @property
    def spec(self):
        return str(self.p) if self.k == 1 else f"{self.p}^{self.k}"

    def __str__(self):
        return f"GF({self.spec})"

    # elements and indices

    @cached_property
    def elements(self):
        """All q elements, additive identity first, in index order."""
        return tuple(self.element(i) for i in range(self.q))

    def element(self, index):
        if not 0 <= index < self.q:
            raise ValueError(f"element index {index} outside 0..{self.q - 1}")
        if self.k == 1:
            return index
        return tuple((index // self.p**j) % self.p for j in range(self.k))

    def index(self, a):
        if self.k == 1:
            return a
        return sum(c * self.p**j for j, c in enumerate(a))

    @property
    def zero(self):
        return 0 if self.k == 1 else (0,) * self.k

    @property
    def one(self):
        return 1 if self.k == 1 else (1,) + (0,) * (self.k - 1)

    def from_int(self, n):
        """The element n * 1."""
        n %= self.p
        return n if self.k == 1 else (n,) + (0,) * (self.k - 1)

    def contains(self, a):
        """True when a is already a canonical element of this field."""
        if self.k == 1:
            return isinstance(a, numbers.Integral) and 0 <= a < self.p
        return (
            isinstance(a, tuple)
            and len(a) == self.k
            and all(isinstance(c, numbers.Integral) and 0 <= c < self.p for c in a)
        )

    def coerce(self, value):
        """Validate and canonicalize an int (prime field) or coefficient tuple."""
        if self.k == 1:
            if isinstance(value, (tuple, list)):
                if len(value) != 1:
                    raise MatrixParseError(f"{value!r} is not an element of {self}")
                value = value[0]
            return int(value) % self.p
        if isinstance(value, int):
            return self.from_int(value)
        value = tuple(int(c) % self.p for c in value)
        if len(value) != self.k:
            raise MatrixParseError(
                f"{value!r} needs {self.k} coefficients to be an element of {self}"
            )
        return value

    def parse_element(self, text):
        """Parse "2" or "(1,2)" into an element."""
        text = text.strip()
        try:
            if text.startswith("("):
                parts = [c for c in text.strip("()").split(",") if c.strip()]
                return self.coerce(tuple(int(c) for c in parts))
            return self.coerce(int(text))
        except ValueError as exc:
            raise MatrixParseError(f"cannot read {text!r} as an element of {self}") from exc

    def format(self, a):
        if self.k == 1:
            return str(a)
        return "(" + ",".join(str(c) for c in a) + ")"

    # arithmetic

    def is_zero(self, a):
        return a == self.zero

    def add(self, a, b):
        if self.k == 1:
            return (a + b) % self.p
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        if self.k == 1:
            return (a - b) % self.p
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        if self.k == 1:
            return -a % self.p
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        if self.k == 1:
            return a * b % self.p
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        return tuple(_poly_rem(prod, self.modulus, self.p))

    def pow(self, a, e):
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        if self.is_zero(a):
            raise DivisionByZero(f"zero has no inverse in {self}")
        if self.k == 1:
            return pow(a, -1, self.p)
        return self.pow(a, self.q - 2)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def half(self):
        """The element 1/2; only defined outside characteristic 2."""
        return self.inv(self.from_int(2))

    def frobenius(self, a):
        return self.pow(a, self.p)


@lru_cache(maxsize=None)
def field_new(p, k=1):
    """Build GF(p^k); equal (p, k) always give the same modulus and ordering."""
    if p < 2 or not isprime(p):
        raise NotPrime(f"{p} is not a prime")
    if k < 1:
        raise DegreeTooLarge(f"extension degree must be at least 1, got {k}")
    if p**k > MAX_ORDER:
        raise DegreeTooLarge(f"{p}^{k} = {p**k} exceeds the supported order {MAX_ORDER}")
    modulus = smallest_irreducible(p, k)
    logger.debug("Constructed GF(%s^%s) with modulus %s", p, k, modulus)
    return FieldCtx(p=p, k=k, modulus=modulus)


def parse_field_spec(spec):
    """Parse a field spec string "p" or "p^k"."""
    match = _FIELD_SPEC.match(str(spec))
    if not match:
        raise FieldSpecError(f"field spec must look like 'p' or 'p^k', got {spec!r}")
    p = int(match.group(1))
    k = int(match.group(2) or 1)
    return field_new(p, k)
