"""Closed forms and bound recursions as exact integer polynomials in q.

Every count here is a polynomial in the field order q with integer
coefficients, so it is kept symbolically as an :class:`IntPoly` and only
evaluated at the end.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

from sympy import integer_nthroot, primefactors

from .exceptions import RankOutOfRange

logger = logging.getLogger(__name__)

MAX_THRESHOLD_N = 20

# Published (i, q) crossover rows, used to flag disagreements.
REFERENCE_THRESHOLDS = {
    3: (2, 3),
    4: (43, 43),
    5: (76, 79),
    6: (116, 121),
    7: (164, 167),
    8: (221, 223),
    9: (287, 289),
    10: (362, 367),
    11: (446, 449),
    12: (538, 541),
    13: (640, 641),
    14: (750, 751),
    15: (869, 877),
    16: (996, 997),
    17: (1133, 1151),
    18: (1278, 1279),
    19: (1433, 1433),
    20: (1596, 1597),
}


class IntPoly:
    """Dense polynomial in q, coefficients lowest degree first.

    The zero polynomial has no coefficients and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        coeffs = [int(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coeffs = tuple(coeffs)

    @classmethod
    def monomial(cls, degree, coeff=1):
        return cls([0] * degree + [coeff])

    @classmethod
    def promote(cls, value):
        return value if isinstance(value, IntPoly) else cls([value])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def coeff(self, degree):
        return self.coeffs[degree] if 0 <= degree < len(self.coeffs) else 0

    def to_list(self):
        return list(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly([other])
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __add__(self, other):
        other = IntPoly.promote(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self.coeff(d) + other.coeff(d) for d in range(size))

    __radd__ = __add__

    def __sub__(self, other):
        return self + -IntPoly.promote(other)

    def __rsub__(self, other):
        return IntPoly.promote(other) - self

    def __mul__(self, other):
        other = IntPoly.promote(other)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        result = IntPoly([1])
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __call__(self, x):
        """Exact evaluation by Horner's rule."""
        total = 0
        for c in reversed(self.coeffs):
            total = total * x + c
        return total

    def compose(self, inner):
        inner = IntPoly.promote(inner)
        result = IntPoly()
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def shift(self, t):
        """The polynomial p(q + t), by repeated synthetic division."""
        a = list(self.coeffs)
        d = len(a) - 1
        for i in range(d):
            for j in range(d - 1, i - 1, -1):
                a[j] += t * a[j + 1]
        return IntPoly(a)

    def sign_changes(self):
        signs = [c > 0 for c in self.coeffs if c]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for d in range(self.degree, -1, -1):
            c = self.coeffs[d]
            if not c:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if d == 0:
                body = str(mag)
            else:
                power = "q" if d == 1 else f"q^{d}"
                body = power if mag == 1 else f"{mag}*{power}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


Q = IntPoly([0, 1])


def q_pow(e):
    return IntPoly.monomial(e)


def binomial_power(a, e):
    """(q + a)^e expanded term by term with the binomial theorem."""
    return IntPoly(comb(e, j) * a ** (e - j) for j in range(e + 1))


@lru_cache(maxsize=None)
def poly_Dn(n):
    """Number of n x n matrices with zero determinant."""
    invertible = q_pow(n * (n - 1) // 2)
    for j in range(1, n + 1):
        invertible = invertible * (q_pow(j) - 1)
    return q_pow(n * n) - invertible


@lru_cache(maxsize=None)
def poly_det_value(n):
    """Number of n x n matrices with det A = alpha, for any fixed alpha != 0."""
    count = q_pow(n * (n - 1) // 2)
    for j in range(2, n + 1):
        count = count * (q_pow(j) - 1)
    return count


@lru_cache(maxsize=None)
def poly_P3():
    """Number of 3 x 3 matrices with zero permanent (odd characteristic)."""
    return poly_Dn(3) - q_pow(2) * binomial_power(-1, 5)


def poly_P_exact(n):
    """|P_n| for the sizes where it is known in closed form (n <= 3)."""
    if n == 1:
        return IntPoly([1])
    if n == 2:
        return IntPoly([0, -1, 1, 1])
    if n == 3:
        return poly_P3()
    raise ValueError(f"no closed form for |P_{n}|")


@lru_cache(maxsize=None)
def poly_Vrk(k, r):
    """Pairs (x, y) in F^k x F^k with x^tr A y = 0 for a rank-r matrix A."""
    if not 0 <= r <= k:
        raise RankOutOfRange(f"rank {r} is outside 0..{k}")
    if r == 0:
        return q_pow(2 * k)
    return q_pow(2 * (k - r)) * ((q_pow(r) - 1) * q_pow(r - 1) + q_pow(r))


def poly_split3():
    """Closed forms for the a33 / A11 decomposition of D_3 and P_3."""
    q1 = binomial_power(-1, 1)
    d_block_singular = q_pow(5) * q1 * (2 * Q - 1)
    d_block_regular = q_pow(6) * q1 * q1
    d_corner_zero = poly_Dn(3) - d_block_singular - d_block_regular
    p_block_zero = q_pow(5) * q1 * q1 + q_pow(2) * q1 * (q_pow(4) - binomial_power(-1, 4))
    return {
        "D'": d_block_singular,
        "D''": d_block_regular,
        "D'''": d_corner_zero,
        "P'": p_block_zero,
        "P''": d_block_regular,
        "P'''": d_corner_zero,
    }


@dataclass(frozen=True)
class BoundSet:
    """Lower/upper bounds for |P_n| and the auxiliary N^(0), N^(1) bounds.

    N0 and N1 bound |N^(0)_(n-1)| and |N^(1)_(n-1)|; they are None where the
    recursion does not define them.
    """

    n: int
    L: IntPoly
    U: IntPoly
    N0: IntPoly = None
    N1: IntPoly = None


@lru_cache(maxsize=None)
def _n0(m):
    """Upper bound for |N^(0)_m|, m >= 2."""
    if m == 2:
        return IntPoly([1])
    n = m + 1
    total = IntPoly([1])
    for k in range(1, n - 2):
        s = n - k - 2
        total = total + comb(n - 1, s) ** 2 * q_pow(2 * s * (k + 1)) * (
            q_pow(s * s) - bound_set(s).L
        )
    return total


def _n1(m):
    """Upper bound for |N^(1)_m|, m >= 3."""
    n = m + 1
    e = (n - 1) ** 2 - 1
    return (
        (q_pow(e) - binomial_power(-3, e))
        + _n0(n - 2) * q_pow(2 * (n - 2) + 1)
        + Q * bound_set(n - 2).U * poly_Vrk(n - 2, 1)
    )


@lru_cache(maxsize=None)
def bound_set(n):
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return BoundSet(1, IntPoly(), IntPoly([1]))
    if n == 2:
        return BoundSet(2, IntPoly(), poly_P_exact(2))
    if n == 3:
        return BoundSet(3, poly_P3(), poly_P3(), N0=_n0(2))
    prev = bound_set(n - 1)
    block = q_pow((n - 1) ** 2)
    spread = q_pow(2 * (n - 1))
    n0 = _n0(n - 1)
    n1 = _n1(n - 1)
    lower = (block - prev.U) * spread
    upper = (
        (block - prev.L) * spread
        + Q * n0 * poly_Vrk(n - 1, 0)
        + Q * n1 * poly_Vrk(n - 1, 1)
        + Q * prev.U * poly_Vrk(n - 1, 2)
    )
    return BoundSet(n, lower, upper, N0=n0, N1=n1)


def build_bounds(n_max):
    """Bound sets for n = 1..n_max, built in dependency order."""
    return [bound_set(n) for n in range(1, n_max + 1)]


@dataclass
class AsymptoticReport:
    kind: str
    n: int
    passed: bool
    failures: list = field(default_factory=list)


_EXPECTED_TOP = {
    "U": (1, 0),
    "L": (1, -1),
    "D": (1, 1, 0, 0),
}


def asymptotic_check(P, n, kind):
    """Degree and top coefficients of L_n, U_n or |D_n| (meaningful for n >= 4)."""
    top = n * n - 1
    failures = []
    if P.degree != top:
        failures.append(f"degree {P.degree}, expected {top}")
    for offset, expected in enumerate(_EXPECTED_TOP[kind]):
        got = P.coeff(top - offset)
        if got != expected:
            failures.append(f"coefficient of q^{top - offset} is {got}, expected {expected}")
    return AsymptoticReport(kind=kind, n=n, passed=not failures, failures=failures)


def is_prime_power(m):
    return m >= 2 and len(primefactors(m)) == 1


def next_prime_power(m, odd=True):
    """Least prime power >= m, of odd characteristic unless odd=False."""
    x = max(m, 2)
    while True:
        if is_prime_power(x) and not (odd and x % 2 == 0):
            return x
        x += 1


def next_odd_prime_power(m):
    return next_prime_power(m, odd=True)


def root_bound(P):
    """Fujiwara's bound: every real root of P is below the returned integer."""
    lead = abs(P.leading)
    d = P.degree
    best = 0
    for k in range(1, d + 1):
        a = abs(P.coeff(d - k))
        if not a:
            continue
        ratio = -(-a // lead)
        root, exact = integer_nthroot(ratio, k)
        best = max(best, root if exact else root + 1)
    return 2 * best + 1


@dataclass(frozen=True)
class ThresholdRow:
    """n, the crossover i, and the least admissible field order q.

    i is one past the last integer j where U_n(j) >= |D_n|(j), so the strict
    inequality holds for every q >= i. q is the least odd-characteristic
    prime power >= i; q_any drops the odd-characteristic requirement.
    """

    n: int
    i: int
    q: int
    q_any: int
    scan_bound: int


def find_threshold(n):
    """Locate where the upper bound drops strictly below |D_n| for good.

    Integers are scanned upward. Whenever the difference is positive just past
    a failure, and again at doubling checkpoints, Descartes' rule on the
    shifted difference is tried; zero sign changes prove there is no later
    root. Fujiwara's root bound caps the scan.
    """
    if not 3 <= n <= MAX_THRESHOLD_N:
        raise ValueError(f"threshold rows are computed for 3 <= n <= {MAX_THRESHOLD_N}")
    diff = poly_Dn(n) - bound_set(n).U
    if diff.leading <= 0:
        raise ValueError(f"|D_{n}| - U_{n} does not tend to +infinity")
    cap = root_bound(diff)
    last_failure = 0
    checkpoint = 1
    j = 1
    while j <= cap:
        if diff(j) <= 0:
            last_failure = j
        elif j == last_failure + 1 or j >= checkpoint:
            if diff.shift(j).sign_changes() == 0:
                break
            checkpoint = 2 * j
        j += 1
    i = last_failure + 1
    logger.info("Threshold n=%s: i=%s (certified at %s, root bound %s)", n, i, j, cap)
    return ThresholdRow(
        n=n,
        i=i,
        q=next_odd_prime_power(i),
        q_any=next_prime_power(i, odd=False),
        scan_bound=cap,
    )


def bounds_at(n, q):
    """(L_n(q), U_n(q)) as integers."""
    bounds = bound_set(n)
    return bounds.L(q), bounds.U(q)


def prob_det_exact(n, q, alpha_is_zero):
    """Exact probability that det A equals 0, or a given nonzero alpha."""
    total = q ** (n * n)
    count = poly_Dn(n)(q) if alpha_is_zero else poly_det_value(n)(q)
    return Fraction(count, total)


def per_value_bounds(n, q):
    """Bounds on P(per A = 0) and P(per A = alpha), alpha != 0.

    Returns {"zero": (lo, hi), "nonzero": (lo, hi)} as Fractions. In
    characteristic 2 the permanent is the determinant and both pairs are
    exact; in odd characteristic they are exact for n <= 3. For n >= 4 the
    L_n/U_n bounds hold only for odd q > 3, so None is returned otherwise.
    """
    total = q ** (n * n)
    if q % 2 == 0:
        zero = prob_det_exact(n, q, alpha_is_zero=True)
        nonzero = prob_det_exact(n, q, alpha_is_zero=False)
        return {"zero": (zero, zero), "nonzero": (nonzero, nonzero)}
    if n <= 3:
        lower = upper = poly_P_exact(n)(q)
    elif q > 3:
        lower, upper = bounds_at(n, q)
    else:
        return None
    return {
        "zero": (Fraction(lower, total), Fraction(upper, total)),
        "nonzero": (
            Fraction(total - upper, (q - 1) * total),
            Fraction(total - lower, (q - 1) * total),
        ),
    }
