"""Exact scalar arithmetic: rationals and cyclotomic fields Q(zeta_N).

Every quantity in this package is an element of Q(zeta_N) for a fixed N,
represented as the unique residue modulo the N-th cyclotomic polynomial
Phi_N.  The representation has exactly euler_phi(N) rational coefficients,
so equality is coefficient-wise and therefore decidable.  N = 1 degenerates
to plain rationals.

No floating point is used anywhere; all identities checked by this package
are exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd


class OrderMismatch(ValueError):
    """Raised when scalars from different cyclotomic fields are combined."""


class DivisionByZero(ZeroDivisionError):
    """Raised when inverting the zero scalar."""


def euler_phi(n: int) -> int:
    """Euler totient, by direct factorization (n is small here)."""
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Exact division of integer polynomials, den monic. Coefficients low to high."""
    num = list(num)
    quot = [0] * (len(num) - len(den) + 1)
    for k in range(len(quot) - 1, -1, -1):
        c = num[k + len(den) - 1]
        quot[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients (low to high) of the N-th cyclotomic polynomial Phi_N.

    Computed by dividing x^n - 1 by the product of Phi_d over proper
    divisors d of n.  deg Phi_n = euler_phi(n).
    """
    if n < 1:
        raise ValueError("cyclotomic order must be >= 1")
    if n == 1:
        return (-1, 1)
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod_int(num, list(cyclotomic_polynomial(d)))
            assert rem == [0], "cyclotomic division must be exact"
    return tuple(num)


@lru_cache(maxsize=None)
def _reduction_table(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """x^k reduced mod Phi_n for k = phi .. 2*phi-2, as coefficient tuples."""
    phi = euler_phi(n)
    poly = cyclotomic_polynomial(n)
    # x^phi = -(c_0 + c_1 x + ... + c_{phi-1} x^{phi-1}), Phi_n is monic
    base = [Fraction(-c) for c in poly[:phi]]
    table = [tuple(base)]
    cur = base
    for _ in range(phi - 2):
        shifted = [Fraction(0)] + cur[:-1]
        top = cur[-1]
        if top:
            shifted = [shifted[i] + top * base[i] for i in range(phi)]
        table.append(tuple(shifted))
        cur = list(table[-1])
    return tuple(table)


def _reduce_coeffs(n: int, coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    phi = euler_phi(n)
    if len(coeffs) <= phi:
        return tuple(coeffs) + (Fraction(0),) * (phi - len(coeffs))
    table = _reduction_table(n)
    out = list(coeffs[:phi])
    for k in range(phi, len(coeffs)):
        c = coeffs[k]
        if c:
            row = table[k - phi]
            for i in range(phi):
                out[i] += c * row[i]
    return tuple(out)


class Cyclo:
    """An element of Q(zeta_N), immutable and hashable.

    coeffs has length euler_phi(N) and represents the residue
    sum(coeffs[i] * zeta^i) modulo Phi_N(zeta).
    """

    __slots__ = ("order", "coeffs", "_hash")

    def __init__(self, order: int, coeffs):
        self.order = order
        phi = euler_phi(order)
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        if len(cs) != phi:
            raise ValueError(f"need {phi} coefficients for order {order}, got {len(cs)}")
        self.coeffs = tuple(cs)
        self._hash = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rational(order: int, value) -> "Cyclo":
        phi = euler_phi(order)
        v = value if isinstance(value, Fraction) else Fraction(value)
        return Cyclo(order, (v,) + (Fraction(0),) * (phi - 1))

    @staticmethod
    def zero(order: int) -> "Cyclo":
        return Cyclo.from_rational(order, 0)

    @staticmethod
    def one(order: int) -> "Cyclo":
        return Cyclo.from_rational(order, 1)

    @staticmethod
    def root(order: int, power: int = 1) -> "Cyclo":
        """zeta_N^power, reduced."""
        k = power % order
        coeffs = [Fraction(0)] * (k + 1)
        coeffs[k] = Fraction(1)
        return Cyclo(order, _reduce_coeffs(order, coeffs))

    # -- helpers -------------------------------------------------------

    def _check(self, other: "Cyclo") -> None:
        if self.order != other.order:
            raise OrderMismatch(
                f"cannot mix cyclotomic orders {self.order} and {other.order}"
            )

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(self.order, other)
        self._check(other)
        return Cyclo(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        other = _coerce(self.order, other)
        self._check(other)
        return Cyclo(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Cyclo(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        other = _coerce(self.order, other)
        self._check(other)
        a, b = self.coeffs, other.coeffs
        phi = len(a)
        prod = [Fraction(0)] * (2 * phi - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        return Cyclo(self.order, _reduce_coeffs(self.order, prod))

    __radd__ = __add__
    __rmul__ = __mul__

    def __rsub__(self, other):
        return _coerce(self.order, other) - self

    def inv(self) -> "Cyclo":
        """Multiplicative inverse, by extended Euclid against Phi_N."""
        if self.is_zero():
            raise DivisionByZero("cannot invert zero")
        if self.is_rational():
            return Cyclo.from_rational(self.order, 1 / self.coeffs[0])
        phi_poly = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        r0, r1 = phi_poly, list(self.coeffs)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while any(c != 0 for c in r1):
            q, r = _poly_divmod_frac(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        # r0 is the gcd; Phi_N is not irreducible-checked here but the gcd of a
        # nonzero residue with Phi_N in Q[x] is a nonzero constant.
        if len(r0) != 1:
            raise DivisionByZero("non-invertible residue (order not squarefree-consistent)")
        c = r0[0]
        return Cyclo(self.order, _reduce_coeffs(self.order, [x / c for x in s0]))

    def __truediv__(self, other):
        other = _coerce(self.order, other)
        return self * other.inv()

    def __rtruediv__(self, other):
        return _coerce(self.order, other) * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result = Cyclo.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- equality ------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, Cyclo):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.order, self.coeffs))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- text form -----------------------------------------------------

    def __repr__(self):
        return f"Cyclo({self.order}, {self.to_string()!r})"

    def __str__(self):
        return self.to_string()

    def to_string(self) -> str:
        """Canonical form: comma-joined rational coefficients, "p/q" or "p"."""
        return ",".join(_frac_str(c) for c in self.coeffs)

    @staticmethod
    def parse(order: int, text: str) -> "Cyclo":
        parts = [p.strip() for p in text.strip().rstrip(",").split(",")]
        return Cyclo(order, [Fraction(p) for p in parts])


def _coerce(order: int, value) -> Cyclo:
    if isinstance(value, Cyclo):
        return value
    if isinstance(value, (int, Fraction)):
        return Cyclo.from_rational(order, value)
    raise TypeError(f"cannot coerce {type(value)!r} into Q(zeta_{order})")


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _poly_divmod_frac(num, den):
    num = list(num)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    den = list(den)
    while len(den) > 1 and den[-1] == 0:
        den.pop()
    if len(num) < len(den):
        return [Fraction(0)], num
    quot = [Fraction(0)] * (len(num) - len(den) + 1)
    lead = den[-1]
    for k in range(len(quot) - 1, -1, -1):
        c = num[k + len(den) - 1] / lead
        quot[k] = c
        if c:
            for i, d in enumerate(den):
                num[k + i] -= c * d
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return quot, num


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    out = [x - y for x, y in zip(a, b)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


class FieldDescriptor:
    """The coefficient field of an algebra: Q if order == 1, else Q(zeta_N).

    All tensors of one algebra share one descriptor; scalars of different
    orders never mix implicitly.
    """

    __slots__ = ("order",)

    def __init__(self, order: int = 1):
        if order < 1:
            raise ValueError("order must be positive")
        self.order = order

    @property
    def kind(self) -> str:
        return "rational" if self.order == 1 else f"cyclotomic({self.order})"

    def zero(self) -> Cyclo:
        return Cyclo.zero(self.order)

    def one(self) -> Cyclo:
        return Cyclo.one(self.order)

    def scalar(self, value) -> Cyclo:
        return _coerce(self.order, value)

    def root(self, power: int = 1) -> Cyclo:
        return Cyclo.root(self.order, power)

    def __eq__(self, other):
        return isinstance(other, FieldDescriptor) and self.order == other.order

    def __hash__(self):
        return hash(("FieldDescriptor", self.order))

    def __repr__(self):
        return f"FieldDescriptor({self.order})"


def scalar_arithmetic(a: Cyclo, b: Cyclo, op: str) -> Cyclo:
    """Named entry point for add/sub/mul, kept for the file-format layer."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def scalar_invert(a: Cyclo) -> Cyclo:
    return a.inv()
