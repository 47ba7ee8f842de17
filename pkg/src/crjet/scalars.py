"""Exact scalar arithmetic: Gaussian rationals and polynomials in n over them.

Two coefficient rings are used throughout the package:

* ``ExactComplex`` -- a + bi with arbitrary-precision rational a, b.
* ``NPoly`` -- univariate polynomials in a real indeterminate ``n`` with
  ``ExactComplex`` coefficients (conjugation fixes n and conjugates the
  coefficients).

Everything is immutable value semantics; no rounding ever happens.
"""

from __future__ import annotations

import math
from fractions import Fraction


class ScalarError(ArithmeticError):
    pass


def _to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def rational_str(q: Fraction) -> str:
    """Render ``p/q`` (or just ``p`` when the denominator is 1)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class ExactComplex:
    """Gaussian rational re + im*i, exact in both components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _to_fraction(re))
        object.__setattr__(self, "im", _to_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ExactComplex is immutable")

    # -- construction helpers -------------------------------------------------
    @classmethod
    def coerce(cls, x) -> "ExactComplex":
        if isinstance(x, ExactComplex):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot coerce {x!r} to ExactComplex")

    # -- predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    # -- ring operations -------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, NPoly):
            return NotImplemented
        other = ExactComplex.coerce(other)
        return ExactComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, NPoly):
            return NotImplemented
        other = ExactComplex.coerce(other)
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ExactComplex.coerce(other) - self

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, NPoly):
            return NotImplemented
        other = ExactComplex.coerce(other)
        return ExactComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "ExactComplex":
        if self.is_zero():
            raise ScalarError(f"division by zero ExactComplex {self!r}")
        n2 = self.re * self.re + self.im * self.im
        return ExactComplex(self.re / n2, -self.im / n2)

    def __truediv__(self, other):
        return self * ExactComplex.coerce(other).inverse()

    def __rtruediv__(self, other):
        return ExactComplex.coerce(other) * self.inverse()

    def conj(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def norm_sq(self) -> Fraction:
        """|self|^2, always a nonnegative rational."""
        return self.re * self.re + self.im * self.im

    # -- comparisons / hashing -------------------------------------------------
    def __eq__(self, other):
        try:
            other = ExactComplex.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"ExactComplex({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return rational_str(self.re)
        if self.re == 0:
            return f"{rational_str(self.im)}*i"
        return f"({rational_str(self.re)} + {rational_str(self.im)}*i)"


EC_ZERO = ExactComplex(0)
EC_ONE = ExactComplex(1)
EC_I = ExactComplex(0, 1)


class NPoly:
    """Polynomial in the indeterminate n over ExactComplex.

    Stored as a coefficient tuple indexed by the power of n, with no trailing
    zeros.  n models the nonnegative-integer order parameter of the Upsilon
    family, so conjugation keeps n fixed and conjugates coefficients.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients=()):
        coeffs = [ExactComplex.coerce(c) for c in coefficients]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("NPoly is immutable")

    # -- construction helpers -------------------------------------------------
    @classmethod
    def const(cls, c) -> "NPoly":
        return cls((ExactComplex.coerce(c),))

    @classmethod
    def n(cls) -> "NPoly":
        return cls((EC_ZERO, EC_ONE))

    @classmethod
    def coerce(cls, x) -> "NPoly":
        if isinstance(x, NPoly):
            return x
        return cls.const(ExactComplex.coerce(x))

    # -- structure -------------------------------------------------------------
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coefficients)

    def leading(self) -> ExactComplex:
        if self.is_zero():
            raise ScalarError("zero polynomial has no leading coefficient")
        return self.coefficients[-1]

    # -- ring operations -------------------------------------------------------
    def __add__(self, other):
        other = NPoly.coerce(other)
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] = out[k] + c
        return NPoly(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-NPoly.coerce(other))

    def __rsub__(self, other):
        return NPoly.coerce(other) + (-self)

    def __neg__(self):
        return NPoly(tuple(-c for c in self.coefficients))

    def __mul__(self, other):
        other = NPoly.coerce(other)
        if self.is_zero() or other.is_zero():
            return NPoly()
        out = [EC_ZERO] * (len(self.coefficients) + len(other.coefficients) - 1)
        for j, a in enumerate(self.coefficients):
            if a.is_zero():
                continue
            for k, b in enumerate(other.coefficients):
                out[j + k] = out[j + k] + a * b
        return NPoly(out)

    __rmul__ = __mul__

    def inverse(self) -> "NPoly":
        """Inverse of a unit (nonzero degree-0 polynomial)."""
        if self.degree() != 0:
            raise ScalarError(f"NPoly {self} is not a unit (degree != 0)")
        return NPoly((self.coefficients[0].inverse(),))

    def __truediv__(self, other):
        return self * NPoly.coerce(other).inverse()

    def conj(self) -> "NPoly":
        return NPoly(tuple(c.conj() for c in self.coefficients))

    def __call__(self, n0) -> ExactComplex:
        """Evaluate at an integer (or rational) n0 by Horner's scheme."""
        acc = EC_ZERO
        x = ExactComplex.coerce(n0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    # -- comparisons / hashing -------------------------------------------------
    def __eq__(self, other):
        try:
            other = NPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"NPoly({list(self.coefficients)!r})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k, c in enumerate(self.coefficients):
            if c.is_zero():
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"{c}*n")
            else:
                parts.append(f"{c}*n^{k}")
        return " + ".join(parts)


def falling_binomial(k: int) -> NPoly:
    """binom(n, k) = n(n-1)...(n-k+1)/k! as a polynomial in n."""
    p = NPoly.const(1)
    for j in range(k):
        p = p * (NPoly.n() - NPoly.const(j))
    return p * NPoly.const(Fraction(1, _factorial(k)))


def rising_binomial(k: int) -> NPoly:
    """binom(n+k-1, k) = (n+k-1)...(n)/k! as a polynomial in n."""
    p = NPoly.const(1)
    for j in range(k):
        p = p * (NPoly.n() + NPoly.const(j))
    return p * NPoly.const(Fraction(1, _factorial(k)))


def factorial(k: int) -> int:
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


_factorial = factorial


def integer_roots(p: NPoly) -> set[int]:
    """All nonnegative integer roots of p.

    Every root x of p satisfies |x| <= 1 + max_i |c_i| / |c_d| (Cauchy bound);
    we bound |c_i| above by |re| + |im| and |c_d| below by max(|re|, |im|),
    which keeps the bound rational and safe.  The bound can be large when the
    coefficients are, so candidates are screened first by the rational root
    test (a nonzero root divides the trailing coefficient once denominators
    are cleared) and by evaluation modulo a word-sized prime; the few
    survivors are confirmed with exact arithmetic.
    """
    if p.is_zero():
        raise ScalarError("zero polynomial has all roots")
    if p.degree() == 0:
        return set()
    lead = p.leading()
    lead_low = max(abs(lead.re), abs(lead.im))
    top = max(abs(c.re) + abs(c.im) for c in p.coefficients[:-1])
    bound = math.floor(1 + top / lead_low)

    roots = set()
    if p(0).is_zero():
        roots.add(0)

    # integer polynomials for the real and imaginary parts
    den = 1
    for c in p.coefficients:
        den = math.lcm(den, c.re.denominator, c.im.denominator)
    re_c = [int(c.re * den) for c in p.coefficients]
    im_c = [int(c.im * den) for c in p.coefficients]
    low = min(k for k in range(len(re_c)) if re_c[k] or im_c[k])
    re_c, im_c = re_c[low:], im_c[low:]   # strip the n^low factor
    trailing = math.gcd(re_c[0], im_c[0])

    prime = (1 << 61) - 1
    re_mod = [c % prime for c in reversed(re_c)]
    im_mod = [c % prime for c in reversed(im_c)]
    for n0 in range(1, bound + 1):
        if trailing % n0:
            continue
        acc = 0
        for c in re_mod:
            acc = (acc * n0 + c) % prime
        if acc:
            continue
        acc = 0
        for c in im_mod:
            acc = (acc * n0 + c) % prime
        if acc:
            continue
        if p(n0).is_zero():
            roots.add(n0)
    return roots


def rational_nth_root(q: Fraction, k: int) -> Fraction | None:
    """Exact k-th root of a positive rational, or None when irrational."""
    if q <= 0:
        raise ScalarError(f"nth root of non-positive rational {q}")
    num = _int_nth_root(q.numerator, k)
    den = _int_nth_root(q.denominator, k)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_nth_root(m: int, k: int) -> int | None:
    if m == 0:
        return 0
    lo, hi = 1, 1
    while hi**k < m:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**k < m:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo**k == m else None
