"""Exact rationals, p-adic valuations, and truncated p-adic arithmetic.

This is the substrate for everything else: valuations of rationals, p-adic
numbers carried as ``p^shift * unit`` with the unit known modulo ``p^N``,
Teichmuller lifts, and Hensel lifting of the unit roots of a local
polynomial.

Every value here is immutable and every function is pure, so all of it can
be shared freely between threads.  Working precision is always supplied by
the caller; there is no global precision state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# Arbitrary-precision rationals, stored in lowest terms with positive
# denominator -- exactly the guarantees fractions.Fraction provides.
ExactRational = Fraction

#: Valuation of zero.
INFINITY = math.inf

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test (exact for n < 3.3e24)."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_upto(bound: int) -> list[int]:
    """All primes p <= bound, by sieve."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for q in range(2, math.isqrt(bound) + 1):
        if sieve[q]:
            sieve[q * q :: q] = bytearray(len(sieve[q * q :: q]))
    return [q for q in range(bound + 1) if sieve[q]]


def _require_prime(p: int) -> None:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime number")


def _int_val(n: int, p: int) -> int:
    """ord_p of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val_p(x, p: int):
    """p-adic valuation of a rational.  Returns +inf for x = 0.

    For x = a/b in lowest terms this is ord_p(a) - ord_p(b).
    """
    _require_prime(p)
    x = Fraction(x)
    if x == 0:
        return INFINITY
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


@dataclass(frozen=True)
class PadicApprox:
    """A p-adic number p^shift * unit_residue known to N unit digits.

    ``unit_residue`` is either 0 (the distinguished exact-zero sentinel,
    which keeps valuation arithmetic total) or an integer in [0, p^N)
    coprime to p.  The represented value is p^shift * unit_residue, known
    modulo p^(shift+N).  ``shift`` may be negative, so quantities like
    p^s / alpha are representable.
    """

    p: int
    shift: int
    unit_residue: int
    precision: int

    def __post_init__(self):
        _require_prime(self.p)
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        modulus = self.p ** self.precision
        u = self.unit_residue % modulus
        s = self.shift
        if u == 0:
            s = 0  # canonical zero; valuation() reports +inf
        elif u % self.p == 0:
            v = _int_val(u, self.p)
            raise ValueError(
                f"unit residue {self.unit_residue} is divisible by {self.p}^{v}; "
                "fold the p-part into shift"
            )
        object.__setattr__(self, "unit_residue", u)
        object.__setattr__(self, "shift", s)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p: int, precision: int) -> "PadicApprox":
        return cls(p, 0, 0, precision)

    @classmethod
    def one(cls, p: int, precision: int) -> "PadicApprox":
        return cls(p, 0, 1, precision)

    @classmethod
    def from_rational(cls, x, p: int, precision: int) -> "PadicApprox":
        return padic_reduce(x, p, precision)

    # -- predicates and views ----------------------------------------------

    def is_zero(self) -> bool:
        return self.unit_residue == 0

    def valuation(self):
        return INFINITY if self.is_zero() else self.shift

    def at_precision(self, precision: int) -> "PadicApprox":
        """Truncate (never extend) to the given number of unit digits."""
        if precision > self.precision:
            raise ValueError(
                f"cannot extend precision {self.precision} to {precision}"
            )
        if self.is_zero():
            return PadicApprox.zero(self.p, precision)
        return PadicApprox(
            self.p, self.shift, self.unit_residue % self.p ** precision, precision
        )

    def __str__(self):
        if self.is_zero():
            return "0"
        return f"{self.p}^{self.shift} * {self.unit_residue} mod {self.p}^{self.precision}"

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicApprox):
            if other.p != self.p:
                raise ValueError(f"mixed primes {self.p} and {other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            return padic_reduce(other, self.p, self.precision)
        return None

    def __add__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self.is_zero():
            return rhs
        if rhs.is_zero():
            return self
        p = self.p
        s = min(self.shift, rhs.shift)
        abs_prec = min(self.shift + self.precision, rhs.shift + rhs.precision)
        work = abs_prec - s
        if work < 1:
            raise ValueError("no overlapping digits at these precisions")
        modulus = p ** work
        total = (
            self.unit_residue * pow(p, self.shift - s, modulus)
            + rhs.unit_residue * pow(p, rhs.shift - s, modulus)
        ) % modulus
        if total == 0:
            # indistinguishable from zero at the available precision
            return PadicApprox.zero(p, max(self.precision, rhs.precision))
        v = _int_val(total, p)
        n = work - v
        if n < 1:
            return PadicApprox.zero(p, max(self.precision, rhs.precision))
        return PadicApprox(p, s + v, (total // p ** v) % p ** n, n)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicApprox(
            self.p,
            self.shift,
            (-self.unit_residue) % self.p ** self.precision,
            self.precision,
        )

    def __sub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self.is_zero() or rhs.is_zero():
            return PadicApprox.zero(self.p, min(self.precision, rhs.precision))
        n = min(self.precision, rhs.precision)
        return PadicApprox(
            self.p,
            self.shift + rhs.shift,
            self.unit_residue * rhs.unit_residue % self.p ** n,
            n,
        )

    __rmul__ = __mul__

    def inverse(self) -> "PadicApprox":
        if self.is_zero():
            raise ZeroDivisionError("inverse of p-adic zero")
        n = self.precision
        return PadicApprox(
            self.p, -self.shift, pow(self.unit_residue, -1, self.p ** n), n
        )

    def __truediv__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self * rhs.inverse()

    def __rtruediv__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs * self.inverse()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = PadicApprox.one(self.p, self.precision)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = padic_reduce(other, self.p, self.precision)
        if not isinstance(other, PadicApprox):
            return NotImplemented
        if self.p != other.p:
            return False
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        n = min(self.precision, other.precision)
        return self.shift == other.shift and (
            self.unit_residue % self.p ** n == other.unit_residue % self.p ** n
        )

    def __hash__(self):
        return hash((self.p, self.shift, self.unit_residue))


def padic_reduce(x, p: int, precision: int) -> PadicApprox:
    """Truncate a rational to a PadicApprox with the given unit precision."""
    _require_prime(p)
    if precision < 1:
        raise ValueError("precision must be >= 1")
    x = Fraction(x)
    if x == 0:
        return PadicApprox.zero(p, precision)
    vn = _int_val(x.numerator, p)
    vd = _int_val(x.denominator, p)
    modulus = p ** precision
    num = x.numerator // p ** vn
    den = x.denominator // p ** vd
    unit = num * pow(den, -1, modulus) % modulus
    return PadicApprox(p, vn - vd, unit, precision)


def teichmuller(a: int, p: int, precision: int) -> PadicApprox:
    """Teichmuller lift: the unique (p-1)-st root of unity congruent to a mod p.

    Computed as the fixed point of x -> x^p, which gains at least one digit
    per step.  p = 2 is rejected: the measure and character paths here only
    use odd p, where (Z/p)^x supplies the torsion.
    """
    _require_prime(p)
    if p == 2:
        raise ValueError("p = 2 is not supported on the Teichmuller path")
    if a % p == 0:
        raise ValueError(f"{a} is not a unit mod {p}")
    modulus = p ** precision
    w = a % modulus
    for _ in range(precision):
        nxt = pow(w, p, modulus)
        if nxt == w:
            break
        w = nxt
    return PadicApprox(p, 0, w, precision)


def _poly_eval_mod(coeffs_desc: list[int], y: int, modulus: int) -> int:
    acc = 0
    for c in coeffs_desc:
        acc = (acc * y + c) % modulus
    return acc


def hensel_unit_roots(
    poly: list[PadicApprox], p: int, precision: int
) -> list[PadicApprox]:
    """Unit inverse roots of 1 + A_1 X + ... + A_d X^d, Hensel-lifted.

    The inverse roots alpha are the solutions of sum_i A_i alpha^(d-i) = 0;
    this returns those of valuation 0, each required to be simple modulo p,
    lifted to the requested precision by Newton iteration.  Returns an empty
    list when no unit root exists; raises on a repeated slope-0 root.

    Coefficients of negative valuation are allowed (the whole polynomial is
    scaled by a power of p first, which does not move the roots).
    """
    _require_prime(p)
    if not poly:
        raise ValueError("empty coefficient list")
    for a in poly:
        if a.p != p:
            raise ValueError(f"coefficient prime {a.p} does not match {p}")
        if a.precision < precision:
            raise ValueError(
                f"coefficient precision {a.precision} below requested {precision}"
            )
    if poly[0] != PadicApprox.one(p, poly[0].precision):
        raise ValueError("constant coefficient must be 1")
    d = len(poly) - 1
    if d == 0:
        return []
    # Clear denominators of p: multiplying through by p^-v keeps the roots.
    v = min(a.shift for a in poly if not a.is_zero())
    modulus = p ** precision
    # R(Y) = sum_i A_i Y^(d-i), coefficients listed for Y^d first.
    r_desc = []
    for a in poly:
        if a.is_zero():
            r_desc.append(0)
        else:
            r_desc.append(a.unit_residue * pow(p, a.shift - v, modulus) % modulus)
    rp_desc = [c * (d - i) % modulus for i, c in enumerate(r_desc[:-1])]

    roots = []
    for a0 in range(1, p):
        if _poly_eval_mod(r_desc, a0, p) != 0:
            continue
        if _poly_eval_mod(rp_desc, a0, p) == 0:
            raise ValueError("non-simple slope-0 segment")
        y = a0
        for _ in range(precision.bit_length() + 2):
            fy = _poly_eval_mod(r_desc, y, modulus)
            if fy == 0:
                break
            dy = _poly_eval_mod(rp_desc, y, modulus)
            y = (y - fy * pow(dy, -1, modulus)) % modulus
        roots.append(PadicApprox(p, 0, y, precision))
    return sorted(roots, key=lambda r: r.unit_residue)
