"""Regularized zeta values, Kummer congruences, Mazur measures, Iwasawa series.

The c-regularized value at -k is (1 - p^k)(1 - c^(k+1)) zeta(-k), an exact
p-integral rational.  Its twisted-moment extension
(1 - chi(p) p^k)(1 - chi(c) c^(k+1)) L(-k, chi) serves as the definition of
the moments of the regularizing measure on the units; ball measures are then
recovered from the order-0 moments by character orthogonality, and the
measure's binomial-coefficient transform yields an element of the
one-variable Iwasawa algebra to which a weight can be specialized via
1 + T -> (1 + p)^(k-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd

from .arith import INFINITY, PadicApprox, _int_val, _require_prime, padic_reduce, val_p
from .bernoulli import zeta_neg
from .characters import (
    CyclotomicNumber,
    DirichletCharacter,
    characters_mod,
    conductor,
    dirichlet_L_neg,
    evaluate,
    euler_phi,
    primitive_character,
)


def _require_regulator(c: int, p: int) -> None:
    if not isinstance(c, int) or c <= 1:
        raise ValueError("c must be an integer > 1")
    if gcd(c, p) != 1:
        raise ValueError(f"c = {c} must be prime to p = {p}")


def regularized_zeta(k: int, c: int, p: int) -> Fraction:
    """(1 - p^k)(1 - c^(k+1)) zeta(-k): exact and p-integral."""
    _require_prime(p)
    _require_regulator(c, p)
    if k < 0:
        raise ValueError("k must be >= 0")
    return (1 - Fraction(p) ** k) * (1 - Fraction(c) ** (k + 1)) * zeta_neg(k)


@dataclass(frozen=True)
class KummerCheckReport:
    p: int
    c: int
    m: int
    precondition_holds: bool
    congruence_holds: bool
    attained_valuation: float  # int, or math.inf for an exactly zero sum
    total: Fraction

    def to_json_dict(self) -> dict:
        v = self.attained_valuation
        return {
            "p": self.p,
            "c": self.c,
            "m": self.m,
            "precondition_holds": self.precondition_holds,
            "congruence_holds": self.congruence_holds,
            "attained_valuation": "inf" if math.isinf(v) else int(v),
            "sum": f"{self.total.numerator}/{self.total.denominator}",
        }


def kummer_check(coeffs, c: int, p: int, m: int) -> KummerCheckReport:
    """Check the classical congruence for h(x) = sum_i alpha_i x^i.

    precondition: h(x) lies in p^m Z_p for every x (verified exhaustively on
    residues mod p^m, which is equivalent);
    conclusion:   sum_i alpha_i * zeta_reg(-i) lies in p^m Z_p.

    Both outcomes and the exact attained valuation are reported; nothing is
    raised for a failing check, and non-p-integral coefficients simply fail
    the precondition.
    """
    _require_prime(p)
    _require_regulator(c, p)
    if m < 0:
        raise ValueError("target power m must be >= 0")
    alphas = [Fraction(a) for a in coeffs]
    integral = all(val_p(a, p) >= 0 for a in alphas)

    precondition = integral
    if integral and m > 0:
        modulus = p ** m
        residues = [
            a.numerator * pow(a.denominator, -1, modulus) % modulus for a in alphas
        ]
        for x in range(modulus):
            acc = 0
            for r in reversed(residues):
                acc = (acc * x + r) % modulus
            if acc:
                precondition = False
                break

    total = sum(
        (a * regularized_zeta(i, c, p) for i, a in enumerate(alphas) if a),
        start=Fraction(0),
    )
    attained = val_p(total, p)
    return KummerCheckReport(
        p=p,
        c=c,
        m=m,
        precondition_holds=precondition,
        congruence_holds=attained >= m,
        attained_valuation=attained,
        total=total,
    )


@lru_cache(maxsize=None)
def mazur_moment(
    chi: DirichletCharacter, k: int, c: int, p: int
) -> CyclotomicNumber:
    """Twisted moment (1 - chi(p) p^k)(1 - chi(c) c^(k+1)) L(-k, chi).

    chi must have p-power conductor (1 counts); it is evaluated through its
    primitive character, so the trivial character of any modulus gives back
    the regularized zeta value.
    """
    _require_prime(p)
    _require_regulator(c, p)
    if k < 0:
        raise ValueError("k must be >= 0")
    f = conductor(chi)
    if f != 1:
        r = _int_val(f, p)
        if r == 0 or f != p ** r:
            raise ValueError(f"conductor {f} is not a power of {p}")
    psi = primitive_character(chi)
    euler_p = 1 - evaluate(psi, p) * Fraction(p) ** k
    euler_c = 1 - evaluate(psi, c) * Fraction(c) ** (k + 1)
    return euler_p * euler_c * dirichlet_L_neg(k, psi)


def measure_of_ball(a: int, r: int, c: int, p: int) -> Fraction:
    """Measure of the ball a + p^r Z_p inside the units.

    Recovered from the order-0 twisted moments by character orthogonality:
    phi(p^r)^(-1) sum_chi chibar(a) moment(chi, 0).  The imaginary parts
    cancel exactly and the result is a p-integral rational.
    """
    _require_prime(p)
    if p == 2:
        raise ValueError("p = 2 is not supported on the measure path")
    _require_regulator(c, p)
    if r < 1:
        raise ValueError("level r must be >= 1")
    if gcd(a, p) != 1:
        raise ValueError(f"{a} is not a unit mod {p}")
    q = p ** r
    a_inv = pow(a, -1, q)
    total = CyclotomicNumber.zero()
    for chi in characters_mod(q):
        total = total + evaluate(chi, a_inv) * mazur_moment(chi, 0, c, p)
    return (total / euler_phi(q)).as_rational()


# -- truncated Iwasawa-algebra elements ---------------------------------------


@dataclass(frozen=True)
class TruncatedPowerSeries:
    """Power series in one variable, kept to finite degree and precision."""

    coeffs: tuple[PadicApprox, ...]
    precision: int
    variable: str = "T"

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("need at least the constant coefficient")
        p = self.coeffs[0].p
        normalized = []
        for c in self.coeffs:
            if c.p != p:
                raise ValueError("mixed primes in coefficient vector")
            normalized.append(c.at_precision(min(self.precision, c.precision)))
        object.__setattr__(self, "coeffs", tuple(normalized))

    @property
    def p(self) -> int:
        return self.coeffs[0].p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __add__(self, other):
        if not isinstance(other, TruncatedPowerSeries):
            return NotImplemented
        self._check_compatible(other)
        return TruncatedPowerSeries(
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
            min(self.precision, other.precision),
            self.variable,
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicApprox)):
            return TruncatedPowerSeries(
                tuple(c * other for c in self.coeffs), self.precision, self.variable
            )
        if not isinstance(other, TruncatedPowerSeries):
            return NotImplemented
        self._check_compatible(other)
        degree = min(self.degree, other.degree)
        precision = min(self.precision, other.precision)
        out = [PadicApprox.zero(self.p, precision) for _ in range(degree + 1)]
        for i, a in enumerate(self.coeffs[: degree + 1]):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs[: degree + 1 - i]):
                out[i + j] = out[i + j] + a * b
        return TruncatedPowerSeries(tuple(out), precision, self.variable)

    __rmul__ = __mul__

    def _check_compatible(self, other: "TruncatedPowerSeries") -> None:
        if self.p != other.p:
            raise ValueError("mixed primes")
        if self.variable != other.variable:
            raise ValueError("mixed variable tags")

    def __eq__(self, other):
        if not isinstance(other, TruncatedPowerSeries):
            return NotImplemented
        return (
            self.variable == other.variable
            and self.degree == other.degree
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __str__(self):
        parts = [f"({c})" if i == 0 else f"({c})*{self.variable}^{i}"
                 for i, c in enumerate(self.coeffs)]
        return " + ".join(parts)


@lru_cache(maxsize=None)
def _stirling_first(n: int, j: int) -> int:
    """Signed Stirling numbers of the first kind: x(x-1)...(x-n+1) = sum s(n,j) x^j."""
    if n == 0:
        return 1 if j == 0 else 0
    if j < 0 or j > n:
        return 0
    return _stirling_first(n - 1, j - 1) - (n - 1) * _stirling_first(n - 1, j)


def amice_transform(
    moments, p: int, precision: int, degree: int | None = None
) -> TruncatedPowerSeries:
    """Series f(T) = integral of (1 + T)^x against the measure with the given
    power moments m_j = integral of x^j.

    The degree-n coefficient is the binomial moment
        c_n = integral of C(x, n) = (1/n!) sum_j s(n, j) m_j
    with s(n, j) the signed Stirling numbers of the first kind.  A Dirac mass
    at a has moments a^j and transform (1 + T)^a.
    """
    _require_prime(p)
    moments = list(moments)
    if not moments:
        raise ValueError("need at least the order-0 moment")
    if degree is None:
        degree = len(moments) - 1
    if degree > len(moments) - 1:
        raise ValueError(
            f"degree {degree} needs moments up to order {degree}; "
            f"got {len(moments) - 1}"
        )
    for mom in moments:
        if not isinstance(mom, PadicApprox) or mom.p != p:
            raise ValueError("moments must be PadicApprox values at the same prime")
    out = []
    for n in range(degree + 1):
        acc = PadicApprox.zero(p, precision)
        for j in range(n + 1):
            s = _stirling_first(n, j)
            if s:
                acc = acc + moments[j] * s
        out.append(acc / factorial(n))
    return TruncatedPowerSeries(tuple(out), precision)


def specialize(f: TruncatedPowerSeries, k: int, p: int, precision: int) -> PadicApprox:
    """Evaluate the series at T = (1 + p)^(k-1) - 1 modulo p^precision.

    The tail beyond the stored degree is assumed integral (the series
    represents an element of the integral group ring), so the truncation
    error at T of valuation v is below p^((degree+1) v); the degree is
    rejected when that is not under the requested precision.
    """
    _require_prime(p)
    if f.p != p:
        raise ValueError(f"series is {f.p}-adic, not {p}-adic")
    modulus = p ** precision
    t = (pow(1 + p, k - 1, modulus) - 1) % modulus
    if t == 0:
        return f.coeffs[0].at_precision(min(precision, f.coeffs[0].precision))
    v = _int_val(t, p)
    if (f.degree + 1) * v < precision:
        needed = -(-precision // v) - 1  # ceil(precision / v) - 1
        raise ValueError(
            f"series degree {f.degree} is insufficient for precision "
            f"{precision}: need degree >= {needed}"
        )
    t_adic = padic_reduce(t, p, precision)
    acc = PadicApprox.zero(p, precision)
    for c in reversed(f.coeffs):
        acc = acc * t_adic + c
    if acc.is_zero():
        return PadicApprox.zero(p, precision)
    return acc.at_precision(min(precision, acc.precision))
