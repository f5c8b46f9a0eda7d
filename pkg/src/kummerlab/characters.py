"""Dirichlet characters with exact values in cyclotomic fields.

Elements of Q(zeta_n) are coefficient vectors on the power basis
1, zeta, ..., zeta^(phi(n)-1) modulo the n-th cyclotomic polynomial, which
is computed exactly by the Moebius/recursive product formula.  A character
is stored by the images of a fixed generating set of (Z/m)^x; tables
(group structure, discrete logs, basis reductions) are built once per
modulus and shared, and all values are immutable.

Supported moduli: prime powers (even part at most 8) and products of
distinct odd prime powers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm, prod

from .arith import INFINITY, PadicApprox, padic_reduce, teichmuller, val_p
from .bernoulli import bernoulli_poly


def _factorize(m: int) -> list[tuple[int, int]]:
    fs = []
    q = 2
    while q * q <= m:
        if m % q == 0:
            e = 0
            while m % q == 0:
                m //= q
                e += 1
            fs.append((q, e))
        q += 1
    if m > 1:
        fs.append((m, 1))
    return fs


def euler_phi(m: int) -> int:
    return prod((q - 1) * q ** (e - 1) for q, e in _factorize(m)) if m > 1 else 1


# -- exact cyclotomic polynomials and power-basis tables ---------------------


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # den is monic; division is exact over Z
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, ascending degree."""
    if n < 1:
        raise ValueError("order must be >= 1")
    if n == 1:
        return (-1, 1)
    poly = [0] * n + [1]
    poly[0] = -1  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """zeta_n^j on the power basis, for 0 <= j < max(n, 2*phi(n) - 1)."""
    phi = len(cyclotomic_polynomial(n)) - 1
    reducer = cyclotomic_polynomial(n)[:-1]  # x^phi = -(c_0 + ... + c_{phi-1} x^{phi-1})
    count = max(n, 2 * phi - 1)
    rows = [[0] * phi for _ in range(count)]
    rows[0][0] = 1
    for j in range(1, count):
        prev = rows[j - 1]
        row = [0] + prev[:-1]
        top = prev[-1]
        if top:
            for i, c in enumerate(reducer):
                row[i] -= top * c
        rows[j] = row
    return tuple(tuple(r) for r in rows)


@dataclass(frozen=True)
class CyclotomicNumber:
    """An element of Q(zeta_order) on the power basis."""

    order: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        phi = len(cyclotomic_polynomial(self.order)) - 1
        if len(self.coeffs) != phi:
            raise ValueError(
                f"need {phi} coordinates for order {self.order}, got {len(self.coeffs)}"
            )
        object.__setattr__(
            self, "coeffs", tuple(Fraction(c) for c in self.coeffs)
        )

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_rational(cls, value, order: int = 1) -> "CyclotomicNumber":
        phi = len(cyclotomic_polynomial(order)) - 1
        coeffs = [Fraction(0)] * phi
        coeffs[0] = Fraction(value)
        return cls(order, tuple(coeffs))

    @classmethod
    def zero(cls, order: int = 1) -> "CyclotomicNumber":
        return cls.from_rational(0, order)

    @classmethod
    def one(cls, order: int = 1) -> "CyclotomicNumber":
        return cls.from_rational(1, order)

    @classmethod
    def root_of_unity(cls, order: int, exponent: int) -> "CyclotomicNumber":
        """zeta_order^exponent."""
        row = _power_table(order)[exponent % order]
        return cls(order, tuple(Fraction(c) for c in row))

    # -- structure -----------------------------------------------------------

    def promote(self, order: int) -> "CyclotomicNumber":
        """Reinterpret in Q(zeta_order); requires self.order | order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"{self.order} does not divide {order}")
        step = order // self.order
        table = _power_table(order)
        phi = len(cyclotomic_polynomial(order)) - 1
        out = [Fraction(0)] * phi
        for i, c in enumerate(self.coeffs):
            if c:
                for j, t in enumerate(table[(i * step) % order]):
                    if t:
                        out[j] += c * t
        return CyclotomicNumber(order, tuple(out))

    def _common(self, other: "CyclotomicNumber"):
        n = lcm(self.order, other.order)
        return self.promote(n), other.promote(n)

    def galois(self, t: int) -> "CyclotomicNumber":
        """Apply zeta -> zeta^t (t coprime to the order)."""
        n = self.order
        if gcd(t, n) != 1:
            raise ValueError(f"{t} is not coprime to {n}")
        table = _power_table(n)
        phi = len(self.coeffs)
        out = [Fraction(0)] * phi
        for i, c in enumerate(self.coeffs):
            if c:
                for j, u in enumerate(table[(i * t) % n]):
                    if u:
                        out[j] += c * u
        return CyclotomicNumber(n, tuple(out))

    def conjugate(self) -> "CyclotomicNumber":
        """Complex conjugation zeta -> zeta^(-1)."""
        if self.order <= 2:
            return self
        return self.galois(self.order - 1)

    # -- predicates and views --------------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __str__(self):
        if self.is_rational():
            q = self.coeffs[0]
            return f"{q.numerator}/{q.denominator}"
        terms = ", ".join(f"{c.numerator}/{c.denominator}" for c in self.coeffs)
        return f"({terms}) in Q(zeta_{self.order})"

    # -- ring operations -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CyclotomicNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber.from_rational(other)
        return None

    def __add__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        a, b = self._common(rhs)
        return CyclotomicNumber(
            a.order, tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
        )

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if rhs.order == 1:  # rational scalar: no basis work needed
            s = rhs.coeffs[0]
            return CyclotomicNumber(self.order, tuple(c * s for c in self.coeffs))
        if self.order == 1:
            s = self.coeffs[0]
            return CyclotomicNumber(rhs.order, tuple(c * s for c in rhs.coeffs))
        a, b = self._common(rhs)
        phi = len(a.coeffs)
        raw = [Fraction(0)] * (2 * phi - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        raw[i + j] += x * y
        table = _power_table(a.order)
        out = list(raw[:phi])
        for j in range(phi, 2 * phi - 1):
            c = raw[j]
            if c:
                for i, t in enumerate(table[j]):
                    if t:
                        out[i] += c * t
        return CyclotomicNumber(a.order, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            s = Fraction(other)
            return CyclotomicNumber(self.order, tuple(c / s for c in self.coeffs))
        return NotImplemented

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = CyclotomicNumber.one(self.order)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        a, b = self._common(rhs)
        return a.coeffs == b.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))


# -- unit group structure ----------------------------------------------------


def _smallest_primitive_root(p: int) -> int:
    factors = [q for q, _ in _factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
            return g
    raise ArithmeticError(f"no primitive root mod {p}")  # unreachable for prime p


def _local_generators(q: int, e: int) -> list[tuple[int, int]]:
    """Generators (with orders) of (Z/q^e)^x for one prime power."""
    if q == 2:
        if e == 1:
            return []
        if e == 2:
            return [(3, 2)]
        if e == 3:
            return [(7, 2), (5, 2)]
        raise ValueError("moduli with even part > 8 are not supported")
    g = _smallest_primitive_root(q)
    if e > 1 and pow(g, q - 1, q * q) == 1:
        g += q
    return [(g % q ** e, (q - 1) * q ** (e - 1))]


@dataclass(frozen=True)
class _UnitGroup:
    modulus: int
    gens: tuple[int, ...]
    orders: tuple[int, ...]
    local_q: tuple[int, ...]  # prime power each generator belongs to
    exponent: int

    @property
    def dlog(self) -> dict[int, tuple[int, ...]]:
        return _dlog_table(self.modulus)


@lru_cache(maxsize=None)
def _unit_group(m: int) -> _UnitGroup:
    if m < 1:
        raise ValueError("modulus must be >= 1")
    fs = _factorize(m)
    odd_parts = [(q, e) for q, e in fs if q != 2]
    if len(odd_parts) > 1 and any(q == 2 for q, _ in fs):
        raise ValueError(
            f"modulus {m} unsupported: need a prime power or a product of "
            "distinct odd prime powers"
        )
    gens, orders, local_q = [], [], []
    for q, e in fs:
        qe = q ** e
        rest = m // qe
        for g, order in _local_generators(q, e):
            # CRT lift: g on this component, 1 elsewhere
            if rest == 1:
                lifted = g
            else:
                lifted = (
                    g * rest * pow(rest, -1, qe) + qe * pow(qe, -1, rest)
                ) % m
            gens.append(lifted)
            orders.append(order)
            local_q.append(qe)
    exponent = lcm(*orders) if orders else 1
    return _UnitGroup(m, tuple(gens), tuple(orders), tuple(local_q), exponent)


@lru_cache(maxsize=None)
def _dlog_table(m: int) -> dict[int, tuple[int, ...]]:
    group = _unit_group(m)
    table: dict[int, tuple[int, ...]] = {}
    for tup in itertools.product(*(range(o) for o in group.orders)):
        a = 1
        for g, t in zip(group.gens, tup):
            a = a * pow(g, t, m) % m
        table[a] = tup
    return table


# -- Dirichlet characters -----------------------------------------------------


@dataclass(frozen=True)
class DirichletCharacter:
    """Character of (Z/modulus)^x, given by generator images.

    gen_images[i] = t means the i-th generator g_i (of order s_i) maps to
    zeta_{s_i}^t.  chi(a) = 0 exactly when gcd(a, modulus) > 1.
    """

    modulus: int
    gen_images: tuple[int, ...]

    def __post_init__(self):
        group = _unit_group(self.modulus)
        if len(self.gen_images) != len(group.gens):
            raise ValueError(
                f"expected {len(group.gens)} generator images for modulus "
                f"{self.modulus}, got {len(self.gen_images)}"
            )
        object.__setattr__(
            self,
            "gen_images",
            tuple(t % s for t, s in zip(self.gen_images, group.orders)),
        )

    @property
    def order(self) -> int:
        group = _unit_group(self.modulus)
        return lcm(
            *(s // gcd(s, t) for s, t in zip(group.orders, self.gen_images)), 1
        )

    def __call__(self, a: int) -> CyclotomicNumber:
        return evaluate(self, a)

    def is_even(self) -> bool:
        return evaluate(self, -1) == 1

    def is_odd(self) -> bool:
        return not self.is_even()

    @property
    def conductor(self) -> int:
        return conductor(self)

    def is_trivial(self) -> bool:
        return all(t == 0 for t in self.gen_images)

    def to_json_dict(self) -> dict:
        group = _unit_group(self.modulus)
        return {
            "modulus": self.modulus,
            "generator_images": [
                {"generator": g, "exponent": t, "order": s}
                for g, t, s in zip(group.gens, self.gen_images, group.orders)
            ],
        }

    @classmethod
    def from_json_dict(cls, record: dict) -> "DirichletCharacter":
        m = record["modulus"]
        group = _unit_group(m)
        images = [0] * len(group.gens)
        for entry in record["generator_images"]:
            try:
                idx = group.gens.index(entry["generator"])
            except ValueError:
                raise ValueError(
                    f"generator {entry['generator']} is not in the fixed "
                    f"generating set for modulus {m}"
                ) from None
            if entry["order"] != group.orders[idx]:
                raise ValueError(
                    f"generator {entry['generator']}: order {entry['order']} "
                    f"should be {group.orders[idx]}"
                )
            images[idx] = entry["exponent"]
        return cls(m, tuple(images))

    def __str__(self):
        return f"chi mod {self.modulus} with generator images {self.gen_images}"


@lru_cache(maxsize=None)
def characters_mod(m: int) -> tuple[DirichletCharacter, ...]:
    """All phi(m) characters mod m, trivial first, in a fixed enumeration."""
    group = _unit_group(m)
    return tuple(
        DirichletCharacter(m, tup)
        for tup in itertools.product(*(range(o) for o in group.orders))
    )


def _log_value(chi: DirichletCharacter, a: int):
    """Exponent j with chi(a) = zeta_ord(chi)^j, or None off the units."""
    m = chi.modulus
    if m == 1:
        return 0
    a %= m
    if gcd(a, m) != 1:
        return None
    group = _unit_group(m)
    e = group.exponent
    total = 0
    for t, s, x in zip(chi.gen_images, group.orders, group.dlog[a]):
        total += t * (e // s) * x
    total %= e
    d = chi.order
    return total // (e // d)


def evaluate(chi: DirichletCharacter, a: int) -> CyclotomicNumber:
    """chi(a) as a root of unity in Q(zeta_ord(chi)), or 0 off the units."""
    j = _log_value(chi, a)
    if j is None:
        return CyclotomicNumber.zero()
    return CyclotomicNumber.root_of_unity(chi.order, j)


@lru_cache(maxsize=None)
def conductor(chi: DirichletCharacter) -> int:
    """Smallest modulus through which chi factors."""
    group = _unit_group(chi.modulus)
    image_orders = [s // gcd(s, t) for s, t in zip(group.orders, chi.gen_images)]
    f = 1
    seen: dict[int, list[tuple[int, int, int]]] = {}
    for qe, s, o in zip(group.local_q, group.orders, image_orders):
        seen.setdefault(qe, []).append((s, o, qe))
    for qe, parts in seen.items():
        q = _factorize(qe)[0][0]
        if q == 2 and len(parts) == 2:
            # components (-1, 5) of (Z/8)^x
            o_minus, o_five = parts[0][1], parts[1][1]
            if o_five > 1:
                f *= 8
            elif o_minus > 1:
                f *= 4
        else:
            o = parts[0][1]
            if o > 1:
                v = 0
                oo = o
                while oo % q == 0:
                    oo //= q
                    v += 1
                f *= q ** (1 + v)
    return f


@lru_cache(maxsize=None)
def primitive_character(chi: DirichletCharacter) -> DirichletCharacter:
    """The primitive character of conductor(chi) inducing chi."""
    f = conductor(chi)
    if f == chi.modulus:
        return chi
    m = chi.modulus
    coprime = [a for a in range(1, m + 1) if gcd(a, m) == 1]
    for psi in characters_mod(f):
        if conductor(psi) != f:
            continue
        if all(evaluate(psi, a) == evaluate(chi, a) for a in coprime):
            return psi
    raise ArithmeticError(f"no primitive character found for {chi}")  # unreachable


def gauss_sum(chi: DirichletCharacter) -> CyclotomicNumber:
    """G(chi) = sum_a chi(a) zeta_m^a for a primitive character mod m."""
    m = chi.modulus
    if conductor(chi) != m:
        raise ValueError(f"chi mod {m} has conductor {conductor(chi)}: not primitive")
    if m == 1:
        return CyclotomicNumber.one()
    d = chi.order
    n = lcm(d, m)
    total = CyclotomicNumber.zero(n)
    for a in range(1, m):
        j = _log_value(chi, a)
        if j is None:
            continue
        total = total + CyclotomicNumber.root_of_unity(n, j * (n // d) + a * (n // m))
    return total


def gen_bernoulli(k: int, chi: DirichletCharacter) -> CyclotomicNumber:
    """Generalized Bernoulli number B_{k,chi} via the primitive character.

    B_{k,chi} = f^(k-1) * sum_{a=1}^{f} chi(a) B_k(a/f) with f the conductor.
    For the trivial character this is B_k when k != 1 and +1/2 at k = 1.
    """
    if k < 1:
        raise ValueError("index must be >= 1")
    psi = primitive_character(chi)
    f = psi.modulus
    total = CyclotomicNumber.zero(psi.order)
    for a in range(1, f + 1):
        value = evaluate(psi, a)
        if value.is_zero():
            continue
        total = total + value * bernoulli_poly(k, Fraction(a, f))
    return total * Fraction(f) ** (k - 1)


def dirichlet_L_neg(k: int, chi: DirichletCharacter) -> CyclotomicNumber:
    """L(-k, chi) = -B_{k+1,chi}/(k+1) for integer k >= 0."""
    if k < 0:
        raise ValueError("argument must be >= 0")
    return gen_bernoulli(k + 1, chi) * Fraction(-1, k + 1)


def padic_divisibility(x: CyclotomicNumber, p: int, bound: int) -> int:
    """Largest e <= bound with every power-basis coordinate of x in p^e Z.

    This is membership in p^e * Z[zeta_n], a sound and conservative notion of
    congruence for cyclotomic values (stronger than prime-ideal divisibility).
    Requires p-integral coordinates.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    best = bound
    for c in x.coeffs:
        v = val_p(c, p)
        if v < 0:
            raise ValueError(f"coordinate {c} is not {p}-integral")
        if v < best:
            best = v
    return int(best)


def teichmuller_embed(x: CyclotomicNumber, p: int, precision: int) -> PadicApprox:
    """Embed Q(zeta_e), e | p-1, into Q_p compatibly with Teichmuller lifts.

    The embedding is fixed once and for all: zeta_e maps to the Teichmuller
    lift of g^((p-1)/e) for the smallest primitive root g mod p.
    """
    e = x.order
    if (p - 1) % e:
        raise ValueError(f"order {e} does not divide {p} - 1")
    if e <= 2:
        root = PadicApprox.from_rational(1 if e == 1 else -1, p, precision)
    else:
        g = _smallest_primitive_root(p)
        root = teichmuller(pow(g, (p - 1) // e, p), p, precision)
    total = PadicApprox.zero(p, precision)
    power = PadicApprox.one(p, precision)
    for i, c in enumerate(x.coeffs):
        if i:
            power = power * root
        if c:
            total = total + power * padic_reduce(c, p, precision)
    return total
