"""Motive descriptors: local Euler factors, twists, duals, modified factors.

A descriptor carries rank, weight, Hodge numbers, the dimension d+ of the
+1 eigenspace of the Betti involution, and exact local polynomial
coefficients 1 + A_1 X + ... + A_d X^d per prime.  The built-in catalog
holds the trivial rank-1 object Q(0), the weight-11 rank-2 object attached
to the discriminant cusp form (via its tau table), and the conductor-11
elliptic curve 11a1 (via exhaustive point counts).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .arith import (
    PadicApprox,
    _int_val,
    _require_prime,
    hensel_unit_roots,
    padic_reduce,
    primes_upto,
    val_p,
)
from .characters import (
    DirichletCharacter,
    conductor,
    evaluate,
    primitive_character,
    teichmuller_embed,
)
from .polygons import (
    ConvexPolygon,
    first_ordinarity_failure,
    hodge_polygon,
    is_polygon_ordinary,
    newton_polygon,
    slope_invariant,
)

# -- q-expansion of the discriminant form -------------------------------------

_tau_cache: list[int] = []
_tau_lock = threading.Lock()


def _balanced_digits(n: int, bits: int, count: int) -> list[int]:
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    out = []
    for _ in range(count):
        d = n & mask
        if d >= half:
            d -= 1 << bits
        out.append(d)
        n = (n - d) >> bits
    return out


def _poly_mul_trunc(a: list[int], b: list[int], count: int) -> list[int]:
    """Product of integer coefficient vectors, truncated to ``count`` terms.

    The vectors are packed into single big integers with enough headroom per
    slot that the convolution digits never collide (Kronecker substitution
    with balanced digits, so negative coefficients are fine).
    """
    max_a = max(map(abs, a), default=0)
    max_b = max(map(abs, b), default=0)
    bound = max_a * max_b * min(len(a), len(b)) + 1
    bits = bound.bit_length() + 2
    enc_a = 0
    for c in reversed(a):
        enc_a = (enc_a << bits) + c
    enc_b = 0
    for c in reversed(b):
        enc_b = (enc_b << bits) + c
    return _balanced_digits(enc_a * enc_b, bits, count)


def _euler_product(count: int) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^n), sparse by pentagonal numbers."""
    e = [0] * count
    e[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= count and g2 >= count:
            break
        sign = -1 if k % 2 else 1
        if g1 < count:
            e[g1] += sign
        if g2 < count:
            e[g2] += sign
        k += 1
    return e


def tau(bound: int) -> list[int]:
    """Coefficients tau(1..bound) of q * prod (1 - q^n)^24.

    The 24th power is taken by repeated truncated multiplication of the
    pentagonal-number series.  Results are memoized process-wide.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    with _tau_lock:
        if len(_tau_cache) < bound:
            e1 = _euler_product(bound)
            e2 = _poly_mul_trunc(e1, e1, bound)
            e4 = _poly_mul_trunc(e2, e2, bound)
            e8 = _poly_mul_trunc(e4, e4, bound)
            e16 = _poly_mul_trunc(e8, e8, bound)
            e24 = _poly_mul_trunc(e16, e8, bound)
            _tau_cache[:] = e24  # tau(n) = coefficient of q^(n-1)
        return _tau_cache[:bound]


def tau_cache_size() -> int:
    with _tau_lock:
        return len(_tau_cache)


def save_tau_cache(path) -> int:
    with _tau_lock:
        snapshot = list(_tau_cache)
    lines = [f"{n + 1}\t{t}" for n, t in enumerate(snapshot)]
    Path(path).write_text("\n".join(lines) + "\n")
    return len(snapshot)


def load_tau_cache(path) -> tuple[int, list[str]]:
    """Merge a tau table file (lines "n<TAB>value") into memory."""
    warnings: list[str] = []
    loaded: list[int] = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        return 0, [f"unreadable cache file: {exc}"]
    for lineno, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        try:
            n_str, value = line.split("\t")
            n = int(n_str)
            t = int(value)
        except ValueError:
            warnings.append(f"line {lineno + 1}: corrupted record, ignoring rest")
            break
        if n != len(loaded) + 1:
            warnings.append(f"line {lineno + 1}: index {n} out of order, ignoring rest")
            break
        loaded.append(t)
    if loaded and loaded[0] != 1:
        return 0, [f"{path}: first record is not tau(1) = 1, discarding file"]
    with _tau_lock:
        if len(loaded) > len(_tau_cache):
            _tau_cache[:] = loaded
    return len(loaded), warnings


# -- elliptic curve point counts ----------------------------------------------


def _ec_discriminant(a1: int, a2: int, a3: int, a4: int, a6: int) -> int:
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def count_points_ec(coeffs, p: int) -> int:
    """Trace of Frobenius a_p = p + 1 - #E(F_p) by exhaustive enumeration.

    ``coeffs`` is the Weierstrass quintuple (a1, a2, a3, a4, a6); p must be a
    prime of good reduction.
    """
    a1, a2, a3, a4, a6 = (int(c) for c in coeffs)
    _require_prime(p)
    if _ec_discriminant(a1, a2, a3, a4, a6) % p == 0:
        raise ValueError(f"bad reduction at {p}")
    count = 1  # point at infinity
    if p == 2:
        for x in range(2):
            for y in range(2):
                lhs = y * y + a1 * x * y + a3 * y
                rhs = x ** 3 + a2 * x * x + a4 * x + a6
                if (lhs - rhs) % 2 == 0:
                    count += 1
    else:
        for x in range(p):
            # complete the square: (2y + a1 x + a3)^2 = disc(x)
            disc = (a1 * x + a3) ** 2 + 4 * (x ** 3 + a2 * x * x + a4 * x + a6)
            disc %= p
            if disc == 0:
                count += 1
            else:
                ls = pow(disc, (p - 1) // 2, p)
                count += 2 if ls == 1 else 0
    return p + 1 - count


# -- descriptors ---------------------------------------------------------------


@dataclass(frozen=True)
class EulerFactor:
    """Local polynomial 1 + A_1 X + ... + A_e X^e at a prime (e <= rank)."""

    p: int
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        _require_prime(self.p)
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        if not coeffs or coeffs[0] != 1:
            raise ValueError("constant coefficient must be 1")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def valuations(self) -> list:
        return [val_p(c, self.p) for c in self.coeffs]


def euler_factor_from_ap(kind: str, ap: int, p: int, weight: int | None = None) -> EulerFactor:
    """Degree-2 Hecke-shape factor 1 - a_p X + p^(k-1) X^2.

    ``kind`` is "eigenform" (supply the weight k) or "elliptic" (k = 2).
    """
    if kind == "eigenform":
        if weight is None:
            raise ValueError("eigenform factors need a weight")
        k = weight
    elif kind == "elliptic":
        k = 2
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return EulerFactor(p, (Fraction(1), Fraction(-ap), Fraction(p) ** (k - 1)))


@dataclass(frozen=True)
class MotiveDescriptor:
    label: str
    rank: int
    weight: int
    dplus: int
    hodge: tuple[tuple[int, int, int], ...]
    euler: dict[int, EulerFactor] = field(default_factory=dict)
    coefficient_field: str = "Q"

    def __post_init__(self):
        hodge = tuple(sorted((int(i), int(j), int(h)) for i, j, h in self.hodge))
        object.__setattr__(self, "hodge", hodge)
        if self.coefficient_field != "Q":
            raise ValueError("only rational coefficient fields are supported")
        if sum(h for _, _, h in hodge) != self.rank:
            raise ValueError("Hodge multiplicities must sum to the rank")
        mults = {(i, j): h for i, j, h in hodge}
        for (i, j), h in mults.items():
            if i + j != self.weight:
                raise ValueError(f"bidegree ({i}, {j}) violates purity of weight {self.weight}")
            if mults.get((j, i)) != h:
                raise ValueError(f"Hodge symmetry fails at ({i}, {j})")
            if h < 1:
                raise ValueError(f"multiplicity at ({i}, {j}) must be >= 1")
        if not 0 <= self.dplus <= self.rank:
            raise ValueError(f"d+ = {self.dplus} outside [0, {self.rank}]")
        for p, factor in self.euler.items():
            if factor.p != p:
                raise ValueError(f"factor at {p} is labelled {factor.p}")
            if factor.degree > self.rank:
                raise ValueError(f"factor at {p} has degree above the rank")

    # -- polygon views -------------------------------------------------------

    def euler_at(self, p: int) -> EulerFactor:
        if p not in self.euler:
            raise ValueError(f"no local factor at {p} for {self.label}")
        return self.euler[p]

    def good_primes(self) -> list[int]:
        return sorted(p for p, f in self.euler.items() if f.degree == self.rank)

    def newton_polygon_at(self, p: int, allow_deficient: bool = False) -> ConvexPolygon:
        return newton_polygon(self.euler_at(p).valuations(), allow_deficient)

    def hodge_polygon(self) -> ConvexPolygon:
        return hodge_polygon(self.hodge)

    def root_valuations_at(self, p: int) -> tuple[Fraction, ...]:
        return self.newton_polygon_at(p).unit_slopes()

    def slope_at(self, p: int) -> Fraction:
        return slope_invariant(self.newton_polygon_at(p), self.hodge_polygon(), self.dplus)

    def is_admissible_at(self, p: int) -> bool:
        return self.slope_at(p) == 0

    def is_ordinary_at(self, p: int) -> bool:
        return is_polygon_ordinary(self.newton_polygon_at(p), self.hodge_polygon())

    def hodge_minimum(self) -> Fraction:
        """Minimum of the Hodge polygon (= sum of the negative slopes i*h)."""
        return min(y for _, y in self.hodge_polygon().vertices)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "rank": self.rank,
            "weight": self.weight,
            "dplus": self.dplus,
            "hodge": [{"i": i, "j": j, "mult": h} for i, j, h in self.hodge],
            "euler": {
                str(p): [f"{c.numerator}/{c.denominator}" for c in f.coeffs]
                for p, f in sorted(self.euler.items())
            },
        }


# -- twists and duals -----------------------------------------------------------


def tate_twist(motive: MotiveDescriptor, m: int) -> MotiveDescriptor:
    """Twist sending each inverse root alpha to alpha * p^(-m).

    Coefficients scale as A_i -> A_i p^(-m i); Hodge bidegrees drop by (m, m);
    the weight drops by 2m.  d+ is unchanged for even m and flips to d - d+
    for odd m (the twisting object has Betti involution (-1)^m).
    """
    if m == 0:
        return motive
    euler = {
        p: EulerFactor(
            p, tuple(c * Fraction(p) ** (-m * i) for i, c in enumerate(f.coeffs))
        )
        for p, f in motive.euler.items()
    }
    return MotiveDescriptor(
        label=f"{motive.label}({m})",
        rank=motive.rank,
        weight=motive.weight - 2 * m,
        dplus=motive.dplus if m % 2 == 0 else motive.rank - motive.dplus,
        hodge=tuple((i - m, j - m, h) for i, j, h in motive.hodge),
        euler=euler,
    )


def char_twist(motive: MotiveDescriptor, chi: DirichletCharacter) -> MotiveDescriptor:
    """Twist by a finite-order character, recorded at valuation level.

    At p coprime to the conductor the coefficients pick up root-of-unity
    factors of valuation zero, so they are recorded unchanged; at p dividing
    the conductor the local factor degenerates to 1.  Hodge data and weight
    are unchanged; d+ flips for odd characters.
    """
    if chi.is_trivial():
        return motive
    f = conductor(chi)
    euler = {}
    for p, factor in motive.euler.items():
        if f % p == 0:
            euler[p] = EulerFactor(p, (Fraction(1),))
        else:
            euler[p] = factor
    return MotiveDescriptor(
        label=f"{motive.label}(chi mod {chi.modulus})",
        rank=motive.rank,
        weight=motive.weight,
        dplus=motive.dplus if chi.is_even() else motive.rank - motive.dplus,
        hodge=motive.hodge,
        euler=euler,
    )


def dual(motive: MotiveDescriptor) -> MotiveDescriptor:
    """Dual object: inverse roots invert, so A_i -> A_(d-i)/A_d."""
    d = motive.rank
    euler = {}
    for p, factor in motive.euler.items():
        if factor.degree != d or factor.coeffs[d] == 0:
            raise ValueError(
                f"dual undefined: local factor at {p} has no unit top coefficient"
            )
        top = factor.coeffs[d]
        euler[p] = EulerFactor(
            p, tuple(factor.coeffs[d - i] / top for i in range(d + 1))
        )
    return MotiveDescriptor(
        label=f"{motive.label}^",
        rank=d,
        weight=-motive.weight,
        dplus=motive.dplus,
        hodge=tuple((-i, -j, h) for i, j, h in motive.hodge),
        euler=euler,
    )


# -- modified local factor -------------------------------------------------------


def _ordinary_inverse_roots(
    motive: MotiveDescriptor, p: int, precision: int
) -> list[PadicApprox]:
    """All inverse roots at an ordinary prime, sorted by valuation.

    The Newton slopes of an ordinary factor are integers; for each slope m
    the roots of valuation m become unit roots after scaling the
    coefficients by p^(-m i), where Hensel lifting applies.
    """
    factor = motive.euler_at(p)
    slopes = motive.root_valuations_at(p)
    roots: list[PadicApprox] = []
    for m in sorted(set(slopes)):
        if m.denominator != 1:
            raise ValueError(f"non-integer slope {m} at ordinary prime {p}")
        mult = sum(1 for s in slopes if s == m)
        scaled = [
            padic_reduce(c * Fraction(p) ** (-int(m) * i), p, precision)
            for i, c in enumerate(factor.coeffs)
        ]
        units = hensel_unit_roots(scaled, p, precision)
        if len(units) != mult:
            raise ValueError(
                f"expected {mult} unit roots on the slope-{m} segment at {p}, "
                f"found {len(units)}"
            )
        shift = PadicApprox(p, int(m), 1, precision)
        roots.extend(u * shift for u in units)
    roots.sort(key=lambda r: (r.shift, r.unit_residue))
    return roots


def modified_factor(
    motive: MotiveDescriptor,
    chi: DirichletCharacter,
    s: int,
    p: int,
    precision: int,
) -> PadicApprox:
    """The modified local factor at p, twisted by a tame character of
    p-power conductor, evaluated at integer s.

    For p coprime to the conductor this is
        prod_{i > d+} (1 - chi(p) alpha_i p^-s) *
        prod_{i <= d+} (1 - chi^-1(p) alpha_i^-1 p^(s-1)),
    with the inverse roots ordered by valuation; for p dividing the
    conductor it is prod_{i <= d+} (p^s / alpha_i)^(ord_p conductor).
    Requires the motive to be polygon-ordinary at p.
    """
    _require_prime(p)
    fail = first_ordinarity_failure(motive.newton_polygon_at(p), motive.hodge_polygon())
    if fail is not None:
        raise ValueError(
            f"{motive.label} is not polygon-ordinary at {p}: polygons differ "
            f"at abscissa {fail}"
        )
    f = conductor(chi)
    if f == 1:
        r = 0
    else:
        r = _int_val(f, p)
        if r == 0 or f != p ** r:
            raise ValueError(f"conductor {f} is not a power of {p}")
    if (p - 1) % chi.order:
        raise ValueError(
            f"character order {chi.order} does not divide {p} - 1 (wild twists "
            "are out of scope)"
        )
    work = precision + 16
    roots = _ordinary_inverse_roots(motive, p, work)
    dplus = motive.dplus
    one = PadicApprox.one(p, work)
    result = one
    if r == 0:
        psi = primitive_character(chi)
        cp = teichmuller_embed(evaluate(psi, p), p, work)
        cp_inv = cp.inverse()
        p_neg_s = PadicApprox(p, -s, 1, work) if s else one
        p_sm1 = PadicApprox(p, s - 1, 1, work)
        for alpha in roots[dplus:]:
            result = result * (one - cp * alpha * p_neg_s)
        for alpha in roots[:dplus]:
            result = result * (one - cp_inv * alpha.inverse() * p_sm1)
    else:
        p_s = PadicApprox(p, s, 1, work)
        for alpha in roots[:dplus]:
            result = result * (p_s / alpha) ** r
    if result.is_zero():
        return PadicApprox.zero(p, precision)
    if result.precision < precision:
        raise ValueError(
            f"precision collapsed to {result.precision} digits; request a "
            "higher working precision"
        )
    return result.at_precision(precision)


# -- persistence and catalog ------------------------------------------------------


def _parse_rational(text, where: str) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"{where}: bad rational {text!r}") from None


def motive_from_json_dict(record: dict) -> MotiveDescriptor:
    if not isinstance(record, dict):
        raise ValueError("motive record must be a JSON object")
    for key in ("label", "rank", "weight", "dplus", "hodge", "euler"):
        if key not in record:
            raise ValueError(f"missing field {key!r}")
    hodge = []
    for pos, entry in enumerate(record["hodge"]):
        try:
            hodge.append((int(entry["i"]), int(entry["j"]), int(entry["mult"])))
        except (KeyError, TypeError, ValueError):
            raise ValueError(f"hodge[{pos}]: need integer fields i, j, mult") from None
    euler = {}
    for p_str, coeffs in record["euler"].items():
        try:
            p = int(p_str)
        except ValueError:
            raise ValueError(f"euler key {p_str!r} is not a prime") from None
        parsed = tuple(
            _parse_rational(c, f"euler[{p_str}][{i}]") for i, c in enumerate(coeffs)
        )
        euler[p] = EulerFactor(p, parsed)
    return MotiveDescriptor(
        label=str(record["label"]),
        rank=int(record["rank"]),
        weight=int(record["weight"]),
        dplus=int(record["dplus"]),
        hodge=tuple(hodge),
        euler=euler,
    )


def load_motive(path) -> MotiveDescriptor:
    with open(path) as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from None
    return motive_from_json_dict(record)


def save_motive(motive: MotiveDescriptor, path) -> None:
    Path(path).write_text(json.dumps(motive.to_json_dict(), indent=2) + "\n")


def save_ap_table(rows: list[tuple[int, int]], path) -> None:
    """Write an a_p table as CSV with header "p,ap", one good prime per row."""
    lines = ["p,ap"] + [f"{p},{ap}" for p, ap in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def load_ap_table(path) -> list[tuple[int, int]]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "p,ap":
        raise ValueError(f"{path}: expected header 'p,ap'")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            p_str, ap_str = line.split(",")
            rows.append((int(p_str), int(ap_str)))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad row {line!r}") from None
    return rows


CATALOG_PRIME_BOUND = 50

EC_11A1 = (0, -1, 1, -10, -20)


@lru_cache(maxsize=None)
def builtin_catalog() -> tuple[MotiveDescriptor, ...]:
    """The desk catalog: Q(0), the discriminant form, and curve 11a1.

    Local factors are tabulated at good primes up to 50.
    """
    primes = primes_upto(CATALOG_PRIME_BOUND)
    q0 = MotiveDescriptor(
        label="Q0",
        rank=1,
        weight=0,
        dplus=1,
        hodge=((0, 0, 1),),
        euler={p: EulerFactor(p, (Fraction(1), Fraction(-1))) for p in primes},
    )
    taus = tau(CATALOG_PRIME_BOUND)
    delta = MotiveDescriptor(
        label="delta",
        rank=2,
        weight=11,
        dplus=1,
        hodge=((0, 11, 1), (11, 0, 1)),
        euler={
            p: euler_factor_from_ap("eigenform", taus[p - 1], p, weight=12)
            for p in primes
        },
    )
    e11a1 = MotiveDescriptor(
        label="11a1",
        rank=2,
        weight=1,
        dplus=1,
        hodge=((0, 1, 1), (1, 0, 1)),
        euler={
            p: euler_factor_from_ap("elliptic", count_points_ec(EC_11A1, p), p)
            for p in primes
            if p != 11
        },
    )
    return (q0, delta, e11a1)


def catalog_motive(label: str) -> MotiveDescriptor:
    for motive in builtin_catalog():
        if motive.label == label:
            return motive
    known = ", ".join(m.label for m in builtin_catalog())
    raise ValueError(f"unknown catalog label {label!r} (known: {known})")
