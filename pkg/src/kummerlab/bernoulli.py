"""Bernoulli numbers and polynomials, power sums, zeta at non-positive integers.

Convention: B_1 = -1/2 (generating function t/(e^t - 1)), which is the sign
that makes the power-sum identity S_k(N) = (B_{k+1}(N) - B_{k+1})/(k+1) hold
for k >= 1.

Numbers are computed by the defining recurrence
    sum_{i=0}^{k} C(k+1, i) B_i = 0        (k >= 1)
and memoized in a process-wide cache (exclusive writes, shared reads).
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb
from pathlib import Path

_cache: list[Fraction] = [Fraction(1)]
_lock = threading.Lock()


def bernoulli(k: int) -> Fraction:
    """B_k.  B_1 = -1/2; B_k = 0 for odd k >= 3."""
    if k < 0:
        raise ValueError("index must be >= 0")
    with _lock:
        while len(_cache) <= k:
            r = len(_cache)
            acc = sum(comb(r + 1, i) * _cache[i] for i in range(r))
            _cache.append(Fraction(-acc, r + 1))
        return _cache[k]


def bernoulli_poly(k: int, x) -> Fraction:
    """Bernoulli polynomial B_k(x) = sum_i C(k,i) B_i x^(k-i)."""
    if k < 0:
        raise ValueError("index must be >= 0")
    x = Fraction(x)
    bernoulli(k)  # fill cache once, outside the summation
    return sum(
        (comb(k, i) * bernoulli(i) * x ** (k - i) for i in range(k + 1)),
        start=Fraction(0),
    )


def power_sum(k: int, bound: int) -> int:
    """S_k(N) = 1^k + 2^k + ... + (N-1)^k by direct summation.

    Equals (B_{k+1}(N) - B_{k+1})/(k+1) for every k >= 1.
    """
    if k < 0:
        raise ValueError("exponent must be >= 0")
    if bound < 1:
        raise ValueError("bound must be >= 1")
    return sum(n ** k for n in range(1, bound))


def zeta_neg(k: int) -> Fraction:
    """zeta(-k) for integer k >= 0.

    zeta(0) = -1/2; for k >= 1, zeta(-k) = -B_{k+1}/(k+1), which vanishes for
    even k.  (At k = 0 the -B_1 formula would give +1/2 under the B_1 = -1/2
    convention; the classical value is returned instead.)
    """
    if k < 0:
        raise ValueError("argument must be >= 0")
    if k == 0:
        return Fraction(-1, 2)
    return -bernoulli(k + 1) / (k + 1)


def sylvester_lipschitz_check(c: int, k: int) -> bool:
    """Whether c^k (c^k - 1) B_k / k is an integer (true for all c, even k)."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and >= 2")
    value = c ** k * (c ** k - 1) * bernoulli(k) / k
    return value.denominator == 1


# -- cache persistence (used by the CLI warm-up) ----------------------------
#
# File format: one record per line, "k<TAB>num/den", ascending k from 0.


def save_cache(path) -> int:
    """Write the in-memory table to disk; returns the number of records."""
    with _lock:
        snapshot = list(_cache)
    lines = [
        f"{k}\t{b.numerator}/{b.denominator}" for k, b in enumerate(snapshot)
    ]
    Path(path).write_text("\n".join(lines) + "\n")
    return len(snapshot)


def load_cache(path) -> tuple[int, list[str]]:
    """Merge a cache file into memory.

    Malformed lines stop the scan; everything before them is kept and the
    problems are returned as warnings so the caller can regenerate.
    Returns (records loaded, warnings).
    """
    warnings: list[str] = []
    loaded: list[Fraction] = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        return 0, [f"unreadable cache file: {exc}"]
    for lineno, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        try:
            k_str, value = line.split("\t")
            k = int(k_str)
            num, den = value.split("/")
            b = Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError):
            warnings.append(f"line {lineno + 1}: corrupted record, ignoring rest")
            break
        if k != len(loaded):
            warnings.append(f"line {lineno + 1}: index {k} out of order, ignoring rest")
            break
        loaded.append(b)
    if loaded and loaded[0] != 1:
        return 0, [f"{path}: B_0 record is not 1, discarding file"]
    with _lock:
        if len(loaded) > len(_cache):
            _cache[:] = loaded
    return len(loaded), warnings
