"""Newton and Hodge polygons, the slope invariant, and ordinarity tests.

A polygon is a piecewise-linear convex function on [0, d], stored by its
corner vertices, starting at (0, 0) with nondecreasing slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ConvexPolygon:
    vertices: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        vs = tuple(
            (Fraction(x), Fraction(y)) for x, y in self.vertices
        )
        if not vs or vs[0] != (0, 0):
            raise ValueError("polygon must start at (0, 0)")
        slopes = []
        for (x0, y0), (x1, y1) in zip(vs, vs[1:]):
            if x1 <= x0:
                raise ValueError("vertex abscissae must be strictly increasing")
            slopes.append(Fraction(y1 - y0, x1 - x0))
        if any(b < a for a, b in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be nondecreasing")
        object.__setattr__(self, "vertices", vs)

    @property
    def terminal_x(self) -> Fraction:
        return self.vertices[-1][0]

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        return tuple(
            Fraction(y1 - y0, x1 - x0)
            for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:])
        )

    def evaluate(self, u) -> Fraction:
        u = Fraction(u)
        if u < 0 or u > self.terminal_x:
            raise ValueError(f"{u} outside [0, {self.terminal_x}]")
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if u <= x1:
                return y0 + (u - x0) * Fraction(y1 - y0, x1 - x0)
        return self.vertices[-1][1]  # single-vertex polygon, u == 0

    def unit_slopes(self) -> tuple[Fraction, ...]:
        """Slope on each interval [i, i+1]; for a Newton polygon these are
        the valuations of the inverse roots, in nondecreasing order."""
        d = int(self.terminal_x)
        if self.terminal_x != d:
            raise ValueError("polygon does not end at an integer abscissa")
        return tuple(
            self.evaluate(i + 1) - self.evaluate(i) for i in range(d)
        )

    def to_json_dict(self) -> dict:
        return {
            "vertices": [
                [int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}",
                 f"{y.numerator}/{y.denominator}"]
                for x, y in self.vertices
            ],
            "slopes": [f"{s.numerator}/{s.denominator}" for s in self.slopes],
        }


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    hull: list[tuple[Fraction, Fraction]] = []
    for x, y in points:
        x, y = Fraction(x), Fraction(y)
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # drop the middle point unless it is a strict corner
            if (y1 - y0) * (x - x1) >= (y - y1) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append((x, y))
    return hull


def newton_polygon(valuations, allow_deficient: bool = False) -> ConvexPolygon:
    """Lower convex hull of the finite points (i, v_i), v_0 = 0 required.

    Infinite entries (vanishing coefficients) are omitted from the hull
    input.  If the top coefficient vanishes the local factor is degenerate:
    that is an error unless the caller allows a shorter polygon.
    """
    vals = list(valuations)
    if not vals or vals[0] != 0:
        raise ValueError("leading valuation must be 0 (constant coefficient 1)")
    if math.isinf(vals[-1]) and not allow_deficient:
        raise ValueError("polygon of deficient degree")
    points = [(i, v) for i, v in enumerate(vals) if not math.isinf(v)]
    return ConvexPolygon(tuple(_lower_hull(points)))


def hodge_polygon(hodge) -> ConvexPolygon:
    """Polygon with a slope-i segment of horizontal length h(i, j).

    ``hodge`` is an iterable of (i, j, multiplicity) triples.
    """
    entries = sorted(hodge, key=lambda t: t[0])
    lengths: list[tuple[int, int]] = []  # (slope i, total multiplicity)
    for i, _j, mult in entries:
        if mult < 1:
            raise ValueError(f"multiplicity {mult} at ({i}, {_j}) must be >= 1")
        if lengths and lengths[-1][0] == i:
            lengths[-1] = (i, lengths[-1][1] + mult)
        else:
            lengths.append((i, mult))
    x, y = Fraction(0), Fraction(0)
    vertices = [(x, y)]
    for slope, mult in lengths:
        x += mult
        y += slope * mult
        vertices.append((x, y))
    return ConvexPolygon(tuple(vertices))


def eval_polygon(polygon: ConvexPolygon, u) -> Fraction:
    return polygon.evaluate(u)


def _check_spans(newton: ConvexPolygon, hodge: ConvexPolygon) -> None:
    if newton.terminal_x != hodge.terminal_x:
        raise ValueError(
            f"polygon spans differ: [0, {newton.terminal_x}] vs [0, {hodge.terminal_x}]"
        )


def slope_invariant(newton: ConvexPolygon, hodge: ConvexPolygon, dplus: int) -> Fraction:
    """P_Newton(d+) - P_Hodge(d+), returned signed."""
    _check_spans(newton, hodge)
    if not isinstance(dplus, int):
        raise ValueError("d+ is a dimension and must be an integer")
    if dplus < 0 or dplus > newton.terminal_x:
        raise ValueError(f"d+ = {dplus} outside [0, {newton.terminal_x}]")
    return newton.evaluate(dplus) - hodge.evaluate(dplus)


def is_admissible(newton: ConvexPolygon, hodge: ConvexPolygon, dplus: int) -> bool:
    return slope_invariant(newton, hodge, dplus) == 0


def is_polygon_ordinary(newton: ConvexPolygon, hodge: ConvexPolygon) -> bool:
    """Whether the two polygons agree at every integer abscissa."""
    _check_spans(newton, hodge)
    d = int(newton.terminal_x)
    return all(newton.evaluate(i) == hodge.evaluate(i) for i in range(d + 1))


def first_ordinarity_failure(newton: ConvexPolygon, hodge: ConvexPolygon):
    """Smallest integer abscissa where the polygons differ, or None."""
    _check_spans(newton, hodge)
    d = int(newton.terminal_x)
    for i in range(d + 1):
        if newton.evaluate(i) != hodge.evaluate(i):
            return i
    return None


def critical_root_count_check(valuations, dplus: int) -> bool:
    """Whether the number of negative root valuations equals d+.

    ``valuations`` are the inverse-root valuations read off the Newton
    polygon slopes, in nondecreasing order.
    """
    vals = [Fraction(v) for v in valuations]
    if any(b < a for a, b in zip(vals, vals[1:])):
        raise ValueError("root valuations must be sorted nondecreasingly")
    return sum(1 for v in vals if v < 0) == dplus
