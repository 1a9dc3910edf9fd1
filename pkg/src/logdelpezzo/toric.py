"""Two-dimensional fans, star subdivisions and the moment-polygon volume oracle."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Rational, as_fraction

Vec = tuple[int, int]


def det(u: Sequence[Rational], v: Sequence[Rational]):
    return u[0] * v[1] - u[1] * v[0]


def _in_cone(w: Vec, lo: Vec, hi: Vec) -> bool:
    return det(lo, w) >= 0 and det(w, hi) >= 0


@dataclass(frozen=True)
class Fan2D:
    """A complete fan given by its rays in counterclockwise order."""

    rays: tuple[Vec, ...]

    def __post_init__(self):
        rays = tuple((int(x), int(y)) for x, y in self.rays)
        object.__setattr__(self, "rays", rays)
        if len(rays) < 3:
            raise ValueError("a complete fan needs at least three rays")
        for r in rays:
            if math.gcd(*r) != 1:
                raise ValueError(f"ray {r} is not primitive")
        for lo, hi in self.cones:
            if det(lo, hi) <= 0:
                raise ValueError(f"cone {lo},{hi} is not strictly convex and positively oriented")

    @classmethod
    def projective_plane(cls) -> Fan2D:
        return cls(((1, 0), (0, 1), (-1, -1)))

    @classmethod
    def quadric(cls) -> Fan2D:
        return cls(((1, 0), (0, 1), (-1, 0), (0, -1)))

    @property
    def cones(self) -> list[tuple[Vec, Vec]]:
        n = len(self.rays)
        return [(self.rays[i], self.rays[(i + 1) % n]) for i in range(n)]

    def is_smooth(self) -> bool:
        return all(det(lo, hi) == 1 for lo, hi in self.cones)

    def neighbours(self, ray: Vec) -> tuple[Vec, Vec]:
        i = self.rays.index(ray)
        n = len(self.rays)
        return self.rays[(i - 1) % n], self.rays[(i + 1) % n]

    def self_intersection(self, ray: Vec) -> Fraction:
        lo, hi = self.neighbours(ray)
        return -Fraction(det(lo, hi), det(lo, ray) * det(ray, hi))

    def intersection(self, r1: Vec, r2: Vec) -> Fraction:
        """Intersection of the invariant curves of two rays."""
        if r1 == r2:
            return self.self_intersection(r1)
        if r2 in self.neighbours(r1):
            return Fraction(1, abs(det(r1, r2)))
        return Fraction(0)

    def insert(self, lo: Vec, hi: Vec, ray: Vec) -> Fan2D:
        i = self.rays.index(lo)
        if self.rays[(i + 1) % len(self.rays)] != hi:
            raise ValueError("rays are not adjacent")
        return Fan2D(self.rays[:i + 1] + (ray,) + self.rays[i + 1:])


@dataclass(frozen=True)
class StarSubdivision:
    fans: tuple[Fan2D, ...]
    generators: tuple[Vec, ...]       # (a^i, b^i) for i = 1..m
    q: tuple[int, ...]                # q[0..m] in the blowup-chain convention


def _check_weights(a: int, b: int) -> None:
    if b < 1 or a < b:
        raise ValueError(f"weights must satisfy a >= b >= 1, got ({a}, {b})")
    if math.gcd(a, b) != 1:
        raise ValueError(f"weights ({a}, {b}) are not coprime")


def star_subdivide_toward(a: int, b: int, base: Fan2D | None = None) -> StarSubdivision:
    """Subdivide the cone containing (a, b) by the sum of its generators until (a, b) is a ray."""
    _check_weights(a, b)
    fan = base or Fan2D.projective_plane()
    target = (a, b)
    index: dict[Vec, int] = {(1, 0): 0}
    fans = [fan]
    gens: list[Vec] = []
    q = [0, 0]
    while target not in fan.rays:
        lo, hi = next(c for c in fan.cones if _in_cone(target, *c))
        new = (lo[0] + hi[0], lo[1] + hi[1])
        gens.append(new)
        i = len(gens)
        if i >= 2:
            prev = gens[-2]
            other = hi if lo == prev else lo
            if prev not in (lo, hi) or other not in index:
                raise AssertionError("subdivision left the expected cone")
            q.append(index[other])
        index[new] = i
        fan = fan.insert(lo, hi, new)
        fans.append(fan)
    return StarSubdivision(tuple(fans), tuple(gens), tuple(q))


@dataclass(frozen=True)
class ToricIntersections:
    F_l1: Fraction
    F_l2: Fraction
    F_F: Fraction

    @property
    def f0(self) -> Fraction:
        return -1 / self.F_F


def weighted_blowup_fan(a: int, b: int) -> Fan2D:
    return Fan2D(((1, 0), (a, b), (0, 1), (-1, -1)))


def toric_intersections(a: int, b: int) -> ToricIntersections:
    """(F.l1), (F.l2), (F^2) on the weighted blowup; l1, l2 are the curves of rays (1,0), (0,1)."""
    if math.gcd(a, b) != 1 or a < 1 or b < 1:
        raise ValueError(f"weights ({a}, {b}) must be coprime positive integers")
    fan = weighted_blowup_fan(a, b)
    return ToricIntersections(fan.intersection((a, b), (1, 0)),
                              fan.intersection((a, b), (0, 1)),
                              fan.self_intersection((a, b)))


Point = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class LatticePolygon:
    """Convex polygon with rational vertices listed counterclockwise."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices",
                           tuple((as_fraction(x), as_fraction(y)) for x, y in self.vertices))

    @classmethod
    def triangle(cls, s: Rational) -> LatticePolygon:
        s = as_fraction(s)
        return cls(((Fraction(0), Fraction(0)), (s, Fraction(0)), (Fraction(0), s)))

    @classmethod
    def rectangle(cls, w: Rational, h: Rational) -> LatticePolygon:
        w, h = as_fraction(w), as_fraction(h)
        z = Fraction(0)
        return cls(((z, z), (w, z), (w, h), (z, h)))

    def area(self) -> Fraction:
        v = self.vertices
        n = len(v)
        if n < 3:
            return Fraction(0)
        twice = sum((v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]
                     for i in range(n)), Fraction(0))
        return abs(twice) / 2

    def clip(self, normal: tuple[Rational, Rational], level: Rational) -> LatticePolygon:
        """Intersection with the half-plane normal . u >= level (Sutherland-Hodgman)."""
        a, b = as_fraction(normal[0]), as_fraction(normal[1])
        level = as_fraction(level)
        out: list[Point] = []
        v = self.vertices
        n = len(v)
        for i in range(n):
            p, nxt = v[i], v[(i + 1) % n]
            fp = a * p[0] + b * p[1] - level
            fn = a * nxt[0] + b * nxt[1] - level
            if fp >= 0:
                out.append(p)
            if (fp > 0 > fn) or (fp < 0 < fn):
                t = fp / (fp - fn)
                out.append((p[0] + t * (nxt[0] - p[0]), p[1] + t * (nxt[1] - p[1])))
        return LatticePolygon(tuple(out))

    def lattice_points(self) -> list[tuple[int, int]]:
        if not self.vertices:
            return []
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        pts = []
        for x in range(math.floor(min(xs)), math.ceil(max(xs)) + 1):
            for y in range(math.floor(min(ys)), math.ceil(max(ys)) + 1):
                if self.contains((Fraction(x), Fraction(y))):
                    pts.append((x, y))
        return pts

    def contains(self, pt: Point) -> bool:
        v = list(dict.fromkeys(self.vertices))
        if not v:
            return False
        if len(v) < 3 or self.area() == 0:
            # a point or a segment left over from clipping
            lo, hi = min(v), max(v)
            if det((hi[0] - lo[0], hi[1] - lo[1]), (pt[0] - lo[0], pt[1] - lo[1])) != 0:
                return False
            return lo <= pt <= hi
        n = len(v)
        return all(det((v[(i + 1) % n][0] - v[i][0], v[(i + 1) % n][1] - v[i][1]),
                       (pt[0] - v[i][0], pt[1] - v[i][1])) >= 0 for i in range(n))


def moment_polygon(base_kind: str, L_coefficients: Sequence[Rational]) -> LatticePolygon:
    """Moment polygon of L on P2 (L = sH) or P1xP1 (L = c1 f1 + c2 f2)."""
    if base_kind == "P2":
        (s,) = L_coefficients
        return LatticePolygon.triangle(s)
    if base_kind == "P1xP1":
        c1, c2 = L_coefficients
        return LatticePolygon.rectangle(c2, c1)
    raise ValueError(f"no moment polygon for base {base_kind}")


def polytope_volume_oracle(a: int, b: int, polygon: LatticePolygon, x: Rational) -> Fraction:
    """vol(L - x F) for the weight-(a, b) toric valuation at the origin vertex."""
    x = as_fraction(x)
    if x < 0:
        raise ValueError("x must be nonnegative")
    return 2 * polygon.clip((a, b), x).area()


def polytope_volume_integral(a: int, b: int, polygon: LatticePolygon) -> Fraction:
    """Exact integral over x >= 0 of the oracle volume.

    Between consecutive vertex levels a*u1 + b*u2 the clipped area is a
    quadratic in x, so Simpson's rule is exact on each such interval.
    """
    levels = sorted({a * u + b * v for u, v in polygon.vertices} | {Fraction(0)})
    levels = [t for t in levels if t >= 0]
    total = Fraction(0)
    for lo, hi in zip(levels, levels[1:]):
        f = lambda x: polytope_volume_oracle(a, b, polygon, x)
        total += (hi - lo) / 6 * (f(lo) + 4 * f((lo + hi) / 2) + f(hi))
    return total


def lattice_count(a: int, b: int, polygon: LatticePolygon, x: Rational) -> int:
    """Number of lattice points of the polygon with a*u1 + b*u2 >= x."""
    return len(polygon.clip((a, b), x).lattice_points())


class ProductVerdict(enum.Enum):
    PRODUCT_TYPE = "ProductType"
    NOT_PRODUCT_TYPE = "NotProductType"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class NamedCase:
    """A named divisor family over a named pair, as used by the verdict table."""

    pair: str                 # "p2_conic", "p1xp1_diag", ...
    divisor: str              # "line", "conic", "toric", "tangent_e2", "blowup_on", "diagonal", ...
    delta: Fraction = Fraction(0)
    weights: tuple[int, int] | None = None


def product_type_verdict(case: NamedCase) -> ProductVerdict:
    """Table lookup over the families whose status is known; everything else is Unknown."""
    P, U, N = ProductVerdict.PRODUCT_TYPE, ProductVerdict.UNKNOWN, ProductVerdict.NOT_PRODUCT_TYPE
    d = as_fraction(case.delta)
    if case.pair == "p2_conic":
        if case.divisor == "conic":
            return N
        if case.divisor == "line":
            return P if d == 0 else U
        if case.divisor == "toric":
            return P if d == 0 else U
        if case.divisor == "blowup_off" and d == 0:
            return P
        if case.divisor == "blowup_on" and d == 0:
            return P
        if case.divisor == "tangent_e2":
            return P
        return U
    if case.pair == "p1xp1_diag":
        if case.divisor == "diagonal":
            return N
        if case.divisor == "blowup_on":
            return P
        return U
    return U
