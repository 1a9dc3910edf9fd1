"""Zariski decompositions along a ray and the piecewise-quadratic volume function.

The sweep follows D(x) = L - x*dir for x >= 0.  On each piece the negative
support is fixed, so the negative part is affine in x and vol = (P^2) is a
quadratic.  Everything is decided with exact rationals; ties at a point are
resolved by looking at signs just to the right of it.

Only curves in the supplied catalog are ever tested.  A breakpoint is
*certified* when its positive part P is a nonnegative combination of catalog
curves; together with (P.C) >= 0 on the catalog this makes P nef on the
surface, so the decomposition (and hence the volume) is the true one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Sequence

from .chain import ChainProfile
from .exact import (ExactArithmeticError, Rational, as_fraction, decimal_str,
                    exact_sqrt, find_nonnegative_solution, format_rational,
                    is_negative_definite, sign_after, solve)
from .picard import DivisorClass, SurfaceModel, intersect
from .toric import NamedCase


class CatalogInconsistency(RuntimeError):
    """The catalog produced an impossible decomposition (support not negative definite, ...)."""


class CertificationError(RuntimeError):
    """A threshold could not be certified and the caller did not accept that."""


@dataclass(frozen=True)
class CatalogCurve:
    id: str
    cls: DivisorClass


@dataclass(frozen=True)
class CurveCatalog:
    curves: tuple[CatalogCurve, ...]

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        ids = [c.id for c in self.curves]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate catalog ids in {ids}")
        for c in self.curves:
            if any(v.denominator != 1 for v in c.cls.coefficients):
                raise ValueError(f"catalog curve {c.id} is not integral")

    def __iter__(self):
        return iter(self.curves)

    def __len__(self) -> int:
        return len(self.curves)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.curves)

    def get(self, curve_id: str) -> CatalogCurve:
        for c in self.curves:
            if c.id == curve_id:
                return c
        raise KeyError(curve_id)

    def self_intersections(self, model: SurfaceModel) -> dict[str, Fraction]:
        return {c.id: intersect(c.cls, c.cls, model) for c in self.curves}


@dataclass(frozen=True)
class DivisorOver:
    """A prime divisor F over a pair, packaged for the volume sweep.

    ``direction`` is the class subtracted per unit of x: E_m^*/f when F is
    the last exceptional curve of a chain, the class of F when F lies on the
    base.  ``f0`` is -1/(F^2) on the extraction (None for curves on X).
    """

    id: str
    model: SurfaceModel
    L: DivisorClass
    direction: DivisorClass
    catalog: CurveCatalog
    log_discrepancy: Fraction
    f0: Fraction | None = None
    profile: ChainProfile | None = field(default=None, repr=False, compare=False)
    toric_weights: tuple[int, int] | None = None
    verdict_case: NamedCase | None = None

    @property
    def is_exceptional(self) -> bool:
        return self.f0 is not None

    @cached_property
    def degree(self) -> Fraction:
        return intersect(self.L, self.L, self.model)


@dataclass(frozen=True)
class ZariskiResult:
    positive_part: DivisorClass
    negative_support: tuple[str, ...]
    negative_coefficients: tuple[Fraction, ...]

    @property
    def volume_hint(self) -> str:
        return "vol = (P^2)"


@dataclass(frozen=True)
class QuadraticPiece:
    start: Fraction
    end: Fraction
    c0: Fraction
    c1: Fraction
    c2: Fraction

    def __call__(self, x: Fraction) -> Fraction:
        return self.c0 + self.c1 * x + self.c2 * x * x

    def derivative(self, x: Fraction) -> Fraction:
        return self.c1 + 2 * self.c2 * x

    def antiderivative(self, x: Fraction) -> Fraction:
        return x * (self.c0 + x * (self.c1 / 2 + x * self.c2 / 3))

    def integral(self) -> Fraction:
        hi = self.antiderivative(self.end)
        return hi - self.antiderivative(self.start) if self.start else hi


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """vol(L - xF) on [0, tau]; zero afterwards."""

    pieces: tuple[QuadraticPiece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        prev = Fraction(0)
        for p in self.pieces:
            if p.start != prev or p.end <= p.start:
                raise ValueError("pieces must tile [0, tau] in increasing order")
            prev = p.end

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        if not self.pieces:
            return (Fraction(0),)
        return (Fraction(0),) + tuple(p.end for p in self.pieces)

    @property
    def tau(self) -> Fraction:
        return self.breakpoints[-1]

    @property
    def leading_coefficient(self) -> Fraction:
        """Coefficient c of the last piece written as c*(tau - x)^2, when it has that shape."""
        return self.pieces[-1].c2 if self.pieces else Fraction(0)

    def piece_index(self, x: Fraction, side: str = "left") -> int:
        for i, p in enumerate(self.pieces):
            if side == "left" and p.start < x <= p.end:
                return i
            if side == "right" and p.start <= x < p.end:
                return i
        if self.pieces and x == 0:
            return 0
        return -1

    def __call__(self, x: Rational) -> Fraction:
        x = as_fraction(x)
        if x < 0:
            raise ValueError("volume is only tabulated for x >= 0")
        if x >= self.tau:
            return Fraction(0)
        return self.pieces[self.piece_index(x, "right")](x)

    def derivative(self, x: Rational, side: str = "left") -> Fraction:
        x = as_fraction(x)
        i = self.piece_index(x, side)
        if i < 0:
            return Fraction(0)
        return self.pieces[i].derivative(x)

    def integral(self) -> Fraction:
        return sum((p.integral() for p in self.pieces), Fraction(0))


@dataclass(frozen=True)
class VolumeProfile:
    divisor_id: str
    function: PiecewiseQuadratic
    supports: tuple[tuple[str, ...], ...]
    epsilon: Fraction
    binding: tuple[str, ...]
    certified_breakpoints: tuple[bool, ...]

    @property
    def tau(self) -> Fraction:
        return self.function.tau

    @property
    def epsilon_certified(self) -> bool:
        bps = self.function.breakpoints
        return all(ok for x, ok in zip(bps, self.certified_breakpoints) if x <= self.epsilon)

    @property
    def certified(self) -> bool:
        return all(self.certified_breakpoints)


def _gram(classes: Sequence[DivisorClass], model: SurfaceModel) -> list[list[Fraction]]:
    return [[intersect(u, v, model) for v in classes] for u in classes]


def zariski_decompose(model: SurfaceModel, D: DivisorClass, catalog: CurveCatalog,
                      require_certificate: bool = True) -> ZariskiResult:
    """Fujita's iteration restricted to the catalog."""
    if require_certificate and not is_effective_combination(D, catalog):
        raise CertificationError("no effective expression of D in the catalog; refusing")
    support: list[CatalogCurve] = [c for c in catalog if intersect(D, c.cls, model) < 0]
    while True:
        classes = [c.cls for c in support]
        if support:
            gram = _gram(classes, model)
            if not is_negative_definite(gram):
                raise CatalogInconsistency(
                    f"support {[c.id for c in support]} is not negative definite")
            (coeffs,) = solve(gram, [[intersect(D, c, model) for c in classes]])
        else:
            coeffs = []
        P = D
        for n, c in zip(coeffs, classes):
            P = P - n * c
        extra = [c for c in catalog if c not in support and intersect(P, c.cls, model) < 0]
        if not extra:
            break
        support.extend(extra)
    if any(n <= 0 for n in coeffs):
        raise CatalogInconsistency("negative part has a nonpositive coefficient")
    return ZariskiResult(P, tuple(c.id for c in support), tuple(coeffs))


def is_effective_combination(D: DivisorClass, catalog: CurveCatalog) -> bool:
    cols = [c.cls for c in catalog]
    if not cols:
        return D.is_zero()
    rows = [[col[i] for col in cols] for i in range(len(D))]
    return find_nonnegative_solution(rows, list(D.coefficients)) is not None


def _is_catalog_nef(P: DivisorClass, catalog: CurveCatalog, model: SurfaceModel) -> bool:
    return all(intersect(P, c.cls, model) >= 0 for c in catalog)


def certify_nef(P: DivisorClass, catalog: CurveCatalog, model: SurfaceModel) -> bool:
    """P.C >= 0 on the catalog and P effective in it, hence P.G >= 0 for every curve G."""
    return _is_catalog_nef(P, catalog, model) and is_effective_combination(P, catalog)


def _smallest_root_after(c0: Fraction, c1: Fraction, c2: Fraction, x0: Fraction):
    """Smallest root > x0 of c2 x^2 + c1 x + c0; 'irrational' if one exists but is not rational."""
    if c2 == 0:
        if c1 == 0:
            return None
        r = -c0 / c1
        return r if r > x0 else None
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return None
    s = exact_sqrt(disc)
    if s is None:
        g0 = c0 + c1 * x0 + c2 * x0 * x0
        # a root beyond x0 exists iff g changes sign after x0 or the vertex lies beyond it
        if g0 * c2 < 0 or (g0 * c2 > 0 and -c1 / (2 * c2) > x0):
            return "irrational"
        return None
    roots = sorted({(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)})
    after = [r for r in roots if r > x0]
    return after[0] if after else None


def volume_profile(divisor: DivisorOver, max_events: int | None = None) -> VolumeProfile:
    """Event-driven sweep of the Zariski decomposition of L - x*dir."""
    model, L, dr, catalog = divisor.model, divisor.L, divisor.direction, divisor.catalog
    curves = list(catalog)
    # precomputed pairings; P0, P1 are only needed as classes at breakpoints
    L_dot = {c.id: intersect(L, c.cls, model) for c in curves}
    d_dot = {c.id: intersect(dr, c.cls, model) for c in curves}
    neg_d = {k: -v for k, v in d_dot.items()}
    LL, Ld, dd = divisor.degree, intersect(L, dr, model), intersect(dr, dr, model)
    if any(v < 0 for v in L_dot.values()):
        raise CatalogInconsistency("L is not nef on the catalog")
    if LL <= 0:
        raise CatalogInconsistency("L is not big")
    max_events = max_events or 4 * len(curves) + 8
    pairing: dict[tuple[str, str], Fraction] = {}

    def cc(u: CatalogCurve, v: CatalogCurve) -> Fraction:
        key = (u.id, v.id) if u.id <= v.id else (v.id, u.id)
        if key not in pairing:
            pairing[key] = intersect(u.cls, v.cls, model)
        return pairing[key]

    x0 = Fraction(0)
    support: list[CatalogCurve] = []
    pieces: list[QuadraticPiece] = []
    supports: list[tuple[str, ...]] = []
    positive_at: list[tuple[DivisorClass, bool]] = []
    epsilon: Fraction | None = None
    binding: tuple[str, ...] = ()

    def decompose(sup: list[CatalogCurve]):
        if not sup:
            return [], []
        gram = [[cc(u, v) for v in sup] for u in sup]
        if not is_negative_definite(gram):
            raise CatalogInconsistency(
                f"support {[c.id for c in sup]} is not negative definite")
        n0, n1 = solve(gram, [[L_dot[c.id] for c in sup], [neg_d[c.id] for c in sup]])
        return n0, n1

    def positive_dots(c: CatalogCurve) -> tuple[Fraction, Fraction]:
        p0, p1 = L_dot[c.id], neg_d[c.id]
        for a, b, s in zip(n0, n1, support):
            g = cc(s, c)
            if g:
                p0 -= a * g
                p1 -= b * g
        return p0, p1

    def positive_class(x: Fraction) -> tuple[DivisorClass, bool]:
        """P at x, and whether it meets every catalog curve nonnegatively."""
        coeffs = [u - x * v if v else u for u, v in zip(L.coefficients, dr.coefficients)]
        for a, b, c in zip(n0, n1, support):
            t = a + b * x
            if t:
                coeffs = [u - t * v if v else u for u, v in zip(coeffs, c.cls.coefficients)]
        P = DivisorClass(tuple(coeffs))
        nef = True
        for c in curves:
            p0, p1 = positive_dots(c)
            if p0 + x * p1 < 0:
                nef = False
                break
        return P, nef

    for _ in range(max_events):
        # grow the support for x slightly larger than x0
        while True:
            n0, n1 = decompose(support)
            for a, b, c in zip(n0, n1, support):
                if sign_after(a + b * x0, b) <= 0:
                    raise CatalogInconsistency(
                        f"coefficient of {c.id} would leave the support at x = {x0}")
            in_support = {c.id for c in support}
            new = []
            for c in curves:
                if c.id in in_support:
                    continue
                p0, p1 = positive_dots(c)
                if sign_after(p0 + x0 * p1, p1) < 0:
                    new.append(c)
            if not new:
                break
            if epsilon is None:
                epsilon = x0
                binding = tuple(c.id for c in new)
            support = support + new
        positive_at.append(positive_class(x0))
        # P0 and P1 are orthogonal to the support, which collapses the pairings
        c0 = LL - sum((a * L_dot[c.id] for a, c in zip(n0, support)), Fraction(0))
        c1 = -2 * (Ld - sum((a * d_dot[c.id] for a, c in zip(n0, support)), Fraction(0)))
        c2 = dd + sum((b * d_dot[c.id] for b, c in zip(n1, support)), Fraction(0))
        if x0 > 0 and c0 + c1 * x0 + c2 * x0 * x0 == 0:
            break
        # next catalog event
        event: Fraction | None = None
        in_support = {c.id for c in support}
        for c in curves:
            if c.id in in_support:
                continue
            p0, slope = positive_dots(c)
            if slope < 0:
                r = x0 + (p0 + x0 * slope) / -slope
                if event is None or r < event:
                    event = r
        root = _smallest_root_after(c0, c1, c2, x0)
        if root == "irrational":
            if event is None or c0 + c1 * event + c2 * event * event <= 0:
                raise ExactArithmeticError("the volume reaches zero at an irrational point")
            root = None
        if root is None and event is None:
            raise CatalogInconsistency("catalog insufficient: the sweep never ends")
        end = root if event is None or (root is not None and root <= event) else event
        for a, b, c in zip(n0, n1, support):
            if b < 0 and a + b * end < 0:
                raise CatalogInconsistency(
                    f"coefficient of {c.id} turns negative inside a piece")
        pieces.append(QuadraticPiece(x0, end, c0, c1, c2))
        supports.append(tuple(c.id for c in support))
        x0 = end
        if end == root:
            positive_at.append(positive_class(x0))
            break
    else:
        raise CatalogInconsistency("too many events; catalog looks inconsistent")

    fn = PiecewiseQuadratic(tuple(pieces))
    if epsilon is None:
        epsilon = fn.tau
    # positive_at has one entry per breakpoint (0, interior breakpoints, tau)
    bps = fn.breakpoints
    certs = tuple(nef and is_effective_combination(P, catalog)
                  for P, nef in positive_at[:len(bps)])
    return VolumeProfile(divisor.id, fn, tuple(supports), epsilon, binding, certs)


def nef_threshold(divisor: DivisorOver, allow_uncertified: bool = True) -> Fraction:
    vp = volume_profile(divisor)
    if not allow_uncertified and not vp.epsilon_certified:
        raise CertificationError(f"nef threshold of {divisor.id} is not certified")
    return vp.epsilon


def volume_function(divisor: DivisorOver) -> PiecewiseQuadratic:
    return volume_profile(divisor).function


def pseff_threshold(divisor: DivisorOver, allow_uncertified: bool = True) -> Fraction:
    vp = volume_profile(divisor)
    if not allow_uncertified and not vp.certified:
        raise CertificationError(f"pseudoeffective threshold of {divisor.id} is not certified")
    return vp.tau


def integrate_volume(v: PiecewiseQuadratic) -> Fraction:
    return v.integral()


@dataclass(frozen=True)
class ConvexityReport:
    pairs: tuple[tuple[Fraction, Fraction], ...]
    value_slacks: tuple[Fraction, ...]
    tau_slacks: tuple[Fraction | None, ...]

    @property
    def worst_slack(self) -> Fraction:
        vals = list(self.value_slacks) + [s for s in self.tau_slacks if s is not None]
        return min(vals) if vals else Fraction(0)

    @property
    def ok(self) -> bool:
        return self.worst_slack >= 0


def default_sample_pairs(v: PiecewiseQuadratic, count: int = 10) -> list[tuple[Fraction, Fraction]]:
    tau = v.tau
    pts = [tau * Fraction(k, 6) for k in range(1, 7)]
    pairs = [(x, y) for i, x in enumerate(pts[:-1]) for y in pts[i + 1:]]
    return pairs[:count]


def convexity_bound_check(v: PiecewiseQuadratic,
                          samples: Iterable[tuple[Rational, Rational]] | None = None,
                          n: int = 2) -> ConvexityReport:
    """Both consequences of log-concavity, with left derivatives at breakpoints."""
    samples = list(samples) if samples is not None else default_sample_pairs(v)
    pairs, vs, ts = [], [], []
    tau = v.tau
    for x, y in samples:
        x, y = as_fraction(x), as_fraction(y)
        if not 0 < x <= y <= tau:
            raise ValueError(f"sample pair ({x}, {y}) outside 0 < x <= y <= tau")
        fx, fy, d = v(x), v(y), v.derivative(x, "left")
        pairs.append((x, y))
        if fx == 0:
            vs.append(-fy)
            ts.append(None)
            continue
        vs.append(fx * ((y - x) / n * d / fx + 1) ** n - fy)
        ts.append(x + n * fx / -d - tau if d < 0 else None)
    return ConvexityReport(tuple(pairs), tuple(vs), tuple(ts))


def volume_rows(profile: VolumeProfile, samples: Sequence[Rational] | None = None) -> list[dict]:
    """Plot data: one row per sample x with exact and decimal renderings."""
    fn = profile.function
    if samples is None:
        samples = sorted({fn.tau * Fraction(k, 24) for k in range(25)} | set(fn.breakpoints))
    rows = []
    for x in samples:
        x = as_fraction(x)
        i = fn.piece_index(x, "right") if x < fn.tau else len(fn.pieces) - 1
        value = fn(x)
        rows.append({
            "x": format_rational(x),
            "x_decimal": decimal_str(x),
            "vol": format_rational(value),
            "vol_decimal": decimal_str(value),
            "piece": i,
            "negative_support": " ".join(profile.supports[i]) if i >= 0 else "",
        })
    return rows
