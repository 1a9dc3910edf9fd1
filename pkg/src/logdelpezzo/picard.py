"""Picard lattices of the base surfaces (P2, P1xP1, Hirzebruch) and their point blowups.

Classes are stored in the orthogonal *total transform* basis: the base
generators followed by one class per exceptional curve (the total transform
of the i-th exceptional curve, square -1, orthogonal to everything else).
"""

from __future__ import annotations

import enum
from functools import cached_property, lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import Rational, as_fraction, inertia


class DimensionError(ValueError):
    """Two classes (or a class and a surface) have incompatible lengths."""


class SurfaceKind(enum.Enum):
    PROJECTIVE_PLANE = "P2"
    QUADRIC = "P1xP1"
    HIRZEBRUCH = "Hirzebruch"


_GENERATORS = {
    SurfaceKind.PROJECTIVE_PLANE: ("H",),
    SurfaceKind.QUADRIC: ("f1", "f2"),
    SurfaceKind.HIRZEBRUCH: ("e", "l"),
}


@dataclass(frozen=True)
class BaseSurface:
    kind: SurfaceKind
    m: int = 0

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("Hirzebruch degree must be nonnegative")
        if self.kind is not SurfaceKind.HIRZEBRUCH and self.m != 0:
            raise ValueError("only Hirzebruch surfaces carry a degree")

    @classmethod
    def projective_plane(cls) -> BaseSurface:
        return cls(SurfaceKind.PROJECTIVE_PLANE)

    @classmethod
    def quadric(cls) -> BaseSurface:
        return cls(SurfaceKind.QUADRIC)

    @classmethod
    def hirzebruch(cls, m: int) -> BaseSurface:
        return cls(SurfaceKind.HIRZEBRUCH, m)

    @property
    def generator_names(self) -> tuple[str, ...]:
        return _GENERATORS[self.kind]

    @cached_property
    def rank(self) -> int:
        return len(_GENERATORS[self.kind])

    @cached_property
    def gram(self) -> tuple[tuple[int, ...], ...]:
        if self.kind is SurfaceKind.PROJECTIVE_PLANE:
            return ((1,),)
        if self.kind is SurfaceKind.QUADRIC:
            return ((0, 1), (1, 0))
        return ((-self.m, 1), (1, 0))

    @property
    def canonical(self) -> tuple[int, ...]:
        if self.kind is SurfaceKind.PROJECTIVE_PLANE:
            return (-3,)
        if self.kind is SurfaceKind.QUADRIC:
            return (-2, -2)
        return (-2, -(self.m + 2))

    @property
    def extremal_curves(self) -> dict[str, tuple[int, ...]]:
        """Generators of the cone of curves, used for the ampleness test."""
        if self.kind is SurfaceKind.PROJECTIVE_PLANE:
            return {"line": (1,)}
        if self.kind is SurfaceKind.QUADRIC:
            return {"f1": (1, 0), "f2": (0, 1)}
        return {"e": (1, 0), "l": (0, 1)}

    @property
    def label(self) -> str:
        if self.kind is SurfaceKind.HIRZEBRUCH:
            return f"F{self.m}"
        return self.kind.value

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.kind is SurfaceKind.HIRZEBRUCH:
            out["m"] = self.m
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> BaseSurface:
        kind = SurfaceKind(data["kind"])
        return cls(kind, int(data.get("m", 0)))


@dataclass(frozen=True)
class DivisorClass:
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        cs = self.coefficients
        if type(cs) is not tuple or any(type(c) is not Fraction for c in cs):
            object.__setattr__(self, "coefficients", tuple(as_fraction(c) for c in cs))

    @classmethod
    def of(cls, *coefficients: Rational) -> DivisorClass:
        return cls(tuple(coefficients))

    @classmethod
    def zero(cls, length: int) -> DivisorClass:
        return cls((Fraction(0),) * length)

    @classmethod
    def unit(cls, length: int, index: int) -> DivisorClass:
        return cls(tuple(Fraction(int(i == index)) for i in range(length)))

    def __len__(self) -> int:
        return len(self.coefficients)

    def __getitem__(self, i: int) -> Fraction:
        return self.coefficients[i]

    def _check(self, other: DivisorClass) -> None:
        if len(self) != len(other):
            raise DimensionError(f"class lengths differ: {len(self)} vs {len(other)}")

    def __add__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        self._check(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))

    def __neg__(self) -> DivisorClass:
        return DivisorClass(tuple(-a for a in self.coefficients))

    def __mul__(self, scalar: Rational) -> DivisorClass:
        s = as_fraction(scalar)
        return DivisorClass(tuple(s * a for a in self.coefficients))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Rational) -> DivisorClass:
        return self * (1 / as_fraction(scalar))

    def padded(self, length: int) -> DivisorClass:
        """Pullback to a model with more exceptional generators."""
        if length < len(self):
            raise DimensionError("cannot pad to a shorter basis")
        return DivisorClass(self.coefficients + (Fraction(0),) * (length - len(self)))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __repr__(self) -> str:
        body = ", ".join(str(c) for c in self.coefficients)
        return f"DivisorClass({body})"


@dataclass(frozen=True)
class SurfaceModel:
    """A base surface blown up ``n_exceptional`` times at (possibly infinitely near) points."""

    base: BaseSurface
    n_exceptional: int = 0

    @cached_property
    def rank(self) -> int:
        return self.base.rank + self.n_exceptional

    @property
    def basis_names(self) -> tuple[str, ...]:
        return self.base.generator_names + tuple(f"e{i}" for i in range(1, self.n_exceptional + 1))

    def gram_matrix(self) -> list[list[Fraction]]:
        r = self.base.rank
        g = [[Fraction(0)] * self.rank for _ in range(self.rank)]
        for i in range(r):
            for j in range(r):
                g[i][j] = Fraction(self.base.gram[i][j])
        for i in range(r, self.rank):
            g[i][i] = Fraction(-1)
        return g

    def exceptional(self, i: int) -> DivisorClass:
        """Total transform class of the i-th exceptional curve (1-based)."""
        if not 1 <= i <= self.n_exceptional:
            raise IndexError(f"no exceptional curve E{i} on this model")
        return DivisorClass.unit(self.rank, self.base.rank + i - 1)

    def from_base(self, coefficients: Sequence[Rational]) -> DivisorClass:
        if len(coefficients) != self.base.rank:
            raise DimensionError("base class has the wrong length")
        return DivisorClass(tuple(coefficients)).padded(self.rank)

    def blown_up(self, times: int = 1) -> SurfaceModel:
        return SurfaceModel(self.base, self.n_exceptional + times)


def intersect(d1: DivisorClass, d2: DivisorClass, surface: SurfaceModel) -> Fraction:
    """Intersection number on ``surface``; bilinear and symmetric."""
    n = surface.rank
    if len(d1) != n or len(d2) != n:
        raise DimensionError(
            f"classes of length {len(d1)}, {len(d2)} on a surface of rank {n}")
    r = surface.base.rank
    gram = surface.base.gram
    a, b = d1.coefficients, d2.coefficients
    # accumulate over a running common denominator and reduce once at the end
    num, den = 0, 1
    for i in range(r):
        ai = a[i]
        if ai:
            for j in range(r):
                g = gram[i][j]
                if g and b[j]:
                    tn = g * ai.numerator * b[j].numerator
                    td = ai.denominator * b[j].denominator
                    num, den = num * td + tn * den, den * td
    for i in range(r, n):
        ai, bi = a[i], b[i]
        if ai and bi:
            tn = ai.numerator * bi.numerator
            td = ai.denominator * bi.denominator
            num, den = num * td - tn * den, den * td
    return Fraction(num, den)


def canonical_class(surface: SurfaceModel) -> DivisorClass:
    """K = pullback of K_X plus one copy of every exceptional total transform."""
    return DivisorClass(tuple(surface.base.canonical) + (Fraction(1),) * surface.n_exceptional)


def hodge_signature(surface: SurfaceModel) -> tuple[int, int, int]:
    return inertia(surface.gram_matrix())


@dataclass(frozen=True)
class BoundaryComponent:
    curve: str
    base_class: tuple[int, ...]
    coefficient: Fraction

    def __post_init__(self):
        c = as_fraction(self.coefficient)
        if not 0 <= c < 1:
            raise ValueError(f"boundary coefficient {c} of {self.curve} is outside [0, 1)")
        object.__setattr__(self, "coefficient", c)
        object.__setattr__(self, "base_class", tuple(int(v) for v in self.base_class))


@dataclass(frozen=True)
class PairBoundary:
    components: tuple[BoundaryComponent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        ids = [c.curve for c in self.components]
        if len(set(ids)) != len(ids):
            raise ValueError("boundary curves must be distinct")

    @classmethod
    def of(cls, *parts: tuple[str, Sequence[int], Rational]) -> PairBoundary:
        return cls(tuple(BoundaryComponent(name, tuple(cl), as_fraction(c)) for name, cl, c in parts))

    def coefficient(self, curve: str) -> Fraction:
        for c in self.components:
            if c.curve == curve:
                return c.coefficient
        return Fraction(0)

    def curves(self) -> Iterable[str]:
        return (c.curve for c in self.components)


@dataclass(frozen=True)
class PairClass:
    """L = -(K_X + Delta) pulled back to a model, with the base checks."""

    L: DivisorClass
    degree: Fraction
    ample_on_base: bool


@lru_cache(maxsize=1024)
def pair_class(surface: SurfaceModel, boundary: PairBoundary) -> PairClass:
    base = surface.base
    coeffs = [-Fraction(k) for k in base.canonical]
    for comp in boundary.components:
        if len(comp.base_class) != base.rank:
            raise DimensionError(f"boundary curve {comp.curve} has a class of the wrong length")
        for i, v in enumerate(comp.base_class):
            coeffs[i] -= comp.coefficient * v
    L = surface.from_base(coeffs)
    degree = intersect(L, L, surface)
    base_model = SurfaceModel(base)
    L0 = base_model.from_base(coeffs)
    ample = degree > 0 and all(
        intersect(L0, base_model.from_base(cl), base_model) > 0
        for cl in base.extremal_curves.values())
    return PairClass(L, degree, ample)
