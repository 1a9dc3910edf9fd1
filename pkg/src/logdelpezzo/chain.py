"""Chains of point blowups described purely by incidence data.

A chain is built from a list of :class:`PointSpec`; the i-th spec says where
the i-th centre sits: on the previous exceptional curve (always, for i >= 2),
possibly also on the strict transform of one earlier exceptional curve, and
on some auxiliary curves with given multiplicities.  No coordinates are used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .picard import (BaseSurface, DivisorClass, PairBoundary, SurfaceModel,
                     intersect)


class ChainError(ValueError):
    """The point data does not describe a valid chain of blowups."""


class SNCViolation(ChainError):
    pass


class IncidenceError(ChainError):
    pass


class PltViolation(ChainError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class AuxCurve:
    """A curve on the base surface that the chain may pass through."""

    id: str
    base_class: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "base_class", tuple(int(v) for v in self.base_class))
        if not any(self.base_class):
            raise ValueError(f"curve {self.id} has the zero class")


@dataclass(frozen=True)
class PointSpec:
    """Position of one blowup centre.

    ``multiplicity`` maps an aux curve id to the multiplicity of its strict
    transform at the point (1 for a smooth branch, the default); this is also
    the local intersection it uses up against each exceptional curve through
    the point.
    """

    on_previous_exceptional: int | None = None
    on_earlier_exceptional: int | None = None
    on_aux: frozenset[str] = frozenset()
    multiplicity: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        earlier = self.on_earlier_exceptional
        if isinstance(earlier, (list, tuple, set, frozenset)):
            vals = sorted(set(earlier))
            if len(vals) > 1:
                raise SNCViolation(
                    f"a centre can lie on at most one earlier exceptional curve, got {vals}")
            earlier = vals[0] if vals else None
        if earlier == 0:
            earlier = None
        object.__setattr__(self, "on_earlier_exceptional", earlier)
        object.__setattr__(self, "on_aux", frozenset(self.on_aux))
        mult = self.multiplicity
        if isinstance(mult, Mapping):
            mult = tuple(mult.items())
        mult = tuple(sorted((str(k), int(v)) for k, v in mult))
        for cid, v in mult:
            if v < 1:
                raise ValueError(f"multiplicity of {cid} must be positive")
            if cid not in self.on_aux:
                raise ValueError(f"multiplicity given for {cid}, which is not on the point")
        object.__setattr__(self, "multiplicity", mult)

    def mult(self, curve: str) -> int:
        if curve not in self.on_aux:
            return 0
        return dict(self.multiplicity).get(curve, 1)


@dataclass(frozen=True)
class ChainProfile:
    """All derived combinatorics of a built chain (indices are 1-based in the API)."""

    model: SurfaceModel
    boundary: PairBoundary
    aux: tuple[AuxCurve, ...]
    steps: tuple[PointSpec, ...]
    q: tuple[int, ...]                      # q[i], i = 0..m (q[0] = q[1] = 0)
    e_star: tuple[DivisorClass, ...]        # E_i^*, i = 0..m
    ab: tuple[tuple[int, int], ...]         # (a_i, b_i), i = 0..m
    A: tuple[Fraction, ...]                 # A_(X,Delta)(E_i), i = 1..m at A[i-1]
    multiplicities: Mapping[str, tuple[int, ...]] = field(repr=False)
    strict_transforms: Mapping[str, DivisorClass] = field(repr=False)

    @property
    def base(self) -> BaseSurface:
        return self.model.base

    @property
    def m(self) -> int:
        return len(self.steps)

    @property
    def f(self) -> int:
        return int(self.strict_coefficients(self.e_star[self.m])[self.m - 1])

    @property
    def k(self) -> int | None:
        if self.m < 2:
            return None
        return max(i for i in range(2, self.m + 1) if self.q[i] == 0)

    @property
    def log_discrepancy(self) -> Fraction:
        return self.A[-1]

    def exceptional_strict(self, i: int) -> DivisorClass:
        return self.strict_transforms[f"E{i}"]

    def aux_curve(self, curve: str) -> AuxCurve:
        for c in self.aux:
            if c.id == curve:
                return c
        raise KeyError(f"unknown curve id {curve!r}")

    def strict_coefficients(self, d: DivisorClass) -> list[Fraction]:
        """Coefficients on E~_1..E~_m when ``d`` is written as base pullback + sum d_i E~_i."""
        r = self.model.base.rank
        coeffs: list[Fraction] = [Fraction(0)] * (self.m + 1)
        for i in range(1, self.m + 1):
            v = d[r + i - 1]
            if i >= 2:
                v += coeffs[i - 1]
            if self.q[i]:
                v += coeffs[self.q[i]]
            coeffs[i] = v
        return coeffs[1:]

    def intersect(self, d1: DivisorClass, d2: DivisorClass) -> Fraction:
        return intersect(d1, d2, self.model)

    def dual_graph(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {i: [] for i in range(1, self.m + 1)}
        for i in range(1, self.m + 1):
            for j in range(i + 1, self.m + 1):
                if self.intersect(self.exceptional_strict(i), self.exceptional_strict(j)) > 0:
                    adj[i].append(j)
                    adj[j].append(i)
        return adj

    def is_plt(self) -> bool:
        try:
            self.check_plt()
        except PltViolation:
            return False
        return True

    def check_plt(self) -> None:
        for i, nbrs in self.dual_graph().items():
            if len(nbrs) > 2:
                raise PltViolation(
                    f"dual graph branches at E{i} (neighbours {sorted(nbrs)})", i)


def _succ_lists(q: Sequence[int], m: int) -> dict[int, list[int]]:
    succ: dict[int, list[int]] = {j: [] for j in range(1, m + 1)}
    for t in range(2, m + 1):
        succ[t - 1].append(t)
        if q[t]:
            succ[q[t]].append(t)
    return succ


def build_chain(base: BaseSurface,
                boundary: PairBoundary,
                aux: Sequence[AuxCurve],
                steps: Sequence[PointSpec]) -> tuple[SurfaceModel, ChainProfile]:
    """Blow up the described centres one after another and derive the combinatorics."""
    if not steps:
        raise ChainError("a chain needs at least one blowup")
    aux = tuple(aux)
    ids = [c.id for c in aux]
    if len(set(ids)) != len(ids):
        raise ChainError("aux curve ids must be distinct")
    by_id = {c.id: c for c in aux}
    for c in aux:
        if len(c.base_class) != base.rank:
            raise ChainError(f"curve {c.id} has a class of the wrong length for {base.label}")
    for comp in boundary.components:
        if comp.curve in by_id and by_id[comp.curve].base_class != comp.base_class:
            raise ChainError(f"boundary curve {comp.curve} disagrees with the aux declaration")

    base_model = SurfaceModel(base)
    pair_left: dict[tuple[str, str], int] = {}
    for i, c1 in enumerate(aux):
        for c2 in aux[i + 1:]:
            pair_left[(c1.id, c2.id)] = int(intersect(
                base_model.from_base(c1.base_class), base_model.from_base(c2.base_class), base_model))
    # remaining local intersection of each aux curve with each exceptional curve
    against_exc: dict[tuple[str, int], int] = {}

    m = len(steps)
    q = [0, 0]
    mults: dict[str, list[int]] = {c.id: [] for c in aux}
    A: list[Fraction] = []
    norm_steps: list[PointSpec] = []
    for t, spec in enumerate(steps, start=1):
        prev = spec.on_previous_exceptional
        if t == 1:
            if prev not in (None, 0):
                raise ChainError("the first centre lies on the base, not on an exceptional curve")
            if spec.on_earlier_exceptional is not None:
                raise ChainError("the first centre cannot lie on an earlier exceptional curve")
        else:
            if prev is None:
                prev = t - 1
            if prev != t - 1:
                raise ChainError(f"p{t} must lie on E{t - 1}, spec says E{prev}")
            j = spec.on_earlier_exceptional
            if j is not None:
                if not 1 <= j <= t - 2:
                    raise ChainError(f"p{t} cannot lie on E{j}: need 1 <= j <= {t - 2}")
                allowed = {t - 2, q[t - 1]} - {0}
                if j not in allowed:
                    raise IncidenceError(
                        f"E{j} does not meet E{t - 1} on X{t - 1}; p{t} can only be on "
                        f"E{sorted(allowed)}")
            q.append(j or 0)
        unknown = set(spec.on_aux) - set(by_id)
        if unknown:
            raise IncidenceError(f"p{t} refers to undeclared curves {sorted(unknown)}")
        here = [c for c in spec.on_aux]
        exc_here = []
        if t >= 2:
            exc_here.append(t - 1)
            if q[t]:
                exc_here.append(q[t])
        for cid in here:
            mu = spec.mult(cid)
            for j in exc_here:
                left = against_exc.get((cid, j), 0)
                if left < mu:
                    raise IncidenceError(
                        f"curve {cid} no longer meets E{j} at the required multiplicity for p{t}")
                against_exc[(cid, j)] = left - mu
        for a_i, c1 in enumerate(aux):
            for c2 in aux[a_i + 1:]:
                mu = spec.mult(c1.id) * spec.mult(c2.id)
                if mu:
                    pair_left[(c1.id, c2.id)] -= mu
                    if pair_left[(c1.id, c2.id)] < 0:
                        raise IncidenceError(
                            f"curves {c1.id} and {c2.id} would meet more than their "
                            f"intersection number allows at p{t}")
        for c in aux:
            mu = spec.mult(c.id)
            mults[c.id].append(mu)
            if mu:
                against_exc[(c.id, t)] = mu
        # log discrepancy of E_t over (X, Delta)
        through = Fraction(0)
        for comp in boundary.components:
            if comp.curve in spec.on_aux:
                through += comp.coefficient * spec.mult(comp.curve)
        if t >= 2:
            through += 1 - A[t - 2]
            if q[t]:
                through += 1 - A[q[t] - 1]
        A.append(2 - through)
        norm_steps.append(PointSpec(None if t == 1 else t - 1, spec.on_earlier_exceptional,
                                    spec.on_aux, spec.multiplicity))

    model = SurfaceModel(base, m)
    succ = _succ_lists(q, m)
    strict: dict[str, DivisorClass] = {}
    for j in range(1, m + 1):
        cls = model.exceptional(j)
        for t in succ[j]:
            cls = cls - model.exceptional(t)
        strict[f"E{j}"] = cls
    for c in aux:
        cls = model.from_base(c.base_class)
        for t, mu in enumerate(mults[c.id], start=1):
            if mu:
                cls = cls - mu * model.exceptional(t)
        strict[c.id] = cls

    e_star = [DivisorClass.zero(model.rank), model.exceptional(1)]
    ab = [(1, 0), (1, 1)]
    for i in range(2, m + 1):
        e_star.append(e_star[q[i]] + e_star[i - 1] + model.exceptional(i))
        ab.append((ab[q[i]][0] + ab[i - 1][0], ab[q[i]][1] + ab[i - 1][1]))

    profile = ChainProfile(
        model=model, boundary=boundary, aux=aux, steps=tuple(norm_steps), q=tuple(q),
        e_star=tuple(e_star), ab=tuple(ab), A=tuple(A),
        multiplicities={k: tuple(v) for k, v in mults.items()},
        strict_transforms=strict)
    return model, profile


def log_discrepancy_sequence(profile: ChainProfile) -> list[Fraction]:
    return list(profile.A)


@dataclass(frozen=True)
class PltData:
    a: int
    b: int
    f: int
    k: int | None


def plt_profile(profile: ChainProfile) -> PltData:
    """(a, b, f, k) of a plt-type chain, with the structural identities asserted."""
    profile.check_plt()
    a, b = profile.ab[profile.m]
    f = profile.f
    k = profile.k
    if math.gcd(a, b) != 1:
        raise AssertionError(f"weights ({a}, {b}) are not coprime")
    if f != a * b:
        raise AssertionError(f"f = {f} differs from a*b = {a * b}")
    if k is not None and k != -(-a // b):
        raise AssertionError(f"k = {k} differs from ceil(a/b) = {-(-a // b)}")
    return PltData(a, b, f, k)


@dataclass(frozen=True)
class PullbackDecomposition:
    strict: DivisorClass
    multiplicities: tuple[int, ...]
    exceptional_coefficients: tuple[Fraction, ...]   # coefficients of E~_1..E~_m in pi^*G


def pullback_decomposition(profile: ChainProfile, curve: str) -> PullbackDecomposition:
    """pi^*G = G~ + sum n_i E~_i for a declared aux curve G."""
    if curve not in profile.multiplicities:
        raise KeyError(f"unknown curve id {curve!r}")
    strict = profile.strict_transforms[curve]
    c = profile.aux_curve(curve)
    pull = profile.model.from_base(c.base_class)
    coeffs = profile.strict_coefficients(pull - strict)
    return PullbackDecomposition(strict, profile.multiplicities[curve], tuple(coeffs))


def steps_for_q(q: Sequence[int], followers: Mapping[str, int] | None = None) -> list[PointSpec]:
    """PointSpecs for a q-sequence (q[0..m]) with curves through the first j centres.

    ``followers`` maps an aux id to how many leading centres it passes
    through (smoothly).
    """
    followers = dict(followers or {})
    m = len(q) - 1
    steps = []
    for t in range(1, m + 1):
        on = frozenset(cid for cid, j in followers.items() if t <= j)
        steps.append(PointSpec(None if t == 1 else t - 1, q[t] if t >= 2 and q[t] else None, on))
    return steps
