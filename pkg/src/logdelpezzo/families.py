"""Named pairs, named divisors over them, and the default parameter grids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .chain import AuxCurve, ChainProfile, PointSpec, build_chain, steps_for_q
from .exact import Rational, as_fraction, format_rational
from .picard import (BaseSurface, DivisorClass, PairBoundary, SurfaceKind,
                     SurfaceModel, pair_class)
from .toric import NamedCase, star_subdivide_toward
from .volume import CatalogCurve, CurveCatalog, DivisorOver

PAIR_FAMILIES = ("p2_conic", "p1xp1_diag", "p2_lines", "fm", "f1_einf")


class FamilyError(ValueError):
    """Parameters outside a family's legal range."""


@dataclass(frozen=True)
class Pair:
    family: str
    params: tuple[tuple[str, Fraction], ...]
    base: BaseSurface
    boundary: PairBoundary
    curves: tuple[AuxCurve, ...]

    def param(self, name: str) -> Fraction:
        return dict(self.params)[name]

    @property
    def label(self) -> str:
        body = ",".join(f"{k}={format_rational(v)}" for k, v in self.params)
        return f"{self.family}:{body}"

    def curve(self, curve_id: str) -> AuxCurve:
        for c in self.curves:
            if c.id == curve_id:
                return c
        raise KeyError(f"{self.family} has no curve {curve_id!r}")

    @property
    def ample(self) -> bool:
        return pair_class(SurfaceModel(self.base), self.boundary).ample_on_base


def _unit_interval(name: str, v: Rational, open_left: bool = False) -> Fraction:
    v = as_fraction(v)
    if not (0 < v < 1 if open_left else 0 <= v < 1):
        raise FamilyError(f"{name} = {v} is outside the legal range")
    return v


def p2_conic(delta: Rational) -> Pair:
    d = _unit_interval("delta", delta)
    base = BaseSurface.projective_plane()
    return Pair("p2_conic", (("delta", d),), base,
                PairBoundary.of(("C", (2,), d)), (AuxCurve("C", (2,)),))


def p1xp1_diag(delta: Rational) -> Pair:
    d = _unit_interval("delta", delta)
    base = BaseSurface.quadric()
    return Pair("p1xp1_diag", (("delta", d),), base,
                PairBoundary.of(("C", (1, 1), d)), (AuxCurve("C", (1, 1)),))


def p2_lines(d1: Rational, d2: Rational) -> Pair:
    d1 = _unit_interval("d1", d1)
    d2 = _unit_interval("d2", d2)
    base = BaseSurface.projective_plane()
    return Pair("p2_lines", (("d1", d1), ("d2", d2)), base,
                PairBoundary.of(("l1", (1,), d1), ("l2", (1,), d2)),
                (AuxCurve("l1", (1,)), AuxCurve("l2", (1,))))


def hirzebruch_pair(m: int, d1: Rational, d2: Rational) -> Pair:
    if int(m) != m or m < 0:
        raise FamilyError("m must be a nonnegative integer")
    m = int(m)
    d1 = _unit_interval("d1", d1)
    d2 = _unit_interval("d2", d2)
    base = BaseSurface.hirzebruch(m)
    pair = Pair("fm", (("m", Fraction(m)), ("d1", d1), ("d2", d2)), base,
                PairBoundary.of(("e", (1, 0), d1), ("l", (0, 1), d2)),
                (AuxCurve("e", (1, 0)), AuxCurve("l", (0, 1))))
    if not pair.ample:
        raise FamilyError(f"-(K+D) is not ample for m={m}, d1={d1}, d2={d2}")
    return pair


def f1_einf(delta: Rational) -> Pair:
    d = _unit_interval("delta", delta)
    base = BaseSurface.hirzebruch(1)
    return Pair("f1_einf", (("delta", d),), base,
                PairBoundary.of(("einf", (1, 1), d)),
                (AuxCurve("einf", (1, 1)), AuxCurve("e", (1, 0))))


def make_pair(family: str, **params) -> Pair:
    if family == "p2_conic":
        return p2_conic(params["delta"])
    if family == "p1xp1_diag":
        return p1xp1_diag(params["delta"])
    if family == "p2_lines":
        return p2_lines(params["d1"], params["d2"])
    if family == "fm":
        return hirzebruch_pair(int(params["m"]), params["d1"], params["d2"])
    if family == "f1_einf":
        return f1_einf(params["delta"])
    raise FamilyError(f"unknown pair family {family!r}")


# ----------------------------------------------------------------------------
# catalogs

def _generic_base_curves(base: BaseSurface) -> list[tuple[str, tuple[int, ...]]]:
    if base.kind is SurfaceKind.PROJECTIVE_PLANE:
        return [("line", (1,))]
    if base.kind is SurfaceKind.QUADRIC:
        return [("fiber1", (1, 0)), ("fiber2", (0, 1))]
    m = base.m
    return [("e", (1, 0)), ("fiber", (0, 1)), ("section", (1, m))]


def base_catalog(pair: Pair, extra: Iterable[AuxCurve] = ()) -> CurveCatalog:
    return _base_catalog(pair.base, tuple(pair.curves) + tuple(extra))


@lru_cache(maxsize=256)
def _base_catalog(base: BaseSurface, curves: tuple[AuxCurve, ...]) -> CurveCatalog:
    model = SurfaceModel(base)
    seen: dict[str, DivisorClass] = {}
    for name, cls in _generic_base_curves(base):
        seen[name] = model.from_base(cls)
    for c in curves:
        seen[c.id] = model.from_base(c.base_class)
    return CurveCatalog(tuple(CatalogCurve(k, v) for k, v in seen.items()))


def chain_catalog(pair: Pair, profile: ChainProfile) -> CurveCatalog:
    """E~_i, strict transforms of the declared curves, and generic curves."""
    model = profile.model
    out: dict[str, DivisorClass] = {}
    for i in range(1, profile.m + 1):
        out[f"E{i}"] = profile.exceptional_strict(i)
    for c in profile.aux:
        out[c.id] = profile.strict_transforms[c.id]
    for name, cls in _generic_base_curves(pair.base):
        if name not in out:
            out[name] = model.from_base(cls)
    if pair.base.kind is SurfaceKind.PROJECTIVE_PLANE:
        # a line through p1 in a direction avoided by the chain
        out["line_p1"] = model.from_base((1,)) - model.exceptional(1)
    return CurveCatalog(tuple(CatalogCurve(k, v) for k, v in out.items()))


# ----------------------------------------------------------------------------
# divisors

def curve_divisor(pair: Pair, curve_id: str, case: str | None = None) -> DivisorOver:
    """A prime divisor lying on the base surface itself."""
    model = SurfaceModel(pair.base)
    known = {c.id: c for c in pair.curves}
    generic = dict(_generic_base_curves(pair.base))
    if curve_id in known:
        cls = known[curve_id].base_class
    elif curve_id in generic:
        cls = generic[curve_id]
    else:
        raise KeyError(f"unknown curve {curve_id!r} on {pair.base.label}")
    L = pair_class(model, pair.boundary).L
    A = 1 - pair.boundary.coefficient(curve_id)
    return DivisorOver(
        id=curve_id, model=model, L=L, direction=model.from_base(cls),
        catalog=base_catalog(pair), log_discrepancy=A,
        verdict_case=NamedCase(pair.family, case or curve_id, _delta_of(pair)))


def _delta_of(pair: Pair) -> Fraction:
    p = dict(pair.params)
    return p.get("delta", Fraction(0))


def chain_divisor(pair: Pair, aux: Sequence[AuxCurve], steps: Sequence[PointSpec],
                  divisor_id: str, case: NamedCase | None = None,
                  toric_weights: tuple[int, int] | None = None) -> DivisorOver:
    """The last exceptional curve of a chain of point blowups."""
    declared = {c.id: c for c in pair.curves}
    for c in aux:
        declared[c.id] = c
    _, profile = build_chain(pair.base, pair.boundary, tuple(declared.values()), steps)
    model = profile.model
    L = pair_class(model, pair.boundary).L
    f = profile.f
    return DivisorOver(
        id=divisor_id, model=model, L=L, direction=profile.e_star[profile.m] / f,
        catalog=chain_catalog(pair, profile), log_discrepancy=profile.log_discrepancy,
        f0=Fraction(f), profile=profile, toric_weights=toric_weights,
        verdict_case=case or NamedCase(pair.family, "chain", _delta_of(pair)))


def blowup(pair: Pair, on: str | None = None) -> DivisorOver:
    """Ordinary blowup of a point, on the named curve or at a general point."""
    if pair.base.kind is SurfaceKind.QUADRIC and on in (None, "C"):
        # the two fibers through the point are part of the picture
        d = quadric_chain(pair, 1, 1, jc=1 if on else 0)
        return DivisorOver(**{**d.__dict__, "id": f"blowup_on_{on}" if on else "blowup_off"})
    steps = [PointSpec(on_aux=frozenset([on]) if on else frozenset())]
    name = f"blowup_on_{on}" if on else "blowup_off"
    return chain_divisor(pair, (), steps, name,
                         NamedCase(pair.family, "blowup_on" if on else "blowup_off",
                                   _delta_of(pair)),
                         toric_weights=(1, 1) if pair.base.kind is not SurfaceKind.HIRZEBRUCH else None)


def chain_q(a: int, b: int) -> tuple[int, ...]:
    return star_subdivide_toward(a, b).q


def _k_of(q: Sequence[int]) -> int:
    m = len(q) - 1
    if m == 1:
        return 1
    return max(i for i in range(2, m + 1) if q[i] == 0)


# A declared curve either follows its first j centres smoothly (an int) or
# carries an explicit multiplicity sequence at the leading centres.
ExtraCurves = Mapping[str, tuple[tuple[int, ...], "int | tuple[int, ...]"]]


def _declare_extras(extra: ExtraCurves | None, aux: list[AuxCurve],
                    followers: dict[str, int]) -> dict[str, tuple[int, ...]]:
    mults: dict[str, tuple[int, ...]] = {}
    for cid, (cls, through) in (extra or {}).items():
        aux.append(AuxCurve(cid, tuple(cls)))
        if isinstance(through, int):
            followers[cid] = through
        else:
            seq = tuple(int(v) for v in through)
            if any(x < y for x, y in zip(seq, seq[1:])):
                raise FamilyError(f"multiplicities of {cid} must not increase along free centres")
            followers[cid] = len(seq)
            mults[cid] = seq
    return mults


def _apply_multiplicities(steps: list[PointSpec], mults: Mapping[str, tuple[int, ...]]) -> list[PointSpec]:
    out = list(steps)
    for cid, seq in mults.items():
        for i, mu in enumerate(seq):
            if mu > 1:
                out[i] = replace(out[i], multiplicity={**dict(out[i].multiplicity), cid: mu})
    return out


def p2_chain(pair: Pair, a: int, b: int, jc: int = 0,
             extra: ExtraCurves | None = None) -> DivisorOver:
    """Weight-(a, b) chain on P2 with the conic through the first ``jc`` centres.

    The line l0 through p1 in the weight-a direction follows the chain up to
    p_k when jc <= 2; otherwise it only passes p1 and p2.  ``extra`` works as
    in :func:`quadric_chain`.
    """
    if pair.base.kind is not SurfaceKind.PROJECTIVE_PLANE:
        raise FamilyError("p2_chain needs a pair on P2")
    q = chain_q(a, b)
    k = _k_of(q)
    if not 0 <= jc <= k:
        raise FamilyError(f"jc = {jc} must lie in [0, k = {k}]")
    l0 = k if jc <= 2 else 2
    followers: dict[str, int] = {"l0": l0}
    if "C" in {c.id for c in pair.curves}:
        followers["C"] = jc
    elif jc:
        raise FamilyError("jc > 0 needs the conic pair")
    aux = [AuxCurve("l0", (1,))]
    mults = _declare_extras(extra, aux, followers)
    steps = _apply_multiplicities(steps_for_q(q, followers), mults)
    toric = jc <= 2
    delta = _delta_of(pair)
    if (a, b) == (2, 1) and jc == 2:
        name = "tangent_e2"
    elif toric:
        name = "toric"
    else:
        name = "chain"
    tag = "" if not extra else "," + ",".join(sorted(extra))
    return chain_divisor(pair, aux, steps, f"p2_chain({a},{b},jc={jc}{tag})",
                         NamedCase(pair.family, name, delta, (a, b)),
                         toric_weights=(a, b) if toric else None)


def quadric_chain(pair: Pair, a: int, b: int, jc: int = 0,
                  extra: ExtraCurves | None = None) -> DivisorOver:
    """Weight-(a, b) chain on P1xP1 with the diagonal through the first ``jc`` centres.

    For jc <= 1 the fiber g1 follows the chain up to p_k (the toric case);
    otherwise both fibers through p1 meet the chain only at p1.  ``extra``
    declares further curves as id -> (class, centres followed), where the
    second entry is a count or a multiplicity sequence.
    """
    if pair.base.kind is not SurfaceKind.QUADRIC:
        raise FamilyError("quadric_chain needs a pair on P1xP1")
    q = chain_q(a, b)
    k = _k_of(q)
    if not 0 <= jc <= k:
        raise FamilyError(f"jc = {jc} must lie in [0, k = {k}]")
    followers = {"C": jc, "g1": k if jc <= 1 else 1, "g2": 1}
    aux = [AuxCurve("g1", (1, 0)), AuxCurve("g2", (0, 1))]
    mults = _declare_extras(extra, aux, followers)
    steps = _apply_multiplicities(steps_for_q(q, followers), mults)
    toric = jc <= 1
    if (a, b) == (1, 1) and jc == 1:
        name = "blowup_on"
    else:
        name = "toric" if toric else "chain"
    tag = "" if not extra else "," + ",".join(sorted(extra))
    return chain_divisor(pair, aux, steps, f"quadric_chain({a},{b},jc={jc}{tag})",
                         NamedCase(pair.family, name, _delta_of(pair), (a, b)),
                         toric_weights=(a, b) if toric else None)


def extra_curve_candidates(pair: Pair, a: int, b: int, jc: int) -> list[dict]:
    """Curve configurations to try, in order, when the plain chain catalog is too small.

    Every listed curve exists for dimension reasons (its linear system has
    more sections than the number of centres it is asked to pass), so
    declaring it does not specialise the chain.
    """
    k = _k_of(chain_q(a, b))
    out: list[dict] = [{}]
    kind = pair.base.kind
    if kind is SurfaceKind.PROJECTIVE_PLANE:
        for j in range(min(k, 5), 2, -1):
            if min(jc, j) <= 4 and j > jc:
                out.append({"conic5": ((2,), j)})
        if b == 1 and jc > 2:
            # off the line germ: plane curves with a singular point at p1 whose
            # branch follows the free centres (conditions = dimension - 1)
            if k >= 7:
                out.append({"nodal_cubic": ((3,), (2,) + (1,) * 6)})
            if k >= 8:
                out.append({"sextic": ((6,), (3,) + (2,) * 7)})
    elif kind is SurfaceKind.QUADRIC:
        bis = {"bisection": ((1, 1), 3)} if k >= 3 and jc <= 2 else {}
        if bis:
            out.append(bis)
        for j in range(min(k, 5), 3, -1):
            if min(jc, j) <= 3 and j > jc:
                pair_curves = {"curve12": ((1, 2), j), "curve21": ((2, 1), j)}
                out.append(pair_curves)
                if bis:
                    out.append({**bis, **pair_curves})
    return out


def tangent_chain(pair: Pair) -> DivisorOver:
    """p1 on the conic, p2 the point of E1 on the conic's strict transform."""
    return p2_chain(pair, 2, 1, jc=2)


def p2_example(m: int) -> DivisorOver:
    """Chain of length m along a line for m - 1 steps, then a free point."""
    if m < 2:
        raise FamilyError("the example needs m >= 2")
    pair = p2_conic(0)
    q = (0,) * (m + 1)
    steps = steps_for_q(q, {"l": m - 1})
    return chain_divisor(pair, (AuxCurve("l", (1,)),), steps, f"p2_example(m={m})",
                         NamedCase(pair.family, "example_chain"))


def non_dreamy_chain() -> DivisorOver:
    """Nine centres following a smooth cubic B through one point."""
    pair = p2_conic(0)
    q = (0,) * 10
    aux = (AuxCurve("B", (3,)), AuxCurve("tangent", (1,)), AuxCurve("osc_conic", (2,)))
    steps = steps_for_q(q, {"B": 9, "tangent": 2, "osc_conic": 5})
    return chain_divisor(pair, aux, steps, "cubic_chain",
                         NamedCase(pair.family, "cubic_chain"))


# ----------------------------------------------------------------------------
# grids

def coprime_weights(max_a: int) -> list[tuple[int, int]]:
    from math import gcd
    return [(a, b) for a in range(1, max_a + 1) for b in range(1, a + 1) if gcd(a, b) == 1]


def rational_grid(lo: Rational, hi: Rational, max_den: int = 16, include_lo: bool = True,
                  include_hi: bool = False, extra: Iterable[Rational] = ()) -> list[Fraction]:
    lo, hi = as_fraction(lo), as_fraction(hi)
    vals = set()
    for q in range(1, max_den + 1):
        for p in range(0, q * int(hi) + q + 1):
            v = Fraction(p, q)
            if (lo < v or (include_lo and v == lo)) and (v < hi or (include_hi and v == hi)):
                vals.add(v)
    for v in extra:
        v = as_fraction(v)
        if (lo < v or (include_lo and v == lo)) and (v < hi or (include_hi and v == hi)):
            vals.add(v)
    return sorted(vals)


def default_grid(family: str, max_den: int | None = None) -> list[dict[str, Fraction]]:
    """Legal parameter points: one-parameter families use denominators <= 16."""
    if family == "p2_conic":
        return [{"delta": d} for d in rational_grid(0, 1, max_den or 16, extra=(Fraction(3, 4),))]
    if family == "p1xp1_diag":
        return [{"delta": d} for d in rational_grid(0, 1, max_den or 16, include_lo=False,
                                                     extra=(Fraction(1, 2),))]
    if family == "f1_einf":
        return [{"delta": d} for d in rational_grid(0, 1, max_den or 16)]
    if family == "p2_lines":
        g = rational_grid(0, 1, max_den or 6)
        return [{"d1": x, "d2": y} for x in g for y in g if x <= y and (x, y) != (0, 0)]
    if family == "fm":
        g1 = rational_grid(0, 1, max_den or 6, include_lo=False)
        g2 = rational_grid(0, 1, max_den or 6)
        out = []
        for m in range(0, 7):
            for x in g1:
                for y in g2:
                    if m + 2 - y > m * (2 - x):
                        out.append({"m": Fraction(m), "d1": x, "d2": y})
        return out
    raise FamilyError(f"unknown family {family!r}")


@dataclass(frozen=True)
class SuiteEntry:
    divisor: DivisorOver
    closed_form: str | None = None     # reference formula id, if any
    params: dict = field(default_factory=dict)


def divisor_suite(pair: Pair, max_a: int = 4) -> list[SuiteEntry]:
    """The witness divisors tested for a pair, in a fixed order."""
    fam = pair.family
    out: list[SuiteEntry] = []
    if fam == "p2_conic":
        d = pair.param("delta")
        out.append(SuiteEntry(curve_divisor(pair, "C", "conic"), "p2.conic", {"delta": d}))
        out.append(SuiteEntry(curve_divisor(pair, "line"), "p2.line", {"delta": d}))
        out.append(SuiteEntry(blowup(pair), "p2.blowup_off", {"delta": d}))
        out.append(SuiteEntry(blowup(pair, "C"), "p2.blowup_on", {"delta": d}))
        for a, b in coprime_weights(max_a):
            if (a, b) == (1, 1):
                continue
            k = _k_of(chain_q(a, b))
            for jc in range(0, min(k, 2) + 1):
                out.append(SuiteEntry(p2_chain(pair, a, b, jc)))
    elif fam == "p1xp1_diag":
        d = pair.param("delta")
        out.append(SuiteEntry(curve_divisor(pair, "C", "diagonal"), "quadric.diagonal", {"delta": d}))
        out.append(SuiteEntry(curve_divisor(pair, "fiber1"), None))
        out.append(SuiteEntry(blowup(pair), None))
        out.append(SuiteEntry(blowup(pair, "C"), "quadric.blowup_on", {"delta": d}))
        for a, b in coprime_weights(max_a):
            if (a, b) == (1, 1):
                continue
            for jc in (0, 1):
                out.append(SuiteEntry(quadric_chain(pair, a, b, jc)))
    elif fam == "p2_lines":
        d1, d2 = pair.param("d1"), pair.param("d2")
        out.append(SuiteEntry(curve_divisor(pair, "l2"), "lines.l2", {"d1": d1, "d2": d2}))
        out.append(SuiteEntry(curve_divisor(pair, "l1"), None))
        out.append(SuiteEntry(curve_divisor(pair, "line"), None))
    elif fam == "fm":
        m, d1, d2 = pair.param("m"), pair.param("d1"), pair.param("d2")
        out.append(SuiteEntry(curve_divisor(pair, "e"), "fm.e", {"m": m, "d1": d1, "d2": d2}))
        out.append(SuiteEntry(curve_divisor(pair, "l"), None))
        out.append(SuiteEntry(curve_divisor(pair, "section"), None))
    elif fam == "f1_einf":
        d = pair.param("delta")
        out.append(SuiteEntry(curve_divisor(pair, "e"), "f1.e", {"delta": d}))
        out.append(SuiteEntry(curve_divisor(pair, "einf"), "f1.einf", {"delta": d}))
    else:
        raise FamilyError(f"unknown family {fam!r}")
    return out
