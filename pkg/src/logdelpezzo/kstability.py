"""beta-hat reports, closed-form reference values and pair verdicts."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exact import Rational, as_fraction, decimal_str, format_rational
from .families import Pair, SuiteEntry, divisor_suite
from .picard import SurfaceKind
from .toric import ProductVerdict, product_type_verdict
from .volume import CertificationError, DivisorOver, VolumeProfile, volume_profile


class DomainError(ValueError):
    """Parameters outside the domain of a closed-form formula."""


@dataclass(frozen=True)
class BetaReport:
    divisor_id: str
    A: Fraction
    L2: Fraction
    epsilon: Fraction
    tau: Fraction
    epsilon_certified: bool
    tau_certified: bool
    integral: Fraction
    beta: Fraction
    product_type: ProductVerdict
    closed_form_beta: Fraction | None = None
    closed_form_id: str | None = None
    lemma_beta: Fraction | None = None
    f0: Fraction | None = None
    volume: VolumeProfile | None = field(default=None, repr=False, compare=False)

    @property
    def certified(self) -> bool:
        return self.epsilon_certified and self.tau_certified

    @property
    def consistency(self) -> bool:
        ok = True
        if self.closed_form_beta is not None:
            ok &= self.closed_form_beta == self.beta
        if self.lemma_beta is not None:
            ok &= self.lemma_beta == self.beta
            ok &= self.epsilon * self.tau == self.f0 * self.L2
        return ok

    @property
    def provenance(self) -> dict[str, str]:
        out = {"A": "chain" if self.f0 is not None else "boundary coefficient",
               "epsilon": "engine", "tau": "engine", "integral": "engine", "beta": "engine"}
        if self.closed_form_beta is not None:
            out["closed_form_beta"] = f"closed form {self.closed_form_id}"
        if self.lemma_beta is not None:
            out["lemma_beta"] = "1 - (eps + tau)/(3A)"
        return out

    def to_row(self) -> dict[str, str]:
        row: dict[str, str] = {"divisor": self.divisor_id}
        for name in ("A", "epsilon", "tau", "integral", "beta"):
            v = getattr(self, name)
            row[name] = format_rational(v)
            row[f"{name}_decimal"] = decimal_str(v)
        row["certified"] = str(self.certified).lower()
        row["product_type"] = self.product_type.value
        row["closed_form"] = "" if self.closed_form_beta is None else format_rational(self.closed_form_beta)
        row["consistent"] = str(self.consistency).lower()
        return row


def _lemma_applies(divisor: DivisorOver) -> bool:
    return (divisor.model.base.kind is SurfaceKind.PROJECTIVE_PLANE
            and divisor.profile is not None and divisor.profile.is_plt())


def beta(divisor: DivisorOver, closed_form: tuple[str, Mapping[str, Rational]] | None = None,
         allow_uncertified: bool = False) -> BetaReport:
    """beta-hat = 1 - int vol / (A (L^2)), with the cross-checks that apply."""
    vp = volume_profile(divisor)
    if not allow_uncertified and not vp.certified:
        raise CertificationError(f"thresholds of {divisor.id} are not certified by the catalog")
    A = divisor.log_discrepancy
    L2 = divisor.degree
    integral = vp.function.integral()
    value = 1 - integral / (A * L2)
    cf = cf_id = None
    if closed_form is not None:
        cf_id = closed_form[0]
        cf = reference_formula(cf_id, closed_form[1])
    lemma = None
    if _lemma_applies(divisor):
        lemma = 1 - (vp.epsilon + vp.tau) / (3 * A)
    verdict = (product_type_verdict(divisor.verdict_case) if divisor.verdict_case
               else ProductVerdict.UNKNOWN)
    return BetaReport(divisor.id, A, L2, vp.epsilon, vp.tau, vp.epsilon_certified,
                      vp.certified, integral, value, verdict, cf, cf_id, lemma,
                      divisor.f0, vp)


@dataclass(frozen=True)
class TauCheck:
    exercised: bool
    holds: bool


def tau_bound_check(report: BetaReport, n: int = 2) -> TauCheck:
    """If tau <= A then beta-hat >= 1/(n+1)."""
    if report.tau > report.A:
        return TauCheck(False, True)
    return TauCheck(True, report.beta >= Fraction(1, n + 1))


# ----------------------------------------------------------------------------
# closed forms

def _get(params: Mapping[str, Rational], *names: str) -> list[Fraction]:
    try:
        return [as_fraction(params[n]) for n in names]
    except KeyError as exc:
        raise DomainError(f"missing parameter {exc.args[0]!r}") from None


def _unit(v: Fraction, open_left: bool = False) -> None:
    if not (0 < v < 1 if open_left else 0 <= v < 1):
        raise DomainError(f"{v} is outside the family's range")


def reference_formula(family_id: str, params: Mapping[str, Rational]) -> Fraction:
    """Exact evaluation of a published closed form; used as an oracle only."""
    if family_id in ("p2.conic", "p2.line", "p2.blowup_off", "p2.blowup_on",
                     "quadric.diagonal", "quadric.blowup_on", "p2.tangent_chain"):
        (d,) = _get(params, "delta")
        _unit(d)
        if family_id == "p2.conic":
            return (3 - 4 * d) / (6 * (1 - d))
        if family_id in ("p2.line", "p2.blowup_off"):
            return Fraction(2, 3) * d
        if family_id == "p2.blowup_on":
            return d / (6 - 3 * d)
        if family_id == "quadric.diagonal":
            return (1 - 2 * d) / (3 * (1 - d))
        return Fraction(0)
    if family_id == "fm.e":
        m, d1, d2 = _get(params, "m", "d1", "d2")
        _unit(d1, open_left=True)
        _unit(d2)
        if m < 0 or m.denominator != 1:
            raise DomainError("m must be a nonnegative integer")
        if not m + 2 - d2 > m * (2 - d1):
            raise DomainError("the pair is not log del Pezzo for these parameters")
        num = 2 * m * d1 - 2 * m * d1 ** 2 - 6 * d1 + 3 * d1 * d2 - 2 * m
        return num / (3 * (1 - d1) * (m * d1 + 4 - 2 * d2))
    if family_id in ("f1.e", "f1.einf"):
        (d,) = _get(params, "delta")
        _unit(d)
        poly = 1 - 4 * d + d * d
        if family_id == "f1.e":
            return -2 * poly / (3 * (4 - d))
        return 2 * poly / (3 * (4 - d) * (1 - d))
    if family_id == "lines.l2":
        d1, d2 = _get(params, "d1", "d2")
        _unit(d1)
        _unit(d2)
        if d1 > d2 or (d1, d2) == (0, 0):
            raise DomainError("need d1 <= d2 and (d1, d2) != (0, 0)")
        return (-d2 - (d2 - d1)) / (3 * (1 - d2))
    if family_id == "p2.example_chain":
        (m,) = _get(params, "m")
        if m < 4 or m.denominator != 1:
            raise DomainError("m must be an integer >= 4")
        return (m - 2) / ((m + 1) * (m - 1))
    raise DomainError(f"unknown closed form {family_id!r}")


def lower_bound(bound_id: str, params: Mapping[str, Rational]) -> Fraction:
    """Published lower bounds for beta-hat on chain families (a, b, delta, jc, eps, A)."""
    p = {k: as_fraction(v) for k, v in params.items()}
    a, b, d = p.get("a"), p.get("b"), p.get("delta")
    if bound_id == "p2.on_curve_transverse":       # p1 on C, p2 off C
        return d * (2 * a - b) / (3 * (a + (1 - d) * b))
    if bound_id == "p2.off_curve":
        return Fraction(2, 3) * d
    if bound_id == "p2.third_on_first":            # p3 on E1, k = 2
        return d * (2 * b - a) / (3 * ((1 - d) * a + b))
    if bound_id == "p2.jc_two":
        return 2 * d * (a - 2 * b) / (3 * (a + (1 - 2 * d) * b))
    if bound_id == "p2.jc_large":
        return (3 - 4 * d) * (a - 2 * b) / (6 * ((1 - d) * a + b))
    if bound_id == "quadric.off_curve":
        return d / 2
    if bound_id == "quadric.convexity":            # needs eps and A
        s = 2 - d
        eps, A = p["eps"], p["A"]
        return 1 - (2 * a * b * s * s + eps * eps) / (3 * A * eps)
    if bound_id == "quadric.transverse":
        return (a - b) * d / (2 * (a + b - b * d))
    if bound_id == "quadric.small_jc":
        jc = p["jc"]
        return d * (a + b - 2 * jc * b) / (2 * (a + b - jc * b * d))
    if bound_id in ("quadric.k_two", "quadric.jc_equals_k"):
        return (1 - 2 * d) * (a - b) / (3 * (a + b - a * d))
    if bound_id == "quadric.jc_below_k":
        jc = p["jc"]
        return (3 * jc * (a + b) - 2 * (2 * a + jc * jc * b) + 2 * (a - jc * jc * b) * d) / (
            3 * jc * (a + b - jc * b * d))
    if bound_id == "quadric.line_curve":
        return (a - b + d * (a - 4 * b)) / (3 * (a + b - 2 * b * d))
    if bound_id == "quadric.conic_curve":
        return (5 * a - 9 * b + 2 * d * (a - 9 * b)) / (9 * (a + b - 3 * b * d))
    raise DomainError(f"unknown bound {bound_id!r}")


# ----------------------------------------------------------------------------
# verdicts

class Verdict(enum.Enum):
    NOT_K_SEMISTABLE = "NotKSemistable"
    NOT_K_POLYSTABLE = "NotKPolystable"
    CONSISTENT_WITH_K_POLYSTABLE = "ConsistentWithKPolystable"
    CONSISTENT_WITH_K_SEMISTABLE_ONLY = "ConsistentWithKSemistableOnly"


@dataclass(frozen=True)
class PairVerdict:
    pair: str
    verdict: Verdict
    reports: tuple[BetaReport, ...]
    witnesses: tuple[str, ...]
    skipped: tuple[str, ...]
    suite_infimum: Fraction | None
    infimum_label: str = "suite-relative"

    def signs(self) -> dict[str, int]:
        return {r.divisor_id: (r.beta > 0) - (r.beta < 0) for r in self.reports}


def _report_for(entry: SuiteEntry, allow_uncertified: bool) -> BetaReport | None:
    cf = (entry.closed_form, entry.params) if entry.closed_form else None
    try:
        return beta(entry.divisor, cf, allow_uncertified=allow_uncertified)
    except CertificationError:
        return None


def classify_pair(pair: Pair, suite: Sequence[SuiteEntry] | None = None,
                  max_a: int = 4) -> PairVerdict:
    """Verdict of the tested suite; positive outcomes are only 'consistent with'."""
    if not pair.ample:
        raise DomainError(f"{pair.label} is not a log del Pezzo pair")
    suite = list(suite) if suite is not None else divisor_suite(pair, max_a)
    reports, skipped = [], []
    for entry in suite:
        r = _report_for(entry, allow_uncertified=False)
        if r is None:
            skipped.append(entry.divisor.id)
        else:
            reports.append(r)
    negative = [r.divisor_id for r in reports if r.beta < 0]
    zero_np = [r.divisor_id for r in reports
               if r.beta == 0 and r.product_type is ProductVerdict.NOT_PRODUCT_TYPE]
    zero_unknown = [r.divisor_id for r in reports
                    if r.beta == 0 and r.product_type is ProductVerdict.UNKNOWN]
    if negative:
        verdict, witnesses = Verdict.NOT_K_SEMISTABLE, negative
    elif zero_np:
        verdict, witnesses = Verdict.NOT_K_POLYSTABLE, zero_np
    elif zero_unknown:
        verdict, witnesses = Verdict.CONSISTENT_WITH_K_SEMISTABLE_ONLY, zero_unknown
    else:
        verdict, witnesses = Verdict.CONSISTENT_WITH_K_POLYSTABLE, []
    non_product = [r.beta for r in reports if r.product_type is not ProductVerdict.PRODUCT_TYPE]
    inf = min(non_product) if non_product else None
    return PairVerdict(pair.label, verdict, tuple(reports), tuple(witnesses),
                       tuple(skipped), inf)
