from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from logdelpezzo.exact import exact_sqrt
from logdelpezzo.families import (blowup, coprime_weights, curve_divisor,
                                  non_dreamy_chain, p1xp1_diag, p2_chain, p2_conic, p2_example)
from logdelpezzo.picard import BaseSurface, DivisorClass, SurfaceModel, intersect
from logdelpezzo.volume import (CatalogCurve, CatalogInconsistency, CertificationError,
                                CurveCatalog, DivisorOver, PiecewiseQuadratic, QuadraticPiece,
                                certify_nef, convexity_bound_check, default_sample_pairs,
                                integrate_volume, nef_threshold, pseff_threshold,
                                volume_function, volume_profile, volume_rows, zariski_decompose)
from logdelpezzo.volume import _smallest_root_after


def _suite():
    out = []
    for d in (F(0), F(1, 4), F(1, 2)):
        pair = p2_conic(d)
        out += [curve_divisor(pair, "C", "conic"), blowup(pair), blowup(pair, "C")]
        for a, b in coprime_weights(4):
            if (a, b) != (1, 1):
                out.append(p2_chain(pair, a, b, 0))
                out.append(p2_chain(pair, a, b, 1))
    out += [p2_example(m) for m in (4, 6)] + [non_dreamy_chain()]
    out.append(blowup(p1xp1_diag(F(1, 3)), "C"))
    return out


SUITE = _suite()


def test_blowup_volume_closed_form():
    # vol(sH - xE) = s^2 - x^2 on [0, s]
    for d in (F(0), F(1, 3)):
        s = 3 - 2 * d
        fn = volume_function(blowup(p2_conic(d)))
        assert len(fn.pieces) == 1
        assert fn.pieces[0] == QuadraticPiece(F(0), s, s * s, F(0), F(-1))
        assert fn.integral() == F(2, 3) * s ** 3


def test_line_chain_has_two_pieces():
    prof = volume_profile(p2_example(5))
    assert prof.epsilon == F(15, 4)
    assert prof.tau == 12
    assert len(prof.function.pieces) == 2
    assert prof.binding == ("l",)
    assert prof.certified


@pytest.mark.parametrize("div", SUITE, ids=lambda d: d.id)
def test_profile_invariants(div):
    vp = volume_profile(div)
    fn = vp.function
    assert vp.certified
    assert fn(0) == div.degree
    assert fn(fn.tau) == 0
    # continuity and monotone decrease at every breakpoint
    for p, nxt in zip(fn.pieces, fn.pieces[1:]):
        assert p(p.end) == nxt(p.end)
        assert p.derivative(p.end) == nxt.derivative(p.end)
    for p in fn.pieces:
        assert p.derivative(p.start) <= 0 and p.derivative(p.end) <= 0
    # on [0, eps] the volume is (L - x dir)^2
    first = fn.pieces[0]
    assert first.c1 == -2 * intersect(div.L, div.direction, div.model)
    assert first.c2 == intersect(div.direction, div.direction, div.model)
    if div.is_exceptional:
        assert first.c1 == 0 and first.c2 == -1 / div.f0
    assert fn.integral() == integrate_volume(fn)


@pytest.mark.parametrize("div", SUITE, ids=lambda d: d.id)
def test_convexity_inequalities(div):
    fn = volume_function(div)
    pairs = default_sample_pairs(fn)
    assert len(pairs) == 10
    rep = convexity_bound_check(fn, pairs)
    assert rep.ok, rep


@given(st.sampled_from(SUITE), st.fractions(0, 1, max_denominator=40),
       st.fractions(0, 1, max_denominator=40), st.fractions(0, 1, max_denominator=40))
def test_square_root_of_volume_is_concave(div, s, t, lam):
    fn = volume_function(div)
    x, y = s * fn.tau, t * fn.tau
    z = lam * x + (1 - lam) * y
    # sqrt(vol(z)) >= lam sqrt(vol(x)) + (1 - lam) sqrt(vol(y)), squared out exactly
    vx, vy, vz = fn(x), fn(y), fn(z)
    rhs_sq_terms = (lam * lam * vx, (1 - lam) ** 2 * vy, lam * (1 - lam))
    # (a + b)^2 <= vz  with a = lam sqrt(vx), b = (1-lam) sqrt(vy)
    # <=> 2 lam (1-lam) sqrt(vx vy) <= vz - lam^2 vx - (1-lam)^2 vy
    slack = vz - rhs_sq_terms[0] - rhs_sq_terms[1]
    cross = 2 * lam * (1 - lam)
    assert slack >= 0
    assert slack * slack >= cross * cross * vx * vy


def test_thresholds_and_rows():
    div = p2_example(4)
    assert nef_threshold(div) == 4
    assert pseff_threshold(div) == 9
    rows = volume_rows(volume_profile(div))
    assert rows[0]["x"] == "0" and rows[0]["vol"] == "9"
    assert rows[-1]["vol"] == "0"
    assert any("l" in r["negative_support"].split() for r in rows)


def test_zariski_decompose_direct():
    model = SurfaceModel(BaseSurface.projective_plane(), 1)
    H, E = model.from_base((1,)), model.exceptional(1)
    cat = CurveCatalog((CatalogCurve("E", E), CatalogCurve("line_p", H - E)))
    res = zariski_decompose(model, 2 * H + 3 * E, cat)
    assert res.negative_support == ("E",)
    assert res.negative_coefficients == (F(3),)
    assert res.positive_part == 2 * H
    nef = zariski_decompose(model, 3 * H - E, cat)
    assert nef.negative_support == ()
    with pytest.raises(CertificationError):
        zariski_decompose(model, -H, cat)


def test_certify_nef():
    model = SurfaceModel(BaseSurface.projective_plane(), 1)
    H, E = model.from_base((1,)), model.exceptional(1)
    cat = CurveCatalog((CatalogCurve("E", E), CatalogCurve("line_p", H - E)))
    assert certify_nef(H, cat, model)
    assert not certify_nef(H + E, cat, model)


def test_catalog_validation():
    c = DivisorClass.of(1, 0)
    with pytest.raises(ValueError):
        CurveCatalog((CatalogCurve("a", c), CatalogCurve("a", c)))
    with pytest.raises(ValueError):
        CurveCatalog((CatalogCurve("a", DivisorClass.of(F(1, 2), 0)),))


def test_nonnegative_definite_support_is_rejected():
    # two (0)-curves declared in the catalog as if both were negative
    model = SurfaceModel(BaseSurface.quadric())
    f1, f2 = model.from_base((1, 0)), model.from_base((0, 1))
    cat = CurveCatalog((CatalogCurve("f1", f1), CatalogCurve("f2", f2)))
    with pytest.raises(CatalogInconsistency):
        zariski_decompose(model, f1 - f2, cat, require_certificate=False)


def test_uncertified_profile_is_flagged():
    # without the line through the centre, s(H - E) has no effective expression in the catalog
    div = blowup(p2_conic(0), "C")
    thin = CurveCatalog(tuple(c for c in div.catalog if c.id != "line_p1"))
    bad = DivisorOver(**{**div.__dict__, "catalog": thin})
    vp = volume_profile(bad)
    assert not vp.certified
    assert vp.function == volume_function(div)
    from logdelpezzo.kstability import beta
    with pytest.raises(CertificationError):
        beta(bad)
    assert beta(bad, allow_uncertified=True).beta == beta(div).beta


def test_piecewise_validation_and_eval():
    with pytest.raises(ValueError):
        PiecewiseQuadratic((QuadraticPiece(F(1), F(2), F(0), F(0), F(0)),))
    fn = PiecewiseQuadratic((QuadraticPiece(F(0), F(1), F(2), F(0), F(-1)),
                             QuadraticPiece(F(1), F(2), F(4), F(-4), F(1))))
    assert fn(F(1)) == 1 and fn(F(3)) == 0
    assert fn.derivative(F(1), "left") == -2 and fn.derivative(F(1), "right") == -2
    with pytest.raises(ValueError):
        fn(F(-1))
    with pytest.raises(ValueError):
        convexity_bound_check(fn, [(F(0), F(1))])


def test_smallest_root_after():
    assert _smallest_root_after(F(4), F(0), F(-1), F(0)) == 2
    assert _smallest_root_after(F(2), F(0), F(-1), F(0)) == "irrational"
    # both irrational roots lie before x0
    assert _smallest_root_after(F(2), F(0), F(-1), F(5)) is None
    assert _smallest_root_after(F(1), F(-1), F(0), F(0)) == 1
    assert exact_sqrt(F(2)) is None
