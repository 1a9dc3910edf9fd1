from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from logdelpezzo.families import coprime_weights, p1xp1_diag, p2_chain, p2_conic, quadric_chain
from logdelpezzo.toric import (Fan2D, LatticePolygon, NamedCase, ProductVerdict, det,
                               lattice_count, moment_polygon, polytope_volume_integral,
                               polytope_volume_oracle, product_type_verdict, star_subdivide_toward,
                               toric_intersections, weighted_blowup_fan)
from logdelpezzo.volume import volume_profile


def test_fan_validation():
    assert Fan2D.projective_plane().is_smooth()
    assert Fan2D.quadric().is_smooth()
    with pytest.raises(ValueError):
        Fan2D(((2, 0), (0, 1), (-1, -1)))
    with pytest.raises(ValueError):
        Fan2D(((1, 0), (-1, -1), (0, 1)))


def test_self_intersections_of_standard_fans():
    p2 = Fan2D.projective_plane()
    assert all(p2.self_intersection(r) == 1 for r in p2.rays)
    q = Fan2D.quadric()
    assert all(q.self_intersection(r) == 0 for r in q.rays)


@given(st.integers(1, 15), st.integers(1, 15))
def test_weighted_blowup_numbers(a, b):
    from math import gcd
    if gcd(a, b) != 1:
        with pytest.raises(ValueError):
            toric_intersections(a, b)
        return
    t = toric_intersections(a, b)
    assert t.F_l1 == F(1, b)
    assert t.F_l2 == F(1, a)
    assert t.F_F == F(-1, a * b)
    assert t.f0 == a * b


def test_star_subdivision_steps_are_smooth():
    for a, b in coprime_weights(12):
        if (a, b) == (1, 1):
            continue
        sub = star_subdivide_toward(a, b)
        assert all(f.is_smooth() for f in sub.fans)
        assert sub.generators[-1] == (a, b)
        assert sub.q[0] == sub.q[1] == 0
        for g in sub.generators:
            assert det((1, 0), g) >= 0 and det(g, (0, 1)) >= 0


def test_star_subdivision_rejects_bad_weights():
    for a, b in ((2, 4), (1, 2), (3, 0)):
        with pytest.raises(ValueError):
            star_subdivide_toward(a, b)


def test_polygon_area_and_clip():
    tri = LatticePolygon.triangle(3)
    assert tri.area() == F(9, 2)
    assert tri.clip((1, 1), 1).area() == F(4)
    assert tri.clip((1, 1), 4).area() == 0
    sq = LatticePolygon.rectangle(2, 2)
    assert sq.clip((1, 0), 1).area() == 2
    assert len(tri.lattice_points()) == 10


def test_oracle_rejects_negative_x():
    with pytest.raises(ValueError):
        polytope_volume_oracle(1, 1, LatticePolygon.triangle(3), -1)


def _samples(tau, n=25):
    return [tau * F(i, n - 1) for i in range(n)]


@pytest.mark.parametrize("delta", [F(0), F(1, 2)])
def test_oracle_matches_engine_on_plane(delta):
    pair = p2_conic(delta)
    poly = moment_polygon("P2", (3 - 2 * delta,))
    for a, b in coprime_weights(6):
        if (a, b) == (1, 1):
            continue
        div = p2_chain(pair, a, b, 0)
        fn = volume_profile(div).function
        for x in _samples(fn.tau * F(11, 10)):
            assert fn(x) == polytope_volume_oracle(a, b, poly, x)
        assert fn.integral() == polytope_volume_integral(a, b, poly)


def test_oracle_matches_engine_on_quadric():
    pair = p1xp1_diag(F(1, 3))
    s = 2 - F(1, 3)
    poly = moment_polygon("P1xP1", (s, s))
    for a, b in coprime_weights(5):
        if (a, b) == (1, 1):
            continue
        for jc in (0, 1):
            fn = volume_profile(quadric_chain(pair, a, b, jc)).function
            for x in _samples(fn.tau):
                assert fn(x) == polytope_volume_oracle(a, b, poly, x)


@given(st.integers(1, 8), st.integers(0, 8))
def test_section_count_matches_riemann_roch_on_plane(s, x):
    # h^0(sH - xE) on the blowup of P2 at a point, for 0 <= x <= s
    x = min(x, s)
    rr = (s * (s + 3) - x * (x + 1)) // 2 + 1
    assert lattice_count(1, 1, LatticePolygon.triangle(s), x) == rr


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 6))
def test_section_count_matches_riemann_roch_on_quadric(c1, c2, x):
    x = min(x, c1, c2)
    rr = (c1 * c2 * 2 + 2 * c1 + 2 * c2 - x * (x + 1)) // 2 + 1
    assert lattice_count(1, 1, LatticePolygon.rectangle(c2, c1), x) == rr


def test_weighted_fan_shape():
    fan = weighted_blowup_fan(3, 2)
    assert fan.self_intersection((3, 2)) == F(-1, 6)


def test_product_type_table():
    P, N, U = ProductVerdict.PRODUCT_TYPE, ProductVerdict.NOT_PRODUCT_TYPE, ProductVerdict.UNKNOWN
    assert product_type_verdict(NamedCase("p2_conic", "conic", F(1, 2))) is N
    assert product_type_verdict(NamedCase("p2_conic", "conic", F(0))) is N
    assert product_type_verdict(NamedCase("p2_conic", "line", F(0))) is P
    assert product_type_verdict(NamedCase("p2_conic", "line", F(1, 4))) is U
    assert product_type_verdict(NamedCase("p2_conic", "tangent_e2", F(1, 4))) is P
    assert product_type_verdict(NamedCase("p1xp1_diag", "diagonal", F(1, 4))) is N
    assert product_type_verdict(NamedCase("p1xp1_diag", "blowup_on", F(1, 4))) is P
    assert product_type_verdict(NamedCase("fm", "e", F(1, 4))) is U
