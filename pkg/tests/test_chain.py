from fractions import Fraction as F
from math import gcd

import pytest
from hypothesis import given, strategies as st

from logdelpezzo.chain import (AuxCurve, ChainError, IncidenceError, PltViolation, PointSpec,
                               SNCViolation, build_chain, log_discrepancy_sequence, plt_profile,
                               pullback_decomposition, steps_for_q)
from logdelpezzo.families import (blowup, chain_q, coprime_weights, non_dreamy_chain, p1xp1_diag,
                                  p2_chain, p2_conic, p2_example, quadric_chain, tangent_chain)
from logdelpezzo.picard import BaseSurface, PairBoundary, intersect

P2 = BaseSurface.projective_plane()
EMPTY = PairBoundary()


@st.composite
def q_sequences(draw, max_m=9):
    """Legal q-sequences: p_t sits on E_{t-1} and on at most one earlier curve meeting it."""
    m = draw(st.integers(1, max_m))
    q = [0, 0]
    for t in range(2, m + 1):
        options = [0] + sorted({t - 2, q[t - 1]} - {0})
        q.append(draw(st.sampled_from(options)))
    return tuple(q)


def _profile(q, base=P2, boundary=EMPTY, aux=(), followers=None):
    return build_chain(base, boundary, aux, steps_for_q(q, followers))[1]


@given(q_sequences())
def test_dual_basis_identity(q):
    prof = _profile(q)
    for i in range(1, prof.m + 1):
        for j in range(1, prof.m + 1):
            v = prof.intersect(prof.e_star[i], prof.exceptional_strict(j))
            assert v == (-1 if i == j else 0)


@given(q_sequences())
def test_exceptional_strict_transforms_are_negative_curves(q):
    prof = _profile(q)
    K = prof.model.from_base(P2.canonical) + sum(
        (prof.model.exceptional(i) for i in range(1, prof.m + 1)), prof.model.from_base((0,)))
    for i in range(1, prof.m + 1):
        e = prof.exceptional_strict(i)
        # smooth rational curves: adjunction gives E^2 + K.E = -2
        assert prof.intersect(e, e) + prof.intersect(K, e) == -2
        assert prof.intersect(e, e) <= -1


@given(q_sequences())
def test_recursions(q):
    prof = _profile(q)
    assert prof.e_star[0].is_zero()
    assert prof.e_star[1] == prof.model.exceptional(1)
    for i in range(2, prof.m + 1):
        assert prof.e_star[i] == prof.e_star[q[i]] + prof.e_star[i - 1] + prof.model.exceptional(i)
        a, b = prof.ab[i]
        assert (a, b) == (prof.ab[q[i]][0] + prof.ab[i - 1][0], prof.ab[q[i]][1] + prof.ab[i - 1][1])


def _is_toric_pattern(q):
    m = len(q) - 1
    nonzero = [i for i in range(2, m + 1) if q[i]]
    return not nonzero or all(q[i] for i in range(nonzero[0], m + 1))


@given(q_sequences())
def test_plt_iff_toric_pattern(q):
    prof = _profile(q)
    assert prof.is_plt() == _is_toric_pattern(q)


@given(q_sequences())
def test_plt_profile_identities(q):
    prof = _profile(q)
    if not prof.is_plt():
        with pytest.raises(PltViolation):
            plt_profile(prof)
        return
    data = plt_profile(prof)
    a, b = data.a, data.b
    assert gcd(a, b) == 1 and a >= b
    assert data.f == a * b
    if prof.m >= 2:
        assert data.k == -(-a // b)
        coeffs = prof.strict_coefficients(prof.e_star[prof.m])
        for i in range(1, data.k + 1):
            assert coeffs[i - 1] == min(i * b, a)
    else:
        assert data.k is None
    # at delta = 0 the log discrepancy is a + b
    assert prof.log_discrepancy == a + b


def test_plt_violation_reports_index():
    prof = _profile((0, 0, 0, 1, 0))
    with pytest.raises(PltViolation) as info:
        prof.check_plt()
    assert info.value.index == 3


def test_star_subdivision_matches_chain():
    from logdelpezzo.toric import star_subdivide_toward
    for a, b in coprime_weights(12):
        if (a, b) == (1, 1):
            continue
        sub = star_subdivide_toward(a, b)
        prof = _profile(sub.q)
        assert tuple(prof.ab[1:]) == sub.generators
        assert prof.ab[-1] == (a, b)


def test_single_blowup_on_conic():
    for d in (F(0), F(1, 3), F(1, 2)):
        div = blowup(p2_conic(d), "C")
        assert div.profile.m == 1
        assert div.log_discrepancy == 2 - d
        assert plt_profile(div.profile) == plt_profile(div.profile).__class__(1, 1, 1, None)


def test_tangent_chain_data():
    for d in (F(0), F(1, 4), F(5, 8)):
        div = tangent_chain(p2_conic(d))
        assert div.log_discrepancy == 3 - 2 * d
        data = plt_profile(div.profile)
        assert (data.a, data.b, data.f, data.k) == (2, 1, 2, 2)


def test_cubic_chain_pullback():
    prof = non_dreamy_chain().profile
    assert prof.strict_coefficients(prof.e_star[9]) == list(range(1, 10))
    B = prof.strict_transforms["B"]
    assert prof.intersect(B, B) == 0


def test_line_example_strict_transform():
    for m in range(2, 9):
        prof = p2_example(m).profile
        lt = prof.strict_transforms["l"]
        assert prof.intersect(lt, lt) == -(m - 2)
        dec = pullback_decomposition(prof, "l")
        assert all(c >= 0 and c.denominator == 1 for c in dec.exceptional_coefficients)


def test_log_discrepancy_families():
    for d in (F(1, 8), F(1, 2), F(3, 4)):
        pair = p2_conic(d)
        for a, b in coprime_weights(6):
            if (a, b) == (1, 1):
                continue
            k = -(-a // b)
            assert p2_chain(pair, a, b, 1).log_discrepancy == a + b - b * d
            for jc in range(3, k + 1):
                seq = log_discrepancy_sequence(p2_chain(pair, a, b, jc).profile)
                assert seq[-1] == a + b - min(jc * b, a) * d


def test_pullback_of_diagonal():
    pair = p1xp1_diag(F(1, 4))
    for a, b in coprime_weights(7):
        q = chain_q(a, b)
        m = len(q) - 1
        if m < 2:
            continue
        prof_k = quadric_chain(pair, a, b, 0).profile
        k = prof_k.k
        for jc in range(2, k + 1):
            prof = quadric_chain(pair, a, b, jc).profile
            got = list(pullback_decomposition(prof, "C").exceptional_coefficients)
            if jc < k:
                exp = [i if i <= jc else jc * prof.ab[i][1] for i in range(1, m + 1)]
            else:
                exp = [prof.ab[i][0] for i in range(1, m + 1)]
            assert got == exp


def test_generic_curve_has_no_multiplicities():
    aux = (AuxCurve("g", (1,)),)
    prof = _profile((0, 0, 0, 1), aux=aux)
    dec = pullback_decomposition(prof, "g")
    assert dec.multiplicities == (0, 0, 0)
    assert all(c == 0 for c in dec.exceptional_coefficients)
    with pytest.raises(KeyError):
        pullback_decomposition(prof, "nope")


def test_discrepancy_bounded_by_last_divisor():
    # K + pi^{-1} Delta - pi^*(K + Delta) = sum (A_i - 1) E~_i <= (A - 1)/f E_m^*
    for d in (F(0), F(1, 3), F(2, 3)):
        pair = p2_conic(d)
        for a, b in coprime_weights(6):
            k = -(-a // b) if (a, b) != (1, 1) else 1
            for jc in range(0, k + 1):
                prof = p2_chain(pair, a, b, jc).profile if (a, b) != (1, 1) else None
                if prof is None:
                    continue
                star = prof.strict_coefficients(prof.e_star[prof.m])
                A = prof.log_discrepancy
                for i in range(prof.m):
                    assert prof.A[i] - 1 <= (A - 1) / prof.f * star[i]


def test_pullback_dominates_multiple_of_last_divisor():
    pair = p2_conic(F(1, 2))
    for a, b in coprime_weights(6):
        if (a, b) == (1, 1):
            continue
        k = -(-a // b)
        for jc in range(0, k + 1):
            prof = p2_chain(pair, a, b, jc).profile
            star = prof.strict_coefficients(prof.e_star[prof.m])
            for cid in ("C", "l0"):
                coeffs = pullback_decomposition(prof, cid).exceptional_coefficients
                g = coeffs[-1]
                assert all(c >= g / prof.f * s for c, s in zip(coeffs, star))


def test_chain_errors():
    with pytest.raises(ChainError):
        build_chain(P2, EMPTY, (), [])
    with pytest.raises(ChainError):
        build_chain(P2, EMPTY, (), [PointSpec(), PointSpec(1), PointSpec(1)])
    with pytest.raises(SNCViolation):
        PointSpec(2, [1, 2])
    with pytest.raises(IncidenceError):
        # E1 no longer meets E3 once p3 is off E1
        build_chain(P2, EMPTY, (), [PointSpec(), PointSpec(1), PointSpec(2), PointSpec(3, 1)])
    lines = (AuxCurve("l1", (1,)), AuxCurve("l2", (1,)))
    with pytest.raises(IncidenceError):
        build_chain(P2, EMPTY, lines, steps_for_q((0, 0, 0), {"l1": 2, "l2": 2}))
    with pytest.raises(IncidenceError):
        # a smooth branch meets E1 once; it cannot pass both p2 and p3 = E2 ∩ E1
        build_chain(P2, EMPTY, lines[:1], [PointSpec(on_aux={"l1"}), PointSpec(1, on_aux={"l1"}),
                                           PointSpec(2, 1, on_aux={"l1"})])
    with pytest.raises(IncidenceError):
        build_chain(P2, EMPTY, (), [PointSpec(on_aux={"ghost"})])
    with pytest.raises(ValueError):
        PointSpec(on_aux={"l1"}, multiplicity={"l2": 2})


def test_multiplicity_two_point():
    # a conic through p1 counted with multiplicity 2 is not smooth there; A drops by 2 delta
    d = F(1, 4)
    b = PairBoundary.of(("C", (2,), d))
    prof = build_chain(P2, b, (AuxCurve("C", (2,)),),
                       [PointSpec(on_aux={"C"}, multiplicity={"C": 2})])[1]
    assert prof.A[0] == 2 - 2 * d
    assert prof.strict_transforms["C"] == prof.model.from_base((2,)) - 2 * prof.model.exceptional(1)
