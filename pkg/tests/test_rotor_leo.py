import time
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from config import CircleMapConfig
from errors import NotMeasurePreservingError, PreconditionSlopeError
from map_catalog import inv3_example, load_builtin, slope5_example, tent_invariant_example
from models import Arc, CirclePoint, RotationPair
from pa_map import (compose, image_of_arc, preimage_components, preimage_spread, rotation_map,
                    same_circle_map, sup_distance, verify_measure_preserving)
from perturb import sample_map, seeded_generator
from rotor_leo import (find_periodic_arc, growth_along_orbit, growth_check, is_leo, leo_certificate,
                       leo_time, periodic_arcs, rotate, rotation_candidates, rotation_periodic_set,
                       tent_invariant_arc)

F = Fraction
fractions = st.fractions(0, 1, max_denominator=64)


def test_rotate_identity(g):
    assert same_circle_map(rotate(g, RotationPair(0, 0)), g)


def test_rotate_shifts_values(tent):
    h = rotate(tent, RotationPair(F(1, 4), 0))
    assert h.eval(F(1, 2)) == CirclePoint(F(1, 4))
    h = rotate(tent, RotationPair(0, F(1, 4)))
    assert h.eval(F(1, 4)) == CirclePoint(0)


@settings(max_examples=30, deadline=None)
@given(alpha=fractions, beta=fractions)
def test_rotation_is_a_conjugacy(alpha, beta):
    g = load_builtin("g")
    h = rotate(g, RotationPair(alpha, beta))
    expected = compose(rotation_map(alpha), compose(g, rotation_map(beta)))
    assert same_circle_map(h, expected)
    assert verify_measure_preserving(h).measure_preserving
    assert h.min_abs_slope == g.min_abs_slope
    assert sup_distance(rotate(g, RotationPair(alpha, 0)), g) == min(alpha, 1 - alpha)


@settings(max_examples=30, deadline=None)
@given(alpha=fractions, beta=fractions)
def test_rotation_is_an_isometry(alpha, beta):
    pair = RotationPair(alpha, beta)
    for first, second in (("g", "tent"), ("valley", "inv3")):
        f, h = load_builtin(first), load_builtin(second)
        assert sup_distance(rotate(f, pair), rotate(h, pair)) == sup_distance(f, h)


@settings(max_examples=30, deadline=None)
@given(alpha=fractions, beta=fractions, gamma=fractions)
def test_rotation_parameters_trade_through_conjugacy(alpha, beta, gamma):
    g = load_builtin("g")
    shifted = rotate(g, RotationPair(alpha + gamma, beta - gamma))
    conjugate = compose(rotation_map(-gamma), compose(shifted, rotation_map(gamma)))
    assert same_circle_map(rotate(g, RotationPair(alpha, beta)), conjugate)


def test_tent_invariant_arc():
    check = tent_invariant_arc(F(-1, 8), F(-3, 32))
    assert check.conditions_hold
    assert str(check.arc) == "[5/16, 7/8]"
    assert check.invariant


def test_tent_invariant_example():
    response = tent_invariant_example(F(-1, 8), F(-3, 32))
    assert response.invariant
    assert response.subarc_leo_time is None


def test_leo_time(g, inv3):
    assert leo_time(g, Arc(CirclePoint(F(1, 5)), F(1, 5)), 10) == 1
    assert leo_time(g, Arc.full(), 10) == 0
    assert leo_time(inv3, Arc(CirclePoint(0), F(1, 2)), 50) is None
    assert leo_time(g, Arc(CirclePoint(F(1, 3)), F(1, 1000)), 0) is None


def test_growth_check(g):
    growth = growth_check(g, Arc(CirclePoint(F(1, 3)), F(1, 100)))
    assert not growth.full
    assert growth.ratio == 5
    assert growth_check(g, Arc(CirclePoint(0), F(1, 2))).full


def test_growth_along_orbit(g):
    steps = growth_along_orbit(g, Arc(CirclePoint(F(1, 3)), F(1, 1000)), 20)
    assert steps[0].ratio == 5
    assert steps[0].turning_points_inside == 0
    assert steps[-1].ratio is None
    assert all(s.ratio is None or s.ratio > 1 for s in steps)


@pytest.fixture(scope="module")
def g_certificate(separated_g):
    return leo_certificate(separated_g)


class TestCertificate:
    def test_separated_g_is_certified(self, separated_g):
        cert = leo_certificate(separated_g)
        assert cert.certified
        assert cert.kappa == F(1, 4096)
        assert cert.zeta == F(2, 5) + F(1, 81920)
        assert cert.eta_raw == 1 + F(1, 4096)
        assert cert.eta == cert.zeta / 2
        assert cert.xi == cert.zeta / 2
        assert cert.delta_lb == F(1, 2)
        assert cert.epsilon > 0

    def test_constants_are_rotation_invariant(self, separated_g):
        cert = leo_certificate(separated_g)
        for alpha, beta in ((F(1, 3), 0), (0, F(2, 7)), (F(5, 8), F(1, 16))):
            rotated = leo_certificate(rotate(separated_g, RotationPair(alpha, beta)))
            assert rotated.constants() == cert.constants()

    @settings(max_examples=60, deadline=None)
    @given(start=st.integers(0, 2 ** 16 - 1), length=st.integers(1, 2 ** 16 - 1))
    def test_random_arcs_grow_past_delta(self, separated_g, g_certificate, start, length):
        growth = growth_check(separated_g, Arc(CirclePoint(F(start, 2 ** 16)), F(length, 2 ** 16)))
        assert growth.full or growth.ratio > 1 + g_certificate.delta_lb

    @settings(max_examples=60, deadline=None)
    @given(start=st.integers(0, 2 ** 20 - 1))
    def test_kappa_arcs_split_at_least_xi_apart(self, separated_g, g_certificate, start):
        arc = Arc(CirclePoint(F(start, 2 ** 20)), g_certificate.kappa)
        assert len(preimage_components(separated_g, arc)) >= 2
        assert preimage_spread(separated_g, arc) >= g_certificate.xi

    def test_pipeline_map_is_certified(self):
        h = sample_map(0, 3, boost=(3, F(1, 16)), separate=F(1, 64))
        started = time.perf_counter()
        cert = leo_certificate(h)
        assert time.perf_counter() - started < 60
        assert cert.certified
        assert min(cert.constants()) > 0
        rotated = leo_certificate(rotate(h, RotationPair(F(1, 3), F(2, 7))))
        assert rotated.constants() == cert.constants()

        rng = seeded_generator(1)
        for _ in range(100):
            start, length = rng.integers(1, 2 ** 16, size=2)
            growth = growth_check(h, Arc(CirclePoint(F(int(start), 2 ** 16)), F(int(length), 2 ** 16)))
            assert growth.full or growth.ratio > 1 + cert.delta_lb
        for k in range(20):
            arc = Arc(CirclePoint(F(k, 20)), cert.kappa)
            assert preimage_spread(h, arc) >= cert.xi

    def test_slope_too_small(self, inv3):
        cert = leo_certificate(inv3)
        assert not cert.certified
        assert "slope" in cert.reason

    def test_duplicate_critical_values(self, g):
        cert = leo_certificate(g)
        assert not cert.certified
        assert cert.reason == "duplicate critical values"

    def test_requires_measure_preserving(self, c3):
        with pytest.raises(NotMeasurePreservingError):
            leo_certificate(c3)

    def test_validation_arcs_follow_config(self, separated_g):
        cert = leo_certificate(separated_g, CircleMapConfig(certificate_validation_arcs=10, seed=3))
        assert cert.certified


def test_periodic_arc_of_inv3(inv3):
    witness = find_periodic_arc(inv3)
    assert witness.arc == Arc(CirclePoint(0), F(1, 2))
    assert witness.period == 1
    decision = is_leo(inv3)
    assert not decision.leo
    assert decision.witness == witness
    assert decision.exhaustive


def test_g_is_leo(g):
    decision = is_leo(g)
    assert decision.leo
    assert decision.witness is None
    assert find_periodic_arc(g) is None


def test_short_period_bound_is_not_exhaustive(g):
    decision = is_leo(g, max_period=1)
    assert decision.period_bound == 1
    assert not decision.exhaustive


def test_slope_precondition(tent):
    with pytest.raises(PreconditionSlopeError) as e:
        is_leo(tent)
    assert e.value.code == "PRECONDITION_SLOPE"
    with pytest.raises(PreconditionSlopeError):
        rotation_periodic_set(tent)


def test_rotation_set_of_inv3(inv3):
    rotations = rotation_periodic_set(inv3)
    assert 0 in rotations
    assert rotations.candidates_checked == len(rotation_candidates(inv3))
    for beta, witnesses in rotations.entries:
        h = rotate(inv3, RotationPair(0, beta))
        assert witnesses
        assert list(witnesses) == periodic_arcs(h)
        for witness in witnesses:
            assert all(a.length == witness.arc.length for a in witness.orbit)
            assert image_of_arc(h, witness.orbit[-1]) == witness.arc


def test_periodic_arcs_of_inv3(inv3):
    witnesses = periodic_arcs(inv3)
    assert witnesses[0] == find_periodic_arc(inv3)
    assert [w.period for w in witnesses] == sorted(w.period for w in witnesses)
    assert len(set(w.arc for w in witnesses)) == len(witnesses)


def test_inv3_example():
    response = inv3_example()
    assert response.measure_preserving
    assert response.contains_zero
    assert response.equal_length_orbit
    assert response.endpoints_in_cv
    assert response.turning_point_count == 4
    assert response.witness.period == 1


def test_slope5_example():
    response = slope5_example(CircleMapConfig(seed=0))
    assert response.measure_preserving
    assert response.leo
    assert response.rotations == 25
    assert response.all_finite
    assert response.growth_bound_holds
