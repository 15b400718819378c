import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

import twistlab as tl
from twistlab import FinSeq, SumCertificate, SumFamily
from twistlab.sumsets import (
    certificate_problems,
    family_zero,
    level_counts,
    random_certificate,
    rescale_certificate,
)


@pytest.fixture
def fam():
    # three blocks with tiny generator lists; plenty for the calculus laws
    return SumFamily(
        {
            1: [FinSeq({1: 1}), FinSeq({2: 1})],
            2: [FinSeq({3: 1, 4: -1}), FinSeq({5: 2})],
            3: [FinSeq({6: 1}), FinSeq({7: 1}), FinSeq({8: 1})],
        }
    )


class TestValue:
    def test_empty(self, fam):
        assert tl.certificate_value(fam, SumCertificate(())) == FinSeq()

    def test_single(self, fam):
        c = SumCertificate.of([(2, 0, 1)])
        assert tl.certificate_value(fam, c) == FinSeq({3: 1, 4: -1})

    def test_combination(self, fam):
        c = SumCertificate.of([(1, 0, 1), (1, 1, Fraction(1, 2))])
        assert tl.certificate_value(fam, c) == FinSeq({1: 1, 2: Fraction(1, 2)})

    def test_dangling_reference(self, fam):
        with pytest.raises(IndexError):
            tl.certificate_value(fam, SumCertificate.of([(9, 0, 1)]))


class TestValidity:
    def test_budget_two_at_level_two_from_block_three(self, fam):
        c = SumCertificate.of([(3, 0, 1), (3, 1, -1)])
        assert tl.certificate_valid(fam, c, 2)  # budget 2^(3-2) = 2

    def test_budget_exceeded(self, fam):
        c = SumCertificate.of([(3, 0, 1), (3, 1, -1), (3, 2, 1)])
        assert not tl.certificate_valid(fam, c, 2)

    def test_coefficient_too_large(self, fam):
        c = SumCertificate.of([(3, 0, Fraction(3, 2))])
        assert not tl.certificate_valid(fam, c, 2)

    def test_block_below_level(self, fam):
        c = SumCertificate.of([(1, 0, 1)])
        assert not tl.certificate_valid(fam, c, 2)
        assert tl.certificate_valid(fam, c, 1)

    def test_problems_listed(self, fam):
        c = SumCertificate.of([(1, 0, 2), (9, 5, 1)])
        msgs = certificate_problems(fam, c, 2)
        assert any("exceeds 1" in m for m in msgs)
        assert any("below level" in m for m in msgs)
        assert any("dangling" in m for m in msgs)


class TestScale:
    def test_zero_scale(self, fam):
        c = SumCertificate.of([(1, 0, 1)])
        assert tl.certificate_value(fam, tl.scale_certificate(c, 0)) == FinSeq()

    def test_negate(self, fam):
        c = SumCertificate.of([(2, 1, Fraction(1, 2))])
        neg = tl.scale_certificate(c, -1)
        assert tl.certificate_value(fam, neg) == -tl.certificate_value(fam, c)
        assert tl.certificate_valid(fam, neg, 2)

    def test_overscale_rejected(self, fam):
        with pytest.raises(ValueError):
            tl.scale_certificate(SumCertificate.of([(1, 0, 1)]), 2)

    @given(st.integers(-8, 8))
    @settings(max_examples=40, deadline=None)
    def test_value_scales_exactly(self, num):
        fam = SumFamily({1: [FinSeq({1: 1, 2: -3})], 2: [FinSeq({4: 5})]})
        s = Fraction(num, 8)
        c = SumCertificate.of([(1, 0, Fraction(1, 2)), (2, 0, -1)])
        assert tl.certificate_value(fam, tl.scale_certificate(c, s)) == tl.certificate_value(fam, c) * s


class TestMerge:
    def test_empty_merge(self, fam):
        m = tl.merge_certificates(fam, SumCertificate(()), SumCertificate(()), 2)
        assert tl.certificate_valid(fam, m, 1)
        assert len(m) == 0

    def test_at_budget(self, fam):
        # block 3 at level 3: budget 1 each; merged: 2 = budget at level 2
        c1 = SumCertificate.of([(3, 0, 1)])
        c2 = SumCertificate.of([(3, 2, -Fraction(1, 2))])
        m = tl.merge_certificates(fam, c1, c2, 3)
        assert tl.certificate_valid(fam, m, 2)
        assert not tl.certificate_valid(fam, m, 3)  # over budget one level up

    def test_value_additive(self, fam):
        c1 = SumCertificate.of([(2, 0, 1)])
        c2 = SumCertificate.of([(2, 1, 1), (3, 0, -1)])
        m = tl.merge_certificates(fam, c1, c2, 2)
        assert tl.certificate_value(fam, m) == tl.certificate_value(fam, c1) + tl.certificate_value(fam, c2)

    def test_invalid_input_rejected(self, fam):
        bad = SumCertificate.of([(3, 0, 2)])
        with pytest.raises(ValueError):
            tl.merge_certificates(fam, bad, SumCertificate(()), 2)

    def test_random_merge_law(self, fam):
        rng = random.Random(0)
        for _ in range(300):
            n = rng.choice([1, 2])
            c1 = random_certificate(fam, n + 1, rng)
            c2 = random_certificate(fam, n + 1, rng)
            merged = tl.merge_certificates(fam, c1, c2, n + 1)
            assert tl.certificate_valid(fam, merged, n)


class TestBaseAxioms:
    def test_healthy(self, fam):
        radii = [tl.ball_radius(n) for n in range(1, 5)]
        report = tl.base_axioms_check(radii, fam, 3)
        assert report.passed

    def test_depth_one_trivial(self, fam):
        report = tl.base_axioms_check([Fraction(1)], fam, 1)
        assert report.passed
        assert report.checks == []

    def test_radius_rule_equality_slack(self):
        # rho_n = 4^(1-n) with constant 1: 2*2*rho_{n+1} == rho_n exactly
        radii = [tl.ball_radius(n) for n in range(1, 6)]
        fam = SumFamily({1: [FinSeq({1: 1})]})
        report = tl.base_axioms_check(radii, fam, 5)
        radius_checks = [c for c in report.checks if c.name == "ball_radius_additivity"]
        assert radius_checks and all(c.passed for c in radius_checks)

    def test_sabotaged_budget_detected(self, fam):
        def sabotage(level):
            return lambda i: (2 ** (i - level) if i >= level else 0) + 1

        report = tl.base_axioms_check([tl.ball_radius(n) for n in range(1, 5)], fam, 3, counts_fn=sabotage)
        merge_checks = [c for c in report.checks if c.name == "merge_closure_at_budget"]
        assert any(not c.passed for c in merge_checks)

    def test_bad_radii_detected(self, fam):
        report = tl.base_axioms_check([Fraction(1), Fraction(1, 2)], fam, 2)
        assert not report.passed


class TestHull:
    def test_point_in_set(self):
        pts = [FinSeq({1: 1}), FinSeq({2: 1})]
        cert = tl.hull_membership(FinSeq({2: 1}), pts)
        assert cert.member
        assert cert.weights == [Fraction(0), Fraction(1)]

    def test_midpoint(self):
        pts = [FinSeq({1: 1}), FinSeq({1: -1})]
        cert = tl.hull_membership(FinSeq(), pts)
        assert cert.member
        assert sum(cert.weights) == 1
        combo = FinSeq()
        for w, p in zip(cert.weights, pts):
            combo = combo + p * w
        assert combo == FinSeq()

    def test_outside_affine_hull(self):
        pts = [FinSeq({1: 1}), FinSeq({1: -1})]
        cert = tl.hull_membership(FinSeq({2: 1}), pts)
        assert not cert.member
        assert "affine" in cert.reason

    def test_in_affine_hull_but_outside(self):
        pts = [FinSeq({1: 1}), FinSeq({1: 2})]
        cert = tl.hull_membership(FinSeq({1: 3}), pts)
        assert not cert.member

    def test_uniform_hull_of_balanced_family(self):
        # e + m*x over a family summing to zero: uniform weights recover e
        e = FinSeq({1: 1})
        xs = [FinSeq({2: 1}), FinSeq({3: 1}), FinSeq({2: -1, 3: -1})]
        pts = [e + x * 7 for x in xs]
        cert = tl.hull_membership(e, pts)
        assert cert.member
        combo = FinSeq()
        for w, p in zip(cert.weights, pts):
            combo = combo + p * w
        assert combo == e

    def test_empty_set(self):
        cert = tl.hull_membership(FinSeq({1: 1}), [])
        assert not cert.member


class TestHelpers:
    def test_level_counts(self):
        counts = level_counts(2)
        assert counts(2) == 1 and counts(3) == 2 and counts(5) == 8
        assert counts(1) == 0

    def test_family_zero_flavour(self, fam):
        assert family_zero(fam) == FinSeq()

    def test_json_roundtrip(self):
        c = SumCertificate.of([(1, 0, Fraction(-3, 7)), (4, 2, 1)])
        assert SumCertificate.from_json(c.to_json()) == c
        assert c.to_json()[0] == {"i": 1, "j": 0, "r": "-3/7"}

    def test_fn_descriptor(self, fam):
        fd = tl.FnDescriptor(fam, 2)
        assert fd.counts(3) == 2
        assert fd.counts(1) == 0

    def test_rescale_unrestricted(self, fam):
        c = SumCertificate.of([(1, 0, Fraction(1, 2))])
        big = rescale_certificate(c, 10)
        assert big.terms[0].coeff == 5
