import itertools
import math
import random
from fractions import Fraction

import pytest

import twistlab as tl
from twistlab import FinSeq, MixedSeq
from twistlab.oracles import (
    _analyze_negsum,
    min_crosspolytope_norm,
    replay_lemma5,
    seq_sampler,
)
from twistlab.seqspace import MixedSpace, SeqSpace


def grid_min(ys, step=64):
    """Dense search over the cross-polytope surface (the independent oracle
    for the exact modes): per sign pattern, integer grids on the simplex."""
    k = len(ys)
    best = None
    for signs in itertools.product((1, -1), repeat=k):
        for alloc in itertools.product(range(step + 1), repeat=k - 1):
            if sum(alloc) > step:
                continue
            last = step - sum(alloc)
            coeffs = [Fraction(signs[j] * a, step) for j, a in enumerate(alloc + (last,))]
            combo = FinSeq()
            for ccc, y in zip(coeffs, ys):
                combo = combo + y * ccc
            v = combo.norm()
            if best is None or v < best:
                best = v
    return best


class TestCrossPolytope:
    def test_disjoint_exact(self):
        ys = [FinSeq({1: 1}), FinSeq({2: Fraction(1, 2)})]
        res = min_crosspolytope_norm(ys)
        assert res.value == Fraction(1, 2)
        assert res.method == "exact"
        assert res.minimizer == [0, 1]

    def test_single(self):
        res = min_crosspolytope_norm([FinSeq({3: -4, 5: 1})])
        assert res.value == 5

    def test_dependent_pair_cancels(self):
        res = min_crosspolytope_norm([FinSeq.unit(1), FinSeq.unit(1)])
        assert res.value == 0
        assert sorted(res.minimizer) == [Fraction(-1, 2), Fraction(1, 2)]

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            min_crosspolytope_norm([FinSeq()])

    def test_exact_matches_grid_k2(self):
        rng = random.Random(5)
        for _ in range(6):
            ys = [seq_sampler(rng) for _ in range(2)]
            if any(not y for y in ys):
                continue
            res = min_crosspolytope_norm(ys)
            g = grid_min(ys, 64)
            lip = max(float(y.norm()) for y in ys)
            assert float(res.value) <= float(g) + 1e-12
            assert float(g) - float(res.value) <= lip * 2 / 64 + 1e-9

    def test_exact_matches_grid_k3(self):
        rng = random.Random(9)
        for _ in range(3):
            ys = [seq_sampler(rng) for _ in range(3)]
            if any(not y for y in ys):
                continue
            res = min_crosspolytope_norm(ys)
            g = grid_min(ys, 16)
            lip = max(float(y.norm()) for y in ys)
            assert float(res.value) <= float(g) + 1e-12
            assert float(g) - float(res.value) <= lip * 3 / 16 + 1e-9

    def test_heuristic_above_nine(self):
        # overlapping chain forces the subgradient path; sanity: positive and
        # no better than the best vertex value
        ys = [FinSeq({i: 1, i + 1: 1}) for i in range(1, 10)]
        res = min_crosspolytope_norm(ys)
        assert res.method == "heuristic"
        assert 0 < res.value <= 2.0 + 1e-9

    def test_mixed_block_disjoint_closed_form(self):
        ys = [MixedSeq.unit(1, 1), MixedSeq.unit(2, 1)]
        res = min_crosspolytope_norm(ys, space=MixedSpace(2))
        assert res.method == "exact"
        assert res.value == pytest.approx(1 / math.sqrt(2), rel=1e-12)

    def test_heuristic_close_to_exact_small(self):
        rng = random.Random(2)
        for _ in range(4):
            ys = [seq_sampler(rng) for _ in range(3)]
            if any(not y for y in ys):
                continue
            exact = min_crosspolytope_norm(ys)
            from twistlab.oracles import _subgradient_min

            val, _ = _subgradient_min(ys, SeqSpace(), seed=1)
            assert val >= float(exact.value) - 1e-9
            assert val <= float(exact.value) * 1.5 + 0.2


class TestLemma5Adversary:
    def test_healthy_level(self, state4):
        for n in range(1, 5):
            rep = tl.lemma5_adversary(state4.level_z(n), 2 ** n, state4.c[n])
            assert rep.best_violation < 0
            assert rep.method == "exact"

    def test_structured_mass_formula(self, state4):
        # equal-norm disjoint family with balancing vector: best mass is
        # budget * k / (m_n * min-norm) with the pattern dropping one of the
        # disjoint vectors
        n = 2
        rep = tl.lemma5_adversary(state4.level_z(n), 4, state4.c[n])
        expected = (3 - 1e-9) * 4 / state4.m[n]
        assert rep.best_value == pytest.approx(expected, rel=1e-9)

    def test_structure_detection(self, state4):
        kind, d = _analyze_negsum(state4.level_z(2), state4.space)
        assert kind == "negsum" and d == 4

    def test_monotone_in_k(self, state4):
        zs = state4.level_z(2)
        masses = [tl.lemma5_adversary(zs, k, state4.c[2]).best_value for k in range(0, 5)]
        assert masses == sorted(masses)

    def test_tampered_multiplier_detected(self, ribe_normalized):
        xs, ds = tl.make_case_a_inputs(2, 2)
        bad = tl.run_construction(ribe_normalized, xs, ds, 2, m_override={2: 1}, verify_levels=False)
        rep = tl.lemma5_adversary(bad.level_z(2), 4, bad.c[2])
        assert rep.best_violation > 0

    def test_witness_replayable(self, state4):
        for n in (1, 3):
            zs = state4.level_z(n)
            rep = tl.lemma5_adversary(zs, 2 ** n, state4.c[n])
            mass, nrm = replay_lemma5(zs, rep.witness)
            assert mass == pytest.approx(rep.best_value, abs=1e-12)
            assert nrm <= 3 - 1e-9 + 1e-12

    def test_k_zero(self, state4):
        rep = tl.lemma5_adversary(state4.level_z(1), 0, state4.c[1])
        assert rep.best_value == 0.0
        assert rep.best_violation < 0

    def test_structured_nonuniform_matches_lp(self):
        # unequal norms exercise the saturation breakpoints of the closed
        # form; the orthant LP is the independent route
        from twistlab.oracles import _orthant_lp_min

        zs = [FinSeq({1: 2}), FinSeq({2: 1, 3: -2}), FinSeq({5: 4}), FinSeq({7: Fraction(1, 2)})]
        balance = FinSeq()
        for z in zs:
            balance = balance - z
        zs.append(balance)
        eta = Fraction(1, 16)
        rep = tl.lemma5_adversary(zs, 4, eta)
        assert rep.method == "exact"
        t_budget = Fraction(3) - Fraction(1, 10 ** 9)
        best = Fraction(0)
        for pattern in itertools.combinations(range(5), 4):
            val, _ = _orthant_lp_min([zs[j] for j in pattern])
            best = max(best, t_budget / val)
        assert rep.best_value == pytest.approx(float(best), rel=1e-12)

    def test_exhaustive_patterns_against_brute_force(self, state4):
        # cross-check the structured closed form against orthant LPs on the
        # small level (5 vectors, patterns of size 4)
        zs = state4.level_z(2)
        rep = tl.lemma5_adversary(zs, 4, state4.c[2])
        best = 0
        for pattern in itertools.combinations(range(5), 4):
            sub = [zs[j] for j in pattern]
            res = min_crosspolytope_norm(sub)
            assert res.method == "exact"
            mass = (Fraction(3) - Fraction(1, 10 ** 9)) / res.value
            best = max(best, mass)
        assert rep.best_value == pytest.approx(float(best), rel=1e-12)


class TestQuasiConstant:
    def test_linear_map_zero_defect(self):
        lin = tl.UserLinear([FinSeq.unit(1), FinSeq.unit(2)], [Fraction(1), Fraction(2)])
        rep = tl.quasi_constant_adversary(lin, trials=200, seed=1)
        assert rep.best_value <= 1e-10

    def test_ribe_within_assumed(self):
        rep = tl.quasi_constant_adversary(tl.Ribe(), trials=2000, seed=2)
        assert rep.best_violation < 0
        assert rep.best_value > 0.5  # the flat-pair family already reaches ln 2

    def test_weighted_within_holder(self):
        F = tl.WeightedRibe({1: Fraction(1)}, 2)
        rep = tl.quasi_constant_adversary(F, trials=1500, seed=3)
        assert rep.best_value <= 1.0 + 1e-9

    def test_witness_replayable(self):
        rep = tl.quasi_constant_adversary(tl.Ribe(), trials=500, seed=4)
        x = FinSeq.from_json(rep.witness["x"])
        y = FinSeq.from_json(rep.witness["y"])
        assert tl.quasi_defect(tl.Ribe(), x, y) == pytest.approx(rep.best_value, abs=1e-12)


class TestChainFuzzer:
    def test_clean_state(self, state4, ribe_normalized):
        rep = tl.chain_fuzzer(state4, ribe_normalized, trials=60, seed=5)
        assert rep.best_violation < 0
        assert rep.best_value < 9

    def test_zero_budget_noop(self, state4, ribe_normalized):
        rep = tl.chain_fuzzer(state4, ribe_normalized, trials=0, seed=5)
        assert rep.best_violation is None
        assert rep.trials == 0

    def test_tampered_state_caught(self, ribe_normalized):
        xs, ds = tl.make_case_a_inputs(3, 2)
        bad = tl.run_construction(ribe_normalized, xs, ds, 3, m_override={2: 2}, verify_levels=False)
        rep = tl.chain_fuzzer(bad, ribe_normalized, trials=150, seed=6)
        assert rep.best_violation >= 0

    def test_report_roundtrip(self, state4, ribe_normalized):
        rep = tl.chain_fuzzer(state4, ribe_normalized, trials=20, seed=7)
        back = tl.OracleReport.from_json(rep.to_json())
        assert back.best_violation == rep.best_violation
        assert back.witness == rep.witness
