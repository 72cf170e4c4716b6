import itertools
import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmqc.boolfn import BooleanFunction, all_functions, constant, degree, parity_function
from nmqc.dyadic import Dyadic
from nmqc.families import family
from nmqc.gf2 import Gf2Matrix, apply_preprocessing, gf2_rank
from nmqc.sim import ghz_parity_expectation, setting_angles, statevector_distribution
from nmqc.synth import (EquivalenceError, FeasibilityVerdict, Protocol, SearchLimitExceeded,
                        alternating_sum_certificate, build_pairwise_and_protocol,
                        canonicalize_p, check_certificate, compose, decide_feasibility, dedupe_rows,
                        minimal_sites_search, preserves, stabilizer_group, synthesize_protocol,
                        verify_deterministic)

from conftest import functions, random_function

HALF = Dyadic(1, 1)
P3 = Gf2Matrix.from_lists([[1, 0], [0, 1], [1, 1]])


def nonzero_rank_full(P):
    return gf2_rank(P.rows) == P.ncols


class TestPreprocessing:
    @pytest.mark.parametrize("x, s", [
        ((1, 1), (1, 1, 0)),
        ((1, 0), (1, 0, 1)),
        ((0, 0), (0, 0, 0)),
    ])
    def test_examples(self, x, s):
        assert apply_preprocessing(P3, x) == s

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_preprocessing(P3, (1, 0, 1))


class TestSynthesis:
    def test_g2(self, g2):
        p = synthesize_protocol(g2)
        assert p.P.rows == (0b01, 0b10, 0b11)
        assert p.angles == (HALF, HALF, -HALF)
        assert p.post_bit == 0

    def test_g3(self, g3):
        p = synthesize_protocol(g3)
        assert p.P.rows == tuple(range(1, 8))
        assert p.angles == tuple(Dyadic((-1) ** (bin(a).count("1") + 1), 2) for a in range(1, 8))
        assert p.post_bit == 0

    def test_xor(self):
        p = synthesize_protocol(parity_function(2, 0b11))
        assert p.P.rows == (0b11,)
        assert p.angles == (Dyadic(1),)
        assert p.post_bit == 0

    def test_complement_sets_post_bit(self, g2):
        p = synthesize_protocol(g2.complement())
        assert p.post_bit == 1
        assert verify_deterministic(p, g2.complement())

    def test_totality_n3(self):
        for f in all_functions(3):
            p = synthesize_protocol(f)
            assert p.sites <= 7
            assert verify_deterministic(p, f)

    def test_totality_random_n4(self, rng):
        for _ in range(100):
            f = random_function(4, rng)
            p = synthesize_protocol(f)
            assert p.sites <= 15
            assert verify_deterministic(p, f)

    @settings(max_examples=40, deadline=None)
    @given(functions(max_n=5))
    def test_angles_in_range(self, f):
        p = synthesize_protocol(f)
        assert all(-1 < a.to_fraction() <= 1 for a in p.angles)
        assert verify_deterministic(p, f)


class TestVerify:
    def test_perturbed_angle(self, g2):
        p = synthesize_protocol(g2)
        # -1/3 is not dyadic, so the closest stored perturbation is used instead
        with pytest.raises(ValueError):
            Protocol(2, p.P, (HALF, HALF, Fraction(-1, 3)))
        bad = Protocol(2, p.P, (HALF, HALF, Dyadic(-3, 3)))
        assert not verify_deterministic(bad, g2)

    def test_empty_protocol(self):
        p = Protocol(2, Gf2Matrix((), 2), (), 1)
        assert verify_deterministic(p, constant(2, 1))
        assert not verify_deterministic(p, constant(2, 0))

    def test_zero_rows_dropped(self):
        p = Protocol(2, Gf2Matrix((0, 3), 2), (HALF, Dyadic(1)))
        assert p.sites == 1 and p.angles == (Dyadic(1),)

    def test_flip_pattern(self):
        proto, res = build_pairwise_and_protocol(3)
        h3 = family("h", 3)
        assert verify_deterministic(proto, h3, flip=res.flip)
        assert not verify_deterministic(proto, h3)


class TestCanonicalize:
    def test_removes_all_ones_row(self):
        k2 = family("k", 2)
        P = Gf2Matrix((0b11, 0b01), 2)
        Q, M = canonicalize_p(P, k2)
        assert 0b11 not in Q.rows
        assert preserves(k2, M)
        assert Q == dedupe_rows(P @ M) and Q.nrows == 2

    def test_already_free(self, g3):
        P = Gf2Matrix((0b001, 0b010), 3)
        Q, M = canonicalize_p(P, g3)
        assert Q == P and M == Gf2Matrix.identity(3)

    def test_full_row_set_unchanged(self):
        k3 = family("k", 3)
        P = Gf2Matrix(tuple(range(1, 8)), 3)
        Q, M = canonicalize_p(P, k3)
        assert Q == P and M == Gf2Matrix.identity(3)

    def test_stabilizer_violation(self, g2):
        swap_sum = Gf2Matrix((0b01, 0b11), 2)
        with pytest.raises(EquivalenceError):
            canonicalize_p(P3, g2, M=swap_sum)

    def test_duplicates_merged(self, g2):
        Q, _ = canonicalize_p(Gf2Matrix((1, 1, 2, 0), 2), g2)
        assert Q.rows == (1, 2)

    def test_generators_checked(self, h3):
        with pytest.raises(EquivalenceError):
            stabilizer_group(h3, [Gf2Matrix((0b011, 0b010, 0b100), 3)])

    def test_random_k_sets_lose_all_ones(self, rng):
        for n in (2, 3, 4):
            k = family("k", n)
            ones = (1 << n) - 1
            for _ in range(20):
                m = rng.randint(1, ones - 1)
                rows = tuple(sorted(rng.sample(range(1, ones), m - 1))) + (ones,)
                Q, M = canonicalize_p(Gf2Matrix(rows, n), k)
                assert ones not in Q.rows
                assert preserves(k, M)
                assert decide_feasibility(k, Q).feasible == decide_feasibility(k, Gf2Matrix(rows, n)).feasible


class TestAlternatingSum:
    @pytest.mark.parametrize("rows, expected", [
        ((0b01, 0b10), [0, 0]),
        ((0b11,), [-2]),
    ])
    def test_examples(self, rows, expected):
        assert alternating_sum_certificate(Gf2Matrix(rows, 2)) == expected

    def test_direct_sum_oracle(self):
        # v_j for the all-ones row: sum_x (-1)^W(x) * (W(x) mod 2) = -(number of odd-weight x)
        for n in range(1, 6):
            ones = (1 << n) - 1
            assert alternating_sum_certificate(Gf2Matrix((ones,), n)) == [-(1 << (n - 1))]

    def test_zero_entry_rows_vanish(self):
        rng = random.Random(7)
        for _ in range(200):
            n = rng.randint(1, 4)
            rows = tuple(rng.randrange(1, 1 << n) for _ in range(rng.randint(1, 6)))
            v = alternating_sum_certificate(Gf2Matrix(rows, n))
            for r, vj in zip(rows, v):
                if r != (1 << n) - 1:
                    assert vj == 0
                else:
                    assert vj != 0


class TestFeasibility:
    def test_g2_three_rows(self, g2):
        v = decide_feasibility(g2, P3)
        assert v.feasible
        assert v.witness_angles == (HALF, HALF, -HALF)

    def test_g2_two_rows(self, g2):
        v = decide_feasibility(g2, Gf2Matrix((0b01, 0b10), 2))
        assert not v.feasible
        assert v.certificate.kind == "alternating_sum"
        assert check_certificate(g2, v)

    def test_xor_single_row(self):
        v = decide_feasibility(parity_function(2, 0b11), Gf2Matrix((0b11,), 2))
        assert v.feasible and v.witness_angles == (Dyadic(1),)

    def test_lattice_certificate(self, h3):
        v = decide_feasibility(h3, Gf2Matrix((1, 2, 4), 3))
        assert not v.feasible
        assert v.certificate.kind == "lattice"
        assert check_certificate(h3, v)

    def test_tampered_certificate_rejected(self, h3):
        v = decide_feasibility(h3, Gf2Matrix((1, 2, 4), 3))
        bogus = FeasibilityVerdict("infeasible", v.P, certificate=type(v.certificate)(
            "lattice", {"kernel_vectors": [[1] * 8, [1] * 8]}))
        assert not check_certificate(h3, bogus)

    def test_exhaustive_n2_against_bruteforce(self):
        # angle multiples with denominator 4 suffice for n = 2; scan them directly
        grid = [Dyadic(k, 2) for k in range(-3, 5)]
        for f in all_functions(2):
            for m in (1, 2, 3):
                for rows in itertools.combinations(range(1, 4), m):
                    P = Gf2Matrix(rows, 2)
                    brute = any(verify_deterministic(Protocol(2, P, angles, c), f)
                                for angles in itertools.product(grid, repeat=m) for c in (0, 1))
                    v = decide_feasibility(f, P)
                    assert v.feasible == brute
                    if not v.feasible:
                        assert check_certificate(f, v)

    def test_equivalence_under_stabilizer(self, rng):
        cases = [family("g", 3), family("k", 3), family("h", 3), family("g", 2)]
        for f in cases:
            group = stabilizer_group(f)
            for _ in range(30):
                rows = tuple(rng.sample(range(1, 1 << f.n), rng.randint(1, (1 << f.n) - 1)))
                P = Gf2Matrix(rows, f.n)
                M = rng.choice(group)
                assert compose(f, M) == f
                assert decide_feasibility(f, P).feasible == decide_feasibility(f, P @ M).feasible

    def test_and_lower_bound_g2(self, g2):
        for m in (1, 2):
            for rows in itertools.combinations(range(1, 4), m):
                assert not decide_feasibility(g2, Gf2Matrix(rows, 2)).feasible

    def test_and_lower_bound_g3(self, g3):
        for m in range(1, 7):
            for rows in itertools.combinations(range(1, 8), m):
                v = decide_feasibility(g3, Gf2Matrix(rows, 3))
                assert not v.feasible
                assert check_certificate(g3, v)

    @settings(max_examples=40, deadline=None)
    @given(functions(max_n=3), st.data())
    def test_soundness(self, f, data):
        rows = data.draw(st.lists(st.integers(1, (1 << f.n) - 1), min_size=1, max_size=7))
        v = decide_feasibility(f, Gf2Matrix(tuple(rows), f.n))
        if v.feasible:
            assert verify_deterministic(v.witness, f)
        else:
            assert check_certificate(f, v)


class TestMinimalSites:
    @pytest.mark.parametrize("kind, n, expected", [
        ("g", 2, 3), ("g", 3, 7), ("h", 3, 4), ("h", 2, 3), ("k", 2, 3),
    ])
    def test_families(self, kind, n, expected):
        f = family(kind, n)
        m, proto = minimal_sites_search(f)
        assert m == expected
        assert verify_deterministic(proto, f)

    def test_symmetry_does_not_change_answer(self):
        f = family("h", 3)
        assert minimal_sites_search(f, use_symmetry=False)[0] == minimal_sites_search(f)[0]

    def test_linear_functions_need_one_site(self):
        for n in (1, 2, 3):
            for f in all_functions(n):
                if degree(f) == 1:
                    assert minimal_sites_search(f)[0] == 1

    def test_constant(self):
        m, proto = minimal_sites_search(constant(2, 1))
        assert m == 0 and proto.post_bit == 1

    def test_exhausted(self, g3):
        assert minimal_sites_search(g3, m_max=6) is None

    def test_cutoff(self):
        with pytest.raises(SearchLimitExceeded):
            minimal_sites_search(family("h", 4), use_symmetry=False, cutoff=10)

    def test_m_max_too_large(self, g2):
        with pytest.raises(ValueError):
            minimal_sites_search(g2, m_max=4)


class TestNonlinearityThreshold:
    def test_invertible_p_forces_more_than_n_sites(self):
        # with n linearly independent rows every setting combination occurs
        for n in (2, 3):
            for f in all_functions(n):
                if degree(f) < 2:
                    continue
                for m in range(1, n + 1):
                    for rows in itertools.combinations(range(1, 1 << n), m):
                        P = Gf2Matrix(rows, n)
                        if nonzero_rank_full(P):
                            assert not decide_feasibility(f, P).feasible

    def test_rank_deficient_counterexample(self):
        # f = x1 * (1 + x3) only depends on two linear forms and fits on three sites
        f = BooleanFunction.from_callable(3, lambda x: x[0] & (1 - x[2]))
        assert degree(f) == 2
        v = decide_feasibility(f, Gf2Matrix((0b001, 0b100, 0b101), 3))
        assert v.feasible and verify_deterministic(v.witness, f)


class TestPairwiseAnd:
    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_deterministic(self, n):
        proto, res = build_pairwise_and_protocol(n)
        assert proto.sites == n + 1
        assert res.flip == (0,) * n + (1,)
        hn = family("h", n)
        assert verify_deterministic(proto, hn, flip=res.flip)
        for x in range(1 << n):
            corr = ghz_parity_expectation(res, setting_angles(proto, x))
            assert corr == pytest.approx((-1) ** hn.table[x], abs=1e-12)

    def test_n4_all_ones(self):
        proto, res = build_pairwise_and_protocol(4)
        assert apply_preprocessing(proto.P, (1, 1, 1, 1)) == (1, 1, 1, 1, 0)
        assert family("h", 4)((1, 1, 1, 1)) == 0
        state = res.statevector()
        dist = statevector_distribution(state, setting_angles(proto, 0b1111))
        parity = np.array([bin(m).count("1") & 1 for m in range(32)])
        assert dist[parity == 1].sum() == pytest.approx(0, abs=1e-12)

    def test_n_too_small(self):
        with pytest.raises(ValueError):
            build_pairwise_and_protocol(1)


class TestJson:
    def test_protocol_roundtrip(self, g3):
        p = synthesize_protocol(g3)
        text = json.dumps(p.to_json(), sort_keys=True)
        back = Protocol.from_json(json.loads(text))
        assert back == p
        assert json.dumps(back.to_json(), sort_keys=True) == text

    def test_protocol_shape(self, g2):
        obj = synthesize_protocol(g2).to_json()
        assert obj == {"n": 2, "sites": 3, "P": [[1, 0], [0, 1], [1, 1]],
                       "angles": [{"num": 1, "den_pow2": 1}, {"num": 1, "den_pow2": 1},
                                  {"num": -1, "den_pow2": 1}],
                       "post_bit": 0}

    def test_site_count_mismatch(self, g2):
        obj = synthesize_protocol(g2).to_json()
        obj["sites"] = 2
        with pytest.raises(ValueError):
            Protocol.from_json(obj)

    @pytest.mark.parametrize("rows", [(1, 2, 3), (1, 2), (3,)])
    def test_verdict_roundtrip(self, g2, rows):
        v = decide_feasibility(g2, Gf2Matrix(rows, 2))
        text = json.dumps(v.to_json(), sort_keys=True)
        back = FeasibilityVerdict.from_json(json.loads(text))
        assert back == v
        assert json.dumps(back.to_json(), sort_keys=True) == text
