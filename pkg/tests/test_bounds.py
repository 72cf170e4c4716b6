import json
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmqc.bounds import (BellFunctional, BoundsReport, OptimizerConfig, PriorDistribution,
                         appendix_c_window, classical_bound, classical_bound_bruteforce,
                         functional_from_game, functional_value, game_from_functional,
                         gn_product_objective, mean_success_from_bound, objective_and_gradient,
                         quantum_bound, setting_matrix, wrap_angles)
from nmqc.boolfn import BooleanFunction
from nmqc.families import family
from nmqc.sim import GhzResource, ghz_parity_expectation

from conftest import random_function

Q = 2 ** -0.5
FAST = OptimizerConfig(restarts=60)


def random_functional(n, rng, zeros=True):
    beta = [Fraction(rng.randint(-12, 12), rng.randint(1, 9)) for _ in range(1 << n)]
    if zeros and rng.random() < 0.3:
        beta[rng.randrange(1 << n)] = Fraction(0)
    return BellFunctional(n, tuple(beta))


def uniform(kind, n):
    return functional_from_game(family(kind, n))


class TestGames:
    def test_g2_uniform(self, g2):
        b = functional_from_game(g2, PriorDistribution.uniform(2))
        assert b.beta == (Fraction(1, 4),) * 3 + (Fraction(-1, 4),)

    def test_h3_uniform(self, h3):
        b = functional_from_game(h3)
        assert b.beta == tuple(Fraction((-1) ** v, 8) for v in h3.table)

    def test_point_mass(self, g2):
        b = functional_from_game(g2, PriorDistribution.point_mass(2, 3))
        assert b.beta == (0, 0, 0, -1)

    def test_inverse(self, g2):
        f, w = game_from_functional(BellFunctional(2, ("1/4", "1/4", "1/4", "-1/4")))
        assert f == g2 and w == PriorDistribution.uniform(2)

    def test_zero_entry(self):
        f, w = game_from_functional(BellFunctional(2, ("1/2", "0", "-1/4", "1/4")))
        assert f.table[1] == 0 and w.weights[1] == 0
        assert f.table[2] == 1

    def test_unnormalized(self):
        with pytest.raises(ValueError):
            game_from_functional(BellFunctional(1, (1, 1)))

    def test_roundtrip_random(self, rng):
        for _ in range(50):
            n = rng.randint(1, 4)
            f = random_function(n, rng)
            raw = [rng.randint(1, 9) for _ in range(1 << n)]
            w = PriorDistribution(n, tuple(Fraction(v, sum(raw)) for v in raw))
            assert game_from_functional(functional_from_game(f, w)) == (f, w)

    def test_bad_prior(self):
        with pytest.raises(ValueError):
            PriorDistribution(1, ("1/2", "1/3"))


class TestClassical:
    @pytest.mark.parametrize("kind, n, expected", [
        ("g", 2, Fraction(1, 2)),
        ("g", 3, Fraction(3, 4)),
        ("h", 3, Fraction(1, 2)),
        ("h", 4, Fraction(1, 4)),
    ])
    def test_families(self, kind, n, expected):
        b = uniform(kind, n)
        assert classical_bound(b) == expected
        assert classical_bound_bruteforce(b) == expected

    def test_point_mass(self, h3):
        assert classical_bound(functional_from_game(h3, PriorDistribution.point_mass(3, 5))) == 1

    def test_bruteforce_equivalence(self):
        rng = random.Random(99)
        for _ in range(120):
            b = random_functional(rng.randint(1, 4), rng)
            assert classical_bound(b) == classical_bound_bruteforce(b)

    def test_bruteforce_limit(self):
        with pytest.raises(ValueError):
            classical_bound_bruteforce(BellFunctional(7, (0,) * 128))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4), st.fractions(min_value=Fraction(1, 100), max_value=100), st.randoms())
    def test_scale_equivariance(self, n, lam, r):
        b = random_functional(n, r)
        assert classical_bound(b.scaled(lam)) == lam * classical_bound(b)


class TestMeanSuccess:
    @pytest.mark.parametrize("u, expected", [
        (Fraction(1, 2), Fraction(3, 4)),
        (1, 1),
        (Fraction(3, 4), Fraction(7, 8)),
    ])
    def test_examples(self, u, expected):
        assert mean_success_from_bound(u) == expected

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            mean_success_from_bound(1.5)


class TestQuantum:
    @pytest.mark.parametrize("kind, n, expected, c", [
        ("g", 2, Q, Fraction(1, 2)),
        ("g", 3, 0.75, Fraction(3, 4)),
        ("h", 4, Q, Fraction(1, 4)),
    ])
    def test_examples(self, kind, n, expected, c):
        rep = quantum_bound(uniform(kind, n), OptimizerConfig(restarts=200))
        assert rep.classical == c
        assert rep.quantum == pytest.approx(expected, abs=1e-6)
        assert functional_value(uniform(kind, n), rep.argmax_angles) == pytest.approx(rep.quantum, abs=1e-12)

    def test_corner_dominance(self, rng):
        for _ in range(30):
            b = random_functional(rng.randint(1, 5), rng)
            rep = quantum_bound(b, OptimizerConfig(restarts=5))
            assert rep.quantum >= float(rep.classical) - 1e-12

    def test_normalized_at_most_one(self, rng):
        for _ in range(20):
            b = random_functional(rng.randint(1, 5), rng, zeros=False).normalized()
            assert quantum_bound(b, FAST).quantum <= 1 + 1e-12

    def test_scale_equivariance(self, rng):
        b = random_functional(3, rng)
        base = quantum_bound(b, FAST)
        scaled = quantum_bound(b.scaled(Fraction(7, 3)), FAST)
        assert scaled.argmax_angles == base.argmax_angles
        assert scaled.quantum == pytest.approx(base.quantum * 7 / 3, rel=1e-12)

    def test_relabeling_invariance(self, rng):
        for _ in range(5):
            b = random_functional(4, rng)
            perm = [2, 0, 3, 1]
            pb = b.permuted(perm)
            assert classical_bound(pb) == classical_bound(b)
            assert quantum_bound(pb, FAST).quantum == pytest.approx(quantum_bound(b, FAST).quantum, abs=1e-6)

    def test_zero_functional(self):
        rep = quantum_bound(BellFunctional(2, (0, 0, 0, 0)), FAST)
        assert rep.quantum == 0 and rep.classical == 0

    def test_default_restarts(self):
        assert OptimizerConfig().restarts_for(3) == 100
        assert OptimizerConfig().restarts_for(8) == 200

    def test_seed_determinism(self, h3):
        b = functional_from_game(h3)
        assert quantum_bound(b, FAST) == quantum_bound(b, FAST)


class TestGradient:
    def test_finite_differences(self):
        rng = np.random.default_rng(5)
        h = 1e-6
        for n in range(1, 7):
            S = setting_matrix(n)
            for _ in range(5):
                beta = rng.normal(size=1 << n)
                phi = rng.uniform(-math.pi, math.pi, size=(1, n))
                _, grad = objective_and_gradient(beta, S, phi)
                fd = np.zeros(n)
                for k in range(n):
                    e = np.zeros((1, n))
                    e[0, k] = h
                    up, _ = objective_and_gradient(beta, S, phi + e)
                    dn, _ = objective_and_gradient(beta, S, phi - e)
                    fd[k] = (up[0] - dn[0]) / (2 * h)
                rel = np.linalg.norm(grad[0] - fd) / max(np.linalg.norm(fd), 1e-12)
                assert rel <= 1e-5

    def test_wrap(self):
        assert wrap_angles(np.array([math.pi, -math.pi, 3 * math.pi, 0.0])) == pytest.approx(
            [math.pi, math.pi, math.pi, 0.0])


class TestStrategyConsistency:
    def test_simulated_strategies_below_bound(self):
        rng = np.random.default_rng(17)
        for kind, n in [("g", 2), ("g", 3), ("h", 3), ("h", 4)]:
            b = uniform(kind, n)
            q = quantum_bound(b, FAST).quantum
            beta = [float(v) for v in b.beta]
            for _ in range(40):
                flip = tuple(int(v) for v in rng.integers(0, 2, n))
                res = GhzResource(n, flip, float(rng.uniform(-math.pi, math.pi)))
                phi = rng.uniform(-math.pi, math.pi, n)
                eps = [ghz_parity_expectation(res, [phi[j] * ((s >> j) & 1) for j in range(n)])
                       for s in range(1 << n)]
                assert abs(sum(bv * e for bv, e in zip(beta, eps))) <= q + 1e-6


class TestProductForm:
    @pytest.mark.parametrize("n", range(2, 9))
    def test_zero_angles(self, n):
        assert gn_product_objective(np.zeros(n), n) == pytest.approx((2 ** n - 2) / 2 ** n, abs=1e-15)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_pi_angles(self, n):
        assert gn_product_objective(np.full(n, math.pi), n) == pytest.approx(2 / 2 ** n, abs=1e-12)

    def test_matches_generic(self):
        rng = np.random.default_rng(2)
        for n in range(2, 9):
            b = uniform("g", n)
            for _ in range(20):
                phi = rng.uniform(-math.pi, math.pi, n)
                assert gn_product_objective(phi, n) == pytest.approx(functional_value(b, phi), abs=1e-12)

    def test_window(self):
        assert all(appendix_c_window(n) for n in range(2, 8))
        assert not any(appendix_c_window(n) for n in range(8, 65))

    def test_window_domain(self):
        with pytest.raises(ValueError):
            appendix_c_window(1)


class TestJson:
    def test_functional(self, h3):
        b = functional_from_game(h3)
        text = json.dumps(b.to_json(), sort_keys=True)
        assert BellFunctional.from_json(json.loads(text)) == b
        assert b.to_json()["beta"][0] == "1/8"

    def test_integers_print_as_fractions(self):
        assert BellFunctional(1, (1, 0)).to_json()["beta"] == ["1/1", "0/1"]

    def test_prior(self):
        w = PriorDistribution(1, ("1/3", "2/3"))
        assert PriorDistribution.from_json(json.loads(json.dumps(w.to_json()))) == w

    def test_report(self, g2):
        rep = quantum_bound(functional_from_game(g2), FAST)
        obj = json.loads(json.dumps(rep.to_json(), sort_keys=True))
        back = BoundsReport.from_json(obj)
        assert (back.classical, back.quantum, back.restarts, back.argmax_angles) == (
            rep.classical, rep.quantum, rep.restarts, rep.argmax_angles)
        assert json.dumps(back.to_json(), sort_keys=True) == json.dumps(rep.to_json(), sort_keys=True)

    def test_game_functional_dumps(self):
        f = BooleanFunction(1, (0, 1))
        assert json.dumps(functional_from_game(f).to_json(), sort_keys=True) == '{"beta": ["1/2", "-1/2"], "n": 1}'
