from fractions import Fraction

import numpy as np
import pytest

from soficlab.bsgroup import bs_a1, bs_a2, bs_rectangle
from soficlab.conjugacy import (Conjugator, InsufficientSupportError,
                                build_conjugator, conjugacy_defect)
from soficlab.perm import Permutation, hamming
from soficlab.soficcheck import ArithmeticModel, SoficApprox

N = 1000
M = N - 1
EPS = Fraction(1, 4)


def rectangle_shapes(m=M):
    widths = [2] * 3 + [3] * 3 + [4] * 3 + [6] * 3 + [8] * 3 + [12] * 3 + [16] * 3
    return [bs_rectangle(2, w, m) for w in widths]


def base_model(n=N, m=M):
    shapes = rectangle_shapes(m)
    domain = set().union(*shapes)
    domain |= {g.inverse() * h for g in shapes[-1] for h in shapes[-1]}
    domain |= {bs_a1(m), bs_a2(m)}
    return ArithmeticModel(n, m).approx_on(domain)


def conjugated(phi, sigma):
    sigma_inv = sigma.inverse()
    return SoficApprox(phi.n, phi.key_kind,
                       {g: sigma.compose(p).compose(sigma_inv)
                        for g, p in phi.table.items()})


def build(phi1, phi2, eps=EPS):
    return build_conjugator(phi1, phi2, eps, rectangle_shapes(),
                            inner_eps=Fraction(1, 8), n_threshold=N,
                            delta_prime=Fraction(3, 8), order_key=bs_a2(M))


@pytest.fixture(scope="module")
def phi1():
    return base_model()


class TestBuildConjugator:
    def test_equal_inputs_small_defect(self, phi1):
        conj = build(phi1, phi1)
        rep = conjugacy_defect(conj, phi1, phi1, [bs_a1(M), bs_a2(M)])
        assert rep.max_defect <= EPS

    def test_conjugate_inputs_small_defect(self, phi1):
        sigma = Permutation(np.random.default_rng(42).permutation(N))
        phi2 = conjugated(phi1, sigma)
        conj = build(phi1, phi2)
        rep = conjugacy_defect(conj, phi1, phi2, [bs_a1(M), bs_a2(M)])
        assert rep.max_defect <= EPS

    def test_tau_is_bijection(self, phi1):
        sigma = Permutation(np.random.default_rng(7).permutation(N))
        conj = build(phi1, conjugated(phi1, sigma))
        img = conj.tau.image
        assert sorted(img.tolist()) == list(range(N))

    def test_support_bound(self, phi1):
        sigma = Permutation(np.random.default_rng(3).permutation(N))
        conj = build(phi1, conjugated(phi1, sigma))
        assert conj.support_fraction() >= 1 - 4 * EPS / 7
        assert len(conj.lambda1) == len(conj.lambda2)
        assert {int(conj.tau.image[x]) for x in conj.lambda1} == set(conj.lambda2)

    def test_center_counts_equalized(self, phi1):
        sigma = Permutation(np.random.default_rng(5).permutation(N))
        conj = build(phi1, conjugated(phi1, sigma))
        for lvl in conj.levels:
            assert len(lvl.pairs) == len(lvl.trimmed)

    def test_degree_mismatch(self, phi1):
        small = ArithmeticModel(500, 499).approx_on([bs_a1(499), bs_a2(499)])
        with pytest.raises(ValueError):
            build_conjugator(phi1, small, EPS, rectangle_shapes())

    def test_insufficient_support_detected(self, phi1):
        sigma = Permutation(np.random.default_rng(1).permutation(N))
        with pytest.raises(InsufficientSupportError):
            build_conjugator(phi1, conjugated(phi1, sigma), EPS,
                             rectangle_shapes(), inner_eps=Fraction(1, 8),
                             n_threshold=N, delta_prime=Fraction(3, 8),
                             order_key=bs_a2(M), support_threshold=N)


class TestConjugacyDefect:
    def test_identity_tau_zero_defect(self, phi1):
        conj = build(phi1, phi1)
        ident = Conjugator(Permutation.identity(N), conj.lambda1, conj.lambda1,
                           conj.levels, EPS, conj.tiling1, conj.tiling1)
        rep = conjugacy_defect(ident, phi1, phi1, [bs_a1(M), bs_a2(M)])
        assert rep.max_defect.numerator == 0

    def test_random_tau_large_defect(self, phi1):
        sigma = Permutation(np.random.default_rng(11).permutation(N))
        phi2 = conjugated(phi1, sigma)
        conj = build(phi1, phi2)
        rand = Conjugator(Permutation(np.random.default_rng(12).permutation(N)),
                          conj.lambda1, conj.lambda2, conj.levels, EPS,
                          conj.tiling1, conj.tiling2)
        rep = conjugacy_defect(rand, phi1, phi2, [bs_a1(M), bs_a2(M)])
        assert rep.max_defect > Fraction(1, 2)

    def test_missing_key(self, phi1):
        conj = build(phi1, phi1)
        with pytest.raises(KeyError):
            conjugacy_defect(conj, phi1, phi1, [bs_a1(2)])

    def test_empty_keys(self, phi1):
        conj = build(phi1, phi1)
        with pytest.raises(ValueError):
            conjugacy_defect(conj, phi1, phi1, [])

    def test_defect_matches_manual(self, phi1):
        sigma = Permutation(np.random.default_rng(21).permutation(N))
        phi2 = conjugated(phi1, sigma)
        conj = build(phi1, phi2)
        rep = conjugacy_defect(conj, phi1, phi2, [bs_a2(M)])
        tau, tau_inv = conj.tau, conj.tau.inverse()
        manual = hamming(tau.compose(phi1.table[bs_a2(M)]).compose(tau_inv),
                         phi2.table[bs_a2(M)])
        assert rep.per_key[bs_a2(M)].value == manual.value


class TestSerialization:
    def test_json_has_tau_and_supports(self, phi1):
        import json
        conj = build(phi1, phi1)
        data = json.loads(conj.to_json())
        assert data["n"] == N
        assert sorted(data["lambda1"]) == sorted(conj.lambda1)
        assert sorted(data["tau"]) == list(range(N))
