from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from soficlab.bsgroup import (BsElement, bs_a1, bs_a2, bs_identity,
                              canonical_word, evaluate_word)
from soficlab.perm import Permutation, hamming
from soficlab.soficcheck import (ArithmeticModel, SoficApprox, affine_fixed_points,
                                 amplify, arithmetic_bs_approx, check_sofic,
                                 eval_word)


def ball(m, e_bound=2, num_bound=4):
    out = []
    for e in range(-e_bound, e_bound + 1):
        for d in range(0, e_bound + 1):
            for num in range(-num_bound, num_bound + 1):
                if d > 0 and num % m == 0:
                    continue
                out.append(BsElement(m, e, num, d))
    return out


word_strategy = st.lists(
    st.tuples(st.sampled_from(["a1", "a2"]), st.integers(-3, 3)),
    min_size=0, max_size=8).map(tuple)


class TestArithmeticModel:
    def test_a1_is_inverse_multiplication(self):
        psi = ArithmeticModel(5, 2)
        img = psi.permutation(bs_a1(2)).image
        assert img.tolist() == [(3 * x) % 5 for x in range(5)]

    def test_a2_no_fixed_points(self):
        for n in (2, 7, 101):
            psi = ArithmeticModel(n, 3 if n != 3 else 2)
            assert psi.permutation(bs_a2(psi.m)).fixed_point_count() == 0

    def test_relator_maps_to_identity(self):
        for m, n in ((2, 101), (3, 101)):
            psi = ArithmeticModel(n, m)
            a1, a2 = bs_a1(m), bs_a2(m)
            rel = a1.inverse() * a2 * a1 * (a2 ** m).inverse()
            assert psi.permutation(rel).is_identity()

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            ArithmeticModel(10, 2)

    def test_homomorphism_on_random_pairs(self):
        psi = ArithmeticModel(101, 3)
        rng = np.random.default_rng(0)
        elems = ball(3)
        for _ in range(50):
            g, h = (elems[rng.integers(len(elems))] for _ in range(2))
            lhs = psi.permutation(g).compose(psi.permutation(h))
            assert lhs == psi.permutation(g * h)


class TestCheckSofic:
    def test_psi_defect_zero(self):
        phi = arithmetic_bs_approx(101, 2, ball(2))
        report = check_sofic(phi, Fraction(1, 8))
        assert report.max_defect is not None
        assert report.max_defect.numerator == 0
        assert report.passed

    def test_identity_image_fails_displacement(self):
        m = 2
        table = {bs_identity(m): Permutation.identity(10),
                 bs_a2(m): Permutation.identity(10)}
        report = check_sofic(SoficApprox(10, "element", table), Fraction(1, 8))
        assert report.min_displacement.numerator == 0
        assert not report.passed

    def test_random_images_have_large_defect(self):
        rng = np.random.default_rng(1)
        m = 2
        table = {g: Permutation(rng.permutation(100))
                 for g in (bs_a1(m), bs_a2(m), bs_a1(m) * bs_a2(m))}
        report = check_sofic(SoficApprox(100, "element", table), Fraction(1, 8))
        assert report.max_defect > Fraction(1, 2)

    def test_empty_domain(self):
        with pytest.raises(ValueError):
            check_sofic(SoficApprox(5, "element", {}), Fraction(1, 8))


class TestEvalWord:
    def test_empty_word(self):
        phi = arithmetic_bs_approx(11, 2, [bs_a1(2), bs_a2(2)])
        assert eval_word(phi, ()).is_identity()

    def test_a2_cubed(self):
        n = 13
        phi = arithmetic_bs_approx(n, 2, [bs_a1(2), bs_a2(2)])
        img = eval_word(phi, (("a2", 3),)).image
        assert img.tolist() == [(x - 3) % n for x in range(n)]

    @given(word_strategy)
    @settings(max_examples=50)
    def test_w_winv_cancels(self, w):
        phi = arithmetic_bs_approx(17, 2, [bs_a1(2), bs_a2(2)])
        winv = tuple((g, -e) for g, e in reversed(w))
        assert eval_word(phi, w + winv).is_identity()

    @given(word_strategy)
    @settings(max_examples=50)
    def test_agrees_with_element_table(self, w):
        m, n = 3, 101
        psi = ArithmeticModel(n, m)
        phi = psi.approx_on([bs_a1(m), bs_a2(m)])
        assert eval_word(phi, w) == psi.permutation(evaluate_word(w, m))


class TestAmplify:
    def test_same_degree_unchanged(self):
        phi = arithmetic_bs_approx(7, 2, [bs_a2(2)])
        amp = amplify(phi, 7)
        assert amp.table[bs_a2(2)] == phi.table[bs_a2(2)]

    def test_blocks_and_tail(self):
        phi = arithmetic_bs_approx(3, 2, [bs_a2(2)])
        amp = amplify(phi, 7)
        img = amp.table[bs_a2(2)].image
        # two 3-blocks plus one identity point
        assert img[6] == 6
        assert img[:3].tolist() == [(x - 1) % 3 for x in range(3)]
        assert img[3:6].tolist() == [3 + (x - 1) % 3 for x in range(3)]

    def test_displacement_is_block_fraction(self):
        phi = arithmetic_bs_approx(101, 2, [bs_a2(2)])
        amp = amplify(phi, 1000)
        r = 1000 // 101
        moved = amp.n - amp.table[bs_a2(2)].fixed_point_count()
        assert moved == r * 101

    def test_shrink_rejected(self):
        phi = arithmetic_bs_approx(7, 2, [bs_a2(2)])
        with pytest.raises(ValueError):
            amplify(phi, 5)

    def test_multiplicativity_preserved(self):
        phi = arithmetic_bs_approx(101, 3, ball(3, 1, 2))
        amp = amplify(phi, 950)
        report = check_sofic(amp, Fraction(1, 8))
        assert report.max_defect.numerator == 0


class TestAffineFixedPoints:
    def test_relator_identity(self):
        w = (("a1", -1), ("a2", 1), ("a1", 1), ("a2", -2))
        rep = affine_fixed_points(w, 2, 11)
        assert rep.word_is_identity and rep.count == 11

    def test_translation_no_fixed_points(self):
        rep = affine_fixed_points((("a2", 1),), 2, 7)
        assert rep.a == 0 and rep.count == 0

    def test_a1_single_fixed_point(self):
        rep = affine_fixed_points((("a1", 1),), 2, 7)
        assert rep.count == 1

    @given(word_strategy, st.sampled_from([2, 3, 5]),
           st.sampled_from([11, 101, 997]))
    @settings(max_examples=120, deadline=None)
    def test_prediction_matches_bruteforce(self, w, m, n):
        phi = arithmetic_bs_approx(n, m, [bs_a1(m), bs_a2(m)])
        predicted = affine_fixed_points(w, m, n).count
        assert predicted == eval_word(phi, w).fixed_point_count()


class TestSerialization:
    def test_json_roundtrip(self):
        phi = arithmetic_bs_approx(11, 2, ball(2, 1, 2))
        other = SoficApprox.from_json(phi.to_json())
        assert other.n == phi.n and other.table == phi.table
