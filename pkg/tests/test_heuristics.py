import math
from fractions import Fraction

import pytest

from soficlab.heuristics import (CSV_HEADER, count_order4, heuristic_csv,
                                 p_sequence, s_bound_tail)


class TestPSequence:
    def test_base_values(self):
        seq = p_sequence(6)
        assert [seq[n] for n in range(1, 7)] == [
            Fraction(1), Fraction(1), Fraction(2, 3), Fraction(2, 3),
            Fraction(7, 15), Fraction(16, 45)]

    def test_recurrence_holds(self):
        seq = p_sequence(30)
        for n in range(5, 31):
            assert seq[n] == (seq[n - 1] + seq[n - 2] + seq[n - 4]) / n

    def test_non_increasing(self):
        seq = p_sequence(200)
        for n in range(2, 201):
            assert seq[n] <= seq[n - 1]

    def test_factorial_bound(self):
        seq = p_sequence(200)
        for n in range(3, 201):
            assert seq[n] < Fraction(1, math.factorial(n // 4))

    def test_integer_census(self):
        seq = p_sequence(500)
        for n in range(1, 501):
            count = seq[n] * math.factorial(n)
            assert count.denominator == 1 and count >= 0

    @pytest.mark.parametrize("n", range(1, 10))
    def test_matches_exhaustive_census(self, n):
        seq = p_sequence(n)
        assert seq[n] * math.factorial(n) == count_order4(n)

    def test_three_term_domination(self):
        # P_n <= 3 P_{n-4} / n since the sequence is non-increasing
        seq = p_sequence(60)
        for n in range(5, 61):
            assert seq[n] <= 3 * seq[n - 4] / n

    def test_bad_N(self):
        with pytest.raises(ValueError):
            p_sequence(0)


class TestSBoundTail:
    def test_eps_zero_limit(self):
        tt = s_bound_tail(5, 20, 1e-12)
        for row in tt.rows:
            assert row.log_s_bound == 0.0
            assert row.log_product == row.log_p

    def test_small_eps_decreasing(self):
        tt = s_bound_tail(1000, 2000, 0.02)
        assert tt.eventually_decreasing
        assert tt.tail_sum < 1e-100

    def test_large_window_values_finite(self):
        tt = s_bound_tail(900, 1100, 0.2)
        assert all(math.isfinite(r.log_product) for r in tt.rows)

    def test_log_p_matches_exact(self):
        tt = s_bound_tail(1, 50, 0.1)
        seq = p_sequence(50)
        for row in tt.rows:
            expected = math.log(seq[row.n].numerator) - math.log(seq[row.n].denominator)
            assert abs(row.log_p - expected) < 1e-12

    def test_bad_ranges(self):
        with pytest.raises(ValueError):
            s_bound_tail(10, 5, 0.1)
        with pytest.raises(ValueError):
            s_bound_tail(1, 10, 1.5)


class TestCsv:
    def test_header_and_p3(self):
        text = heuristic_csv(5, 0.2)
        lines = text.split("\n")
        assert lines[0] == CSV_HEADER
        assert lines[3].startswith("3,2,3,")

    def test_deterministic(self):
        assert heuristic_csv(20, 0.2) == heuristic_csv(20, 0.2)

    def test_lf_endings(self):
        text = heuristic_csv(10, 0.1)
        assert "\r" not in text and text.endswith("\n")
