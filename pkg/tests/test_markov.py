"""Unit tests for Markov partitions, transfer matrices and exact stationary densities."""
import math
import random
from fractions import Fraction as F

import pytest

from randluroth.core import Params
from randluroth.errors import DomainError, NonMarkovPartitionError
from randluroth.markov import (
    MarkovPartition,
    c0_truncated_transfer,
    digit_frequencies,
    lyapunov_exact,
    markov_points,
    stationary_density,
    transfer_matrix,
    verify_markov,
    z_minus,
    z_plus,
    z_point,
)


def power_of_two_points(k):
    """Critical set of c = 1/2^k together with the points 1 - 1/2^i, i = 2..k."""
    c = F(1, 2 ** k)
    pts = {c, F(1)}
    n = 1
    while True:
        added = False
        for pt in ([z_point(n)] if n >= 2 else []) + \
                  ([z_plus(c, n)] if n >= 2 else []) + [z_minus(c, n)]:
            if c <= pt <= 1:
                pts.add(pt)
                added = True
        if not added and n > 2 ** k + 2:
            break
        n += 1
    pts |= {1 - F(1, 2 ** i) for i in range(2, k + 1)}
    return pts


class TestMarkovPoints:
    def test_quarter(self):
        part = markov_points(F(1, 4))
        assert part.breakpoints == [F(1, 4), F(13, 48), F(5, 16), F(1, 3), F(3, 8),
                                    F(11, 24), F(1, 2), F(5, 8), F(3, 4), F(7, 8), F(1)]

    def test_half(self):
        assert markov_points(F(1, 2)).breakpoints == [F(1, 2), F(3, 4), F(1)]

    def test_powers_of_two(self):
        for k in range(1, 7):
            part = markov_points(F(1, 2 ** k))
            assert set(part.breakpoints) == power_of_two_points(k)

    def test_provenance(self):
        part = markov_points(F(1, 4))
        assert part.provenance[F(5, 8)] == "critical"
        assert part.provenance[F(3, 4)] == "orbit"

    def test_domain(self):
        with pytest.raises(DomainError):
            markov_points(F(0))
        with pytest.raises(DomainError):
            markov_points(F(2, 3))

    def test_verify_rejects_coarse_partition(self):
        part = markov_points(F(1, 4))
        broken = MarkovPartition(part.c, [F(1, 4), F(1, 2), F(1)], {})
        with pytest.raises(NonMarkovPartitionError):
            verify_markov(broken)


class TestTransferMatrix:
    def test_half_entries(self):
        p = F(2, 7)
        tm = transfer_matrix(markov_points(F(1, 2)), Params(F(1, 2), p))
        allowed = {F(0), p / 2, (1 - p) / 2, F(1, 2)}
        assert {e for row in tm.entries for e in row} <= allowed

    def test_mass_conservation(self):
        for c, p in ((F(1, 3), F(1, 4)), (F(1, 4), F(2, 5)), (F(1, 5), F(1, 2))):
            tm = transfer_matrix(markov_points(c), Params(c, p))
            cells = tm.partition.cells()
            for i, (a, b) in enumerate(cells):
                out = sum(tm.entries[k][i] * (cb - ca)
                          for k, (ca, cb) in enumerate(cells))
                assert out == b - a

    def test_c_zero_truncated_lebesgue(self):
        for d_max in (3, 6, 12):
            m = c0_truncated_transfer(d_max, Params(F(0), F(1, 3)))
            for row in m:
                assert sum(row) == 1 - F(1, d_max)


class TestStationaryDensity:
    def test_third(self):
        for p in (F(1, 4), F(1, 2), F(3, 4)):
            points, values = stationary_density(F(1, 3), Params(F(1, 3), p)).merged()
            assert points == [F(1, 3), F(2, 3), F(1)]
            assert values == [F(9, 8), F(15, 8)]

    def test_quarter_formula(self):
        # p = 1/2 is excluded: the first two pieces coincide there and merge
        for p in (F(3, 10), F(2, 5), F(7, 9)):
            points, values = stationary_density(F(1, 4), Params(F(1, 4), p)).merged()
            assert points == [F(1, 4), F(1, 2), F(3, 4), F(1)]
            assert values == [4 / (2 * p + 3), (4 * p + 2) / (2 * p + 3), F(2)]

    def test_eighth_formula(self):
        for p in (F(1, 3), F(2, 5)):
            points, values = stationary_density(F(1, 8), Params(F(1, 8), p)).merged()
            den = 2 * p * p + 3 * p + 5
            assert points == [F(1, 8), F(1, 4), F(1, 2), F(3, 4), F(7, 8), F(1)]
            assert values == [8 / den, (4 * p + 4) / den, (4 * p * p + 2 * p + 4) / den,
                              (4 * p * p + 6 * p + 4) / den, (4 * p * p + 6 * p + 12) / den]

    def test_stationarity_residual_zero(self):
        rng = random.Random(4)
        for _ in range(8):
            den = rng.randint(3, 12)
            num = rng.randint(1, den // 2)
            c = F(num, den)
            dens = stationary_density(c, Params(c, F(1, 2)))
            tm = transfer_matrix(dens.partition, Params(c, F(1, 2)))
            for k in range(len(dens.values)):
                image = sum(tm.entries[k][i] * dens.values[i]
                            for i in range(len(dens.values)))
                assert image == dens.values[k]
            assert all(v > 0 for v in dens.values)

    def test_mass_one(self):
        dens = stationary_density(F(2, 11), Params(F(2, 11), F(1, 3)))
        assert sum(v * (b - a) for v, (a, b) in
                   zip(dens.values, dens.partition.cells())) == 1

    def test_evaluate_and_measure(self):
        dens = stationary_density(F(1, 3), Params(F(1, 3), F(1, 2)))
        assert dens.evaluate(F(1, 2)) == F(9, 8)
        assert dens.evaluate(F(1)) == F(15, 8)
        assert dens.measure(F(1, 2), F(1)) == F(13, 16)


class TestDigitFrequencies:
    def test_third_formulas(self):
        for p in (F(1, 5), F(1, 2), F(4, 5)):
            fr = digit_frequencies(F(1, 3), Params(F(1, 3), p))
            assert fr["digit"][2] == F(13, 16)
            assert fr["digit"][3] == F(3, 16)
            assert fr["sign_digit"][(0, 2)] == (5 + 5 * p) / 16
            assert fr["sign_digit"][(1, 2)] == (8 - 5 * p) / 16
            assert fr["sign_digit"][(0, 3)] == (1 + p) / 16
            assert fr["sign_digit"][(1, 3)] == (2 - p) / 16

    def test_quarter_formulas(self):
        for p in (F(1, 3), F(2, 3)):
            fr = digit_frequencies(F(1, 4), Params(F(1, 4), p))
            assert fr["digit"][2] == (2 * p + 2) / (2 * p + 3)
            assert fr["digit"][3] == F(2, 3) / (2 * p + 3)
            assert fr["digit"][4] == F(1, 3) / (2 * p + 3)

    def test_eighth_smallest_cell(self):
        p = F(1, 4)
        fr = digit_frequencies(F(1, 8), Params(F(1, 8), p))
        assert fr["digit"][8] == F(1, 7) / (2 * p * p + 3 * p + 5)


class TestLyapunovExact:
    def test_third(self):
        val = lyapunov_exact(F(1, 3), Params(F(1, 3), F(1, 2)))
        expected = 13 / 16 * math.log(2) + 3 / 16 * math.log(6)
        assert abs(val - expected) < 1e-14
        assert abs(val - 0.89913) < 5e-5

    def test_quarter_formula(self):
        for p in (0.2, 0.7):
            val = lyapunov_exact(F(1, 4), Params(F(1, 4), F(p).limit_denominator(10)))
            pf = float(F(p).limit_denominator(10))
            expected = (pf * math.log(64) + math.log(27648)) / (6 * pf + 9)
            assert abs(val - expected) < 1e-12

    def test_eighth_p_zero_limit(self):
        # algebraic check of the printed numerator constant at p -> 0
        val = lyapunov_exact(F(1, 8), Params(F(1, 8), F(1, 10 ** 9)))
        assert abs(val - 7.49448 / 5) < 1e-4

    def test_half_is_log_two(self):
        assert abs(lyapunov_exact(F(1, 2), Params(F(1, 2), F(1, 2))) - math.log(2)) < 1e-15
