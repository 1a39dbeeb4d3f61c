import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nullring.caps import Caps, use_caps
from nullring.dimension import (
    box_count,
    certify,
    cover_bound,
    cover_check,
    enumerate_centers,
)
from nullring.errors import CapacityError, CapExceededError
from nullring.ring import DyadicRational, Profile, make_element
from nullring.expansion import split_at
from nullring.sumset import BaseSet

from oracles import brute_sumset, g1_by_loop, powers_upto, scan_cover_ell


def c_ell_oracle(n, ell):
    return len(brute_sumset(powers_upto(ell), n, ell))


class TestCoverBound:
    def test_examples(self):
        b = cover_bound(1, 1, 1, 4)
        assert b.exact and b.upper == Fraction(81, 8)
        b = cover_bound(1, 1, 1, 64)
        assert b.upper == Fraction(3**8, 2**63)
        assert float(b.upper) == pytest.approx(7.1e-16, rel=0.01)

    @pytest.mark.parametrize("n,t,ell", [(1, 1, 10), (2, 3, 33), (3, 2, 70), (1, 5, 100)])
    def test_exact_for_s_one(self, n, t, ell):
        expected = Fraction((2 * t + 1) ** c_ell_oracle(n, ell) * t, 2 ** (ell - 1))
        assert cover_bound(n, t, 1, ell).upper == expected

    @pytest.mark.parametrize("s", [Fraction(1, 2), Fraction(1, 3), Fraction(1, 10), Fraction(2, 3)])
    @pytest.mark.parametrize("n,t,ell", [(1, 1, 17), (2, 3, 40), (1, 2, 5)])
    def test_bracket_is_directed(self, s, n, t, ell):
        b = cover_bound(n, t, s, ell)
        p, q = s.numerator, s.denominator
        c = c_ell_oracle(n, ell)
        # B^q = (2t+1)^{cq} (t / 2^(ell-1))^p exactly
        exact_pow = Fraction((2 * t + 1) ** (c * q) * t**p, 2 ** ((ell - 1) * p))
        assert b.lower**q <= exact_pow <= b.upper**q
        assert b.upper - b.lower <= b.upper * Fraction(1, 2**50)

    @given(st.integers(1, 2), st.integers(1, 6), st.sampled_from([Fraction(1, 10), Fraction(1, 2), Fraction(1)]),
           st.integers(1, 80))
    def test_monotone_in_t(self, n, t, s, ell):
        assert cover_bound(n, t, s, ell).upper < cover_bound(n, t + 1, s, ell).lower

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            cover_bound(1, 1, 0, 4)
        with pytest.raises(ValueError):
            cover_bound(1, 1, Fraction(3, 2), 4)
        with pytest.raises(ValueError):
            cover_bound(1, 1, 1, 0)

    def test_log_space_fallback(self):
        exact = cover_bound(2, 3, Fraction(1, 2), 300)
        with use_caps(Caps(bigint_bits=16)):
            logb = cover_bound(2, 3, Fraction(1, 2), 300)
        assert logb.upper is None
        # 2^log2_upper must dominate the exact bracket
        assert math.log2(exact.upper) <= float(logb.log2_upper) < math.log2(exact.upper) + 1e-9


class TestCertify:
    def test_pinned_example(self):
        expected = scan_cover_ell(Fraction(1, 10**9))
        assert expected == 42
        cert = certify(1, 1, 1, Fraction(1, 10**9), 128)
        assert cert.ell == expected
        assert cert.c_ell == g1_by_loop(42) == 7
        assert cert.hs_bound.upper == Fraction(3**7, 2**41)

    def test_immediate(self):
        assert certify(1, 1, 1, 1000, 8).ell == 1

    def test_self_consistency(self):
        cert = certify(2, 3, Fraction(1, 2), Fraction(1, 10**6), 1 << 16)
        again = cover_bound(2, 3, Fraction(1, 2), cert.ell)
        assert again.lower <= cert.hs_bound.upper and again.upper >= cert.hs_bound.lower
        assert cert.hs_bound.upper < cert.epsilon

    @pytest.mark.parametrize("n,t,s", [(1, 1, Fraction(1, 2)), (2, 1, Fraction(1, 10)), (2, 3, 1), (1, 3, Fraction(1, 3))])
    def test_minimal(self, n, t, s):
        eps = Fraction(1, 10**6)
        cert = certify(n, t, s, eps, 1 << 20)
        assert cover_bound(n, t, s, cert.ell).upper < eps
        # every earlier ell fails, checked through the exact q-th power inequality
        p, q = Fraction(s).numerator, Fraction(s).denominator
        for ell in range(max(1, cert.ell - 40), cert.ell):
            c = c_ell_oracle(n, ell)
            assert Fraction((2 * t + 1) ** (c * q) * t**p, 2 ** ((ell - 1) * p)) >= eps**q

    def test_cap_exceeded(self):
        with pytest.raises(CapExceededError, match="larger ell_cap"):
            certify(1, 1, 1, Fraction(1, 10**9), 41)

    def test_log_space_certificate(self):
        with use_caps(Caps(bigint_bits=8)):
            cert = certify(1, 1, 1, Fraction(1, 10**9), 128)
        assert cert.center_bound is None and cert.ell >= 42
        assert cert.to_json()["center_bound"].startswith("2^")

    def test_json(self):
        cert = certify(1, 1, 1, Fraction(1, 10**9), 128)
        assert cert.to_json() == {
            "n": 1,
            "t": 1,
            "s": "1/1",
            "ell": 42,
            "c_ell": 7,
            "center_bound": "2187",
            "radius": "1/2^42",
            "hs_bound_upper": "2187/2199023255552",
            "epsilon": "1/1000000000",
        }

    def test_custom_base(self):
        cert = certify(1, 1, 1, Fraction(1, 10**6), 1 << 20, base=BaseSet.powers(3))
        assert cert.hs_bound.upper < Fraction(1, 10**6)


class TestCenters:
    def test_small(self):
        got = enumerate_centers(1, 1, 1)
        assert [v.as_fraction() for v in got] == [Fraction(k, 2) for k in range(-3, 4)]

    def test_single_position(self):
        assert [v.as_fraction() for v in enumerate_centers(1, 1, 0)] == [-1, 0, 1]

    @pytest.mark.parametrize("n,t,ell", [(1, 2, 2), (2, 1, 4), (2, 2, 4), (3, 1, 5), (1, 3, 4)])
    def test_brute_force(self, n, t, ell):
        positions = brute_sumset(powers_upto(ell), n, ell)
        values = {
            sum((Fraction(a, 2**k) for k, a in zip(positions, digits)), Fraction(0))
            for digits in itertools.product(range(-t, t + 1), repeat=len(positions))
        }
        got = enumerate_centers(n, t, ell)
        assert [v.as_fraction() for v in got] == sorted(values)
        assert len(got) <= (2 * t + 1) ** len(positions)

    def test_cap(self):
        with use_caps(Caps(enumeration=100)):
            with pytest.raises(CapacityError):
                enumerate_centers(1, 2, 2)  # 5^3 tuples

    @pytest.mark.parametrize("n,t,ell,seed", [(1, 1, 2, 0), (2, 2, 4, 1), (1, 3, 8, 2), (3, 1, 6, 3)])
    def test_cover_check(self, n, t, ell, seed):
        rep = cover_check(n, t, ell, 100, seed)
        assert rep.passed, rep.failures
        assert Fraction(rep.stats["max_distance"]) <= Fraction(t, 2**ell)

    def test_empty_tail(self):
        x = make_element(Profile(1, 1), {0: 1, 2: -1})
        assert split_at(x, 2).actual_tail == DyadicRational(0)


class TestBoxCount:
    def test_seven_centers(self):
        series = box_count(1, 1, 1, 1)
        assert series.rows[0].count == 7  # cells floor(2v) for v in {-3/2, ..., 3/2}

    def test_depth_zero(self):
        series = box_count(1, 1, 5, 0)
        assert [r.count for r in series.rows] == [3] * 5

    def test_trend(self):
        rows = box_count(1, 1, 12, 64).rows
        counts = [r.count for r in rows]
        ratios = [r.ratio for r in rows]
        assert all(a <= b for a, b in zip(counts, counts[1:]))
        assert all(r >= 0 for r in ratios)
        assert all(a > b for a, b in zip(ratios[:7], ratios[1:7]))
        assert ratios[-1] < ratios[0] / 4

    def test_counts_by_brute_force(self):
        values = [v.as_fraction() for v in enumerate_centers(2, 1, 6)]
        series = box_count(2, 1, 8, 6)
        for row in series.rows:
            cells = {(v / row.delta).__floor__() for v in values}
            assert row.count == len(cells)

    def test_csv(self):
        csv = box_count(1, 1, 2, 1).to_csv()
        assert csv.splitlines()[0] == "j,delta,N,ratio"
        assert csv.splitlines()[1].startswith("1,1/2,7,")
