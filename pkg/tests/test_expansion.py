import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nullring.caps import Caps, use_caps
from nullring.errors import CapExceededError
from nullring.expansion import (
    EXCLUDED_BY_RUNS,
    MEMBER_DYADIC,
    BinaryExpansion,
    Indeterminate,
    binary_digits,
    check_run,
    find_run,
    longest_run,
    membership_verdict,
    periodic_expansion,
    split_at,
)
from nullring.ring import (
    Constant,
    Cyclic,
    DigitStream,
    Profile,
    SeededUniform,
    dyadic_embed,
    make_element,
    value_exact,
)

from oracles import frac_digits, multiplicative_order, powers_upto, series_value

ONES = DigitStream(Profile(1, 1), Constant(1))


def ones_value(terms=12):
    # Σ_{k in S} 2^-k, truncated far beyond any digit we look at
    return series_value((k, 1) for k in powers_upto(2**terms))


@st.composite
def finite_elements(draw):
    n = draw(st.integers(1, 3))
    t = draw(st.integers(1, 5))
    positions = [k for k in range(65) if bin(k).count("1") <= n]
    chosen = draw(st.lists(st.sampled_from(positions), max_size=12, unique=True))
    return make_element(Profile(n, t), {k: draw(st.integers(-t, t)) for k in chosen})


@st.composite
def streams(draw):
    n = draw(st.integers(1, 3))
    t = draw(st.integers(1, 4))
    kind = draw(st.sampled_from(["const", "cyclic", "uniform"]))
    if kind == "const":
        rule = Constant(draw(st.integers(-t, t).filter(bool)))
    elif kind == "cyclic":
        rule = Cyclic(tuple(draw(st.lists(st.integers(-t, t), min_size=1, max_size=5).filter(any))))
    else:
        rule = SeededUniform(draw(st.integers(0, 10**6)))
    return DigitStream(Profile(n, t), rule)


class TestSplit:
    def test_finite_example(self):
        x = make_element(Profile(1, 1), {0: 1, 8: 1})
        sp = split_at(x, 4)
        assert sp.head.digit_map == {0: 1}
        assert sp.tail_bound == Fraction(1, 16)
        assert sp.actual_tail.as_fraction() == Fraction(1, 256)

    def test_beyond_support(self):
        x = make_element(Profile(1, 3), {0: 1, 2: -3})
        sp = split_at(x, 40)
        assert sp.head == x
        assert sp.actual_tail.as_fraction() == 0
        assert sp.tail_bound == Fraction(3, 2**40)

    def test_stream(self):
        sp = split_at(ONES, 8)
        assert sp.head.support == [0, 1, 2, 4, 8]

    @settings(max_examples=150, deadline=None)
    @given(finite_elements(), st.integers(1, 70))
    def test_consistency(self, x, ell):
        sp = split_at(x, ell)
        assert value_exact(x) == value_exact(sp.head) + sp.actual_tail
        assert abs(sp.actual_tail.as_fraction()) <= Fraction(x.profile.t, 2**ell)

    def test_rejects_zero_ell(self):
        with pytest.raises(ValueError):
            split_at(ONES, 0)


class TestBinaryDigits:
    def test_ones_stream(self):
        got = binary_digits(ONES, 10)
        assert got == BinaryExpansion(1, "1101000100")
        assert got.fraction == frac_digits(ones_value(), 10)

    def test_one(self):
        assert str(binary_digits(make_element(Profile(1, 1), {0: 1}), 4)) == "1.0000"

    def test_half(self):
        assert str(binary_digits(dyadic_embed(1, 1), 3)) == "0.100"

    def test_negative(self):
        x = make_element(Profile(2, 2), {3: -2})  # -1/4
        assert binary_digits(x, 4) == BinaryExpansion(-1, "1100")

    def test_indeterminate_without_refinement(self):
        # at ell0 = 12 the bracket straddles the 2^-10 cell edge
        got = binary_digits(ONES, 10, max_refine=0)
        assert isinstance(got, Indeterminate)
        assert got.lower <= ones_value() <= got.upper

    def test_indeterminate_at_cap(self):
        with use_caps(Caps(sumset_limit=8)):
            assert isinstance(binary_digits(ONES, 10), Indeterminate)

    @settings(max_examples=150, deadline=None)
    @given(finite_elements(), st.integers(1, 80))
    def test_reconstruction(self, x, p):
        got = binary_digits(x, p)
        v = value_exact(x).as_fraction()
        assert 0 <= v - got.value() < Fraction(1, 2**p)
        assert got.fraction == frac_digits(v, p)

    @settings(max_examples=60, deadline=None)
    @given(streams(), st.integers(1, 40))
    def test_stream_digits_match_long_truncation(self, s, p):
        got = binary_digits(s, p)
        if isinstance(got, Indeterminate):
            return
        # a much deeper truncation lies in the same cell unless the true value is within 2^-200 of an edge
        deep = value_exact(s.truncate(400)).as_fraction()
        assert got.value() <= deep + Fraction(s.profile.t, 2**400)
        assert deep - Fraction(s.profile.t, 2**400) < got.value() + Fraction(1, 2**p)


class TestRuns:
    def test_ones_stream(self):
        w = find_run(ONES, 3)
        assert (w.start, w.length, w.digit, w.gap) == (8, 3, 0, (8, 16))
        assert frac_digits(ones_value(), 11)[8:11] == "000"

    @pytest.mark.parametrize("ell", [1, 2, 5])
    def test_any_length(self, ell):
        x = DigitStream(Profile(2, 3), Cyclic((3, -1, 2)))
        w = find_run(x, ell)
        assert check_run(x, w)

    def test_seeded_uniform_2s(self):
        x = DigitStream(Profile(2, 2), SeededUniform(2024))
        w = find_run(x, 4)
        assert w.gap == (24, 32)
        assert (1 << (w.gap[1] - w.gap[0])) > (1 << 5) * 2
        assert check_run(x, w)
        deep = value_exact(x.truncate(200)).as_fraction()
        assert frac_digits(deep, w.start + 4)[w.start:] == str(w.digit) * 4

    def test_finite_element(self):
        x = make_element(Profile(1, 2), {0: 1, 1: -2, 16: 1})
        w = find_run(x, 6)
        digits = frac_digits(value_exact(x).as_fraction(), w.start + 6)
        assert digits[w.start:] == str(w.digit) * 6

    @settings(max_examples=40, deadline=None)
    @given(streams(), st.integers(1, 8))
    def test_witness_recheck(self, s, ell):
        w = find_run(s, ell)
        assert check_run(s, w)

    def test_zero_stream(self):
        w = find_run(DigitStream(Profile(1, 1), Constant(0)), 4)
        assert w.digit == 0

    def test_cap(self):
        with use_caps(Caps(sumset_limit=256)):
            with pytest.raises(CapExceededError):
                find_run(DigitStream(Profile(3, 1), Constant(1)), 40)


class TestPeriodic:
    def test_one_third(self):
        e = periodic_expansion(1, 3)
        assert (e.preperiod, e.period, e.max_run) == ("", "01", 1)

    def test_half(self):
        e = periodic_expansion(1, 2)
        assert e.finite and e.preperiod == "1" and e.max_run is None

    def test_one_seventh(self):
        e = periodic_expansion(1, 7)
        assert (e.period, e.max_run) == ("001", 2)

    def test_rejects_unreduced(self):
        with pytest.raises(ValueError):
            periodic_expansion(2, 4)
        with pytest.raises(ValueError):
            periodic_expansion(1, 0)

    def test_longest_run(self):
        assert longest_run("0110001") == 3
        assert longest_run("") == 0

    @settings(max_examples=300)
    @given(st.integers(-500, 500), st.integers(1, 400))
    def test_reconstructs_value(self, p, q):
        if math.gcd(p, q) != 1:
            return
        e = periodic_expansion(p, q)
        assert e.value() == Fraction(p, q)
        odd = q >> ((q & -q).bit_length() - 1)
        assert len(e.preperiod) == (q & -q).bit_length() - 1 or e.finite
        if odd > 1:
            assert multiplicative_order(2, odd) % len(e.period) == 0
        digits = frac_digits(Fraction(p, q), 60)
        assert digits == (e.preperiod + e.period * 60)[:60]


class TestMembership:
    def test_dyadic(self):
        v = membership_verdict(3, 8)
        assert v.verdict == MEMBER_DYADIC
        assert v.embed.digit_map == {4: 6}

    def test_one_third(self):
        v = membership_verdict(1, 3)
        assert v.verdict == EXCLUDED_BY_RUNS and v.expansion.max_run == 1 and v.required_run == 2

    def test_integer(self):
        v = membership_verdict(5, 1)
        assert v.member and value_exact(v.embed).as_fraction() == 5

    def test_exclusion_soundness(self):
        for q in range(3, 258, 2):
            for p in range(1, q):
                if math.gcd(p, q) != 1:
                    continue
                v = membership_verdict(p, q)
                assert v.verdict == EXCLUDED_BY_RUNS
                # the unique expansion really has no run of the required length
                window = frac_digits(Fraction(p, q), len(v.expansion.preperiod) + 3 * len(v.expansion.period))
                assert longest_run(window) < v.required_run

    @given(st.integers(-10**6, 10**6), st.integers(0, 40))
    def test_dyadic_embed_value(self, a, k):
        q = Fraction(a, 2**k)
        v = membership_verdict(q.numerator, q.denominator)
        assert v.member and value_exact(v.embed).as_fraction() == q
