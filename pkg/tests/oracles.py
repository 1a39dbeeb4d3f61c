"""Brute-force reference computations used as test oracles.

Nothing here imports the package; every function recomputes its answer
from definitions with plain loops and Fractions.
"""

import itertools
import math
from fractions import Fraction


def powers_upto(limit, radix=2):
    out = [0]
    p = 1
    while p <= limit:
        out.append(p)
        p *= radix
    return out


def brute_sumset(gens, n, limit):
    gens = [s for s in gens if s <= limit]
    return sorted({sum(c) for c in itertools.combinations_with_replacement(gens, n) if sum(c) <= limit})


def brute_rep_counts(gens, n, k_max):
    gens = [s for s in gens if s <= k_max]
    counts = [0] * (k_max + 1)
    for tup in itertools.product(gens, repeat=n):
        total = sum(tup)
        if total <= k_max:
            counts[total] += 1
    return counts


def g1_by_loop(ell, radix=2):
    return sum(1 for s in powers_upto(ell, radix) if s <= ell)


def scan_cover_ell(eps, ell_cap=10_000):
    """First ell with 3^{c_ell} * 2^(1-ell) < eps, c_ell = #{s in S : s <= ell}."""
    for ell in range(1, ell_cap + 1):
        if Fraction(3 ** g1_by_loop(ell), 2 ** (ell - 1)) < eps:
            return ell
    return None


def multiplicative_order(a, m):
    if m == 1:
        return 1
    x, k = a % m, 1
    while x != 1:
        x = x * a % m
        k += 1
    return k


def frac_digits(x, p):
    """First p fractional binary digits of x (floor convention)."""
    x = Fraction(x)
    f = x - math.floor(x)
    scaled = (f.numerator << p) // f.denominator  # floor(f * 2^p)
    return format(scaled, f"0{p}b")


def series_value(digits):
    return sum((Fraction(d, 2**k) for k, d in digits), Fraction(0))
