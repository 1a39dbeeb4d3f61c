"""Certified binary expansions, equal-digit run witnesses, and the test
of which rationals lie in the ring."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .caps import current_caps
from .errors import CapacityError, CertificationError
from .ring import DigitStream, DyadicRational, RingElement, dyadic_embed, value_exact
from .sumset import find_gap

Element = Union[RingElement, DigitStream]


@dataclass(frozen=True)
class HeadTailSplit:
    """x = head + tail with head on positions <= ell and |tail| <= tail_bound."""

    ell: int
    head: RingElement
    tail_bound: Fraction
    actual_tail: DyadicRational | None = None  # finite sources only


def split_at(x: Element, ell: int) -> HeadTailSplit:
    if ell < 1:
        raise ValueError("ell must be >= 1")
    bound = Fraction(x.profile.t, 1 << ell)
    if isinstance(x, DigitStream):
        return HeadTailSplit(ell, x.truncate(ell), bound)
    head = RingElement(x.profile, tuple((k, d) for k, d in x.digits if k <= ell))
    tail = value_exact(x) - value_exact(head)
    if abs(tail.as_fraction()) > bound:
        raise CertificationError(f"tail {tail} exceeds bound {bound}")
    return HeadTailSplit(ell, head, bound, tail)


@dataclass(frozen=True)
class BinaryExpansion:
    integer_part: int
    fraction: str

    def __str__(self):
        return f"{self.integer_part}.{self.fraction}" if self.fraction else str(self.integer_part)

    def value(self) -> Fraction:
        p = len(self.fraction)
        return self.integer_part + Fraction(int(self.fraction or "0", 2), 1 << p)


@dataclass(frozen=True)
class Indeterminate:
    """Refinement stopped before the value's 2^-p cell was pinned down."""

    p: int
    ell: int
    lower: Fraction
    upper: Fraction

    def __str__(self):
        return f"indeterminate(p={self.p}, ell={self.ell})"


def _cell(lo: Fraction, hi: Fraction, p: int) -> int | None:
    m = math.floor(lo * (1 << p))
    return m if hi * (1 << p) < m + 1 else None


def _expansion(m: int, p: int) -> BinaryExpansion:
    frac = m & ((1 << p) - 1)
    return BinaryExpansion(m >> p, format(frac, f"0{p}b") if p else "")


def binary_digits(x: Element, p: int, max_refine: int | None = None):
    """Integer part and first ``p`` fractional binary digits of ``x``.

    Finite elements are expanded exactly (terminating expansion).  Streams are
    bracketed by head value ± tail bound at ell = p + ceil(log2 t) + 2, and ell
    doubles up to ``max_refine`` times until the bracket sits inside a single
    cell of width 2^-p; otherwise :class:`Indeterminate` is returned.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if isinstance(x, RingElement):
        v = value_exact(x).as_fraction()
        return _expansion(math.floor(v * (1 << p)), p)
    if max_refine is None:
        max_refine = current_caps().refine_depth
    t = x.profile.t
    ell = p + (t - 1).bit_length() + 2
    cap = current_caps().sumset_limit
    lo = hi = Fraction(0)
    for _ in range(max_refine + 1):
        if ell > cap:
            break
        head = value_exact(x.truncate(ell)).as_fraction()
        r = x.tail_bound(ell)
        lo, hi = head - r, head + r
        m = _cell(lo, hi, p)
        if m is not None:
            return _expansion(m, p)
        ell *= 2
    return Indeterminate(p, min(ell, cap), lo, hi)


@dataclass(frozen=True)
class RunWitness:
    """Fractional digits start+1 .. start+length of the element all equal ``digit``."""

    start: int
    length: int
    digit: int
    gap: tuple[int, int]

    def to_json(self) -> dict:
        return {"start": self.start, "length": self.length, "digit": self.digit, "gap": list(self.gap)}


def run_threshold(ell: int, t: int) -> int:
    """Smallest-gap condition: k' - k > ell + bitlen(t) iff 2^(k'-k) > 2^(ell+1) t."""
    return ell + t.bit_length()


def find_run(x: Element, ell: int, max_refine: int | None = None) -> RunWitness:
    if ell < 1:
        raise ValueError("ell must be >= 1")
    prof = x.profile
    gap = find_gap(prof.base, prof.n, run_threshold(ell, prof.t))
    k = gap.k
    assert (1 << gap.gap) > (1 << (ell + 1)) * prof.t
    digits = binary_digits(x, k + ell, max_refine)
    if isinstance(digits, Indeterminate):
        raise CertificationError(
            f"digits up to position {k + ell} undetermined after refinement to ell={digits.ell}"
        )
    window = digits.fraction[k : k + ell]
    if len(set(window)) != 1:
        raise CertificationError(f"digits {window!r} after position {k} are not all equal")
    return RunWitness(start=k, length=ell, digit=int(window[0]), gap=(gap.k, gap.k_next))


def check_run(x: Element, w: RunWitness, max_refine: int | None = None) -> bool:
    """Recompute the witness window from scratch."""
    digits = binary_digits(x, w.start + w.length, max_refine)
    if isinstance(digits, Indeterminate):
        return False
    return digits.fraction[w.start : w.start + w.length] == str(w.digit) * w.length


# -- rationals ---------------------------------------------------------------


def longest_run(s: str) -> int:
    best = run = 0
    prev = None
    for ch in s:
        run = run + 1 if ch == prev else 1
        prev = ch
        best = max(best, run)
    return best


@dataclass(frozen=True)
class PeriodicExpansion:
    p: int
    q: int
    integer_part: int
    preperiod: str
    period: str
    max_run: int | None  # None: the expansion ends in zeros (unbounded run)

    @property
    def finite(self) -> bool:
        return self.period == "0"

    def value(self) -> Fraction:
        pre = Fraction(int(self.preperiod or "0", 2), 1 << len(self.preperiod))
        L = len(self.period)
        per = Fraction(int(self.period, 2), (1 << L) - 1) / (1 << len(self.preperiod))
        return self.integer_part + pre + per

    def __str__(self):
        return f"{self.integer_part}.{self.preperiod}({self.period})"


def periodic_expansion(p: int, q: int) -> PeriodicExpansion:
    """Binary expansion of p/q by long division with remainder cycle detection."""
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError(f"{p}/{q} is not a reduced fraction with positive denominator")
    whole, r = divmod(p, q)
    seen: dict[int, int] = {}
    digits = []
    while r not in seen:
        if len(digits) > 2 * q + 2:
            raise CapacityError("long division failed to cycle")
        seen[r] = len(digits)
        r *= 2
        digits.append("1" if r >= q else "0")
        r = r - q if r >= q else r
    start = seen[r]
    pre, per = "".join(digits[:start]), "".join(digits[start:])
    # Long division never yields an all-ones period (it would need remainder q),
    # so all-equal periods are exactly the terminating case.
    max_run = None if per == "0" else longest_run(pre + per + per)
    return PeriodicExpansion(p, q, whole, pre, per, max_run)


MEMBER_DYADIC = "member-dyadic"
EXCLUDED_BY_RUNS = "excluded-by-runs"


@dataclass(frozen=True)
class MembershipVerdict:
    p: int
    q: int
    verdict: str
    expansion: PeriodicExpansion
    embed: RingElement | None = None
    # a run of this length must occur in every element of the ring but never
    # occurs in the expansion of p/q
    required_run: int | None = None

    @property
    def member(self) -> bool:
        return self.verdict == MEMBER_DYADIC


def membership_verdict(p: int, q: int) -> MembershipVerdict:
    exp = periodic_expansion(p, q)
    if q & (q - 1) == 0:
        return MembershipVerdict(p, q, MEMBER_DYADIC, exp, embed=dyadic_embed(p, q.bit_length() - 1))
    assert exp.max_run is not None
    return MembershipVerdict(p, q, EXCLUDED_BY_RUNS, exp, required_run=exp.max_run + 1)
