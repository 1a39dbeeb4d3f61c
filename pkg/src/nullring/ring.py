"""Elements of the ring A = U_n A_n, where A_{n,t} is the set of sums
Σ_{k ∈ nS} x_k / 2^k with integer digits |x_k| <= t.

Finite-support elements carry exact dyadic values.  Infinite elements are
described by a :class:`DigitStream`, a deterministic digit rule indexed by
the position's rank in the sorted enumeration of nS.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .caps import current_caps
from .errors import CapacityError, DigitOutOfRangeError, PositionNotInSumsetError
from .sumset import (
    DEFAULT_BASE,
    BaseSet,
    VerificationReport,
    b_bound,
    build_sumset,
    enumerate_base,
    first_elements,
    in_sumset,
)


@dataclass(frozen=True, order=False)
class DyadicRational:
    """a / 2^k in lowest terms (a odd, or k == 0)."""

    numerator: int
    exponent: int = 0

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be non-negative")
        a, k = self.numerator, self.exponent
        if a == 0:
            k = 0
        else:
            shift = min(k, (a & -a).bit_length() - 1)
            a, k = a >> shift, k - shift
        object.__setattr__(self, "numerator", a)
        object.__setattr__(self, "exponent", k)

    @classmethod
    def from_fraction(cls, q: Fraction) -> "DyadicRational":
        q = Fraction(q)
        d = q.denominator
        if d & (d - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, d.bit_length() - 1)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def _align(self, other: "DyadicRational"):
        k = max(self.exponent, other.exponent)
        return self.numerator << (k - self.exponent), other.numerator << (k - other.exponent), k

    def __add__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        a, b, k = self._align(other)
        return DyadicRational(a + b, k)

    def __sub__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        a, b, k = self._align(other)
        return DyadicRational(a - b, k)

    def __neg__(self):
        return DyadicRational(-self.numerator, self.exponent)

    def __mul__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return DyadicRational(self.numerator * other.numerator, self.exponent + other.exponent)

    def __abs__(self):
        return DyadicRational(abs(self.numerator), self.exponent)

    def __lt__(self, other):
        a, b, _ = self._align(other)
        return a < b

    def __le__(self, other):
        a, b, _ = self._align(other)
        return a <= b

    def __str__(self):
        return f"{self.numerator}/2^{self.exponent}"


@dataclass(frozen=True)
class Profile:
    """Sumset order n and digit bound t, i.e. the set A_{n,t}."""

    n: int
    t: int
    base: BaseSet = DEFAULT_BASE

    def __post_init__(self):
        if self.n < 1 or self.t < 1:
            raise ValueError(f"profile needs n >= 1 and t >= 1, got n={self.n}, t={self.t}")


@dataclass(frozen=True)
class RingElement:
    """A finite-support element; ``digits`` is a sorted tuple of (position, digit)
    pairs with zero digits dropped."""

    profile: Profile
    digits: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        p = self.profile
        cleaned = []
        last = -1
        for k, x in self.digits:
            if k <= last:
                raise ValueError("digit positions must be strictly increasing")
            last = k
            if not in_sumset(p.base, p.n, k):
                raise PositionNotInSumsetError(k, p.n)
            if abs(x) > p.t:
                raise DigitOutOfRangeError(k, x, p.t)
            if x:
                cleaned.append((k, x))
        object.__setattr__(self, "digits", tuple(cleaned))

    @property
    def digit_map(self) -> dict[int, int]:
        return dict(self.digits)

    @property
    def support(self) -> list[int]:
        return [k for k, _ in self.digits]

    def __repr__(self):
        return f"RingElement(n={self.profile.n}, t={self.profile.t}, {self.digit_map})"


def make_element(profile: Profile, digits: Mapping[int, int]) -> RingElement:
    return RingElement(profile, tuple(sorted((int(k), int(x)) for k, x in digits.items())))


def zero(profile: Profile) -> RingElement:
    return RingElement(profile)


def one(base: BaseSet = DEFAULT_BASE) -> RingElement:
    return RingElement(Profile(1, 1, base), ((0, 1),))


def _same_base(x: RingElement, y: RingElement) -> BaseSet:
    if x.profile.base != y.profile.base:
        raise ValueError("elements are built on different base sets")
    return x.profile.base


def add(x: RingElement, y: RingElement) -> RingElement:
    base = _same_base(x, y)
    profile = Profile(max(x.profile.n, y.profile.n), x.profile.t + y.profile.t, base)
    acc = dict(x.digits)
    for k, d in y.digits:
        acc[k] = acc.get(k, 0) + d
    return make_element(profile, acc)


def neg(x: RingElement) -> RingElement:
    return RingElement(x.profile, tuple((k, -d) for k, d in x.digits))


def sub(x: RingElement, y: RingElement) -> RingElement:
    return add(x, neg(y))


def mul(x: RingElement, y: RingElement) -> RingElement:
    """Digit convolution z_r = Σ_{k+l=r} x_k y_l on (m+n)S.

    The result's digit bound is b_{m+n} * t * t', which holds because the pairs
    (k, l) with k + l = r inject into ordered (m+n)-representations of r.
    """
    base = _same_base(x, y)
    work = len(x.digits) * len(y.digits)
    cap = current_caps().enumeration
    if work > cap:
        raise CapacityError(f"product needs {work} digit products, cap is {cap}")
    m, n = x.profile.n, y.profile.n
    profile = Profile(m + n, b_bound(m + n) * x.profile.t * y.profile.t, base)
    acc: dict[int, int] = {}
    for k, a in x.digits:
        for l, b in y.digits:
            acc[k + l] = acc.get(k + l, 0) + a * b
    return make_element(profile, acc)


def value_exact(x: RingElement) -> DyadicRational:
    if not x.digits:
        return DyadicRational(0)
    top = x.digits[-1][0]
    return DyadicRational(sum(d << (top - k) for k, d in x.digits), top)


def dyadic_embed(a: int, k: int, base: BaseSet = DEFAULT_BASE) -> RingElement:
    """An element of some A_{1,t} whose value is a / 2^k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if a == 0:
        return zero(Profile(1, 1, base))
    s = _smallest_base_element_at_least(base, k)
    digit = a << (s - k)
    return RingElement(Profile(1, abs(digit), base), ((s, digit),))


def _smallest_base_element_at_least(base: BaseSet, k: int) -> int:
    limit = max(1, 2 * k)
    while True:
        for s in enumerate_base(base, limit):
            if s >= k:
                return s
        if base.is_finite:
            raise ValueError(f"finite base has no element >= {k}")
        limit *= 2


# -- digit streams -----------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    digit: int

    def digits(self, count: int, t: int) -> list[int]:
        return [self.digit] * count

    def bound(self, t: int) -> int:
        return abs(self.digit)


@dataclass(frozen=True)
class Cyclic:
    pattern: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "pattern", tuple(self.pattern))
        if not self.pattern:
            raise ValueError("cyclic pattern must be non-empty")

    def digits(self, count: int, t: int) -> list[int]:
        p = self.pattern
        return [p[i % len(p)] for i in range(count)]

    def bound(self, t: int) -> int:
        return max(abs(d) for d in self.pattern)


@dataclass(frozen=True)
class SeededUniform:
    seed: int

    def digits(self, count: int, t: int) -> list[int]:
        # Sequential draws, so every prefix is stable as count grows.
        rng = random.Random(self.seed)
        return [rng.randint(-t, t) for _ in range(count)]

    def bound(self, t: int) -> int:
        return t


Rule = Union[Constant, Cyclic, SeededUniform]


@dataclass(frozen=True)
class DigitStream:
    """An infinite element Σ_{k ∈ nS} x_k / 2^k with x_k = rule(rank of k in nS)."""

    profile: Profile
    rule: Rule = field(default_factory=lambda: Constant(1))

    def __post_init__(self):
        peak = self.rule.bound(self.profile.t)
        if peak > self.profile.t:
            raise DigitOutOfRangeError(-1, peak, self.profile.t)

    def prefix(self, count: int) -> list[tuple[int, int]]:
        positions = first_elements(self.profile.base, self.profile.n, count)
        return list(zip(positions, self.rule.digits(len(positions), self.profile.t)))

    def digits_upto(self, ell: int) -> list[tuple[int, int]]:
        positions = build_sumset(self.profile.base, self.profile.n, ell).upto(ell)
        return list(zip(positions, self.rule.digits(len(positions), self.profile.t)))

    def truncate(self, ell: int) -> RingElement:
        return RingElement(self.profile, tuple(self.digits_upto(ell)))

    def tail_bound(self, ell: int) -> Fraction:
        """Bound on |Σ_{k > ell} x_k / 2^k| using the rule's actual digit range."""
        return Fraction(self.rule.bound(self.profile.t), 1 << ell)


def sample_stream(profile: Profile, rule: Rule, count: int) -> list[tuple[int, int]]:
    if count < 0:
        raise ValueError("count must be non-negative")
    return DigitStream(profile, rule).prefix(count)


# -- JSON element format -----------------------------------------------------

_JSON_FIELDS = {"n", "t", "digits"}


def element_to_json(x: RingElement) -> dict:
    return {
        "n": x.profile.n,
        "t": x.profile.t,
        "digits": {str(k): d for k, d in x.digits},
    }


def _strict_int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    return value


def element_from_json(obj: Mapping) -> RingElement:
    if not isinstance(obj, Mapping):
        raise ValueError("element JSON must be an object")
    unknown = set(obj) - _JSON_FIELDS
    if unknown:
        raise ValueError(f"unknown element fields: {sorted(unknown)}")
    missing = _JSON_FIELDS - set(obj)
    if missing:
        raise ValueError(f"missing element fields: {sorted(missing)}")
    profile = Profile(_strict_int(obj["n"], "n"), _strict_int(obj["t"], "t"))
    if not isinstance(obj["digits"], Mapping):
        raise ValueError("digits must be an object")
    digits = {}
    for key, d in obj["digits"].items():
        if not (isinstance(key, str) and key.isdigit() and key.isascii()):
            raise ValueError(f"position {key!r} is not a decimal string")
        digits[int(key)] = _strict_int(d, f"digit at {key}")
    return make_element(profile, digits)


# -- closure sweep -----------------------------------------------------------


def _fraction_value(x: RingElement) -> Fraction:
    # independent of value_exact: plain rational summation
    return sum((Fraction(d, 2**k) for k, d in x.digits), Fraction(0))


def random_element(rng: random.Random, n: int, t: int, support: int = 12, max_position: int = 64,
                   base: BaseSet = DEFAULT_BASE) -> RingElement:
    positions = build_sumset(base, n, max_position).upto(max_position)
    chosen = rng.sample(positions, min(support, len(positions)))
    return make_element(Profile(n, t, base), {k: rng.randint(-t, t) for k in chosen})


def verify_closure(samples: int, seed: int, n_max: int = 3, t_max: int = 5, support: int = 12,
                   max_position: int = 64) -> VerificationReport:
    """Random triples: add/neg/mul agree with rational arithmetic on values,
    stay inside their declared profiles, and satisfy the ring axioms."""
    report = VerificationReport(name="closure")
    rng = random.Random(seed)
    worst_ratio = Fraction(0)
    for i in range(samples):
        x, y, z = (
            random_element(rng, rng.randint(1, n_max), rng.randint(1, t_max), rng.randint(0, support), max_position)
            for _ in range(3)
        )
        fx, fy, fz = map(_fraction_value, (x, y, z))
        s, p = add(x, y), mul(x, y)
        checks = {
            "add": _fraction_value(s) == fx + fy,
            "neg": _fraction_value(neg(x)) == -fx,
            "mul": _fraction_value(p) == fx * fy,
            "value_exact": value_exact(x).as_fraction() == fx,
            "add_profile": s.profile.n == max(x.profile.n, y.profile.n)
            and s.profile.t == x.profile.t + y.profile.t,
            "mul_support": all(in_sumset(p.profile.base, x.profile.n + y.profile.n, r) for r in p.support),
            "distributive": value_exact(mul(x, add(y, z))) == value_exact(add(mul(x, y), mul(x, z))),
            "associative": value_exact(mul(mul(x, y), z)) == value_exact(mul(x, mul(y, z))),
            "commutative": mul(x, y).digits == mul(y, x).digits and add(x, y).digits == add(y, x).digits,
        }
        # |z_r| <= b_{m+n} t t' is enforced by the validated constructor; record the slack too
        bound = b_bound(x.profile.n + y.profile.n) * x.profile.t * y.profile.t
        peak = max((abs(d) for _, d in p.digits), default=0)
        checks["mul_digit_bound"] = peak <= bound
        worst_ratio = max(worst_ratio, Fraction(peak, bound))
        report.checked += 1
        for name, ok in checks.items():
            if not ok:
                report.fail(sample=i, check=name, x=element_to_json(x), y=element_to_json(y))
    report.stats = {"samples": samples, "seed": seed, "max_digit_to_bound": str(worst_ratio)}
    return report
