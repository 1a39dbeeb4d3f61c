"""Cover certificates for the vanishing of H^s(A_{n,t}), exact cover
centers, and empirical box counting on truncations.

For a scale ell, A_{n,t} is covered by (2t+1)^{c_ell} intervals of radius
r = t / 2^ell centred on the head sums over (nS)_{<= ell}, where
c_ell = g_n(ell).  Hence

    H^s_{2r}(A_{n,t}) <= (2t+1)^{c_ell} * (t / 2^(ell-1))^s,

and the right-hand side tends to 0 as ell grows, for every s > 0.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from . import _interval

from .caps import current_caps
from .errors import CapacityError, CapExceededError
from .ring import DyadicRational, Profile, RingElement, value_exact
from .sumset import DEFAULT_BASE, BaseSet, VerificationReport, build_sumset


def _validate(n: int, t: int, s: Fraction, ell: int):
    if n < 1 or t < 1 or ell < 1:
        raise ValueError("n, t and ell must be >= 1")
    if not 0 < s <= 1:
        raise ValueError(f"s must lie in (0, 1], got {s}")


def _c_ell(base: BaseSet, n: int, ell: int) -> int:
    return build_sumset(base, n, ell).count_le(ell)


@dataclass(frozen=True)
class CoverBound:
    """Directed bracket lower <= H-bound <= upper.

    In log space (huge center counts) only ``log2_upper`` is set.
    """

    lower: Fraction | None
    upper: Fraction | None
    log2_upper: Fraction | None = None

    @property
    def exact(self) -> bool:
        return self.lower is not None and self.lower == self.upper

    def below(self, eps: Fraction) -> bool:
        if self.upper is not None:
            return self.upper < eps
        return self.log2_upper < _log2_lower(eps)


def _root_bracket(t: int, ell: int, s: Fraction, extra_bits: int = 64) -> tuple[Fraction, Fraction]:
    """Bracket (t / 2^(ell-1))^s = (t^p / 2^((ell-1)p))^(1/q) to ``extra_bits``
    bits beyond its magnitude."""
    p, q = s.numerator, s.denominator
    if q == 1:
        v = Fraction(t**p, 1 << ((ell - 1) * p))
        return v, v
    drop = (ell - 1) * p
    prec = -(-drop // q) + extra_bits + t.bit_length()
    num = t**p << (prec * q - drop)
    root, exact = gmpy2.iroot(gmpy2.mpz(num), q)
    root = int(root)
    scale = 1 << prec
    return Fraction(root, scale), Fraction(root if exact else root + 1, scale)


def _log2_upper_bound(t: int, ell: int, s: Fraction, c: int) -> Fraction:
    ctx = _interval.context(128)
    x = c * _interval.log2(ctx, 2 * t + 1) + ctx.mpf(s.numerator) / s.denominator * (
        _interval.log2(ctx, t) - (ell - 1)
    )
    return _interval.endpoints(x)[1]


def _log2_lower(eps: Fraction) -> Fraction:
    ctx = _interval.context(128)
    x = _interval.log2(ctx, eps.numerator) - _interval.log2(ctx, eps.denominator)
    return _interval.endpoints(x)[0]


def _centers_too_big(t: int, c: int, q: int) -> bool:
    return c * q * (2 * t + 1).bit_length() > current_caps().bigint_bits


def cover_bound(n: int, t: int, s, ell: int, base: BaseSet = DEFAULT_BASE, extra_bits: int = 64) -> CoverBound:
    """(2t+1)^{g_n(ell)} * (t / 2^(ell-1))^s as a directed rational bracket."""
    s = Fraction(s)
    _validate(n, t, s, ell)
    c = _c_ell(base, n, ell)
    if _centers_too_big(t, c, s.denominator):
        return CoverBound(None, None, _log2_upper_bound(t, ell, s, c))
    centers = (2 * t + 1) ** c
    lo, hi = _root_bracket(t, ell, s, extra_bits)
    return CoverBound(centers * lo, centers * hi)


def _exact_below(t: int, ell: int, s: Fraction, c: int, eps: Fraction) -> bool:
    """(2t+1)^c (t/2^(ell-1))^(p/q) < a/b  iff  (2t+1)^(cq) t^p b^q < a^q 2^((ell-1)p)."""
    p, q = s.numerator, s.denominator
    lhs = (2 * t + 1) ** (c * q) * t**p * eps.denominator**q
    rhs = eps.numerator**q << ((ell - 1) * p)
    return lhs < rhs


@dataclass(frozen=True)
class CoverCertificate:
    n: int
    t: int
    s: Fraction
    ell: int
    c_ell: int
    center_bound: int | None  # None when only log2 is tracked
    center_bound_log2: Fraction
    radius: Fraction
    hs_bound: CoverBound
    epsilon: Fraction
    base: BaseSet = DEFAULT_BASE

    def to_json(self) -> dict:
        if self.center_bound is not None:
            centers = str(self.center_bound)
        else:
            centers = f"2^{float(self.center_bound_log2):.6f}"
        if self.hs_bound.upper is not None:
            upper = _frac_str(self.hs_bound.upper)
        else:
            upper = f"2^{float(self.hs_bound.log2_upper):.6f}"
        return {
            "n": self.n,
            "t": self.t,
            "s": _frac_str(self.s, force=True),
            "ell": self.ell,
            "c_ell": self.c_ell,
            "center_bound": centers,
            "radius": f"{self.t}/2^{self.ell}",
            "hs_bound_upper": upper,
            "epsilon": _frac_str(self.epsilon),
        }


def _frac_str(x: Fraction, force: bool = False) -> str:
    if x.denominator == 1 and not force:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def certify(n: int, t: int, s, eps, ell_cap: int, base: BaseSet = DEFAULT_BASE) -> CoverCertificate:
    """Smallest ell <= ell_cap whose cover bound is certified below ``eps``."""
    s, eps = Fraction(s), Fraction(eps)
    _validate(n, t, s, 1)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if ell_cap < 1:
        raise ValueError("ell_cap must be >= 1")
    table = build_sumset(base, n, ell_cap)
    counts = table.counts
    for ell in range(1, ell_cap + 1):
        c = int(counts[ell])
        if _centers_too_big(t, c, s.denominator):
            bound = cover_bound(n, t, s, ell, base)
            if not bound.below(eps):
                continue
        elif not _exact_below(t, ell, s, c, eps):
            continue
        else:
            bound = _certified_upper(n, t, s, ell, base, eps)
        return CoverCertificate(
            n=n,
            t=t,
            s=s,
            ell=ell,
            c_ell=c,
            center_bound=None if bound.upper is None else (2 * t + 1) ** c,
            center_bound_log2=_log2_center_bound(t, c),
            radius=Fraction(t, 1 << ell),
            hs_bound=bound,
            epsilon=eps,
            base=base,
        )
    raise CapExceededError(
        f"cover bound for n={n}, t={t}, s={s} not below {eps} for ell <= {ell_cap}; "
        "the bound tends to 0 as ell grows, so a larger ell_cap will succeed"
    )


def _certified_upper(n, t, s, ell, base, eps) -> CoverBound:
    # the true bound is strictly below eps, so enough precision gets the bracket there too
    bits = 64
    while True:
        bound = cover_bound(n, t, s, ell, base, extra_bits=bits)
        if bound.below(eps):
            return bound
        bits *= 2


def _log2_center_bound(t: int, c: int) -> Fraction:
    # upper end, so the reported log2 never understates the center count
    return _interval.endpoints(c * _interval.log2(_interval.context(128), 2 * t + 1))[1]


# -- cover centers -----------------------------------------------------------


def _head_positions(base: BaseSet, n: int, ell: int) -> list[int]:
    return build_sumset(base, n, max(ell, 0)).upto(max(ell, 0))


def enumerate_centers(n: int, t: int, ell: int, base: BaseSet = DEFAULT_BASE) -> list[DyadicRational]:
    """Distinct values Σ_{k in (nS)_{<= ell}} a_k / 2^k over all a_k in [-t, t]."""
    if n < 1 or t < 1 or ell < 0:
        raise ValueError("need n >= 1, t >= 1, ell >= 0")
    positions = _head_positions(base, n, ell)
    tuples = (2 * t + 1) ** len(positions)
    cap = current_caps().enumeration
    if tuples > cap:
        raise CapacityError(f"{tuples} digit tuples exceed enumeration cap {cap}")
    scaled = {0}
    for k in positions:
        w = 1 << (ell - k)
        scaled = {v + a * w for v in scaled for a in range(-t, t + 1)}
    return [DyadicRational(v, ell) for v in sorted(scaled)]


def cover_check(n: int, t: int, ell: int, samples: int, seed: int, depth: int | None = None,
                base: BaseSet = DEFAULT_BASE) -> VerificationReport:
    """Sample finite elements of A_{n,t} supported up to ``depth`` > ell and check
    that each lies within t / 2^ell of its head, and the head is a center."""
    if depth is None:
        depth = 2 * ell + 8
    if depth <= ell:
        raise ValueError("depth must exceed ell")
    report = VerificationReport(name="cover")
    centers = set(enumerate_centers(n, t, ell, base))
    radius = Fraction(t, 1 << ell)
    positions = _head_positions(base, n, depth)
    profile = Profile(n, t, base)
    rng = random.Random(seed)
    worst = Fraction(0)
    for i in range(samples):
        digits = tuple((k, rng.randint(-t, t)) for k in positions)
        x = RingElement(profile, digits)
        head = RingElement(profile, tuple(kd for kd in digits if kd[0] <= ell))
        hv = value_exact(head)
        dist = abs((value_exact(x) - hv).as_fraction())
        worst = max(worst, dist)
        report.checked += 1
        if hv not in centers:
            report.fail(sample=i, reason="head is not a center", head=str(hv))
        if dist > radius:
            report.fail(sample=i, reason="outside cover interval", distance=str(dist))
    report.stats = {
        "n": n,
        "t": t,
        "ell": ell,
        "depth": depth,
        "centers": len(centers),
        "center_bound": (2 * t + 1) ** len(_head_positions(base, n, ell)),
        "radius": str(radius),
        "max_distance": str(worst),
    }
    return report


# -- box counting ------------------------------------------------------------


@dataclass(frozen=True)
class BoxCountRow:
    j: int
    delta: Fraction
    count: int
    ratio: float


@dataclass(frozen=True)
class BoxCountSeries:
    n: int
    t: int
    depth: int
    rows: tuple[BoxCountRow, ...]

    def to_csv(self) -> str:
        lines = ["j,delta,N,ratio"]
        for r in self.rows:
            lines.append(f"{r.j},{_frac_str(r.delta)},{r.count},{r.ratio:.6f}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "depth": self.depth,
            "rows": [
                {"j": r.j, "delta": _frac_str(r.delta), "N": r.count, "ratio": round(r.ratio, 12)}
                for r in self.rows
            ],
        }


def box_count(n: int, t: int, j_max: int, depth: int, base: BaseSet = DEFAULT_BASE) -> BoxCountSeries:
    """Occupied cells [m 2^-j, (m+1) 2^-j) among truncation values with support
    in (nS)_{<= depth}; a value on a cell edge belongs to the cell on its right."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    values = enumerate_centers(n, t, depth, base)
    rows = []
    for j in range(1, j_max + 1):
        cells = {_floor_scaled(v, j) for v in values}
        count = len(cells)
        rows.append(BoxCountRow(j, Fraction(1, 1 << j), count, math.log2(count) / j))
    return BoxCountSeries(n, t, depth, tuple(rows))


def _floor_scaled(v: DyadicRational, j: int) -> int:
    # floor(v * 2^j)
    if j >= v.exponent:
        return v.numerator << (j - v.exponent)
    return v.numerator >> (v.exponent - j)
