"""Exponent sets S, their sumsets nS, and the combinatorial lemmas about them.

The default base is S = {0, 1, 2, 4, 8, ...}.  A custom base T ∪ {0} is
allowed as long as each dyadic block [2^j, 2^(j+1)) holds fewer than
``log_density_bound`` elements of T; the whole construction goes through
for such sets.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _interval
from .caps import current_caps
from .errors import CapacityError, CapExceededError, InvalidBaseError, RangeError

POWERS_OF_TWO = "powers-of-two"
CUSTOM = "custom"


@dataclass(frozen=True)
class BaseSet:
    """An exponent set: 0 together with either the powers of ``radix`` or an
    explicit finite list of positive integers."""

    kind: str = POWERS_OF_TWO
    radix: int = 2
    elements: tuple[int, ...] | None = None
    log_density_bound: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "log_density_bound", Fraction(self.log_density_bound))
        if self.log_density_bound <= 0:
            raise InvalidBaseError("log_density_bound must be positive")
        if self.elements is not None:
            els = tuple(self.elements)
            object.__setattr__(self, "elements", els)
            if not els or els[0] != 0:
                raise InvalidBaseError("base set must start with 0")
            for a, b in zip(els, els[1:]):
                if not (isinstance(b, int) and b > a):
                    raise InvalidBaseError(f"base set not strictly increasing at {a}, {b}")
            if self.kind != CUSTOM:
                raise InvalidBaseError("explicit element lists must use kind='custom'")
        else:
            if not isinstance(self.radix, int) or self.radix < 2:
                raise InvalidBaseError(f"radix must be an integer >= 2, got {self.radix!r}")
            expected = POWERS_OF_TWO if self.radix == 2 else CUSTOM
            if self.kind != expected:
                raise InvalidBaseError(f"radix {self.radix} base must have kind={expected!r}")

    @classmethod
    def powers(cls, radix: int, log_density_bound=2) -> "BaseSet":
        kind = POWERS_OF_TWO if radix == 2 else CUSTOM
        return cls(kind=kind, radix=radix, log_density_bound=log_density_bound)

    @classmethod
    def custom(cls, elements, log_density_bound) -> "BaseSet":
        """Finite custom base; ``0`` is prepended if missing."""
        els = sorted(set(elements))
        if els and els[0] < 0:
            raise InvalidBaseError("base elements must be non-negative")
        if not els or els[0] != 0:
            els = [0] + els
        return cls(kind=CUSTOM, elements=tuple(els), log_density_bound=log_density_bound)

    @property
    def is_default(self) -> bool:
        return self.elements is None and self.radix == 2

    @property
    def is_finite(self) -> bool:
        return self.elements is not None

    def describe(self) -> str:
        if self.elements is not None:
            return "{" + ",".join(map(str, self.elements)) + "}"
        return f"{{0}}u{{{self.radix}^j}}"


DEFAULT_BASE = BaseSet()


def enumerate_base(base: BaseSet, limit: int) -> list[int]:
    """All elements of ``base`` that are <= ``limit``, ascending."""
    if limit < 0:
        raise ValueError("limit must be non-negative")
    if base.elements is not None:
        return [e for e in base.elements if e <= limit]
    out = [0]
    p = 1
    while p <= limit:
        out.append(p)
        p *= base.radix
    return out


def check_log_density(base: BaseSet, limit: int) -> dict[int, int]:
    """Check the block condition on ``base`` up to ``limit``.

    Returns block occupancy {j: #(T ∩ [2^j, 2^(j+1)))}; raises
    InvalidBaseError when some block reaches the declared bound.
    """
    blocks: dict[int, int] = {}
    for e in enumerate_base(base, limit)[1:]:
        j = e.bit_length() - 1
        blocks[j] = blocks.get(j, 0) + 1
    for j, count in blocks.items():
        if count >= base.log_density_bound:
            raise InvalidBaseError(
                f"{count} base elements in [2^{j}, 2^{j + 1}), "
                f"declared bound is {base.log_density_bound}"
            )
    return blocks


@dataclass(frozen=True, eq=False)
class SumsetTable:
    """nS ∩ [0, limit], sorted."""

    base: BaseSet
    n: int
    limit: int
    elements: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.elements)

    def count_le(self, ell: int) -> int:
        if not 0 <= ell <= self.limit:
            raise RangeError(f"{ell} outside tabulated range [0, {self.limit}]")
        return int(np.searchsorted(self.elements, ell, side="right"))

    def __contains__(self, k) -> bool:
        if not 0 <= k <= self.limit:
            raise RangeError(f"{k} outside tabulated range [0, {self.limit}]")
        i = int(np.searchsorted(self.elements, k))
        return i < len(self.elements) and int(self.elements[i]) == k

    @property
    def counts(self) -> np.ndarray:
        """Dense array with counts[ell] = g_n(ell) for 0 <= ell <= limit."""
        return np.searchsorted(self.elements, np.arange(self.limit + 1), side="right")

    def upto(self, ell: int) -> list[int]:
        return self.elements[: self.count_le(ell)].tolist()


def _check_limit(limit: int):
    cap = current_caps().sumset_limit
    if limit > cap:
        raise CapacityError(f"sumset limit {limit} exceeds cap {cap}")


def build_sumset(base: BaseSet, n: int, limit: int) -> SumsetTable:
    if n < 1:
        raise ValueError("sumset order n must be >= 1")
    if limit < 0:
        raise ValueError("limit must be non-negative")
    _check_limit(limit)
    return _build_sumset(base, n, limit)


@functools.lru_cache(maxsize=64)
def _build_sumset(base: BaseSet, n: int, limit: int) -> SumsetTable:
    if not base.is_default:
        check_log_density(base, limit)
    gens = np.array(enumerate_base(base, limit), dtype=np.int64)
    current = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        # 0 is a generator, so each round keeps the previous elements.
        shifted = (current[:, None] + gens[None, :]).ravel()
        current = np.unique(shifted[shifted <= limit])
    current.setflags(write=False)
    return SumsetTable(base=base, n=n, limit=limit, elements=current)


def in_sumset(base: BaseSet, n: int, k: int) -> bool:
    """Membership k ∈ nS without a caller-supplied table."""
    if k < 0:
        return False
    if base.is_default:
        # Sums of n powers of two are exactly the integers with at most n one-bits.
        return bin(k).count("1") <= n
    limit = max(64, 1 << (k.bit_length()))
    return k in build_sumset(base, n, limit)


def first_elements(base: BaseSet, n: int, count: int) -> list[int]:
    """The ``count`` smallest elements of nS (fewer only if nS is finite)."""
    if count <= 0:
        return []
    limit = 64
    cap = current_caps().sumset_limit
    while True:
        limit = min(limit, cap)
        table = build_sumset(base, n, limit)
        if len(table) >= count:
            return table.elements[:count].tolist()
        if base.is_finite and limit >= n * base.elements[-1]:
            return table.elements.tolist()
        if limit >= cap:
            raise CapacityError(f"fewer than {count} elements of {n}S below cap {cap}")
        limit *= 2


def g(table: SumsetTable, ell: int) -> int:
    """Counting function g_n(ell) = #(nS)_{<= ell}."""
    if ell < 1:
        raise RangeError(f"g is defined for ell >= 1, got {ell}")
    return table.count_le(ell)


@dataclass
class VerificationReport:
    name: str
    passed: bool = True
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    max_failures = 20

    def fail(self, **info):
        self.passed = False
        if len(self.failures) < self.max_failures:
            self.failures.append(info)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "stats": self.stats,
        }


def _floor_log2_table(ell_max: int) -> np.ndarray:
    out = np.zeros(ell_max + 1, dtype=np.int64)
    j = 0
    while (1 << j) <= ell_max:
        out[1 << j : min(1 << (j + 1), ell_max + 1)] = j
        j += 1
    return out


def verify_density_bound(base: BaseSet, n_max: int, ell_max: int) -> VerificationReport:
    """Check g_n(ell) <= g_1(ell)^n for n <= n_max, 1 <= ell <= ell_max.

    For the default base the exact identity g_1(ell) = 2 + floor(log2 ell) is
    checked as well; together they give g_n(ell) <= (2 + log2 ell)^n.  For a
    custom base, g_1 is checked against the block bound instead.
    """
    if n_max < 1 or ell_max < 1:
        raise ValueError("n_max and ell_max must be >= 1")
    report = VerificationReport(name="density")
    ells = np.arange(1, ell_max + 1)
    g1 = build_sumset(base, 1, ell_max).counts[1:].astype(object if n_max > 12 else np.int64)
    floor_log = _floor_log2_table(ell_max)[1:]
    if base.is_default:
        bad = np.nonzero(g1 != 2 + floor_log)[0]
        report.checked += ell_max
        if len(bad):
            i = int(bad[0])
            report.fail(n=1, ell=int(ells[i]), g1=int(g1[i]), expected=int(2 + floor_log[i]))
    else:
        per_block = math.ceil(base.log_density_bound) - 1
        cap = 1 + per_block * (floor_log + 1)
        bad = np.nonzero(g1 > cap)[0]
        report.checked += ell_max
        if len(bad):
            i = int(bad[0])
            report.fail(n=1, ell=int(ells[i]), g1=int(g1[i]), block_cap=int(cap[i]))
    report.stats["g1_at_max"] = int(g1[-1])
    power = np.ones_like(g1)
    for n in range(1, n_max + 1):
        power = power * g1
        gn = build_sumset(base, n, ell_max).counts[1:]
        bad = np.nonzero(gn > power)[0]
        report.checked += ell_max
        if len(bad):
            i = int(bad[0])
            report.fail(n=n, ell=int(ells[i]), gn=int(gn[i]), g1_pow=int(power[i]))
        report.stats[f"g{n}_at_max"] = int(gn[-1])
    return report


def rep_counts(base: BaseSet, n: int, k_max: int) -> np.ndarray:
    """Array c with c[k] = number of ordered n-tuples from base summing to k."""
    if n < 1 or k_max < 0:
        raise ValueError("need n >= 1 and k_max >= 0")
    _check_limit(k_max)
    gens = enumerate_base(base, k_max)
    c = np.zeros(k_max + 1, dtype=np.int64)
    c[0] = 1
    for _ in range(n):
        nxt = np.zeros_like(c)
        for s in gens:
            nxt[s:] += c[: k_max + 1 - s]
        c = nxt
    return c


def rep_count(base: BaseSet, n: int, k: int) -> int:
    """c_n(k): ordered representations k = s_1 + ... + s_n with s_i in base."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return int(rep_counts(base, n, k)[k])


@dataclass(frozen=True, eq=False)
class RepCountTable:
    n: int
    limit: int
    counts: np.ndarray = field(repr=False)
    bound: int = 0


def rep_count_table(base: BaseSet, n: int, limit: int) -> RepCountTable:
    return RepCountTable(n=n, limit=limit, counts=rep_counts(base, n, limit), bound=b_bound(n))


_EXACT_POW_BITS = 1 << 22


def _ceil_mul_log2(m: int, n: int) -> int:
    """ceil(m * log2(n)) for integers m >= 0, n >= 1, exactly."""
    if n & (n - 1) == 0:
        return m * (n.bit_length() - 1)
    if m * n.bit_length() <= _EXACT_POW_BITS:
        # smallest e with 2^e >= n^m
        return (n**m - 1).bit_length()
    prec = 64 + 2 * m.bit_length()
    while True:
        ctx = _interval.context(prec)
        lo, hi = _interval.endpoints(m * _interval.log2(ctx, n))
        # m*log2(n) is irrational here, so a tight enough bracket settles the ceiling.
        if math.ceil(lo) == math.ceil(hi):
            return math.ceil(lo)
        prec *= 2


@functools.lru_cache(maxsize=None)
def b_bound(n: int) -> int:
    """Uniform bound on c_n: b_1 = 1, b_n = ceil(n * b_{n-1} * (1 + log2 n))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return 1
    m = n * b_bound(n - 1)
    return m + _ceil_mul_log2(m, n)


def verify_rep_bound(base: BaseSet, n: int, k_max: int) -> VerificationReport:
    report = VerificationReport(name="reps")
    bound = b_bound(n)
    c = rep_counts(base, n, k_max)[1:]
    report.checked = len(c)
    bad = np.nonzero(c > bound)[0]
    for i in bad[: report.max_failures]:
        report.fail(n=n, k=int(i) + 1, count=int(c[i]), bound=bound)
    if len(bad):
        report.passed = False
    report.stats = {
        "n": n,
        "k_max": k_max,
        "bound": bound,
        "empirical_max": int(c.max()) if len(c) else 0,
        "argmax": int(c.argmax()) + 1 if len(c) else None,
    }
    return report


@dataclass(frozen=True)
class GapWitness:
    n: int
    threshold: int
    k: int
    k_next: int

    @property
    def gap(self) -> int:
        return self.k_next - self.k


def find_gap(base: BaseSet, n: int, b: int) -> GapWitness:
    """Smallest consecutive pair k < k' in nS with k' - k > b."""
    if n < 1 or b < 1:
        raise ValueError("need n >= 1 and b >= 1")
    cap = current_caps().sumset_limit
    limit = max(64, 4 * b)
    while True:
        limit = min(limit, cap)
        els = build_sumset(base, n, limit).elements
        diffs = np.diff(els)
        hits = np.nonzero(diffs > b)[0]
        if len(hits):
            i = int(hits[0])
            return GapWitness(n=n, threshold=b, k=int(els[i]), k_next=int(els[i + 1]))
        if limit >= cap:
            raise CapExceededError(
                f"no gap > {b} in {n}S below {cap}; raise the sumset_limit cap "
                "(such gaps always exist for bases with the block-density property)"
            )
        limit *= 2


def verify_gap(base: BaseSet, w: GapWitness) -> bool:
    """Recheck a witness by direct membership queries."""
    if w.k_next - w.k <= w.threshold:
        return False
    if not (in_sumset(base, w.n, w.k) and in_sumset(base, w.n, w.k_next)):
        return False
    return not any(in_sumset(base, w.n, j) for j in range(w.k + 1, w.k_next))

