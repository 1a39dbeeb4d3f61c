"""Exact digit-expansion arithmetic over sumsets of S = {0, 1, 2, 4, 8, ...},
with finite checks for the counting bounds and small-cover certificates."""

from .dimension import box_count, certify, cover_bound, cover_check, enumerate_centers
from .errors import (
    CapacityError,
    CapExceededError,
    CertificationError,
    DigitOutOfRangeError,
    InvalidBaseError,
    NullRingError,
    PositionNotInSumsetError,
    RangeError,
)
from .expansion import binary_digits, find_run, membership_verdict, periodic_expansion, split_at
from .ring import (
    DigitStream,
    DyadicRational,
    Profile,
    RingElement,
    add,
    dyadic_embed,
    make_element,
    mul,
    neg,
    sample_stream,
    value_exact,
)
from .sumset import (
    DEFAULT_BASE,
    BaseSet,
    b_bound,
    build_sumset,
    enumerate_base,
    find_gap,
    g,
    rep_count,
    verify_density_bound,
    verify_rep_bound,
)

__all__ = [
    "BaseSet",
    "CapExceededError",
    "CapacityError",
    "CertificationError",
    "DEFAULT_BASE",
    "DigitOutOfRangeError",
    "DigitStream",
    "DyadicRational",
    "InvalidBaseError",
    "NullRingError",
    "PositionNotInSumsetError",
    "Profile",
    "RangeError",
    "RingElement",
    "add",
    "b_bound",
    "binary_digits",
    "box_count",
    "build_sumset",
    "certify",
    "cover_bound",
    "cover_check",
    "dyadic_embed",
    "enumerate_base",
    "enumerate_centers",
    "find_gap",
    "find_run",
    "g",
    "make_element",
    "membership_verdict",
    "mul",
    "neg",
    "periodic_expansion",
    "rep_count",
    "sample_stream",
    "split_at",
    "value_exact",
    "verify_density_bound",
    "verify_rep_bound",
]

__version__ = "0.1.0"
