"""Directed-rounding helpers on top of mpmath's interval context."""

from fractions import Fraction

from mpmath.ctx_iv import MPIntervalContext


def context(prec: int) -> MPIntervalContext:
    # private context: precision changes never leak into mpmath.iv
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def _raw_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    value = Fraction(int(man)) * Fraction(2) ** exp
    return -value if sign else value


def endpoints(x) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an interval value."""
    lo, hi = x._mpi_
    return _raw_to_fraction(lo), _raw_to_fraction(hi)


def log2(ctx: MPIntervalContext, v):
    return ctx.log(ctx.mpf(v)) / ctx.log(2)
