"""Arbitrary-precision scalars under an explicit precision context.

Every arithmetic operation in the package goes through a
:class:`PrecisionContext`, which owns two independent mpmath contexts: one at
the nominal mantissa width (``bits``) and one widened by ``guard_bits`` for
summations of term sequences. mpmath's mpf/mpc carry an unbounded exponent,
so magnitudes like e^(2^20) are representable without special-casing, and its
elementary operations are accurate to well under 2 units in the last place.

Scalars that enter branch decisions (dyadic-point detection, series
termination) additionally carry exact tags:

* ``exact``      -- a ``Fraction`` equal to the intended real value;
* ``pi_exact``   -- a ``Fraction`` r such that the intended value is r*pi.

Only the rational text form ``p/q`` produces a tag when parsing; plain
decimal text rounds to the context width and stays untagged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from mpmath.ctx_mp import MPContext
from mpmath.libmp import to_str

from .errors import PrecisionTooSmall, ScalarParseError

MIN_BITS = 16

_DECIMAL_RE = re.compile(r"^-?\d+(\.\d+)?(e-?\d+)?$")
_RATIONAL_RE = re.compile(r"^(-?\d+)/(\d+)$")


def _new_mp(prec_bits):
    ctx = MPContext()
    ctx.prec = prec_bits
    return ctx


@dataclass(frozen=True, eq=True)
class PrecisionContext:
    """Immutable precision budget: ``bits`` mantissa digits plus guard digits.

    ``mp`` is the working mpmath context (``bits``); ``mp_guard`` is the
    widened context (``bits + guard_bits``) used by term summations.
    """

    bits: int
    guard_bits: int = 0
    mp: MPContext = field(init=False, repr=False, compare=False)
    mp_guard: MPContext = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.bits < MIN_BITS:
            raise PrecisionTooSmall(
                f"precision too small: {self.bits} bits (minimum {MIN_BITS})"
            )
        if self.guard_bits < 0:
            raise PrecisionTooSmall("guard_bits must be non-negative")
        object.__setattr__(self, "mp", _new_mp(self.bits))
        object.__setattr__(self, "mp_guard", _new_mp(self.bits + self.guard_bits))

    @property
    def decimal_digits(self):
        """Decimal digits guaranteeing binary->decimal->binary round trips."""
        return int(self.bits * 0.3010299957) + 3

    def convert(self, x):
        """Convert ints, Fractions, floats, or text to a working-width mpf."""
        return self.mp.convert(x)

    def eps(self):
        """One unit in the last place at unit scale: 2^(1-bits)."""
        return self.mp.ldexp(self.mp.one, 1 - self.bits)

    def __hash__(self):
        return hash((self.bits, self.guard_bits))


def make_context(bits, guard_bits=0):
    """Create an immutable :class:`PrecisionContext`; rejects bits < 16."""
    return PrecisionContext(int(bits), int(guard_bits))


@dataclass(frozen=True)
class Scalar:
    """A real point: rounded value plus optional exact tags.

    ``value`` is an mpf of the owning context. When ``exact`` is set the
    intended value is that Fraction; when ``pi_exact`` is set the intended
    value is ``pi_exact * pi``. At most one tag is set.
    """

    value: object
    exact: Optional[Fraction] = None
    pi_exact: Optional[Fraction] = None

    @property
    def is_exact_zero(self):
        if self.exact is not None:
            return self.exact == 0
        if self.pi_exact is not None:
            return self.pi_exact == 0
        return self.value == 0


def scalar_from_fraction(q, ctx):
    """Exactly-tagged scalar for the rational q (correctly rounded value)."""
    q = Fraction(q)
    return Scalar(value=ctx.convert(q), exact=q)


def scalar_from_pi_fraction(r, ctx):
    """Scalar for r*pi with the pi-rational tag kept for branch decisions."""
    r = Fraction(r)
    return Scalar(value=ctx.mp.pi * ctx.convert(r), pi_exact=r)


def scalar_from_value(v, ctx):
    """Untagged scalar from a numeric value (rounded to the context)."""
    return Scalar(value=ctx.convert(v))


def parse_scalar(text, ctx):
    """Parse decimal or rational scalar text.

    Grammar: decimal ``[-]digits[.digits][e[-]digits]`` or rational
    ``[-]digits/digits``. Rational input keeps an exact tag; decimal input
    rounds to ``ctx.bits`` and stays untagged.
    """
    text = text.strip()
    m = _RATIONAL_RE.match(text)
    if m:
        num, den = int(m.group(1)), int(m.group(2))
        if den == 0:
            raise ScalarParseError(f"zero denominator in {text!r}")
        return scalar_from_fraction(Fraction(num, den), ctx)
    if _DECIMAL_RE.match(text):
        return Scalar(value=ctx.mp.mpf(text))
    raise ScalarParseError(f"malformed scalar {text!r}")


def format_real(x, ctx):
    """Deterministic full-precision decimal string (round-trips bit-for-bit)."""
    x = ctx.convert(x)
    if ctx.mp.isnan(x):
        return "nan"
    if ctx.mp.isinf(x):
        return "inf" if x > 0 else "-inf"
    # keep the output inside this module's own scalar grammar (no 'e+')
    return to_str(x._mpf_, ctx.decimal_digits).replace("e+", "e")


def format_complex(z, ctx):
    """``re+imj`` style pair of full-precision decimal strings."""
    if hasattr(z, "imag") and z.imag != 0:
        return format_real(z.real, ctx), format_real(z.imag, ctx)
    re_part = z.real if hasattr(z, "real") else z
    return format_real(re_part, ctx), "0.0"


def scalar_add(t, delta, ctx):
    """t + delta for a Scalar and an exact Fraction step, preserving tags."""
    delta = Fraction(delta)
    if t.exact is not None:
        return scalar_from_fraction(t.exact + delta, ctx)
    if t.pi_exact is not None and delta == 0:
        return t
    return Scalar(value=ctx.convert(t.value + ctx.convert(delta)))


def scalar_mul(t, factor, ctx):
    """t * factor for a Scalar and an exact Fraction factor, preserving tags."""
    factor = Fraction(factor)
    if t.exact is not None:
        return scalar_from_fraction(t.exact * factor, ctx)
    if t.pi_exact is not None:
        return scalar_from_pi_fraction(t.pi_exact * factor, ctx)
    return Scalar(value=ctx.convert(t.value * ctx.convert(factor)))


@dataclass(frozen=True)
class SumResult:
    """Running sums of a term sequence at guarded precision.

    ``partials[n]`` is the left-to-right sum of ``terms[..n]`` computed at
    ``bits + guard_bits``; re-summing reproduces it bit-for-bit.
    ``cancellation_bits`` is log2(max |partial| / |final|), 0 when the final
    sum (or every partial) is zero. ``precision_ok`` is False when fewer than
    32 trustworthy bits remain at the working width, i.e. when cancellation
    consumed more than ``bits + guard_bits - 32`` (the final sum is then
    indistinguishable from accumulated rounding noise).
    """

    partials: tuple
    total: object
    cancellation_bits: object
    max_partial: object
    precision_ok: bool


def running_sums(terms, ctx):
    """Sum ``terms`` left to right at guarded precision with a cancellation metric."""
    g = ctx.mp_guard
    partials = []
    acc = g.mpf(0)
    max_mag = g.mpf(0)
    for term in terms:
        acc = acc + g.convert(term)
        mag = abs(acc)
        if mag > max_mag:
            max_mag = mag
        partials.append(acc)
    final_mag = abs(acc) if partials else g.mpf(0)
    if final_mag == 0 or max_mag == 0:
        cancellation = ctx.mp.mpf(0)
    else:
        cancellation = ctx.mp.convert(g.log(max_mag / final_mag, 2))
        if cancellation < 0:
            cancellation = ctx.mp.mpf(0)
    ok = bool(cancellation <= ctx.bits + ctx.guard_bits - 32)
    total = ctx.mp.convert(acc)
    return SumResult(
        partials=tuple(partials),
        total=total,
        cancellation_bits=cancellation,
        max_partial=ctx.mp.convert(max_mag),
        precision_ok=ok,
    )
