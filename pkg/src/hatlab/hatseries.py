"""Terms and partial sums of the alternating derivative series at a point.

For a function f with jet coefficients c_n = f^(n)(t)/n! the series under
study has terms a_n(t) = (-1)^n t^n c_n. One order-N jet per point serves the
term table, the telescoping tail, and every diagnostic built on top; the jet
build dominates cost and is never repeated per check.

The same numbers read two ways: a_n is also the n-th term of the Taylor
expansion of f around t evaluated at x = 0, so the translation-operator
identity is a bit-identity here (see :func:`taylor_terms_at_zero`).

Summation runs at guarded precision and every run carries a cancellation
metric; a run that burned more than ``bits - 32`` bits in cancellation is
flagged rather than silently reported. Verdicts about convergence do not
live here; this module only reports sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import catalog, jets
from .errors import UnsupportedCheck, UsageError
from .precision import Scalar, running_sums, scalar_add, scalar_mul

INSUFFICIENT_PRECISION_MARGIN = 32


@dataclass(frozen=True)
class HatRun:
    """Terms, running sums, and cancellation accounting at one point.

    ``partials`` are left-to-right guarded-precision sums (re-summation
    reproduces them bit-for-bit); ``total`` is the final sum rounded to the
    context width. ``precision_ok`` is False when cancellation consumed more
    than ``bits - 32`` bits, in which case ``warning`` says so.
    """

    spec_label: str
    t: Scalar
    order: int
    terms: tuple
    partials: tuple
    total: object
    cancellation_bits: object
    precision_ok: bool
    truncation: Optional[catalog.SeriesTruncation]
    ctx: object

    @property
    def warning(self):
        if self.precision_ok:
            return None
        return (
            f"insufficient precision: cancellation_bits="
            f"{self.ctx.mp.nstr(self.cancellation_bits, 6)} exceeds "
            f"bits+guard-{INSUFFICIENT_PRECISION_MARGIN}"
        )


def hat_terms(jet, t, ctx):
    """Terms a_n = (-1)^n t^n c_n at guarded precision."""
    g = ctx.mp_guard
    t_g = g.convert(t.value if isinstance(t, Scalar) else t)
    terms = []
    power = g.mpf(1)
    for n, c in enumerate(jet.coeffs):
        if n > 0:
            power = power * t_g
        prod = power * g.convert(c)
        terms.append(prod if n % 2 == 0 else -prod)
    return tuple(terms)


def taylor_terms_at_zero(jet, t, ctx):
    """Terms c_n (0 - t)^n of the Taylor expansion around t, evaluated at 0.

    Same jet, same arithmetic, different reading; agrees with
    :func:`hat_terms` bit-for-bit because float negation is exact.
    """
    g = ctx.mp_guard
    step = -g.convert(t.value if isinstance(t, Scalar) else t)
    terms = []
    power = g.mpf(1)
    for n, c in enumerate(jet.coeffs):
        if n > 0:
            power = power * step
        terms.append(power * g.convert(c))
    return tuple(terms)


def _run_from_jet(jet, t, ctx, spec_label, truncation):
    terms = hat_terms(jet, t, ctx)
    summed = running_sums(terms, ctx)
    return HatRun(
        spec_label=spec_label,
        t=t,
        order=jet.order,
        terms=terms,
        partials=summed.partials,
        total=summed.total,
        cancellation_bits=summed.cancellation_bits,
        precision_ok=summed.precision_ok,
        truncation=truncation,
        ctx=ctx,
    )


def hat_run(spec, t, order, ctx, jet=None):
    """Evaluate terms and partial sums of the series for ``spec`` at ``t``.

    A prebuilt jet (of order >= ``order``) may be supplied so one jet serves
    several consumers; otherwise one order-N jet is built here.
    """
    truncation = None
    if jet is None:
        jet, truncation = catalog.jet_with_certificate(spec, t, order, ctx)
    elif jet.order > order:
        jet = jet.truncated(order)
    return _run_from_jet(jet, t, ctx, catalog.format_spec(spec), truncation)


@dataclass(frozen=True)
class TailTerm:
    """S_N = (-1)^N t^N f^(N+1)(t) / N!, the derivative of the N-th partial sum."""

    order: int
    value: object


def tail_term(spec, t, order, ctx, jet=None):
    """Telescoped derivative of the order-N partial sum (needs an N+1 jet)."""
    if jet is None:
        jet = catalog.jet_of(spec, t, order + 1, ctx)
    if jet.order < order + 1:
        raise UsageError(f"tail term at order {order} needs a jet of order {order + 1}")
    g = ctx.mp_guard
    t_g = g.convert(t.value if isinstance(t, Scalar) else t)
    value = (t_g**order) * g.convert(jet.coeffs[order + 1]) * (order + 1)
    if order % 2 == 1:
        value = -value
    return TailTerm(order=order, value=ctx.mp.convert(value))


@dataclass(frozen=True)
class FknValue:
    """f_{k,n}(t) = (-1)^n t^n f^(n+k)(t) / n!."""

    k: int
    n: int
    value: object


def fkn_value(spec, t, k, n, ctx, jet=None):
    """One member of the shifted-derivative family (vanishes at t=0 for n>=1)."""
    if jet is None:
        jet = catalog.jet_of(spec, t, n + k, ctx)
    if jet.order < n + k:
        raise UsageError("fkn needs a jet of order n+k")
    g = ctx.mp_guard
    t_g = g.convert(t.value if isinstance(t, Scalar) else t)
    # f^(n+k)(t)/n! = c_{n+k} (n+k)!/n!
    value = (t_g**n) * g.convert(jet.coeffs[n + k]) * (g.factorial(n + k) / g.factorial(n))
    if n % 2 == 1:
        value = -value
    return FknValue(k=k, n=n, value=ctx.mp.convert(value))


def fkn_recurrence_check(spec, t, k, n, h, ctx):
    """|central difference of f_{k-1,n} - (f_{k,n} - f_{k,n-1})| at step h.

    The caller asserts the residual is O(h^2); ``h`` must be an exact
    Fraction so tagged points stay exact under the shift.
    """
    if n < 1:
        raise UsageError("fkn recurrence needs n >= 1")
    h = Fraction(h)
    if h <= 0:
        raise UsageError("step h must be positive")
    t_plus = scalar_add(t, h, ctx)
    t_minus = scalar_add(t, -h, ctx)
    g = ctx.mp_guard
    lo = fkn_value(spec, t_minus, k - 1, n, ctx).value
    hi = fkn_value(spec, t_plus, k - 1, n, ctx).value
    diff = (g.convert(hi) - g.convert(lo)) / (2 * g.convert(h))
    rhs = g.convert(fkn_value(spec, t, k, n, ctx).value) - g.convert(
        fkn_value(spec, t, k, n - 1, ctx).value
    )
    return ctx.mp.convert(abs(diff - rhs))


def partial_sum_derivative_residual(spec, t, order, h, ctx):
    """|central difference of H_N(.) at t - S_N(t)| for exact step h.

    H_N'(t) telescopes to S_N exactly, so the residual is the O(h^2) central
    difference error; callers check that residual/h^2 stabilizes as h halves.
    The difference is taken on guarded-precision partial sums.
    """
    h = Fraction(h)
    if h <= 0:
        raise UsageError("step h must be positive")
    g = ctx.mp_guard
    hi = hat_run(spec, scalar_add(t, h, ctx), order, ctx).partials[-1]
    lo = hat_run(spec, scalar_add(t, -h, ctx), order, ctx).partials[-1]
    fd = (hi - lo) / (2 * g.convert(h))
    s_n = tail_term(spec, t, order, ctx).value
    return ctx.mp.convert(abs(fd - g.convert(s_n)))


@dataclass(frozen=True)
class IdentityResidual:
    check: str
    max_residual: object
    ulp_scale: object


@dataclass(frozen=True)
class AlgebraReport:
    """Per-term residual maxima for the linearity/product/scale identities."""

    t: Scalar
    order: int
    rows: tuple  # IdentityResidual


def _max_abs(seq):
    best = None
    for v in seq:
        m = abs(v)
        if best is None or m > best:
            best = m
    return best


def algebra_checks(f, gspec, a, t, order, ctx, b=1):
    """Compare both computation routes for the three series identities.

    (i) terms of a*f + b*g against the same combination of term tables;
    (ii) terms of f*g against the Cauchy convolution of the term tables
    (valid because t^i t^j = t^n); (iii) terms of f(a*.) at t against terms
    of f at a*t via the argument-rescaling rule.
    """
    mp = ctx.mp
    jf = catalog.jet_of(f, t, order, ctx)
    jg = catalog.jet_of(gspec, t, order, ctx)
    terms_f = hat_terms(jf, t, ctx)
    terms_g = hat_terms(jg, t, ctx)
    a_mp = mp.convert(a) if not hasattr(a, "_mpc_") else a
    b_mp = mp.convert(b) if not hasattr(b, "_mpc_") else b

    combined = jets.linear(a_mp, jf, b_mp, jg)
    lhs_lin = hat_terms(combined, t, ctx)
    rhs_lin = tuple(a_mp * x + b_mp * y for x, y in zip(terms_f, terms_g))
    res_lin = _max_abs(l - r for l, r in zip(lhs_lin, rhs_lin))
    scale_lin = max(_max_abs(rhs_lin), mp.mpf(0))

    product = jets.mul(jf, jg)
    lhs_prod = hat_terms(product, t, ctx)
    rhs_prod = []
    conv_scale = mp.mpf(0)
    for n in range(order + 1):
        acc = terms_f[0] * terms_g[n]
        mag_acc = abs(acc)
        for i in range(1, n + 1):
            piece = terms_f[i] * terms_g[n - i]
            acc = acc + piece
            mag_acc = mag_acc + abs(piece)
        rhs_prod.append(acc)
        if mag_acc > conv_scale:
            conv_scale = ctx.mp.convert(mag_acc)
    res_prod = _max_abs(l - r for l, r in zip(lhs_prod, rhs_prod))

    a_frac = Fraction(a) if isinstance(a, (int, Fraction)) else None
    if a_frac is not None:
        at = scalar_mul(t, a_frac, ctx)
    else:
        at = Scalar(value=mp.convert(a) * mp.convert(t.value))
    j_at = catalog.jet_of(f, at, order, ctx)
    rescaled = jets.rescale_argument(j_at, a_mp, t.value)
    lhs_scale = hat_terms(rescaled, t, ctx)
    rhs_scale = hat_terms(j_at, at, ctx)
    res_scale = _max_abs(l - r for l, r in zip(lhs_scale, rhs_scale))
    scale_scale = max(_max_abs(rhs_scale), mp.mpf(0))

    eps = mp.ldexp(1, -ctx.bits)
    rows = (
        IdentityResidual("linearity", mp.convert(res_lin), mp.convert(scale_lin * eps)),
        IdentityResidual("product", mp.convert(res_prod), mp.convert(conv_scale * eps)),
        IdentityResidual("scale", mp.convert(res_scale), mp.convert(scale_scale * eps)),
    )
    return AlgebraReport(t=t, order=order, rows=rows)


_ANTIDERIVATIVE_VALUE = {
    "exp": lambda mp, x: mp.expm1(x),
    "cos": lambda mp, x: mp.sin(x),
}


def antiderivative_check(spec, x, order, ctx):
    """Hat run of F(x) = integral of f from 0 to x, for supported pairs.

    F's jet is assembled from f's jet by the one-slot shift with division by
    n; F(x) itself comes from the closed form (sin, e^x - 1, or the exact
    polynomial integral).
    """
    mp = ctx.mp
    if order < 1:
        raise UsageError("antiderivative check needs order >= 1")
    if isinstance(spec, catalog.Analytic) and spec.name in _ANTIDERIVATIVE_VALUE:
        f_jet = catalog.jet_of(spec, x, order - 1, ctx)
        head = _ANTIDERIVATIVE_VALUE[spec.name](mp, mp.convert(x.value))
    elif isinstance(spec, catalog.Poly):
        f_jet = catalog.jet_of(spec, x, order - 1, ctx)
        integral = catalog.Poly((Fraction(0),) + tuple(
            c / (k + 1) for k, c in enumerate(spec.coeffs)
        ))
        head = catalog.jet_of(integral, x, 0, ctx).coeffs[0]
    else:
        raise UnsupportedCheck(
            f"unsupported for antiderivative check: {catalog.format_spec(spec)}"
        )
    coeffs = [head]
    for n in range(1, order + 1):
        coeffs.append(f_jet.coeffs[n - 1] / n)
    f_big = jets.Jet(f_jet.center, tuple(coeffs), ctx)
    label = f"antiderivative({catalog.format_spec(spec)})"
    return _run_from_jet(f_big, x, ctx, label, None)
