"""Named function specifications and their jet generators.

The catalog covers five families:

* ``Analytic``       -- exp, sin, cos, and polynomials;
* ``RationalOnePlus``-- f(t) = 1/(1+t), pole at t = -1;
* ``FlatExp``        -- f(t) = e^{-1/t^s} with f(0) = 0, s in {1, 2};
* ``BumpSeries``     -- f(x) = sum_n a_n u(2^n x) for a periodic bump u that
  is flat at the period lattice: u = beta(frac(x/l)) ("floor" kind, with
  beta(y) = alpha(y) alpha(1-y), alpha(y) = e^{-1/y^s}) or u = e^{-csc^2 x}
  ("sin" kind, zeros at integer multiples of pi);
* ``Lacunary``       -- f(t) = sum_m e^{i w_m t}/m! with w_m = 2^m (m >= 0)
  or w_m = 2^{-m} (m >= 1).

Series families return a :class:`SeriesTruncation` certificate recording the
outer-term count and a majorant on everything discarded. Branch decisions
that live on measure-zero sets (is 2^n t on the period lattice?) are made in
exact rational arithmetic, never by floating-point comparison; points must
carry exact tags for those families.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Optional, Union

from . import jets
from .errors import (
    ExactnessRequired,
    OrderCapError,
    PoleError,
    SpecParseError,
    TruncationBudgetError,
    UsageError,
)
from .jets import Jet
from .precision import Scalar, make_context

# Sampled sup bounds on bump derivatives: sample count per period and the
# safety factor recorded in every certificate that uses them.
SUP_SAMPLES = 4096
SUP_SAFETY = 4

DEFAULT_ORDER_CAP = 128
LACUNARY_ORDER_CAP = 24
DEFAULT_OUTER_LIMIT = 20000
GENERIC_PHASE_LIMIT = 65536


# ---------------------------------------------------------------------------
# Specs


@dataclass(frozen=True)
class Analytic:
    name: str  # "exp" | "sin" | "cos"

    def __post_init__(self):
        if self.name not in ("exp", "sin", "cos"):
            raise SpecParseError(f"unknown analytic function {self.name!r}")


@dataclass(frozen=True)
class Poly:
    coeffs: tuple  # exact Fractions, constant term first; non-empty

    def __post_init__(self):
        if not self.coeffs:
            raise SpecParseError("poly needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))


@dataclass(frozen=True)
class RationalOnePlus:
    """f(t) = 1/(1+t)."""


@dataclass(frozen=True)
class FlatExp:
    s: int  # 1 or 2

    def __post_init__(self):
        if self.s not in (1, 2):
            raise SpecParseError("flatexp exponent s must be 1 or 2")


@dataclass(frozen=True)
class BumpSeries:
    amplitude: str  # "invfact" (a_n = 1/n!) | "doubleexp" (a_n = 2^{-2^n})
    s: int
    period: Fraction  # l > 0; for kind "sin" measured in units of pi
    kind: str  # "floor" | "sin"

    def __post_init__(self):
        object.__setattr__(self, "period", Fraction(self.period))
        if self.amplitude not in ("invfact", "doubleexp"):
            raise SpecParseError("amplitude rule must be invfact or doubleexp")
        if self.s not in (1, 2):
            raise SpecParseError("bump exponent s must be 1 or 2")
        if self.kind not in ("floor", "sin"):
            raise SpecParseError("u kind must be floor or sin")
        if self.period <= 0:
            raise SpecParseError("period must be positive")
        if self.kind == "sin" and self.s != 2:
            raise UsageError(
                "sin bump supports s=2 only (e^{-1/sin x} is unbounded)"
            )


@dataclass(frozen=True)
class Lacunary:
    base: str  # "2" (w_m = 2^m) | "half" (w_m = 2^{-m})

    def __post_init__(self):
        if self.base not in ("2", "half"):
            raise SpecParseError("lacunary base must be 2 or half")


FunctionSpec = Union[Analytic, Poly, RationalOnePlus, FlatExp, BumpSeries, Lacunary]


def _fraction_from_text(text):
    text = text.strip()
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError) as exc:
            raise SpecParseError(f"bad rational {text!r}") from exc
    try:
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError) as exc:
        raise SpecParseError(f"bad number {text!r}") from exc


def _parse_kv(body, what):
    out = {}
    for item in body.split(","):
        key, sep, value = item.partition("=")
        if not sep:
            raise SpecParseError(f"expected key=value in {what}: {item!r}")
        out[key.strip()] = value.strip()
    return out


def parse_spec(text):
    """Parse the function-spec grammar used by the CLI.

    ``exp | sin | cos | poly:c0,c1,... | rational1p | flatexp:s=<1|2> |
    bumpseries:a=<invfact|doubleexp>,s=<1|2>,l=<rational>,u=<floor|sin> |
    lacunary:base=<2|half>``
    """
    text = text.strip()
    head, sep, body = text.partition(":")
    head = head.strip()
    if head in ("exp", "sin", "cos"):
        if sep:
            raise SpecParseError(f"{head} takes no parameters")
        return Analytic(head)
    if head == "rational1p":
        if sep:
            raise SpecParseError("rational1p takes no parameters")
        return RationalOnePlus()
    if head == "poly":
        if not body:
            raise SpecParseError("poly needs coefficients: poly:c0,c1,...")
        return Poly(tuple(_fraction_from_text(c) for c in body.split(",")))
    if head == "flatexp":
        kv = _parse_kv(body, "flatexp")
        if set(kv) != {"s"}:
            raise SpecParseError("flatexp takes exactly s=<1|2>")
        return FlatExp(int(kv["s"]))
    if head == "bumpseries":
        kv = _parse_kv(body, "bumpseries")
        if set(kv) != {"a", "s", "l", "u"}:
            raise SpecParseError("bumpseries takes a=,s=,l=,u=")
        return BumpSeries(kv["a"], int(kv["s"]), _fraction_from_text(kv["l"]), kv["u"])
    if head == "lacunary":
        kv = _parse_kv(body, "lacunary")
        if set(kv) != {"base"}:
            raise SpecParseError("lacunary takes exactly base=<2|half>")
        return Lacunary(kv["base"])
    raise SpecParseError(f"unknown function spec {text!r}")


def format_spec(spec):
    """Inverse of :func:`parse_spec` (canonical text form)."""
    if isinstance(spec, Analytic):
        return spec.name
    if isinstance(spec, Poly):
        return "poly:" + ",".join(str(c) for c in spec.coeffs)
    if isinstance(spec, RationalOnePlus):
        return "rational1p"
    if isinstance(spec, FlatExp):
        return f"flatexp:s={spec.s}"
    if isinstance(spec, BumpSeries):
        return f"bumpseries:a={spec.amplitude},s={spec.s},l={spec.period},u={spec.kind}"
    if isinstance(spec, Lacunary):
        return f"lacunary:base={spec.base}"
    raise SpecParseError(f"not a function spec: {spec!r}")


def catalog_entries():
    """(spec text, description) pairs for the CLI listing."""
    return (
        ("exp | sin | cos", "entire analytic builtins"),
        ("poly:c0,c1,...", "polynomial with exact rational coefficients"),
        ("rational1p", "1/(1+t), pole at t = -1"),
        ("flatexp:s=<1|2>", "e^{-1/t^s} with value 0 at t = 0 (flat point)"),
        (
            "bumpseries:a=<invfact|doubleexp>,s=<1|2>,l=<rational>,u=<floor|sin>",
            "sum_n a_n u(2^n x); u flat on its period lattice; for u=sin, "
            "points and l are measured in units of pi",
        ),
        ("lacunary:base=<2|half>", "sum_m e^{i 2^{+-m} t}/m! (complex-valued)"),
    )


# ---------------------------------------------------------------------------
# Truncation certificates


@dataclass(frozen=True)
class SeriesTruncation:
    """Certificate for a truncated outer series.

    ``outer_terms`` is the largest number of outer terms summed for any
    coefficient. ``per_order_bounds[k]`` is an absolute majorant on what the
    discarded tail can contribute to coefficient k (zero on the exact,
    terminating branch). ``tail_bound`` is the worst relative discarded mass
    max_k bound_k / scale_k and is at most ``target`` = 2^{-(bits+guard)}.
    Sup bounds entering the majorants are sampled (SUP_SAMPLES points per
    period) and inflated by SUP_SAFETY, recorded here for honesty.
    """

    outer_terms: int
    tail_bound: object
    target: object
    per_order_bounds: tuple
    exact_tail: bool
    sup_safety: int = SUP_SAFETY


# ---------------------------------------------------------------------------
# Bump building blocks


def _alpha_jet(inner, s):
    """Jet of e^{-1/y^s} composed with the jet ``inner`` (inner value > 0)."""
    power = jets.mul(inner, inner) if s == 2 else inner
    recip = jets.div(jets.constant(1, inner.center, inner.order, inner.ctx), power)
    return jets.exp(jets.scale(recip, -1))


def _beta_jet_s(y, s, order, ctx):
    """Jet of beta = alpha(y) alpha(1-y) at y in (0, 1)."""
    yv = ctx.convert(y)
    ident = jets.identity(yv, order, ctx)
    one = jets.constant(1, yv, order, ctx)
    mirrored = jets.linear(1, one, -1, ident)  # jet of 1 - y
    return jets.mul(_alpha_jet(ident, s), _alpha_jet(mirrored, s))


def bump_jet(s, x, order, ctx):
    """Jet of the unit-period floor bump u(x) = beta(x - floor(x)).

    At exact integers every derivative vanishes and the all-zero jet is
    returned without any limit computation. Elsewhere the jet of beta at the
    fractional part is computed through division and exponential recurrences.
    Untagged points are allowed only when they are unambiguously away from
    the integer lattice at working precision.
    """
    if isinstance(x, (Fraction, int)):
        x = Scalar(value=ctx.convert(Fraction(x)), exact=Fraction(x))
    if x.exact is not None:
        if x.exact.denominator == 1:
            return jets.zero(ctx.convert(x.exact), order, ctx)
        frac = x.exact - (x.exact.numerator // x.exact.denominator)
        core = _beta_jet_s(frac, s, order, ctx)
        return Jet(ctx.convert(x.exact), core.coeffs, ctx)
    mp = ctx.mp
    nearest = mp.nint(x.value)
    if abs(x.value - nearest) <= mp.ldexp(1, -(ctx.bits // 2)):
        raise ExactnessRequired(
            "ambiguous branch near integer: supply x in exact rational form"
        )
    core = _beta_jet_s(x.value - mp.floor(x.value), s, order, ctx)
    return Jet(x.value, core.coeffs, ctx)


def sin_bump_jet(x, order, ctx):
    """Jet of u(x) = e^{-csc^2 x}; ``x`` is a Scalar tagged in units of pi.

    The pi-rational tag decides the flat branch (integer multiples of pi)
    exactly; elsewhere the jet goes through sin/cos, division, and exp.
    """
    if x.pi_exact is None:
        raise ExactnessRequired("sin bump needs x tagged as a rational multiple of pi")
    if x.pi_exact.denominator == 1:
        return jets.zero(x.value, order, ctx)
    sj, _ = jets.sin_cos(jets.identity(x.value, order, ctx))
    core = _alpha_jet(jets.mul(sj, sj), 1)  # 1/(sin^2) then exp(-.)
    return Jet(x.value, core.coeffs, ctx)


# ---------------------------------------------------------------------------
# Sampled sup bounds for bump derivatives

_sup_ctx = make_context(64)
_sup_cache = {}


def _sup_coeff_bounds(kind, s, order):
    """Sampled sup of |u^(k)(x)|/k! for k <= order, inflated by SUP_SAFETY.

    Sampling happens once per (kind, s) at 64 bits over SUP_SAMPLES midpoints
    of one period; results are cached and extended lazily when a higher order
    is requested.
    """
    key = (kind, s)
    cached = _sup_cache.get(key)
    if cached is not None and len(cached) > order:
        return cached
    ctx = _sup_ctx
    sups = [ctx.mp.mpf(0)] * (order + 1)
    for i in range(SUP_SAMPLES):
        y = Fraction(2 * i + 1, 2 * SUP_SAMPLES)
        if kind == "floor":
            jet = _beta_jet_s(y, s, order, ctx)
        else:
            x = Scalar(value=ctx.mp.pi * ctx.convert(y), pi_exact=y)
            jet = sin_bump_jet(x, order, ctx)
        for k, c in enumerate(jet.coeffs):
            mag = abs(c)
            if mag > sups[k]:
                sups[k] = mag
    result = tuple(v * SUP_SAFETY for v in sups)
    _sup_cache[key] = result
    return result


# ---------------------------------------------------------------------------
# Bump series


def _amplitude(spec, n, mp):
    if spec.amplitude == "invfact":
        return 1 / mp.factorial(n)
    return mp.ldexp(1, -(2**n))  # 2^{-2^n}, exact


def _bump_term_jet_coeffs(spec, q, order, ctx):
    """Base coefficients of the outer term at exact period position q.

    ``q`` is t/period (floor) or t/pi (sin), already multiplied by 2^n.
    Returns None when the term vanishes identically (lattice point), else a
    coefficient tuple; entry k still needs the amplitude and chain factor.
    """
    q_frac = q - (q.numerator // q.denominator)
    if q_frac == 0:
        return None
    if spec.kind == "floor":
        return _beta_jet_s(q_frac, spec.s, order, ctx).coeffs
    x = Scalar(value=ctx.mp.pi * ctx.convert(q_frac), pi_exact=q_frac)
    return sin_bump_jet(x, order, ctx).coeffs


def series_family_jet(
    spec,
    t,
    order,
    ctx,
    outer_override=None,
    outer_limit=DEFAULT_OUTER_LIMIT,
    order_cap=DEFAULT_ORDER_CAP,
):
    """Jet of f(x) = sum_n a_n u(2^n x) at t, with a truncation certificate.

    Coefficient k of the term n is a_n (2^n/l)^k u_k(...), summed per order
    until its certified majorant falls below 2^{-(bits+guard)} relative; each
    order stops independently so results are order-extension consistent.
    When the position t/l has a power-of-two denominator the tail vanishes
    identically (every later 2^n t hits the flat lattice) and the certificate
    is exact with zero bounds.
    """
    if order > order_cap:
        raise OrderCapError(f"order {order} above bump-series cap {order_cap}")
    if spec.kind == "floor":
        if t.exact is None:
            raise ExactnessRequired(
                "exactness required: bump series needs t as p/q"
            )
        q0 = t.exact / spec.period
        chain_base = Fraction(1) / spec.period
        center = ctx.convert(t.exact)
    else:
        if t.pi_exact is None:
            raise ExactnessRequired(
                "exactness required: sin bump series needs t as a rational "
                "multiple of pi"
            )
        q0 = t.pi_exact  # zeros of e^{-csc^2} sit at integer multiples of pi
        chain_base = Fraction(1)
        center = t.value

    mp, g = ctx.mp, ctx.mp_guard
    acc = [g.mpf(0) for _ in range(order + 1)]
    scale_seen = [g.mpf(0) for _ in range(order + 1)]
    target_rel = g.ldexp(1, -(ctx.bits + ctx.guard_bits))

    den = q0.denominator
    terminates = den & (den - 1) == 0

    def add_term(n, orders):
        """Accumulate outer term n into the listed coefficient orders."""
        top = max(orders)
        coeffs = _bump_term_jet_coeffs(spec, q=q0 * (2**n), order=top, ctx=ctx)
        if coeffs is None:
            return
        a_n = g.convert(_amplitude(spec, n, mp))
        ratio = g.convert(chain_base * (2**n))  # (2^n / l), exact when l = 1
        weight = a_n
        wanted = set(orders)
        for k in range(top + 1):
            if k > 0:
                weight = weight * ratio
            if k not in wanted:
                continue
            contribution = weight * g.convert(coeffs[k])
            acc[k] = acc[k] + contribution
            mag = abs(contribution)
            if mag > scale_seen[k]:
                scale_seen[k] = mag
            a_mag = abs(acc[k])
            if a_mag > scale_seen[k]:
                scale_seen[k] = a_mag

    if terminates and outer_override is None:
        n_stop = den.bit_length() - 1
        all_orders = list(range(order + 1))
        for n in range(n_stop):
            add_term(n, all_orders)
        zero = mp.mpf(0)
        trunc = SeriesTruncation(
            outer_terms=n_stop,
            tail_bound=zero,
            target=mp.convert(target_rel),
            per_order_bounds=tuple(zero for _ in range(order + 1)),
            exact_tail=True,
        )
        coeffs = tuple(mp.convert(a) for a in acc)
        return Jet(center, coeffs, ctx), trunc

    if spec.amplitude == "invfact" and 2 ** (order + 1) + 64 > outer_limit:
        raise TruncationBudgetError(
            f"truncation budget exceeded: order {order} needs about "
            f"{2 ** (order + 1)} outer terms (limit {outer_limit})"
        )

    sups = _sup_coeff_bounds(spec.kind, spec.s, order)
    sups_g = tuple(g.convert(v) for v in sups)

    active = list(range(order + 1))
    bounds = [None] * (order + 1)
    stop_at = [None] * (order + 1)
    n = 0
    while active:
        if n > outer_limit:
            raise TruncationBudgetError(
                f"truncation budget exceeded after {outer_limit} outer terms"
            )
        add_term(n, active)
        still = []
        for k in active:
            # Majorant for the tail from n+1 on: a_{n+1} (2^{n+1}/l)^k sup_k,
            # doubled once the term ratio is at most 1/2.
            if outer_override is not None:
                if n + 1 < outer_override:
                    still.append(k)
                    continue
            a_next = g.convert(_amplitude(spec, n + 1, mp))
            head = a_next * g.convert(chain_base * (2 ** (n + 1))) ** k * sups_g[k]
            if spec.amplitude == "invfact":
                ratio_ok = (n + 2) >= 2 ** (k + 1)
            else:
                ratio_ok = 2**n >= k + 1
            majorant = 2 * head
            scale = scale_seen[k]
            if outer_override is not None:
                bounds[k] = majorant
                stop_at[k] = n + 1
                continue
            if ratio_ok and scale > 0 and majorant <= target_rel * scale:
                bounds[k] = majorant
                stop_at[k] = n + 1
            else:
                still.append(k)
        active = still
        n += 1

    tail_rel = mp.mpf(0)
    for k in range(order + 1):
        if scale_seen[k] > 0:
            rel = mp.convert(bounds[k] / scale_seen[k])
            if rel > tail_rel:
                tail_rel = rel
    trunc = SeriesTruncation(
        outer_terms=max(stop_at),
        tail_bound=tail_rel,
        target=mp.convert(target_rel),
        per_order_bounds=tuple(mp.convert(b) for b in bounds),
        exact_tail=False,
    )
    coeffs = tuple(mp.convert(a) for a in acc)
    return Jet(center, coeffs, ctx), trunc


# ---------------------------------------------------------------------------
# Lacunary series


class _PhaseSource:
    """Unit phases e^{i w_m t} for w_m = 2^m, by exact residues when possible.

    For t = (p/q) pi the angle reduces to pi (2^m p mod 2q)/q, pure integer
    arithmetic. For other t an angle-doubling loop runs at extended precision
    (the doubling map loses one bit per step, so the working width grows with
    the expected outer-term count).
    """

    def __init__(self, t, ctx, outer_estimate):
        self.g = ctx.mp_guard
        self.phases = []
        self.residues = None
        self.theta = None
        if t.is_exact_zero:
            self.mode = "one"
            return
        if t.pi_exact is not None:
            self.mode = "residue"
            r = t.pi_exact
            self.q = r.denominator
            self.residue = r.numerator % (2 * self.q)
            self.cache = {}
            return
        self.mode = "doubling"
        if outer_estimate > GENERIC_PHASE_LIMIT:
            raise TruncationBudgetError(
                "truncation budget exceeded: phase reduction for this order "
                "needs about "
                f"{outer_estimate} angle doublings; supply t as p/q of pi "
                "(pi-rational points keep the reduction exact)"
            )
        prec_ext = ctx.bits + ctx.guard_bits + outer_estimate + 32
        ext = make_context(min(prec_ext, 2**22))
        self.ext = ext.mp
        theta = (
            self.ext.convert(t.exact) if t.exact is not None else self.ext.convert(t.value)
        )
        self.two_pi = 2 * self.ext.pi
        theta = self.ext.fmod(theta, self.two_pi)
        if theta < 0:
            theta = theta + self.two_pi
        self.theta = theta

    def get(self, m):
        """(cos, sin) of the phase angle for outer index m, guarded width."""
        if self.mode == "one":
            return self.g.mpf(1), self.g.mpf(0)
        if self.mode == "residue":
            while len(self.phases) <= m:
                r = self.residue if not self.phases else self._advance()
                self.phases.append(r)
            r = self.phases[m]
            pair = self.cache.get(r)
            if pair is None:
                frac = self.g.convert(Fraction(r, self.q))
                pair = (self.g.cospi(frac), self.g.sinpi(frac))
                self.cache[r] = pair
            return pair
        while len(self.phases) <= m:
            angle = self.g.convert(self.theta)
            self.phases.append((self.g.cos(angle), self.g.sin(angle)))
            self.theta = self.theta * 2
            if self.theta >= self.two_pi:
                self.theta = self.theta - self.two_pi
        return self.phases[m]

    def _advance(self):
        return (2 * self.phases[-1]) % (2 * self.q)


def lacunary_jet(
    base_or_spec,
    t,
    order,
    ctx,
    outer_override=None,
    order_cap=LACUNARY_ORDER_CAP,
):
    """Jet of the lacunary series at t with a truncation certificate.

    Coefficient n is (i^n/n!) sum_m w_m^n e^{i w_m t}/m!, summed until the
    certified majorant (twice the next term once the term ratio is <= 1/2)
    drops below 2^{-(bits+guard)} of the largest term seen. The 2^m family
    needs roughly 2^{n+1} outer terms for coefficient n, hence the order cap.
    """
    base = base_or_spec.base if isinstance(base_or_spec, Lacunary) else str(base_or_spec)
    if base not in ("2", "half"):
        raise SpecParseError("lacunary base must be 2 or half")
    mp, g = ctx.mp, ctx.mp_guard
    if base == "2" and order > order_cap:
        raise OrderCapError(
            f"order {order} above lacunary cap {order_cap}: exponential outer-term cost"
        )

    target_rel = g.ldexp(1, -(ctx.bits + ctx.guard_bits))
    if base == "2":
        outer_estimate = 2 ** (order + 1) + 2 * (ctx.bits + ctx.guard_bits) + 64
        phases = _PhaseSource(t, ctx, outer_estimate)
    else:
        phases = None
        t_g = g.convert(t.value)

    coeffs = []
    bounds = []
    rel_bounds = []
    outer_max = 0
    for n in range(order + 1):
        re = g.mpf(0)
        im = g.mpf(0)
        max_term = g.mpf(0)
        if base == "2":
            term = g.mpf(1)
            m = 0
            while True:
                pre, pim = phases.get(m)
                re = re + term * pre
                if pim != 0:
                    im = im + term * pim
                if term > max_term:
                    max_term = term
                nxt = g.ldexp(term, n) / (m + 1)
                m += 1
                forced = outer_override is not None and m < outer_override
                if not forced and (m + 1) >= 2 ** (n + 1) and 2 * nxt <= target_rel * max_term:
                    bound = 2 * nxt
                    break
                term = nxt
        else:
            term = g.ldexp(g.mpf(1), -n)  # m = 1 term: 2^{-n}/1!
            m = 1
            while True:
                if t.is_exact_zero:
                    pre, pim = g.mpf(1), g.mpf(0)
                else:
                    angle = g.ldexp(t_g, -m)
                    pre, pim = g.cos(angle), g.sin(angle)
                re = re + term * pre
                if pim != 0:
                    im = im + term * pim
                if term > max_term:
                    max_term = term
                nxt = g.ldexp(term, -n) / (m + 1)
                m += 1
                forced = outer_override is not None and m <= outer_override
                if not forced and 2 * nxt <= target_rel * max_term:
                    bound = 2 * nxt
                    break
                term = nxt
        outer_max = max(outer_max, m)
        fact = g.factorial(n)
        re, im = re / fact, im / fact
        rot = n % 4
        if rot == 1:
            re, im = -im, re
        elif rot == 2:
            re, im = -re, -im
        elif rot == 3:
            re, im = im, -re
        coeffs.append(mp.mpc(mp.convert(re), mp.convert(im)))
        bounds.append(mp.convert(bound / fact))
        rel_bounds.append(mp.convert(bound / max_term))

    trunc = SeriesTruncation(
        outer_terms=outer_max,
        tail_bound=max(rel_bounds),
        target=mp.convert(target_rel),
        per_order_bounds=tuple(bounds),
        exact_tail=False,
    )
    return Jet(ctx.convert(t.value), tuple(coeffs), ctx), trunc


# ---------------------------------------------------------------------------
# Dyadic points


def dyadic_check(t, ell):
    """Classify t against the set {(2m+1) l / 2^n}: returns (m, n) or None.

    Both arguments must be exact rationals (for the sin bump they are
    measured in units of pi). Pure integer arithmetic; no tolerance.
    """
    if not isinstance(t, Fraction) or not isinstance(ell, Fraction):
        raise ExactnessRequired("exactness required: dyadic check needs exact rationals")
    if ell <= 0:
        raise UsageError("period must be positive")
    q = t / ell
    den = q.denominator
    if den & (den - 1) != 0:
        return None
    if den == 1 and q.numerator % 2 == 0:
        return None
    n = den.bit_length() - 1
    m = (q.numerator - 1) // 2
    return (m, n)


# ---------------------------------------------------------------------------
# Dispatcher


def _poly_jet(spec, t_value, order, ctx):
    ident = jets.identity(t_value, order, ctx)
    acc = jets.constant(ctx.convert(spec.coeffs[-1]), t_value, order, ctx)
    for c in reversed(spec.coeffs[:-1]):
        acc = jets.mul(acc, ident)
        acc = jets.linear(1, acc, 1, jets.constant(ctx.convert(c), t_value, order, ctx))
    return acc


def jet_with_certificate(spec, t, order, ctx, **series_opts):
    """Order-N jet of the catalog function at t, plus a certificate when the
    evaluation truncates an infinite outer series (None otherwise)."""
    if order < 0:
        raise UsageError("order must be non-negative")
    if isinstance(spec, Analytic):
        ident = jets.identity(t.value, order, ctx)
        if spec.name == "exp":
            return jets.exp(ident), None
        sj, cj = jets.sin_cos(ident)
        return (sj if spec.name == "sin" else cj), None
    if isinstance(spec, Poly):
        return _poly_jet(spec, t.value, order, ctx), None
    if isinstance(spec, RationalOnePlus):
        if (t.exact is not None and t.exact == -1) or t.value == -1:
            raise PoleError("pole: rational1p is undefined at t = -1")
        ident = jets.identity(t.value, order, ctx)
        one = jets.constant(1, t.value, order, ctx)
        return jets.div(one, jets.linear(1, one, 1, ident)), None
    if isinstance(spec, FlatExp):
        if t.is_exact_zero:
            return jets.zero(ctx.mp.mpf(0), order, ctx), None
        ident = jets.identity(t.value, order, ctx)
        power = jets.mul(ident, ident) if spec.s == 2 else ident
        recip = jets.div(jets.constant(1, t.value, order, ctx), power)
        return jets.exp(jets.scale(recip, -1)), None
    if isinstance(spec, BumpSeries):
        return series_family_jet(spec, t, order, ctx, **series_opts)
    if isinstance(spec, Lacunary):
        return lacunary_jet(spec, t, order, ctx, **series_opts)
    raise SpecParseError(f"not a function spec: {spec!r}")


def jet_of(spec, t, order, ctx, **series_opts):
    """Order-N jet of the catalog function at t (certificate dropped)."""
    return jet_with_certificate(spec, t, order, ctx, **series_opts)[0]


def value_at_zero(spec, ctx):
    """f(0) for every catalog family (the hat series' conjectural limit)."""
    mp = ctx.mp
    if isinstance(spec, Analytic):
        return {"exp": mp.mpf(1), "sin": mp.mpf(0), "cos": mp.mpf(1)}[spec.name]
    if isinstance(spec, Poly):
        return ctx.convert(spec.coeffs[0])
    if isinstance(spec, RationalOnePlus):
        return mp.mpf(1)
    if isinstance(spec, (FlatExp, BumpSeries)):
        return mp.mpf(0)
    if isinstance(spec, Lacunary):
        return mp.e if spec.base == "2" else mp.expm1(1)
    raise SpecParseError(f"not a function spec: {spec!r}")
