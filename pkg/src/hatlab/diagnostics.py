"""Convergence inference from jet coefficients.

Nothing here proves convergence; every verdict is evidence with a recorded
threshold. The Taylor radius at t is estimated by a root test on the jet
coefficients: limsup_n |c_n|^{1/n} is approximated by the maximum of
|c_n|^{1/n} over the window n in [ceil(2N/3), N] (a window max is robust to
the many exact-zero coefficients of lacunary-type jets, where a tail average
would understate the limsup). Comparing the estimated radius against |t|
with a relative dead band delta gives the three-way point classification.

An estimate is flagged effectively infinite when the fitted trend of
log |c_n|^{1/n} predicts more than a 5% drop across the window (entire
functions: the root sequence keeps sliding to 0) or when the window is
all-zero for a polynomial; the reported radius is then the +inf marker and
the raw window estimate stays available separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import math

from . import catalog, hatseries
from .errors import InconclusiveWindow, NumericError, UsageError

TREND_LOG_BAND = math.log(1.05)
GROWTH_FACTOR = 10**6
NONDECREASING_SLACK_BITS = 16


def _window_bounds(order):
    n_lo = -((-2 * order) // 3)  # ceil(2N/3)
    return n_lo, order


@dataclass(frozen=True)
class RadiusEstimate:
    """Root-test radius estimate over a trailing coefficient window."""

    t: object
    order: int
    window: tuple
    ns: tuple
    rhos: tuple  # |c_n|^{1/n} for the nonzero window coefficients
    r_hat: object  # reported radius; +inf marker when effectively infinite
    r_hat_window: Optional[object]  # raw reciprocal window max
    trend: str  # "increasing" | "decreasing" | "stable"
    slope: Optional[object]  # least-squares slope of log rho over the window
    effectively_infinite: bool


def radius_estimate(spec, t, order, ctx, jet=None):
    """Estimate the Taylor radius at t from an order-N jet (N >= 12)."""
    if order < 12:
        raise UsageError("radius estimate needs order >= 12 (window of >= 4 points)")
    if jet is None:
        jet = catalog.jet_of(spec, t, order, ctx)
    mp = ctx.mp
    n_lo, n_hi = _window_bounds(order)
    ns, rhos, logs = [], [], []
    for n in range(n_lo, n_hi + 1):
        mag = abs(jet.coeffs[n])
        if mag == 0:
            continue
        log_rho = mp.log(mag) / n
        ns.append(n)
        logs.append(log_rho)
        rhos.append(mp.exp(log_rho))
    t_value = t.value if hasattr(t, "value") else mp.convert(t)
    if not ns:
        if isinstance(spec, catalog.Poly):
            return RadiusEstimate(
                t=t_value,
                order=order,
                window=(n_lo, n_hi),
                ns=(),
                rhos=(),
                r_hat=mp.inf,
                r_hat_window=None,
                trend="stable",
                slope=None,
                effectively_infinite=True,
            )
        raise InconclusiveWindow(
            "inconclusive window: all window coefficients vanish for a "
            "non-polynomial function"
        )
    max_log = max(logs)
    r_hat_window = mp.exp(-max_log)
    slope = None
    trend = "stable"
    if len(ns) >= 2:
        n_mean = mp.fsum(mp.mpf(n) for n in ns) / len(ns)
        y_mean = mp.fsum(logs) / len(logs)
        num = mp.fsum((n - n_mean) * (y - y_mean) for n, y in zip(ns, logs))
        den = mp.fsum((n - n_mean) ** 2 for n in ns)
        slope = num / den
        predicted_change = slope * (n_hi - n_lo)
        if predicted_change > TREND_LOG_BAND:
            trend = "increasing"
        elif predicted_change < -TREND_LOG_BAND:
            trend = "decreasing"
    effectively_infinite = trend == "decreasing"
    return RadiusEstimate(
        t=t_value,
        order=order,
        window=(n_lo, n_hi),
        ns=tuple(ns),
        rhos=tuple(rhos),
        r_hat=mp.inf if effectively_infinite else r_hat_window,
        r_hat_window=r_hat_window,
        trend=trend,
        slope=slope,
        effectively_infinite=effectively_infinite,
    )


@dataclass(frozen=True)
class Classification:
    """Three-way verdict comparing the estimated radius against |t|."""

    case: str  # "diverges" | "converges_to_Tt0" | "boundary_indeterminate"
    r_hat: Optional[object]
    abs_t: object
    delta: object
    reason: Optional[str] = None


def classify_point(spec, t, order, delta, ctx, jet=None):
    """Classify the point by R_hat vs |t| with relative dead band delta."""
    mp = ctx.mp
    t_value = t.value if hasattr(t, "value") else mp.convert(t)
    if t_value == 0:
        raise UsageError("t = 0 is trivially convergent to f(0); classification needs t != 0")
    delta = mp.convert(delta)
    try:
        estimate = radius_estimate(spec, t, order, ctx, jet=jet)
    except InconclusiveWindow as exc:
        return Classification(
            case="boundary_indeterminate",
            r_hat=None,
            abs_t=abs(t_value),
            delta=delta,
            reason=str(exc),
        )
    abs_t = abs(t_value)
    if estimate.r_hat < (1 - delta) * abs_t:
        case = "diverges"
    elif estimate.r_hat > (1 + delta) * abs_t:
        case = "converges_to_Tt0"
    else:
        case = "boundary_indeterminate"
    return Classification(case=case, r_hat=estimate.r_hat, abs_t=abs_t, delta=delta)


@dataclass(frozen=True)
class TermLimitVerdict:
    """Necessary-condition check: do the terms tend to zero?"""

    verdict: str  # "passes" | "fails" | "inconclusive"
    note: Optional[str]
    window: tuple
    final_max: object
    growth_threshold: int = GROWTH_FACTOR


def necessary_condition_test(run, window_fraction=None):
    """Judge lim a_n = 0 from the trailing window of a :class:`HatRun`.

    Fails when window magnitudes are nondecreasing and either grew by the
    10^6 factor or stayed demonstrably away from zero; passes when the whole
    window has collapsed below 2^(-bits/4); inconclusive otherwise.
    """
    if run.order < 12:
        raise UsageError("necessary-condition test needs order >= 12")
    frac = window_fraction if window_fraction is not None else 1 / 3
    ctx = run.ctx
    mp = ctx.mp
    span = int(run.order * frac)
    n_lo = max(0, run.order - span)
    mags = [abs(term) for term in run.terms[n_lo:]]
    final_max = mp.convert(max(mags))
    tiny = mp.ldexp(1, -(ctx.bits // 4))
    window = (n_lo, run.order)
    if final_max <= tiny:
        return TermLimitVerdict("passes", None, window, final_max)
    slack = mp.mpf(1) - mp.ldexp(1, -NONDECREASING_SLACK_BITS)
    nondecreasing = all(
        mags[i + 1] >= mags[i] * slack for i in range(len(mags) - 1)
    )
    if nondecreasing and mags[0] > 0 and mags[-1] >= GROWTH_FACTOR * mags[0]:
        return TermLimitVerdict(
            "fails", f"window magnitudes grew by >= {GROWTH_FACTOR}", window, final_max
        )
    if nondecreasing and mags[-1] > tiny:
        note = "terms do not vanish"
        reals = [term.real if hasattr(term, "real") else term for term in run.terms[-6:]]
        if all(reals[i] * reals[i + 1] < 0 for i in range(len(reals) - 1)):
            note += " (oscillating signs)"
        return TermLimitVerdict("fails", note, window, final_max)
    return TermLimitVerdict("inconclusive", None, window, final_max)


@dataclass(frozen=True)
class BoundReport:
    """Envelope fit |f^(n)(t)| <= C M^n plus ratio/alternating-sum suprema.

    All suprema are over the recorded finite grid and order range only.
    """

    grid: tuple
    order: int
    c_hat: object
    m_hat: object
    fit_points: int
    ratio_sup: Optional[object]
    ratio_exclusions: int
    dirichlet_sup: object
    term_limit: tuple  # (t, verdict-or-skip-string) pairs
    exclusion_bits: int


def bound_report(spec, t_grid, order, ctx):
    """Fit growth bounds of derivative magnitudes over a grid of points."""
    if not t_grid:
        raise UsageError("bound report needs a non-empty grid")
    if order < 4:
        raise UsageError("bound report needs order >= 4")
    mp = ctx.mp
    samples = []  # (n, log |f^(n)(t)|)
    ratio_sup = None
    exclusions = 0
    dirichlet_sup = mp.mpf(0)
    term_limit = []
    for t in t_grid:
        jet = catalog.jet_of(spec, t, order, ctx)
        logs = {}
        for n, c in enumerate(jet.coeffs):
            mag = abs(c)
            if mag == 0:
                continue
            logs[n] = mp.log(mag) + mp.loggamma(n + 1)
        samples.extend(logs.items())
        if logs:
            scale_log = max(logs.values())
            floor_log = scale_log + mp.log(mp.ldexp(1, -(ctx.bits // 2)))
            for n in range(order):
                if n in logs and n + 1 in logs and logs[n] >= floor_log:
                    ratio = mp.exp(logs[n + 1] - logs[n])
                    if ratio_sup is None or ratio > ratio_sup:
                        ratio_sup = ratio
                else:
                    exclusions += 1
        acc = mp.mpf(0)
        for n, c in enumerate(jet.coeffs):
            value = c * mp.factorial(n)
            acc = acc + (value if n % 2 == 0 else -value)
            mag = abs(acc)
            if mag > dirichlet_sup:
                dirichlet_sup = mag
        if order >= 12:
            run = hatseries.hat_run(spec, t, order, ctx, jet=jet)
            term_limit.append((t, necessary_condition_test(run)))
        else:
            term_limit.append((t, "skipped: order < 12"))
    if len(samples) >= 2:
        n_mean = mp.fsum(mp.mpf(n) for n, _ in samples) / len(samples)
        y_mean = mp.fsum(y for _, y in samples) / len(samples)
        num = mp.fsum((n - n_mean) * (y - y_mean) for n, y in samples)
        den = mp.fsum((n - n_mean) ** 2 for n, _ in samples)
        slope = num / den if den > 0 else mp.mpf(0)
        intercept = y_mean - slope * n_mean
        max_resid = max(y - (intercept + slope * n) for n, y in samples)
    elif samples:
        slope = mp.mpf(0)
        intercept = samples[0][1]
        max_resid = mp.mpf(0)
    else:
        raise NumericError("bound report: all derivatives vanish on the grid")
    return BoundReport(
        grid=tuple(t.value if hasattr(t, "value") else t for t in t_grid),
        order=order,
        c_hat=mp.exp(intercept + max_resid),
        m_hat=mp.exp(slope),
        fit_points=len(samples),
        ratio_sup=ratio_sup,
        ratio_exclusions=exclusions,
        dirichlet_sup=dirichlet_sup,
        term_limit=tuple(term_limit),
        exclusion_bits=ctx.bits // 2,
    )


@dataclass(frozen=True)
class GridRadiusSummary:
    """Per-point radius estimates and their grid-level aggregates.

    alpha_hat / beta_hat are the max / min of 1/R_hat over the grid; the
    derived pair r = 1/alpha_hat, s = 1/beta_hat brackets where the series
    is root-test convergent (inside r) and divergent (outside s). The
    aggregates are relative to this grid only.
    """

    estimates: tuple  # (t, RadiusEstimate)
    failures: tuple  # (t, message)
    alpha_hat: object
    beta_hat: object
    r: object
    s: object


def grid_radius_summary(spec, t_grid, order, ctx):
    """Radius map over a grid with sup/inf aggregates (grid-relative)."""
    if not t_grid:
        raise UsageError("radius summary needs a non-empty grid")
    mp = ctx.mp
    estimates = []
    failures = []
    for t in t_grid:
        try:
            estimates.append((t, radius_estimate(spec, t, order, ctx)))
        except (NumericError, UsageError) as exc:
            failures.append((t, str(exc)))
    if not estimates:
        raise NumericError("no radius estimates succeeded on the grid")
    inv = []
    for _, est in estimates:
        inv.append(mp.mpf(0) if est.effectively_infinite else 1 / est.r_hat)
    alpha_hat = max(inv)
    beta_hat = min(inv)
    r = mp.inf if alpha_hat == 0 else 1 / alpha_hat
    s = mp.inf if beta_hat == 0 else 1 / beta_hat
    return GridRadiusSummary(
        estimates=tuple(estimates),
        failures=tuple(failures),
        alpha_hat=alpha_hat,
        beta_hat=beta_hat,
        r=r,
        s=s,
    )
