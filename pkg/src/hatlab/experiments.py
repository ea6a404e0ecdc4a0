"""Registered experiments, configuration, and deterministic emission.

Each experiment id maps to a fixed recipe over the function catalog; the
config can narrow the function or grid where that makes sense. Results are
tables of full-precision decimal strings plus verdict rows that always cite
their thresholds, so output files are byte-identical across re-runs with the
same config. Open-question probes (EXP-C, EXP-D, EXP-H) are exploratory:
they emit data and no verdict rows.

Wall time is measured and reported on stderr by the CLI but never written
into result files (determinism).
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import catalog, diagnostics, hatseries
from .errors import UsageError
from .precision import (
    Scalar,
    format_complex,
    format_real,
    make_context,
    parse_scalar,
    scalar_from_fraction,
    scalar_from_pi_fraction,
)

CONFIG_DEFAULTS = {
    "bits": 256,
    "guard": 32,
    "order": 60,
    "delta": "0.1",
    "format": "csv",
}

_CONFIG_KEYS = {"experiment", "f", "t", "order", "bits", "guard", "delta", "format", "out"}

EXPLORATORY = {"EXP-C", "EXP-D", "EXP-H"}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    f: Optional[str] = None
    t: Optional[str] = None
    order: int = CONFIG_DEFAULTS["order"]
    bits: int = CONFIG_DEFAULTS["bits"]
    guard: int = CONFIG_DEFAULTS["guard"]
    delta: str = CONFIG_DEFAULTS["delta"]
    format: str = CONFIG_DEFAULTS["format"]
    out: Optional[str] = None


@dataclass(frozen=True)
class Table:
    name: str
    header: tuple
    rows: tuple


@dataclass(frozen=True)
class Verdict:
    check: str
    passed: bool
    threshold: str
    details: str


@dataclass(frozen=True)
class ExperimentResult:
    experiment: str
    exploratory: bool
    metadata: tuple  # (key, value) pairs, ordered
    tables: tuple
    verdicts: tuple
    wall_time_s: float = field(compare=False, default=0.0)


def parse_config_file(path):
    """Flat ``key = value`` lines with ``#`` comments; unknown keys rejected."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = key.strip(), value.strip()
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
            out[key] = value
    return out


def build_config(file_values=None, flag_values=None):
    """Merge config-file values and flags (flags win), fill defaults."""
    merged = dict(file_values or {})
    for key, value in (flag_values or {}).items():
        if value is not None:
            if key not in _CONFIG_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            merged[key] = value
    if "experiment" not in merged:
        raise UsageError("no experiment id given (--experiment or config file)")
    def _int(key, cap):
        raw = merged.get(key, CONFIG_DEFAULTS.get(key))
        try:
            value = int(raw)
        except (TypeError, ValueError):
            raise UsageError(f"{key} must be an integer, got {raw!r}") from None
        if not 0 <= value <= cap:
            raise UsageError(f"{key} = {value} outside [0, {cap}]")
        return value
    fmt = merged.get("format", CONFIG_DEFAULTS["format"])
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    return ExperimentConfig(
        experiment=merged["experiment"],
        f=merged.get("f"),
        t=merged.get("t"),
        order=_int("order", 4096),
        bits=_int("bits", 1 << 20),
        guard=_int("guard", 1 << 16),
        delta=str(merged.get("delta", CONFIG_DEFAULTS["delta"])),
        format=fmt,
        out=merged.get("out"),
    )


def parse_point_or_grid(text, ctx):
    """``a:b:n`` linear grids (exact rational points) or a single scalar."""
    if text.count(":") == 2:
        a_text, b_text, n_text = text.split(":")
        a = parse_scalar(a_text, ctx)
        b = parse_scalar(b_text, ctx)
        try:
            count = int(n_text)
        except ValueError:
            raise UsageError(f"grid count must be an integer: {n_text!r}") from None
        if count < 2:
            raise UsageError("grid needs at least 2 points")
        a_q = a.exact if a.exact is not None else _decimal_fraction(a_text)
        b_q = b.exact if b.exact is not None else _decimal_fraction(b_text)
        step = (b_q - a_q) / (count - 1)
        return [scalar_from_fraction(a_q + i * step, ctx) for i in range(count)]
    return [parse_scalar(text, ctx)]


def _decimal_fraction(text):
    from decimal import Decimal

    return Fraction(Decimal(text.strip()))


def _linspace_fractions(a, b, count):
    a, b = Fraction(a), Fraction(b)
    step = (b - a) / (count - 1)
    return [a + i * step for i in range(count)]


# ---------------------------------------------------------------------------
# Formatting helpers


def _fmt_scalar_label(t):
    """Short exact label for a grid point (used in table names and columns)."""
    if t.exact is not None:
        return str(t.exact)
    if t.pi_exact is not None:
        return f"{t.pi_exact}*pi"
    return None  # fall back to full-precision value


def _t_label(t, ctx):
    return _fmt_scalar_label(t) or format_real(t.value, ctx)


def _hat_run_table(run, ctx, label):
    rows = []
    for n, (term, partial) in enumerate(zip(run.terms, run.partials)):
        term_re, term_im = format_complex(term, ctx)
        part_re, part_im = format_complex(partial, ctx)
        rows.append((str(n), term_re, term_im, part_re, part_im, format_real(abs(term), ctx)))
    return Table(
        name=f"hat_run t={label}",
        header=("n", "term_re", "term_im", "partial_re", "partial_im", "abs_term"),
        rows=tuple(rows),
    )


def _radius_row(t_label_text, est, ctx):
    return (
        t_label_text,
        str(est.window[0]),
        str(est.window[1]),
        format_real(est.r_hat, ctx),
        est.trend,
    )


RADIUS_HEADER = ("t", "n_lo", "n_hi", "R_hat", "trend")
CLASSIFICATION_HEADER = ("t", "R_hat", "abs_t", "delta", "case")
IDENTITY_HEADER = ("check", "t", "max_residual", "ulp_scale")


def _classification_row(t_label_text, cls, ctx):
    r_hat = format_real(cls.r_hat, ctx) if cls.r_hat is not None else "none"
    return (
        t_label_text,
        r_hat,
        format_real(cls.abs_t, ctx),
        format_real(cls.delta, ctx),
        cls.case,
    )


# ---------------------------------------------------------------------------
# Experiments


def _exp_a(cfg, ctx):
    """Analytic suite: |H_N(t) - f(0)| stays below 1e-30 for |t| <= 2."""
    specs = [cfg.f] if cfg.f else ["exp", "sin", "cos", "poly:1,2,3"]
    if cfg.t:
        grid = parse_point_or_grid(cfg.t, ctx)
    else:
        grid = [scalar_from_fraction(q, ctx) for q in _linspace_fractions(-2, 2, 20)]
    threshold = ctx.mp.mpf("1e-30")
    rows = []
    max_err = ctx.mp.mpf(0)
    for spec_text in specs:
        spec = catalog.parse_spec(spec_text)
        f0 = catalog.value_at_zero(spec, ctx)
        for t in grid:
            run = hatseries.hat_run(spec, t, cfg.order, ctx)
            err = abs(run.total - f0)
            max_err = max(max_err, err)
            rows.append(
                (
                    spec_text,
                    _t_label(t, ctx),
                    format_real(run.total, ctx),
                    format_real(f0, ctx),
                    format_real(err, ctx),
                    format_real(run.cancellation_bits, ctx),
                )
            )
    tables = [
        Table(
            "analytic_constancy",
            ("f", "t", "H_N", "f0", "abs_error", "cancellation_bits"),
            tuple(rows),
        )
    ]
    verdicts = [
        Verdict(
            "analytic-constancy max |H_N - f(0)|",
            bool(max_err <= threshold),
            "1e-30",
            f"max_error={format_real(max_err, ctx)}",
        )
    ]
    meta = [("specs", " ".join(specs)), ("points", str(len(grid)))]
    return meta, tables, verdicts


def _exp_b(cfg, ctx):
    """Rational family boundary scan: partial sums plus classification."""
    spec = catalog.RationalOnePlus()
    if cfg.t:
        grid = parse_point_or_grid(cfg.t, ctx)
    else:
        grid = [
            scalar_from_fraction(q, ctx)
            for q in _linspace_fractions(Fraction(-95, 100), 3, 25)
        ]
    delta = ctx.mp.mpf(cfg.delta)
    sum_rows = []
    cls_rows = []
    for t in grid:
        jet = catalog.jet_of(spec, t, cfg.order, ctx)
        run = hatseries.hat_run(spec, t, cfg.order, ctx, jet=jet)
        label = _t_label(t, ctx)
        sum_rows.append(
            (
                label,
                format_real(run.total, ctx),
                format_real(abs(run.total - 1), ctx),
                format_real(run.cancellation_bits, ctx),
            )
        )
        cls = diagnostics.classify_point(spec, t, cfg.order, delta, ctx, jet=jet)
        cls_rows.append(_classification_row(label, cls, ctx))
    tables = [
        Table("partial_sums", ("t", "H_N", "abs_H_minus_1", "cancellation_bits"), tuple(sum_rows)),
        Table("classification", CLASSIFICATION_HEADER, tuple(cls_rows)),
    ]
    # A point misclassifies when the verdict lands on the wrong side of the
    # t = -1/2 split; boundary_indeterminate never counts as a mistake.
    mistakes = 0
    for t, row in zip(grid, cls_rows):
        if t.exact is None:
            continue
        if t.exact > Fraction(-1, 2) and row[4] == "diverges":
            mistakes += 1
        if t.exact < Fraction(-1, 2) and row[4] == "converges_to_Tt0":
            mistakes += 1
    diverge_count = sum(1 for row in cls_rows if row[4] == "diverges")
    verdicts = [
        Verdict(
            "rational boundary split",
            mistakes == 0,
            f"delta={cfg.delta}",
            f"misclassified={mistakes} diverging_points={diverge_count}",
        )
    ]
    meta = [("spec", "rational1p"), ("points", str(len(grid)))]
    return meta, tables, verdicts


def _exp_c(cfg, ctx):
    """Flat-point probe: data only (term decay, partial sums, radius trend)."""
    spec = catalog.FlatExp(2)
    if cfg.t:
        grid = parse_point_or_grid(cfg.t, ctx)
    else:
        grid = [scalar_from_fraction(q, ctx) for q in (Fraction(1, 4), Fraction(1, 2), 1, 2)]
    tables = []
    radius_rows = []
    for t in grid:
        order = max(cfg.order, 12)
        jet = catalog.jet_of(spec, t, order, ctx)
        run = hatseries.hat_run(spec, t, order, ctx, jet=jet)
        label = _t_label(t, ctx)
        tables.append(_hat_run_table(run, ctx, label))
        est = diagnostics.radius_estimate(spec, t, order, ctx, jet=jet)
        radius_rows.append(_radius_row(label, est, ctx))
    tables.append(Table("radius_map", RADIUS_HEADER, tuple(radius_rows)))
    meta = [("spec", "flatexp:s=2"), ("points", str(len(grid)))]
    return meta, tables, []


def _exp_d(cfg, ctx):
    """Bump-series probe at dyadic and non-dyadic points: data only."""
    spec_text = cfg.f or "bumpseries:a=invfact,s=2,l=1,u=floor"
    spec = catalog.parse_spec(spec_text)
    if not isinstance(spec, catalog.BumpSeries):
        raise UsageError("EXP-D needs a bumpseries spec")
    dyadic_pts = [Fraction(1, 2), Fraction(3, 4), Fraction(3, 8)]
    other_pts = [Fraction(1, 3), Fraction(2, 5)]
    if cfg.t:
        pts = [s.exact for s in parse_point_or_grid(cfg.t, ctx)]
        if any(p is None for p in pts):
            raise UsageError("EXP-D needs exact rational points (p/q form)")
        dyadic_pts = [p for p in pts if catalog.dyadic_check(p, spec.period) is not None]
        other_pts = [p for p in pts if catalog.dyadic_check(p, spec.period) is None]
    point_rows = []
    tables = []
    for q in dyadic_pts + other_pts:
        t = (
            scalar_from_fraction(q, ctx)
            if spec.kind == "floor"
            else scalar_from_pi_fraction(q, ctx)
        )
        verdict = catalog.dyadic_check(q, spec.period)
        order = min(cfg.order, 40) if verdict is not None else min(cfg.order, 8)
        jet, trunc = catalog.jet_with_certificate(spec, t, order, ctx)
        run = hatseries.hat_run(spec, t, order, ctx, jet=jet)
        label = _t_label(t, ctx)
        tables.append(_hat_run_table(run, ctx, label))
        point_rows.append(
            (
                label,
                "none" if verdict is None else str(verdict[0]),
                "none" if verdict is None else str(verdict[1]),
                str(trunc.outer_terms),
                "true" if trunc.exact_tail else "false",
                format_real(trunc.tail_bound, ctx),
            )
        )
    tables.insert(
        0,
        Table(
            "points",
            ("t", "dyadic_m", "dyadic_n", "outer_terms", "tail_zero", "tail_bound"),
            tuple(point_rows),
        ),
    )
    meta = [("spec", spec_text), ("dyadic_points", str(len(dyadic_pts)))]
    return meta, tables, []


def _exp_e(cfg, ctx):
    """Lacunary pair: derivative closed form at 0 and the radius contrast."""
    threshold = ctx.mp.mpf("1e-10")
    zero = Scalar(value=ctx.mp.mpf(0), exact=Fraction(0))
    jet, trunc = catalog.lacunary_jet("2", zero, 10, ctx)
    rows = []
    max_rel = ctx.mp.mpf(0)
    for n in range(11):
        raw = jet.raw_derivative(n)
        expected = ctx.mp.exp(ctx.mp.mpf(2) ** n)
        rel = abs(abs(raw) - expected) / expected
        max_rel = max(max_rel, rel)
        rows.append(
            (
                str(n),
                format_real(abs(raw), ctx),
                format_real(expected, ctx),
                format_real(rel, ctx),
            )
        )
    tables = [
        Table("derivative_check", ("n", "abs_f_n_at_0", "e_pow_2n", "rel_error"), tuple(rows))
    ]
    verdicts = [
        Verdict(
            "lacunary derivative closed form (n <= 10)",
            bool(max_rel <= threshold),
            "1e-10",
            f"max_rel_error={format_real(max_rel, ctx)} outer_terms={trunc.outer_terms}",
        )
    ]
    radius_rows = []
    worst_base2 = ctx.mp.mpf(0)
    min_half = None
    for base in ("2", "half"):
        spec = catalog.Lacunary(base)
        for q in (Fraction(1, 8), Fraction(1, 4)):
            t = scalar_from_pi_fraction(q, ctx)
            est = diagnostics.radius_estimate(spec, t, 16, ctx)
            label = f"{q}*pi [base={base}]"
            radius_rows.append(_radius_row(label, est, ctx))
            if base == "2":
                worst_base2 = max(worst_base2, est.r_hat)
            else:
                min_half = est.r_hat if min_half is None else min(min_half, est.r_hat)
    tables.append(Table("radius_map", RADIUS_HEADER, tuple(radius_rows)))
    verdicts.append(
        Verdict(
            "lacunary base=2 radius collapse at N=16",
            bool(worst_base2 <= ctx.mp.mpf("0.05")),
            "R_hat <= 0.05",
            f"max_R_hat={format_real(worst_base2, ctx)}",
        )
    )
    verdicts.append(
        Verdict(
            "lacunary base=half effectively-infinite radius",
            bool(min_half >= ctx.mp.mpf(10) ** 6),
            "R_hat >= 1e6 marker",
            f"min_R_hat={format_real(min_half, ctx)}",
        )
    )
    meta = [("bases", "2 half"), ("radius_order", "16")]
    return meta, tables, verdicts


def _exp_f(cfg, ctx):
    """Identity residual tables: linearity, product, scale, antiderivative."""
    order = min(cfg.order, 40)
    combos = (
        ("exp", "sin", Fraction(3), Fraction(1, 2)),
        ("exp", "exp", Fraction(2), Fraction(1)),
        ("cos", "poly:1,2,3", Fraction(1, 2), Fraction(1, 3)),
    )
    rows = []
    eps = ctx.mp.ldexp(1, -ctx.bits)
    worst = {"linearity": ctx.mp.mpf(0), "product": ctx.mp.mpf(0), "scale": ctx.mp.mpf(0)}
    for f_text, g_text, a, q in combos:
        t = scalar_from_fraction(q, ctx)
        report = hatseries.algebra_checks(
            catalog.parse_spec(f_text), catalog.parse_spec(g_text), a, t, order, ctx
        )
        for row in report.rows:
            label = f"{row.check}[{f_text},{g_text},a={a}]"
            rows.append(
                (
                    label,
                    _t_label(t, ctx),
                    format_real(row.max_residual, ctx),
                    format_real(row.ulp_scale, ctx),
                )
            )
            scale = row.ulp_scale / eps
            if scale > 0:
                worst[row.check] = max(worst[row.check], row.max_residual / scale)
    anti_rows = []
    worst_anti = ctx.mp.mpf(0)
    for f_text in ("cos", "exp"):
        for q in (Fraction(1, 2), Fraction(1)):
            x = scalar_from_fraction(q, ctx)
            run = hatseries.antiderivative_check(catalog.parse_spec(f_text), x, 40, ctx)
            mag = abs(run.total)
            worst_anti = max(worst_anti, mag)
            anti_rows.append(
                (
                    f"antiderivative({f_text})",
                    str(q),
                    format_real(mag, ctx),
                    format_real(run.cancellation_bits, ctx),
                )
            )
    tables = [
        Table("identity_residuals", IDENTITY_HEADER, tuple(rows)),
        Table(
            "antiderivative",
            ("check", "x", "abs_H_N", "cancellation_bits"),
            tuple(anti_rows),
        ),
    ]
    verdicts = [
        Verdict(
            "linearity residual",
            bool(worst["linearity"] <= 8 * eps),
            "8 ulp",
            f"worst_rel={format_real(worst['linearity'] / eps, ctx)} ulp",
        ),
        Verdict(
            "scale residual",
            bool(worst["scale"] <= 8 * eps),
            "8 ulp",
            f"worst_rel={format_real(worst['scale'] / eps, ctx)} ulp",
        ),
        Verdict(
            "product convolution residual",
            bool(worst["product"] <= 64 * eps),
            "64 ulp",
            f"worst_rel={format_real(worst['product'] / eps, ctx)} ulp",
        ),
        Verdict(
            "antiderivative |H_40(F)|",
            bool(worst_anti <= ctx.mp.mpf("1e-30")),
            "1e-30",
            f"max={format_real(worst_anti, ctx)}",
        ),
    ]
    meta = [("combos", str(len(combos))), ("order", str(order))]
    return meta, tables, verdicts


def _exp_g(cfg, ctx):
    """Telescoping probes: S_N against finite differences; family recurrence."""
    spec = catalog.parse_spec(cfg.f) if cfg.f else catalog.Analytic("exp")
    t = parse_point_or_grid(cfg.t, ctx)[0] if cfg.t else scalar_from_fraction(Fraction(1, 2), ctx)
    steps = [Fraction(1, 2**20), Fraction(1, 2**21), Fraction(1, 2**22)]
    rows = []
    ratios = {}
    for order in (4, 8, 12):
        for h in steps:
            residual = hatseries.partial_sum_derivative_residual(spec, t, order, h, ctx)
            over_h2 = residual / (ctx.mp.convert(h) ** 2)
            ratios.setdefault(order, []).append(over_h2)
            rows.append(
                (
                    str(order),
                    str(h),
                    format_real(residual, ctx),
                    format_real(over_h2, ctx),
                )
            )
    stable = True
    for order, values in ratios.items():
        lo, hi = min(values), max(values)
        if lo == 0 and hi == 0:
            continue
        if lo == 0 or hi / lo > 2:
            stable = False
    fkn_rows = []
    h30 = Fraction(1, 2**30)
    for k in (1, 2, 3):
        for n in (1, 2, 3):
            residual = hatseries.fkn_recurrence_check(spec, t, k, n, h30, ctx)
            fkn_rows.append(
                (
                    str(k),
                    str(n),
                    str(h30),
                    format_real(residual, ctx),
                    format_real(residual / ctx.mp.convert(h30) ** 2, ctx),
                )
            )
    tables = [
        Table("tail_vs_difference", ("N", "h", "abs_residual", "residual_over_h2"), tuple(rows)),
        Table("fkn_residuals", ("k", "n", "h", "residual", "residual_over_h2"), tuple(fkn_rows)),
    ]
    verdicts = [
        Verdict(
            "central difference of H_N matches S_N at O(h^2)",
            stable,
            "residual/h^2 within factor 2 across h, h/2, h/4",
            f"orders={sorted(ratios)}",
        )
    ]
    meta = [("spec", catalog.format_spec(spec)), ("t", _t_label(t, ctx))]
    return meta, tables, verdicts


def _exp_h(cfg, ctx):
    """Residual of the infinite-order operator f(0) - H_N(t): data only."""
    entries = [
        ("exp", _linspace_fractions(-2, 2, 7)),
        ("sin", _linspace_fractions(-2, 2, 7)),
        ("cos", _linspace_fractions(-2, 2, 7)),
        ("poly:1,2,3", _linspace_fractions(-2, 2, 7)),
        ("rational1p", _linspace_fractions(Fraction(-2, 5), Fraction(5, 2), 7)),
        ("flatexp:s=2", [Fraction(1, 4), Fraction(1, 2), 1, 2]),
    ]
    if cfg.f:
        grid = (
            [s.exact for s in parse_point_or_grid(cfg.t, ctx)]
            if cfg.t
            else _linspace_fractions(-2, 2, 7)
        )
        entries = [(cfg.f, grid)]
    rows = []
    for spec_text, qs in entries:
        spec = catalog.parse_spec(spec_text)
        f0 = catalog.value_at_zero(spec, ctx)
        for q in qs:
            t = scalar_from_fraction(q, ctx)
            run = hatseries.hat_run(spec, t, cfg.order, ctx)
            residual = f0 - run.total
            res_re, res_im = format_complex(residual, ctx)
            rows.append(
                (
                    spec_text,
                    _t_label(t, ctx),
                    res_re,
                    res_im,
                    format_real(run.cancellation_bits, ctx),
                )
            )
    tables = [
        Table(
            "operator_residuals",
            ("f", "t", "residual_re", "residual_im", "cancellation_bits"),
            tuple(rows),
        )
    ]
    meta = [("functions", str(len(entries))), ("order", str(cfg.order))]
    return meta, tables, []


_REGISTRY = {
    "EXP-A": ("analytic-constancy", _exp_a),
    "EXP-B": ("rational-boundary", _exp_b),
    "EXP-C": ("flat-probe", _exp_c),
    "EXP-D": ("dyadic-bump", _exp_d),
    "EXP-E": ("lacunary", _exp_e),
    "EXP-F": ("identities", _exp_f),
    "EXP-G": ("telescoping", _exp_g),
    "EXP-H": ("residual-operator", _exp_h),
}


def experiment_ids():
    return tuple(sorted(_REGISTRY))


def run_experiment(cfg):
    """Execute a registered experiment and return its result tables."""
    if cfg.experiment not in _REGISTRY:
        raise UsageError(
            f"unknown experiment {cfg.experiment!r}; registered: {' '.join(experiment_ids())}"
        )
    name, fn = _REGISTRY[cfg.experiment]
    ctx = make_context(cfg.bits, cfg.guard)
    started = time.monotonic()
    meta, tables, verdicts = fn(cfg, ctx)
    elapsed = time.monotonic() - started
    exploratory = cfg.experiment in EXPLORATORY
    metadata = [
        ("name", name),
        ("bits", str(cfg.bits)),
        ("guard_bits", str(cfg.guard)),
        ("order", str(cfg.order)),
        ("delta", cfg.delta),
        ("precision_digits", str(ctx.decimal_digits)),
    ] + list(meta)
    if exploratory and verdicts:
        raise AssertionError("exploratory experiments must not emit verdict rows")
    return ExperimentResult(
        experiment=cfg.experiment,
        exploratory=exploratory,
        metadata=tuple(metadata),
        tables=tuple(tables),
        verdicts=tuple(verdicts),
        wall_time_s=elapsed,
    )


# ---------------------------------------------------------------------------
# Emission


def render_csv(result):
    """Commented-header CSV with one section per table; verdicts cite thresholds."""
    lines = []
    title = result.experiment + (" (exploratory)" if result.exploratory else "")
    lines.append(f"# experiment = {title}")
    lines.append(f"# exploratory = {'true' if result.exploratory else 'false'}")
    for key, value in result.metadata:
        lines.append(f"# {key} = {value}")
    for table in result.tables:
        lines.append("")
        lines.append(f"# table = {table.name}")
        lines.append(",".join(table.header))
        for row in table.rows:
            lines.append(",".join(row))
    if result.verdicts:
        lines.append("")
        lines.append("# table = verdicts")
        lines.append("check,passed,threshold,details")
        for v in result.verdicts:
            lines.append(
                ",".join((v.check, "true" if v.passed else "false", v.threshold, v.details))
            )
    return "\n".join(lines) + "\n"


def render_json(result):
    doc = {
        "experiment": result.experiment,
        "exploratory": result.exploratory,
        "metadata": {k: v for k, v in result.metadata},
        "tables": {
            t.name: {"header": list(t.header), "rows": [list(r) for r in t.rows]}
            for t in result.tables
        },
        "verdicts": [
            {
                "check": v.check,
                "passed": v.passed,
                "threshold": v.threshold,
                "details": v.details,
            }
            for v in result.verdicts
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(result, fmt, path):
    """Write CSV or JSON; byte-identical across re-runs with the same config."""
    text = render_csv(result) if fmt == "csv" else render_json(result)
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
