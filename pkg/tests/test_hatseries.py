"""Series terms, partial sums, tails, family recurrence, identity checks."""

from fractions import Fraction

import pytest

from hatlab import (
    UnsupportedCheck,
    UsageError,
    algebra_checks,
    antiderivative_check,
    catalog,
    fkn_recurrence_check,
    fkn_value,
    hat_run,
    hat_terms,
    jets,
    parse_spec,
    partial_sum_derivative_residual,
    scalar_from_fraction,
    tail_term,
    taylor_terms_at_zero,
)

from .conftest import ulp
from .oracles import rational_hat_term


def test_quadratic_telescopes_exactly(ctx256):
    # f = t^2 at t = 5: terms 25, -50, 25, 0, 0 and H_4 = 0 = f(0)
    run = hat_run(parse_spec("poly:0,0,1"), scalar_from_fraction(5, ctx256), 4, ctx256)
    assert [int(term) for term in run.terms] == [25, -50, 25, 0, 0]
    assert run.total == 0
    assert run.cancellation_bits == 0  # zero-total convention
    assert run.precision_ok


def test_exp_partial_sum_converges_to_one(ctx256):
    run = hat_run(parse_spec("exp"), scalar_from_fraction(1, ctx256), 40, ctx256)
    mp = ctx256.mp
    assert abs(run.total - 1) <= 2 * mp.e / mp.factorial(41)


def test_rational_terms_match_closed_form(ctx256):
    # oracle: t^n/(1+t)^(n+1), exact rational arithmetic
    run = hat_run(parse_spec("rational1p"), scalar_from_fraction(1, ctx256), 3, ctx256)
    mp = ctx256.mp
    for n, term in enumerate(run.terms):
        assert term == ctx256.mp_guard.convert(rational_hat_term(Fraction(1), n))
    assert run.partials[-1] == mp.mpf(15) / 16  # exact dyadic sum


def test_partials_reproduce_under_resummation(ctx256):
    run = hat_run(parse_spec("exp"), scalar_from_fraction(Fraction(2, 3), ctx256), 20, ctx256)
    g = ctx256.mp_guard
    acc = g.mpf(0)
    for term, partial in zip(run.terms, run.partials):
        acc = acc + term
        assert acc == partial


@pytest.mark.parametrize(
    "spec_text,q",
    [
        ("exp", Fraction(2, 3)),
        ("sin", Fraction(-1, 3)),
        ("rational1p", Fraction(1, 2)),
        ("flatexp:s=2", Fraction(3, 4)),
    ],
)
def test_translation_identity_is_bitwise(ctx256, spec_text, q):
    # the series terms ARE the Taylor terms of f around t evaluated at 0
    spec = parse_spec(spec_text)
    t = scalar_from_fraction(q, ctx256)
    jet = catalog.jet_of(spec, t, 16, ctx256)
    assert hat_terms(jet, t, ctx256) == taylor_terms_at_zero(jet, t, ctx256)


def test_lacunary_run_carries_certificate(ctx256):
    run = hat_run(parse_spec("lacunary:base=half"), scalar_from_fraction(1, ctx256), 8, ctx256)
    assert run.truncation is not None
    assert run.truncation.tail_bound <= run.truncation.target


def test_insufficient_precision_flag(ctx256):
    mp = ctx256.mp
    # terms a_n = (-1)^n c_n at t=1: (2^270, -2^270, 1) burns 270 of the 288
    # guarded bits, leaving fewer than the 32-bit trust margin
    coeffs = (mp.mpf(2) ** 270, mp.mpf(2) ** 270, mp.mpf(1))
    jet = jets.Jet(mp.mpf(1), coeffs, ctx256)
    run = hat_run(parse_spec("poly:1"), scalar_from_fraction(1, ctx256), 2, ctx256, jet=jet)
    assert not run.precision_ok
    assert "insufficient precision" in run.warning


# -- tail terms ---------------------------------------------------------------


def test_tail_vanishes_for_low_degree_poly(ctx256):
    value = tail_term(parse_spec("poly:0,0,1"), scalar_from_fraction(7, ctx256), 2, ctx256)
    assert value.value == 0


def test_tail_exp_order_one(ctx256):
    # S_1 = -t e^t at t=1
    value = tail_term(parse_spec("exp"), scalar_from_fraction(1, ctx256), 1, ctx256)
    mp = ctx256.mp
    assert abs(value.value + mp.e) <= 8 * mp.e * ulp(ctx256)


def test_tail_zero_at_origin(ctx256):
    for order in (1, 5):
        value = tail_term(parse_spec("exp"), scalar_from_fraction(0, ctx256), order, ctx256)
        assert value.value == 0


def test_telescoping_difference_is_h_squared(ctx256):
    # |FD(H_N) - S_N| / h^2 stabilizes as h halves (criterion: factor 2)
    spec = parse_spec("exp")
    t = scalar_from_fraction(Fraction(1, 2), ctx256)
    for order in (4, 8, 12):
        ratios = []
        for p in (20, 21, 22):
            res = partial_sum_derivative_residual(spec, t, order, Fraction(1, 2**p), ctx256)
            ratios.append(res * ctx256.mp.mpf(4) ** p)
        lo, hi = min(ratios), max(ratios)
        assert hi <= 2 * lo


def test_telescoping_sampled_catalog(ctx256):
    # same law for other analytic members at N <= 12
    for spec_text, q in [("sin", Fraction(1, 3)), ("rational1p", Fraction(1, 4))]:
        spec = parse_spec(spec_text)
        t = scalar_from_fraction(q, ctx256)
        ratios = []
        for p in (20, 21, 22):
            res = partial_sum_derivative_residual(spec, t, 8, Fraction(1, 2**p), ctx256)
            ratios.append(res * ctx256.mp.mpf(4) ** p)
        assert max(ratios) <= 2 * min(ratios)


# -- shifted-derivative family ------------------------------------------------


def test_fkn_vanishes_at_origin(ctx256):
    for n in (1, 2, 5):
        value = fkn_value(parse_spec("exp"), scalar_from_fraction(0, ctx256), 2, n, ctx256)
        assert value.value == 0


def test_fkn_recurrence_residual_h_squared(ctx256):
    spec = parse_spec("exp")
    t = scalar_from_fraction(Fraction(1, 2), ctx256)
    residuals = []
    for p in (30, 31):
        res = fkn_recurrence_check(spec, t, 2, 3, Fraction(1, 2**p), ctx256)
        residuals.append(res)
    # residual ~ C h^2 with moderate C
    assert residuals[0] <= ctx256.mp.mpf(2) ** (-55)
    ratio = residuals[0] / residuals[1]
    assert 3 <= ratio <= 5  # halving h quarters the residual


def test_fkn_recurrence_poly_exact(ctx256):
    # degree-2 polynomial with n + k > 2: every member vanishes identically
    spec = parse_spec("poly:1,2,3")
    t = scalar_from_fraction(Fraction(2, 3), ctx256)
    res = fkn_recurrence_check(spec, t, 3, 3, Fraction(1, 2**20), ctx256)
    assert res <= ctx256.mp.ldexp(1, -200)


def test_fkn_needs_positive_n(ctx256):
    with pytest.raises(UsageError):
        fkn_recurrence_check(parse_spec("exp"), scalar_from_fraction(1, ctx256), 1, 0,
                             Fraction(1, 2), ctx256)


# -- algebra identities --------------------------------------------------------


def test_algebra_checks_exp_sin(ctx256):
    report = algebra_checks(
        parse_spec("exp"), parse_spec("sin"), Fraction(3), scalar_from_fraction(Fraction(1, 2), ctx256),
        40, ctx256,
    )
    by_name = {row.check: row for row in report.rows}
    assert by_name["linearity"].max_residual <= 8 * by_name["linearity"].ulp_scale
    assert by_name["scale"].max_residual <= 8 * by_name["scale"].ulp_scale
    assert by_name["product"].max_residual <= 64 * by_name["product"].ulp_scale


def test_product_exp_squared_small_residual(ctx256):
    # hat terms of e^{2t} vs convolution: same-sign sums, residual a few ulp
    report = algebra_checks(
        parse_spec("exp"), parse_spec("exp"), Fraction(2), scalar_from_fraction(1, ctx256),
        40, ctx256,
    )
    row = {r.check: r for r in report.rows}["product"]
    assert row.max_residual <= 8 * row.ulp_scale


def test_linearity_with_zero_coefficient_scales_exactly(ctx256):
    t = scalar_from_fraction(Fraction(1, 3), ctx256)
    jf = catalog.jet_of(parse_spec("exp"), t, 12, ctx256)
    jg = catalog.jet_of(parse_spec("sin"), t, 12, ctx256)
    a = ctx256.mp.mpf(2)
    combined = jets.linear(a, jf, 0, jg)
    lhs = hat_terms(combined, t, ctx256)
    rhs = hat_terms(jf, t, ctx256)
    for l, r in zip(lhs, rhs):
        scale = max(abs(r), ctx256.mp.mpf(1) / 10**40)
        assert abs(l - a * r) <= 4 * scale * ulp(ctx256)


def test_scale_identity_terms_match(ctx256):
    # terms of s -> f(3s) at t=1 equal terms of f at 3
    report = algebra_checks(
        parse_spec("exp"), parse_spec("sin"), Fraction(3), scalar_from_fraction(1, ctx256),
        30, ctx256,
    )
    row = {r.check: r for r in report.rows}["scale"]
    assert row.max_residual <= 8 * row.ulp_scale


# -- antiderivative -------------------------------------------------------------


def test_antiderivative_cos_settles_at_zero(ctx256):
    run = antiderivative_check(parse_spec("cos"), scalar_from_fraction(1, ctx256), 40, ctx256)
    assert abs(run.total) <= ctx256.mp.mpf("1e-30")


def test_antiderivative_exp_settles_at_zero(ctx256):
    run = antiderivative_check(
        parse_spec("exp"), scalar_from_fraction(Fraction(1, 2), ctx256), 40, ctx256
    )
    assert abs(run.total) <= ctx256.mp.mpf("1e-30")


def test_antiderivative_constant_poly(ctx256):
    # f = 1, F = x: terms (x, -x), H_N = 0 from order 1 on
    run = antiderivative_check(parse_spec("poly:1"), scalar_from_fraction(3, ctx256), 5, ctx256)
    assert [int(term) for term in run.terms[:2]] == [3, -3]
    assert all(term == 0 for term in run.terms[2:])
    assert run.total == 0


def test_antiderivative_unsupported(ctx256):
    with pytest.raises(UnsupportedCheck, match="unsupported for antiderivative"):
        antiderivative_check(
            parse_spec("rational1p"), scalar_from_fraction(1, ctx256), 10, ctx256
        )
