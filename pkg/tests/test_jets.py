"""Jet arithmetic: seeds, ring operations, recurrences, and their laws."""

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatlab import JetMismatch, NearZeroDivision, jets, make_context

from .conftest import ulp


def _jet_from(ctx, coeffs, center=0):
    return jets.Jet(
        ctx.convert(center), tuple(ctx.mp.convert(c) for c in coeffs), ctx
    )


def _assert_close(ctx, got, want, ulps=8, scale=None):
    want = ctx.mp.convert(want)
    scale = abs(want) if scale is None else ctx.mp.convert(scale)
    if scale == 0:
        scale = ctx.mp.mpf(1)
    assert abs(got - want) <= ulps * scale * ulp(ctx), (got, want)


# -- seeds ------------------------------------------------------------------


def test_identity_seed(ctx256):
    j = jets.identity(3, 4, ctx256)
    assert [int(c) for c in j.coeffs] == [3, 1, 0, 0, 0]


def test_constant_seed(ctx256):
    j = jets.constant(7, 2, 2, ctx256)
    assert [int(c) for c in j.coeffs] == [7, 0, 0]


def test_zeroth_order_identity(ctx256):
    j = jets.identity(0, 0, ctx256)
    assert j.coeffs == (ctx256.mp.mpf(0),)


# -- linear -----------------------------------------------------------------


def test_linear_componentwise_add(ctx256):
    x = _jet_from(ctx256, [1, 2])
    y = _jet_from(ctx256, [3, 4])
    z = jets.linear(1, x, 1, y)
    assert [int(c) for c in z.coeffs] == [4, 6]


def test_linear_annihilation_returns_scaled(ctx256):
    x = _jet_from(ctx256, [1, 2])
    y = _jet_from(ctx256, [3, 4])
    z = jets.linear(0, x, 5, y)
    assert all(zc == 5 * yc for zc, yc in zip(z.coeffs, y.coeffs))


def test_linear_affine(ctx256):
    x = _jet_from(ctx256, [1, 1, 1])
    y = _jet_from(ctx256, [1, 0, 0])
    z = jets.linear(2, x, -1, y)
    assert [int(c) for c in z.coeffs] == [1, 2, 2]


def test_linear_mismatch(ctx256):
    x = _jet_from(ctx256, [1, 2])
    y = _jet_from(ctx256, [1, 2, 3])
    with pytest.raises(JetMismatch):
        jets.linear(1, x, 1, y)


# -- mul --------------------------------------------------------------------


def test_mul_binomial_square(ctx256):
    x = _jet_from(ctx256, [1, 1, 0])
    z = jets.mul(x, x)
    assert [int(c) for c in z.coeffs] == [1, 2, 1]


def test_mul_identity_element(ctx256):
    x = _jet_from(ctx256, [2, 5, 7, 11])
    one = jets.constant(1, 0, 3, ctx256)
    assert jets.mul(x, one).coeffs == x.coeffs


def test_mul_monomials_at_two(ctx256):
    # t^2 * t^3 = t^5 around t=2; oracle: binomial expansion of (2+h)^5.
    ident = jets.identity(2, 5, ctx256)
    sq = jets.mul(ident, ident)
    cube = jets.mul(sq, ident)
    product = jets.mul(sq, cube)
    expected = [comb(5, n) * 2 ** (5 - n) for n in range(6)]
    assert [int(c) for c in product.coeffs] == expected  # exact (integers)


# -- div --------------------------------------------------------------------


def test_div_geometric(ctx256):
    one = jets.constant(1, 0, 3, ctx256)
    denom = _jet_from(ctx256, [1, 1, 0, 0])
    z = jets.div(one, denom)
    assert [int(c) for c in z.coeffs] == [1, -1, 1, -1]


def test_div_rational_at_one(ctx256):
    # 1/(1+t) at t=1: c_n = (-1)^n / 2^(n+1), exactly representable.
    one = jets.constant(1, 1, 2, ctx256)
    denom = jets.linear(1, one, 1, jets.identity(1, 2, ctx256))
    z = jets.div(one, denom)
    mp = ctx256.mp
    assert z.coeffs == (mp.mpf(0.5), mp.mpf(-0.25), mp.mpf(0.125))


def test_div_self_is_one(ctx256):
    x = _jet_from(ctx256, [3, 1, 4, 1, 5])
    z = jets.div(x, x)
    _assert_close(ctx256, z.coeffs[0], 1, ulps=2)
    for c in z.coeffs[1:]:
        _assert_close(ctx256, c, 0, ulps=8, scale=1)


def test_div_near_zero_rejected(ctx256):
    num = jets.constant(1, 0, 2, ctx256)
    denom = _jet_from(ctx256, [ctx256.mp.ldexp(1, -300), 1, 1])
    with pytest.raises(NearZeroDivision, match="near"):
        jets.div(num, denom)


# -- exp --------------------------------------------------------------------


def test_exp_taylor(ctx256):
    z = jets.exp(jets.identity(0, 3, ctx256))
    mp = ctx256.mp
    expected = [1, 1, mp.mpf(1) / 2, mp.mpf(1) / 6]
    for got, want in zip(z.coeffs, expected):
        _assert_close(ctx256, got, want, ulps=4)


def test_exp_constant(ctx256):
    z = jets.exp(jets.constant(2, 5, 3, ctx256))
    _assert_close(ctx256, z.coeffs[0], ctx256.mp.exp(2), ulps=2)
    assert all(c == 0 for c in z.coeffs[1:])


def test_exp_of_inverse_square_jet(ctx256):
    # f = e^{-1/t^2} at t=1: hand derivatives give c = (1/e, 2/e, -1/e).
    mp = ctx256.mp
    ident = jets.identity(1, 2, ctx256)
    sq = jets.mul(ident, ident)
    inv = jets.div(jets.constant(1, 1, 2, ctx256), sq)
    z = jets.exp(jets.scale(inv, -1))
    inv_e = mp.exp(-1)
    _assert_close(ctx256, z.coeffs[0], inv_e, ulps=8)
    _assert_close(ctx256, z.coeffs[1], 2 * inv_e, ulps=8)
    _assert_close(ctx256, z.coeffs[2], -inv_e, ulps=16, scale=inv_e)


# -- sin/cos ----------------------------------------------------------------


def test_sin_cos_taylor(ctx256):
    s, c = jets.sin_cos(jets.identity(0, 3, ctx256))
    mp = ctx256.mp
    for got, want in zip(s.coeffs, [0, 1, 0, -mp.mpf(1) / 6]):
        _assert_close(ctx256, got, want, ulps=4, scale=1)
    for got, want in zip(c.coeffs, [1, 0, -mp.mpf(1) / 2, 0]):
        _assert_close(ctx256, got, want, ulps=4, scale=1)


def test_sin_at_half_pi(ctx256):
    mp = ctx256.mp
    s, _ = jets.sin_cos(jets.identity(mp.pi / 2, 2, ctx256))
    # derivatives of sin at pi/2: (1, 0, -1/2) after the 1/n! scaling
    _assert_close(ctx256, s.coeffs[0], 1, ulps=4)
    _assert_close(ctx256, s.coeffs[1], 0, ulps=4, scale=1)
    _assert_close(ctx256, s.coeffs[2], mp.mpf(-1) / 2, ulps=8)


@settings(max_examples=20, deadline=None)
@given(center=st.fractions(min_value=-3, max_value=3, max_denominator=64))
def test_pythagorean_identity(center):
    ctx = CTX128
    s, c = jets.sin_cos(jets.identity(ctx.convert(center), 6, ctx))
    total = jets.linear(1, jets.mul(s, s), 1, jets.mul(c, c))
    _assert_close(ctx, total.coeffs[0], 1, ulps=8)
    for coeff in total.coeffs[1:]:
        assert abs(coeff) <= 8 * ulp(ctx)


# -- rescale ----------------------------------------------------------------


def test_rescale_unit_is_identity(ctx256):
    z = jets.exp(jets.identity(2, 4, ctx256))
    r = jets.rescale_argument(z, 1, 2)
    assert r.coeffs == z.coeffs


def test_rescale_zero_gives_constant(ctx256):
    z = jets.exp(jets.identity(0, 4, ctx256))
    r = jets.rescale_argument(z, 0, 5)
    assert r.coeffs[0] == z.coeffs[0]
    assert all(c == 0 for c in r.coeffs[1:])


def test_rescale_exp_rate_three(ctx256):
    # g(s) = e^{3s} at s=1: coefficients 3^n e^3 / n!.
    mp = ctx256.mp
    z = jets.exp(jets.identity(3, 6, ctx256))
    r = jets.rescale_argument(z, 3, 1)
    e3 = mp.exp(3)
    for n, c in enumerate(r.coeffs):
        _assert_close(ctx256, c, (3**n) * e3 / mp.factorial(n), ulps=16)


def test_rescale_wrong_center(ctx256):
    z = jets.exp(jets.identity(2, 3, ctx256))
    with pytest.raises(JetMismatch):
        jets.rescale_argument(z, 3, 1)  # jet is centered at 2, not 3


# -- algebraic laws (property tests) ----------------------------------------

CTX128 = make_context(128, 0)

small_coeffs = st.lists(
    st.fractions(min_value=-4, max_value=4, max_denominator=16), min_size=3, max_size=6
)


def _conv_condition(*operands):
    """Per-coefficient condition scale: convolution of |coefficients|.

    Rounding errors of any association of jet products stay within a few ulp
    of this (the sum of absolute products feeding each coefficient).
    """
    acc = [abs(c) for c in operands[0].coeffs]
    for op in operands[1:]:
        mags = [abs(c) for c in op.coeffs]
        out = []
        for n in range(len(acc)):
            out.append(sum((acc[i] * mags[n - i] for i in range(n + 1)), CTX128.mp.mpf(0)))
        acc = out
    return acc


@settings(max_examples=25, deadline=None)
@given(a=small_coeffs, b=small_coeffs)
def test_mul_commutative(a, b):
    ctx = CTX128
    order = min(len(a), len(b)) - 1
    x = _jet_from(ctx, a[: order + 1])
    y = _jet_from(ctx, b[: order + 1])
    left = jets.mul(x, y)
    right = jets.mul(y, x)
    scales = _conv_condition(x, y)
    for lc, rc, s in zip(left.coeffs, right.coeffs, scales):
        assert abs(lc - rc) <= 8 * max(s, ctx.mp.mpf(1)) * ulp(ctx)


@settings(max_examples=25, deadline=None)
@given(a=small_coeffs, b=small_coeffs, c=small_coeffs)
def test_mul_associative(a, b, c):
    ctx = CTX128
    order = min(len(a), len(b), len(c)) - 1
    x, y, z = (_jet_from(ctx, v[: order + 1]) for v in (a, b, c))
    left = jets.mul(jets.mul(x, y), z)
    right = jets.mul(x, jets.mul(y, z))
    scales = _conv_condition(x, y, z)
    for lc, rc, s in zip(left.coeffs, right.coeffs, scales):
        assert abs(lc - rc) <= 8 * max(s, ctx.mp.mpf(1)) * ulp(ctx)


@settings(max_examples=25, deadline=None)
@given(a=small_coeffs, b=small_coeffs)
def test_div_reconstructs_dividend(a, b):
    ctx = CTX128
    order = min(len(a), len(b)) - 1
    if b[0] == 0:
        b = [Fraction(1)] + list(b[1:])
    x = _jet_from(ctx, a[: order + 1])
    y = _jet_from(ctx, b[: order + 1])
    quotient = jets.div(x, y)
    back = jets.mul(quotient, y)
    scales = _conv_condition(quotient, y)
    for bc, xc, s in zip(back.coeffs, x.coeffs, scales):
        assert abs(bc - xc) <= 8 * max(s, ctx.mp.mpf(1)) * ulp(ctx)


@settings(max_examples=25, deadline=None)
@given(a=small_coeffs, b=small_coeffs)
def test_truncation_consistency(a, b):
    # computing at order 2N then truncating equals computing at order N
    ctx = CTX128
    order = min(len(a), len(b)) - 1
    half = order // 2
    x = _jet_from(ctx, a[: order + 1])
    y = _jet_from(ctx, b[: order + 1])
    full = jets.mul(x, y).truncated(half)
    short = jets.mul(x.truncated(half), y.truncated(half))
    for fc, sc in zip(full.coeffs, short.coeffs):
        scale = max(abs(fc), ctx.mp.mpf(1))
        assert abs(fc - sc) <= 4 * scale * ulp(ctx)


def test_raw_derivative_recovery(ctx256):
    z = jets.exp(jets.identity(0, 5, ctx256))
    # f^(n)(0) = 1 for exp
    for n in range(6):
        _assert_close(ctx256, z.raw_derivative(n), 1, ulps=16)
