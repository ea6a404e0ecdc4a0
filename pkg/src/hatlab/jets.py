"""Truncated power-series (jet) arithmetic.

A jet stores a function around a point t as scaled Taylor coefficients
c_n = f^(n)(t)/n!, n = 0..order. Storing scaled coefficients keeps the
alternating-series term at (-1)^n t^n c_n without explicit factorials; raw
derivatives are recovered on demand as c_n * n!.

Composition is deliberately limited to the recurrences needed by the function
catalog (exp, sin/cos, division) plus argument rescaling; there is no general
composition. All recurrences are triangular: coefficient n never depends on
coefficients above n, so truncation and order-extension are consistent
bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import JetMismatch, NearZeroDivision

# Threshold exponent offset for "(near-)zero constant term" in division:
# below 2^(-bits + NEAR_ZERO_MARGIN) relative to the largest coefficient the
# quotient carries no trustworthy digits.
NEAR_ZERO_MARGIN = 8


@dataclass(frozen=True)
class Jet:
    """Immutable jet: center t, coefficients (mpf or mpc), precision context."""

    center: object
    coeffs: tuple
    ctx: object

    @property
    def order(self):
        return len(self.coeffs) - 1

    def raw_derivative(self, n):
        """f^(n)(t) = c_n * n!."""
        return self.coeffs[n] * self.ctx.mp.factorial(n)

    def raw_derivatives(self):
        return tuple(self.raw_derivative(n) for n in range(self.order + 1))

    def truncated(self, order):
        if order > self.order:
            raise JetMismatch(f"cannot extend jet of order {self.order} to {order}")
        return Jet(self.center, self.coeffs[: order + 1], self.ctx)


def _require_compatible(x, y):
    if x.ctx is not y.ctx and x.ctx != y.ctx:
        raise JetMismatch("jets built under different precision contexts")
    if x.order != y.order:
        raise JetMismatch(f"jet orders differ: {x.order} vs {y.order}")
    if x.center != y.center:
        raise JetMismatch("jets centered at different points")


def identity(center, order, ctx):
    """Jet of the identity map at ``center``: (center, 1, 0, ..., 0)."""
    if order < 0:
        raise JetMismatch("order must be non-negative")
    c = ctx.convert(center)
    zero, one = ctx.mp.mpf(0), ctx.mp.mpf(1)
    coeffs = [c] + ([one] if order >= 1 else []) + [zero] * max(0, order - 1)
    return Jet(c, tuple(coeffs), ctx)


def constant(value, center, order, ctx):
    """Jet of a constant function: (value, 0, ..., 0)."""
    if order < 0:
        raise JetMismatch("order must be non-negative")
    c = ctx.convert(center)
    v = value if hasattr(value, "_mpc_") else ctx.mp.convert(value)
    coeffs = [v] + [ctx.mp.mpf(0)] * order
    return Jet(c, tuple(coeffs), ctx)


def zero(center, order, ctx):
    return constant(0, center, order, ctx)


def linear(a, x, b, y):
    """Coefficient-wise a*x + b*y for jets sharing center/order/context."""
    _require_compatible(x, y)
    mp = x.ctx.mp
    a = mp.convert(a) if not hasattr(a, "_mpc_") else a
    b = mp.convert(b) if not hasattr(b, "_mpc_") else b
    coeffs = tuple(a * xn + b * yn for xn, yn in zip(x.coeffs, y.coeffs))
    return Jet(x.center, coeffs, x.ctx)


def scale(x, a):
    """Coefficient-wise a*x."""
    mp = x.ctx.mp
    a = mp.convert(a) if not hasattr(a, "_mpc_") else a
    return Jet(x.center, tuple(a * xn for xn in x.coeffs), x.ctx)


def mul(x, y):
    """Cauchy product truncated at the shared order."""
    _require_compatible(x, y)
    n_max = x.order
    coeffs = []
    for n in range(n_max + 1):
        acc = x.coeffs[0] * y.coeffs[n]
        for i in range(1, n + 1):
            acc = acc + x.coeffs[i] * y.coeffs[n - i]
        coeffs.append(acc)
    return Jet(x.center, tuple(coeffs), x.ctx)


def div(x, y):
    """Series quotient z with mul(z, y) = x; requires |y_0| well above zero.

    Recurrence: z_n = (x_n - sum_{k<n} z_k y_{n-k}) / y_0.
    """
    _require_compatible(x, y)
    mp = x.ctx.mp
    norm = max(abs(c) for c in y.coeffs)
    y0_mag = abs(y.coeffs[0])
    if norm == 0 or y0_mag == 0 or y0_mag <= mp.ldexp(norm, -x.ctx.bits + NEAR_ZERO_MARGIN):
        raise NearZeroDivision("division by (near-)zero constant term")
    coeffs = []
    for n in range(x.order + 1):
        acc = x.coeffs[n]
        for k in range(n):
            acc = acc - coeffs[k] * y.coeffs[n - k]
        coeffs.append(acc / y.coeffs[0])
    return Jet(x.center, tuple(coeffs), x.ctx)


def exp(x):
    """exp of a jet: z_0 = e^{x_0}, n z_n = sum_{k=1..n} k x_k z_{n-k}."""
    mp = x.ctx.mp
    z = [mp.exp(x.coeffs[0])]
    for n in range(1, x.order + 1):
        acc = x.coeffs[1] * z[n - 1]
        for k in range(2, n + 1):
            acc = acc + k * x.coeffs[k] * z[n - k]
        z.append(acc / n)
    return Jet(x.center, tuple(z), x.ctx)


def sin_cos(x):
    """Simultaneous sin/cos of a jet via the coupled first-order recurrences."""
    mp = x.ctx.mp
    s = [mp.sin(x.coeffs[0])]
    c = [mp.cos(x.coeffs[0])]
    for n in range(1, x.order + 1):
        acc_s = x.coeffs[1] * c[n - 1]
        acc_c = x.coeffs[1] * s[n - 1]
        for k in range(2, n + 1):
            acc_s = acc_s + k * x.coeffs[k] * c[n - k]
            acc_c = acc_c + k * x.coeffs[k] * s[n - k]
        s.append(acc_s / n)
        c.append(-acc_c / n)
    return Jet(x.center, tuple(s), x.ctx), Jet(x.center, tuple(c), x.ctx)


def rescale_argument(x, a, t):
    """Turn a jet of f at a*t into the jet of g(s) = f(a*s) at s = t.

    g^(n)(t) = a^n f^(n)(a t), so coefficients pick up a^n and the center
    moves to t. ``x`` must be centered at a*t.
    """
    mp = x.ctx.mp
    a = mp.convert(a)
    t = mp.convert(t)
    expected = a * t
    tol = mp.ldexp(max(mp.mpf(1), abs(expected)), -x.ctx.bits + NEAR_ZERO_MARGIN)
    if abs(x.center - expected) > tol:
        raise JetMismatch("input jet is not centered at a*t")
    coeffs = []
    power = mp.mpf(1)
    for n, cn in enumerate(x.coeffs):
        if n > 0:
            power = power * a
        coeffs.append(power * cn if n > 0 else cn)
    return Jet(t, tuple(coeffs), x.ctx)
