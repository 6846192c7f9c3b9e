"""Principal branch of the Lambert W function.

``lambert_w0(x)`` solves ``w * exp(w) = x`` for ``x >= -1/e``.
``lambert_w0_of_exp(y)`` returns ``W(exp(y))`` by solving ``w + log(w) = y``
directly, so arguments like ``exp(800)`` never have to be formed.
"""
from __future__ import annotations

import math

__all__ = ["lambert_w0", "lambert_w0_of_exp", "LambertWError"]

_INV_E = math.exp(-1.0)
# slack below -1/e that is still mapped onto the branch point
_BRANCH_SLACK = 1e-15
_MAX_ITER = 50


class LambertWError(ArithmeticError):
    pass


def _initial_guess(x: float) -> float:
    if x < -0.32:
        # series around the branch point in p = sqrt(2 (e x + 1))
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    if x <= math.e:
        return math.log1p(x) * (1.0 - math.log1p(math.log1p(x)) / (2.0 + math.log1p(x)))
    l1 = math.log(x)
    l2 = math.log(l1)
    return l1 - l2 + l2 / l1


def lambert_w0(x: float) -> float:
    """Principal-branch Lambert W via Halley iteration.

    Raises ``ValueError`` for ``x < -1/e`` (beyond a 1e-15 slack) and
    :class:`LambertWError` if Halley fails to converge in 50 steps.
    """
    x = float(x)
    if math.isnan(x):
        raise ValueError("lambert_w0: argument is NaN")
    if x < -_INV_E - _BRANCH_SLACK:
        raise ValueError(f"lambert_w0: argument {x!r} below the branch point -1/e")
    if x <= -_INV_E:
        return -1.0
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return math.inf
    if x > 1e300:
        # exp(w) would overflow inside Halley; the log form is exact here
        return lambert_w0_of_exp(math.log(x))

    w = _initial_guess(x)
    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            return w
        # Halley step for f(w) = w e^w - x
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):
            return max(w, -1.0)
    raise LambertWError(f"lambert_w0 did not converge for x={x!r}")


def lambert_w0_of_exp(y: float) -> float:
    """``W(exp(y))`` for any real ``y``, i.e. the solution of ``w + log(w) = y``."""
    y = float(y)
    if math.isnan(y):
        raise ValueError("lambert_w0_of_exp: argument is NaN")
    if math.isinf(y):
        return math.inf if y > 0 else 0.0
    if y <= 1.0:
        # exp(y) <= e is representable and W is well-conditioned there
        return lambert_w0(math.exp(y))

    # Halley on h(w) = w + log w - y, seeded with the asymptotic expansion
    ly = math.log(y)
    w = y - ly + ly / y
    if w <= 0.0:
        w = 1.0
    for _ in range(_MAX_ITER):
        h = w + math.log(w) - y
        h1 = 1.0 + 1.0 / w
        h2 = -1.0 / (w * w)
        dw = h / (h1 - 0.5 * h * h2 / h1)
        w_new = w - dw
        if w_new <= 0.0:
            w_new = 0.5 * w
        w = w_new
        if abs(dw) <= 1e-15 * max(1.0, abs(w)):
            return w
    raise LambertWError(f"lambert_w0_of_exp did not converge for y={y!r}")
