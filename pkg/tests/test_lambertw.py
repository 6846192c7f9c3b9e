import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dpush.lambertw import LambertWError, lambert_w0, lambert_w0_of_exp

# bisection of w * exp(w) = x at 40 digits
W_ORACLE = {
    1.0: 0.567143290409783873,
    math.e**2: 1.5571455989976114169,
    10.0: 1.7455280027406993831,
    1e-6: 9.9999900000149999733e-7,
    1e6: 11.383358086140052622,
    -0.3: -0.48940222718021496904,
}


@pytest.mark.parametrize("x,w", sorted(W_ORACLE.items()))
def test_oracle_values(x, w):
    assert lambert_w0(x) == pytest.approx(w, rel=1e-14)


def test_log_grid_residual():
    xs = np.logspace(-6, 6, 2001)
    worst = max(abs(lambert_w0(x) * math.exp(lambert_w0(x)) - x) / x for x in xs)
    assert worst <= 1e-12


def test_branch_point_and_domain():
    assert lambert_w0(-math.exp(-1.0)) == -1.0
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(-0.36787944) > -1.0
    with pytest.raises(ValueError):
        lambert_w0(-0.5)
    with pytest.raises(ValueError):
        lambert_w0(float("nan"))
    assert lambert_w0(math.inf) == math.inf
    assert issubclass(LambertWError, ArithmeticError)


@given(st.floats(-0.3678, 1e300))
@settings(max_examples=300)
def test_monotone_and_residual(x):
    w = lambert_w0(x)
    assert w >= -1.0
    if x < 1e299:
        assert lambert_w0(x + abs(x) * 1e-3 + 1e-9) >= w
    if abs(x) > 1e-300:
        assert w * math.exp(w) == pytest.approx(x, rel=1e-12, abs=1e-15)


def test_of_exp_large_arguments():
    # W(e^y) + log W(e^y) = y without ever forming e^y
    for y in (2.0, 50.0, 709.0, 800.0, 1000.0, 1e6):
        w = lambert_w0_of_exp(y)
        assert w + math.log(w) == pytest.approx(y, rel=1e-14)
    assert lambert_w0_of_exp(2.0) == pytest.approx(1.5571455989976114169, rel=1e-14)


@given(st.floats(-30.0, 30.0))
def test_of_exp_matches_direct(y):
    assert lambert_w0_of_exp(y) == pytest.approx(lambert_w0(math.exp(y)), rel=1e-13, abs=1e-300)
