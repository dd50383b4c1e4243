import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from valuesched.model import ProcessingOption
from valuesched.valuecurve import ValueCurve, curve_factor, curve_violations, element_profit

PAPER_CURVE = ValueCurve(30000, 40000)
M3_MODE1 = ProcessingOption("M3", "Mode 1", 1256.2, 481.6)


@pytest.mark.parametrize(
    "t, expected",
    [(15000, 1.0), (30000, 1.0), (35000, 0.5), (40000, 0.0), (90000, 0.0)],
)
def test_curve_factor_values(t, expected):
    assert curve_factor(t, PAPER_CURVE) == pytest.approx(expected, abs=1e-12)


def test_penalty_after_zero_point():
    c = ValueCurve(30000, 40000, penalty_rate=1e-4)
    assert curve_factor(45000, c) == pytest.approx(-0.5, abs=1e-12)
    assert curve_factor(40000, c) == 0.0


@pytest.mark.parametrize("et, expected", [(1256.2, 481.6), (35000, 240.8), (40000, 0.0)])
def test_element_profit(et, expected):
    assert element_profit(M3_MODE1, et, PAPER_CURVE) == pytest.approx(expected, abs=1e-9)


def test_right_limit_at_zero_point_is_zero():
    c = ValueCurve(100.0, 200.0)
    assert curve_factor(math.nextafter(200.0, 0.0), c) == pytest.approx(0.0, abs=1e-12)


def test_violations():
    assert curve_violations(ValueCurve(100, 200)) == []
    assert len(curve_violations(ValueCurve(200, 200))) == 1
    assert len(curve_violations(ValueCurve(100, 200), arrival_time_s=150)) == 1
    assert len(curve_violations(ValueCurve(100, 200, -1.0))) == 1


curves = st.tuples(
    st.floats(0, 1e6), st.floats(1e-3, 1e6), st.sampled_from([0.0, 1e-5, 1e-3, 0.5])
).map(lambda x: ValueCurve(x[0], x[0] + x[1], x[2]))


@given(curves, st.floats(0, 3e6), st.floats(0, 3e6))
def test_monotone_non_increasing(c, t1, t2):
    lo, hi = sorted((t1, t2))
    assert curve_factor(lo, c) >= curve_factor(hi, c)


@given(curves.map(lambda c: ValueCurve(c.d_s, c.z_s)), st.floats(0, 3e6))
def test_bounded_without_penalty(c, t):
    assert 0.0 <= curve_factor(t, c) <= 1.0
